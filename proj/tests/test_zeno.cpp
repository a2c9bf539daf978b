#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "zenolab/errors.hpp"
#include "zenolab/qubits.hpp"
#include "zenolab/random.hpp"
#include "zenolab/zeno.hpp"

using namespace zenolab;

namespace {

HermitianOperator sz() { return single_qubit_sz(); }

QuantumState plus() {
  ComplexVector v(2);
  v << 1.0, 1.0;
  return QuantumState::normalized(v);
}

ZenoScenario two_level(double t, int m) {
  return ZenoScenario(sz(), Projector::onto_state(plus()), plus(), t, m);
}

QubitEnsembleSpec spec_of(int n, StateFamily family, double omega = 1.0) {
  QubitEnsembleSpec s;
  s.n_qubits = n;
  s.omega = omega;
  s.family = std::move(family);
  return s;
}

HermitianOperator random_hermitian(CounterRng& rng, Eigen::Index n) {
  ComplexMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(2 * rng.uniform() - 1, 2 * rng.uniform() - 1);
  return HermitianOperator(0.5 * (m + m.adjoint()));
}

QuantumState random_state(CounterRng& rng, Eigen::Index n) {
  ComplexVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(2 * rng.uniform() - 1, 2 * rng.uniform() - 1);
  return QuantumState::normalized(v);
}

double cos_power(double tau, int m) { return std::pow(std::cos(tau / 2), 2 * m); }

}  // namespace

TEST_CASE("scenario invariants") {
  CHECK_THROWS_AS(ZenoScenario(sz(), Projector::onto_state(QuantumState::basis(2, 0)), plus(), 1.0, 10),
                  ValidationError);
  CHECK_THROWS_AS(two_level(0.0, 10), ValidationError);
  CHECK_THROWS_AS(two_level(1.0, 0), ValidationError);
  CHECK(two_level(1.0, 10).tau() == doctest::Approx(0.1));
}

TEST_CASE("effective Hamiltonian") {
  SUBCASE("P = I gives zero") {
    const HermitianOperator hb = effective_hamiltonian(sz(), Projector::identity(2));
    CHECK(hb.matrix().norm() < 1e-15);
  }
  SUBCASE("|+> with s_z leaves s_z") {
    const HermitianOperator hb = effective_hamiltonian(sz(), Projector::onto_state(plus()));
    CHECK((hb.matrix() - sz().matrix()).norm() < 1e-15);
  }
  SUBCASE("Hermitian on random inputs") {
    CounterRng rng(31, "hbar");
    for (int trial = 0; trial < 20; ++trial) {
      const HermitianOperator h = random_hermitian(rng, 5);
      ComplexMatrix span(5, 2);
      span.col(0) = random_state(rng, 5).amplitudes();
      span.col(1) = random_state(rng, 5).amplitudes();
      const Projector p = Projector::onto_span(span);
      const HermitianOperator hb = effective_hamiltonian(h, p);
      CHECK(max_asymmetry(hb.matrix()) < 1e-12);
      CHECK((hb.matrix() - (h.matrix() - p.matrix() * h.matrix() * p.matrix())).norm() < 1e-12);
    }
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(effective_hamiltonian(sz(), Projector::identity(3)), ValidationError);
  }
}

TEST_CASE("exact survival, pure") {
  CHECK(survival_exact_pure(sz(), plus(), 0.0, 5) == 1.0);
  CHECK(survival_exact_pure(sz(), plus(), 0.1, 10) == doctest::Approx(cos_power(0.1, 10)).epsilon(1e-13));
  CHECK(cos_power(0.1, 10) == doctest::Approx(0.975300).epsilon(1e-6));
  for (double tau : {0.01, 0.3, 2.0})
    CHECK(survival_exact_pure(sz(), QuantumState::basis(2, 1), tau, 7) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("exact survival, projected") {
  CHECK(survival_exact_projected(two_level(1.0, 10)) == doctest::Approx(cos_power(0.1, 10)).epsilon(1e-10));

  SUBCASE("commuting projector gives exactly 1") {
    RealVector d(3);
    d << 1.0, 2.0, 3.0;
    const HermitianOperator h = HermitianOperator::diagonal(d);
    ComplexMatrix span = ComplexMatrix::Zero(3, 2);
    span(0, 0) = span(1, 1) = 1.0;
    ComplexVector v(3);
    v << 0.6, 0.8, 0.0;
    for (int m : {1, 7, 100}) {
      const ZenoScenario s(h, Projector::onto_span(span), QuantumState(v), 2.5, m);
      CHECK(std::abs(survival_exact_projected(s) - 1.0) < 1e-14);
    }
  }
  SUBCASE("Zeno limit at m = 1e4") { CHECK(survival_exact_projected(two_level(1.0, 10000)) > 0.9999); }
  SUBCASE("rank-1 projected agrees with pure on random scenarios") {
    CounterRng rng(32, "proj");
    for (int trial = 0; trial < 10; ++trial) {
      const HermitianOperator h = random_hermitian(rng, 4);
      const QuantumState psi = random_state(rng, 4);
      const ZenoScenario s(h, Projector::onto_state(psi), psi, 1.3, 6);
      CHECK(std::abs(survival_exact_projected(s) - survival_exact_pure(h, psi, 1.3 / 6, 6)) < 1e-10);
    }
  }
}

TEST_CASE("quadratic and Gaussian approximants") {
  CHECK(survival_quadratic(1.0, 10, 1.0).value == doctest::Approx(0.975).epsilon(1e-15));
  CHECK(survival_quadratic(1.0, 10, 0.0).value == 1.0);
  // tau = tau_qz: F t^2 / (4m) = 1.
  const Approximant edge = survival_quadratic(4.0, 1, 1.0);
  CHECK(edge.raw == doctest::Approx(0.0));
  CHECK(edge.value == doctest::Approx(0.0));
  const Approximant past = survival_quadratic(4.0, 1, 2.0);
  CHECK(past.raw == doctest::Approx(-3.0));
  CHECK(past.value == 0.0);
  CHECK(past.clamped);

  CHECK(survival_gaussian(1.0, 10, 0.0).value == 1.0);
  CHECK(survival_gaussian(1.0, 10, 0.1).value == doctest::Approx(std::exp(-0.025)).epsilon(1e-14));
  CHECK(std::abs(survival_gaussian(1.0, 10, 0.1).value - 0.97531) < 5e-6);
  CHECK(std::abs(survival_gaussian(1.0, 10, 0.1).value - cos_power(0.1, 10)) < 2e-5);

  // |gauss - quad| <= x^4 for x = tau / tau_qz <= 0.3.
  const int m = 10;
  const double f = 2.0;
  const double tau_qz = zeno_time(f, m);
  for (double x = 0.0; x <= 0.3; x += 0.01) {
    const double tau = x * tau_qz;
    const double g = survival_gaussian(f, m, tau).value;
    const double q = survival_quadratic(f, m, m * tau).value;
    CHECK(std::abs(g - q) <= std::pow(x, 4) + 1e-15);
  }
}

TEST_CASE("Fisher information, quadratic and quantum") {
  CHECK(fisher_quadratic(sz(), Projector::onto_state(plus()), plus()) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(fisher_quadratic(sz(), Projector::onto_state(QuantumState::basis(2, 0)), QuantumState::basis(2, 0)) ==
        doctest::Approx(0.0));
  CHECK(quantum_fisher_pure(sz(), plus()) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(quantum_fisher_pure(sz(), QuantumState::basis(2, 1)) == doctest::Approx(0.0));
  CHECK_THROWS_AS(quantum_fisher_pure(sz(), StateRef{DensityMatrix::maximally_mixed(2)}), ValidationError);

  for (int n = 1; n <= 8; ++n) {
    const auto s = spec_of(n, GhzFamily{}, 1.5);
    const QuantumState g = ghz_state(s);
    const HermitianOperator h = collective_hamiltonian(s);
    CHECK(fisher_quadratic(h, Projector::onto_state(g), g) == doctest::Approx(n * n * 2.25).epsilon(1e-12));
  }
  const auto s4 = spec_of(4, GhzFamily{});
  CHECK(quantum_fisher_pure(collective_hamiltonian(s4), ghz_state(s4)) == doctest::Approx(16.0).epsilon(1e-12));
}

TEST_CASE("rank-1 projector: projected variance equals full variance") {
  CounterRng rng(33, "rank1");
  for (int trial = 0; trial < 20; ++trial) {
    const HermitianOperator h = random_hermitian(rng, 5);
    const QuantumState psi = random_state(rng, 5);
    CHECK(std::abs(fisher_quadratic(h, Projector::onto_state(psi), psi) - quantum_fisher_pure(h, psi)) < 1e-10);
  }
}

TEST_CASE("two-outcome likelihood") {
  const TwoOutcomeLikelihood like(two_level(1.0, 10));
  CHECK(std::abs(like.yes(0.0) - 1.0) < 1e-12);
  for (double tau : {0.01, 0.5, 1.7, 3.0}) {
    CHECK(like.yes(tau) == doctest::Approx(std::pow(std::cos(tau / 2), 2)).epsilon(1e-12));
    CHECK(std::abs(like.yes(tau) + like.no(tau) - 1.0) < 1e-12);
  }
  CHECK(likelihood_yes(two_level(1.0, 10), 0.4) == doctest::Approx(like.yes(0.4)));

  SUBCASE("quadratic coefficient on random scenarios") {
    CounterRng rng(34, "coef");
    for (int trial = 0; trial < 10; ++trial) {
      const HermitianOperator h = random_hermitian(rng, 4);
      const QuantumState psi = random_state(rng, 4);
      const Projector p = Projector::onto_state(psi);
      const TwoOutcomeLikelihood l(h, p, psi);
      const double var_hbar = variance(effective_hamiltonian(h, p), psi);
      for (double tau : {0.05, 0.02, 0.005}) {
        const double predicted = var_hbar * tau * tau;
        CHECK(std::abs(l.no(tau) - predicted) <= 0.05 * predicted);
      }
    }
  }
}

TEST_CASE("numeric two-outcome Fisher") {
  const TwoOutcomeLikelihood like(two_level(1.0, 10));
  CHECK(fisher_two_outcome_numeric(like, 1e-3, 1e-4) == doctest::Approx(1.0).epsilon(1e-4));
  for (double tau : {0.01, 0.3, 1.0, 2.5}) CHECK(fisher_two_outcome_numeric(like, tau) == doctest::Approx(1.0).epsilon(1e-3));

  const auto s4 = spec_of(4, GhzFamily{});
  const QuantumState g = ghz_state(s4);
  const TwoOutcomeLikelihood ghz(collective_hamiltonian(s4), Projector::onto_state(g), g);
  CHECK(fisher_two_outcome_numeric(ghz, 1e-3) == doctest::Approx(16.0).epsilon(1e-3));

  CHECK_THROWS_AS(fisher_two_outcome_numeric(like, 1e-7), ValidationError);
  CHECK_THROWS_AS(fisher_two_outcome_numeric(like, 1e-3, 6e-4), ValidationError);

  // Eigenstate: P(yes) = 1 everywhere.
  const QuantumState up = QuantumState::basis(2, 0);
  const TwoOutcomeLikelihood frozen(sz(), Projector::onto_state(up), up);
  CHECK_THROWS_AS(fisher_two_outcome_numeric(frozen, 0.1), SingularLikelihoodError);

  CHECK(default_fisher_step(1e-3) == doctest::Approx(1e-4));
  CHECK(default_fisher_step(1.0) == doctest::Approx(1e-2));
  CHECK(default_fisher_step(2e-4) == doctest::Approx(5e-5));
}

TEST_CASE("numeric Fisher agrees with the quadratic form on random scenarios") {
  CounterRng rng(35, "fisher");
  for (int trial = 0; trial < 10; ++trial) {
    const HermitianOperator h = random_hermitian(rng, 4);
    const QuantumState psi = random_state(rng, 4);
    const Projector p = Projector::onto_state(psi);
    const TwoOutcomeLikelihood l(h, p, psi);
    const double fq = fisher_quadratic(h, p, psi);
    for (double tau : {1e-3, 1e-2}) CHECK(std::abs(fisher_two_outcome_numeric(l, tau) - fq) <= 1e-3 * fq);
  }
}

TEST_CASE("numeric Fisher agrees with the quadratic form across families, N <= 8") {
  CounterRng rng(36, "families");
  for (int n = 1; n <= 8; ++n) {
    std::vector<StateFamily> families{GhzFamily{}, ProductPlusFamily{},
                                      random_separable_mixture(n, 2, rng.substream(n))};
    for (const auto& fam : families) {
      const auto s = spec_of(n, fam);
      const StateRef rho = ensemble_state(s);
      const Projector p = std::holds_alternative<QuantumState>(rho)
                              ? Projector::onto_state(std::get<QuantumState>(rho))
                              : support_projector(std::get<DensityMatrix>(rho));
      const HermitianOperator h = collective_hamiltonian(s);
      const double fq = fisher_quadratic(h, p, rho);
      if (fq < 1e-8) continue;
      const TwoOutcomeLikelihood l(h, p, rho);
      CHECK(std::abs(fisher_two_outcome_numeric(l, 1e-3) - fq) <= 1e-3 * fq);
    }
  }
}

TEST_CASE("timescales") {
  CHECK(zeno_time(1.0, 10) == doctest::Approx(0.63246).epsilon(1e-5));
  CHECK(zeno_time(4.0, 1) == doctest::Approx(1.0));
  CHECK(zeno_time(3.0, 40) == doctest::Approx(zeno_time(3.0, 10) / 2).epsilon(1e-15));
  CHECK(cramer_rao_interval(16.0, 100) == doctest::Approx(0.025).epsilon(1e-15));
  CHECK(cramer_rao_interval(1.0, 1) == 1.0);
  for (double f : {0.3, 1.0, 16.0})
    for (int m : {1, 10, 1000}) CHECK(zeno_time(f, m) == 2 * cramer_rao_interval(f, m));
  CHECK_THROWS_AS(zeno_time(0.0, 10), ValidationError);
  CHECK_THROWS_AS(cramer_rao_interval(-1.0, 10), ValidationError);
}

TEST_CASE("uncertainty product equality for pure states") {
  CounterRng rng(37, "uncertainty");
  for (int trial = 0; trial < 10; ++trial) {
    const HermitianOperator h = random_hermitian(rng, 3);
    const QuantumState psi = random_state(rng, 3);
    const int m = 1 + trial * 17;
    const double lhs = cramer_rao_interval(quantum_fisher_pure(h, psi), m) * std::sqrt(variance(h, psi));
    CHECK(lhs == doctest::Approx(1.0 / (2 * std::sqrt(double(m)))).epsilon(1e-12));
  }
}

TEST_CASE("separable and entangled Zeno-time edges") {
  const int m = 50;
  const double omega = 1.3;
  CounterRng rng(38, "edges");
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 6;
    const auto s = spec_of(n, random_separable_mixture(n, 1 + trial % 3, rng.substream(trial)), omega);
    const DensityMatrix rho = separable_mixture(s);
    const double f = fisher_quadratic(collective_hamiltonian(s), support_projector(rho), rho);
    if (f <= 0) continue;
    CHECK(zeno_time(f, m) >= separable_zeno_time_bound(n, omega, m) - 1e-9);
  }
  for (int n = 1; n <= 8; ++n) {
    const auto s = spec_of(n, GhzFamily{}, omega);
    const QuantumState g = ghz_state(s);
    const double f = fisher_quadratic(collective_hamiltonian(s), Projector::onto_state(g), g);
    CHECK(std::abs(zeno_time(f, m) - entangled_zeno_time_bound(n, omega, m)) < 1e-10);
  }
}

TEST_CASE("distinguishable count") {
  const std::vector<double> grid{0.25, 0.5, 0.75, 1.0};
  SUBCASE("constant F = 1 on [0, 1], m = 4") {
    std::vector<double> fine(101), ones(101, 1.0);
    for (int i = 0; i <= 100; ++i) fine[i] = 1e-12 + i / 100.0 * (1.0 - 1e-12);
    const auto r = distinguishable_count(fine, ones, 4);
    CHECK(r.n_ds == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_FALSE(r.large_m_regime);
  }
  SUBCASE("F = 0") {
    const std::vector<double> zeros(4, 0.0);
    CHECK(distinguishable_count(grid, zeros, 100).n_ds == 0.0);
  }
  SUBCASE("bad input") {
    const std::vector<double> neg{1.0, -1.0, 1.0, 1.0};
    CHECK_THROWS_AS(distinguishable_count(grid, neg, 10), ValidationError);
    const std::vector<double> bad_grid{0.5, 0.25, 0.75, 1.0}, ones(4, 1.0);
    CHECK_THROWS_AS(distinguishable_count(bad_grid, ones, 10), ValidationError);
  }
  SUBCASE("grid refinement on a smooth integrand") {
    auto f_of = [](double tau) { return std::pow(1.0 + 0.5 * std::sin(tau), 2); };  // sqrt(F) smooth
    auto count = [&](int points) {
      std::vector<double> g(points), f(points);
      for (int i = 0; i < points; ++i) {
        g[i] = 1e-6 + (1.0 - 1e-6) * i / (points - 1);
        f[i] = f_of(g[i]);
      }
      return distinguishable_count(g, f, 100).n_ds;
    };
    CHECK(std::abs(count(401) - count(801)) < 1e-6);
  }
  SUBCASE("likelihood sampling on the two-level case") {
    const TwoOutcomeLikelihood like(two_level(1.0, 10));
    const auto r = distinguishable_count(like, 1.0, 100);
    CHECK(r.grid.size() == 200);
    CHECK(r.n_ds == doctest::Approx(5.0 * (1.0 - kTauMin)).epsilon(1e-4));
  }
}

TEST_CASE("sample and estimate") {
  const TwoOutcomeLikelihood like(two_level(1.0, 10));
  SUBCASE("fixed seed reproduces bit for bit") {
    const auto a = sample_and_estimate(like, 0.5, 1000, 99);
    const auto b = sample_and_estimate(like, 0.5, 1000, 99);
    CHECK(a.tau_hat == b.tau_hat);
    CHECK(a.frequency_yes == b.frequency_yes);
  }
  SUBCASE("commuting case is clipped at 0") {
    const QuantumState up = QuantumState::basis(2, 0);
    const TwoOutcomeLikelihood frozen(sz(), Projector::onto_state(up), up);
    const auto r = sample_and_estimate(frozen, 0.5, 1000, 1);
    CHECK(r.clipped);
    CHECK(r.tau_hat == 0.0);
  }
  SUBCASE("spread tracks the Cramer-Rao interval") {
    const int m = 100000;
    std::vector<double> hats;
    for (std::uint64_t seed = 0; seed < 200; ++seed) hats.push_back(sample_and_estimate(like, 0.5, m, seed).tau_hat);
    const double mean = std::accumulate(hats.begin(), hats.end(), 0.0) / hats.size();
    double ss = 0.0;
    for (double h : hats) ss += (h - mean) * (h - mean);
    const double sd = std::sqrt(ss / (hats.size() - 1));
    CHECK(std::abs(sd / cramer_rao_interval(1.0, m) - 1.0) < 0.15);
    CHECK(std::abs(mean - 0.5) < 3 * sd / std::sqrt(200.0) + 1e-4);
  }
}

TEST_CASE("run_scenario report") {
  SUBCASE("two-level t = 1, m = 10") {
    const ZenoReport r = run_scenario(two_level(1.0, 10));
    CHECK(r.p_exact == doctest::Approx(0.975300).epsilon(1e-6));
    CHECK(r.p_quadratic.value == doctest::Approx(0.975).epsilon(1e-14));
    CHECK(r.tau_qz == doctest::Approx(0.63246).epsilon(1e-5));
    CHECK(r.ratio == doctest::Approx(0.15811).epsilon(1e-5));
    CHECK(std::abs(r.tau_qz - 2 * r.delta_tau_cr) < 1e-12);
    REQUIRE(r.quantum_fisher);
    CHECK(*r.quantum_fisher == doctest::Approx(1.0));
    CHECK(r.fisher_numeric == doctest::Approx(1.0).epsilon(1e-4));
  }
  SUBCASE("commuting projector") {
    const QuantumState up = QuantumState::basis(2, 0);
    const ZenoReport r = run_scenario(ZenoScenario(sz(), Projector::onto_state(up), up, 1.0, 10));
    CHECK(r.p_exact == 1.0);
    CHECK(r.fisher_quadratic == 0.0);
    CHECK(r.zeno_time_infinite);
    CHECK(std::isinf(r.tau_qz));
  }
  SUBCASE("GHZ_4 against product state") {
    auto report = [](StateFamily fam) {
      const auto s = spec_of(4, std::move(fam));
      const QuantumState psi = std::get<QuantumState>(ensemble_state(s));
      return run_scenario(ZenoScenario(collective_hamiltonian(s), Projector::onto_state(psi), psi, 0.1, 10));
    };
    CHECK(report(ProductPlusFamily{}).tau_qz / report(GhzFamily{}).tau_qz == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("mixed state uses F for the Gaussian form") {
    const DensityMatrix up = bloch_state(0, 0, 1), down = bloch_state(0, 0, -1);
    const auto s = spec_of(2, SeparableMixture{{0.5, 0.5}, {{up, bloch_state(1, 0, 0)}, {down, bloch_state(1, 0, 0)}}});
    const DensityMatrix rho = separable_mixture(s);
    const ZenoReport r = run_scenario(ZenoScenario(collective_hamiltonian(s), support_projector(rho), rho, 0.5, 10));
    CHECK_FALSE(r.quantum_fisher);
    CHECK(r.gaussian_from_classical);
    CHECK(r.p_exact >= 0.0);
    CHECK(r.p_exact <= 1.0);
  }
}

TEST_CASE("exact minus quadratic error shrinks as tau^4") {
  const int m = 10;
  double prev = 0.0;
  for (double tau : {0.2, 0.1, 0.05}) {
    const ZenoReport r = run_scenario(two_level(m * tau, m));
    const double err = std::abs(r.p_exact - r.p_quadratic.raw);
    if (prev > 0) CHECK(prev / err >= 12.0);
    prev = err;
  }
}

TEST_CASE("survival approaches 1 in the many-measurement limit") {
  CounterRng rng(39, "limit");
  for (int trial = 0; trial < 10; ++trial) {
    const HermitianOperator h = random_hermitian(rng, 4);
    const QuantumState psi = random_state(rng, 4);
    const double t = 0.5 + rng.uniform();
    const double f = quantum_fisher_pure(h, psi);
    for (int m : {100, 1000}) {
      const double p = survival_exact_pure(h, psi, t / m, m);
      CHECK(p > 1.0 - 10.0 * t * t * f / (4.0 * m));
    }
  }
}
