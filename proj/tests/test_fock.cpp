#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "zenolab/errors.hpp"
#include "zenolab/fock.hpp"
#include "zenolab/random.hpp"

using namespace zenolab;

namespace {

constexpr double kPi = std::numbers::pi;

OpticalInputSpec input_of(ModeSpec a, ModeSpec b, int n_max) {
  OpticalInputSpec in;
  in.mode_a = a;
  in.mode_b = b;
  in.n_max = n_max;
  return in;
}

// Projector onto two-mode basis states with n_a + n_b <= limit.
ComplexMatrix interior(const TwoModeFockSpace& space, int limit) {
  ComplexMatrix p = ComplexMatrix::Zero(space.dim(), space.dim());
  for (int na = 0; na <= space.n_max(); ++na)
    for (int nb = 0; nb <= space.n_max(); ++nb)
      if (na + nb <= limit) p(space.index(na, nb), space.index(na, nb)) = 1.0;
  return p;
}

}  // namespace

TEST_CASE("coherent state") {
  SUBCASE("alpha = 0 is vacuum") {
    const QuantumState v = coherent_state(0.0, 10);
    CHECK(std::abs(v.amplitudes()(0) - 1.0) < 1e-15);
    CHECK(v.amplitudes().tail(10).norm() == 0.0);
  }
  SUBCASE("alpha = 2 has mean number 4") {
    const QuantumState c = coherent_state(2.0, 40);
    double mean = 0.0;
    for (int n = 0; n <= 40; ++n) mean += n * std::norm(c.amplitudes()(n));
    CHECK(std::abs(mean - 4.0) < 1e-9);
    CHECK(std::abs(c.amplitudes().norm() - 1.0) < 1e-12);
  }
  SUBCASE("amplitudes follow the Poisson form") {
    const Complex alpha(1.2, -0.7);
    const QuantumState c = coherent_state(alpha, 30);
    for (int n = 0; n <= 10; ++n) {
      const Complex expected = std::exp(-std::norm(alpha) / 2) * std::pow(alpha, n) / std::sqrt(std::tgamma(n + 1.0));
      CHECK(std::abs(c.amplitudes()(n) - expected) < 1e-10);
    }
  }
  SUBCASE("tail too heavy names the required n_max") {
    try {
      coherent_state(4.0, 20);
      FAIL("expected TruncationError");
    } catch (const TruncationError& e) {
      CHECK(std::string(e.what()).find(std::to_string(required_n_max(4.0))) != std::string::npos);
    }
  }
}

TEST_CASE("Fock states and truncation sizing") {
  const QuantumState f = fock_state(3, 5);
  CHECK(f.amplitudes()(3) == Complex(1.0));
  CHECK_THROWS_AS(fock_state(6, 5), TruncationError);
  CHECK(truncation_margin(2.0) == 12);
  CHECK(truncation_margin(0.0) == 4);
  CHECK(default_n_max(input_of(ModeSpec::vacuum(), ModeSpec::coherent(2.0), 0)) >= 44);
  CHECK(default_n_max(input_of(ModeSpec::fock(50), ModeSpec::vacuum(), 0)) >= 54);
}

TEST_CASE("Schwinger operators") {
  const TwoModeFockSpace space(6);
  const HermitianOperator jx = space.jx(), jy = space.jy(), jz = space.jz();
  CHECK(max_asymmetry(jx.matrix()) < 1e-12);
  CHECK(max_asymmetry(jy.matrix()) < 1e-12);
  CHECK(std::abs(jz.matrix()(space.index(3, 1), space.index(3, 1)) - 1.0) < 1e-15);

  // Ladder-operator definitions.
  const ComplexMatrix a = space.a(), b = space.b();
  CHECK((jx.matrix() - 0.5 * (a.adjoint() * b + b.adjoint() * a)).norm() < 1e-12);
  CHECK((jy.matrix() - (a.adjoint() * b - b.adjoint() * a) / Complex(0, 2)).norm() < 1e-12);
  CHECK((jz.matrix() - 0.5 * (a.adjoint() * a - b.adjoint() * b)).norm() < 1e-12);

  SUBCASE("[Jx, Jy] = i Jz on the interior") {
    const ComplexMatrix p = interior(space, space.n_max());
    const ComplexMatrix c = jx.matrix() * jy.matrix() - jy.matrix() * jx.matrix();
    CHECK((p * (c - Complex(0, 1) * jz.matrix()) * p).norm() < 1e-8);
  }
  SUBCASE("expectations on |0>|alpha = 2>") {
    const TwoModeFockSpace big(40);
    const QuantumState psi = big.input_state(input_of(ModeSpec::vacuum(), ModeSpec::coherent(2.0), 40));
    CHECK(big.mean_jz(psi.amplitudes()) == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(std::abs(big.mean_jx(psi.amplitudes())) < 1e-15);
    CHECK(expectation(big.jz(), psi) == doctest::Approx(-2.0).epsilon(1e-9));
  }
  SUBCASE("fast expectations and J_x application match dense operators") {
    CounterRng rng(41, "dense");
    ComplexVector v(space.dim());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Complex(rng.uniform() - 0.5, rng.uniform() - 0.5);
    v.normalize();
    const QuantumState psi(v);
    CHECK(std::abs(space.mean_jz(v) - expectation(jz, psi)) < 1e-12);
    CHECK(std::abs(space.mean_jx(v) - expectation(jx, psi)) < 1e-12);
    CHECK(std::abs(space.mean_jy(v) - expectation(jy, psi)) < 1e-12);
    CHECK((space.apply_jx(v) - jx.matrix() * v).norm() < 1e-12);
  }
}

TEST_CASE("shellwise rotation matches the dense exponential") {
  const TwoModeFockSpace space(5);
  CounterRng rng(42, "rotate");
  ComplexMatrix block(space.dim(), 3);
  for (Eigen::Index i = 0; i < block.rows(); ++i)
    for (Eigen::Index j = 0; j < 3; ++j) block(i, j) = Complex(rng.uniform() - 0.5, rng.uniform() - 0.5);
  const Propagator dense(space.jy());
  for (double theta : {0.3, 1.7, -2.2}) CHECK((space.rotate(block, theta) - dense.apply(block, theta)).norm() < 1e-10);
}

TEST_CASE("rotation sign: U^dag J_z U = J_z cos - J_x sin") {
  const TwoModeFockSpace space(4);
  const double theta = 0.8;
  const ComplexMatrix u = Propagator(space.jy()).unitary(theta);
  const ComplexMatrix lhs = u.adjoint() * space.jz().matrix() * u;
  const ComplexMatrix rhs = std::cos(theta) * space.jz().matrix() - std::sin(theta) * space.jx().matrix();
  const ComplexMatrix p = interior(space, space.n_max());
  CHECK((p * (lhs - rhs) * p).norm() < 1e-10);
}

TEST_CASE("Mach-Zehnder unitary") {
  const TwoModeFockSpace space(12);
  const QuantumState two = space.input_state(input_of(ModeSpec::fock(1), ModeSpec::fock(1), 12));

  CHECK((mz_unitary_apply(space, 0.0, two).amplitudes() - two.amplitudes()).norm() < 1e-14);

  const QuantumState full = mz_unitary_apply(space, 2 * kPi, two);
  CHECK(std::abs(std::abs(two.amplitudes().dot(full.amplitudes())) - 1.0) < 1e-9);

  SUBCASE("norm preserved on random interior inputs") {
    CounterRng rng(43, "norm");
    for (int trial = 0; trial < 10; ++trial) {
      ComplexVector v = ComplexVector::Zero(space.dim());
      for (int na = 0; na <= 4; ++na)
        for (int nb = 0; na + nb <= 4; ++nb) v(space.index(na, nb)) = Complex(rng.uniform() - 0.5, rng.uniform() - 0.5);
      const QuantumState out = mz_unitary_apply(space, 6 * rng.uniform(), QuantumState::normalized(v), 4);
      CHECK(std::abs(out.amplitudes().norm() - 1.0) < 1e-9);
    }
  }
  SUBCASE("composition") {
    const QuantumState psi = space.input_state(input_of(ModeSpec::fock(2), ModeSpec::coherent(0.7), 12));
    const QuantumState a = mz_unitary_apply(space, 0.4, mz_unitary_apply(space, 1.1, psi));
    const QuantumState b = mz_unitary_apply(space, 1.5, psi);
    CHECK((a.amplitudes() - b.amplitudes()).norm() < 1e-9);
  }
  SUBCASE("support near the truncation shell is rejected") {
    const QuantumState edge = space.input_state(input_of(ModeSpec::fock(6), ModeSpec::fock(5), 12));
    CHECK_THROWS_AS(mz_unitary_apply(space, 0.5, edge, 4), TruncationError);
  }
}

TEST_CASE("mean output identity") {
  SUBCASE("|0>|alpha = 2> at pi/2") {
    const auto in = input_of(ModeSpec::vacuum(), ModeSpec::coherent(2.0), 0);
    const TwoModeFockSpace space(default_n_max(in));
    const MzMeanOutput r = mz_mean_output(space, in, kPi / 2);
    CHECK(std::abs(r.jz_out) < 1e-9);
    CHECK(r.jz_in == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(std::abs(r.jx_in) < 1e-15);
  }
  SUBCASE("theta = 0") {
    const auto in = input_of(ModeSpec::fock(3), ModeSpec::coherent(1.5), 0);
    const TwoModeFockSpace space(default_n_max(in));
    const MzMeanOutput r = mz_mean_output(space, in, 0.0);
    CHECK(std::abs(r.jz_out - r.jz_in) < 1e-12);
  }
  SUBCASE("|1>|1> at pi") {
    const auto in = input_of(ModeSpec::fock(1), ModeSpec::fock(1), 10);
    const TwoModeFockSpace space(10);
    const MzMeanOutput r = mz_mean_output(space, in, kPi);
    CHECK(std::abs(r.jz_out) < 1e-12);
    CHECK(std::abs(r.jz_out + r.jz_in) < 1e-12);
    CHECK(r.identity_residual() < 1e-10);
  }
  SUBCASE("theta grid over three input kinds") {
    const OpticalInputSpec inputs[] = {
        input_of(ModeSpec::vacuum(), ModeSpec::coherent(2.0), 0),
        input_of(ModeSpec::fock(4), ModeSpec::coherent(Complex(1.0, 1.0)), 0),
        input_of(ModeSpec::fock(3), ModeSpec::fock(2), 15),
    };
    for (const auto& in : inputs) {
      const TwoModeFockSpace space(in.n_max ? in.n_max : default_n_max(in));
      for (int k = 0; k <= 12; ++k) CHECK(mz_mean_output(space, in, k * kPi / 6).identity_residual() <= 1e-8);
    }
  }
}
