#include "zenolab/zeno.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "zenolab/errors.hpp"
#include "zenolab/random.hpp"

namespace zenolab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Columns sqrt(lambda_i) v_i with rho0 = X X^dagger.
ComplexMatrix ensemble_columns(const StateRef& state) {
  if (const auto* psi = std::get_if<QuantumState>(&state)) return ComplexMatrix(psi->amplitudes());
  const auto& rho = std::get<DensityMatrix>(state);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho.matrix());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
    if (es.eigenvalues()(k) > 1e-15) keep.push_back(k);
  ComplexMatrix x(rho.dim(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    const Eigen::Index k = keep[c];
    x.col(static_cast<Eigen::Index>(c)) = std::sqrt(es.eigenvalues()(k)) * es.eigenvectors().col(k);
  }
  return x;
}

Eigen::Index state_dim(const StateRef& s) {
  return std::visit([](const auto& v) { return v.dim(); }, s);
}

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a << " vs " << b << ")";
    throw ValidationError(os.str());
  }
}

ComplexMatrix matrix_power(ComplexMatrix base, int exponent) {
  ComplexMatrix result = ComplexMatrix::Identity(base.rows(), base.cols());
  while (exponent > 0) {
    if (exponent & 1) result = result * base;
    exponent >>= 1;
    if (exponent > 0) base = base * base;
  }
  return result;
}

Approximant clamp_probability(double raw) {
  Approximant a;
  a.raw = raw;
  a.value = std::clamp(raw, 0.0, 1.0);
  a.clamped = (raw < 0.0 || raw > 1.0);
  return a;
}

}  // namespace

// ---------------------------------------------------------------------------

ZenoScenario::ZenoScenario(HermitianOperator hamiltonian, Projector projector, StateRef initial,
                           double total_time, int num_measurements)
    : hamiltonian_(std::move(hamiltonian)),
      projector_(std::move(projector)),
      initial_(std::move(initial)),
      total_time_(total_time),
      num_measurements_(num_measurements) {
  require_same_dim(hamiltonian_.dim(), projector_.dim(), "ZenoScenario");
  require_same_dim(hamiltonian_.dim(), state_dim(initial_), "ZenoScenario");
  if (!(total_time_ > 0.0) || !std::isfinite(total_time_)) throw ValidationError("t must be > 0");
  if (num_measurements_ < 1) throw ValidationError("m must be >= 1");

  const ComplexMatrix& w = projector_.range();
  double inside_error = 0.0;
  double weight = 0.0;
  if (const auto* psi = std::get_if<QuantumState>(&initial_)) {
    const ComplexVector coeff = w.adjoint() * psi->amplitudes();
    weight = coeff.squaredNorm();
    inside_error = 2.0 * (psi->amplitudes() - w * coeff).norm();
  } else {
    const ComplexMatrix& rho = std::get<DensityMatrix>(initial_).matrix();
    const ComplexMatrix inner = w.adjoint() * rho * w;
    weight = inner.trace().real();
    inside_error = (rho - w * inner * w.adjoint()).cwiseAbs().maxCoeff();
  }
  if (inside_error > 1e-10) {
    std::ostringstream os;
    os << "initial state is not supported in the projector range (|rho0 - Pi rho0 Pi| ~ " << inside_error << ")";
    throw ValidationError(os.str());
  }
  if (std::abs(weight - 1.0) > 1e-10) {
    std::ostringstream os;
    os << "Tr[rho0 Pi] = " << weight << ", expected 1";
    throw ValidationError(os.str());
  }
}

// ---------------------------------------------------------------------------

HermitianOperator effective_hamiltonian(const HermitianOperator& h, const Projector& p) {
  require_same_dim(h.dim(), p.dim(), "effective_hamiltonian");
  const ComplexMatrix& w = p.range();
  const ComplexMatrix hw = h.matrix() * w;
  const ComplexMatrix compressed = w.adjoint() * hw;
  ComplexMatrix out = h.matrix() - w * compressed * w.adjoint();
  return HermitianOperator(0.5 * (out + out.adjoint()));
}

double survival_exact_pure(const Propagator& propagator, const QuantumState& psi0, double tau, int m) {
  require_same_dim(propagator.dim(), psi0.dim(), "survival_exact_pure");
  if (m < 1) throw ValidationError("m must be >= 1");
  if (tau < 0.0) throw ValidationError("tau must be >= 0");
  if (tau == 0.0) return 1.0;
  const ComplexVector evolved = propagator.apply(psi0.amplitudes(), tau);
  const double overlap2 = std::norm(psi0.amplitudes().dot(evolved));
  return std::pow(std::min(overlap2, 1.0), m);
}

double survival_exact_pure(const HermitianOperator& h, const QuantumState& psi0, double tau, int m) {
  require_same_dim(h.dim(), psi0.dim(), "survival_exact_pure");
  if (tau == 0.0) return 1.0;
  return survival_exact_pure(Propagator(h), psi0, tau, m);
}

double survival_exact_projected(const Propagator& propagator, const Projector& p,
                                const StateRef& initial, double tau, int m) {
  require_same_dim(propagator.dim(), p.dim(), "survival_exact_projected");
  if (m < 1) throw ValidationError("m must be >= 1");
  const ComplexMatrix& w = p.range();
  // Restricted to the range of Pi, V_m = W A^m W^dagger with A = W^dagger U W.
  const ComplexMatrix a = w.adjoint() * propagator.apply(w, tau);
  const ComplexMatrix x = w.adjoint() * ensemble_columns(initial);
  const ComplexMatrix survivors = matrix_power(a, m) * x;
  return std::clamp(survivors.squaredNorm(), 0.0, 1.0);
}

double survival_exact_projected(const ZenoScenario& scenario) {
  return survival_exact_projected(Propagator(scenario.hamiltonian()), scenario.projector(),
                                  scenario.initial(), scenario.tau(), scenario.num_measurements());
}

Approximant survival_quadratic(double fisher, int m, double t) {
  if (m < 1) throw ValidationError("m must be >= 1");
  if (fisher < 0.0) throw ValidationError("Fisher information must be >= 0");
  return clamp_probability(1.0 - fisher * t * t / (4.0 * m));
}

Approximant survival_gaussian(double quantum_fisher, int m, double tau) {
  if (m < 1) throw ValidationError("m must be >= 1");
  if (quantum_fisher < 0.0) throw ValidationError("Fisher information must be >= 0");
  // tau / (2 dt_qcr) = tau sqrt(m Fq) / 2
  const double x = 0.5 * tau * std::sqrt(m * quantum_fisher);
  return clamp_probability(std::exp(-x * x));
}

double fisher_quadratic(const HermitianOperator& h, const Projector& p, const StateRef& rho0) {
  return 4.0 * variance(effective_hamiltonian(h, p), rho0);
}

double quantum_fisher_pure(const HermitianOperator& h, const QuantumState& psi0) {
  return 4.0 * variance(h, psi0);
}

double quantum_fisher_pure(const HermitianOperator& h, const StateRef& psi0) {
  const auto* psi = std::get_if<QuantumState>(&psi0);
  if (psi == nullptr)
    throw ValidationError("quantum_fisher_pure: density-matrix input; the quantum Fisher 4 Var(H) applies to pure states only");
  return quantum_fisher_pure(h, *psi);
}

// ---------------------------------------------------------------------------

TwoOutcomeLikelihood::TwoOutcomeLikelihood(const HermitianOperator& h, const Projector& p,
                                           const StateRef& rho0)
    : propagator_(h), range_(p.range()), ensemble_(ensemble_columns(rho0)) {
  require_same_dim(h.dim(), p.dim(), "TwoOutcomeLikelihood");
  require_same_dim(h.dim(), ensemble_.rows(), "TwoOutcomeLikelihood");
}

TwoOutcomeLikelihood::TwoOutcomeLikelihood(const ZenoScenario& scenario)
    : TwoOutcomeLikelihood(scenario.hamiltonian(), scenario.projector(), scenario.initial()) {}

double TwoOutcomeLikelihood::yes(double tau) const {
  const ComplexMatrix evolved = propagator_.apply(ensemble_, tau);
  return std::clamp((range_.adjoint() * evolved).squaredNorm(), 0.0, 1.0);
}

double TwoOutcomeLikelihood::no(double tau) const {
  const ComplexMatrix evolved = propagator_.apply(ensemble_, tau);
  const ComplexMatrix outside = evolved - range_ * (range_.adjoint() * evolved);
  return std::clamp(outside.squaredNorm(), 0.0, 1.0);
}

double likelihood_yes(const ZenoScenario& scenario, double tau) {
  if (tau == 0.0) return 1.0;
  return TwoOutcomeLikelihood(scenario).yes(tau);
}

double default_fisher_step(double tau) {
  return std::min(std::max(1e-4, tau / 100.0), tau / 4.0);
}

double fisher_two_outcome_numeric(const TwoOutcomeLikelihood& likelihood, double tau,
                                  std::optional<double> step) {
  if (!(tau >= kTauMin)) {
    std::ostringstream os;
    os << "two-outcome Fisher information needs tau >= " << kTauMin << " (got " << tau
       << "); use fisher_quadratic for the tau -> 0 limit";
    throw ValidationError(os.str());
  }
  const double h = step.value_or(default_fisher_step(tau));
  if (!(h > 0.0) || !(h < tau / 2.0)) throw ValidationError("finite-difference step must satisfy 0 < h < tau / 2");

  const double p_yes = likelihood.yes(tau);
  const double p_no = likelihood.no(tau);
  if (p_yes <= kSingularLikelihoodTol || p_no <= kSingularLikelihoodTol) {
    std::ostringstream os;
    os << "likelihood is singular at tau = " << tau << " (P(yes) = " << p_yes
       << "); evaluate the Fisher information at a different tau";
    throw SingularLikelihoodError(os.str());
  }
  const double slope = (likelihood.no(tau + h) - likelihood.no(tau - h)) / (2.0 * h);
  return slope * slope / (p_yes * p_no);
}

double cramer_rao_interval(double fisher, int m) {
  if (!(fisher > 0.0)) throw ValidationError("Fisher information must be > 0 for a finite timescale");
  if (m < 1) throw ValidationError("m must be >= 1");
  return 1.0 / std::sqrt(m * fisher);
}

double zeno_time(double fisher, int m) {
  return 2.0 * cramer_rao_interval(fisher, m);
}

double separable_zeno_time_bound(int n_qubits, double omega, int m) {
  return 2.0 / (omega * std::sqrt(static_cast<double>(m) * n_qubits));
}

double entangled_zeno_time_bound(int n_qubits, double omega, int m) {
  return 2.0 / (omega * n_qubits * std::sqrt(static_cast<double>(m)));
}

// ---------------------------------------------------------------------------

PathDistinguishability distinguishable_count(std::span<const double> grid,
                                             std::span<const double> fisher_values, int m) {
  if (grid.size() != fisher_values.size()) throw ValidationError("distinguishable_count: grid and Fisher samples differ in length");
  if (grid.size() < 2) throw ValidationError("distinguishable_count: need at least two grid points");
  if (m < 1) throw ValidationError("m must be >= 1");
  if (!(grid[0] > 0.0)) throw ValidationError("distinguishable_count: grid must start at tau_min > 0");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw ValidationError("distinguishable_count: grid must be strictly ascending");
  for (double f : fisher_values)
    if (!(f >= 0.0)) throw ValidationError("distinguishable_count: negative Fisher sample");

  double integral = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    integral += 0.5 * (grid[i] - grid[i - 1]) * (std::sqrt(fisher_values[i]) + std::sqrt(fisher_values[i - 1]));

  PathDistinguishability out;
  out.grid.assign(grid.begin(), grid.end());
  out.fisher_values.assign(fisher_values.begin(), fisher_values.end());
  out.n_ds = 0.5 * std::sqrt(static_cast<double>(m)) * integral;
  out.large_m_regime = m >= 10;
  return out;
}

PathDistinguishability distinguishable_count(const TwoOutcomeLikelihood& likelihood, double t,
                                             int m, int points) {
  if (!(t > kTauMin)) throw ValidationError("distinguishable_count: t must exceed tau_min");
  if (points < 2) throw ValidationError("distinguishable_count: need at least two grid points");
  std::vector<double> grid(static_cast<std::size_t>(points));
  std::vector<double> fisher(grid.size());
  for (int i = 0; i < points; ++i) {
    grid[static_cast<std::size_t>(i)] = kTauMin + (t - kTauMin) * i / (points - 1);
    fisher[static_cast<std::size_t>(i)] = fisher_two_outcome_numeric(likelihood, grid[static_cast<std::size_t>(i)]);
  }
  return distinguishable_count(grid, fisher, m);
}

// ---------------------------------------------------------------------------

EstimateResult sample_and_estimate(const TwoOutcomeLikelihood& likelihood, double tau_true, int m,
                                   std::uint64_t seed) {
  if (m < 1) throw ValidationError("m must be >= 1");
  if (!(tau_true >= 0.0)) throw ValidationError("tau_true must be >= 0");

  EstimateResult out;
  const double p_no_true = likelihood.no(tau_true);
  CounterRng rng(seed, "sample_and_estimate");
  long long no_count = 0;
  for (int i = 0; i < m; ++i)
    if (rng.uniform() < p_no_true) ++no_count;
  const double f_no = static_cast<double>(no_count) / m;
  out.frequency_yes = 1.0 - f_no;

  const auto clipped_at = [&](double tau) {
    out.tau_hat = tau;
    out.clipped = true;
    out.stderr_estimate = kInf;
    return out;
  };
  if (p_no_true <= kSingularLikelihoodTol) return clipped_at(0.0);

  // Orientation of P(no | .) at tau_true, then the extent of that monotone run.
  const double h = tau_true > 4.0 * kTauMin ? default_fisher_step(tau_true) : 1e-6;
  const double slope = likelihood.no(tau_true + h) - likelihood.no(std::max(0.0, tau_true - h));
  if (slope == 0.0) return clipped_at(tau_true);
  const double sign = slope > 0.0 ? 1.0 : -1.0;
  const auto g = [&](double tau) { return sign * likelihood.no(tau); };  // increasing on the branch

  const double delta = std::max(tau_true, 1e-3) / 32.0;
  constexpr int kMaxSteps = 20000;
  double lo = tau_true;
  double g_lo = g(lo);
  for (int k = 0; k < kMaxSteps && lo > 0.0; ++k) {
    const double next = std::max(0.0, lo - delta);
    const double g_next = g(next);
    if (!(g_next <= g_lo)) break;
    lo = next;
    g_lo = g_next;
  }
  double hi = tau_true;
  double g_hi = g(hi);
  for (int k = 0; k < kMaxSteps; ++k) {
    const double next = hi + delta;
    const double g_next = g(next);
    if (!(g_next >= g_hi)) break;
    hi = next;
    g_hi = g_next;
  }

  const double target = sign * f_no;
  if (target <= g_lo) return clipped_at(lo);
  if (target >= g_hi) return clipped_at(hi);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) < target) lo = mid;
    else hi = mid;
  }
  out.tau_hat = 0.5 * (lo + hi);
  out.stderr_estimate = kInf;
  if (out.tau_hat >= kTauMin) {
    try {
      const double f = fisher_two_outcome_numeric(likelihood, out.tau_hat);
      if (f > 0.0) out.stderr_estimate = 1.0 / std::sqrt(m * f);
    } catch (const SingularLikelihoodError&) {
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

ZenoReport run_scenario(const ZenoScenario& scenario) {
  ZenoReport r;
  const int m = scenario.num_measurements();
  const double t = scenario.total_time();
  r.tau = scenario.tau();

  const Propagator propagator(scenario.hamiltonian());
  r.p_exact = survival_exact_projected(propagator, scenario.projector(), scenario.initial(), r.tau, m);

  // Fisher values below roundoff of ||H||^2 are exact zeros (commuting Pi).
  const double scale = std::max(scenario.hamiltonian().matrix().cwiseAbs().maxCoeff(), 1e-300);
  const auto snap = [&](double f) { return f <= 1e-14 * scale * scale ? 0.0 : f; };

  r.fisher_quadratic = snap(fisher_quadratic(scenario.hamiltonian(), scenario.projector(), scenario.initial()));
  r.p_quadratic = survival_quadratic(r.fisher_quadratic, m, t);

  if (scenario.is_pure()) {
    r.quantum_fisher = snap(quantum_fisher_pure(scenario.hamiltonian(), scenario.initial()));
    r.p_gaussian = survival_gaussian(*r.quantum_fisher, m, r.tau);
  } else {
    r.gaussian_from_classical = true;
    r.p_gaussian = survival_gaussian(r.fisher_quadratic, m, r.tau);
  }

  const TwoOutcomeLikelihood likelihood(scenario);
  try {
    r.fisher_numeric = fisher_two_outcome_numeric(likelihood, std::max(r.tau, kTauMin));
  } catch (const SingularLikelihoodError&) {
    r.fisher_numeric = 0.0;
    r.fisher_numeric_singular = true;
  }

  if (r.fisher_quadratic > 0.0) {
    r.delta_tau_cr = cramer_rao_interval(r.fisher_quadratic, m);
    r.tau_qz = 2.0 * r.delta_tau_cr;
    r.ratio = r.tau / r.tau_qz;
  } else {
    r.zeno_time_infinite = true;
    r.delta_tau_cr = kInf;
    r.tau_qz = kInf;
    r.ratio = 0.0;
  }
  return r;
}

}  // namespace zenolab
