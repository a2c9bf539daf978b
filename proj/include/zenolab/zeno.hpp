#pragma once

// Survival under repeated projective measurement and its reading as a
// parameter-estimation problem.
//
// A scenario is (H, Pi, rho0, t, m): the system evolves under H and is
// projected onto the range of Pi at times k * tau, k = 1..m, tau = t / m.
// The engine computes the exact survival probability, the quadratic and
// Gaussian short-time approximants, the Fisher information of the yes/no
// measurement (in closed form and by finite differences), and the timescales
// derived from it:
//
//   F        = 4 Var(H - Pi H Pi)          (rho0 supported in Pi)
//   tau_qz   = 2 / sqrt(m F)
//   dtau_cr  = 1 / sqrt(m F)               (so tau_qz = 2 dtau_cr)
//   P(t)    ~= 1 - (tau / tau_qz)^2

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "zenolab/linalg.hpp"

namespace zenolab {

/// The yes/no likelihood is evaluated only at tau >= kTauMin, where the
/// two-outcome Fisher formula is no longer 0/0.
inline constexpr double kTauMin = 1e-6;
inline constexpr double kSingularLikelihoodTol = 1e-14;

class ZenoScenario {
 public:
  /// Requires rho0 = Pi rho0 Pi and Tr[rho0 Pi] = 1 (both within 1e-10),
  /// t > 0 and m >= 1.
  ZenoScenario(HermitianOperator hamiltonian, Projector projector, StateRef initial,
               double total_time, int num_measurements);

  const HermitianOperator& hamiltonian() const { return hamiltonian_; }
  const Projector& projector() const { return projector_; }
  const StateRef& initial() const { return initial_; }
  double total_time() const { return total_time_; }
  int num_measurements() const { return num_measurements_; }
  double tau() const { return total_time_ / num_measurements_; }
  bool is_pure() const { return std::holds_alternative<QuantumState>(initial_); }

 private:
  HermitianOperator hamiltonian_;
  Projector projector_;
  StateRef initial_;
  double total_time_;
  int num_measurements_;
};

/// A probability from a truncated expansion. `value` is clamped to [0, 1];
/// `raw` is the unclamped formula and `clamped` records whether it left the
/// unit interval (the expansion is out of its regime there).
struct Approximant {
  double value = 1.0;
  double raw = 1.0;
  bool clamped = false;
};

HermitianOperator effective_hamiltonian(const HermitianOperator& h, const Projector& p);

/// |<psi0| e^{-iH tau} |psi0>|^{2m}.
double survival_exact_pure(const HermitianOperator& h, const QuantumState& psi0, double tau, int m);
double survival_exact_pure(const Propagator& propagator, const QuantumState& psi0, double tau, int m);

/// Tr[V_m rho0 V_m^dagger] with V_m = (Pi e^{-iH tau} Pi)^m.
double survival_exact_projected(const ZenoScenario& scenario);
double survival_exact_projected(const Propagator& propagator, const Projector& p,
                                const StateRef& initial, double tau, int m);

/// 1 - F t^2 / (4 m).
Approximant survival_quadratic(double fisher, int m, double t);
/// exp(-(tau / (2 dt_qcr))^2), dt_qcr = 1 / sqrt(m Fq).
Approximant survival_gaussian(double quantum_fisher, int m, double tau);

/// 4 Var(H - Pi H Pi) on rho0.
double fisher_quadratic(const HermitianOperator& h, const Projector& p, const StateRef& rho0);

/// 4 Var(H) on a pure state. Density-matrix input is rejected: for mixed
/// states the Fisher information of the Zeno measurement is not the quantum one.
double quantum_fisher_pure(const HermitianOperator& h, const StateRef& psi0);
double quantum_fisher_pure(const HermitianOperator& h, const QuantumState& psi0);

/// P(yes | tau) = Tr[Pi e^{-iH tau} rho0 e^{iH tau}], with the complementary
/// P(no | tau) computed directly from (I - Pi) so it keeps full relative
/// precision near tau = 0. The eigensystem of H is factored once.
class TwoOutcomeLikelihood {
 public:
  explicit TwoOutcomeLikelihood(const ZenoScenario& scenario);
  TwoOutcomeLikelihood(const HermitianOperator& h, const Projector& p, const StateRef& rho0);

  double yes(double tau) const;
  double no(double tau) const;

 private:
  Propagator propagator_;
  ComplexMatrix range_;
  ComplexMatrix ensemble_;  // columns sqrt(lambda_i) v_i of rho0
};

double likelihood_yes(const ZenoScenario& scenario, double tau);

/// Default finite-difference step: max(1e-4, tau / 100), capped at tau / 4.
double default_fisher_step(double tau);

/// (dP/dtau)^2 / (P (1 - P)) for the yes/no likelihood, central differences.
/// Requires tau >= kTauMin and 0 < h < tau / 2. Throws
/// SingularLikelihoodError when P(yes | tau) is within 1e-14 of 0 or 1.
double fisher_two_outcome_numeric(const TwoOutcomeLikelihood& likelihood, double tau,
                                  std::optional<double> step = std::nullopt);

/// 2 / sqrt(m F). Throws ValidationError for F <= 0.
double zeno_time(double fisher, int m);
/// 1 / sqrt(m F). Throws ValidationError for F <= 0.
double cramer_rao_interval(double fisher, int m);

/// Lower edge of tau_qz for separable states, 2 / (omega sqrt(m N)).
double separable_zeno_time_bound(int n_qubits, double omega, int m);
/// Lower edge of tau_qz over all states, reached by GHZ: 2 / (omega N sqrt(m)).
double entangled_zeno_time_bound(int n_qubits, double omega, int m);

struct PathDistinguishability {
  std::vector<double> grid;
  std::vector<double> fisher_values;
  double n_ds = 0.0;
  bool large_m_regime = true;  // false when m < 10
};

/// (sqrt(m) / 2) * integral sqrt(F) dtau by the composite trapezoid rule on
/// the given grid. The grid must be strictly ascending with grid[0] > 0.
PathDistinguishability distinguishable_count(std::span<const double> grid,
                                             std::span<const double> fisher_values, int m);

/// Samples F(tau) from the likelihood on `points` uniform nodes in
/// [kTauMin, t] and integrates.
PathDistinguishability distinguishable_count(const TwoOutcomeLikelihood& likelihood, double t,
                                             int m, int points = 200);

struct EstimateResult {
  double tau_hat = 0.0;
  double stderr_estimate = 0.0;  // delta-method 1 / sqrt(m F(tau_hat)); inf when clipped
  double frequency_yes = 1.0;
  bool clipped = false;
};

/// Draws m Bernoulli outcomes at P(yes | tau_true) from the seeded stream and
/// inverts the empirical frequency on the monotone branch of P(yes | .)
/// that contains tau_true.
EstimateResult sample_and_estimate(const TwoOutcomeLikelihood& likelihood, double tau_true, int m,
                                   std::uint64_t seed);

struct ZenoReport {
  double p_exact = 1.0;
  Approximant p_quadratic;
  Approximant p_gaussian;
  double fisher_quadratic = 0.0;
  std::optional<double> quantum_fisher;
  double fisher_numeric = 0.0;
  double tau = 0.0;
  double tau_qz = 0.0;
  double delta_tau_cr = 0.0;
  double ratio = 0.0;

  bool zeno_time_infinite = false;        // F = 0: tau_qz and dtau_cr are +inf
  bool gaussian_from_classical = false;   // mixed state: Gaussian form uses F, not Fq
  bool fisher_numeric_singular = false;   // likelihood pinned at 0 or 1
};

ZenoReport run_scenario(const ZenoScenario& scenario);

}  // namespace zenolab
