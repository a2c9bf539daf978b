#pragma once

// Two bosonic modes a (mode 1) and b (mode 2), each truncated at n_max
// quanta, with the Schwinger pseudo-spin
//
//   J_x = (a^dag b + b^dag a) / 2
//   J_y = (a^dag b - b^dag a) / 2i
//   J_z = (a^dag a - b^dag b) / 2
//
// A Mach-Zehnder interferometer with phase theta acts as exp(-i J_y theta).
// Two-mode basis index: n_a * (n_max + 1) + n_b.
//
// J_y conserves n_a + n_b, so it is block diagonal in total-number shells.
// The rotation is propagated shell by shell: shells with n <= n_max are the
// complete spin-n/2 irreps; shells above n_max are cut by the per-mode
// truncation and are where leakage lives.

#include <optional>
#include <vector>

#include "zenolab/linalg.hpp"

namespace zenolab {

/// Coherent-state tail mass beyond n_max must stay below this.
inline constexpr double kCoherentTailTol = 1e-10;
/// Probability mass allowed in shells within `margin` of the truncation.
inline constexpr double kLeakTol = 1e-10;

enum class ModeKind { Vacuum, Fock, Coherent };

struct ModeSpec {
  ModeKind kind = ModeKind::Vacuum;
  int n = 0;           // Fock
  Complex alpha{};     // Coherent

  static ModeSpec vacuum() { return {}; }
  static ModeSpec fock(int n) { return {ModeKind::Fock, n, {}}; }
  static ModeSpec coherent(Complex alpha) { return {ModeKind::Coherent, 0, alpha}; }

  double mean_number() const;
  /// Largest n with appreciable weight: Fock n, or the coherent cutoff
  /// leaving less than kCoherentTailTol beyond it.
  int support() const;
};

struct OpticalInputSpec {
  ModeSpec mode_a;
  ModeSpec mode_b;
  int n_max = 0;  // 0: size automatically

  /// Coherent amplitude of largest modulus among the two modes (0 if none).
  double max_alpha() const;
};

/// ceil(|alpha|^2 + 10 |alpha| + 20), raised if needed to hold both supports.
int default_n_max(const OpticalInputSpec& input);
/// ceil(4 |alpha| + 4).
int truncation_margin(double alpha_abs);

/// Smallest n_max leaving coherent tail mass below kCoherentTailTol.
int required_n_max(Complex alpha);

QuantumState coherent_state(Complex alpha, int n_max);
QuantumState fock_state(int n, int n_max);
QuantumState mode_state(const ModeSpec& spec, int n_max);

/// Single-mode annihilation operator truncated at n_max.
ComplexMatrix annihilation(int n_max);

class TwoModeFockSpace {
 public:
  explicit TwoModeFockSpace(int n_max);

  int n_max() const { return n_max_; }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(n_max_ + 1) * (n_max_ + 1); }
  Eigen::Index index(int n_a, int n_b) const { return static_cast<Eigen::Index>(n_a) * (n_max_ + 1) + n_b; }

  // Dense operators on the full product space, built on request. They are
  // (n_max + 1)^4 complex entries each, so the hot paths below avoid them.
  ComplexMatrix a() const;
  ComplexMatrix b() const;
  HermitianOperator jx() const;
  HermitianOperator jy() const;
  HermitianOperator jz() const;
  HermitianOperator number_a() const;
  HermitianOperator number_b() const;

  QuantumState product(const QuantumState& mode_a, const QuantumState& mode_b) const;
  QuantumState input_state(const OpticalInputSpec& input) const;

  /// exp(-i J_y theta) applied shell by shell to each column of `block`.
  ComplexMatrix rotate(const ComplexMatrix& block, double theta) const;

  /// Probability mass in shells n_a + n_b > n_max - margin.
  double shell_mass_above(const ComplexVector& state, int limit) const;

  double mean_jz(const ComplexVector& state) const;
  double mean_jx(const ComplexVector& state) const;
  double mean_jy(const ComplexVector& state) const;
  /// J_x applied to a two-mode vector.
  ComplexVector apply_jx(const ComplexVector& state) const;

 private:
  struct Shell {
    int total = 0;
    int first_na = 0;  // basis of the shell: (first_na + k, total - first_na - k)
    Eigen::Index size = 0;
    std::optional<Propagator> rotation;  // empty for 1-dim shells
  };

  int n_max_;
  std::vector<Shell> shells_;
};

/// exp(-i J_y theta) |psi>. Throws TruncationError when more than kLeakTol
/// of the state sits in shells above n_max - margin.
QuantumState mz_unitary_apply(const TwoModeFockSpace& space, double theta, const QuantumState& psi,
                              int margin = 0);

struct MzMeanOutput {
  double jz_out = 0.0;          // <J_z> after the rotation, computed directly
  double jz_out_formula = 0.0;  // <J_z>_in cos(theta) - <J_x>_in sin(theta)
  double jx_in = 0.0;
  double jz_in = 0.0;

  double identity_residual() const;
};

MzMeanOutput mz_mean_output(const TwoModeFockSpace& space, const OpticalInputSpec& input, double theta);

}  // namespace zenolab
