#pragma once

// Dense complex linear algebra for small closed quantum systems (hbar = 1).
//
// The value types in this header validate their invariants on construction
// and are immutable afterwards, so they can be shared freely across threads.

#include <complex>
#include <cstddef>
#include <variant>

#include <Eigen/Dense>

namespace zenolab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

namespace tol {
inline constexpr double kHermitian = 1e-12;
inline constexpr double kIdempotent = 1e-10;
inline constexpr double kNorm = 1e-10;
inline constexpr double kTrace = 1e-10;
// Eigenvalues in [-kPsdClamp, 0) are read as zero; anything below is an error.
inline constexpr double kPsdClamp = 1e-10;
}  // namespace tol

/// Largest entrywise |A_ij - conj(A_ji)|.
double max_asymmetry(const ComplexMatrix& m);

class HermitianOperator {
 public:
  /// Throws ValidationError (naming the max asymmetry) if `m` is not square
  /// or not Hermitian within tol::kHermitian. The stored matrix is the exact
  /// Hermitian part of `m`.
  explicit HermitianOperator(const ComplexMatrix& m);

  static HermitianOperator zero(Eigen::Index dim);
  static HermitianOperator diagonal(const RealVector& entries);

  Eigen::Index dim() const { return matrix_.rows(); }
  const ComplexMatrix& matrix() const { return matrix_; }

 private:
  ComplexMatrix matrix_;
};

class QuantumState {
 public:
  /// Requires unit norm within tol::kNorm.
  explicit QuantumState(ComplexVector amplitudes);

  /// Rescales `amplitudes` to unit norm; throws on a zero vector.
  static QuantumState normalized(const ComplexVector& amplitudes);
  static QuantumState basis(Eigen::Index dim, Eigen::Index index);

  Eigen::Index dim() const { return amplitudes_.size(); }
  const ComplexVector& amplitudes() const { return amplitudes_; }

 private:
  ComplexVector amplitudes_;
};

/// Orthogonal projector, stored both as a matrix and as an orthonormal basis
/// of its range (dim x rank). The range basis makes P A P cheap for low rank.
class Projector {
 public:
  /// Validates Hermiticity and idempotence of an explicit projector matrix.
  static Projector from_matrix(const ComplexMatrix& m);
  /// Projector onto the span of the columns of `vectors`.
  static Projector onto_span(const ComplexMatrix& vectors, double rank_tol = 1e-10);
  static Projector onto_state(const QuantumState& psi);
  static Projector identity(Eigen::Index dim);

  Eigen::Index dim() const { return matrix_.rows(); }
  Eigen::Index rank() const { return range_.cols(); }
  const ComplexMatrix& matrix() const { return matrix_; }
  const ComplexMatrix& range() const { return range_; }

 private:
  Projector(ComplexMatrix range);
  ComplexMatrix matrix_;
  ComplexMatrix range_;
};

class DensityMatrix {
 public:
  /// Validates Hermiticity, unit trace and positivity (within the PSD clamp).
  explicit DensityMatrix(const ComplexMatrix& m);

  static DensityMatrix pure(const QuantumState& psi);
  static DensityMatrix maximally_mixed(Eigen::Index dim);

  Eigen::Index dim() const { return matrix_.rows(); }
  const ComplexMatrix& matrix() const { return matrix_; }

  /// Smallest eigenvalue before clamping.
  double min_eigenvalue() const;

 private:
  struct Trusted {};
  DensityMatrix(ComplexMatrix m, Trusted) : matrix_(std::move(m)) {}
  ComplexMatrix matrix_;

  friend class Propagator;
};

using StateRef = std::variant<QuantumState, DensityMatrix>;

struct EigenSystem {
  RealVector eigenvalues;     // ascending
  ComplexMatrix eigenvectors; // orthonormal columns
};

EigenSystem hermitian_eig(const HermitianOperator& op);

/// e^{-iHt} backed by a single cached eigendecomposition of H, so scans over
/// many t reuse one factorization.
class Propagator {
 public:
  explicit Propagator(const HermitianOperator& h);

  Eigen::Index dim() const { return eig_.eigenvalues.size(); }
  const EigenSystem& eigensystem() const { return eig_; }

  ComplexMatrix unitary(double t) const;
  /// e^{-iHt} X for a dim x k block X.
  ComplexMatrix apply(const ComplexMatrix& block, double t) const;
  QuantumState evolve(const QuantumState& psi, double t) const;
  DensityMatrix evolve(const DensityMatrix& rho, double t) const;

 private:
  EigenSystem eig_;
};

QuantumState evolve_state(const HermitianOperator& h, double t, const QuantumState& psi);
DensityMatrix evolve_density(const HermitianOperator& h, double t, const DensityMatrix& rho);

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector tensor(const ComplexVector& a, const ComplexVector& b);
HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

enum class Subsystem { A, B };

/// Reduces a state on C^dA (x) C^dB to the `keep` factor.
DensityMatrix partial_trace(const DensityMatrix& rho, Eigen::Index dim_a, Eigen::Index dim_b,
                            Subsystem keep);

double expectation(const HermitianOperator& op, const QuantumState& psi);
double expectation(const HermitianOperator& op, const DensityMatrix& rho);
double expectation(const HermitianOperator& op, const StateRef& state);

double variance(const HermitianOperator& op, const QuantumState& psi);
double variance(const HermitianOperator& op, const DensityMatrix& rho);
double variance(const HermitianOperator& op, const StateRef& state);

/// Projector onto the eigenvectors of rho with eigenvalue above `tol`.
Projector support_projector(const DensityMatrix& rho, double tol = 1e-12);

/// Relative Frobenius distance ||a - b|| / max(||b||, 1).
double relative_frobenius(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace zenolab
