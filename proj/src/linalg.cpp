#include "zenolab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "zenolab/errors.hpp"

namespace zenolab {

namespace {

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream os;
    os << what << ": expected a non-empty square matrix, got " << m.rows() << "x" << m.cols();
    throw ValidationError(os.str());
  }
}

void require_dims(Eigen::Index expected, Eigen::Index got, const char* what) {
  if (expected != got) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << expected << " vs " << got << ")";
    throw ValidationError(os.str());
  }
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  ComplexMatrix h = 0.5 * (m + m.adjoint());
  for (Eigen::Index i = 0; i < h.rows(); ++i) h(i, i) = Complex(h(i, i).real(), 0.0);
  return h;
}

}  // namespace

double max_asymmetry(const ComplexMatrix& m) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i; j < m.cols(); ++j)
      worst = std::max(worst, std::abs(m(i, j) - std::conj(m(j, i))));
  return worst;
}

double relative_frobenius(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).norm() / std::max(b.norm(), 1.0);
}

// ---------------------------------------------------------------------------
// HermitianOperator

HermitianOperator::HermitianOperator(const ComplexMatrix& m) {
  require_square(m, "HermitianOperator");
  const double asym = max_asymmetry(m);
  if (!(asym <= tol::kHermitian)) {
    std::ostringstream os;
    os << "HermitianOperator: matrix is not Hermitian (max asymmetry " << asym << ")";
    throw ValidationError(os.str());
  }
  matrix_ = hermitian_part(m);
}

HermitianOperator HermitianOperator::zero(Eigen::Index dim) {
  return HermitianOperator(ComplexMatrix::Zero(dim, dim));
}

HermitianOperator HermitianOperator::diagonal(const RealVector& entries) {
  return HermitianOperator(entries.cast<Complex>().asDiagonal().toDenseMatrix());
}

// ---------------------------------------------------------------------------
// QuantumState

QuantumState::QuantumState(ComplexVector amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() == 0) throw ValidationError("QuantumState: empty amplitude vector");
  const double n2 = amplitudes_.squaredNorm();
  if (!(std::abs(n2 - 1.0) <= tol::kNorm)) {
    std::ostringstream os;
    os << "QuantumState: squared norm " << n2 << " differs from 1";
    throw ValidationError(os.str());
  }
}

QuantumState QuantumState::normalized(const ComplexVector& amplitudes) {
  const double n = amplitudes.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw ValidationError("QuantumState: cannot normalize a zero vector");
  return QuantumState(amplitudes / n);
}

QuantumState QuantumState::basis(Eigen::Index dim, Eigen::Index index) {
  if (index < 0 || index >= dim) throw ValidationError("QuantumState::basis: index out of range");
  ComplexVector v = ComplexVector::Zero(dim);
  v(index) = 1.0;
  return QuantumState(std::move(v));
}

// ---------------------------------------------------------------------------
// Projector

Projector::Projector(ComplexMatrix range) : matrix_(range * range.adjoint()), range_(std::move(range)) {}

Projector Projector::from_matrix(const ComplexMatrix& m) {
  require_square(m, "Projector");
  const double asym = max_asymmetry(m);
  if (!(asym <= tol::kHermitian)) {
    std::ostringstream os;
    os << "Projector: matrix is not Hermitian (max asymmetry " << asym << ")";
    throw ValidationError(os.str());
  }
  const ComplexMatrix h = hermitian_part(m);
  const double idem = (h * h - h).cwiseAbs().maxCoeff();
  if (!(idem <= tol::kIdempotent)) {
    std::ostringstream os;
    os << "Projector: matrix is not idempotent (max |P^2 - P| " << idem << ")";
    throw ValidationError(os.str());
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
    if (es.eigenvalues()(k) > 0.5) keep.push_back(k);
  ComplexMatrix range(h.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) range.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(keep[c]);
  Projector p(std::move(range));
  p.matrix_ = h;
  return p;
}

Projector Projector::onto_span(const ComplexMatrix& vectors, double rank_tol) {
  if (vectors.rows() == 0) throw ValidationError("Projector::onto_span: empty vectors");
  Eigen::ColPivHouseholderQR<ComplexMatrix> qr(vectors);
  qr.setThreshold(rank_tol);
  const Eigen::Index r = qr.rank();
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(vectors.rows(), r);
  return Projector(std::move(q));
}

Projector Projector::onto_state(const QuantumState& psi) {
  return Projector(ComplexMatrix(psi.amplitudes()));
}

Projector Projector::identity(Eigen::Index dim) {
  return Projector(ComplexMatrix::Identity(dim, dim));
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(const ComplexMatrix& m) {
  require_square(m, "DensityMatrix");
  const double asym = max_asymmetry(m);
  if (!(asym <= tol::kHermitian)) {
    std::ostringstream os;
    os << "DensityMatrix: matrix is not Hermitian (max asymmetry " << asym << ")";
    throw ValidationError(os.str());
  }
  matrix_ = hermitian_part(m);
  const double tr = matrix_.trace().real();
  if (!(std::abs(tr - 1.0) <= tol::kTrace)) {
    std::ostringstream os;
    os << "DensityMatrix: trace " << tr << " differs from 1";
    throw ValidationError(os.str());
  }
  const double lo = min_eigenvalue();
  if (lo < -tol::kPsdClamp) {
    std::ostringstream os;
    os << "DensityMatrix: negative eigenvalue " << lo;
    throw ValidationError(os.str());
  }
}

DensityMatrix DensityMatrix::pure(const QuantumState& psi) {
  return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint(), Trusted{});
}

DensityMatrix DensityMatrix::maximally_mixed(Eigen::Index dim) {
  return DensityMatrix(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim), Trusted{});
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(matrix_, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// ---------------------------------------------------------------------------
// Spectral machinery

EigenSystem hermitian_eig(const HermitianOperator& op) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(op.matrix());
  if (es.info() != Eigen::Success) throw NumericalError("hermitian_eig: eigensolver did not converge");
  return EigenSystem{es.eigenvalues(), es.eigenvectors()};
}

Propagator::Propagator(const HermitianOperator& h) : eig_(hermitian_eig(h)) {}

ComplexMatrix Propagator::unitary(double t) const {
  const ComplexVector phases = (eig_.eigenvalues * Complex(0.0, -t)).array().exp();
  return eig_.eigenvectors * phases.asDiagonal() * eig_.eigenvectors.adjoint();
}

ComplexMatrix Propagator::apply(const ComplexMatrix& block, double t) const {
  require_dims(dim(), block.rows(), "Propagator::apply");
  if (t == 0.0) return block;
  const ComplexVector phases = (eig_.eigenvalues * Complex(0.0, -t)).array().exp();
  ComplexMatrix coeffs = eig_.eigenvectors.adjoint() * block;
  coeffs = phases.asDiagonal() * coeffs;
  return eig_.eigenvectors * coeffs;
}

QuantumState Propagator::evolve(const QuantumState& psi, double t) const {
  require_dims(dim(), psi.dim(), "evolve_state");
  if (t == 0.0) return psi;
  ComplexVector out = apply(psi.amplitudes(), t);
  // Unitary up to roundoff; renormalize so the invariant holds at 1e-10
  // regardless of how many steps are chained.
  out /= out.norm();
  return QuantumState(std::move(out));
}

DensityMatrix Propagator::evolve(const DensityMatrix& rho, double t) const {
  require_dims(dim(), rho.dim(), "evolve_density");
  if (t == 0.0) return rho;
  const ComplexMatrix u = unitary(t);
  ComplexMatrix out = u * rho.matrix() * u.adjoint();
  out = 0.5 * (out + out.adjoint());
  out /= out.trace().real();
  return DensityMatrix(std::move(out), DensityMatrix::Trusted{});
}

QuantumState evolve_state(const HermitianOperator& h, double t, const QuantumState& psi) {
  require_dims(h.dim(), psi.dim(), "evolve_state");
  if (t == 0.0) return psi;
  return Propagator(h).evolve(psi, t);
}

DensityMatrix evolve_density(const HermitianOperator& h, double t, const DensityMatrix& rho) {
  require_dims(h.dim(), rho.dim(), "evolve_density");
  if (t == 0.0) return rho;
  return Propagator(h).evolve(rho, t);
}

// ---------------------------------------------------------------------------
// Composite systems

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexVector tensor(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b) {
  return HermitianOperator(tensor(a.matrix(), b.matrix()));
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix(tensor(a.matrix(), b.matrix()));
}

DensityMatrix partial_trace(const DensityMatrix& rho, Eigen::Index dim_a, Eigen::Index dim_b,
                            Subsystem keep) {
  if (dim_a <= 0 || dim_b <= 0 || dim_a * dim_b != rho.dim()) {
    std::ostringstream os;
    os << "partial_trace: " << dim_a << " x " << dim_b << " does not factor dimension " << rho.dim();
    throw ValidationError(os.str());
  }
  const ComplexMatrix& m = rho.matrix();
  ComplexMatrix out;
  if (keep == Subsystem::A) {
    out = ComplexMatrix::Zero(dim_a, dim_a);
    for (Eigen::Index i = 0; i < dim_a; ++i)
      for (Eigen::Index j = 0; j < dim_a; ++j)
        out(i, j) = m.block(i * dim_b, j * dim_b, dim_b, dim_b).trace();
  } else {
    out = ComplexMatrix::Zero(dim_b, dim_b);
    for (Eigen::Index i = 0; i < dim_a; ++i) out += m.block(i * dim_b, i * dim_b, dim_b, dim_b);
  }
  return DensityMatrix(out);
}

// ---------------------------------------------------------------------------
// Moments

double expectation(const HermitianOperator& op, const QuantumState& psi) {
  require_dims(op.dim(), psi.dim(), "expectation");
  return psi.amplitudes().dot(op.matrix() * psi.amplitudes()).real();
}

double expectation(const HermitianOperator& op, const DensityMatrix& rho) {
  require_dims(op.dim(), rho.dim(), "expectation");
  // Tr[A rho] = sum_ij A_ij rho_ji
  return (op.matrix().transpose().cwiseProduct(rho.matrix())).sum().real();
}

double expectation(const HermitianOperator& op, const StateRef& state) {
  return std::visit([&](const auto& s) { return expectation(op, s); }, state);
}

namespace {
double clamp_variance(double v) {
  if (v < 0.0 && v >= -1e-12) return 0.0;
  return v;
}
}  // namespace

double variance(const HermitianOperator& op, const QuantumState& psi) {
  require_dims(op.dim(), psi.dim(), "variance");
  const ComplexVector a_psi = op.matrix() * psi.amplitudes();
  const double mean = psi.amplitudes().dot(a_psi).real();
  return clamp_variance(a_psi.squaredNorm() - mean * mean);
}

double variance(const HermitianOperator& op, const DensityMatrix& rho) {
  require_dims(op.dim(), rho.dim(), "variance");
  const ComplexMatrix a_rho = op.matrix() * rho.matrix();
  const double mean = a_rho.trace().real();
  const double second = (op.matrix().transpose().cwiseProduct(a_rho)).sum().real();
  return clamp_variance(second - mean * mean);
}

double variance(const HermitianOperator& op, const StateRef& state) {
  return std::visit([&](const auto& s) { return variance(op, s); }, state);
}

Projector support_projector(const DensityMatrix& rho, double tol) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho.matrix());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
    if (es.eigenvalues()(k) > tol) keep.push_back(k);
  ComplexMatrix range(rho.dim(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) range.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(keep[c]);
  return Projector::onto_span(range);
}

}  // namespace zenolab
