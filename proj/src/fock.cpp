#include "zenolab/fock.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "zenolab/errors.hpp"

namespace zenolab {

namespace {

// Poisson weight e^{-x} x^n / n! in log space.
double poisson_weight(double mean, int n) {
  if (mean == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(-mean + n * std::log(mean) - std::lgamma(n + 1.0));
}

double coherent_tail(double mean, int n_max) {
  // Terms decay monotonically once n exceeds the mean.
  double tail = 0.0;
  for (int n = n_max + 1;; ++n) {
    const double w = poisson_weight(mean, n);
    tail += w;
    if (n > mean && w < 1e-300 + tail * 1e-17) break;
  }
  return tail;
}

}  // namespace

double ModeSpec::mean_number() const {
  switch (kind) {
    case ModeKind::Vacuum: return 0.0;
    case ModeKind::Fock: return n;
    case ModeKind::Coherent: return std::norm(alpha);
  }
  return 0.0;
}

int ModeSpec::support() const {
  switch (kind) {
    case ModeKind::Vacuum: return 0;
    case ModeKind::Fock: return n;
    case ModeKind::Coherent: return required_n_max(alpha);
  }
  return 0;
}

double OpticalInputSpec::max_alpha() const {
  double a = 0.0;
  if (mode_a.kind == ModeKind::Coherent) a = std::max(a, std::abs(mode_a.alpha));
  if (mode_b.kind == ModeKind::Coherent) a = std::max(a, std::abs(mode_b.alpha));
  return a;
}

int truncation_margin(double alpha_abs) {
  return static_cast<int>(std::ceil(4.0 * alpha_abs + 4.0));
}

int required_n_max(Complex alpha) {
  const double mean = std::norm(alpha);
  int n = static_cast<int>(std::floor(mean));
  while (coherent_tail(mean, n) >= kCoherentTailTol) ++n;
  return n;
}

int default_n_max(const OpticalInputSpec& input) {
  const double a = input.max_alpha();
  const int formula = static_cast<int>(std::ceil(a * a + 10.0 * a + 20.0));
  const int needed = input.mode_a.support() + input.mode_b.support() + truncation_margin(a);
  return std::max(formula, needed);
}

QuantumState coherent_state(Complex alpha, int n_max) {
  if (n_max < 0) throw ValidationError("n_max must be >= 0");
  const double mean = std::norm(alpha);
  const double tail = coherent_tail(mean, n_max);
  if (tail >= kCoherentTailTol) {
    std::ostringstream os;
    os << "coherent state |alpha| = " << std::abs(alpha) << " loses " << tail << " beyond n_max = " << n_max
       << "; need n_max >= " << required_n_max(alpha);
    throw TruncationError(os.str());
  }
  ComplexVector v(n_max + 1);
  v(0) = std::exp(-0.5 * mean);
  for (int n = 1; n <= n_max; ++n) v(n) = v(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  return QuantumState::normalized(v);
}

QuantumState fock_state(int n, int n_max) {
  if (n < 0) throw ValidationError("Fock number must be >= 0");
  if (n > n_max) {
    std::ostringstream os;
    os << "Fock state |" << n << "> does not fit under n_max = " << n_max;
    throw TruncationError(os.str());
  }
  return QuantumState::basis(n_max + 1, n);
}

QuantumState mode_state(const ModeSpec& spec, int n_max) {
  switch (spec.kind) {
    case ModeKind::Vacuum: return fock_state(0, n_max);
    case ModeKind::Fock: return fock_state(spec.n, n_max);
    case ModeKind::Coherent: return coherent_state(spec.alpha, n_max);
  }
  throw ValidationError("unknown mode kind");
}

ComplexMatrix annihilation(int n_max) {
  ComplexMatrix a = ComplexMatrix::Zero(n_max + 1, n_max + 1);
  for (int n = 1; n <= n_max; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

// ---------------------------------------------------------------------------

TwoModeFockSpace::TwoModeFockSpace(int n_max) : n_max_(n_max) {
  if (n_max < 0) throw ValidationError("n_max must be >= 0");
  shells_.reserve(static_cast<std::size_t>(2 * n_max + 1));
  for (int total = 0; total <= 2 * n_max; ++total) {
    Shell s;
    s.total = total;
    s.first_na = std::max(0, total - n_max);
    const int last_na = std::min(total, n_max);
    s.size = last_na - s.first_na + 1;
    if (s.size > 1) {
      ComplexMatrix jy = ComplexMatrix::Zero(s.size, s.size);
      for (Eigen::Index k = 0; k + 1 < s.size; ++k) {
        const double na = s.first_na + static_cast<double>(k);
        const double nb = total - na;
        const double amp = 0.5 * std::sqrt((na + 1.0) * nb);
        jy(k + 1, k) = Complex(0.0, -amp);
        jy(k, k + 1) = Complex(0.0, amp);
      }
      s.rotation.emplace(HermitianOperator(jy));
    }
    shells_.push_back(std::move(s));
  }
}

ComplexMatrix TwoModeFockSpace::a() const {
  return tensor(annihilation(n_max_), ComplexMatrix::Identity(n_max_ + 1, n_max_ + 1));
}

ComplexMatrix TwoModeFockSpace::b() const {
  return tensor(ComplexMatrix::Identity(n_max_ + 1, n_max_ + 1), annihilation(n_max_));
}

HermitianOperator TwoModeFockSpace::jx() const {
  const ComplexMatrix ab = a().adjoint() * b();
  return HermitianOperator(0.5 * (ab + ab.adjoint()));
}

HermitianOperator TwoModeFockSpace::jy() const {
  const ComplexMatrix ab = a().adjoint() * b();
  return HermitianOperator((ab - ab.adjoint()) / Complex(0.0, 2.0));
}

HermitianOperator TwoModeFockSpace::jz() const {
  RealVector d(dim());
  for (int na = 0; na <= n_max_; ++na)
    for (int nb = 0; nb <= n_max_; ++nb) d(index(na, nb)) = 0.5 * (na - nb);
  return HermitianOperator::diagonal(d);
}

HermitianOperator TwoModeFockSpace::number_a() const {
  RealVector d(dim());
  for (int na = 0; na <= n_max_; ++na)
    for (int nb = 0; nb <= n_max_; ++nb) d(index(na, nb)) = na;
  return HermitianOperator::diagonal(d);
}

HermitianOperator TwoModeFockSpace::number_b() const {
  RealVector d(dim());
  for (int na = 0; na <= n_max_; ++na)
    for (int nb = 0; nb <= n_max_; ++nb) d(index(na, nb)) = nb;
  return HermitianOperator::diagonal(d);
}

QuantumState TwoModeFockSpace::product(const QuantumState& mode_a, const QuantumState& mode_b) const {
  if (mode_a.dim() != n_max_ + 1 || mode_b.dim() != n_max_ + 1)
    throw ValidationError("TwoModeFockSpace::product: single-mode states must have dimension n_max + 1");
  return QuantumState::normalized(tensor(mode_a.amplitudes(), mode_b.amplitudes()));
}

QuantumState TwoModeFockSpace::input_state(const OpticalInputSpec& input) const {
  if (input.n_max != 0 && input.n_max != n_max_)
    throw ValidationError("input n_max does not match the Fock space");
  return product(mode_state(input.mode_a, n_max_), mode_state(input.mode_b, n_max_));
}

ComplexMatrix TwoModeFockSpace::rotate(const ComplexMatrix& block, double theta) const {
  if (block.rows() != dim()) throw ValidationError("TwoModeFockSpace::rotate: dimension mismatch");
  ComplexMatrix out = block;
  if (theta == 0.0) return out;
  for (const Shell& s : shells_) {
    if (!s.rotation) continue;
    ComplexMatrix seg(s.size, block.cols());
    for (Eigen::Index k = 0; k < s.size; ++k) {
      const int na = s.first_na + static_cast<int>(k);
      seg.row(k) = block.row(index(na, s.total - na));
    }
    if (seg.cwiseAbs2().sum() == 0.0) continue;
    seg = s.rotation->apply(seg, theta);
    for (Eigen::Index k = 0; k < s.size; ++k) {
      const int na = s.first_na + static_cast<int>(k);
      out.row(index(na, s.total - na)) = seg.row(k);
    }
  }
  return out;
}

double TwoModeFockSpace::shell_mass_above(const ComplexVector& state, int limit) const {
  double mass = 0.0;
  for (int na = 0; na <= n_max_; ++na)
    for (int nb = 0; nb <= n_max_; ++nb)
      if (na + nb > limit) mass += std::norm(state(index(na, nb)));
  return mass;
}

double TwoModeFockSpace::mean_jz(const ComplexVector& state) const {
  double acc = 0.0;
  for (int na = 0; na <= n_max_; ++na)
    for (int nb = 0; nb <= n_max_; ++nb) acc += 0.5 * (na - nb) * std::norm(state(index(na, nb)));
  return acc;
}

namespace {
// <a^dag b> on a two-mode vector.
Complex raise_a_lower_b(const TwoModeFockSpace& space, const ComplexVector& s) {
  Complex acc = 0.0;
  const int n = space.n_max();
  for (int na = 0; na < n; ++na)
    for (int nb = 1; nb <= n; ++nb)
      acc += std::conj(s(space.index(na + 1, nb - 1))) * std::sqrt((na + 1.0) * nb) * s(space.index(na, nb));
  return acc;
}
}  // namespace

double TwoModeFockSpace::mean_jx(const ComplexVector& state) const {
  return raise_a_lower_b(*this, state).real();
}

double TwoModeFockSpace::mean_jy(const ComplexVector& state) const {
  return raise_a_lower_b(*this, state).imag();
}

ComplexVector TwoModeFockSpace::apply_jx(const ComplexVector& state) const {
  ComplexVector out = ComplexVector::Zero(dim());
  for (int na = 0; na <= n_max_; ++na)
    for (int nb = 0; nb <= n_max_; ++nb) {
      const Complex c = state(index(na, nb));
      if (c == 0.0) continue;
      if (na < n_max_ && nb > 0) out(index(na + 1, nb - 1)) += 0.5 * std::sqrt((na + 1.0) * nb) * c;
      if (nb < n_max_ && na > 0) out(index(na - 1, nb + 1)) += 0.5 * std::sqrt(na * (nb + 1.0)) * c;
    }
  return out;
}

// ---------------------------------------------------------------------------

QuantumState mz_unitary_apply(const TwoModeFockSpace& space, double theta, const QuantumState& psi, int margin) {
  if (psi.dim() != space.dim()) throw ValidationError("mz_unitary_apply: dimension mismatch");
  const int limit = space.n_max() - std::max(margin, 0);
  const double leak = space.shell_mass_above(psi.amplitudes(), limit);
  if (leak > kLeakTol) {
    std::ostringstream os;
    os << "truncation leak: " << leak << " of the state lies in shells above n_a + n_b = " << limit
       << " (n_max = " << space.n_max() << ", margin = " << margin << ")";
    throw TruncationError(os.str());
  }
  return QuantumState::normalized(space.rotate(psi.amplitudes(), theta));
}

double MzMeanOutput::identity_residual() const {
  return std::abs(jz_out - jz_out_formula);
}

MzMeanOutput mz_mean_output(const TwoModeFockSpace& space, const OpticalInputSpec& input, double theta) {
  const QuantumState in = space.input_state(input);
  const QuantumState out = mz_unitary_apply(space, theta, in, truncation_margin(input.max_alpha()));
  MzMeanOutput r;
  r.jz_in = space.mean_jz(in.amplitudes());
  r.jx_in = space.mean_jx(in.amplitudes());
  r.jz_out = space.mean_jz(out.amplitudes());
  r.jz_out_formula = r.jz_in * std::cos(theta) - r.jx_in * std::sin(theta);
  return r;
}

}  // namespace zenolab
