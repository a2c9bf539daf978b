#include "zenolab/qubits.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include "zenolab/errors.hpp"

namespace zenolab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void validate_mixture(const SeparableMixture& mix, int n_qubits) {
  if (mix.weights.empty()) throw ValidationError("separable mixture: no branches");
  if (mix.weights.size() != mix.local_states.size())
    throw ValidationError("separable mixture: weights and local_states differ in branch count");
  double total = 0.0;
  for (double p : mix.weights) {
    if (!(p >= 0.0)) throw ValidationError("separable mixture: negative weight");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "separable mixture: weights sum to " << total << ", expected 1";
    throw ValidationError(os.str());
  }
  for (const auto& branch : mix.local_states) {
    if (static_cast<int>(branch.size()) != n_qubits)
      throw ValidationError("separable mixture: branch does not carry one local state per qubit");
    for (const auto& local : branch)
      if (local.dim() != 2) throw ValidationError("separable mixture: local states must be single-qubit");
  }
}

}  // namespace

void QubitEnsembleSpec::validate() const {
  if (n_qubits < 1) throw ValidationError("n_qubits must be >= 1");
  if (!(omega > 0.0) || !std::isfinite(omega)) throw ValidationError("omega must be a positive finite frequency");
  if (representation == Representation::FullTensor && n_qubits > kMaxFullTensorQubits) {
    std::ostringstream os;
    os << "FullTensor representation supports at most " << kMaxFullTensorQubits << " qubits, got " << n_qubits;
    throw ValidationError(os.str());
  }
  if (const auto* mix = std::get_if<SeparableMixture>(&family)) {
    if (representation != Representation::FullTensor)
      throw ValidationError("separable mixtures require the FullTensor representation");
    validate_mixture(*mix, n_qubits);
  }
}

Eigen::Index QubitEnsembleSpec::dim() const {
  return representation == Representation::FullTensor ? (Eigen::Index{1} << n_qubits)
                                                      : static_cast<Eigen::Index>(n_qubits + 1);
}

HermitianOperator single_qubit_sz() {
  return HermitianOperator::diagonal(RealVector{{kSpinGeneratorScale, -kSpinGeneratorScale}});
}

HermitianOperator collective_hamiltonian(const QubitEnsembleSpec& spec) {
  spec.validate();
  const Eigen::Index d = spec.dim();
  RealVector diag(d);
  if (spec.representation == Representation::FullTensor) {
    // Each down bit lowers M by one.
    for (Eigen::Index i = 0; i < d; ++i) {
      const int downs = std::popcount(static_cast<unsigned long long>(i));
      diag(i) = spec.omega * kSpinGeneratorScale * (spec.n_qubits - 2 * downs);
    }
  } else {
    const double j = 0.5 * spec.n_qubits;
    for (Eigen::Index k = 0; k < d; ++k) diag(k) = spec.omega * (j - static_cast<double>(k));
  }
  return HermitianOperator::diagonal(diag);
}

QuantumState ghz_state(const QubitEnsembleSpec& spec) {
  spec.validate();
  const Eigen::Index d = spec.dim();
  ComplexVector v = ComplexVector::Zero(d);
  v(0) += std::numbers::sqrt2 / 2.0;
  v(d - 1) += std::numbers::sqrt2 / 2.0;
  return QuantumState::normalized(v);
}

QuantumState product_plus_state(const QubitEnsembleSpec& spec) {
  spec.validate();
  const Eigen::Index d = spec.dim();
  ComplexVector v(d);
  if (spec.representation == Representation::FullTensor) {
    v.setConstant(std::pow(2.0, -0.5 * spec.n_qubits));
  } else {
    // |+>^N = sum_k sqrt(C(N, k)) / 2^{N/2} |J, J - k>, via log-binomials.
    const int n = spec.n_qubits;
    for (int k = 0; k <= n; ++k) {
      const double log_c = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
      v(k) = std::exp(0.5 * log_c - 0.5 * n * std::numbers::ln2);
    }
  }
  return QuantumState::normalized(v);
}

DensityMatrix separable_mixture(const QubitEnsembleSpec& spec) {
  spec.validate();
  const auto* mix = std::get_if<SeparableMixture>(&spec.family);
  if (mix == nullptr) throw ValidationError("separable_mixture: spec family is not SeparableMixture");
  const Eigen::Index d = spec.dim();
  ComplexMatrix total = ComplexMatrix::Zero(d, d);
  for (std::size_t k = 0; k < mix->weights.size(); ++k) {
    if (mix->weights[k] == 0.0) continue;
    ComplexMatrix branch = mix->local_states[k][0].matrix();
    for (int l = 1; l < spec.n_qubits; ++l) branch = tensor(branch, mix->local_states[k][l].matrix());
    total += mix->weights[k] * branch;
  }
  return DensityMatrix(total);
}

StateRef ensemble_state(const QubitEnsembleSpec& spec) {
  return std::visit(Overloaded{
                        [&](const GhzFamily&) -> StateRef { return ghz_state(spec); },
                        [&](const ProductPlusFamily&) -> StateRef { return product_plus_state(spec); },
                        [&](const SeparableMixture&) -> StateRef { return separable_mixture(spec); },
                    },
                    spec.family);
}

FisherBounds fisher_bounds(const QubitEnsembleSpec& spec) {
  spec.validate();
  const double n = spec.n_qubits;
  const double w2 = spec.omega * spec.omega;
  return FisherBounds{n * w2, n * n * w2};
}

DensityMatrix bloch_state(double x, double y, double z) {
  if (x * x + y * y + z * z > 1.0 + 1e-12) throw ValidationError("Bloch vector longer than 1");
  ComplexMatrix m(2, 2);
  m << Complex(0.5 * (1.0 + z), 0.0), Complex(0.5 * x, -0.5 * y),
       Complex(0.5 * x, 0.5 * y), Complex(0.5 * (1.0 - z), 0.0);
  return DensityMatrix(m);
}

SeparableMixture random_separable_mixture(int n_qubits, int branches, CounterRng rng) {
  if (n_qubits < 1 || branches < 1) throw ValidationError("random_separable_mixture: need n_qubits, branches >= 1");
  SeparableMixture mix;
  // Dirichlet(1, ..., 1) as normalized unit exponentials.
  double total = 0.0;
  for (int k = 0; k < branches; ++k) {
    const double e = -std::log1p(-rng.uniform());
    mix.weights.push_back(e);
    total += e;
  }
  for (double& p : mix.weights) p /= total;
  // Haar measure on pure qubit states is uniform on the Bloch sphere.
  for (int k = 0; k < branches; ++k) {
    std::vector<DensityMatrix> locals;
    locals.reserve(static_cast<std::size_t>(n_qubits));
    for (int l = 0; l < n_qubits; ++l) {
      const double z = 2.0 * rng.uniform() - 1.0;
      const double phi = 2.0 * std::numbers::pi * rng.uniform();
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      locals.push_back(bloch_state(r * std::cos(phi), r * std::sin(phi), z));
    }
    mix.local_states.push_back(std::move(locals));
  }
  return mix;
}

}  // namespace zenolab
