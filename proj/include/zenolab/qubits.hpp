#pragma once

// N-qubit collective Hamiltonian and the state families compared against it:
// GHZ, the product |+>^N state and convex mixtures of product states.
//
// Single-qubit generator convention: s_z = sigma_z / 2 (eigenvalues +-1/2),
// so H = omega * sum_l s_z^(l) has spectrum [-N omega / 2, +N omega / 2] and
// the separable/entangled Fisher bounds N omega^2 and N^2 omega^2 are
// saturated by the product and GHZ states. The Pauli convention is recovered
// with omega -> 2 omega.
//
// FullTensor basis ordering: qubit 1 is the most significant bit and bit
// value 0 is spin up, so |up...up> is index 0 and |down...down> is 2^N - 1.
// CollectiveSpin basis: |J, M> for M = J, J-1, ..., -J with J = N / 2.

#include <variant>
#include <vector>

#include "zenolab/linalg.hpp"
#include "zenolab/random.hpp"

namespace zenolab {

inline constexpr double kSpinGeneratorScale = 0.5;
inline constexpr int kMaxFullTensorQubits = 12;

enum class Representation { FullTensor, CollectiveSpin };

struct GhzFamily {};
struct ProductPlusFamily {};

/// sum_k p_k rho_k^(1) (x) ... (x) rho_k^(N). local_states[k][l] is the
/// single-qubit state of qubit l in branch k.
struct SeparableMixture {
  std::vector<double> weights;
  std::vector<std::vector<DensityMatrix>> local_states;
};

using StateFamily = std::variant<GhzFamily, ProductPlusFamily, SeparableMixture>;

struct QubitEnsembleSpec {
  int n_qubits = 1;
  double omega = 1.0;
  Representation representation = Representation::FullTensor;
  StateFamily family = ProductPlusFamily{};

  /// Throws ValidationError on any broken invariant.
  void validate() const;
  Eigen::Index dim() const;
};

HermitianOperator single_qubit_sz();

HermitianOperator collective_hamiltonian(const QubitEnsembleSpec& spec);
QuantumState ghz_state(const QubitEnsembleSpec& spec);
QuantumState product_plus_state(const QubitEnsembleSpec& spec);
DensityMatrix separable_mixture(const QubitEnsembleSpec& spec);

/// The family's state: pure for GHZ and ProductPlus, mixed otherwise.
StateRef ensemble_state(const QubitEnsembleSpec& spec);

struct FisherBounds {
  double separable = 0.0;  // N omega^2
  double maximal = 0.0;    // N^2 omega^2
};

FisherBounds fisher_bounds(const QubitEnsembleSpec& spec);

/// Single-qubit density matrix with Bloch vector r, |r| <= 1.
DensityMatrix bloch_state(double x, double y, double z);

/// Haar-random pure locals per branch, Dirichlet(1, ..., 1) weights.
SeparableMixture random_separable_mixture(int n_qubits, int branches, CounterRng rng);

}  // namespace zenolab
