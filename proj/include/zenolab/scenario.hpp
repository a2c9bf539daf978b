#pragma once

// Scenario files: one JSON object per file, strictly validated.
//
//   {
//     "schema_version": 1,
//     "kind": "zeno-qubit",
//     "seed": 7,                       (optional, default 0)
//     "parameters": { ... },           (kind-specific, see below)
//     "output": { "format": "csv" }    (optional)
//   }
//
// Unknown keys are errors at every level. Parsing reports every problem it
// finds, not only the first.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "zenolab/cascade.hpp"
#include "zenolab/errors.hpp"
#include "zenolab/qubits.hpp"
#include "zenolab/results.hpp"

namespace zenolab {

inline constexpr int kSchemaVersion = 1;

enum class ScenarioKind { ZenoQubit, ZenoCustom, MzSingle, MzCascade, FisherScan, EstimateDemo };

const char* to_string(ScenarioKind kind);
const char* to_string(TableFormat format);

enum class FamilyName { Ghz, ProductPlus, RandomSeparable };
const char* to_string(FamilyName family);

struct QubitFamilyParams {
  FamilyName family = FamilyName::ProductPlus;
  int branches = 2;  // RandomSeparable
};

/// Survival and Fisher quantities for an N-qubit ensemble over a (t, m) grid.
struct ZenoQubitParams {
  int n_qubits = 1;
  double omega = 1.0;
  QubitFamilyParams family;
  std::optional<Representation> representation;  // default: FullTensor up to 12 qubits
  std::vector<double> t_values;
  bool grid_is_tau = false;  // t_values hold tau = t / m
  std::vector<int> m_values;
};

/// Same as ZenoQubitParams but with explicit matrices.
struct ZenoCustomParams {
  ComplexMatrix hamiltonian;
  std::optional<ComplexMatrix> projector;  // default: onto the initial state
  std::optional<ComplexVector> initial_state;
  std::optional<ComplexMatrix> initial_density;
  std::vector<double> t_values;
  bool grid_is_tau = false;
  std::vector<int> m_values;
};

struct MzSingleParams {
  OpticalInputSpec input;
  std::vector<double> theta_values;
};

struct MzCascadeParams {
  CascadeConfig base;  // stages unused
  std::vector<int> m_values;
  bool refine = false;  // bisect around the epsilon crossing
};

struct FisherScanParams {
  std::vector<int> n_values;
  std::vector<FamilyName> families;
  double omega = 1.0;
  int m = 1;
  double tau = 1e-3;  // where the two-outcome Fisher information is sampled
  int branches = 2;
  std::optional<Representation> representation;
};

struct EstimateDemoParams {
  int n_qubits = 1;
  double omega = 1.0;
  QubitFamilyParams family;
  std::optional<Representation> representation;
  double tau = 0.1;
  int m = 1000;
  int repetitions = 1;
};

using ScenarioParams = std::variant<ZenoQubitParams, ZenoCustomParams, MzSingleParams, MzCascadeParams,
                                    FisherScanParams, EstimateDemoParams>;

struct OutputOptions {
  std::optional<TableFormat> format;
  std::optional<std::string> path;
};

struct ScenarioFile {
  int schema_version = kSchemaVersion;
  ScenarioKind kind = ScenarioKind::ZenoQubit;
  std::uint64_t seed = 0;
  ScenarioParams params;
  OutputOptions output;
  /// FNV-1a of the canonical (sorted-key, compact) JSON text.
  std::uint64_t hash = 0;
  std::string source;  // path or "<string>"
};

/// Thrown with every validation message found.
class ScenarioError : public ValidationError {
 public:
  explicit ScenarioError(std::vector<std::string> messages);
  const std::vector<std::string>& messages() const { return messages_; }

 private:
  std::vector<std::string> messages_;
};

ScenarioFile parse_scenario_text(const std::string& text, const std::string& source = "<string>");
/// Throws IoError when the file cannot be read.
ScenarioFile parse_scenario(const std::filesystem::path& path);

}  // namespace zenolab
