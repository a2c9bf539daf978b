#pragma once

// Chains of Mach-Zehnder interferometers, each rotating by theta / m.
//
// Connected: the m rotations act back to back on the same two-mode state,
// so they compose to a single rotation by theta.
//
// ZenoCut: after each stage the mode-a output port is discarded (traced out)
// and a fresh mode-a state is injected into the next interferometer. Only the
// mode-b reduction is carried forward:
//
//   sigma_{k+1} = Tr_a[ U (|psi_a><psi_a| (x) sigma_k) U^dag ],  U = exp(-i J_y theta/m)
//
// The channel is applied in Kraus form, K_n = <n|_a U |psi_a>_a. With
// swap_output_ports the roles of the outputs flip: mode b is discarded and
// the mode-a output is carried into the next stage's b port.
//
// With automatic n_max the carried support is re-checked at every stage and
// the run restarts on a larger truncation if it drifts into the margin.

#include <optional>
#include <vector>

#include "zenolab/fock.hpp"

namespace zenolab {

enum class Topology { Connected, ZenoCut };
enum class DiscardMode { TraceOut, PostSelectVacuum };

inline constexpr double kDefaultZenoEpsilon = 0.05;
inline constexpr double kDeviationFloor = 1e-6;
inline constexpr double kCarriedTraceTol = 1e-9;

struct CascadeConfig {
  Topology topology = Topology::Connected;
  double total_phase = 0.0;
  int stages = 1;
  OpticalInputSpec input;
  std::optional<ModeSpec> fresh_a;  // ZenoCut only
  int n_max = 0;                    // 0: size automatically
  double zeno_epsilon = kDefaultZenoEpsilon;
  DiscardMode discard = DiscardMode::TraceOut;
  bool swap_output_ports = false;

  void validate() const;
  double stage_phase() const { return total_phase / stages; }
  /// n_max if set, otherwise sized to hold the input, the fresh injection
  /// and the carried support plus the truncation margin.
  int resolved_n_max() const;
  int margin() const;
};

struct StageRecord {
  int stage = 0;  // 1-based
  double jz = 0.0;
  double jx = 0.0;
  double carried_trace = 1.0;
  double carried_min_eigenvalue = 0.0;
  double leak = 0.0;
  double success_probability = 1.0;  // PostSelectVacuum only
};

struct CascadeReport {
  std::vector<StageRecord> per_stage;
  double jz_final = 0.0;
  double jz_input = 0.0;
  double deviation = 0.0;
  bool zeno_achieved = false;
  /// <psi_b| sigma_m |psi_b>, overlap of the carried mode with its initial state.
  double carried_fidelity = 1.0;
  double success_probability = 1.0;
  int n_max = 0;
  ComplexMatrix carried_state;  // ZenoCut: final mode-b reduction
};

CascadeReport run_connected(const CascadeConfig& config);
CascadeReport run_zeno_cut(const CascadeConfig& config);
/// Dispatches on config.topology.
CascadeReport run_cascade(const CascadeConfig& config);

double relative_deviation(double jz_final, double jz_input);

struct ScanPoint {
  int m = 0;
  double deviation = 0.0;
  bool zeno_achieved = false;
  double jz_final = 0.0;
  double jz_input = 0.0;
  double carried_fidelity = 1.0;
  double max_leak = 0.0;
  int n_max = 0;
};

struct ScanResult {
  std::vector<ScanPoint> points;  // ascending in m
  std::optional<int> m_star;      // least scanned m with deviation < epsilon
};

/// Runs the cascade at every m in m_values (ascending, each >= 1).
/// Grid points are evaluated on up to `threads` worker threads.
ScanResult zeno_threshold_scan(const CascadeConfig& base, const std::vector<int>& m_values,
                               int threads = 1);

/// {1, 2, 4, ..., max_m}.
std::vector<int> default_scan_grid(int max_m = 1024);

/// Bisects on integer m between the last point of `coarse` at or above
/// epsilon and the first one below it; m_star becomes the bisection result.
ScanResult refine_zeno_threshold(const CascadeConfig& base, ScanResult coarse);

/// Coarse scan on default_scan_grid(max_m), then integer bisection between the
/// last grid point at or above epsilon and the first one below it.
ScanResult find_zeno_threshold(const CascadeConfig& base, int max_m = 1024, int threads = 1);

}  // namespace zenolab
