#include "zenolab/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "zenolab/random.hpp"
#include "zenolab/zeno.hpp"

#ifndef ZENOLAB_VERSION
#define ZENOLAB_VERSION "0.0.0"
#endif

namespace zenolab {

const char* version() {
  return ZENOLAB_VERSION;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Runs body(i) for i in [0, count) on up to `threads` workers; the first
// exception wins.
template <class Body>
void parallel_for(std::size_t count, int threads, Body body) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int n = static_cast<int>(std::min<std::size_t>(std::max(threads, 1), std::max<std::size_t>(count, 1)));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

class Logger {
 public:
  explicit Logger(std::ostream* out) : out_(out) {}
  void line(const std::string& s) {
    if (!out_) return;
    std::lock_guard<std::mutex> lock(mutex_);
    *out_ << "[zenolab] " << s << '\n';
  }

 private:
  std::ostream* out_;
  std::mutex mutex_;
};

Representation pick_representation(std::optional<Representation> r, int n) {
  if (r) return *r;
  return n <= kMaxFullTensorQubits ? Representation::FullTensor : Representation::CollectiveSpin;
}

QubitEnsembleSpec make_spec(int n, double omega, FamilyName family, int branches,
                            std::optional<Representation> rep, std::uint64_t seed) {
  QubitEnsembleSpec spec;
  spec.n_qubits = n;
  spec.omega = omega;
  spec.representation = pick_representation(rep, n);
  switch (family) {
    case FamilyName::Ghz: spec.family = GhzFamily{}; break;
    case FamilyName::ProductPlus: spec.family = ProductPlusFamily{}; break;
    case FamilyName::RandomSeparable:
      spec.family = random_separable_mixture(n, branches, CounterRng(seed, "random-separable").substream(
                                                                static_cast<std::uint64_t>(n)));
      break;
  }
  spec.validate();
  return spec;
}

Projector zeno_projector(const StateRef& state) {
  if (const auto* psi = std::get_if<QuantumState>(&state)) return Projector::onto_state(*psi);
  return support_projector(std::get<DensityMatrix>(state));
}

std::vector<Column> survival_columns(bool with_n) {
  std::vector<Column> c;
  if (with_n) c.push_back({"N", ColumnType::Int});
  const std::vector<Column> rest = {
      {"t", ColumnType::Real},
      {"m", ColumnType::Int},
      {"tau", ColumnType::Real},
      {"p_exact", ColumnType::Real},
      {"p_quadratic", ColumnType::Real},
      {"p_quadratic_raw", ColumnType::Real},
      {"p_quadratic_clamped", ColumnType::Bool},
      {"p_gaussian", ColumnType::Real},
      {"fisher", ColumnType::Real},
      {"quantum_fisher", ColumnType::Real},
      {"fisher_numeric", ColumnType::Real},
      {"tau_qz", ColumnType::Real},
      {"delta_tau_cr", ColumnType::Real},
      {"tau_over_tau_qz", ColumnType::Real},
      {"zeno_time_infinite", ColumnType::Bool},
      {"gaussian_from_classical", ColumnType::Bool},
      {"fisher_numeric_singular", ColumnType::Bool},
  };
  c.insert(c.end(), rest.begin(), rest.end());
  return c;
}

ResultTable survival_table(const HermitianOperator& h, const Projector& p, const StateRef& state,
                           const std::vector<double>& t_values, bool grid_is_tau,
                           const std::vector<int>& m_values, std::optional<int> n_qubits, const RunOptions& opts,
                           Logger& log) {
  struct Point {
    double t;
    int m;
  };
  std::vector<Point> grid;
  for (int m : m_values)
    for (double x : t_values) grid.push_back({grid_is_tau ? x * m : x, m});

  std::vector<ZenoReport> reports(grid.size());
  parallel_for(grid.size(), opts.threads, [&](std::size_t i) {
    const ZenoScenario sc(h, p, state, grid[i].t, grid[i].m);
    reports[i] = run_scenario(sc);
    log.line("point " + std::to_string(i + 1) + "/" + std::to_string(grid.size()) + " t=" +
             format_real(grid[i].t) + " m=" + std::to_string(grid[i].m));
  });

  ResultTable table(survival_columns(n_qubits.has_value()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const ZenoReport& r = reports[i];
    std::vector<Cell> row;
    if (n_qubits) row.emplace_back(static_cast<long long>(*n_qubits));
    row.emplace_back(grid[i].t);
    row.emplace_back(static_cast<long long>(grid[i].m));
    row.emplace_back(r.tau);
    row.emplace_back(r.p_exact);
    row.emplace_back(r.p_quadratic.value);
    row.emplace_back(r.p_quadratic.raw);
    row.emplace_back(r.p_quadratic.clamped);
    row.emplace_back(r.p_gaussian.value);
    row.emplace_back(r.fisher_quadratic);
    row.emplace_back(r.quantum_fisher.value_or(kNaN));
    row.emplace_back(r.fisher_numeric);
    row.emplace_back(r.tau_qz);
    row.emplace_back(r.delta_tau_cr);
    row.emplace_back(r.ratio);
    row.emplace_back(r.zeno_time_infinite);
    row.emplace_back(r.gaussian_from_classical);
    row.emplace_back(r.fisher_numeric_singular);
    table.add_row(std::move(row));
  }
  return table;
}

ResultTable run_zeno_qubit(const ScenarioFile& s, const ZenoQubitParams& p, const RunOptions& opts, Logger& log) {
  const QubitEnsembleSpec spec =
      make_spec(p.n_qubits, p.omega, p.family.family, p.family.branches, p.representation, s.seed);
  const StateRef state = ensemble_state(spec);
  ResultTable t = survival_table(collective_hamiltonian(spec), zeno_projector(state), state, p.t_values,
                                 p.grid_is_tau, p.m_values, p.n_qubits, opts, log);
  t.set_metadata("family", to_string(p.family.family));
  t.set_metadata("representation",
                 spec.representation == Representation::FullTensor ? "FullTensor" : "CollectiveSpin");
  t.set_metadata("omega", format_real(p.omega));
  return t;
}

ResultTable run_zeno_custom(const ZenoCustomParams& p, const RunOptions& opts, Logger& log) {
  const HermitianOperator h(p.hamiltonian);
  StateRef state = p.initial_state ? StateRef(QuantumState::normalized(*p.initial_state))
                                   : StateRef(DensityMatrix(*p.initial_density));
  const Projector proj = p.projector ? Projector::from_matrix(*p.projector)
                                     : Projector::onto_state(std::get<QuantumState>(state));
  ResultTable t = survival_table(h, proj, state, p.t_values, p.grid_is_tau, p.m_values, std::nullopt, opts, log);
  t.set_metadata("dimension", std::to_string(h.dim()));
  t.set_metadata("projector_rank", std::to_string(proj.rank()));
  return t;
}

std::string mode_text(const ModeSpec& m) {
  switch (m.kind) {
    case ModeKind::Vacuum: return "vacuum";
    case ModeKind::Fock: return "fock(" + std::to_string(m.n) + ")";
    case ModeKind::Coherent:
      return "coherent(" + format_real(m.alpha.real()) + "," + format_real(m.alpha.imag()) + ")";
  }
  return "?";
}

ResultTable run_mz_single(const MzSingleParams& p, Logger& log) {
  OpticalInputSpec input = p.input;
  if (input.n_max == 0) input.n_max = default_n_max(input);
  const TwoModeFockSpace space(input.n_max);
  ResultTable t({{"theta", ColumnType::Real},
                 {"jz_in", ColumnType::Real},
                 {"jx_in", ColumnType::Real},
                 {"jz_out", ColumnType::Real},
                 {"jz_out_formula", ColumnType::Real},
                 {"residual", ColumnType::Real}});
  for (std::size_t i = 0; i < p.theta_values.size(); ++i) {
    const MzMeanOutput r = mz_mean_output(space, input, p.theta_values[i]);
    t.add_row({p.theta_values[i], r.jz_in, r.jx_in, r.jz_out, r.jz_out_formula, r.identity_residual()});
    log.line("point " + std::to_string(i + 1) + "/" + std::to_string(p.theta_values.size()) +
             " theta=" + format_real(p.theta_values[i]));
  }
  t.set_metadata("mode_a", mode_text(input.mode_a));
  t.set_metadata("mode_b", mode_text(input.mode_b));
  t.set_metadata("n_max", std::to_string(input.n_max));
  t.set_metadata("truncation_margin", std::to_string(truncation_margin(input.max_alpha())));
  return t;
}

ResultTable run_mz_cascade(const MzCascadeParams& p, const RunOptions& opts, Logger& log) {
  ScanResult scan = zeno_threshold_scan(p.base, p.m_values, opts.threads);
  if (p.refine) scan = refine_zeno_threshold(p.base, std::move(scan));
  for (const ScanPoint& q : scan.points) log.line("m=" + std::to_string(q.m) + " deviation=" + format_real(q.deviation));

  ResultTable t({{"m", ColumnType::Int},
                 {"deviation", ColumnType::Real},
                 {"zeno_achieved", ColumnType::Bool},
                 {"jz_final", ColumnType::Real},
                 {"jz_input", ColumnType::Real},
                 {"carried_fidelity", ColumnType::Real},
                 {"max_leak", ColumnType::Real},
                 {"n_max", ColumnType::Int}});
  double worst_leak = 0.0;
  for (const ScanPoint& q : scan.points) {
    t.add_row({static_cast<long long>(q.m), q.deviation, q.zeno_achieved, q.jz_final, q.jz_input,
               q.carried_fidelity, q.max_leak, static_cast<long long>(q.n_max)});
    worst_leak = std::max(worst_leak, q.max_leak);
  }
  const CascadeConfig& c = p.base;
  t.set_metadata("topology", c.topology == Topology::Connected ? "connected" : "zeno-cut");
  t.set_metadata("theta", format_real(c.total_phase));
  t.set_metadata("epsilon", format_real(c.zeno_epsilon));
  t.set_metadata("mode_a", mode_text(c.input.mode_a));
  t.set_metadata("mode_b", mode_text(c.input.mode_b));
  if (c.fresh_a) t.set_metadata("fresh_a", mode_text(*c.fresh_a));
  if (c.topology == Topology::ZenoCut)
    t.set_metadata("discard", c.discard == DiscardMode::TraceOut ? "trace-out" : "post-select-vacuum");
  t.set_metadata("swap_output_ports", c.swap_output_ports ? "true" : "false");
  t.set_metadata("m_star", scan.m_star ? std::to_string(*scan.m_star) : "none");
  t.set_metadata("max_truncation_leak", format_real(worst_leak));
  return t;
}

ResultTable run_fisher_scan(const ScenarioFile& s, const FisherScanParams& p, const RunOptions& opts, Logger& log) {
  struct Point {
    int n;
    FamilyName family;
  };
  std::vector<Point> grid;
  for (FamilyName f : p.families)
    for (int n : p.n_values) grid.push_back({n, f});

  struct Out {
    double fisher, quantum_fisher, fisher_numeric, separable, maximal, tau_qz, delta_tau_cr;
    Representation rep;
  };
  std::vector<Out> out(grid.size());
  parallel_for(grid.size(), opts.threads, [&](std::size_t i) {
    const QubitEnsembleSpec spec = make_spec(grid[i].n, p.omega, grid[i].family, p.branches, p.representation, s.seed);
    const HermitianOperator h = collective_hamiltonian(spec);
    const StateRef state = ensemble_state(spec);
    const Projector proj = zeno_projector(state);
    Out& o = out[i];
    o.rep = spec.representation;
    o.fisher = fisher_quadratic(h, proj, state);
    o.quantum_fisher = std::holds_alternative<QuantumState>(state) ? quantum_fisher_pure(h, state) : kNaN;
    o.fisher_numeric = fisher_two_outcome_numeric(TwoOutcomeLikelihood(h, proj, state), p.tau);
    const FisherBounds b = fisher_bounds(spec);
    o.separable = b.separable;
    o.maximal = b.maximal;
    o.tau_qz = o.fisher > 0.0 ? zeno_time(o.fisher, p.m) : HUGE_VAL;
    o.delta_tau_cr = o.fisher > 0.0 ? cramer_rao_interval(o.fisher, p.m) : HUGE_VAL;
    log.line("point " + std::to_string(i + 1) + "/" + std::to_string(grid.size()) + " N=" +
             std::to_string(grid[i].n) + " family=" + to_string(grid[i].family));
  });

  ResultTable t({{"N", ColumnType::Int},
                 {"family", ColumnType::String},
                 {"representation", ColumnType::String},
                 {"fisher", ColumnType::Real},
                 {"quantum_fisher", ColumnType::Real},
                 {"fisher_numeric", ColumnType::Real},
                 {"fisher_separable_bound", ColumnType::Real},
                 {"fisher_max_bound", ColumnType::Real},
                 {"tau_qz", ColumnType::Real},
                 {"delta_tau_cr", ColumnType::Real}});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Out& o = out[i];
    t.add_row({static_cast<long long>(grid[i].n), std::string(to_string(grid[i].family)),
               std::string(o.rep == Representation::FullTensor ? "FullTensor" : "CollectiveSpin"), o.fisher,
               o.quantum_fisher, o.fisher_numeric, o.separable, o.maximal, o.tau_qz, o.delta_tau_cr});
  }
  t.set_metadata("omega", format_real(p.omega));
  t.set_metadata("m", std::to_string(p.m));
  t.set_metadata("tau", format_real(p.tau));
  return t;
}

ResultTable run_estimate_demo(const ScenarioFile& s, const EstimateDemoParams& p, const RunOptions& opts,
                              Logger& log) {
  const QubitEnsembleSpec spec =
      make_spec(p.n_qubits, p.omega, p.family.family, p.family.branches, p.representation, s.seed);
  const StateRef state = ensemble_state(spec);
  const HermitianOperator h = collective_hamiltonian(spec);
  const TwoOutcomeLikelihood likelihood(h, zeno_projector(state), state);
  const double fisher = fisher_two_outcome_numeric(likelihood, p.tau);
  const double bound = 1.0 / std::sqrt(p.m * fisher);

  const CounterRng streams(s.seed, "estimate-demo");
  std::vector<EstimateResult> results(static_cast<std::size_t>(p.repetitions));
  parallel_for(results.size(), opts.threads, [&](std::size_t i) {
    CounterRng rng = streams.substream(static_cast<std::uint64_t>(i));
    results[i] = sample_and_estimate(likelihood, p.tau, p.m, rng());
    log.line("repetition " + std::to_string(i + 1) + "/" + std::to_string(results.size()));
  });

  ResultTable t({{"repetition", ColumnType::Int},
                 {"tau_true", ColumnType::Real},
                 {"tau_hat", ColumnType::Real},
                 {"stderr", ColumnType::Real},
                 {"frequency_yes", ColumnType::Real},
                 {"clipped", ColumnType::Bool},
                 {"cramer_rao", ColumnType::Real}});
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const EstimateResult& r = results[i];
    t.add_row({static_cast<long long>(i), p.tau, r.tau_hat, r.stderr_estimate, r.frequency_yes, r.clipped, bound});
    sum += r.tau_hat;
    sum2 += r.tau_hat * r.tau_hat;
  }
  const double k = static_cast<double>(results.size());
  const double mean = sum / k;
  t.set_metadata("fisher_at_tau", format_real(fisher));
  t.set_metadata("cramer_rao", format_real(bound));
  t.set_metadata("tau_hat_mean", format_real(mean));
  if (results.size() > 1)
    t.set_metadata("tau_hat_std", format_real(std::sqrt(std::max(0.0, (sum2 - k * mean * mean) / (k - 1.0)))));
  return t;
}

[[noreturn]] void rethrow_with_context(const std::string& context) {
  try {
    throw;
  } catch (const ScenarioError&) {
    throw;
  } catch (const SingularLikelihoodError& e) {
    throw SingularLikelihoodError(context + e.what());
  } catch (const TruncationError& e) {
    throw TruncationError(context + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(context + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(context + e.what());
  } catch (const IoError& e) {
    throw IoError(context + e.what());
  }
}

}  // namespace

ResultTable execute(const ScenarioFile& scenario, const RunOptions& options) {
  Logger log(options.log);
  ResultTable table;
  try {
    switch (scenario.kind) {
      case ScenarioKind::ZenoQubit:
        table = run_zeno_qubit(scenario, std::get<ZenoQubitParams>(scenario.params), options, log);
        break;
      case ScenarioKind::ZenoCustom:
        table = run_zeno_custom(std::get<ZenoCustomParams>(scenario.params), options, log);
        break;
      case ScenarioKind::MzSingle: table = run_mz_single(std::get<MzSingleParams>(scenario.params), log); break;
      case ScenarioKind::MzCascade:
        table = run_mz_cascade(std::get<MzCascadeParams>(scenario.params), options, log);
        break;
      case ScenarioKind::FisherScan:
        table = run_fisher_scan(scenario, std::get<FisherScanParams>(scenario.params), options, log);
        break;
      case ScenarioKind::EstimateDemo:
        table = run_estimate_demo(scenario, std::get<EstimateDemoParams>(scenario.params), options, log);
        break;
    }
  } catch (const Error&) {
    rethrow_with_context(scenario.source + " (" + to_string(scenario.kind) + "): ");
  }

  // Scenario-level fields lead the metadata block.
  ResultTable out(table.columns());
  out.set_metadata("tool", "zenolab");
  out.set_metadata("version", version());
  out.set_metadata("scenario_kind", to_string(scenario.kind));
  out.set_metadata("scenario_hash", hex64(scenario.hash));
  out.set_metadata("seed", std::to_string(scenario.seed));
  if (!options.reproducible) out.set_metadata("timestamp", utc_timestamp());
  for (const auto& [k, v] : table.metadata()) out.set_metadata(k, v);
  for (const auto& row : table.rows()) out.add_row(row);
  return out;
}

}  // namespace zenolab
