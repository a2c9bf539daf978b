#include "zenolab/cascade.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "zenolab/errors.hpp"

namespace zenolab {

namespace {

double mode_alpha(const ModeSpec& m) {
  return m.kind == ModeKind::Coherent ? std::abs(m.alpha) : 0.0;
}

std::optional<int> fock_number(const ModeSpec& m) {
  switch (m.kind) {
    case ModeKind::Vacuum: return 0;
    case ModeKind::Fock: return m.n;
    case ModeKind::Coherent: return std::nullopt;
  }
  return std::nullopt;
}

// One stage of the cut cascade with a fixed injected mode-a state.
struct StageChannel {
  ComplexVector psi_a;
  ComplexMatrix phi;   // column y: U |psi_a, y>
  ComplexMatrix m_jz;  // M(y', y) = <phi_y'| J_z |phi_y>
  ComplexMatrix m_jx;
  std::optional<int> fock;
};

StageChannel build_channel(const TwoModeFockSpace& space, const ModeSpec& mode_a, double phase) {
  const int n = space.n_max();
  const Eigen::Index width = n + 1;
  StageChannel ch;
  ch.psi_a = mode_state(mode_a, n).amplitudes();
  ch.fock = fock_number(mode_a);

  ComplexMatrix block = ComplexMatrix::Zero(space.dim(), width);
  for (int na = 0; na <= n; ++na) {
    if (ch.psi_a(na) == 0.0) continue;
    for (int y = 0; y <= n; ++y) block(space.index(na, y), y) = ch.psi_a(na);
  }
  ch.phi = space.rotate(block, phase);

  ComplexMatrix jz_phi = ch.phi;
  ComplexMatrix jx_phi(space.dim(), width);
  for (int na = 0; na <= n; ++na)
    for (int nb = 0; nb <= n; ++nb) jz_phi.row(space.index(na, nb)) *= 0.5 * (na - nb);
  for (Eigen::Index y = 0; y < width; ++y) jx_phi.col(y) = space.apply_jx(ch.phi.col(y));
  ch.m_jz = ch.phi.adjoint() * jz_phi;
  ch.m_jx = ch.phi.adjoint() * jx_phi;
  return ch;
}

// Mass of |psi_a><psi_a| (x) sigma in shells above `limit`.
double product_leak(const ComplexVector& psi_a, const ComplexMatrix& sigma, int limit) {
  const int n = static_cast<int>(psi_a.size()) - 1;
  double leak = 0.0;
  for (int na = 0; na <= n; ++na) {
    const double pa = std::norm(psi_a(na));
    if (pa == 0.0) continue;
    for (int y = std::max(0, limit - na + 1); y <= n; ++y) leak += pa * sigma(y, y).real();
  }
  return leak;
}

// sum_d K_d sigma K_d^dag over the discarded port's number d; only d = 0
// when post-selecting.
ComplexMatrix apply_channel(const StageChannel& ch, const ComplexMatrix& sigma, bool vacuum_only, bool swap) {
  const Eigen::Index w = sigma.rows();
  const int n = static_cast<int>(w) - 1;
  const int last_d = vacuum_only ? 0 : n;
  auto row = [&](int d, int x) { return swap ? x * w + d : d * w + x; };
  ComplexMatrix out = ComplexMatrix::Zero(w, w);
  if (ch.fock) {
    // Number conservation: K_d(x, y) is nonzero only on x = y + N - d.
    for (int d = 0; d <= last_d; ++d) {
      const int s = *ch.fock - d;
      const int x0 = std::max(0, s);
      const int x1 = std::min(n, n + s);
      if (x1 < x0) continue;
      const Eigen::Index len = x1 - x0 + 1;
      ComplexVector k(len);
      for (Eigen::Index i = 0; i < len; ++i) k(i) = ch.phi(row(d, x0 + static_cast<int>(i)), x0 + i - s);
      out.block(x0, x0, len, len) += (k * k.adjoint()).cwiseProduct(sigma.block(x0 - s, x0 - s, len, len));
    }
    return out;
  }
  ComplexMatrix k(w, w);
  for (int d = 0; d <= last_d; ++d) {
    for (int x = 0; x <= n; ++x) k.row(x) = ch.phi.row(row(d, x));
    out.noalias() += k * sigma * k.adjoint();
  }
  return out;
}

struct StageLeak {
  double leak;
  int stage;
};

constexpr int kMaxAutoNMax = 240;

double mode_b_fidelity(const TwoModeFockSpace& space, const ComplexVector& psi, const ComplexVector& psi_b) {
  const int n = space.n_max();
  double f = 0.0;
  for (int na = 0; na <= n; ++na) f += std::norm(psi_b.dot(psi.segment(space.index(na, 0), n + 1)));
  return f;
}

CascadeReport finish(CascadeReport r, double epsilon) {
  r.jz_final = r.per_stage.empty() ? r.jz_input : r.per_stage.back().jz;
  r.deviation = relative_deviation(r.jz_final, r.jz_input);
  r.zeno_achieved = r.deviation < epsilon;
  return r;
}

}  // namespace

void CascadeConfig::validate() const {
  if (stages < 1) throw ValidationError("stages must be >= 1");
  if (!std::isfinite(total_phase)) throw ValidationError("total_phase must be finite");
  if (!(zeno_epsilon > 0.0)) throw ValidationError("zeno_epsilon must be > 0");
  if (n_max < 0) throw ValidationError("n_max must be >= 0");
  if (topology == Topology::ZenoCut && !fresh_a) throw ValidationError("ZenoCut topology requires fresh_a");
  if (topology == Topology::Connected && fresh_a) throw ValidationError("fresh_a is only valid for ZenoCut");
  if (topology == Topology::Connected && discard != DiscardMode::TraceOut)
    throw ValidationError("discard mode is only valid for ZenoCut");
  for (const ModeSpec* m : {&input.mode_a, &input.mode_b, fresh_a ? &*fresh_a : nullptr}) {
    if (m && m->kind == ModeKind::Fock && m->n < 0) throw ValidationError("Fock number must be >= 0");
  }
}

int CascadeConfig::margin() const {
  double a = input.max_alpha();
  if (fresh_a) a = std::max(a, mode_alpha(*fresh_a));
  return truncation_margin(a);
}

int CascadeConfig::resolved_n_max() const {
  if (n_max > 0) return n_max;
  if (input.n_max > 0) return input.n_max;
  int n = default_n_max(input);
  if (fresh_a) n = std::max(n, fresh_a->support() + input.mode_b.support() + margin());
  return n;
}

double relative_deviation(double jz_final, double jz_input) {
  return std::abs(jz_final - jz_input) / std::max(std::abs(jz_input), kDeviationFloor);
}

CascadeReport run_connected(const CascadeConfig& config) {
  config.validate();
  if (config.topology != Topology::Connected) throw ValidationError("run_connected requires Connected topology");
  CascadeReport r;
  r.n_max = config.resolved_n_max();
  const TwoModeFockSpace space(r.n_max);
  OpticalInputSpec input = config.input;
  input.n_max = r.n_max;
  const ComplexVector psi_b = mode_state(input.mode_b, r.n_max).amplitudes();
  QuantumState psi = space.input_state(input);
  r.jz_input = space.mean_jz(psi.amplitudes());
  const int margin = config.margin();
  const double phase = config.stage_phase();

  for (int k = 1; k <= config.stages; ++k) {
    StageRecord s;
    s.stage = k;
    s.leak = space.shell_mass_above(psi.amplitudes(), r.n_max - margin);
    psi = mz_unitary_apply(space, phase, psi, margin);
    s.jz = space.mean_jz(psi.amplitudes());
    s.jx = space.mean_jx(psi.amplitudes());
    s.carried_trace = psi.amplitudes().squaredNorm();
    r.per_stage.push_back(s);
  }
  r.carried_fidelity = mode_b_fidelity(space, psi.amplitudes(), psi_b);
  return finish(std::move(r), config.zeno_epsilon);
}

namespace {

CascadeReport zeno_cut_at(const CascadeConfig& config, int n) {
  CascadeReport r;
  r.n_max = n;
  const TwoModeFockSpace space(n);
  const int limit = n - config.margin();
  const double phase = config.stage_phase();
  const bool vacuum_only = config.discard == DiscardMode::PostSelectVacuum;

  const ComplexVector psi_b = mode_state(config.input.mode_b, n).amplitudes();
  const StageChannel first = build_channel(space, config.input.mode_a, phase);
  std::optional<StageChannel> fresh;
  if (config.stages > 1) fresh = build_channel(space, *config.fresh_a, phase);

  r.jz_input = space.mean_jz(tensor(first.psi_a, psi_b));
  ComplexMatrix sigma = psi_b * psi_b.adjoint();

  for (int k = 1; k <= config.stages; ++k) {
    const StageChannel& ch = k == 1 ? first : *fresh;
    StageRecord s;
    s.stage = k;
    s.leak = product_leak(ch.psi_a, sigma, limit);
    if (s.leak > kLeakTol) throw StageLeak{s.leak, k};
    s.jz = (sigma * ch.m_jz).trace().real();
    s.jx = (sigma * ch.m_jx).trace().real();

    ComplexMatrix next = apply_channel(ch, sigma, vacuum_only, config.swap_output_ports);
    if (vacuum_only) {
      const double p = next.trace().real();
      if (!(p > 0.0)) {
        std::ostringstream os;
        os << "vacuum post-selection has zero probability at stage " << k;
        throw NumericalError(os.str());
      }
      next /= p;
      s.success_probability = p;
      r.success_probability *= p;
    }
    sigma = 0.5 * (next + next.adjoint());
    s.carried_trace = sigma.trace().real();
    s.carried_min_eigenvalue = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(sigma, Eigen::EigenvaluesOnly)
                                   .eigenvalues()
                                   .minCoeff();
    if (std::abs(s.carried_trace - 1.0) > kCarriedTraceTol || s.carried_min_eigenvalue < -tol::kPsdClamp) {
      std::ostringstream os;
      os << "carried state invalid at stage " << k << ": trace " << s.carried_trace << ", min eigenvalue "
         << s.carried_min_eigenvalue;
      throw NumericalError(os.str());
    }
    r.per_stage.push_back(s);
  }
  r.carried_fidelity = psi_b.dot(sigma * psi_b).real();
  r.carried_state = std::move(sigma);
  return finish(std::move(r), config.zeno_epsilon);
}

}  // namespace

CascadeReport run_zeno_cut(const CascadeConfig& config) {
  config.validate();
  if (config.topology != Topology::ZenoCut) throw ValidationError("run_zeno_cut requires ZenoCut topology");
  const bool automatic = config.n_max == 0 && config.input.n_max == 0;
  const int step = std::max({4, config.fresh_a->support(), config.margin() / 2});
  for (int n = config.resolved_n_max();; n += step) {
    try {
      return zeno_cut_at(config, n);
    } catch (const StageLeak& e) {
      if (!automatic || n + step > kMaxAutoNMax) {
        std::ostringstream os;
        os << "truncation leak " << e.leak << " at stage " << e.stage << " of " << config.stages
           << " (n_max = " << n << ")";
        throw TruncationError(os.str());
      }
    }
  }
}

CascadeReport run_cascade(const CascadeConfig& config) {
  return config.topology == Topology::Connected ? run_connected(config) : run_zeno_cut(config);
}

ScanResult zeno_threshold_scan(const CascadeConfig& base, const std::vector<int>& m_values, int threads) {
  for (std::size_t i = 0; i < m_values.size(); ++i) {
    if (m_values[i] < 1) throw ValidationError("m must be >= 1");
    if (i > 0 && m_values[i] <= m_values[i - 1]) throw ValidationError("m values must be strictly ascending");
  }
  ScanResult out;
  out.points.resize(m_values.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < m_values.size(); i = next++) {
      try {
        CascadeConfig c = base;
        c.stages = m_values[i];
        const CascadeReport r = run_cascade(c);
        ScanPoint& p = out.points[i];
        p.m = m_values[i];
        p.deviation = r.deviation;
        p.zeno_achieved = r.zeno_achieved;
        p.jz_final = r.jz_final;
        p.jz_input = r.jz_input;
        p.carried_fidelity = r.carried_fidelity;
        p.n_max = r.n_max;
        for (const StageRecord& s : r.per_stage) p.max_leak = std::max(p.max_leak, s.leak);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const int workers = std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(m_values.size(), 1)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (const ScanPoint& p : out.points)
    if (p.zeno_achieved) {
      out.m_star = p.m;
      break;
    }
  return out;
}

std::vector<int> default_scan_grid(int max_m) {
  if (max_m < 1) throw ValidationError("max_m must be >= 1");
  std::vector<int> g;
  for (int m = 1; m <= max_m; m *= 2) g.push_back(m);
  if (g.back() != max_m) g.push_back(max_m);
  return g;
}

ScanResult refine_zeno_threshold(const CascadeConfig& base, ScanResult coarse) {
  auto it = std::find_if(coarse.points.begin(), coarse.points.end(),
                         [](const ScanPoint& p) { return p.zeno_achieved; });
  if (it == coarse.points.begin() || it == coarse.points.end()) return coarse;
  int lo = std::prev(it)->m;
  int hi = it->m;
  std::vector<ScanPoint> extra;
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    const ScanPoint p = zeno_threshold_scan(base, {mid}).points.front();
    extra.push_back(p);
    (p.zeno_achieved ? hi : lo) = mid;
  }
  coarse.points.insert(coarse.points.end(), extra.begin(), extra.end());
  std::sort(coarse.points.begin(), coarse.points.end(),
            [](const ScanPoint& a, const ScanPoint& b) { return a.m < b.m; });
  coarse.m_star = hi;
  return coarse;
}

ScanResult find_zeno_threshold(const CascadeConfig& base, int max_m, int threads) {
  return refine_zeno_threshold(base, zeno_threshold_scan(base, default_scan_grid(max_m), threads));
}

}  // namespace zenolab
