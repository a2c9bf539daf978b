#include "zenolab/scenario.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "zenolab/random.hpp"
#include "zenolab/zeno.hpp"

namespace zenolab {

using json = nlohmann::json;

const char* to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::ZenoQubit: return "zeno-qubit";
    case ScenarioKind::ZenoCustom: return "zeno-custom";
    case ScenarioKind::MzSingle: return "mz-single";
    case ScenarioKind::MzCascade: return "mz-cascade";
    case ScenarioKind::FisherScan: return "fisher-scan";
    case ScenarioKind::EstimateDemo: return "estimate-demo";
  }
  return "?";
}

const char* to_string(TableFormat format) {
  return format == TableFormat::Csv ? "csv" : "json";
}

const char* to_string(FamilyName family) {
  switch (family) {
    case FamilyName::Ghz: return "GHZ";
    case FamilyName::ProductPlus: return "ProductPlus";
    case FamilyName::RandomSeparable: return "RandomSeparable";
  }
  return "?";
}

namespace {

std::string join_messages(const std::vector<std::string>& messages) {
  std::ostringstream os;
  os << messages.size() << " validation error" << (messages.size() == 1 ? "" : "s");
  for (const auto& m : messages) os << "\n  " << m;
  return os.str();
}

const char* type_name(const json& v) {
  if (v.is_number_integer() || v.is_number_unsigned()) return "integer";
  if (v.is_number_float()) return "real";
  return v.type_name();
}

// Field access on one JSON object. Every lookup marks the key as known;
// finish() reports whatever is left over.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path, std::vector<std::string>& errors)
      : obj_(obj), path_(std::move(path)), errors_(errors) {}

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key);
  }

  void error(const std::string& key, const std::string& message) { errors_.push_back(where(key) + message); }

  std::string where(const std::string& key) const {
    return (path_.empty() ? key : path_ + "." + key) + ": ";
  }

  const json* get(const std::string& key, bool required) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) {
      if (required) error(key, "missing required field");
      return nullptr;
    }
    return &*it;
  }

  std::optional<long long> integer(const std::string& key, bool required = false) {
    const json* v = get(key, required);
    if (!v) return std::nullopt;
    return as_integer(*v, where(key));
  }

  std::optional<double> real(const std::string& key, bool required = false) {
    const json* v = get(key, required);
    if (!v) return std::nullopt;
    return as_real(*v, where(key));
  }

  std::optional<bool> boolean(const std::string& key, bool required = false) {
    const json* v = get(key, required);
    if (!v) return std::nullopt;
    if (!v->is_boolean()) {
      error(key, std::string("expected boolean, got ") + type_name(*v));
      return std::nullopt;
    }
    return v->get<bool>();
  }

  std::optional<std::string> string(const std::string& key, bool required = false) {
    const json* v = get(key, required);
    if (!v) return std::nullopt;
    if (!v->is_string()) {
      error(key, std::string("expected string, got ") + type_name(*v));
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  std::optional<std::vector<double>> real_list(const std::string& key, bool required = false) {
    const json* v = get(key, required);
    if (!v) return std::nullopt;
    if (!v->is_array() || v->empty()) {
      error(key, "expected a non-empty array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    bool ok = true;
    for (std::size_t i = 0; i < v->size(); ++i) {
      auto x = as_real((*v)[i], item(key, i));
      ok = ok && x.has_value();
      if (x) out.push_back(*x);
    }
    if (!ok) return std::nullopt;
    return out;
  }

  std::optional<std::vector<long long>> integer_list(const std::string& key, bool required = false) {
    const json* v = get(key, required);
    if (!v) return std::nullopt;
    if (!v->is_array() || v->empty()) {
      error(key, "expected a non-empty array of integers");
      return std::nullopt;
    }
    std::vector<long long> out;
    bool ok = true;
    for (std::size_t i = 0; i < v->size(); ++i) {
      auto x = as_integer((*v)[i], item(key, i));
      ok = ok && x.has_value();
      if (x) out.push_back(*x);
    }
    if (!ok) return std::nullopt;
    return out;
  }

  std::string item(const std::string& key, std::size_t i) const {
    return (path_.empty() ? key : path_ + "." + key) + "[" + std::to_string(i) + "]: ";
  }

  void finish() {
    if (!obj_.is_object()) return;
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!seen_.count(it.key()))
        errors_.push_back((path_.empty() ? std::string() : path_ + ": ") + "unknown key \"" + it.key() + "\"");
  }

  std::vector<std::string>& errors() { return errors_; }
  const std::string& path() const { return path_; }

 private:
  std::optional<long long> as_integer(const json& v, const std::string& at) {
    if (v.is_number_integer()) return v.get<long long>();
    if (v.is_number_unsigned()) {
      const auto u = v.get<unsigned long long>();
      if (u <= static_cast<unsigned long long>(std::numeric_limits<long long>::max()))
        return static_cast<long long>(u);
    }
    errors_.push_back(at + "expected integer, got " + type_name(v));
    return std::nullopt;
  }

  std::optional<double> as_real(const json& v, const std::string& at) {
    if (!v.is_number()) {
      errors_.push_back(at + "expected number, got " + type_name(v));
      return std::nullopt;
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
      errors_.push_back(at + "must be finite");
      return std::nullopt;
    }
    return x;
  }

  const json& obj_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

std::optional<Complex> parse_complex(const json& v, const std::string& at, std::vector<std::string>& errors) {
  if (v.is_number()) return Complex(v.get<double>(), 0.0);
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return Complex(v[0].get<double>(), v[1].get<double>());
  errors.push_back(at + "expected a number or a [re, im] pair");
  return std::nullopt;
}

std::optional<ComplexVector> parse_vector(ObjectReader& r, const std::string& key, bool required) {
  const json* v = r.get(key, required);
  if (!v) return std::nullopt;
  if (!v->is_array() || v->empty()) {
    r.error(key, "expected a non-empty array");
    return std::nullopt;
  }
  ComplexVector out(static_cast<Eigen::Index>(v->size()));
  bool ok = true;
  for (std::size_t i = 0; i < v->size(); ++i) {
    auto c = parse_complex((*v)[i], r.item(key, i), r.errors());
    ok = ok && c.has_value();
    if (c) out(static_cast<Eigen::Index>(i)) = *c;
  }
  if (!ok) return std::nullopt;
  return out;
}

std::optional<ComplexMatrix> parse_matrix(ObjectReader& r, const std::string& key, bool required) {
  const json* v = r.get(key, required);
  if (!v) return std::nullopt;
  if (!v->is_array() || v->empty() || !(*v)[0].is_array()) {
    r.error(key, "expected a square array of rows");
    return std::nullopt;
  }
  const std::size_t n = v->size();
  ComplexMatrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  bool ok = true;
  for (std::size_t i = 0; i < n; ++i) {
    const json& row = (*v)[i];
    if (!row.is_array() || row.size() != n) {
      r.errors().push_back(r.item(key, i) + "expected a row of length " + std::to_string(n));
      ok = false;
      continue;
    }
    for (std::size_t j = 0; j < n; ++j) {
      auto c = parse_complex(row[j], r.item(key, i) + "[" + std::to_string(j) + "] ", r.errors());
      ok = ok && c.has_value();
      if (c) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = *c;
    }
  }
  if (!ok) return std::nullopt;
  return out;
}

template <class Enum>
std::optional<Enum> parse_enum(ObjectReader& r, const std::string& key, bool required,
                               std::initializer_list<std::pair<const char*, Enum>> options) {
  auto s = r.string(key, required);
  if (!s) return std::nullopt;
  for (const auto& [name, value] : options)
    if (*s == name) return value;
  std::string msg = "unsupported value \"" + *s + "\" (expected one of";
  for (const auto& [name, value] : options) msg += std::string(" ") + name;
  r.error(key, msg + ")");
  return std::nullopt;
}

std::optional<Representation> parse_representation(ObjectReader& r) {
  return parse_enum<Representation>(
      r, "representation", false,
      {{"FullTensor", Representation::FullTensor}, {"CollectiveSpin", Representation::CollectiveSpin}});
}

std::optional<FamilyName> parse_family_name(ObjectReader& r, const std::string& key, bool required) {
  return parse_enum<FamilyName>(r, key, required,
                                {{"GHZ", FamilyName::Ghz},
                                 {"ProductPlus", FamilyName::ProductPlus},
                                 {"RandomSeparable", FamilyName::RandomSeparable}});
}

void check_m(ObjectReader& r, long long m, const std::string& at) {
  if (m < 1) r.errors().push_back(at + "m must be ≥ 1");
  if (m > std::numeric_limits<int>::max()) r.errors().push_back(at + "m is too large");
}

// Exactly one of `single` / `grid` must be present.
std::vector<int> parse_m_values(ObjectReader& r) {
  const bool one = r.has("m");
  const bool many = r.has("m_grid");
  if (one == many) {
    r.errors().push_back(r.where("m") + "exactly one of \"m\" and \"m_grid\" is required");
    return {};
  }
  std::vector<int> out;
  if (one) {
    if (auto m = r.integer("m", true)) {
      check_m(r, *m, r.where("m"));
      out.push_back(static_cast<int>(*m));
    }
  } else if (auto ms = r.integer_list("m_grid", true)) {
    for (std::size_t i = 0; i < ms->size(); ++i) {
      check_m(r, (*ms)[i], r.item("m_grid", i));
      out.push_back(static_cast<int>((*ms)[i]));
    }
  }
  return out;
}

std::vector<double> parse_positive_grid(ObjectReader& r, std::initializer_list<const char*> keys,
                                        const char* what, std::string* chosen) {
  std::vector<const char*> present;
  for (const char* k : keys)
    if (r.has(k)) present.push_back(k);
  if (present.size() != 1) {
    std::string names;
    for (const char* k : keys) names += std::string(names.empty() ? "" : ", ") + "\"" + k + "\"";
    r.errors().push_back(r.where(*keys.begin()) + "exactly one of " + names + " is required");
    return {};
  }
  const std::string key = present.front();
  if (chosen) *chosen = key;
  std::vector<double> out;
  if (key.find("grid") == std::string::npos) {
    if (auto x = r.real(key, true)) out.push_back(*x);
  } else if (auto xs = r.real_list(key, true)) {
    out = *xs;
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    if (!(out[i] > 0.0)) r.errors().push_back(r.where(key) + what + " must be > 0");
  return out;
}

std::vector<double> parse_theta(ObjectReader& r) {
  const bool one = r.has("theta");
  const bool many = r.has("theta_grid");
  if (one == many) {
    r.errors().push_back(r.where("theta") + "exactly one of \"theta\" and \"theta_grid\" is required");
    return {};
  }
  if (one) {
    auto x = r.real("theta", true);
    return x ? std::vector<double>{*x} : std::vector<double>{};
  }
  auto xs = r.real_list("theta_grid", true);
  return xs ? *xs : std::vector<double>{};
}

std::optional<ModeSpec> parse_mode(ObjectReader& parent, const std::string& key, bool required) {
  const json* v = parent.get(key, required);
  if (!v) return std::nullopt;
  if (!v->is_object()) {
    parent.error(key, std::string("expected object, got ") + type_name(*v));
    return std::nullopt;
  }
  ObjectReader r(*v, parent.path().empty() ? key : parent.path() + "." + key, parent.errors());
  std::optional<ModeSpec> out;
  auto kind = parse_enum<ModeKind>(
      r, "kind", true, {{"vacuum", ModeKind::Vacuum}, {"fock", ModeKind::Fock}, {"coherent", ModeKind::Coherent}});
  if (kind == ModeKind::Vacuum) {
    out = ModeSpec::vacuum();
  } else if (kind == ModeKind::Fock) {
    if (auto n = r.integer("n", true)) {
      if (*n < 0 || *n > 100000)
        r.error("n", "Fock number must be in [0, 100000]");
      else
        out = ModeSpec::fock(static_cast<int>(*n));
    }
  } else if (kind == ModeKind::Coherent) {
    if (const json* a = r.get("alpha", true))
      if (auto c = parse_complex(*a, r.where("alpha"), r.errors())) out = ModeSpec::coherent(*c);
  }
  r.finish();
  return out;
}

std::optional<int> parse_n_max(ObjectReader& r) {
  auto n = r.integer("n_max");
  if (!n) return 0;
  if (*n < 0 || *n > 400) {
    r.error("n_max", "n_max must be in [0, 400] (0 sizes automatically)");
    return std::nullopt;
  }
  return static_cast<int>(*n);
}

void check_qubit_count(ObjectReader& r, long long n, std::optional<Representation> rep, const std::string& at) {
  if (n < 1) r.errors().push_back(at + "N must be ≥ 1");
  if (n > 100000) r.errors().push_back(at + "N is too large");
  if (rep == Representation::FullTensor && n > kMaxFullTensorQubits)
    r.errors().push_back(at + "FullTensor representation supports N ≤ " + std::to_string(kMaxFullTensorQubits));
}

double parse_omega(ObjectReader& r) {
  auto w = r.real("omega");
  if (!w) return 1.0;
  if (!(*w > 0.0)) r.error("omega", "omega must be > 0");
  return *w;
}

QubitFamilyParams parse_family(ObjectReader& r, std::optional<Representation> rep) {
  QubitFamilyParams f;
  if (auto name = parse_family_name(r, "family", true)) f.family = *name;
  if (auto b = r.integer("branches")) {
    if (*b < 1 || *b > 64) r.error("branches", "branches must be in [1, 64]");
    f.branches = static_cast<int>(*b);
  }
  if (f.family == FamilyName::RandomSeparable && rep == Representation::CollectiveSpin)
    r.error("family", "RandomSeparable requires the FullTensor representation");
  return f;
}

ZenoQubitParams parse_zeno_qubit(ObjectReader& r) {
  ZenoQubitParams p;
  p.representation = parse_representation(r);
  if (auto n = r.integer("N", true)) {
    check_qubit_count(r, *n, p.representation, r.where("N"));
    p.n_qubits = static_cast<int>(*n);
  }
  p.omega = parse_omega(r);
  p.family = parse_family(r, p.representation);
  if (p.family.family == FamilyName::RandomSeparable && !p.representation && p.n_qubits > kMaxFullTensorQubits)
    r.error("N", "RandomSeparable requires N ≤ " + std::to_string(kMaxFullTensorQubits));
  std::string key;
  p.t_values = parse_positive_grid(r, {"t", "t_grid", "tau_grid"}, "time", &key);
  p.grid_is_tau = key == "tau_grid";
  p.m_values = parse_m_values(r);
  return p;
}

ZenoCustomParams parse_zeno_custom(ObjectReader& r) {
  ZenoCustomParams p;
  if (auto h = parse_matrix(r, "hamiltonian", true)) p.hamiltonian = *h;
  p.projector = parse_matrix(r, "projector", false);
  const bool pure = r.has("initial_state");
  const bool mixed = r.has("initial_density");
  if (pure == mixed) {
    r.errors().push_back(r.where("initial_state") +
                         "exactly one of \"initial_state\" and \"initial_density\" is required");
  } else if (pure) {
    p.initial_state = parse_vector(r, "initial_state", true);
  } else {
    p.initial_density = parse_matrix(r, "initial_density", true);
  }
  if (mixed && !p.projector && !pure) r.error("projector", "required with \"initial_density\"");
  const Eigen::Index d = p.hamiltonian.rows();
  if (d > 0) {
    if (p.projector && p.projector->rows() != d) r.error("projector", "dimension differs from the Hamiltonian");
    if (p.initial_state && p.initial_state->size() != d)
      r.error("initial_state", "dimension differs from the Hamiltonian");
    if (p.initial_density && p.initial_density->rows() != d)
      r.error("initial_density", "dimension differs from the Hamiltonian");
  }
  std::string key;
  p.t_values = parse_positive_grid(r, {"t", "t_grid", "tau_grid"}, "time", &key);
  p.grid_is_tau = key == "tau_grid";
  p.m_values = parse_m_values(r);
  return p;
}

MzSingleParams parse_mz_single(ObjectReader& r) {
  MzSingleParams p;
  if (auto a = parse_mode(r, "mode_a", true)) p.input.mode_a = *a;
  if (auto b = parse_mode(r, "mode_b", true)) p.input.mode_b = *b;
  if (auto n = parse_n_max(r)) p.input.n_max = *n;
  p.theta_values = parse_theta(r);
  return p;
}

MzCascadeParams parse_mz_cascade(ObjectReader& r) {
  MzCascadeParams p;
  CascadeConfig& c = p.base;
  if (auto t = parse_enum<Topology>(r, "topology", true,
                                    {{"connected", Topology::Connected}, {"zeno-cut", Topology::ZenoCut}}))
    c.topology = *t;
  if (auto th = r.real("theta", true)) c.total_phase = *th;
  if (auto a = parse_mode(r, "mode_a", true)) c.input.mode_a = *a;
  if (auto b = parse_mode(r, "mode_b", true)) c.input.mode_b = *b;
  c.fresh_a = parse_mode(r, "fresh_a", false);
  if (c.topology == Topology::ZenoCut && !r.has("fresh_a"))
    r.error("fresh_a", "required for topology \"zeno-cut\"");
  if (c.topology == Topology::Connected && c.fresh_a) r.error("fresh_a", "only valid for topology \"zeno-cut\"");
  if (auto n = parse_n_max(r)) c.n_max = *n;
  if (auto e = r.real("epsilon")) {
    if (!(*e > 0.0)) r.error("epsilon", "epsilon must be > 0");
    c.zeno_epsilon = *e;
  }
  if (auto d = parse_enum<DiscardMode>(
          r, "discard", false,
          {{"trace-out", DiscardMode::TraceOut}, {"post-select-vacuum", DiscardMode::PostSelectVacuum}})) {
    if (c.topology == Topology::Connected && *d != DiscardMode::TraceOut)
      r.error("discard", "only valid for topology \"zeno-cut\"");
    c.discard = *d;
  }
  if (auto s = r.boolean("swap_output_ports")) c.swap_output_ports = *s;
  p.m_values = parse_m_values(r);
  for (std::size_t i = 1; i < p.m_values.size(); ++i)
    if (p.m_values[i] <= p.m_values[i - 1]) {
      r.error("m_grid", "values must be strictly ascending");
      break;
    }
  if (auto f = r.boolean("refine")) p.refine = *f;
  return p;
}

FisherScanParams parse_fisher_scan(ObjectReader& r) {
  FisherScanParams p;
  p.representation = parse_representation(r);
  const bool one = r.has("N");
  const bool many = r.has("N_grid");
  if (one == many) {
    r.errors().push_back(r.where("N") + "exactly one of \"N\" and \"N_grid\" is required");
  } else {
    std::vector<long long> ns;
    if (one) {
      if (auto n = r.integer("N", true)) ns.push_back(*n);
    } else if (auto list = r.integer_list("N_grid", true)) {
      ns = *list;
    }
    for (std::size_t i = 0; i < ns.size(); ++i) {
      check_qubit_count(r, ns[i], p.representation, one ? r.where("N") : r.item("N_grid", i));
      p.n_values.push_back(static_cast<int>(ns[i]));
    }
  }
  if (const json* fams = r.get("families", true)) {
    if (!fams->is_array() || fams->empty()) {
      r.error("families", "expected a non-empty array of family names");
    } else {
      for (std::size_t i = 0; i < fams->size(); ++i) {
        const json& f = (*fams)[i];
        const std::string name = f.is_string() ? f.get<std::string>() : std::string();
        if (name == "GHZ")
          p.families.push_back(FamilyName::Ghz);
        else if (name == "ProductPlus")
          p.families.push_back(FamilyName::ProductPlus);
        else if (name == "RandomSeparable")
          p.families.push_back(FamilyName::RandomSeparable);
        else
          r.errors().push_back(r.item("families", i) + "expected one of GHZ ProductPlus RandomSeparable");
      }
    }
  }
  for (FamilyName f : p.families) {
    if (f != FamilyName::RandomSeparable) continue;
    if (p.representation == Representation::CollectiveSpin)
      r.error("families", "RandomSeparable requires the FullTensor representation");
    for (int n : p.n_values)
      if (n > kMaxFullTensorQubits) {
        r.error("families", "RandomSeparable requires N ≤ " + std::to_string(kMaxFullTensorQubits));
        break;
      }
  }
  p.omega = parse_omega(r);
  if (auto m = r.integer("m")) {
    check_m(r, *m, r.where("m"));
    p.m = static_cast<int>(*m);
  }
  if (auto tau = r.real("tau")) {
    if (!(*tau >= kTauMin)) r.error("tau", "tau must be ≥ 1e-6");
    p.tau = *tau;
  }
  if (auto b = r.integer("branches")) {
    if (*b < 1 || *b > 64) r.error("branches", "branches must be in [1, 64]");
    p.branches = static_cast<int>(*b);
  }
  return p;
}

EstimateDemoParams parse_estimate_demo(ObjectReader& r) {
  EstimateDemoParams p;
  p.representation = parse_representation(r);
  if (auto n = r.integer("N", true)) {
    check_qubit_count(r, *n, p.representation, r.where("N"));
    p.n_qubits = static_cast<int>(*n);
  }
  p.omega = parse_omega(r);
  p.family = parse_family(r, p.representation);
  if (auto tau = r.real("tau", true)) {
    if (!(*tau >= kTauMin)) r.error("tau", "tau must be ≥ 1e-6");
    p.tau = *tau;
  }
  if (auto m = r.integer("m", true)) {
    check_m(r, *m, r.where("m"));
    p.m = static_cast<int>(*m);
  }
  if (auto k = r.integer("repetitions")) {
    if (*k < 1 || *k > 10000000) r.error("repetitions", "repetitions must be in [1, 1e7]");
    p.repetitions = static_cast<int>(*k);
  }
  return p;
}

}  // namespace

ScenarioError::ScenarioError(std::vector<std::string> messages)
    : ValidationError(join_messages(messages)), messages_(std::move(messages)) {}

ScenarioFile parse_scenario_text(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError({source + ": not valid JSON: " + e.what()});
  }
  if (!doc.is_object()) throw ScenarioError({source + ": top level must be a JSON object"});

  std::vector<std::string> errors;
  ObjectReader top(doc, "", errors);
  ScenarioFile out;
  out.source = source;
  out.hash = fnv1a64(doc.dump());

  if (auto v = top.integer("schema_version", true)) {
    if (*v != kSchemaVersion)
      top.error("schema_version", "unsupported schema_version " + std::to_string(*v) + " (expected " +
                                      std::to_string(kSchemaVersion) + ")");
    out.schema_version = static_cast<int>(*v);
  }
  auto kind = parse_enum<ScenarioKind>(top, "kind", true,
                                       {{"zeno-qubit", ScenarioKind::ZenoQubit},
                                        {"zeno-custom", ScenarioKind::ZenoCustom},
                                        {"mz-single", ScenarioKind::MzSingle},
                                        {"mz-cascade", ScenarioKind::MzCascade},
                                        {"fisher-scan", ScenarioKind::FisherScan},
                                        {"estimate-demo", ScenarioKind::EstimateDemo}});
  if (kind) out.kind = *kind;

  if (const json* seed = top.get("seed", false)) {
    if (seed->is_number_unsigned() || (seed->is_number_integer() && seed->get<long long>() >= 0))
      out.seed = seed->get<std::uint64_t>();
    else
      top.error("seed", "expected a non-negative integer");
  }

  if (const json* o = top.get("output", false)) {
    if (!o->is_object()) {
      top.error("output", "expected object");
    } else {
      ObjectReader r(*o, "output", errors);
      out.output.format =
          parse_enum<TableFormat>(r, "format", false, {{"csv", TableFormat::Csv}, {"json", TableFormat::Json}});
      out.output.path = r.string("path");
      r.finish();
    }
  }

  const json* params = top.get("parameters", true);
  if (params && !params->is_object()) {
    top.error("parameters", "expected object");
  } else if (params && kind) {
    ObjectReader r(*params, "parameters", errors);
    switch (*kind) {
      case ScenarioKind::ZenoQubit: out.params = parse_zeno_qubit(r); break;
      case ScenarioKind::ZenoCustom: out.params = parse_zeno_custom(r); break;
      case ScenarioKind::MzSingle: out.params = parse_mz_single(r); break;
      case ScenarioKind::MzCascade: out.params = parse_mz_cascade(r); break;
      case ScenarioKind::FisherScan: out.params = parse_fisher_scan(r); break;
      case ScenarioKind::EstimateDemo: out.params = parse_estimate_demo(r); break;
    }
    r.finish();
  }
  top.finish();

  if (!errors.empty()) {
    for (auto& e : errors) e = source + ": " + e;
    throw ScenarioError(std::move(errors));
  }
  return out;
}

ScenarioFile parse_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading scenario file " + path.string());
  return parse_scenario_text(buf.str(), path.string());
}

}  // namespace zenolab
