#include "sleigh/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

namespace sleigh {

namespace {

const std::string kDefaultToml = R"(# Published parameter set: m=2, J=1, l=1, smoothed Coulomb friction with
# epsilon = 0.1, L = diag(2, 0.5, 0.8), k = 0.1, D_hat = diag(4, 8), 100 s.
seed = 0

[model]
mass = 2.0
inertia = 1.0
offset = 1.0

[model.damping]
kind = "coulomb"   # zero | constant (d1, d2) | coulomb (epsilon)
epsilon = 0.1

[controller]
gains = [2.0, 0.5, 0.8]
k = 0.1
injected_damping = [[4.0, 0.0], [0.0, 8.0]]
form = "velocity"  # velocity | momentum

[integrator]
rel_tol = 1e-9
abs_tol = 1e-12
dt_init = 1e-3
dt_min = 1e-12
dt_max = 0.1
t_final = 100.0
stop_tol = 0.0          # 0 disables early stopping
record_interval = 0.02
heading_guard = 1e-3    # initial |theta| must exceed this

[outputs]
directory = "out"
formats = ["csv", "json"]

[verification]
matching_samples = 1000
residual_samples = 100000
schwarz_functions = 1000

# theta = pi/8
[[scenarios]]
name = "s1_m3_m2_pi8"
state = [-3.0, -2.0, 0.39269908169872414, 0.0, 0.0]

# mirror image of s1 across the x axis
[[scenarios]]
name = "s2_m3_p2_mpi8"
state = [-3.0, 2.0, -0.39269908169872414, 0.0, 0.0]

# theta = 3 pi/4
[[scenarios]]
name = "s3_m3_p2_3pi4"
state = [-3.0, 2.0, 2.3561944901923448, 0.0, 0.0]

# theta = -pi/2
[[scenarios]]
name = "s4_p2_m3_mpi2"
state = [2.0, -3.0, -1.5707963267948966, 0.0, 0.0]
)";

constexpr const char* kNameChars =
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-";

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
  throw ConfigError(field + ": " + msg);
}

void reject_unknown(const toml::table& t, const std::string& prefix,
                    const std::set<std::string>& allowed) {
  for (const auto& [key, node] : t) {
    const std::string k(key.str());
    if (!allowed.count(k)) fail(prefix.empty() ? k : prefix + "." + k, "unknown key");
  }
}

const toml::table* sub_table(const toml::table& root, const std::string& key, bool required) {
  const toml::node* n = root.get(key);
  if (!n) {
    if (required) fail(key, "missing table");
    return nullptr;
  }
  if (!n->is_table()) fail(key, "expected a table");
  return n->as_table();
}

double get_number(const toml::table& t, const std::string& prefix, const std::string& key,
                  std::optional<double> fallback = std::nullopt) {
  const toml::node* n = t.get(key);
  const std::string field = prefix + "." + key;
  if (!n) {
    if (fallback) return *fallback;
    fail(field, "missing value");
  }
  if (!n->is_number()) fail(field, "expected a number");
  return *n->value<double>();
}

std::string get_string(const toml::table& t, const std::string& prefix, const std::string& key,
                       std::optional<std::string> fallback = std::nullopt) {
  const toml::node* n = t.get(key);
  const std::string field = prefix + "." + key;
  if (!n) {
    if (fallback) return *fallback;
    fail(field, "missing value");
  }
  if (!n->is_string()) fail(field, "expected a string");
  return *n->value<std::string>();
}

std::vector<double> get_numbers(const toml::node& n, const std::string& field, std::size_t count) {
  const toml::array* arr = n.as_array();
  if (!arr || arr->size() != count) fail(field, "expected an array of " + std::to_string(count) + " numbers");
  std::vector<double> out;
  for (const auto& e : *arr) {
    if (!e.is_number()) fail(field, "expected an array of numbers");
    out.push_back(*e.value<double>());
  }
  return out;
}

std::size_t get_count(const toml::table& t, const std::string& prefix, const std::string& key,
                      std::size_t fallback) {
  const toml::node* n = t.get(key);
  if (!n) return fallback;
  if (!n->is_integer() || *n->value<std::int64_t>() < 0) {
    fail(prefix + "." + key, "expected a non-negative integer");
  }
  return static_cast<std::size_t>(*n->value<std::int64_t>());
}

DampingModel parse_damping(const toml::table* t) {
  if (!t) return ZeroDamping{};
  const std::string kind = get_string(*t, "model.damping", "kind");
  if (kind == "zero") {
    reject_unknown(*t, "model.damping", {"kind"});
    return ZeroDamping{};
  }
  if (kind == "constant") {
    reject_unknown(*t, "model.damping", {"kind", "d1", "d2"});
    return ConstantDamping{get_number(*t, "model.damping", "d1"), get_number(*t, "model.damping", "d2")};
  }
  if (kind == "coulomb") {
    reject_unknown(*t, "model.damping", {"kind", "epsilon"});
    return CoulombDamping{get_number(*t, "model.damping", "epsilon")};
  }
  fail("model.damping.kind", "expected \"zero\", \"constant\" or \"coulomb\", got \"" + kind + "\"");
}

ModelParams parse_model(const toml::table& root) {
  const toml::table& t = *sub_table(root, "model", true);
  reject_unknown(t, "model", {"mass", "inertia", "offset", "damping"});
  try {
    return ModelParams(get_number(t, "model", "mass"), get_number(t, "model", "inertia"),
                       get_number(t, "model", "offset"), parse_damping(sub_table(t, "damping", false)));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

ControllerParams parse_controller(const toml::table& root) {
  const toml::table& t = *sub_table(root, "controller", true);
  reject_unknown(t, "controller", {"gains", "k", "injected_damping", "form"});
  const toml::node* gains_node = t.get("gains");
  if (!gains_node) fail("controller.gains", "missing value");
  const auto g = get_numbers(*gains_node, "controller.gains", 3);

  const toml::node* dh = t.get("injected_damping");
  if (!dh || !dh->is_array() || dh->as_array()->size() != 2) {
    fail("controller.injected_damping", "expected a 2x2 array of numbers");
  }
  Mat2 d_hat;
  for (std::size_t r = 0; r < 2; ++r) {
    const auto row = get_numbers(*dh->as_array()->get(r), "controller.injected_damping", 2);
    d_hat(r, 0) = row[0];
    d_hat(r, 1) = row[1];
  }
  try {
    return ControllerParams(Vec3(g[0], g[1], g[2]), get_number(t, "controller", "k"), d_hat,
                            parse_control_form(get_string(t, "controller", "form", "velocity")));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

IntegratorConfig parse_integrator(const toml::table& root) {
  IntegratorConfig cfg;
  const toml::table* t = sub_table(root, "integrator", false);
  if (t) {
    reject_unknown(*t, "integrator",
                   {"rel_tol", "abs_tol", "dt_init", "dt_min", "dt_max", "t_final", "stop_tol",
                    "record_interval", "heading_guard"});
    const std::string p = "integrator";
    cfg.rel_tol = get_number(*t, p, "rel_tol", cfg.rel_tol);
    cfg.abs_tol = get_number(*t, p, "abs_tol", cfg.abs_tol);
    cfg.dt_init = get_number(*t, p, "dt_init", cfg.dt_init);
    cfg.dt_min = get_number(*t, p, "dt_min", cfg.dt_min);
    cfg.dt_max = get_number(*t, p, "dt_max", cfg.dt_max);
    cfg.t_final = get_number(*t, p, "t_final", cfg.t_final);
    cfg.stop_tol = get_number(*t, p, "stop_tol", cfg.stop_tol);
    cfg.record_interval = get_number(*t, p, "record_interval", cfg.record_interval);
    cfg.heading_guard = get_number(*t, p, "heading_guard", cfg.heading_guard);
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

std::vector<Scenario> parse_scenarios(const toml::table& root) {
  const toml::node* n = root.get("scenarios");
  if (!n) fail("scenarios", "at least one [[scenarios]] entry is required");
  const toml::array* arr = n->as_array();
  if (!arr || arr->empty()) fail("scenarios", "at least one [[scenarios]] entry is required");
  std::vector<Scenario> out;
  for (std::size_t i = 0; i < arr->size(); ++i) {
    const std::string prefix = "scenarios[" + std::to_string(i) + "]";
    const toml::table* t = arr->get(i)->as_table();
    if (!t) fail(prefix, "expected a table");
    reject_unknown(*t, prefix, {"name", "state"});
    const toml::node* s = t->get("state");
    if (!s) fail(prefix + ".state", "missing value");
    const auto v = get_numbers(*s, prefix + ".state", 5);
    Scenario sc;
    sc.name = get_string(*t, prefix, "name", "scenario" + std::to_string(i));
    sc.initial = QState{Vec3(v[0], v[1], v[2]), Vec2(v[3], v[4])};
    if (!sc.initial.finite()) fail(prefix + ".state", "must be finite");
    // Names become file names.
    if (sc.name.empty() || sc.name.find_first_not_of(kNameChars) != std::string::npos) {
      fail(prefix + ".name", "must be non-empty and use only [A-Za-z0-9_-]");
    }
    for (const auto& prev : out) {
      if (prev.name == sc.name) fail(prefix + ".name", "duplicate scenario name \"" + sc.name + "\"");
    }
    out.push_back(std::move(sc));
  }
  return out;
}

OutputOptions parse_outputs(const toml::table& root) {
  OutputOptions out;
  const toml::table* t = sub_table(root, "outputs", false);
  if (!t) return out;
  reject_unknown(*t, "outputs", {"directory", "formats"});
  out.directory = get_string(*t, "outputs", "directory", out.directory.string());
  if (const toml::node* f = t->get("formats")) {
    const toml::array* arr = f->as_array();
    if (!arr) fail("outputs.formats", "expected an array of strings");
    out.csv = out.json = false;
    for (const auto& e : *arr) {
      const auto s = e.value<std::string>();
      if (!s) fail("outputs.formats", "expected an array of strings");
      if (*s == "csv") out.csv = true;
      else if (*s == "json") out.json = true;
      else fail("outputs.formats", "unknown format \"" + *s + "\" (csv, json)");
    }
  }
  return out;
}

VerificationOptions parse_verification(const toml::table& root) {
  VerificationOptions v;
  const toml::table* t = sub_table(root, "verification", false);
  if (!t) return v;
  reject_unknown(*t, "verification", {"matching_samples", "residual_samples", "schwarz_functions"});
  v.matching_samples = get_count(*t, "verification", "matching_samples", v.matching_samples);
  v.residual_samples = get_count(*t, "verification", "residual_samples", v.residual_samples);
  v.schwarz_functions = get_count(*t, "verification", "schwarz_functions", v.schwarz_functions);
  return v;
}

void apply_override(toml::table& root, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("--override \"" + spec + "\": expected key.path=value");
  }
  const std::string path = spec.substr(0, eq);
  const std::string text = spec.substr(eq + 1);

  toml::table parsed;
  try {
    parsed = toml::parse("v = " + text);
  } catch (const toml::parse_error&) {
    // Bare words are taken as strings: controller.form=momentum.
    parsed = toml::table{{"v", text}};
  }
  std::vector<std::string> keys;
  std::stringstream ss(path);
  for (std::string k; std::getline(ss, k, '.');) {
    if (k.empty()) throw ConfigError("--override \"" + spec + "\": empty key segment");
    keys.push_back(k);
  }
  toml::table* cur = &root;
  for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
    toml::node* n = cur->get(keys[i]);
    if (!n) {
      cur->insert(keys[i], toml::table{});
      n = cur->get(keys[i]);
    }
    if (!n->is_table()) throw ConfigError("--override \"" + spec + "\": " + keys[i] + " is not a table");
    cur = n->as_table();
  }
  cur->insert_or_assign(keys.back(), *parsed.get("v"));
}

}  // namespace

RunConfig parse_run_config(const std::string& toml_text, const std::vector<std::string>& overrides,
                           const std::string& source) {
  toml::table root;
  try {
    root = toml::parse(toml_text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << source << ":" << e.source().begin.line << ":" << e.source().begin.column << ": "
       << e.description();
    throw ConfigError(os.str());
  }
  for (const auto& o : overrides) apply_override(root, o);

  reject_unknown(root, "",
                 {"seed", "model", "controller", "integrator", "scenarios", "outputs", "verification"});
  RunConfig cfg{.model = parse_model(root),
                .controller = parse_controller(root),
                .integrator = parse_integrator(root),
                .scenarios = parse_scenarios(root),
                .outputs = parse_outputs(root),
                .verification = parse_verification(root)};
  if (const toml::node* s = root.get("seed")) {
    if (!s->is_integer() || *s->value<std::int64_t>() < 0) fail("seed", "expected a non-negative integer");
    cfg.seed = static_cast<std::uint64_t>(*s->value<std::int64_t>());
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), overrides, path.string());
}

const std::string& default_config_toml() { return kDefaultToml; }

}  // namespace sleigh
