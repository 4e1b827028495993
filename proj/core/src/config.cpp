#include "sepx/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sepx/errors.hpp"

namespace sepx {

using nlohmann::json;

namespace {

const std::set<std::string> kTopKeys = {
    "model",     "params",    "gamma",      "n",           "L",
    "H",         "beta",      "d",          "overlap",     "integrator",
    "classifier", "bisection", "output_dir", "seed",        "threads",
    "grid_resolution", "initial_conditions"};

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

double read_required(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(std::string("missing model parameter '") + key + "'");
  return it->get<double>();
}

ModelParams read_params(const std::string& model, const json& p) {
  if (!p.is_object()) throw ConfigError("'params' must be an object");
  if (model == "two_pop") {
    reject_unknown(p, {"p", "r", "a", "c", "u", "z", "b"}, "params");
    return TwoPopParams{read_required(p, "p"), read_required(p, "r"), read_required(p, "a"),
                        read_required(p, "c"), read_required(p, "u"), read_required(p, "z"),
                        read_required(p, "b")};
  }
  if (model == "three_pop") {
    reject_unknown(p, {"p", "q", "r", "a", "c", "f", "g", "u", "v", "z", "b", "e"}, "params");
    ThreePopParams t;
    t.p = read_required(p, "p");
    t.q = read_required(p, "q");
    t.r = read_required(p, "r");
    t.a = read_required(p, "a");
    t.c = read_required(p, "c");
    t.f = read_required(p, "f");
    t.g = read_required(p, "g");
    t.u = read_required(p, "u");
    t.v = read_required(p, "v");
    t.z = read_required(p, "z");
    t.b = read_required(p, "b");
    t.e = read_required(p, "e");
    return t;
  }
  throw ConfigError("model must be 'two_pop' or 'three_pop', got '" + model + "'");
}

json params_json(const ModelParams& params) {
  if (const auto* m = std::get_if<TwoPopParams>(&params)) {
    return {{"p", m->p}, {"r", m->r}, {"a", m->a}, {"c", m->c},
            {"u", m->u}, {"z", m->z}, {"b", m->b}};
  }
  const auto& m = std::get<ThreePopParams>(params);
  return {{"p", m.p}, {"q", m.q}, {"r", m.r}, {"a", m.a}, {"c", m.c}, {"f", m.f},
          {"g", m.g}, {"u", m.u}, {"v", m.v}, {"z", m.z}, {"b", m.b}, {"e", m.e}};
}

}  // namespace

std::vector<std::string> PipelineConfig::validate() const {
  try {
    std::visit([](const auto& p) { p.validate(); }, params);
  } catch (const ContractError& e) {
    throw ConfigError(e.what());
  }
  if (!(gamma > 0.0)) throw ConfigError("gamma must be > 0");
  if (n < 2) throw ConfigError("n must be >= 2");
  if (L < 1) throw ConfigError("L must be >= 1");
  if (dim() == 3 && H < 1) throw ConfigError("H must be >= 1 for the three_pop model");
  if (!(beta > 0.0)) throw ConfigError("beta must be > 0");
  if (d < 1) throw ConfigError("d must be >= 1");
  if (!(overlap > 1.0)) throw ConfigError("overlap must be > 1");
  if (grid_resolution < 2) throw ConfigError("grid_resolution must be >= 2");
  classifier.validate();
  bisection.validate();
  for (const auto& x0 : initial_conditions) {
    if (x0.size() != dim()) throw ConfigError("initial condition has the wrong dimension");
    if (!x0.allFinite() || (x0.array() < 0.0).any()) {
      throw ConfigError("initial conditions must be finite and nonnegative");
    }
  }

  std::vector<std::string> warnings;
  const double beta_max = dim() == 2 ? 0.04 : 0.03;
  if (beta < 0.001 || beta > beta_max) {
    std::ostringstream os;
    os << "beta=" << beta << " is outside the validated range [0.001, " << beta_max
       << "] for " << model_name();
    warnings.push_back(os.str());
  }
  return warnings;
}

DetectConfig PipelineConfig::detect_config() const {
  return DetectConfig{classifier, bisection, threads};
}

bool PipelineConfig::operator==(const PipelineConfig& o) const {
  if (initial_conditions.size() != o.initial_conditions.size()) return false;
  for (std::size_t i = 0; i < initial_conditions.size(); ++i) {
    if (initial_conditions[i].size() != o.initial_conditions[i].size() ||
        initial_conditions[i] != o.initial_conditions[i]) {
      return false;
    }
  }
  return params == o.params && gamma == o.gamma && n == o.n && L == o.L && H == o.H &&
         beta == o.beta && d == o.d && overlap == o.overlap && classifier == o.classifier &&
         bisection == o.bisection && output_dir == o.output_dir && seed == o.seed &&
         threads == o.threads && grid_resolution == o.grid_resolution;
}

PipelineConfig parse_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  PipelineConfig cfg;
  try {
    reject_unknown(j, kTopKeys, "config");
    if (!j.contains("model")) throw ConfigError("config is missing 'model'");
    if (!j.contains("params")) throw ConfigError("config is missing 'params'");
    cfg.params = read_params(j.at("model").get<std::string>(), j.at("params"));

    read_opt(j, "gamma", cfg.gamma);
    read_opt(j, "n", cfg.n);
    read_opt(j, "L", cfg.L);
    read_opt(j, "H", cfg.H);
    read_opt(j, "beta", cfg.beta);
    read_opt(j, "d", cfg.d);
    read_opt(j, "overlap", cfg.overlap);
    read_opt(j, "output_dir", cfg.output_dir);
    read_opt(j, "seed", cfg.seed);
    read_opt(j, "threads", cfg.threads);
    read_opt(j, "grid_resolution", cfg.grid_resolution);

    if (auto it = j.find("integrator"); it != j.end()) {
      reject_unknown(*it, {"step", "abs_tol", "rel_tol", "t_max"}, "integrator");
      read_opt(*it, "step", cfg.classifier.integrator.step);
      read_opt(*it, "abs_tol", cfg.classifier.integrator.abs_tol);
      read_opt(*it, "rel_tol", cfg.classifier.integrator.rel_tol);
      read_opt(*it, "t_max", cfg.classifier.integrator.t_max);
    }
    if (auto it = j.find("classifier"); it != j.end()) {
      reject_unknown(*it, {"capture_radius", "dwell_steps", "boundary_settle"}, "classifier");
      read_opt(*it, "capture_radius", cfg.classifier.capture_radius);
      read_opt(*it, "dwell_steps", cfg.classifier.dwell_steps);
      if (auto policy = it->find("boundary_settle"); policy != it->end()) {
        cfg.classifier.boundary_settle = parse_boundary_settle(policy->get<std::string>());
      }
    }
    cfg.bisection.tol = 1e-6 * cfg.gamma;
    if (auto it = j.find("bisection"); it != j.end()) {
      reject_unknown(*it, {"tol", "max_iter"}, "bisection");
      read_opt(*it, "tol", cfg.bisection.tol);
      read_opt(*it, "max_iter", cfg.bisection.max_iter);
    }
    if (auto it = j.find("initial_conditions"); it != j.end()) {
      for (const auto& row : *it) {
        const auto v = row.get<std::vector<double>>();
        cfg.initial_conditions.push_back(Eigen::Map<const State>(v.data(), static_cast<Eigen::Index>(v.size())));
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config has a malformed value: ") + e.what());
  }
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const PipelineConfig& cfg) {
  json ics = json::array();
  for (const auto& x0 : cfg.initial_conditions) {
    ics.push_back(std::vector<double>(x0.data(), x0.data() + x0.size()));
  }
  const auto& integ = cfg.classifier.integrator;
  json j = {
      {"model", cfg.model_name()},
      {"params", params_json(cfg.params)},
      {"gamma", cfg.gamma},
      {"n", cfg.n},
      {"L", cfg.L},
      {"H", cfg.H},
      {"beta", cfg.beta},
      {"d", cfg.d},
      {"overlap", cfg.overlap},
      {"integrator",
       {{"step", integ.step}, {"abs_tol", integ.abs_tol}, {"rel_tol", integ.rel_tol},
        {"t_max", integ.t_max}}},
      {"classifier",
       {{"capture_radius", cfg.classifier.capture_radius},
        {"dwell_steps", cfg.classifier.dwell_steps},
        {"boundary_settle", to_string(cfg.classifier.boundary_settle)}}},
      {"bisection", {{"tol", cfg.bisection.tol}, {"max_iter", cfg.bisection.max_iter}}},
      {"output_dir", cfg.output_dir},
      {"seed", cfg.seed},
      {"threads", cfg.threads},
      {"grid_resolution", cfg.grid_resolution},
      {"initial_conditions", ics},
  };
  return j.dump(2);
}

std::uint64_t config_hash(const PipelineConfig& cfg) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : serialize_config(cfg)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

PipelineConfig reference_two_pop_config() {
  PipelineConfig cfg;
  cfg.params = TwoPopParams{.p = 2, .r = 1, .a = 2, .c = 3, .u = 1, .z = 3, .b = 0.5};
  cfg.gamma = 10.0;
  cfg.n = 12;
  cfg.L = 10;
  cfg.H = 0;
  cfg.beta = 0.025;
  cfg.d = 3;
  cfg.bisection.tol = 1e-6 * cfg.gamma;
  cfg.initial_conditions = {State{{1, 4}}, State{{2, 4}}, State{{3, 4}},   State{{4, 4}},
                            State{{4, 3}}, State{{4, 2}}, State{{2.5, 4}}, State{{4, 1}}};
  return cfg;
}

PipelineConfig reference_three_pop_config() {
  PipelineConfig cfg;
  ThreePopParams p;
  p.r = 9;
  p.q = 0.6;
  p.p = 0.6;
  p.b = 0.5;
  p.u = 1.5;
  p.c = 8;
  p.a = 8;
  p.z = 3;
  p.v = 2;
  p.e = 0.5;
  p.f = 6;
  p.g = 5;
  cfg.params = p;
  cfg.gamma = 10.0;
  cfg.n = 10;
  cfg.L = 13;
  cfg.H = 13;
  cfg.beta = 0.005;
  cfg.d = 4;
  cfg.bisection.tol = 1e-6 * cfg.gamma;
  cfg.initial_conditions = {State{{4, 8, 3}}, State{{4, 8, 2}}, State{{4, 8, 7}},
                            State{{4, 8, 8}}, State{{8, 4, 3}}, State{{8, 4, 2}},
                            State{{8, 4, 7}}, State{{8, 4, 8}}};
  return cfg;
}

}  // namespace sepx
