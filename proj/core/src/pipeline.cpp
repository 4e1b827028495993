#include "sepx/pipeline.hpp"

#include <cstdio>

#include <json.hpp>

#include "sepx/errors.hpp"
#include "sepx/io.hpp"

namespace sepx {

using nlohmann::json;

namespace {

// Bumped whenever a stage's output format or numerics change.
const json kStageVersions = {{"equilibria", 1}, {"detect", 1},      {"refine", 1},
                             {"reconstruct", 1}, {"trajectory", 1}};

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

void warn(const StageOptions& opts, const std::string& msg) {
  if (opts.log) *opts.log << "warning: " << msg << '\n';
}

void note(const StageOptions& opts, const std::string& msg) {
  if (opts.log) *opts.log << msg << '\n';
}

void check_config(const PipelineConfig& cfg, const StageOptions& opts) {
  for (const auto& w : cfg.validate()) warn(opts, w);
}

void record_stage(const PipelineConfig& cfg, const StageOptions& opts, const std::string& stage) {
  const auto path = opts.out_dir / files::manifest;
  const std::string hash = hex64(config_hash(cfg));
  json manifest;
  if (std::filesystem::exists(path)) {
    try {
      manifest = json::parse(io::read_text(path));
    } catch (const json::exception&) {
      manifest = json();
    }
  }
  if (!manifest.is_object() || manifest.value("config_hash", "") != hash) {
    manifest = {{"config_hash", hash}, {"model", cfg.model_name()}, {"stages", json::object()}};
  }
  manifest["stages"][stage] = kStageVersions.at(stage);
  io::write_text(path, manifest.dump(2));
}

}  // namespace

std::vector<std::string> table_disagreements(const Model& model) {
  std::vector<std::string> out;
  const auto eqs = model.equilibria();
  const auto rows = model.table_conditions();
  for (std::size_t i = 0; i < eqs.size(); ++i) {
    const auto& eq = eqs[i];
    const auto& row = rows[i];
    if (!eq.computable) continue;
    if (row.feasible && *row.feasible != eq.feasible) {
      out.push_back(eq.label + ": feasibility");
    }
    if (row.stable && eq.feasible && eq.stability != Stability::non_hyperbolic &&
        *row.stable != (eq.stability == Stability::stable)) {
      out.push_back(eq.label + ": stability");
    }
  }
  return out;
}

std::string equilibria_report(const Model& model) {
  const auto eqs = model.equilibria();
  const auto rows = model.table_conditions();
  json report = json::array();
  for (std::size_t i = 0; i < eqs.size(); ++i) {
    const auto& eq = eqs[i];
    const auto& row = rows[i];
    json rec;
    rec["label"] = eq.label;
    rec["computable"] = eq.computable;
    rec["location"] = eq.computable ? vec_json(eq.location) : json(nullptr);
    rec["feasible"] = eq.feasible;
    rec["stability"] = eq.computable ? to_string(eq.stability) : "degenerate";
    json ev = json::array();
    for (const auto& l : eq.eigenvalues) ev.push_back({l.real(), l.imag()});
    rec["eigenvalues"] = ev;
    rec["table"] = {{"feasible", row.feasible ? json(*row.feasible) : json(nullptr)},
                    {"stable", row.stable ? json(*row.stable) : json(nullptr)}};
    bool disagree = false;
    if (eq.computable) {
      if (row.feasible && *row.feasible != eq.feasible) disagree = true;
      if (row.stable && eq.feasible && eq.stability != Stability::non_hyperbolic &&
          *row.stable != (eq.stability == Stability::stable)) {
        disagree = true;
      }
    }
    rec["table_disagreement"] = disagree;
    report.push_back(std::move(rec));
  }
  return report.dump(2);
}

void run_equilibria(const PipelineConfig& cfg, const StageOptions& opts) {
  check_config(cfg, opts);
  const Model model(cfg.params);
  for (const auto& d : table_disagreements(model)) {
    warn(opts, "eigenvalue classification disagrees with the closed-form table for " + d);
  }
  io::write_text(opts.out_dir / files::equilibria, equilibria_report(model));
  record_stage(cfg, opts, "equilibria");
}

void run_trajectories(const PipelineConfig& cfg, const StageOptions& opts,
                      const std::vector<State>& initial_conditions) {
  const Model model(cfg.params);
  for (std::size_t k = 0; k < initial_conditions.size(); ++k) {
    const auto traj = integrate(model, initial_conditions[k], cfg.classifier.integrator);
    io::write_trajectory_csv(opts.out_dir / ("trajectory_" + std::to_string(k + 1) + ".csv"),
                             traj, model.dim());
  }
  record_stage(cfg, opts, "trajectory");
}

DetectionResult run_detect(const PipelineConfig& cfg, const StageOptions& opts) {
  check_config(cfg, opts);
  const Model model(cfg.params);
  auto result = detect(model, cfg.n, cfg.gamma, cfg.detect_config());

  std::size_t skipped = 0;
  for (const auto& rec : result.records) {
    if (rec.outcome.status == BisectStatus::skipped) {
      ++skipped;
      note(opts, "probe " + std::to_string(rec.probe_index) + " skipped: " + rec.outcome.diagnostic);
    } else if (rec.outcome.status == BisectStatus::hit && rec.outcome.low_confidence) {
      warn(opts, "probe " + std::to_string(rec.probe_index) +
                     " low-confidence point: " + rec.outcome.diagnostic);
    }
  }
  note(opts, "detected N=" + std::to_string(result.points.size()) + " points from " +
                 std::to_string(result.probes.size()) + " probes (" + std::to_string(skipped) +
                 " skipped)");

  io::write_points_csv(opts.out_dir / files::raw_points, result.points.points, model.dim());
  record_stage(cfg, opts, "detect");
  if (opts.emit_trajectories) run_trajectories(cfg, opts, cfg.initial_conditions);
  return result;
}

RefinedPointSet run_refine(const PipelineConfig& cfg, const StageOptions& opts) {
  check_config(cfg, opts);
  const Model model(cfg.params);
  SeparatrixPointSet raw;
  raw.points = io::read_points_csv(opts.out_dir / files::raw_points, raw.dim);
  if (raw.dim != model.dim()) {
    throw ConfigError("raw point file dimension does not match the configured model");
  }

  auto refined = raw.dim == 2 ? refine_2d(raw, cfg.L) : refine_3d(raw, cfg.L, cfg.H);
  const auto saddle = model.interior_saddle();
  if (!saddle) {
    throw ConfigError("model has no interior saddle; cannot augment the refined set");
  }
  refined = augment(std::move(refined), *saddle);

  io::write_points_csv(opts.out_dir / files::refined_points, refined.points, refined.dim);
  json meta = {{"dim", refined.dim},
               {"N", refined.raw_count},
               {"L", refined.L},
               {"H", refined.H},
               {"K", refined.K},
               {"augmented", refined.augmented},
               {"M", refined.max_x},
               {"M_y", refined.max_y},
               {"bin_sizes", refined.bin_sizes}};
  io::write_text(opts.out_dir / files::refined_meta, meta.dump(2));
  note(opts, "refined to K=" + std::to_string(refined.K) + " bins, " +
                 std::to_string(refined.size()) + " nodes after augmentation");
  record_stage(cfg, opts, "refine");
  return refined;
}

std::string model_json(const PUInterpolant& interpolant, int d) {
  const auto& cov = interpolant.covering();
  json cells = json::array();
  for (std::size_t j = 0; j < cov.cells.size(); ++j) {
    const auto& c = cov.cells[j];
    cells.push_back({{"center", vec_json(c.center)},
                     {"radius", c.radius},
                     {"node_indices", c.node_indices},
                     {"coefficients", vec_json(interpolant.coefficients()[j])}});
  }
  json sites = json::array();
  for (Eigen::Index i = 0; i < interpolant.sites().rows(); ++i) {
    sites.push_back(vec_json(interpolant.sites().row(i).transpose()));
  }
  json j = {{"kernel", "wendland_c2"},
            {"beta", interpolant.kernel().beta},
            {"d", d},
            {"overlap", cov.overlap},
            {"domain", {{"lower", vec_json(cov.domain.lower)}, {"upper", vec_json(cov.domain.upper)}}},
            {"shape", cov.shape},
            {"subdomains", cells},
            {"nodes", {{"sites", sites}, {"values", vec_json(interpolant.values())}}}};
  return j.dump(2);
}

std::vector<State> evaluation_grid(const PUInterpolant& interpolant, int resolution) {
  if (resolution < 2) throw ContractError("grid resolution must be >= 2");
  const auto& box = interpolant.covering().domain;
  auto coord = [&](int k, int i) {
    return box.lower(k) + (box.upper(k) - box.lower(k)) * i / (resolution - 1);
  };
  std::vector<State> rows;
  if (box.dim() == 1) {
    for (int i = 0; i < resolution; ++i) {
      Point x{{coord(0, i)}};
      rows.push_back(State{{x(0), interpolant.evaluate(x)}});
    }
    return rows;
  }
  for (int i = 0; i < resolution; ++i) {
    for (int k = 0; k < resolution; ++k) {
      Point x{{coord(0, i), coord(1, k)}};
      rows.push_back(State{{x(0), x(1), interpolant.evaluate(x)}});
    }
  }
  return rows;
}

PUInterpolant run_reconstruct(const PipelineConfig& cfg, const StageOptions& opts) {
  check_config(cfg, opts);
  RefinedPointSet refined;
  refined.points = io::read_points_csv(opts.out_dir / files::refined_points, refined.dim);
  if (refined.dim != cfg.dim()) {
    throw ConfigError("refined point file dimension does not match the configured model");
  }
  json meta;
  try {
    meta = json::parse(io::read_text(opts.out_dir / files::refined_meta));
    refined.raw_count = meta.at("N").get<std::size_t>();
    refined.L = meta.at("L").get<int>();
    refined.H = meta.at("H").get<int>();
    refined.K = meta.at("K").get<std::size_t>();
    refined.augmented = meta.at("augmented").get<bool>();
    refined.max_x = meta.at("M").get<double>();
    refined.max_y = meta.at("M_y").get<double>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed refined-point sidecar: ") + e.what());
  }

  const auto interpolant =
      fit(graph_data(refined), WendlandC2{cfg.beta}, graph_domain(refined), cfg.d, cfg.overlap);
  for (std::size_t j = 0; j < interpolant.jittered().size(); ++j) {
    if (interpolant.jittered()[j]) {
      warn(opts, "subdomain " + std::to_string(j) + " needed diagonal jitter to factorize");
    }
  }
  io::write_text(opts.out_dir / files::model, model_json(interpolant, cfg.d));
  io::write_points_csv(opts.out_dir / files::grid,
                       evaluation_grid(interpolant, cfg.grid_resolution), refined.dim);
  record_stage(cfg, opts, "reconstruct");
  return interpolant;
}

void run_pipeline(const PipelineConfig& cfg, const StageOptions& opts) {
  run_equilibria(cfg, opts);
  run_detect(cfg, opts);
  run_refine(cfg, opts);
  run_reconstruct(cfg, opts);
}

}  // namespace sepx
