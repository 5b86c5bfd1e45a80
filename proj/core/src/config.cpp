#include "accel/config.hpp"

#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "accel/csv.hpp"
#include "accel/errors.hpp"
#include "json.hpp"

namespace accel {

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string &key, const std::string &why) {
  throw Error(ErrorKind::ConfigInvalid, "'" + key + "': " + why);
}

void reject_unknown(const json &obj, const std::string &where,
                    std::initializer_list<const char *> known) {
  const std::set<std::string> allowed(known.begin(), known.end());
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) invalid(where + it.key(), "unknown key");
  }
}

const json &require_object(const json &j, const std::string &key) {
  if (!j.contains(key)) invalid(key, "missing");
  if (!j.at(key).is_object()) invalid(key, "must be an object");
  return j.at(key);
}

double get_number(const json &obj, const std::string &key, const std::string &path, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json &v = obj.at(key);
  if (!v.is_number()) invalid(path + key, "must be a number");
  return v.get<double>();
}

long get_integer(const json &obj, const std::string &key, const std::string &path, long fallback) {
  if (!obj.contains(key)) return fallback;
  const json &v = obj.at(key);
  if (!v.is_number_integer()) invalid(path + key, "must be an integer");
  return v.get<long>();
}

std::optional<double> get_optional_number(const json &obj, const std::string &key,
                                          const std::string &path) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  if (!obj.at(key).is_number()) invalid(path + key, "must be a number or null");
  return obj.at(key).get<double>();
}

std::string get_string(const json &obj, const std::string &key, const std::string &path) {
  if (!obj.contains(key)) invalid(path + key, "missing");
  if (!obj.at(key).is_string()) invalid(path + key, "must be a string");
  return obj.at(key).get<std::string>();
}

std::vector<double> get_number_list(const json &obj, const std::string &key, const std::string &path) {
  const json &v = obj.at(key);
  if (!v.is_array()) invalid(path + key, "must be an array of numbers");
  std::vector<double> out;
  for (const json &x : v) {
    if (!x.is_number()) invalid(path + key, "must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::filesystem::path resolve(const std::filesystem::path &base, const std::string &p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

ProblemConfig parse_problem(const json &j, const std::filesystem::path &base) {
  reject_unknown(j, "problem.",
                 {"kind", "n", "m", "l", "seed", "condition_number", "spectrum_scale", "spectrum",
                  "mu", "noise", "A_file", "B_file"});
  ProblemConfig p;
  p.kind = get_string(j, "kind", "problem.");
  if (p.kind != "rayleigh" && p.kind != "brockett" && p.kind != "procrustes") {
    invalid("problem.kind", "expected rayleigh, brockett or procrustes, got '" + p.kind + "'");
  }
  p.n = get_integer(j, "n", "problem.", 0);
  p.m = get_integer(j, "m", "problem.", 1);
  p.l = get_integer(j, "l", "problem.", 0);
  const long seed = get_integer(j, "seed", "problem.", 1);
  if (seed < 0) invalid("problem.seed", "must be >= 0");
  p.seed = static_cast<std::uint64_t>(seed);
  p.condition_number = get_number(j, "condition_number", "problem.", 1e3);
  if (!(p.condition_number >= 1.0)) invalid("problem.condition_number", "must be >= 1");
  p.spectrum_scale = get_number(j, "spectrum_scale", "problem.", 1.0);
  if (!(p.spectrum_scale > 0.0)) invalid("problem.spectrum_scale", "must be > 0");
  if (j.contains("spectrum")) p.spectrum = get_number_list(j, "spectrum", "problem.");
  if (j.contains("mu")) p.mu = get_number_list(j, "mu", "problem.");
  p.noise = get_number(j, "noise", "problem.", 0.0);
  if (!(p.noise >= 0.0)) invalid("problem.noise", "must be >= 0");
  if (j.contains("A_file")) p.a_file = resolve(base, get_string(j, "A_file", "problem."));
  if (j.contains("B_file")) p.b_file = resolve(base, get_string(j, "B_file", "problem."));

  if (p.kind == "brockett") {
    if (p.mu.empty()) invalid("problem.mu", "required for brockett");
    if (j.contains("m") && p.m != static_cast<long>(p.mu.size())) {
      invalid("problem.m", "must equal the length of problem.mu");
    }
    p.m = static_cast<long>(p.mu.size());
  }
  if (p.kind == "procrustes") {
    if (p.a_file.has_value() != p.b_file.has_value()) {
      invalid(p.a_file ? "problem.B_file" : "problem.A_file", "A_file and B_file go together");
    }
    if (!p.a_file && (p.l <= 0 || p.n <= 0 || p.m <= 0)) {
      invalid("problem", "procrustes needs l, n, m (or A_file/B_file)");
    }
  } else if (!p.a_file && p.n < 2) {
    invalid("problem.n", "must be >= 2 (or give A_file)");
  }
  if (p.spectrum && static_cast<long>(p.spectrum->size()) != p.n) {
    invalid("problem.spectrum", "must have n entries");
  }
  return p;
}

MethodConfig parse_method_entry(const json &j, std::size_t index) {
  const std::string path = "methods[" + std::to_string(index) + "].";
  if (!j.is_object()) invalid(path, "must be an object");
  reject_unknown(j, path,
                 {"method", "label", "p", "p_ring", "C", "zeta", "lambda", "h", "q0", "c_max",
                  "project_momentum", "record_every"});
  MethodConfig mc;
  const std::string name = get_string(j, "method", path);
  const auto method = parse_method(name);
  if (!method) {
    invalid(path + "method",
            "unknown method '" + name + "' (EL-I, EL-II, HTVI-Direct, HTVI-Adaptive, RGD)");
  }
  mc.method = *method;
  mc.label = j.contains("label") ? get_string(j, "label", path) : name;
  BregmanParams &bp = mc.params;
  bp.p = get_number(j, "p", path, bp.p);
  bp.p_ring = get_number(j, "p_ring", path, mc.method == Method::HTVIAdaptive ? 2.0 : bp.p);
  bp.C = get_number(j, "C", path, bp.C);
  bp.zeta = get_number(j, "zeta", path, bp.zeta);
  bp.lambda = get_number(j, "lambda", path, bp.lambda);
  bp.h = get_number(j, "h", path, bp.h);
  bp.q_frak_0 = get_number(j, "q0", path, bp.q_frak_0);
  if (j.contains("c_max")) {
    const json &c = j.at("c_max");
    if (c.is_null() || (c.is_string() && c.get<std::string>() == "inf")) {
      bp.c_max = std::numeric_limits<double>::infinity();
    } else if (c.is_number()) {
      bp.c_max = c.get<double>();
    } else {
      invalid(path + "c_max", "must be a number, \"inf\" or null");
    }
  }
  if (j.contains("project_momentum")) {
    if (!j.at("project_momentum").is_boolean()) invalid(path + "project_momentum", "must be a boolean");
    bp.project_momentum = j.at("project_momentum").get<bool>();
  }
  if (j.contains("record_every")) {
    mc.record_every = get_integer(j, "record_every", path, 1);
    if (*mc.record_every < 1) invalid(path + "record_every", "must be >= 1");
  }
  try {
    bp.validate(mc.method);
  } catch (const Error &e) {
    invalid(path.substr(0, path.size() - 1), e.what());
  }
  return mc;
}

}  // namespace

PointProjection parse_projection(const std::string &name) {
  for (auto p : {PointProjection::Normalize, PointProjection::Polar, PointProjection::QF,
                 PointProjection::PolarSeries}) {
    if (to_string(p) == name) return p;
  }
  invalid("manifold.projection", "unknown projection '" + name + "'");
}

RetractionMethod parse_retraction(const std::string &name) {
  for (auto r : {RetractionMethod::Exponential, RetractionMethod::ProjectiveNormalize,
                 RetractionMethod::Polar, RetractionMethod::QF}) {
    if (to_string(r) == name) return r;
  }
  invalid("manifold.retraction", "unknown retraction '" + name + "'");
}

ExperimentConfig parse_config(const std::string &json_text, const std::filesystem::path &base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error &e) {
    throw Error(ErrorKind::ConfigInvalid, std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) invalid("<root>", "must be an object");
  reject_unknown(root, "",
                 {"problem", "manifold", "methods", "stop", "record_every", "init", "oracle",
                  "reference_factor", "summary_tol", "output_dir"});

  ExperimentConfig cfg;
  cfg.problem = parse_problem(require_object(root, "problem"), base_dir);

  if (root.contains("manifold")) {
    const json &mj = require_object(root, "manifold");
    reject_unknown(mj, "manifold.", {"projection", "retraction", "series_order"});
    if (mj.contains("projection")) {
      cfg.manifold.projection = parse_projection(get_string(mj, "projection", "manifold."));
    }
    if (mj.contains("retraction")) {
      cfg.manifold.retraction = parse_retraction(get_string(mj, "retraction", "manifold."));
    }
    cfg.manifold.series_order =
        static_cast<int>(get_integer(mj, "series_order", "manifold.", cfg.manifold.series_order));
  }

  if (!root.contains("methods") || !root.at("methods").is_array() || root.at("methods").empty()) {
    invalid("methods", "must be a non-empty array");
  }
  std::set<std::string> labels;
  for (std::size_t i = 0; i < root.at("methods").size(); ++i) {
    MethodConfig mc = parse_method_entry(root.at("methods").at(i), i);
    if (!labels.insert(mc.label).second) {
      invalid("methods[" + std::to_string(i) + "].label", "duplicate label '" + mc.label + "'");
    }
    cfg.methods.push_back(std::move(mc));
  }

  const json &sj = require_object(root, "stop");
  reject_unknown(sj, "stop.", {"max_iter", "f_tol", "grad_tol"});
  if (!sj.contains("max_iter")) invalid("stop.max_iter", "missing");
  cfg.stop.max_iter = get_integer(sj, "max_iter", "stop.", 0);
  cfg.stop.f_tol = get_optional_number(sj, "f_tol", "stop.");
  cfg.stop.grad_tol = get_optional_number(sj, "grad_tol", "stop.");
  try {
    cfg.stop.validate();
  } catch (const Error &e) {
    invalid("stop", e.what());
  }

  cfg.record_every = get_integer(root, "record_every", "", 1);
  if (cfg.record_every < 1) invalid("record_every", "must be >= 1");

  const json &ij = require_object(root, "init");
  reject_unknown(ij, "init.", {"seed", "file"});
  if (!ij.contains("seed") && !ij.contains("file")) invalid("init", "needs an explicit seed or file");
  const long init_seed = get_integer(ij, "seed", "init.", 0);
  if (init_seed < 0) invalid("init.seed", "must be >= 0");
  cfg.init.seed = static_cast<std::uint64_t>(init_seed);
  if (ij.contains("file")) cfg.init.file = resolve(base_dir, get_string(ij, "file", "init."));

  if (root.contains("oracle")) {
    const std::string mode = get_string(root, "oracle", "");
    if (mode == "auto") {
      cfg.oracle = OracleMode::Auto;
    } else if (mode == "none") {
      cfg.oracle = OracleMode::None;
    } else {
      invalid("oracle", "expected \"auto\" or \"none\"");
    }
  }
  cfg.reference_factor = get_integer(root, "reference_factor", "", cfg.reference_factor);
  if (cfg.reference_factor < 1) invalid("reference_factor", "must be >= 1");
  cfg.summary_tol = get_number(root, "summary_tol", "", cfg.summary_tol);
  if (!(cfg.summary_tol > 0.0)) invalid("summary_tol", "must be > 0");
  if (root.contains("output_dir")) {
    cfg.output_dir = resolve(base_dir, get_string(root, "output_dir", ""));
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IOFailure, "cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.has_parent_path() ? path.parent_path() : ".");
}

namespace {

Matrix load_required(const std::filesystem::path &path, const char *key) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorKind::IOFailure,
                std::string("'") + key + "': file '" + path.string() + "' does not exist");
  }
  return csv::read_matrix(path);
}

Matrix symmetric_matrix(const ProblemConfig &p) {
  if (p.a_file) return load_required(*p.a_file, "problem.A_file");
  std::vector<double> spectrum =
      p.spectrum ? *p.spectrum : log_spaced_spectrum(p.n, p.condition_number);
  if (!p.spectrum) {
    for (double &s : spectrum) s *= p.spectrum_scale;
  }
  return gen_symmetric(p.n, spectrum, p.seed);
}

}  // namespace

Experiment build_experiment(const ExperimentConfig &config) {
  const ProblemConfig &pc = config.problem;
  std::optional<Problem> problem;
  try {
    if (pc.kind == "rayleigh") {
      problem.emplace(Rayleigh{symmetric_matrix(pc)});
    } else if (pc.kind == "brockett") {
      problem.emplace(Brockett{symmetric_matrix(pc),
                               Eigen::Map<const Vector>(pc.mu.data(), pc.mu.size())});
    } else {
      Procrustes inst;
      if (pc.a_file) {
        inst.A = load_required(*pc.a_file, "problem.A_file");
        inst.B = load_required(*pc.b_file, "problem.B_file");
      } else {
        ProcrustesData d = gen_procrustes(pc.l, pc.n, pc.m, pc.seed, pc.noise);
        inst.A = std::move(d.A);
        inst.B = std::move(d.B);
        if (pc.noise == 0.0) inst.planted = std::move(d.X0);
      }
      problem.emplace(std::move(inst));
    }
  } catch (const Error &e) {
    if (e.kind() == ErrorKind::IOFailure) throw;
    invalid("problem", e.what());
  }

  ManifoldSpec M = problem->default_manifold();
  if (config.manifold.projection) M.projection = *config.manifold.projection;
  if (config.manifold.retraction) M.retraction = *config.manifold.retraction;
  M.series_order = config.manifold.series_order;
  try {
    M.validate();
  } catch (const Error &e) {
    invalid("manifold", e.what());
  }

  Matrix x0;
  if (config.init.file) {
    x0 = load_required(*config.init.file, "init.file");
    if (x0.rows() != M.rows() || x0.cols() != M.cols()) {
      invalid("init.file", "point has the wrong shape");
    }
    if (!(constraint_violation(M, x0) <= 1e-8)) {
      invalid("init.file", "point is not on the manifold (violation > 1e-8)");
    }
  } else {
    x0 = random_point(M, config.init.seed);
  }

  std::optional<Oracle> oracle;
  if (config.oracle == OracleMode::Auto) {
    ReferenceOptions ref;
    ref.iterations = static_cast<int>(
        std::min<long>(config.reference_factor * config.stop.max_iter, std::numeric_limits<int>::max()));
    ref.seed = pc.seed + 1000;
    try {
      oracle = problem->oracle(ref);
    } catch (const Error &e) {
      invalid("problem", std::string("oracle: ") + e.what());
    }
  }
  return {std::move(*problem), M, std::move(x0), std::move(oracle)};
}

}  // namespace accel
