#include "accel/harness.hpp"

#include <algorithm>
#include <chrono>
#include <iostream>
#include <map>
#include <set>

#include "accel/csv.hpp"
#include "accel/errors.hpp"

namespace accel {

namespace {

std::ostream &log_stream(const CommandOptions &options) {
  return options.log ? *options.log : std::cout;
}

std::filesystem::path output_dir(const ExperimentConfig &config, const CommandOptions &options) {
  return options.output_dir ? *options.output_dir : config.output_dir;
}

long record_every_for(const ExperimentConfig &config, const MethodConfig &method,
                      const CommandOptions &options) {
  if (options.record_every) return *options.record_every;
  return method.record_every.value_or(config.record_every);
}

std::string optional_number(const std::optional<double> &v) {
  return v ? csv::format_number(*v) : std::string();
}

}  // namespace

std::optional<long> iterations_to_tolerance(const std::vector<TraceRecord> &trace, double tol) {
  for (const TraceRecord &r : trace) {
    if (r.error && *r.error <= tol) return r.k;
  }
  return std::nullopt;
}

std::string sanitize_label(const std::string &label) {
  std::string out = label;
  for (char &c : out) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    if (!ok) c = '_';
  }
  return out;
}

std::vector<MethodRun> run_methods(const ExperimentConfig &config, const Experiment &experiment,
                                   const CommandOptions &options) {
  if (options.record_every && *options.record_every < 1) {
    throw Error(ErrorKind::ConfigInvalid, "'--record-every': must be >= 1");
  }
  const std::optional<double> f_star =
      experiment.oracle ? std::optional<double>(experiment.oracle->f_star) : std::nullopt;
  const double tol = config.stop.f_tol.value_or(config.summary_tol);

  std::vector<MethodRun> runs;
  for (const MethodConfig &mc : config.methods) {
    const auto start = std::chrono::steady_clock::now();
    RunResult result;
    try {
      result = run(mc.method, experiment.problem, experiment.manifold, mc.params,
                   initial_state(mc.method, experiment.x0, mc.params), config.stop,
                   record_every_for(config, mc, options), f_star);
    } catch (const Error &e) {
      throw Error(ErrorKind::ConfigInvalid, "method '" + mc.label + "': " + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    RunSummary s;
    s.method = mc.label;
    s.iterations = result.iterations;
    s.final_f = result.final.f_value;
    s.final_error = result.final.error;
    s.iterations_to_tolerance = iterations_to_tolerance(result.trace, tol);
    s.reason = result.reason;
    s.message = result.message;
    s.wall_seconds = seconds;
    if (!options.quiet) {
      log_stream(options) << mc.label << ": " << s.iterations << " iterations, "
                          << to_string(s.reason) << ", final f = " << csv::format_number(s.final_f)
                          << (s.final_error ? ", error = " + csv::format_number(*s.final_error) : "")
                          << ", " << seconds << " s" << (s.message.empty() ? "" : " (" + s.message + ")")
                          << "\n";
    }
    runs.push_back({mc, std::move(result), std::move(s)});
  }
  return runs;
}

std::string summary_csv(const std::vector<RunSummary> &rows) {
  std::string out = "method,iterations,final_f,final_error,iterations_to_tolerance,termination\n";
  for (const RunSummary &s : rows) {
    out += s.method + ',' + std::to_string(s.iterations) + ',' + csv::format_number(s.final_f) + ',' +
           optional_number(s.final_error) + ',' +
           (s.iterations_to_tolerance ? std::to_string(*s.iterations_to_tolerance) : "never") + ',' +
           std::string(to_string(s.reason)) + '\n';
  }
  return out;
}

std::string compare_csv(const std::vector<MethodRun> &runs) {
  std::set<long> ks;
  std::vector<std::map<long, const TraceRecord *>> by_k(runs.size());
  for (std::size_t i = 0; i < runs.size(); ++i) {
    for (const TraceRecord &r : runs[i].result.trace) {
      ks.insert(r.k);
      by_k[i][r.k] = &r;
    }
  }
  std::string out = "k";
  for (const MethodRun &run : runs) {
    const std::string label = sanitize_label(run.config.label);
    out += ",t_" + label + ",error_" + label;
  }
  out += '\n';
  for (long k : ks) {
    out += std::to_string(k);
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const auto it = by_k[i].find(k);
      if (it == by_k[i].end()) {
        out += ",,";
      } else {
        out += ',' + csv::format_number(it->second->t) + ',' + optional_number(it->second->error);
      }
    }
    out += '\n';
  }
  return out;
}

std::vector<RunSummary> cmd_run(const ExperimentConfig &config, const CommandOptions &options) {
  const Experiment experiment = build_experiment(config);
  const auto runs = run_methods(config, experiment, options);
  const auto dir = output_dir(config, options);
  std::vector<RunSummary> summaries;
  for (const MethodRun &r : runs) {
    csv::write_trace(dir / ("trace_" + sanitize_label(r.config.label) + ".csv"), r.result.trace);
    summaries.push_back(r.summary);
  }
  csv::write_text(dir / "summary.csv", summary_csv(summaries));
  return summaries;
}

std::vector<RunSummary> cmd_compare(const ExperimentConfig &config, const CommandOptions &options) {
  if (config.methods.size() < 2) {
    throw Error(ErrorKind::ConfigInvalid, "'methods': compare needs at least two methods");
  }
  const long grid = record_every_for(config, config.methods.front(), options);
  for (const MethodConfig &mc : config.methods) {
    if (record_every_for(config, mc, options) != grid) {
      throw Error(ErrorKind::ConfigInvalid,
                  "'record_every': method '" + mc.label +
                      "' records on a different grid; record_every must match across methods");
    }
  }
  std::set<std::string> columns;
  for (const MethodConfig &mc : config.methods) {
    if (!columns.insert(sanitize_label(mc.label)).second) {
      throw Error(ErrorKind::ConfigInvalid, "'methods': labels collide after sanitizing: " + mc.label);
    }
  }
  const Experiment experiment = build_experiment(config);
  const auto runs = run_methods(config, experiment, options);
  const auto dir = output_dir(config, options);
  csv::write_text(dir / "compare.csv", compare_csv(runs));
  std::vector<RunSummary> summaries;
  for (const MethodRun &r : runs) summaries.push_back(r.summary);
  csv::write_text(dir / "summary.csv", summary_csv(summaries));
  return summaries;
}

SweepParam parse_sweep_param(const std::string &name) {
  if (name == "p") return SweepParam::P;
  if (name == "h") return SweepParam::H;
  if (name == "p_ring") return SweepParam::PRing;
  throw Error(ErrorKind::ConfigInvalid, "'--param': expected p, h or p_ring, got '" + name + "'");
}

std::string_view to_string(SweepParam param) {
  switch (param) {
    case SweepParam::P: return "p";
    case SweepParam::H: return "h";
    case SweepParam::PRing: return "p_ring";
  }
  return "unknown";
}

std::vector<SweepRow> cmd_sweep(const ExperimentConfig &config, SweepParam param,
                                const std::vector<double> &values, const CommandOptions &options) {
  if (values.empty()) throw Error(ErrorKind::ConfigInvalid, "'--values': empty list");
  const std::string pname(to_string(param));

  // Validate every value before running anything.
  std::vector<ExperimentConfig> variants;
  for (double v : values) {
    ExperimentConfig variant = config;
    for (MethodConfig &mc : variant.methods) {
      switch (param) {
        case SweepParam::P: mc.params.p = v; break;
        case SweepParam::H: mc.params.h = v; break;
        case SweepParam::PRing: mc.params.p_ring = v; break;
      }
      if (param == SweepParam::P && mc.method == Method::HTVIDirect) mc.params.p_ring = v;
      try {
        mc.params.validate(mc.method);
      } catch (const Error &e) {
        throw Error(ErrorKind::ConfigInvalid,
                    "'--values': " + pname + " = " + csv::format_number(v) + " for method '" +
                        mc.label + "': " + e.what());
      }
    }
    variants.push_back(std::move(variant));
  }

  const Experiment experiment = build_experiment(config);
  const auto dir = output_dir(config, options);
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto runs = run_methods(variants[i], experiment, options);
    char value_text[32];
    std::snprintf(value_text, sizeof(value_text), "%g", values[i]);
    for (const MethodRun &r : runs) {
      csv::write_trace(dir / ("sweep_" + sanitize_label(r.config.label) + "_" + pname + "_" +
                              sanitize_label(value_text) + ".csv"),
                       r.result.trace);
      rows.push_back({values[i], r.summary});
    }
  }

  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow &a, const SweepRow &b) {
    const auto &ia = a.summary.iterations_to_tolerance;
    const auto &ib = b.summary.iterations_to_tolerance;
    if (ia.has_value() != ib.has_value()) return ia.has_value();
    return ia && *ia < *ib;
  });

  std::string out =
      "param,value,method,iterations,final_f,final_error,iterations_to_tolerance,termination\n";
  for (const SweepRow &row : rows) {
    const RunSummary &s = row.summary;
    out += pname + ',' + csv::format_number(row.value) + ',' + s.method + ',' +
           std::to_string(s.iterations) + ',' + csv::format_number(s.final_f) + ',' +
           optional_number(s.final_error) + ',' +
           (s.iterations_to_tolerance ? std::to_string(*s.iterations_to_tolerance) : "never") +
           ',' + std::string(to_string(s.reason)) + '\n';
  }
  csv::write_text(dir / "sweep_summary.csv", out);
  return rows;
}

}  // namespace accel
