/*
 * Copyright 2026 The pathcalc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 */

// pathcalc command-line front end. Everything numerical goes through the C API.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <regex>
#include <string>
#include <vector>

#include "pathcalc/pathcalc.h"

namespace {

constexpr int kExitComputation = 1;
constexpr int kExitConfig = 2;

// Carries an exit code out of the subcommand handlers.
struct Failure {
  int code;
  std::string message;
};

[[noreturn]] void config_error(const std::string& message) { throw Failure{kExitConfig, message}; }

void check(pc_status status, const std::string& context) {
  if (status == PC_OK) return;
  const bool config = status == PC_ERR_CONFIG || status == PC_ERR_INVALID_ARGUMENT || status == PC_ERR_IO;
  throw Failure{config ? kExitConfig : kExitComputation, context + ": " + pc_last_error()};
}

std::string num(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using PathPtr = std::unique_ptr<pc_path, Deleter<pc_path, pc_path_free>>;
using TruthPtr = std::unique_ptr<pc_ground_truth, Deleter<pc_ground_truth, pc_truth_free>>;
using FunctionalPtr = std::unique_ptr<pc_functional, Deleter<pc_functional, pc_functional_free>>;

struct Levels {
  int lo = 8;
  int hi = 14;
};

Levels parse_levels(const std::string& text) {
  static const std::regex pattern(R"(^\s*(\d+)\s*(?:\.\.\s*(\d+))?\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, pattern)) config_error("--levels expects A..B, got '" + text + "'");
  Levels levels;
  levels.lo = std::stoi(m[1]);
  levels.hi = m[2].matched ? std::stoi(m[2]) : levels.lo;
  if (levels.hi < levels.lo) config_error("--levels: upper bound below lower bound");
  return levels;
}

pc_scheme parse_scheme(const std::string& s) {
  if (s == "dyadic") return PC_SCHEME_DYADIC;
  if (s == "jump") return PC_SCHEME_JUMP;
  if (s == "stopping") return PC_SCHEME_STOPPING;
  config_error("--scheme expects dyadic, jump or stopping");
}

pc_mode parse_mode(const std::string& s) {
  if (s == "continuous") return PC_MODE_CONTINUOUS;
  if (s == "cadlag") return PC_MODE_CADLAG;
  if (s == "right") return PC_MODE_RIGHT;
  config_error("--mode expects continuous, cadlag or right");
}

// Options shared by several subcommands. Every field is echoed into the
// output header once resolved.
struct Options {
  // generate
  std::string kind = "brownian";
  std::uint64_t seed = 42;
  int depth = 16;
  double horizon = 1.0;
  double sigma = 1.0;
  double rate = 0.0;
  double alpha = 0.75;
  double jump_low = -0.5;
  double jump_high = 0.5;
  std::string shape = "linear";
  double amplitude = 1.0;
  double jump_time = 0.5;
  std::size_t dim = 1;
  // analysis
  std::string out;
  std::string functional;
  std::string path_file;
  std::string meta_file;
  std::string levels = "8..14";
  std::string scheme = "dyadic";
  std::string mode = "continuous";
  bool use_fd = false;
  std::size_t component = 1;
  std::vector<double> times;
  double tol_gradient = 1e-6;
  double tol_hessian = 1e-4;
  double tol_horizontal = 1e-3;
  double tol_residual = -1.0;  // negative: no residual check
};

class Output {
 public:
  Output(const std::string& file, const std::string& command, const std::vector<std::pair<std::string, std::string>>& config)
      : file_(file), out_(file) {
    if (!out_) config_error("cannot open '" + file + "' for writing");
    for (const auto& line : header_lines(command, config)) out_ << "# " << line << '\n';
  }

  static std::vector<std::string> header_lines(const std::string& command,
                                               const std::vector<std::pair<std::string, std::string>>& config) {
    std::vector<std::string> lines{std::string("pathcalc ") + pc_version(), "command=" + command};
    for (const auto& [key, value] : config) lines.push_back(key + "=" + value);
    return lines;
  }

  std::ofstream& stream() { return out_; }

  void close() {
    out_.close();
    if (!out_) throw Failure{kExitComputation, "write to '" + file_ + "' failed"};
  }

 private:
  std::string file_;
  std::ofstream out_;
};

using Config = std::vector<std::pair<std::string, std::string>>;

struct LoadedPair {
  PathPtr x;
  PathPtr v;
  double v_level = 0.0;
  std::string meta_used = "none";
};

// Loads the path and builds v as the constant qv rate from the metadata file
// (explicit --meta-file, else the sidecar next to the path when present, else 0).
LoadedPair load_pair(const Options& o) {
  if (o.path_file.empty()) config_error("--path-file is required");
  LoadedPair pair;
  pc_path* x = nullptr;
  check(pc_path_read_csv(o.path_file.c_str(), &x), "reading " + o.path_file);
  pair.x.reset(x);

  std::string meta = o.meta_file;
  if (meta.empty()) {
    std::string candidate = o.path_file;
    if (candidate.size() > 4 && candidate.substr(candidate.size() - 4) == ".csv") candidate.resize(candidate.size() - 4);
    candidate += ".meta.csv";
    if (std::filesystem::exists(candidate)) meta = candidate;
  }
  if (!meta.empty()) {
    pc_ground_truth* truth = nullptr;
    check(pc_truth_read_csv(meta.c_str(), &truth), "reading " + meta);
    TruthPtr owned(truth);
    pair.v_level = pc_truth_qv_rate(truth);
    pair.meta_used = meta;
  }
  const std::size_t d = pc_path_dim(x);
  std::vector<double> packed(d * (d + 1) / 2, 0.0);
  for (std::size_t i = 0, k = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j, ++k) {
      if (i == j) packed[k] = pair.v_level;
    }
  }
  pc_path* v = nullptr;
  check(pc_path_constant_like(x, packed.size(), packed.data(), &v), "building v");
  pair.v.reset(v);
  return pair;
}

FunctionalPtr load_functional(const Options& o, std::size_t dim) {
  if (o.functional.empty()) config_error("--functional is required");
  pc_functional* f = nullptr;
  check(pc_functional_create(o.functional.c_str(), dim, &f), "functional '" + o.functional + "'");
  return FunctionalPtr(f);
}

void require_out(const Options& o) {
  if (o.out.empty()) config_error("--out is required");
}

// ---------------------------------------------------------------------------

int run_generate(const Options& o) {
  require_out(o);
  pc_gen_spec spec;
  pc_gen_spec_init(&spec);
  static const std::map<std::string, pc_gen_kind> kinds = {{"brownian", PC_GEN_BROWNIAN},
                                                           {"compound_poisson", PC_GEN_COMPOUND_POISSON},
                                                           {"jump_diffusion", PC_GEN_JUMP_DIFFUSION},
                                                           {"zero_qv", PC_GEN_ZERO_QV},
                                                           {"deterministic", PC_GEN_DETERMINISTIC}};
  static const std::map<std::string, pc_shape> shapes = {
      {"linear", PC_SHAPE_LINEAR}, {"step", PC_SHAPE_STEP}, {"sine", PC_SHAPE_SINE}};
  auto kind = kinds.find(o.kind);
  if (kind == kinds.end()) config_error("--kind must be one of brownian, compound_poisson, jump_diffusion, zero_qv, deterministic");
  auto shape = shapes.find(o.shape);
  if (shape == shapes.end()) config_error("--shape must be one of linear, step, sine");
  spec.kind = kind->second;
  spec.seed = o.seed;
  spec.depth = o.depth;
  spec.horizon = o.horizon;
  spec.sigma = o.sigma;
  spec.rate = o.rate;
  spec.alpha = o.alpha;
  spec.jump_low = o.jump_low;
  spec.jump_high = o.jump_high;
  spec.shape = shape->second;
  spec.amplitude = o.amplitude;
  spec.jump_time = o.jump_time;
  spec.dim = o.dim;

  pc_path* path = nullptr;
  pc_ground_truth* truth = nullptr;
  check(pc_generate(&spec, &path, &truth), "generate");
  PathPtr owned_path(path);
  TruthPtr owned_truth(truth);

  std::string meta = o.meta_file;
  if (meta.empty()) {
    meta = o.out;
    if (meta.size() > 4 && meta.substr(meta.size() - 4) == ".csv") meta.resize(meta.size() - 4);
    meta += ".meta.csv";
  }
  const Config config = {{"kind", o.kind},          {"seed", std::to_string(o.seed)},  {"depth", std::to_string(o.depth)},
                         {"horizon", num(o.horizon)}, {"sigma", num(o.sigma)},          {"rate", num(o.rate)},
                         {"alpha", num(o.alpha)},     {"jump_low", num(o.jump_low)},    {"jump_high", num(o.jump_high)},
                         {"shape", o.shape},          {"amplitude", num(o.amplitude)},  {"jump_time", num(o.jump_time)},
                         {"dim", std::to_string(o.dim)}, {"out", o.out},                {"meta_file", meta}};
  const auto lines = Output::header_lines("generate", config);
  std::vector<const char*> ptrs;
  for (const auto& l : lines) ptrs.push_back(l.c_str());
  check(pc_path_write_csv(path, o.out.c_str(), ptrs.data(), ptrs.size()), "writing " + o.out);
  check(pc_truth_write_csv(truth, path, meta.c_str(), ptrs.data(), ptrs.size()), "writing " + meta);
  return 0;
}

int run_qv(const Options& o) {
  require_out(o);
  const Levels levels = parse_levels(o.levels);
  const pc_scheme scheme = parse_scheme(o.scheme);
  const LoadedPair pair = load_pair(o);
  const int depth = pc_path_depth(pair.x.get());
  if (levels.hi > depth) {
    config_error("level exceeds grid depth (" + std::to_string(levels.hi) + " > " + std::to_string(depth) + ")");
  }
  if (o.component == 0 || o.component > pc_path_dim(pair.x.get())) config_error("--component out of range");
  pc_qv_table* raw = nullptr;
  check(pc_qv_compute(pair.x.get(), pair.v.get(), levels.lo, levels.hi, scheme, o.component - 1, &raw), "qv");
  std::unique_ptr<pc_qv_table, Deleter<pc_qv_table, pc_qv_table_free>> table(raw);

  Output out(o.out, "qv",
             {{"path_file", o.path_file}, {"meta_file", pair.meta_used}, {"levels", o.levels}, {"scheme", o.scheme},
              {"component", std::to_string(o.component)}, {"v", num(pair.v_level)}, {"out", o.out}});
  out.stream() << "level,t,curve,continuous,atomic\n";
  for (std::size_t r = 0; r < pc_qv_table_rows(raw); ++r) {
    int level = 0;
    double t = 0, curve = 0, continuous = 0, atomic = 0;
    check(pc_qv_table_row(raw, r, &level, &t, &curve, &continuous, &atomic), "qv row");
    out.stream() << level << ',' << num(t) << ',' << num(curve) << ',' << num(continuous) << ',' << num(atomic) << '\n';
  }
  out.close();
  return 0;
}

int run_derive(const Options& o) {
  require_out(o);
  const LoadedPair pair = load_pair(o);
  const FunctionalPtr f = load_functional(o, pc_path_dim(pair.x.get()));
  std::vector<double> times = o.times;
  if (times.empty()) times.push_back(0.5 * pc_path_horizon(pair.x.get()));
  pc_fd_scheme scheme;
  pc_fd_scheme_init(&scheme);

  std::string time_list;
  for (double t : times) time_list += (time_list.empty() ? "" : " ") + num(t);
  Output out(o.out, "derive",
             {{"functional", o.functional}, {"path_file", o.path_file}, {"meta_file", pair.meta_used},
              {"t", time_list}, {"v", num(pair.v_level)}, {"vertical_eps", num(scheme.vertical_eps)},
              {"hessian_eps", num(scheme.hessian_eps)}, {"horizontal_steps", std::to_string(scheme.horizontal_steps)},
              {"tol_gradient", num(o.tol_gradient)}, {"tol_hessian", num(o.tol_hessian)},
              {"tol_horizontal", num(o.tol_horizontal)}, {"out", o.out}});
  out.stream() << "t,kind,component,analytic,fd,abs_err,rel_err\n";
  static const char* kinds[] = {"horizontal", "gradient", "hessian"};
  std::size_t exceeded = 0;
  for (double t : times) {
    pc_derivative_table* raw = nullptr;
    check(pc_derivative_check(f.get(), pair.x.get(), pair.v.get(), t, &scheme, &raw), "derive at t = " + num(t));
    std::unique_ptr<pc_derivative_table, Deleter<pc_derivative_table, pc_derivative_table_free>> table(raw);
    for (std::size_t r = 0; r < pc_derivative_table_rows(raw); ++r) {
      int kind = 0;
      std::size_t i = 0, j = 0;
      double analytic = 0, fd = 0, abs_err = 0, rel_err = 0;
      check(pc_derivative_table_row(raw, r, &kind, &i, &j, &analytic, &fd, &abs_err, &rel_err), "derive row");
      const std::string component = kind == 2 ? std::to_string(i + 1) + ":" + std::to_string(j + 1) : std::to_string(i + 1);
      out.stream() << num(t) << ',' << kinds[kind] << ',' << component << ',' << num(analytic) << ',' << num(fd) << ','
                   << num(abs_err) << ',' << num(rel_err) << '\n';
      const double tol = kind == 0 ? o.tol_horizontal : kind == 1 ? o.tol_gradient : o.tol_hessian;
      if (std::isfinite(analytic) && rel_err > tol) ++exceeded;
    }
  }
  out.close();
  if (exceeded > 0) std::fprintf(stderr, "pathcalc derive: %zu row(s) exceed the relative tolerance\n", exceeded);
  return 0;
}

struct ReportRow {
  int level = 0;
  double lhs = 0, horizontal = 0, trace = 0, follmer = 0, jumps = 0, residual = 0;
  std::string error;
};

std::vector<ReportRow> compute_report(const Options& o, const LoadedPair& pair, const pc_functional* f) {
  const Levels levels = parse_levels(o.levels);
  const int depth = pc_path_depth(pair.x.get());
  if (levels.hi > depth) {
    config_error("level exceeds grid depth (" + std::to_string(levels.hi) + " > " + std::to_string(depth) + ")");
  }
  const pc_mode mode = parse_mode(o.mode);
  const pc_scheme scheme = parse_scheme(o.scheme);
  if (mode == PC_MODE_CADLAG && scheme == PC_SCHEME_DYADIC) config_error("--mode cadlag needs --scheme jump or stopping");
  pc_report* raw = nullptr;
  check(pc_cov_report(f, pair.x.get(), pair.v.get(), levels.lo, levels.hi, scheme, mode, o.use_fd ? 1 : 0, &raw),
        "change-of-variable report");
  std::unique_ptr<pc_report, Deleter<pc_report, pc_report_free>> report(raw);
  std::vector<ReportRow> rows;
  for (std::size_t r = 0; r < pc_report_rows(raw); ++r) {
    ReportRow row;
    const char* error = nullptr;
    check(pc_report_row(raw, r, &row.level, &row.lhs, &row.horizontal, &row.trace, &row.follmer, &row.jumps,
                        &row.residual, &error),
          "report row");
    if (error) row.error = error;
    rows.push_back(std::move(row));
  }
  return rows;
}

Config analysis_config(const Options& o, const LoadedPair& pair) {
  return {{"functional", o.functional}, {"path_file", o.path_file}, {"meta_file", pair.meta_used},
          {"v", num(pair.v_level)},     {"levels", o.levels},        {"scheme", o.scheme},
          {"mode", o.mode},             {"use_fd", o.use_fd ? "true" : "false"},
          {"tol_residual", num(o.tol_residual)}, {"out", o.out}};
}

int report_errors(const std::vector<ReportRow>& rows, const char* command) {
  int failed = 0;
  for (const auto& row : rows) {
    if (!row.error.empty()) {
      std::fprintf(stderr, "pathcalc %s: level %d failed: %s\n", command, row.level, row.error.c_str());
      ++failed;
    }
  }
  return failed > 0 ? kExitComputation : 0;
}

int run_integrate(const Options& o) {
  require_out(o);
  const LoadedPair pair = load_pair(o);
  const FunctionalPtr f = load_functional(o, pc_path_dim(pair.x.get()));
  const auto rows = compute_report(o, pair, f.get());
  Output out(o.out, "integrate", analysis_config(o, pair));
  out.stream() << "level,follmer\n";
  for (const auto& row : rows) {
    if (!row.error.empty()) out.stream() << "# level " << row.level << " error: " << row.error << '\n';
    out.stream() << row.level << ',' << (row.error.empty() ? num(row.follmer) : "nan") << '\n';
  }
  out.close();
  return report_errors(rows, "integrate");
}

int run_verify(const Options& o) {
  require_out(o);
  const LoadedPair pair = load_pair(o);
  const FunctionalPtr f = load_functional(o, pc_path_dim(pair.x.get()));
  const auto rows = compute_report(o, pair, f.get());
  Output out(o.out, "verify", analysis_config(o, pair));
  out.stream() << "level,lhs,horizontal,trace,follmer,jumps,residual\n";
  std::size_t exceeded = 0;
  for (const auto& row : rows) {
    if (!row.error.empty()) {
      out.stream() << "# level " << row.level << " error: " << row.error << '\n';
      out.stream() << row.level << ",nan,nan,nan,nan,nan,nan\n";
      continue;
    }
    out.stream() << row.level << ',' << num(row.lhs) << ',' << num(row.horizontal) << ',' << num(row.trace) << ','
                 << num(row.follmer) << ',' << num(row.jumps) << ',' << num(row.residual) << '\n';
    if (o.tol_residual >= 0 && std::abs(row.residual) > o.tol_residual * (1.0 + std::abs(row.lhs))) ++exceeded;
  }
  out.close();
  if (exceeded > 0) std::fprintf(stderr, "pathcalc verify: %zu level(s) exceed the residual tolerance\n", exceeded);
  return report_errors(rows, "verify");
}

void add_path_inputs(CLI::App* cmd, Options& o) {
  cmd->add_option("--path-file", o.path_file, "Path CSV (t,x1..xd)")->required();
  cmd->add_option("--meta-file", o.meta_file, "Metadata sidecar; v is its qv_continuous_rate (default: <path>.meta.csv if present)");
}

void add_analysis(CLI::App* cmd, Options& o) {
  add_path_inputs(cmd, o);
  cmd->add_option("--functional", o.functional, "Builtin functional, e.g. cylinder:f=t*x^2")->required();
  cmd->add_option("--levels", o.levels, "Level range A..B")->capture_default_str();
  cmd->add_option("--scheme", o.scheme, "dyadic | jump | stopping")->capture_default_str();
  cmd->add_option("--mode", o.mode, "continuous | cadlag | right")->capture_default_str();
  cmd->add_flag("--use-fd", o.use_fd, "Use finite differences instead of analytic derivatives");
  cmd->add_option("--out", o.out, "Output CSV")->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pathcalc: pathwise functional calculus on sampled paths"};
  app.set_version_flag("--version", std::string(pc_version()));
  app.set_config("--config", "", "TOML/INI file with option defaults (flags take precedence)");
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("generate", "Generate a seeded sample path and its metadata sidecar");
  gen->add_option("--kind", o.kind, "brownian | compound_poisson | jump_diffusion | zero_qv | deterministic")->capture_default_str();
  gen->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  gen->add_option("--depth", o.depth, "Grid depth (2^depth intervals)")->capture_default_str();
  gen->add_option("--horizon", o.horizon, "Time horizon T")->capture_default_str();
  gen->add_option("--sigma", o.sigma, "Volatility (zero_qv: amplitude)")->capture_default_str();
  gen->add_option("--rate", o.rate, "Jump intensity")->capture_default_str();
  gen->add_option("--alpha", o.alpha, "Hoelder exponent of zero_qv paths")->capture_default_str();
  gen->add_option("--jump-low", o.jump_low, "Lower bound of jump marks")->capture_default_str();
  gen->add_option("--jump-high", o.jump_high, "Upper bound of jump marks")->capture_default_str();
  gen->add_option("--shape", o.shape, "deterministic: linear | step | sine")->capture_default_str();
  gen->add_option("--amplitude", o.amplitude, "deterministic amplitude")->capture_default_str();
  gen->add_option("--jump-time", o.jump_time, "deterministic step time")->capture_default_str();
  gen->add_option("--dim", o.dim, "Dimension (brownian only)")->capture_default_str();
  gen->add_option("--out", o.out, "Output path CSV")->required();
  gen->add_option("--meta-file", o.meta_file, "Metadata sidecar (default: <out>.meta.csv)");

  auto* qv = app.add_subcommand("qv", "Discrete quadratic variation per level");
  add_path_inputs(qv, o);
  qv->add_option("--levels", o.levels, "Level range A..B")->capture_default_str();
  qv->add_option("--scheme", o.scheme, "dyadic | jump | stopping")->capture_default_str();
  qv->add_option("--component", o.component, "Component (1-based)")->capture_default_str();
  qv->add_option("--out", o.out, "Output CSV")->required();

  auto* derive = app.add_subcommand("derive", "Analytic against finite-difference derivatives");
  add_path_inputs(derive, o);
  derive->add_option("--functional", o.functional, "Builtin functional")->required();
  derive->add_option("--t", o.times, "Evaluation time(s) on the grid (default: T/2)");
  derive->add_option("--tol-gradient", o.tol_gradient, "Relative tolerance, gradient")->capture_default_str();
  derive->add_option("--tol-hessian", o.tol_hessian, "Relative tolerance, Hessian")->capture_default_str();
  derive->add_option("--tol-horizontal", o.tol_horizontal, "Relative tolerance, horizontal")->capture_default_str();
  derive->add_option("--out", o.out, "Output CSV")->required();

  auto* integrate = app.add_subcommand("integrate", "Foellmer sums per level");
  add_analysis(integrate, o);

  auto* verify = app.add_subcommand("verify", "Change-of-variable report per level");
  add_analysis(verify, o);
  verify->add_option("--tol-residual", o.tol_residual, "Warn when |residual| > tol (1 + |lhs|)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (gen->parsed()) return run_generate(o);
    if (qv->parsed()) return run_qv(o);
    if (derive->parsed()) return run_derive(o);
    if (integrate->parsed()) return run_integrate(o);
    if (verify->parsed()) return run_verify(o);
  } catch (const Failure& f) {
    std::fprintf(stderr, "pathcalc: %s\n", f.message.c_str());
    return f.code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "pathcalc: %s\n", e.what());
    return kExitComputation;
  }
  return kExitConfig;
}
