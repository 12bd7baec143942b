/*
 * Copyright 2026 The pathcalc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 */
#include "pathcalc/pathcalc.h"

#include <cmath>
#include <limits>
#include <memory>
#include <new>
#include <string>

#include "core/derivatives.hpp"
#include "core/errors.hpp"
#include "core/follmer.hpp"
#include "core/functionals.hpp"
#include "core/generators.hpp"
#include "core/path_io.hpp"
#include "core/quadratic_variation.hpp"

using namespace pathcalc;

struct pc_path {
  CadlagPath path;
};
struct pc_ground_truth {
  GroundTruth truth;
};
struct pc_functional {
  Functional functional;
};
struct pc_qv_table {
  struct Row {
    int level;
    double t, curve, continuous, atomic;
  };
  std::vector<Row> rows;
};
struct pc_report {
  std::vector<CovReport> rows;
};
struct pc_derivative_table {
  std::vector<DerivativeRow> rows;
};

namespace {

thread_local std::string g_last_error;

pc_status fail(pc_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

pc_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain: return PC_ERR_DOMAIN;
    case ErrorKind::precision: return PC_ERR_PRECISION;
    case ErrorKind::config: return PC_ERR_CONFIG;
    case ErrorKind::evaluation: return PC_ERR_EVALUATION;
    case ErrorKind::consistency: return PC_ERR_CONSISTENCY;
    case ErrorKind::io: return PC_ERR_IO;
  }
  return PC_ERR_INTERNAL;
}

struct InvalidArgument : std::exception {
  explicit InvalidArgument(std::string m) : message(std::move(m)) {}
  const char* what() const noexcept override { return message.c_str(); }
  std::string message;
};

template <class T>
void need(const T* ptr, const char* name) {
  if (ptr == nullptr) throw InvalidArgument(std::string(name) + " must not be NULL");
}

// Runs `body`, translating exceptions into status codes.
template <class Body>
pc_status api(Body&& body) {
  try {
    body();
    return PC_OK;
  } catch (const InvalidArgument& e) {
    return fail(PC_ERR_INVALID_ARGUMENT, e.what());
  } catch (const Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(PC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(PC_ERR_INTERNAL, "unknown error");
  }
}

PathPair make_pair(const pc_path* x, const pc_path* v) {
  need(x, "x");
  if (v == nullptr) {
    const std::size_t packed = packed_size(x->path.dim());
    return PathPair::with_constant_v(x->path, Vector::Zero(static_cast<Eigen::Index>(packed)));
  }
  return PathPair(x->path, v->path);
}

Scheme to_scheme(pc_scheme s) {
  switch (s) {
    case PC_SCHEME_DYADIC: return Scheme::dyadic;
    case PC_SCHEME_JUMP: return Scheme::jump;
    case PC_SCHEME_STOPPING: return Scheme::stopping;
  }
  throw ConfigError("unknown scheme value " + std::to_string(static_cast<int>(s)));
}

Mode to_mode(pc_mode m) {
  switch (m) {
    case PC_MODE_CONTINUOUS: return Mode::continuous;
    case PC_MODE_CADLAG: return Mode::cadlag;
    case PC_MODE_RIGHT: return Mode::right;
  }
  throw ConfigError("unknown mode value " + std::to_string(static_cast<int>(m)));
}

}  // namespace

extern "C" {

const char* pc_version(void) { return PATHCALC_VERSION_STRING; }

const char* pc_last_error(void) { return g_last_error.c_str(); }

const char* pc_status_name(pc_status status) {
  switch (status) {
    case PC_OK: return "ok";
    case PC_ERR_DOMAIN: return "domain error";
    case PC_ERR_PRECISION: return "precision error";
    case PC_ERR_CONFIG: return "config error";
    case PC_ERR_EVALUATION: return "evaluation error";
    case PC_ERR_CONSISTENCY: return "consistency error";
    case PC_ERR_IO: return "i/o error";
    case PC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

// ---- generation ------------------------------------------------------------

void pc_gen_spec_init(pc_gen_spec* spec) {
  if (!spec) return;
  const GenSpec d;
  spec->kind = PC_GEN_BROWNIAN;
  spec->horizon = d.horizon;
  spec->depth = d.depth;
  spec->seed = d.seed;
  spec->dim = d.dim;
  spec->sigma = d.sigma;
  spec->rate = d.rate;
  spec->jump_low = d.jump_low;
  spec->jump_high = d.jump_high;
  spec->alpha = d.alpha;
  spec->shape = PC_SHAPE_LINEAR;
  spec->amplitude = d.amplitude;
  spec->jump_time = d.jump_time;
}

pc_status pc_generate(const pc_gen_spec* spec, pc_path** path, pc_ground_truth** truth) {
  return api([&] {
    need(spec, "spec");
    need(path, "path");
    GenSpec g;
    switch (spec->kind) {
      case PC_GEN_BROWNIAN: g.kind = GenKind::brownian; break;
      case PC_GEN_COMPOUND_POISSON: g.kind = GenKind::compound_poisson; break;
      case PC_GEN_JUMP_DIFFUSION: g.kind = GenKind::jump_diffusion; break;
      case PC_GEN_ZERO_QV: g.kind = GenKind::zero_qv; break;
      case PC_GEN_DETERMINISTIC: g.kind = GenKind::deterministic; break;
      default: throw ConfigError("unknown generator kind");
    }
    g.horizon = spec->horizon;
    g.depth = spec->depth;
    g.seed = spec->seed;
    g.dim = spec->dim;
    g.sigma = spec->sigma;
    g.rate = spec->rate;
    g.jump_low = spec->jump_low;
    g.jump_high = spec->jump_high;
    g.alpha = spec->alpha;
    switch (spec->shape) {
      case PC_SHAPE_LINEAR: g.shape = "linear"; break;
      case PC_SHAPE_STEP: g.shape = "step"; break;
      case PC_SHAPE_SINE: g.shape = "sine"; break;
      default: throw ConfigError("unknown deterministic shape");
    }
    g.amplitude = spec->amplitude;
    g.jump_time = spec->jump_time;
    Generated out = generate(g);
    *path = new pc_path{std::move(out.path)};
    if (truth) *truth = new pc_ground_truth{std::move(out.truth)};
  });
}

pc_status pc_dirichlet_sum(const pc_path* x, const pc_path* b, const pc_ground_truth* truth_x, pc_path** sum,
                           pc_ground_truth** truth) {
  return api([&] {
    need(x, "x");
    need(b, "b");
    need(sum, "sum");
    Generated out = dirichlet_sum(x->path, b->path, truth_x ? &truth_x->truth : nullptr);
    *sum = new pc_path{std::move(out.path)};
    if (truth) *truth = new pc_ground_truth{std::move(out.truth)};
  });
}

// ---- paths -----------------------------------------------------------------

pc_status pc_path_from_samples(double horizon, int depth, size_t dim, const double* values, size_t last,
                               const size_t* jump_index, const double* jump_delta, size_t n_jumps, pc_path** out) {
  return api([&] {
    need(values, "values");
    need(out, "out");
    if (n_jumps > 0) {
      need(jump_index, "jump_index");
      need(jump_delta, "jump_delta");
    }
    const Grid grid(horizon, depth);
    std::vector<double> samples(values, values + (last + 1) * dim);
    std::vector<Jump> jumps;
    for (size_t k = 0; k < n_jumps; ++k) {
      Vector delta = Eigen::Map<const Vector>(jump_delta + k * dim, static_cast<Eigen::Index>(dim));
      jumps.push_back({jump_index[k], delta});
    }
    *out = new pc_path{CadlagPath::from_samples(grid, dim, std::move(samples), std::move(jumps))};
  });
}

pc_status pc_path_constant_like(const pc_path* like, size_t dim, const double* value, pc_path** out) {
  return api([&] {
    need(like, "like");
    need(value, "value");
    need(out, "out");
    const Vector v = Eigen::Map<const Vector>(value, static_cast<Eigen::Index>(dim));
    *out = new pc_path{CadlagPath::constant(like->path.grid(), v, like->path.last_index())};
  });
}

pc_status pc_path_read_csv(const char* file, pc_path** out) {
  return api([&] {
    need(file, "file");
    need(out, "out");
    *out = new pc_path{read_path_csv(file)};
  });
}

pc_status pc_path_write_csv(const pc_path* path, const char* file, const char* const* comments, size_t n_comments) {
  return api([&] {
    need(path, "path");
    need(file, "file");
    std::vector<std::string> lines;
    for (size_t k = 0; comments && k < n_comments; ++k) lines.emplace_back(comments[k]);
    write_path_csv(file, path->path, lines);
  });
}

void pc_path_free(pc_path* path) { delete path; }

size_t pc_path_dim(const pc_path* path) { return path ? path->path.dim() : 0; }
size_t pc_path_last_index(const pc_path* path) { return path ? path->path.last_index() : 0; }
double pc_path_horizon(const pc_path* path) { return path ? path->path.horizon() : 0.0; }
int pc_path_depth(const pc_path* path) { return path ? path->path.grid().depth : 0; }
double pc_path_grid_horizon(const pc_path* path) { return path ? path->path.grid().horizon : 0.0; }
size_t pc_path_jump_count(const pc_path* path) { return path ? path->path.jump_count() : 0; }

pc_status pc_path_sample(const pc_path* path, size_t index, double* out) {
  return api([&] {
    need(path, "path");
    need(out, "out");
    if (index > path->path.last_index()) throw DomainError("sample index beyond the path horizon");
    auto s = path->path.sample(index);
    std::copy(s.begin(), s.end(), out);
  });
}

pc_status pc_path_eval(const pc_path* path, double t, double* out) {
  return api([&] {
    need(path, "path");
    need(out, "out");
    const Vector v = eval(path->path, t);
    std::copy(v.data(), v.data() + v.size(), out);
  });
}

pc_status pc_path_left_limit(const pc_path* path, double t, double* out) {
  return api([&] {
    need(path, "path");
    need(out, "out");
    const Vector v = left_limit(path->path, t);
    std::copy(v.data(), v.data() + v.size(), out);
  });
}

// ---- ground truth ----------------------------------------------------------

pc_status pc_truth_write_csv(const pc_ground_truth* truth, const pc_path* path, const char* file,
                             const char* const* comments, size_t n_comments) {
  return api([&] {
    need(truth, "truth");
    need(path, "path");
    need(file, "file");
    std::vector<std::string> lines;
    for (size_t k = 0; comments && k < n_comments; ++k) lines.emplace_back(comments[k]);
    write_meta_csv(file, truth->truth, path->path.grid(), {}, lines);
  });
}

pc_status pc_truth_read_csv(const char* file, pc_ground_truth** out) {
  return api([&] {
    need(file, "file");
    need(out, "out");
    *out = new pc_ground_truth{read_meta_csv(file).truth};
  });
}

void pc_truth_free(pc_ground_truth* truth) { delete truth; }
double pc_truth_qv_rate(const pc_ground_truth* truth) { return truth ? truth->truth.qv_rate : 0.0; }
size_t pc_truth_jump_count(const pc_ground_truth* truth) { return truth ? truth->truth.jumps.size() : 0; }

// ---- functionals -----------------------------------------------------------

pc_status pc_functional_create(const char* spec, size_t dim, pc_functional** out) {
  return api([&] {
    need(spec, "spec");
    need(out, "out");
    *out = new pc_functional{builtin(std::string_view(spec), dim)};
  });
}

void pc_functional_free(pc_functional* f) { delete f; }

const char* pc_functional_name(const pc_functional* f) { return f ? f->functional.name().c_str() : ""; }

pc_status pc_functional_evaluate(const pc_functional* f, const pc_path* x, const pc_path* v, double t, double* out) {
  return api([&] {
    need(f, "functional");
    need(out, "out");
    const PathPair p = make_pair(x, v);
    *out = evaluate(f->functional, t, restrict(p, t));
  });
}

// ---- derivatives -----------------------------------------------------------

void pc_fd_scheme_init(pc_fd_scheme* scheme) {
  if (!scheme) return;
  const FDScheme d;
  scheme->vertical_eps = d.vertical_eps;
  scheme->hessian_eps = d.hessian_eps;
  scheme->horizontal_steps = d.horizontal_steps;
}

pc_status pc_derivative_check(const pc_functional* f, const pc_path* x, const pc_path* v, double t,
                              const pc_fd_scheme* scheme, pc_derivative_table** out) {
  return api([&] {
    need(f, "functional");
    need(out, "out");
    FDScheme s;
    if (scheme) s = {scheme->vertical_eps, scheme->hessian_eps, scheme->horizontal_steps};
    *out = new pc_derivative_table{derivative_check(f->functional, make_pair(x, v), t, s)};
  });
}

size_t pc_derivative_table_rows(const pc_derivative_table* table) { return table ? table->rows.size() : 0; }

pc_status pc_derivative_table_row(const pc_derivative_table* table, size_t row, int* kind, size_t* i, size_t* j,
                                  double* analytic, double* fd, double* abs_err, double* rel_err) {
  return api([&] {
    need(table, "table");
    if (row >= table->rows.size()) throw DomainError("derivative row out of range");
    const auto& r = table->rows[row];
    if (kind) *kind = static_cast<int>(r.kind);
    if (i) *i = r.row;
    if (j) *j = r.col;
    if (analytic) *analytic = r.analytic;
    if (fd) *fd = r.fd;
    if (abs_err) *abs_err = r.abs_err;
    if (rel_err) *rel_err = r.rel_err;
  });
}

void pc_derivative_table_free(pc_derivative_table* table) { delete table; }

// ---- quadratic variation ---------------------------------------------------

pc_status pc_qv_compute(const pc_path* x, const pc_path* v, int level_lo, int level_hi, pc_scheme scheme,
                        size_t component, pc_qv_table** out) {
  return api([&] {
    need(out, "out");
    const PathPair p = make_pair(x, v);
    if (level_lo < 0 || level_hi < level_lo) throw ConfigError("level range must satisfy 0 <= lo <= hi");
    if (level_hi > p.grid().depth) {
      throw ConfigError("level exceeds grid depth (" + std::to_string(level_hi) + " > " +
                        std::to_string(p.grid().depth) + ")");
    }
    auto table = std::make_unique<pc_qv_table>();
    for (int level = level_lo; level <= level_hi; ++level) {
      const QVMeasure q = discrete_qv(p.x, make_subdivision(to_scheme(scheme), p, level), component);
      for (std::size_t k = 0; k < q.times.size(); ++k) {
        table->rows.push_back({level, q.times[k], q.curve[k], q.continuous[k], q.atomic[k]});
      }
    }
    *out = table.release();
  });
}

size_t pc_qv_table_rows(const pc_qv_table* table) { return table ? table->rows.size() : 0; }

pc_status pc_qv_table_row(const pc_qv_table* table, size_t row, int* level, double* t, double* curve,
                          double* continuous, double* atomic) {
  return api([&] {
    need(table, "table");
    if (row >= table->rows.size()) throw DomainError("qv row out of range");
    const auto& r = table->rows[row];
    if (level) *level = r.level;
    if (t) *t = r.t;
    if (curve) *curve = r.curve;
    if (continuous) *continuous = r.continuous;
    if (atomic) *atomic = r.atomic;
  });
}

double pc_qv_table_total(const pc_qv_table* table, int level) {
  double total = std::numeric_limits<double>::quiet_NaN();
  if (!table) return total;
  for (const auto& r : table->rows) {
    if (r.level == level) total = r.curve;
  }
  return total;
}

void pc_qv_table_free(pc_qv_table* table) { delete table; }

// ---- Foellmer --------------------------------------------------------------

pc_status pc_follmer_sum(const pc_functional* f, const pc_path* x, const pc_path* v, int level, pc_scheme scheme,
                         pc_mode mode, int use_fd, double* out) {
  return api([&] {
    need(f, "functional");
    need(out, "out");
    const PathPair p = make_pair(x, v);
    FollmerOptions options;
    options.use_analytic = use_fd == 0;
    *out = follmer_sum(f->functional, p, make_subdivision(to_scheme(scheme), p, level), to_mode(mode), options);
  });
}

pc_status pc_cov_report(const pc_functional* f, const pc_path* x, const pc_path* v, int level_lo, int level_hi,
                        pc_scheme scheme, pc_mode mode, int use_fd, pc_report** out) {
  return api([&] {
    need(f, "functional");
    need(out, "out");
    FollmerOptions options;
    options.use_analytic = use_fd == 0;
    *out = new pc_report{change_of_variable_report(f->functional, make_pair(x, v), level_lo, level_hi,
                                                   to_scheme(scheme), to_mode(mode), options)};
  });
}

size_t pc_report_rows(const pc_report* report) { return report ? report->rows.size() : 0; }

pc_status pc_report_row(const pc_report* report, size_t row, int* level, double* lhs, double* horizontal,
                        double* trace, double* follmer, double* jumps, double* residual, const char** error) {
  return api([&] {
    need(report, "report");
    if (row >= report->rows.size()) throw DomainError("report row out of range");
    const auto& r = report->rows[row];
    if (level) *level = r.level;
    if (lhs) *lhs = r.lhs;
    if (horizontal) *horizontal = r.horizontal;
    if (trace) *trace = r.trace;
    if (follmer) *follmer = r.follmer;
    if (jumps) *jumps = r.jumps;
    if (residual) *residual = r.residual();
    if (error) *error = r.ok() ? nullptr : r.error.c_str();
  });
}

void pc_report_free(pc_report* report) { delete report; }

}  // extern "C"
