/*
 * Copyright 2026 The pathcalc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 */
#include "core/follmer.hpp"

#include <algorithm>
#include <exception>
#include <thread>

#include "core/errors.hpp"
#include "core/summation.hpp"

namespace pathcalc {

const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::continuous: return "continuous";
    case Mode::cadlag: return "cadlag";
    case Mode::right: return "right";
  }
  return "?";
}

Mode parse_mode(const std::string& text) {
  if (text == "continuous") return Mode::continuous;
  if (text == "cadlag") return Mode::cadlag;
  if (text == "right") return Mode::right;
  throw ConfigError("unknown mode '" + text + "' (expected continuous, cadlag or right)");
}

namespace {

void check_sub(const PathPair& p, const Subdivision& sub) {
  if (!(sub.grid == p.grid())) throw DomainError("subdivision and pair live on different grids");
  if (sub.indices.size() < 2 || sub.indices.front() != 0 || sub.indices.back() != p.last_index()) {
    throw DomainError("subdivision must run from 0 to the pair horizon");
  }
}

std::vector<Jump> jumps_on(const CadlagPath& path, const Subdivision& sub) {
  std::vector<Jump> out;
  for (auto& jump : path.registry()) {
    if (sub.contains(jump.index)) out.push_back(std::move(jump));
  }
  return out;
}

// Fills samples [from, to) of a row-major buffer with `value`.
void fill(std::vector<double>& buf, std::size_t dim, std::size_t from, std::size_t to, std::span<const double> value) {
  for (std::size_t j = from; j < to; ++j) std::copy(value.begin(), value.end(), buf.begin() + static_cast<std::ptrdiff_t>(j * dim));
}

Vector gradient_at(const Functional& F, const PathPair& q, const FollmerOptions& options) {
  if (options.use_analytic && F.has_vertical()) return F.analytic_vertical(q);
  return vertical_gradient(F, q, q.horizon(), options.scheme, true);
}

Matrix hessian_at(const Functional& F, const PathPair& q, const FollmerOptions& options) {
  if (options.use_analytic && F.has_vertical2()) return F.analytic_vertical2(q);
  return vertical_hessian(F, q, q.horizon(), options.scheme, true);
}

double horizontal_at(const Functional& F, const PathPair& q, const FollmerOptions& options) {
  if (options.use_analytic && F.has_horizontal()) return F.analytic_horizontal(q);
  // Near the end of the grid use as many extrapolation nodes as fit.
  FDScheme scheme = options.scheme;
  const std::size_t room = q.grid().intervals() - q.last_index();
  scheme.horizontal_steps = static_cast<int>(std::min<std::size_t>(room, static_cast<std::size_t>(scheme.horizontal_steps)));
  if (scheme.horizontal_steps < 1) throw DomainError("no forward room for a horizontal derivative at the grid horizon");
  return horizontal_derivative(F, q, q.horizon(), scheme, true);
}

}  // namespace

ApproximantPair build_approximants(const PathPair& p, const Subdivision& sub, Mode mode) {
  check_sub(p, sub);
  if (mode == Mode::cadlag && sub.scheme == Scheme::dyadic) {
    throw ConfigError("cadlag mode needs a jump-augmented or stopping-time subdivision");
  }
  const std::size_t d = p.x.dim();
  const std::size_t dv = p.v.dim();
  const std::size_t last = p.last_index();
  std::vector<double> xs(p.x.size() * d);
  std::vector<double> vs(p.v.size() * dv);
  std::vector<double> left(d);
  for (std::size_t k = 0; k + 1 < sub.size(); ++k) {
    const std::size_t from = sub.indices[k];
    const std::size_t to = sub.indices[k + 1];
    switch (mode) {
      case Mode::continuous:
        fill(xs, d, from, to, p.x.sample(to));
        break;
      case Mode::cadlag: {
        const Vector lv = p.x.left_value(to);
        std::copy(lv.data(), lv.data() + d, left.begin());
        fill(xs, d, from, to, left);
        break;
      }
      case Mode::right:
        fill(xs, d, from, to, p.x.sample(from));
        break;
    }
    fill(vs, dv, from, to, p.v.sample(from));
  }
  fill(xs, d, last, last + 1, p.x.sample(last));
  fill(vs, dv, last, last + 1, p.v.sample(last));

  ApproximantPair out;
  out.mode = mode;
  out.sub = sub;
  const bool keep_jumps = mode != Mode::continuous;
  out.x_n = CadlagPath::from_samples(p.grid(), d, std::move(xs), keep_jumps ? jumps_on(p.x, sub) : std::vector<Jump>{});
  out.v_n = CadlagPath::from_samples(p.grid(), dv, std::move(vs), keep_jumps ? jumps_on(p.v, sub) : std::vector<Jump>{});
  return out;
}

PathPair follmer_snapshot(const ApproximantPair& a, const PathPair& p, std::size_t i) {
  const auto& idx = a.sub.indices;
  if (i + 1 >= idx.size()) throw DomainError("snapshot index past the last subdivision interval");
  const std::size_t ti = idx[i];
  if (a.mode == Mode::right) {
    const std::size_t h = idx[i + 1] - ti;
    return PathPair::unchecked(a.x_n.restricted_to(ti).extended_by(h), a.v_n.restricted_to(ti).extended_by(h));
  }
  // x^n stopped just before t_i ends at x(t_i) in continuous mode and at
  // x(t_i-) in cadlag mode; the cadlag snapshot then bumps it by the jump at
  // t_i, which lands on x(t_i) with that jump registered.
  std::optional<Vector> jump;
  if (a.mode == Mode::cadlag && ti > 0) {
    if (const Jump* j = p.x.jump_at(ti)) jump = j->delta;
  }
  CadlagPath xs = a.x_n.restricted_to(ti).with_endpoint(p.x.value(ti), jump);
  CadlagPath vs = a.v_n.restricted_to(ti).with_endpoint(p.v.value(i == 0 ? 0 : idx[i - 1]), std::nullopt);
  return PathPair::unchecked(std::move(xs), std::move(vs));
}

double follmer_sum(const Functional& F, const ApproximantPair& a, const PathPair& p, const FollmerOptions& options) {
  const auto& idx = a.sub.indices;
  CompensatedSum sum;
  for (std::size_t i = 0; i + 1 < idx.size(); ++i) {
    Vector grad;
    try {
      grad = gradient_at(F, follmer_snapshot(a, p, i), options);
    } catch (const Error& e) {
      throw EvaluationError("Riemann term " + std::to_string(i) + " at t = " + std::to_string(a.sub.time(i)) +
                            ": " + e.what());
    }
    const Vector dx = p.x.value(idx[i + 1]) - p.x.value(idx[i]);
    sum.add(grad.dot(dx));
  }
  return sum.value();
}

double follmer_sum(const Functional& F, const PathPair& p, const Subdivision& sub, Mode mode,
                   const FollmerOptions& options) {
  return follmer_sum(F, build_approximants(p, sub, mode), p, options);
}

double jump_compensation_at(const Functional& F, const PathPair& p, std::size_t index, const FollmerOptions& options) {
  const PathPair at = restrict_index(p, index);
  const PathPair before = stopped_before_index(p, index);
  double value = F(at) - F(before);
  if (const Jump* jump = p.x.jump_at(index)) value -= gradient_at(F, before, options).dot(jump->delta);
  return value;
}

double jump_compensation(const Functional& F, const PathPair& p, double threshold, const FollmerOptions& options) {
  CompensatedSum sum;
  for (const auto& jump : jumps(p.x, threshold)) sum.add(jump_compensation_at(F, p, jump.index, options));
  return sum.value();
}

CovReport change_of_variable_level(const Functional& F, const PathPair& p, const Subdivision& sub, Mode mode,
                                   const FollmerOptions& options) {
  CovReport report;
  report.level = sub.level;
  report.points = sub.size();
  try {
    const ApproximantPair a = build_approximants(p, sub, mode);
    const auto& idx = sub.indices;
    const double step = p.grid().step();
    report.lhs = F(p) - F(restrict_index(p, 0));

    CompensatedSum horizontal;
    CompensatedSum trace;
    CompensatedSum follmer;
    for (std::size_t i = 0; i + 1 < idx.size(); ++i) {
      const PathPair left = restrict_index(p, idx[i]);
      const double h = static_cast<double>(idx[i + 1] - idx[i]) * step;
      horizontal.add(horizontal_at(F, left, options) * h);

      const Vector dx = p.x.value(idx[i + 1]) - p.x.value(idx[i]);
      Matrix dq = dx * dx.transpose();
      if (mode == Mode::cadlag) {
        if (const Jump* jump = p.x.jump_at(idx[i + 1])) dq -= jump->delta * jump->delta.transpose();
      }
      trace.add(0.5 * hessian_at(F, left, options).cwiseProduct(dq).sum());

      Vector grad;
      try {
        grad = gradient_at(F, follmer_snapshot(a, p, i), options);
      } catch (const Error& e) {
        throw EvaluationError("Riemann term " + std::to_string(i) + ": " + e.what());
      }
      follmer.add(grad.dot(dx));
    }
    report.horizontal = horizontal.value();
    report.trace = trace.value();
    report.follmer = follmer.value();

    if (mode == Mode::cadlag) {
      std::vector<std::size_t> times;
      for (const auto& j : p.x.registry()) times.push_back(j.index);
      for (const auto& j : p.v.registry()) times.push_back(j.index);
      std::sort(times.begin(), times.end());
      times.erase(std::unique(times.begin(), times.end()), times.end());
      CompensatedSum jumps_sum;
      double bound = 0.0;
      for (std::size_t u : times) {
        if (sub.contains(u)) {
          jumps_sum.add(jump_compensation_at(F, p, u, options));
        } else if (const Jump* jump = p.x.jump_at(u)) {
          bound += jump->delta.squaredNorm() * hessian_at(F, stopped_before_index(p, u), options).norm();
        }
      }
      report.jumps = jumps_sum.value();
      report.small_jump_bound = bound;
    }
  } catch (const std::exception& e) {
    report.error = e.what();
  }
  return report;
}

std::vector<CovReport> change_of_variable_report(const Functional& F, const PathPair& p, int level_lo, int level_hi,
                                                 Scheme scheme, Mode mode, const FollmerOptions& options) {
  if (level_lo < 0 || level_hi < level_lo) throw ConfigError("level range must satisfy 0 <= lo <= hi");
  if (level_hi > p.grid().depth) {
    throw ConfigError("level " + std::to_string(level_hi) + " exceeds grid depth " + std::to_string(p.grid().depth));
  }
  if (mode == Mode::cadlag && scheme == Scheme::dyadic) {
    throw ConfigError("cadlag mode needs the jump or stopping subdivision scheme");
  }
  const std::size_t count = static_cast<std::size_t>(level_hi - level_lo + 1);
  std::vector<CovReport> reports(count);
  std::vector<std::thread> workers;
  workers.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    workers.emplace_back([&, k] {
      const int level = level_lo + static_cast<int>(k);
      try {
        reports[k] = change_of_variable_level(F, p, make_subdivision(scheme, p, level), mode, options);
      } catch (const std::exception& e) {
        reports[k].level = level;
        reports[k].error = e.what();
      }
    });
  }
  for (auto& w : workers) w.join();
  return reports;
}

}  // namespace pathcalc
