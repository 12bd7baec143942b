/*
 * Copyright 2026 The pathcalc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 */
#include "core/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "core/errors.hpp"
#include "core/expression.hpp"
#include "core/rng.hpp"

namespace pathcalc {

Functional::Functional(std::string name, std::size_t dim, ScalarFn evaluate)
    : name_(std::move(name)), dim_(dim), evaluate_(std::move(evaluate)) {
  if (dim_ == 0) throw ConfigError("functional dimension must be positive");
  if (!evaluate_) throw ConfigError("functional '" + name_ + "' has no evaluator");
}

Functional& Functional::with_horizontal(ScalarFn fn) {
  horizontal_ = std::move(fn);
  return *this;
}

Functional& Functional::with_vertical(VectorFn fn) {
  vertical_ = std::move(fn);
  return *this;
}

Functional& Functional::with_vertical2(MatrixFn fn) {
  vertical2_ = std::move(fn);
  return *this;
}

Functional& Functional::with_claims(Claims claims) {
  claims_ = claims;
  return *this;
}

double Functional::operator()(const PathPair& p) const {
  if (p.dim() != dim_) {
    throw DomainError("functional '" + name_ + "' expects dimension " + std::to_string(dim_) + ", got " +
                      std::to_string(p.dim()));
  }
  const double value = evaluate_(p);
  if (!std::isfinite(value)) {
    throw EvaluationError("functional '" + name_ + "' is not finite at t = " + std::to_string(p.horizon()));
  }
  return value;
}

double Functional::analytic_horizontal(const PathPair& p) const {
  if (!horizontal_) throw ConfigError("functional '" + name_ + "' has no analytic horizontal derivative");
  return horizontal_(p);
}

Vector Functional::analytic_vertical(const PathPair& p) const {
  if (!vertical_) throw ConfigError("functional '" + name_ + "' has no analytic vertical derivative");
  return vertical_(p);
}

Matrix Functional::analytic_vertical2(const PathPair& p) const {
  if (!vertical2_) throw ConfigError("functional '" + name_ + "' has no analytic second vertical derivative");
  return vertical2_(p);
}

double evaluate(const Functional& F, double t, const PathPair& p) {
  if (std::abs(p.horizon() - t) > 1e-9 * p.grid().step()) {
    throw DomainError("evaluate: pair horizon " + std::to_string(p.horizon()) + " differs from t = " +
                      std::to_string(t));
  }
  return F(p);
}

// ---------------------------------------------------------------------------
// Builtin specs

BuiltinSpec BuiltinSpec::parse(std::string_view text) {
  BuiltinSpec spec;
  const auto colon = text.find(':');
  spec.name = std::string(text.substr(0, colon));
  if (spec.name.empty()) throw ConfigError("empty functional name");
  if (colon == std::string_view::npos) return spec;
  std::string_view rest = text.substr(colon + 1);
  // Parameters are comma separated, but commas never occur inside the
  // expression grammar, so a plain split is enough.
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw ConfigError("functional parameter '" + std::string(item) + "' is not of the form key=value");
    }
    spec.params[std::string(item.substr(0, eq))] = std::string(item.substr(eq + 1));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return spec;
}

std::string BuiltinSpec::to_string() const {
  std::string out = name;
  char sep = ':';
  for (const auto& [key, value] : params) {
    out += sep;
    out += key + "=" + value;
    sep = ',';
  }
  return out;
}

namespace {

std::string require_param(const BuiltinSpec& spec, const std::string& key) {
  auto it = spec.params.find(key);
  if (it == spec.params.end()) throw ConfigError(spec.name + " needs parameter '" + key + "'");
  return it->second;
}

void reject_unknown(const BuiltinSpec& spec, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : spec.params) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw ConfigError(spec.name + " does not take parameter '" + key + "'");
    }
  }
}

std::span<const double> endpoint_of(const PathPair& p) { return p.x.sample(p.last_index()); }

Functional make_cylinder(const BuiltinSpec& spec, std::size_t d) {
  reject_unknown(spec, {"f"});
  const Expression f = Expression::parse(require_param(spec, "f"), d);
  const Expression ft = f.derivative(0);
  std::vector<Expression> grad;
  std::vector<Expression> hess;
  for (std::size_t i = 1; i <= d; ++i) grad.push_back(f.derivative(i));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) hess.push_back(grad[i].derivative(j + 1));
  }
  Functional F("cylinder:f=" + f.to_string(), d,
               [f](const PathPair& p) { return f.evaluate(p.horizon(), endpoint_of(p)); });
  F.with_horizontal([ft](const PathPair& p) { return ft.evaluate(p.horizon(), endpoint_of(p)); });
  F.with_vertical([grad, d](const PathPair& p) {
    Vector g(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) g(static_cast<Eigen::Index>(i)) = grad[i].evaluate(p.horizon(), endpoint_of(p));
    return g;
  });
  F.with_vertical2([hess, d](const PathPair& p) {
    Matrix h(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            hess[i * d + j].evaluate(p.horizon(), endpoint_of(p));
      }
    }
    return Matrix(0.5 * (h + h.transpose()));
  });
  F.with_claims({.predictable_in_v = true,
                 .left_continuous = true,
                 .right_continuous = true,
                 .boundedness_preserving = true,
                 .horizontal_lipschitz = true});
  return F;
}

Functional make_running_integral(const BuiltinSpec& spec, std::size_t d) {
  reject_unknown(spec, {"g"});
  const Expression g = Expression::parse(require_param(spec, "g"), d);
  if (!g.derivative(0).is_zero()) throw ConfigError("running_integral: g must not depend on t");
  const std::string key = "running_integral:" + g.to_string();
  auto integrand = [g](std::span<const double> x) { return g.evaluate(0.0, x); };
  Functional F("running_integral:g=" + g.to_string(), d, [key, integrand](const PathPair& p) {
    return p.grid().step() * p.x.left_sum(key, integrand);
  });
  F.with_horizontal([g](const PathPair& p) { return g.evaluate(p.horizon(), endpoint_of(p)); });
  F.with_vertical([d](const PathPair&) { return Vector(Vector::Zero(static_cast<Eigen::Index>(d))); });
  F.with_vertical2([d](const PathPair&) {
    return Matrix(Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)));
  });
  F.with_claims({.predictable_in_v = true,
                 .left_continuous = true,
                 .right_continuous = true,
                 .boundedness_preserving = true,
                 .horizontal_lipschitz = true});
  return F;
}

Functional make_running_max(const BuiltinSpec& spec, std::size_t d) {
  reject_unknown(spec, {"i"});
  std::size_t component = 1;
  if (auto it = spec.params.find("i"); it != spec.params.end()) {
    try {
      component = std::stoul(it->second);
    } catch (const std::exception&) {
      throw ConfigError("running_max: i must be a positive integer, got '" + it->second + "'");
    }
  }
  if (component == 0 || component > d) {
    throw ConfigError("running_max: component " + std::to_string(component) + " outside 1.." + std::to_string(d));
  }
  Functional F("running_max:i=" + std::to_string(component), d,
               [c = component - 1](const PathPair& p) { return p.x.running_max(c); });
  F.with_claims({.predictable_in_v = true,
                 .left_continuous = true,
                 .right_continuous = true,
                 .boundedness_preserving = true,
                 .horizontal_lipschitz = true});
  return F;
}

Functional make_quadratic_cylinder(const BuiltinSpec& spec, std::size_t d) {
  reject_unknown(spec, {});
  Functional F("quadratic_cylinder", d, [](const PathPair& p) {
    double s = 0.0;
    for (double xi : endpoint_of(p)) s += xi * xi;
    return s;
  });
  F.with_horizontal([](const PathPair&) { return 0.0; });
  F.with_vertical([](const PathPair& p) { return Vector(2.0 * p.x.endpoint()); });
  F.with_vertical2([d](const PathPair&) {
    return Matrix(2.0 * Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)));
  });
  F.with_claims({.predictable_in_v = true,
                 .left_continuous = true,
                 .right_continuous = true,
                 .boundedness_preserving = true,
                 .horizontal_lipschitz = true});
  return F;
}

// exp(x(t) - 1/2 int_0^t v + sum over registered jumps of log(1 + dx) - dx).
// The integral is the left-endpoint grid sum, so it never reads v(t).
double doleans_value(const PathPair& p) {
  double log_product = 0.0;
  for (const auto& jump : p.x.registry()) {
    const double delta = jump.delta(0);
    if (!(1.0 + delta > 0.0)) {
      throw EvaluationError("doleans: jump " + std::to_string(delta) + " at t = " +
                            std::to_string(p.grid().time(jump.index)) + " has 1 + jump <= 0");
    }
    log_product += std::log1p(delta) - delta;
  }
  const double integral =
      p.grid().step() * p.v.left_sum("identity:0", [](std::span<const double> v) { return v[0]; });
  return std::exp(p.x.sample(p.last_index(), 0) - 0.5 * integral + log_product);
}

Functional make_doleans(const BuiltinSpec& spec, std::size_t d) {
  reject_unknown(spec, {});
  if (d != 1) throw ConfigError("doleans is defined for scalar paths only (got dimension " + std::to_string(d) + ")");
  Functional F("doleans", 1, doleans_value);
  F.with_horizontal([](const PathPair& p) { return -0.5 * p.v.sample(p.last_index(), 0) * doleans_value(p); });
  F.with_vertical([](const PathPair& p) { return Vector(Vector::Constant(1, doleans_value(p))); });
  F.with_vertical2([](const PathPair& p) { return Matrix(Matrix::Constant(1, 1, doleans_value(p))); });
  F.with_claims({.predictable_in_v = true,
                 .left_continuous = true,
                 .right_continuous = true,
                 .boundedness_preserving = true,
                 .horizontal_lipschitz = true});
  return F;
}

}  // namespace

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = {"cylinder", "running_integral", "running_max",
                                                 "quadratic_cylinder", "doleans"};
  return names;
}

Functional builtin(const BuiltinSpec& spec, std::size_t dim) {
  if (dim == 0) throw ConfigError("functional dimension must be positive");
  if (spec.name == "cylinder") return make_cylinder(spec, dim);
  if (spec.name == "running_integral") return make_running_integral(spec, dim);
  if (spec.name == "running_max") return make_running_max(spec, dim);
  if (spec.name == "quadratic_cylinder") return make_quadratic_cylinder(spec, dim);
  if (spec.name == "doleans") return make_doleans(spec, dim);
  std::string known;
  for (const auto& n : builtin_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown functional '" + spec.name + "' (known: " + known + ")");
}

Functional linear_combination(double alpha, const Functional& F, double beta, const Functional& G) {
  if (F.dim() != G.dim()) throw ConfigError("linear_combination: dimension mismatch");
  std::ostringstream name;
  name.precision(17);
  name << alpha << "*(" << F.name() << ")+" << beta << "*(" << G.name() << ")";
  Functional H(name.str(), F.dim(), [=](const PathPair& p) { return alpha * F(p) + beta * G(p); });
  if (F.has_horizontal() && G.has_horizontal()) {
    H.with_horizontal([=](const PathPair& p) {
      return alpha * F.analytic_horizontal(p) + beta * G.analytic_horizontal(p);
    });
  }
  if (F.has_vertical() && G.has_vertical()) {
    H.with_vertical([=](const PathPair& p) {
      return Vector(alpha * F.analytic_vertical(p) + beta * G.analytic_vertical(p));
    });
  }
  if (F.has_vertical2() && G.has_vertical2()) {
    H.with_vertical2([=](const PathPair& p) {
      return Matrix(alpha * F.analytic_vertical2(p) + beta * G.analytic_vertical2(p));
    });
  }
  const Claims& a = F.claims();
  const Claims& b = G.claims();
  H.with_claims({.predictable_in_v = a.predictable_in_v && b.predictable_in_v,
                 .left_continuous = a.left_continuous && b.left_continuous,
                 .right_continuous = a.right_continuous && b.right_continuous,
                 .boundedness_preserving = a.boundedness_preserving && b.boundedness_preserving,
                 .horizontal_lipschitz = a.horizontal_lipschitz && b.horizontal_lipschitz});
  return H;
}

bool check_predictable_in_v(const Functional& F, const PathPair& p, double t, double tol) {
  const std::size_t index = p.grid().require_index(t);
  if (index > p.last_index()) throw DomainError("check_predictable_in_v: t beyond the pair horizon");
  const PathPair full = restrict_index(p, index);
  const PathPair stopped = PathPair::unchecked(full.x, p.v.stopped_before_index(index));
  return std::abs(F(full) - F(stopped)) <= tol;
}

// ---------------------------------------------------------------------------
// Probes

namespace {

CadlagPath shifted(const CadlagPath& path, std::span<const double> delta) {
  std::vector<double> values = path.materialize();
  const std::size_t d = path.dim();
  for (std::size_t i = 0; i < values.size(); ++i) values[i] += delta[i % d];
  return CadlagPath::from_samples(path.grid(), d, std::move(values), path.registry());
}

std::vector<PathPair> perturbations(const PathPair& q, double eta) {
  const std::size_t d = q.dim();
  const double delta = eta / 4.0;
  std::vector<PathPair> out{q};
  for (std::size_t c = 0; c < d; ++c) {
    for (double sign : {1.0, -1.0}) {
      Vector e = Vector::Zero(static_cast<Eigen::Index>(d));
      e(static_cast<Eigen::Index>(c)) = sign * delta;
      out.push_back(vertical_perturb(q, e));
    }
  }
  for (double sign : {1.0, -1.0}) {
    std::vector<double> shift(d, sign * delta / std::sqrt(static_cast<double>(d)));
    out.push_back(PathPair::unchecked(shifted(q.x, shift), q.v));
  }
  std::vector<double> vshift(packed_size(d), 0.0);
  for (std::size_t c = 0; c < d; ++c) vshift[packed_index(c, c, d)] = delta / std::sqrt(static_cast<double>(d));
  out.push_back(PathPair::unchecked(q.x, shifted(q.v, vshift)));
  return out;
}

}  // namespace

std::vector<ModulusRow> continuity_probe(const Functional& F, const PathPair& p, double t,
                                         std::span<const double> radii, ProbeDirection direction) {
  const std::size_t it = p.grid().require_index(t);
  if (it > p.last_index()) throw DomainError("continuity_probe: t beyond the pair horizon");
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > 0.0) || (k > 0 && radii[k] > radii[k - 1])) {
      throw DomainError("continuity_probe: radii must be positive and decreasing");
    }
  }
  const PathPair base = restrict_index(p, it);
  const double f0 = F(base);
  const double step = p.grid().step();
  std::vector<ModulusRow> table;
  for (double eta : radii) {
    ModulusRow row{eta, 0.0, 0};
    std::vector<std::size_t> shifts{0};
    if (direction != ProbeDirection::fixed_time) {
      for (std::size_t k = 1; static_cast<double>(k) * step < eta / 2.0; k *= 2) shifts.push_back(k);
    }
    for (std::size_t k : shifts) {
      std::vector<PathPair> anchors;
      if (direction == ProbeDirection::left) {
        if (k > it) continue;
        anchors.push_back(restrict_index(p, it - k));
      } else if (direction == ProbeDirection::right) {
        if (it + k > p.grid().intervals()) continue;
        anchors.push_back(extend_steps(base, k));
        if (k > 0 && it + k <= p.last_index()) anchors.push_back(restrict_index(p, it + k));
      } else {
        anchors.push_back(base);
      }
      for (const auto& anchor : anchors) {
        for (const auto& q : perturbations(anchor, eta)) {
          const double dist = direction == ProbeDirection::left ? d_infty(q, base) : d_infty(base, q);
          if (!(dist < eta)) continue;
          row.modulus = std::max(row.modulus, std::abs(F(q) - f0));
          ++row.probes;
        }
      }
    }
    table.push_back(row);
  }
  return table;
}

double boundedness_probe(const Functional& F, double bound_x, double bound_v, std::size_t sample_count,
                         std::uint64_t seed, const BoundednessOptions& options) {
  if (!(bound_x > 0.0) || !(bound_v > 0.0)) throw DomainError("boundedness_probe: bounds must be positive");
  const Grid& grid = options.grid;
  const std::size_t d = F.dim();
  const std::size_t n = grid.intervals();
  const std::size_t pd = packed_size(d);
  CounterRng rng(seed, Stream::probe);
  double observed = 0.0;
  for (std::size_t s = 0; s < sample_count; ++s) {
    std::vector<double> x((n + 1) * d, 0.0);
    double sup = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
      double norm2 = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        x[j * d + c] = x[(j - 1) * d + c] + rng.next_normal();
        norm2 += x[j * d + c] * x[j * d + c];
      }
      sup = std::max(sup, std::sqrt(norm2));
    }
    const double scale = sup > 0.0 ? bound_x * rng.next_uniform() / sup : 0.0;
    for (double& value : x) value *= scale;
    std::vector<double> v((n + 1) * pd, 0.0);
    const double level = bound_v / std::sqrt(static_cast<double>(d));
    for (std::size_t j = 0; j <= n; ++j) {
      for (std::size_t c = 0; c < d; ++c) v[j * pd + packed_index(c, c, d)] = level * rng.next_uniform();
    }
    const std::size_t horizon = 1 + static_cast<std::size_t>(rng.next_uniform() * static_cast<double>(n));
    const PathPair pair = restrict_index(
        PathPair::unchecked(CadlagPath::from_samples(grid, d, std::move(x)), CadlagPath::from_samples(grid, pd, std::move(v))),
        std::min(horizon, n));
    try {
      observed = std::max(observed, std::abs(F(pair)));
    } catch (const Error& e) {
      throw EvaluationError("boundedness_probe (seed " + std::to_string(seed) + ", sample " + std::to_string(s) +
                            "): " + e.what());
    }
  }
  return observed;
}

}  // namespace pathcalc
