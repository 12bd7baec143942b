/*
 * Copyright 2026 The pathcalc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 */
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/path_space.hpp"

namespace pathcalc {

/// Declared regularity flags. These are claims made by whoever built the
/// functional; the probes below can falsify them but never prove them.
struct Claims {
  bool predictable_in_v = false;
  bool left_continuous = false;
  bool right_continuous = false;
  bool boundedness_preserving = false;
  bool horizontal_lipschitz = false;
};

/// Non-anticipative functional F_t(x_t, v_t).
///
/// The evaluator only ever receives the pair restricted to [0, t], with t the
/// pair's horizon, so it cannot look at the future. Analytic derivatives are
/// optional; when present they must match finite differences.
class Functional {
 public:
  using ScalarFn = std::function<double(const PathPair&)>;
  using VectorFn = std::function<Vector(const PathPair&)>;
  using MatrixFn = std::function<Matrix(const PathPair&)>;

  Functional(std::string name, std::size_t dim, ScalarFn evaluate);

  Functional& with_horizontal(ScalarFn fn);
  Functional& with_vertical(VectorFn fn);
  Functional& with_vertical2(MatrixFn fn);
  Functional& with_claims(Claims claims);

  const std::string& name() const { return name_; }
  std::size_t dim() const { return dim_; }
  const Claims& claims() const { return claims_; }

  /// Throws EvaluationError on a non-finite result.
  double operator()(const PathPair& p) const;

  bool has_horizontal() const { return static_cast<bool>(horizontal_); }
  bool has_vertical() const { return static_cast<bool>(vertical_); }
  bool has_vertical2() const { return static_cast<bool>(vertical2_); }
  double analytic_horizontal(const PathPair& p) const;
  Vector analytic_vertical(const PathPair& p) const;
  Matrix analytic_vertical2(const PathPair& p) const;

 private:
  std::string name_;
  std::size_t dim_;
  ScalarFn evaluate_;
  ScalarFn horizontal_;
  VectorFn vertical_;
  MatrixFn vertical2_;
  Claims claims_;
};

/// F_t(p) with a check that p's horizon is t.
double evaluate(const Functional& F, double t, const PathPair& p);

/// Builtin name plus parameters, e.g. "cylinder:f=t*x^2" or "running_max:i=2".
struct BuiltinSpec {
  std::string name;
  std::map<std::string, std::string> params;

  static BuiltinSpec parse(std::string_view text);
  std::string to_string() const;
};

/// Registry: cylinder (f), running_integral (g), running_max (i),
/// quadratic_cylinder, doleans (scalar paths only).
Functional builtin(const BuiltinSpec& spec, std::size_t dim);
inline Functional builtin(std::string_view spec, std::size_t dim) { return builtin(BuiltinSpec::parse(spec), dim); }
const std::vector<std::string>& builtin_names();

/// alpha F + beta G, carrying analytic derivatives when both operands do.
Functional linear_combination(double alpha, const Functional& F, double beta, const Functional& G);

/// |F_t(x_t, v_t) - F_t(x_t, v_{t-})| <= tol.
bool check_predictable_in_v(const Functional& F, const PathPair& p, double t, double tol);

enum class ProbeDirection { left, right, fixed_time };

struct ModulusRow {
  double radius = 0.0;
  double modulus = 0.0;
  std::size_t probes = 0;
};

/// Empirical continuity modulus at (t, p): for each radius eta, the largest
/// |F_t(p_t) - F_s(p')| over a deterministic family of perturbed pairs p' with
/// d_infty < eta. The family: endpoint bumps of x (+-eta/4 per coordinate),
/// uniform shifts of x (+-eta/4), a uniform upward shift of v (eta/4), each
/// applied at horizon t (fixed_time), t - h (left) or t + h (right) for
/// h in {0, 1, 2, 4, ...} grid steps below eta/2. For the right direction the
/// actual continuation of p is probed too when it stays within eta.
std::vector<ModulusRow> continuity_probe(const Functional& F, const PathPair& p, double t,
                                         std::span<const double> radii, ProbeDirection direction);

struct BoundednessOptions {
  Grid grid{1.0, 10};
};

/// max |F| over `sample_count` seeded random pairs with sup|x| <= bound_x and
/// sup|v| <= bound_v, evaluated at seeded random horizons.
double boundedness_probe(const Functional& F, double bound_x, double bound_v, std::size_t sample_count,
                         std::uint64_t seed, const BoundednessOptions& options = {});

}  // namespace pathcalc
