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

#include <string>
#include <vector>

#include "core/derivatives.hpp"
#include "core/functionals.hpp"
#include "core/quadratic_variation.hpp"

namespace pathcalc {

/// continuous: x^n = x(t_{i+1}) on [t_i, t_{i+1}), no jumps registered.
/// cadlag:     x^n = x(t_{i+1}-) on [t_i, t_{i+1}), source jumps at subdivision times registered.
/// right:      x^n = x(t_i) on [t_i, t_{i+1}), source jumps at subdivision times registered.
/// In every mode v^n = v(t_i) on [t_i, t_{i+1}) and both end at their value at T.
enum class Mode { continuous, cadlag, right };
const char* to_string(Mode mode);
Mode parse_mode(const std::string& text);

struct ApproximantPair {
  CadlagPath x_n;
  CadlagPath v_n;
  Mode mode = Mode::continuous;
  Subdivision sub;
};

/// Throws ConfigError for cadlag mode on a plain dyadic subdivision.
ApproximantPair build_approximants(const PathPair& p, const Subdivision& sub, Mode mode);

/// The pair at which the i-th Riemann term takes its gradient, for i < sub.size() - 1.
PathPair follmer_snapshot(const ApproximantPair& a, const PathPair& p, std::size_t i);

struct FollmerOptions {
  bool use_analytic = true;
  FDScheme scheme{};
};

/// sum_i <grad F(snapshot_i), x(t_{i+1}) - x(t_i)>, accumulated in order.
double follmer_sum(const Functional& F, const PathPair& p, const Subdivision& sub, Mode mode,
                   const FollmerOptions& options = {});
double follmer_sum(const Functional& F, const ApproximantPair& a, const PathPair& p,
                   const FollmerOptions& options = {});

/// F(p_u) - F(p_{u-}) - <grad F(p_{u-}), jump of x at u> for one grid index u.
double jump_compensation_at(const Functional& F, const PathPair& p, std::size_t index,
                            const FollmerOptions& options = {});
/// Sum of jump_compensation_at over registry jumps of x with norm >= threshold.
double jump_compensation(const Functional& F, const PathPair& p, double threshold,
                         const FollmerOptions& options = {});

struct CovReport {
  int level = 0;
  std::size_t points = 0;  // subdivision size
  double lhs = 0.0;
  double horizontal = 0.0;
  double trace = 0.0;
  double follmer = 0.0;
  double jumps = 0.0;
  /// sum over registry jumps left out of the subdivision of |jump|^2 times the
  /// largest |second vertical derivative| at their left limits.
  double small_jump_bound = 0.0;
  std::string error;  // non-empty when this level failed

  bool ok() const { return error.empty(); }
  double residual() const { return lhs - (horizontal + trace + follmer + jumps); }
};

CovReport change_of_variable_level(const Functional& F, const PathPair& p, const Subdivision& sub, Mode mode,
                                   const FollmerOptions& options = {});

/// One report per level in [level_lo, level_hi]. Levels are independent and are
/// computed on separate threads; a failing level records its error and the
/// others still run.
std::vector<CovReport> change_of_variable_report(const Functional& F, const PathPair& p, int level_lo, int level_hi,
                                                 Scheme scheme, Mode mode, const FollmerOptions& options = {});

}  // namespace pathcalc
