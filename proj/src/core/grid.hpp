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

#include <cstddef>
#include <optional>

namespace pathcalc {

inline constexpr int kDefaultDepth = 16;
inline constexpr int kMaxDepth = 20;

/// Uniform dyadic master grid {i * horizon / 2^depth : i = 0..2^depth}.
///
/// Every path, subdivision and jump time lives on one of these grids, and
/// times are carried around as integer indices wherever possible so that no
/// interpolation or snapping ambiguity can creep into Riemann sums.
struct Grid {
  double horizon = 1.0;
  int depth = kDefaultDepth;

  Grid() = default;
  Grid(double horizon, int depth);

  std::size_t intervals() const { return std::size_t{1} << depth; }
  double step() const;
  double time(std::size_t index) const;

  /// Index of `t` if it lies on the grid (relative slack 1e-9 of a step).
  std::optional<std::size_t> index_of(double t) const;
  /// Like index_of but throws PrecisionError when `t` is off-grid.
  std::size_t require_index(double t) const;
  /// Largest grid index with time <= t (t clamped into [0, horizon]).
  std::size_t floor_index(double t) const;
  /// Number of grid steps in a duration that must be a multiple of the step.
  std::size_t steps_in(double duration) const;

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.horizon == b.horizon && a.depth == b.depth;
  }
};

}  // namespace pathcalc
