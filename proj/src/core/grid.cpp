/*
 * Copyright 2026 The pathcalc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 */
#include "core/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/errors.hpp"

namespace pathcalc {

namespace {
constexpr double kSnapSlack = 1e-9;
}

Grid::Grid(double horizon_, int depth_) : horizon(horizon_), depth(depth_) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw DomainError("grid horizon must be positive and finite, got " + std::to_string(horizon));
  }
  if (depth < 0 || depth > kMaxDepth) {
    throw DomainError("grid depth must lie in [0, " + std::to_string(kMaxDepth) + "], got " +
                      std::to_string(depth));
  }
}

double Grid::step() const { return std::ldexp(horizon, -depth); }

double Grid::time(std::size_t index) const {
  // Exact for dyadic horizons; a single rounding otherwise.
  return horizon * std::ldexp(static_cast<double>(index), -depth);
}

std::optional<std::size_t> Grid::index_of(double t) const {
  if (!std::isfinite(t)) return std::nullopt;
  const double scaled = std::ldexp(t / horizon, depth);
  const double nearest = std::nearbyint(scaled);
  if (nearest < 0.0 || nearest > static_cast<double>(intervals())) return std::nullopt;
  if (std::abs(scaled - nearest) > kSnapSlack) return std::nullopt;
  return static_cast<std::size_t>(nearest);
}

std::size_t Grid::require_index(double t) const {
  if (auto idx = index_of(t)) return *idx;
  throw PrecisionError("time " + std::to_string(t) + " is not on the grid (step " +
                       std::to_string(step()) + "); snap it first");
}

std::size_t Grid::floor_index(double t) const {
  if (t <= 0.0) return 0;
  if (t >= horizon) return intervals();
  const double scaled = std::ldexp(t / horizon, depth);
  const double nearest = std::nearbyint(scaled);
  if (std::abs(scaled - nearest) <= kSnapSlack) return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::floor(scaled));
}

std::size_t Grid::steps_in(double duration) const {
  if (duration < 0.0) throw DomainError("negative duration " + std::to_string(duration));
  const double scaled = duration / step();
  const double nearest = std::nearbyint(scaled);
  if (std::abs(scaled - nearest) > kSnapSlack * std::max(1.0, nearest)) {
    throw PrecisionError("duration " + std::to_string(duration) +
                         " is not a multiple of the grid step " + std::to_string(step()));
  }
  return static_cast<std::size_t>(nearest);
}

}  // namespace pathcalc
