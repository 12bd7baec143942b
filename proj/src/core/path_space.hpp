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

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/grid.hpp"

namespace pathcalc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A registered discontinuity: the path value at `index` is its right limit and
/// `delta` is the jump part, so the left limit there is value - delta.
struct Jump {
  std::size_t index = 0;
  Vector delta;
};

namespace detail {
struct PathStorage;
}

/// Right-continuous path with left limits on a uniform dyadic grid.
///
/// Values are piecewise constant between grid points. A sample change at a grid
/// point without a registry entry is continuous variation (left limit equals the
/// sample); a registry entry splits off a jump part. Paths are immutable: the
/// path operations below return lightweight views that share sample storage, so
/// restricting, stopping, extending and bumping the endpoint are O(d).
class CadlagPath {
 public:
  CadlagPath() = default;

  /// Builds a path on [0, grid.time(last)] from row-major samples
  /// (values.size() == (last + 1) * dim). Jumps must sit at indices in
  /// [1, last]; zero jumps are dropped.
  static CadlagPath from_samples(const Grid& grid, std::size_t dim, std::vector<double> values,
                                 std::vector<Jump> jumps = {});
  static CadlagPath constant(const Grid& grid, const Vector& value, std::size_t last_index);

  const Grid& grid() const { return grid_; }
  std::size_t dim() const { return dim_; }
  std::size_t last_index() const { return last_; }
  std::size_t size() const { return last_ + 1; }
  double horizon() const { return grid_.time(last_); }
  bool empty() const { return dim_ == 0; }

  std::span<const double> sample(std::size_t index) const;
  double sample(std::size_t index, std::size_t component) const { return sample(index)[component]; }
  Vector value(std::size_t index) const;
  Vector endpoint() const { return value(last_); }
  /// Left limit at a grid index: value minus the registered jump (if any).
  Vector left_value(std::size_t index) const;

  const Jump* jump_at(std::size_t index) const;
  std::vector<Jump> registry() const;
  std::size_t jump_count() const { return jump_count_ + (tail_jump_ ? 1 : 0); }

  /// Sum of g(sample_j) over j in [0, last), cached per storage under `key`.
  /// Callers must use a key that uniquely identifies g.
  double left_sum(const std::string& key, const std::function<double(std::span<const double>)>& g) const;
  /// max over j in [0, last] of sample_j[component].
  double running_max(std::size_t component) const;

  /// Row-major copy of all samples.
  std::vector<double> materialize() const;

  // View builders; the free functions below validate and forward here.
  CadlagPath restricted_to(std::size_t index) const;
  CadlagPath stopped_before_index(std::size_t index) const;
  CadlagPath extended_by(std::size_t steps) const;
  CadlagPath endpoint_bumped(const Vector& e) const;
  CadlagPath with_endpoint(const Vector& value, const std::optional<Vector>& jump) const;

 private:
  bool has_tail() const { return base_count_ <= last_; }
  const std::vector<Jump>& store_jumps() const;

  Grid grid_{};
  std::size_t dim_ = 0;
  std::size_t last_ = 0;
  std::shared_ptr<const detail::PathStorage> store_;
  std::size_t base_count_ = 0;  // samples [0, base_count_) come from store_
  std::vector<double> tail_;    // value of samples [base_count_, last_]
  std::size_t jump_count_ = 0;  // visible prefix of store_->jumps (indices < base_count_)
  std::optional<Jump> tail_jump_;  // at index base_count_
};

/// A point (x, v) of the path bundle: x of dimension d and v of dimension
/// d(d+1)/2 holding a packed symmetric PSD matrix per sample.
struct PathPair {
  CadlagPath x;
  CadlagPath v;

  PathPair() = default;
  /// Validates shared grid/horizon, v dimension and PSD samples.
  PathPair(CadlagPath x, CadlagPath v);
  /// Internal: skips validation (views of an already validated pair).
  static PathPair unchecked(CadlagPath x, CadlagPath v);
  /// Pair with v identically equal to `v_value` (packed).
  static PathPair with_constant_v(CadlagPath x, const Vector& v_value);

  std::size_t last_index() const { return x.last_index(); }
  double horizon() const { return x.horizon(); }
  std::size_t dim() const { return x.dim(); }
  const Grid& grid() const { return x.grid(); }
};

// Symmetric-matrix packing: upper triangle, row-major.
std::size_t packed_size(std::size_t d);
std::size_t dim_from_packed(std::size_t packed);
std::size_t packed_index(std::size_t i, std::size_t j, std::size_t d);
Matrix unpack_symmetric(std::span<const double> packed, std::size_t d);
double packed_frobenius(std::span<const double> packed, std::size_t d);

Vector eval(const CadlagPath& path, double t);
Vector left_limit(const CadlagPath& path, double t);
CadlagPath restrict(const CadlagPath& path, double t);
CadlagPath stopped_before(const CadlagPath& path, double t);
CadlagPath horizontal_extend(const CadlagPath& path, double h);
CadlagPath vertical_perturb(const CadlagPath& path, const Vector& e);

PathPair restrict(const PathPair& p, double t);
PathPair restrict_index(const PathPair& p, std::size_t index);
PathPair stopped_before(const PathPair& p, double t);
PathPair stopped_before_index(const PathPair& p, std::size_t index);
PathPair horizontal_extend(const PathPair& p, double h);
PathPair extend_steps(const PathPair& p, std::size_t steps);
/// Bumps the endpoint of x only; v is untouched.
PathPair vertical_perturb(const PathPair& p, const Vector& e);

/// sup|x_{t,h} - x'| + sup|v_{t,h} - v'| + h over the grid of q.
/// Requires horizon(q) >= horizon(p).
double d_infty(const PathPair& p, const PathPair& q);

struct TimedJump {
  double time = 0.0;
  std::size_t index = 0;
  Vector delta;
};

/// Registry entries with |delta| >= threshold, time-sorted.
std::vector<TimedJump> jumps(const CadlagPath& path, double threshold);

struct StepApproximation {
  CadlagPath step;
  double sup_error = 0.0;
};

/// Step function sum_i h(t_i) 1_[t_i, t_{i+1}) + h(t_k) 1_{t_k} over the given
/// grid indices, and its sup distance to the path over the full grid.
StepApproximation step_approximation(const CadlagPath& path, std::span<const std::size_t> indices);

/// Exact sample and registry equality.
bool identical(const CadlagPath& a, const CadlagPath& b);

}  // namespace pathcalc
