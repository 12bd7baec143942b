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

#include "core/path_space.hpp"

namespace pathcalc {

enum class Scheme { dyadic, jump, stopping };
const char* to_string(Scheme scheme);
Scheme parse_scheme(const std::string& text);

/// Ordered grid indices 0 = i_0 < ... < i_k = last of one refinement level.
struct Subdivision {
  Grid grid;
  std::vector<std::size_t> indices;
  int level = 0;
  Scheme scheme = Scheme::dyadic;

  std::size_t size() const { return indices.size(); }
  double time(std::size_t k) const { return grid.time(indices[k]); }
  std::vector<double> times() const;
  bool contains(std::size_t index) const;
};

/// {i * T / 2^n}. Throws DomainError when 2^n exceeds the grid resolution.
Subdivision dyadic_subdivision(const Grid& grid, std::size_t last_index, int n);
inline Subdivision dyadic_subdivision(const Grid& grid, int n) { return dyadic_subdivision(grid, grid.intervals(), n); }

/// Base plus every registry time of x or v whose jump has norm >= 1/n
/// (no jumps for n = 0).
Subdivision jump_augmented_subdivision(const Subdivision& base, const PathPair& p, int n);

/// tau_k = inf{u > tau_{k-1} : 2^N u / T integer or |jump of x or v at u| > 1/N} ^ T,
/// built by running the recursion; the result is checked against the sorted
/// union of dyadic and jump times (ConsistencyError on mismatch).
Subdivision stopping_time_subdivision(const PathPair& p, int N);

/// Dispatches on the scheme: dyadic, dyadic plus jumps, or stopping times.
Subdivision make_subdivision(Scheme scheme, const PathPair& p, int n);

struct Atom {
  double time = 0.0;
  std::size_t index = 0;
  double weight = 0.0;
};

/// Discrete quadratic variation of one component along a subdivision.
///
/// The level-n measure puts (x(t_{k+1}) - x(t_k))^2 at t_k, so curve[k] is the
/// mass on [0, t_k]. Registry jumps at subdivision points are the atoms, with
/// weight exactly delta^2; each atom is accumulated at the left end of the
/// subdivision interval whose increment contains it, which is where the
/// measure puts that mass. continuous = curve - atomic.
struct QVMeasure {
  int level = 0;
  std::size_t component = 0;
  std::vector<double> times;
  std::vector<double> curve;
  std::vector<double> atomic;
  std::vector<double> continuous;
  std::vector<Atom> atoms;
  /// Running sum of |2 c delta| over intervals ending in an atom, where c is the
  /// continuous part of that increment. At a finite level the continuous curve
  /// may dip below zero by at most this much.
  std::vector<double> cross_slack;

  double total() const { return curve.empty() ? 0.0 : curve.back(); }
};

QVMeasure discrete_qv(const CadlagPath& path, const Subdivision& sub, std::size_t component = 0);
std::vector<QVMeasure> discrete_qv_all(const CadlagPath& path, const Subdivision& sub);

struct QVDecomposition {
  std::vector<double> continuous;
  std::vector<Atom> atoms;
};

/// Recomputes the split from the curve and atoms. Throws ConsistencyError when
/// the continuous part is below -(1e-12 + cross_slack) anywhere.
QVDecomposition qv_decompose(const QVMeasure& q);

/// Matrix-valued quadratic variation: curve[k] = sum over intervals starting
/// at or before t_k of dx dx^T.
struct CrossVariation {
  std::vector<double> times;
  std::vector<Matrix> curve;

  /// Increment over [t_a, t_b] of the subdivision (mass at t_a..t_{b-1}).
  Matrix increment(std::size_t a, std::size_t b) const;
};

/// Direct outer-product sums; asserted (1e-12 absolute) against polarization.
CrossVariation cross_variation(const CadlagPath& path, const Subdivision& sub);
/// 1/2([x_i + x_j] - [x_i] - [x_j]) built from scalar sums.
CrossVariation cross_variation_polarized(const CadlagPath& path, const Subdivision& sub);

inline constexpr double kPsdSlack = 1e-12;
inline constexpr double kPolarizationSlack = 1e-12;

/// Largest |entry| difference between the two cross-variation routes.
double polarization_gap(const CrossVariation& a, const CrossVariation& b);
/// Smallest eigenvalue over all increments between consecutive subdivision points
/// and over every increment [t_0, t_k].
double min_increment_eigenvalue(const CrossVariation& cv);

}  // namespace pathcalc
