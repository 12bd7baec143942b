/*
 * Copyright 2026 The pathcalc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 */
#include "core/quadratic_variation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/errors.hpp"
#include "core/summation.hpp"

namespace pathcalc {

const char* to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::dyadic: return "dyadic";
    case Scheme::jump: return "jump";
    case Scheme::stopping: return "stopping";
  }
  return "?";
}

Scheme parse_scheme(const std::string& text) {
  if (text == "dyadic") return Scheme::dyadic;
  if (text == "jump") return Scheme::jump;
  if (text == "stopping") return Scheme::stopping;
  throw ConfigError("unknown subdivision scheme '" + text + "' (expected dyadic, jump or stopping)");
}

std::vector<double> Subdivision::times() const {
  std::vector<double> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(grid.time(i));
  return out;
}

bool Subdivision::contains(std::size_t index) const {
  return std::binary_search(indices.begin(), indices.end(), index);
}

namespace {

std::size_t dyadic_stride(const Grid& grid, std::size_t last_index, int n) {
  if (n < 0) throw DomainError("subdivision level must be nonnegative");
  if (n > grid.depth) {
    throw DomainError("level " + std::to_string(n) + " exceeds grid depth " + std::to_string(grid.depth));
  }
  const std::size_t pieces = std::size_t{1} << n;
  if (last_index == 0 || last_index % pieces != 0) {
    throw PrecisionError("horizon index " + std::to_string(last_index) + " is not divisible into 2^" +
                         std::to_string(n) + " grid-aligned pieces");
  }
  return last_index / pieces;
}

// v jumps are packed symmetric matrices, measured in the Frobenius norm.
double jump_norm(const Jump& jump, std::size_t packed_dim) {
  if (packed_dim == 0) return jump.delta.norm();
  return packed_frobenius({jump.delta.data(), static_cast<std::size_t>(jump.delta.size())}, packed_dim);
}

// Registry indices (x or v, within [1, last]) whose jump passes `keep`.
template <class Keep>
std::vector<std::size_t> jump_indices(const PathPair& p, Keep keep) {
  std::vector<std::size_t> out;
  for (const auto& jump : p.x.registry()) {
    if (jump.index <= p.last_index() && keep(jump_norm(jump, 0))) out.push_back(jump.index);
  }
  for (const auto& jump : p.v.registry()) {
    if (jump.index <= p.last_index() && keep(jump_norm(jump, p.dim()))) out.push_back(jump.index);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

Subdivision dyadic_subdivision(const Grid& grid, std::size_t last_index, int n) {
  const std::size_t stride = dyadic_stride(grid, last_index, n);
  Subdivision sub{grid, {}, n, Scheme::dyadic};
  sub.indices.reserve((std::size_t{1} << n) + 1);
  for (std::size_t i = 0; i <= last_index; i += stride) sub.indices.push_back(i);
  return sub;
}

Subdivision jump_augmented_subdivision(const Subdivision& base, const PathPair& p, int n) {
  if (!(base.grid == p.grid())) throw DomainError("subdivision and pair live on different grids");
  if (base.indices.empty() || base.indices.back() != p.last_index()) {
    throw DomainError("subdivision does not end at the pair horizon");
  }
  Subdivision out = base;
  out.level = n;
  out.scheme = Scheme::jump;
  if (n <= 0) return out;
  const double threshold = 1.0 / n;
  auto extra = jump_indices(p, [&](double size) { return size >= threshold; });
  std::vector<std::size_t> merged;
  merged.reserve(out.indices.size() + extra.size());
  std::set_union(out.indices.begin(), out.indices.end(), extra.begin(), extra.end(), std::back_inserter(merged));
  out.indices = std::move(merged);
  return out;
}

Subdivision stopping_time_subdivision(const PathPair& p, int N) {
  const std::size_t last = p.last_index();
  const std::size_t stride = dyadic_stride(p.grid(), last, N);
  // Strict inequality: a jump of exactly 1/N does not stop.
  const double threshold = N > 0 ? 1.0 / N : std::numeric_limits<double>::infinity();
  const auto big = jump_indices(p, [&](double size) { return size > threshold; });

  Subdivision sub{p.grid(), {0}, N, Scheme::stopping};
  std::size_t tau = 0;
  while (tau < last) {
    std::size_t next = (tau / stride + 1) * stride;
    auto it = std::upper_bound(big.begin(), big.end(), tau);
    if (it != big.end()) next = std::min(next, *it);
    tau = std::min(next, last);
    sub.indices.push_back(tau);
  }

  std::vector<std::size_t> expected;
  const auto dyadic = dyadic_subdivision(p.grid(), last, N).indices;
  std::set_union(dyadic.begin(), dyadic.end(), big.begin(), big.end(), std::back_inserter(expected));
  if (expected != sub.indices) {
    throw ConsistencyError("stopping-time recursion disagrees with the sorted union of dyadic and jump times");
  }
  return sub;
}

Subdivision make_subdivision(Scheme scheme, const PathPair& p, int n) {
  switch (scheme) {
    case Scheme::dyadic: return dyadic_subdivision(p.grid(), p.last_index(), n);
    case Scheme::jump: return jump_augmented_subdivision(dyadic_subdivision(p.grid(), p.last_index(), n), p, n);
    case Scheme::stopping: return stopping_time_subdivision(p, n);
  }
  throw ConfigError("unknown subdivision scheme");
}

// ---------------------------------------------------------------------------

namespace {

void require_aligned(const CadlagPath& path, const Subdivision& sub) {
  if (!(sub.grid == path.grid())) throw DomainError("subdivision and path live on different grids");
  if (sub.indices.empty() || sub.indices.front() != 0 || sub.indices.back() != path.last_index()) {
    throw DomainError("subdivision must run from 0 to the path horizon");
  }
  for (std::size_t k = 1; k < sub.indices.size(); ++k) {
    if (sub.indices[k] <= sub.indices[k - 1]) throw DomainError("subdivision indices must be strictly increasing");
  }
}

}  // namespace

QVMeasure discrete_qv(const CadlagPath& path, const Subdivision& sub, std::size_t component) {
  require_aligned(path, sub);
  if (component >= path.dim()) throw DomainError("QV component out of range");
  const std::size_t k = sub.size();
  QVMeasure q;
  q.level = sub.level;
  q.component = component;
  q.times = sub.times();
  q.curve.resize(k);
  q.atomic.resize(k);
  q.continuous.resize(k);
  q.cross_slack.resize(k);
  CompensatedSum curve;
  CompensatedSum atomic;
  double slack = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (i + 1 < k) {
      const std::size_t right = sub.indices[i + 1];
      const double inc = path.sample(right, component) - path.sample(sub.indices[i], component);
      curve.add(inc * inc);
      if (const Jump* jump = path.jump_at(right)) {
        const double delta = jump->delta(static_cast<Eigen::Index>(component));
        if (delta != 0.0) {
          q.atoms.push_back({sub.grid.time(right), right, delta * delta});
          atomic.add(delta * delta);
          slack += std::abs(2.0 * (inc - delta) * delta);
        }
      }
    }
    q.curve[i] = curve.value();
    q.atomic[i] = atomic.value();
    q.continuous[i] = q.curve[i] - q.atomic[i];
    q.cross_slack[i] = slack;
  }
  qv_decompose(q);
  return q;
}

std::vector<QVMeasure> discrete_qv_all(const CadlagPath& path, const Subdivision& sub) {
  std::vector<QVMeasure> out;
  for (std::size_t c = 0; c < path.dim(); ++c) out.push_back(discrete_qv(path, sub, c));
  return out;
}

QVDecomposition qv_decompose(const QVMeasure& q) {
  QVDecomposition out{std::vector<double>(q.curve.size()), q.atoms};
  // Atoms are accumulated on the interval whose increment contains them, so
  // walk the atoms in step with the intervals.
  std::size_t a = 0;
  CompensatedSum atomic;
  for (std::size_t i = 0; i < q.curve.size(); ++i) {
    if (i + 1 < q.times.size()) {
      while (a < q.atoms.size() && q.atoms[a].time <= q.times[i + 1]) atomic.add(q.atoms[a++].weight);
    }
    out.continuous[i] = q.curve[i] - atomic.value();
    const double slack = i < q.cross_slack.size() ? q.cross_slack[i] : 0.0;
    if (out.continuous[i] < -(1e-12 + slack)) {
      throw ConsistencyError("continuous part of the quadratic variation is negative (" +
                             std::to_string(out.continuous[i]) + ") at t = " + std::to_string(q.times[i]) +
                             "; registry and subdivision disagree");
    }
  }
  if (a != q.atoms.size()) throw ConsistencyError("atom beyond the subdivision horizon");
  return out;
}

// ---------------------------------------------------------------------------

Matrix CrossVariation::increment(std::size_t a, std::size_t b) const {
  if (!(a <= b && b < curve.size())) throw DomainError("cross-variation increment indices out of range");
  const Matrix before = a == 0 ? Matrix::Zero(curve[0].rows(), curve[0].cols()) : curve[a - 1];
  const Matrix upto = b == 0 ? Matrix::Zero(curve[0].rows(), curve[0].cols()) : curve[b - 1];
  return upto - before;
}

CrossVariation cross_variation(const CadlagPath& path, const Subdivision& sub) {
  require_aligned(path, sub);
  const auto d = static_cast<Eigen::Index>(path.dim());
  CrossVariation cv;
  cv.times = sub.times();
  Matrix acc = Matrix::Zero(d, d);
  Vector dx(d);
  for (std::size_t i = 0; i < sub.size(); ++i) {
    if (i + 1 < sub.size()) {
      dx = path.value(sub.indices[i + 1]) - path.value(sub.indices[i]);
      acc.noalias() += dx * dx.transpose();
    }
    cv.curve.push_back(acc);
  }
  const double gap = polarization_gap(cv, cross_variation_polarized(path, sub));
  if (gap > kPolarizationSlack) {
    throw ConsistencyError("polarization identity violated by " + std::to_string(gap));
  }
  return cv;
}

CrossVariation cross_variation_polarized(const CadlagPath& path, const Subdivision& sub) {
  require_aligned(path, sub);
  const std::size_t d = path.dim();
  CrossVariation cv;
  cv.times = sub.times();
  // sums[i][j] accumulates (dx_i + dx_j)^2 for i < j and dx_i^2 on the diagonal.
  std::vector<CompensatedSum> sums(d * d);
  for (std::size_t k = 0; k < sub.size(); ++k) {
    if (k + 1 < sub.size()) {
      auto a = path.sample(sub.indices[k]);
      auto b = path.sample(sub.indices[k + 1]);
      for (std::size_t i = 0; i < d; ++i) {
        const double di = b[i] - a[i];
        sums[i * d + i].add(di * di);
        for (std::size_t j = i + 1; j < d; ++j) {
          const double s = di + (b[j] - a[j]);
          sums[i * d + j].add(s * s);
        }
      }
    }
    Matrix m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      m(ii, ii) = sums[i * d + i].value();
      for (std::size_t j = i + 1; j < d; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        m(ii, jj) = 0.5 * (sums[i * d + j].value() - sums[i * d + i].value() - sums[j * d + j].value());
        m(jj, ii) = m(ii, jj);
      }
    }
    cv.curve.push_back(std::move(m));
  }
  return cv;
}

double polarization_gap(const CrossVariation& a, const CrossVariation& b) {
  if (a.curve.size() != b.curve.size()) throw DomainError("cross-variation curves have different lengths");
  double gap = 0.0;
  for (std::size_t k = 0; k < a.curve.size(); ++k) gap = std::max(gap, (a.curve[k] - b.curve[k]).cwiseAbs().maxCoeff());
  return gap;
}

double min_increment_eigenvalue(const CrossVariation& cv) {
  double lowest = std::numeric_limits<double>::infinity();
  auto update = [&](const Matrix& m) {
    if (m.rows() == 1) {
      lowest = std::min(lowest, m(0, 0));
    } else {
      Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
      lowest = std::min(lowest, solver.eigenvalues().minCoeff());
    }
  };
  const std::size_t k = cv.curve.size();
  for (std::size_t b = 1; b < k; ++b) {
    update(cv.increment(b - 1, b));
    update(cv.increment(0, b));
  }
  return k > 1 ? lowest : 0.0;
}

}  // namespace pathcalc
