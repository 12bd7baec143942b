/*
 * Copyright 2026 The pathcalc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 */
#include "core/path_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <string>

#include "core/errors.hpp"

namespace pathcalc {

namespace detail {

struct PathStorage {
  std::vector<double> values;
  std::vector<Jump> jumps;

  mutable std::mutex mu;
  mutable std::map<std::string, std::shared_ptr<const std::vector<double>>> cache;

  std::shared_ptr<const std::vector<double>> cached(
      const std::string& key, const std::function<std::vector<double>()>& build) const {
    {
      std::lock_guard<std::mutex> lock(mu);
      auto it = cache.find(key);
      if (it != cache.end()) return it->second;
    }
    auto built = std::make_shared<const std::vector<double>>(build());
    std::lock_guard<std::mutex> lock(mu);
    auto [it, inserted] = cache.emplace(key, built);
    return it->second;
  }
};

}  // namespace detail

namespace {

bool all_zero(const Vector& v) { return (v.array() == 0.0).all(); }

}  // namespace

// ---------------------------------------------------------------------------
// CadlagPath

CadlagPath CadlagPath::from_samples(const Grid& grid, std::size_t dim, std::vector<double> values,
                                    std::vector<Jump> jumps) {
  if (dim == 0) throw DomainError("path dimension must be positive");
  if (values.empty() || values.size() % dim != 0) {
    throw DomainError("sample buffer size " + std::to_string(values.size()) +
                      " is not a positive multiple of dim " + std::to_string(dim));
  }
  const std::size_t count = values.size() / dim;
  if (count - 1 > grid.intervals()) {
    throw DomainError("path has " + std::to_string(count) + " samples but the grid only holds " +
                      std::to_string(grid.intervals() + 1));
  }
  for (double value : values) {
    if (!std::isfinite(value)) throw DomainError("path samples must be finite");
  }
  std::sort(jumps.begin(), jumps.end(),
            [](const Jump& a, const Jump& b) { return a.index < b.index; });
  std::vector<Jump> kept;
  kept.reserve(jumps.size());
  for (auto& jump : jumps) {
    if (jump.index == 0 || jump.index >= count) {
      throw DomainError("jump index " + std::to_string(jump.index) + " outside ]0, horizon]");
    }
    if (static_cast<std::size_t>(jump.delta.size()) != dim) {
      throw DomainError("jump delta has wrong dimension");
    }
    if (!kept.empty() && kept.back().index == jump.index) {
      throw DomainError("duplicate jump at grid index " + std::to_string(jump.index));
    }
    if (!jump.delta.allFinite()) throw DomainError("jump delta must be finite");
    if (all_zero(jump.delta)) continue;
    kept.push_back(std::move(jump));
  }

  auto store = std::make_shared<detail::PathStorage>();
  store->values = std::move(values);
  store->jumps = std::move(kept);

  CadlagPath path;
  path.grid_ = grid;
  path.dim_ = dim;
  path.last_ = count - 1;
  path.base_count_ = count;
  path.jump_count_ = store->jumps.size();
  path.store_ = std::move(store);
  return path;
}

CadlagPath CadlagPath::constant(const Grid& grid, const Vector& value, std::size_t last_index) {
  if (value.size() == 0) throw DomainError("path dimension must be positive");
  if (last_index > grid.intervals()) throw DomainError("constant path longer than the grid");
  std::vector<double> first(value.data(), value.data() + value.size());
  return from_samples(grid, static_cast<std::size_t>(value.size()), std::move(first))
      .extended_by(last_index);
}

const std::vector<Jump>& CadlagPath::store_jumps() const { return store_->jumps; }

std::span<const double> CadlagPath::sample(std::size_t index) const {
  if (index < base_count_) return {store_->values.data() + index * dim_, dim_};
  return {tail_.data(), dim_};
}

Vector CadlagPath::value(std::size_t index) const {
  auto s = sample(index);
  return Eigen::Map<const Vector>(s.data(), static_cast<Eigen::Index>(s.size()));
}

Vector CadlagPath::left_value(std::size_t index) const {
  Vector out = value(index);
  if (const Jump* jump = jump_at(index)) out -= jump->delta;
  return out;
}

const Jump* CadlagPath::jump_at(std::size_t index) const {
  if (tail_jump_ && tail_jump_->index == index) return &*tail_jump_;
  if (!store_ || jump_count_ == 0) return nullptr;
  const auto& all = store_->jumps;
  auto end = all.begin() + static_cast<std::ptrdiff_t>(jump_count_);
  auto it = std::lower_bound(all.begin(), end, index,
                             [](const Jump& j, std::size_t i) { return j.index < i; });
  if (it != end && it->index == index) return &*it;
  return nullptr;
}

std::vector<Jump> CadlagPath::registry() const {
  std::vector<Jump> out;
  if (store_) out.assign(store_->jumps.begin(), store_->jumps.begin() + static_cast<std::ptrdiff_t>(jump_count_));
  if (tail_jump_) out.push_back(*tail_jump_);
  return out;
}

double CadlagPath::left_sum(const std::string& key,
                            const std::function<double(std::span<const double>)>& g) const {
  const auto& store = *store_;
  const std::size_t stored = store.values.size() / dim_;
  auto cumulative = store.cached("sum:" + key, [&] {
    std::vector<double> cum(stored + 1, 0.0);
    for (std::size_t j = 0; j < stored; ++j) {
      cum[j + 1] = cum[j] + g({store.values.data() + j * dim_, dim_});
    }
    return cum;
  });
  const std::size_t from_store = std::min(last_, base_count_);
  double total = (*cumulative)[from_store];
  if (has_tail() && last_ > base_count_) {
    total += static_cast<double>(last_ - base_count_) * g(std::span<const double>(tail_));
  }
  return total;
}

double CadlagPath::running_max(std::size_t component) const {
  const auto& store = *store_;
  const std::size_t stored = store.values.size() / dim_;
  auto prefix = store.cached("max:" + std::to_string(component), [&] {
    std::vector<double> pm(stored + 1, -std::numeric_limits<double>::infinity());
    for (std::size_t j = 0; j < stored; ++j) {
      pm[j + 1] = std::max(pm[j], store.values[j * dim_ + component]);
    }
    return pm;
  });
  double result = (*prefix)[std::min(last_ + 1, base_count_)];
  if (has_tail()) result = std::max(result, tail_[component]);
  return result;
}

std::vector<double> CadlagPath::materialize() const {
  std::vector<double> out;
  out.reserve(size() * dim_);
  for (std::size_t i = 0; i <= last_; ++i) {
    auto s = sample(i);
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

CadlagPath CadlagPath::restricted_to(std::size_t index) const {
  if (index > last_) throw DomainError("restriction index beyond the path horizon");
  CadlagPath out = *this;
  out.last_ = index;
  if (index < base_count_) {
    out.base_count_ = index + 1;
    out.tail_.clear();
    out.tail_jump_.reset();
    const auto& all = store_->jumps;
    auto end = all.begin() + static_cast<std::ptrdiff_t>(jump_count_);
    auto it = std::upper_bound(all.begin(), end, index,
                               [](std::size_t i, const Jump& j) { return i < j.index; });
    out.jump_count_ = static_cast<std::size_t>(it - all.begin());
  }
  return out;
}

CadlagPath CadlagPath::with_endpoint(const Vector& value, const std::optional<Vector>& jump) const {
  std::optional<Jump> endpoint_jump;
  if (jump && !all_zero(*jump)) {
    if (last_ == 0) throw DomainError("cannot register a jump at time 0");
    endpoint_jump = Jump{last_, *jump};
  }
  CadlagPath out = *this;
  if (!has_tail() || last_ == base_count_) {
    if (!has_tail()) {
      out.base_count_ = last_;
      const auto& all = store_->jumps;
      auto end = all.begin() + static_cast<std::ptrdiff_t>(jump_count_);
      auto it = std::lower_bound(all.begin(), end, last_,
                                 [](const Jump& j, std::size_t i) { return j.index < i; });
      out.jump_count_ = static_cast<std::size_t>(it - all.begin());
    }
    out.tail_.assign(value.data(), value.data() + value.size());
    out.tail_jump_ = std::move(endpoint_jump);
    return out;
  }
  // Endpoint sits inside a constant tail longer than one sample: flatten.
  std::vector<double> values;
  values.reserve(last_ * dim_);
  for (std::size_t i = 0; i < last_; ++i) {
    auto s = sample(i);
    values.insert(values.end(), s.begin(), s.end());
  }
  auto store = std::make_shared<detail::PathStorage>();
  store->values = std::move(values);
  store->jumps = registry();
  out.store_ = store;
  out.base_count_ = last_;
  out.jump_count_ = store->jumps.size();
  out.tail_.assign(value.data(), value.data() + value.size());
  out.tail_jump_ = std::move(endpoint_jump);
  return out;
}

CadlagPath CadlagPath::stopped_before_index(std::size_t index) const {
  CadlagPath r = restricted_to(index);
  const Jump* jump = r.jump_at(index);
  if (!jump) return r;
  return r.with_endpoint(r.left_value(index), std::nullopt);
}

CadlagPath CadlagPath::extended_by(std::size_t steps) const {
  if (last_ + steps > grid_.intervals()) {
    throw DomainError("horizontal extension beyond the master grid horizon");
  }
  if (steps == 0) return *this;
  CadlagPath out = *this;
  if (!has_tail()) {
    const Jump* jump = jump_at(last_);
    out.tail_jump_ = jump ? std::optional<Jump>(*jump) : std::nullopt;
    if (jump) --out.jump_count_;
    auto s = sample(last_);
    out.tail_.assign(s.begin(), s.end());
    out.base_count_ = last_;
  }
  out.last_ = last_ + steps;
  return out;
}

CadlagPath CadlagPath::endpoint_bumped(const Vector& e) const {
  if (static_cast<std::size_t>(e.size()) != dim_) throw DomainError("perturbation has wrong dimension");
  if (all_zero(e)) return *this;
  // x(0) has no left limit, so a bump there moves the initial value instead.
  if (last_ == 0) return with_endpoint(value(0) + e, std::nullopt);
  Vector jump = e;
  if (const Jump* existing = jump_at(last_)) jump += existing->delta;
  return with_endpoint(value(last_) + e, jump);
}

// ---------------------------------------------------------------------------
// PathPair

std::size_t packed_size(std::size_t d) { return d * (d + 1) / 2; }

std::size_t dim_from_packed(std::size_t packed) {
  std::size_t d = 0;
  while (packed_size(d) < packed) ++d;
  if (packed_size(d) != packed) throw DomainError("not a packed symmetric size: " + std::to_string(packed));
  return d;
}

std::size_t packed_index(std::size_t i, std::size_t j, std::size_t d) {
  if (i > j) std::swap(i, j);
  return i * d - i * (i - 1) / 2 + (j - i);
}

Matrix unpack_symmetric(std::span<const double> packed, std::size_t d) {
  Matrix m(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      m(i, j) = m(j, i) = packed[packed_index(i, j, d)];
    }
  }
  return m;
}

double packed_frobenius(std::span<const double> packed, std::size_t d) {
  double sum = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      const double value = packed[packed_index(i, j, d)];
      sum += (i == j ? 1.0 : 2.0) * value * value;
    }
  }
  return std::sqrt(sum);
}

namespace {

void require_psd(std::span<const double> packed, std::size_t d, std::size_t index) {
  if (d == 1) {
    if (packed[0] < 0.0) {
      throw DomainError("v must be nonnegative; sample " + std::to_string(index) + " is " +
                        std::to_string(packed[0]));
    }
    return;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(unpack_symmetric(packed, d), Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, solver.eigenvalues().cwiseAbs().maxCoeff());
  if (solver.eigenvalues().minCoeff() < -1e-12 * scale) {
    throw DomainError("v sample " + std::to_string(index) + " is not positive semidefinite");
  }
}

}  // namespace

PathPair::PathPair(CadlagPath x_, CadlagPath v_) : x(std::move(x_)), v(std::move(v_)) {
  if (x.empty() || v.empty()) throw DomainError("path pair requires nonempty x and v");
  if (!(x.grid() == v.grid())) throw DomainError("x and v live on different grids");
  if (x.last_index() != v.last_index()) throw DomainError("x and v must share the same horizon");
  if (v.dim() != packed_size(x.dim())) {
    throw DomainError("v must have dimension d(d+1)/2 = " + std::to_string(packed_size(x.dim())));
  }
  for (std::size_t i = 0; i <= v.last_index(); ++i) require_psd(v.sample(i), x.dim(), i);
}

PathPair PathPair::unchecked(CadlagPath x, CadlagPath v) {
  PathPair p;
  p.x = std::move(x);
  p.v = std::move(v);
  return p;
}

PathPair PathPair::with_constant_v(CadlagPath x, const Vector& v_value) {
  if (static_cast<std::size_t>(v_value.size()) != packed_size(x.dim())) {
    throw DomainError("constant v has wrong packed dimension");
  }
  require_psd({v_value.data(), static_cast<std::size_t>(v_value.size())}, x.dim(), 0);
  CadlagPath v = CadlagPath::constant(x.grid(), v_value, x.last_index());
  return unchecked(std::move(x), std::move(v));
}

// ---------------------------------------------------------------------------
// Free operations

namespace {

std::size_t index_within(const CadlagPath& path, double t) {
  const std::size_t index = path.grid().require_index(t);
  if (index > path.last_index()) {
    throw DomainError("time " + std::to_string(t) + " beyond path horizon " + std::to_string(path.horizon()));
  }
  return index;
}

void require_in_domain(const CadlagPath& path, double t) {
  const double slack = 1e-12 * path.grid().horizon;
  if (!(t >= -slack && t <= path.horizon() + slack)) {
    throw DomainError("time " + std::to_string(t) + " outside [0, " + std::to_string(path.horizon()) + "]");
  }
}

}  // namespace

Vector eval(const CadlagPath& path, double t) {
  require_in_domain(path, t);
  return path.value(std::min(path.grid().floor_index(t), path.last_index()));
}

Vector left_limit(const CadlagPath& path, double t) {
  require_in_domain(path, t);
  if (auto index = path.grid().index_of(t)) {
    return path.left_value(std::min(*index, path.last_index()));
  }
  return path.value(std::min(path.grid().floor_index(t), path.last_index()));
}

CadlagPath restrict(const CadlagPath& path, double t) { return path.restricted_to(index_within(path, t)); }

CadlagPath stopped_before(const CadlagPath& path, double t) {
  return path.stopped_before_index(index_within(path, t));
}

CadlagPath horizontal_extend(const CadlagPath& path, double h) {
  if (h < 0.0) throw DomainError("horizontal extension needs h >= 0, got " + std::to_string(h));
  return path.extended_by(path.grid().steps_in(h));
}

CadlagPath vertical_perturb(const CadlagPath& path, const Vector& e) { return path.endpoint_bumped(e); }

PathPair restrict(const PathPair& p, double t) { return restrict_index(p, index_within(p.x, t)); }

PathPair restrict_index(const PathPair& p, std::size_t index) {
  return PathPair::unchecked(p.x.restricted_to(index), p.v.restricted_to(index));
}

PathPair stopped_before(const PathPair& p, double t) { return stopped_before_index(p, index_within(p.x, t)); }

PathPair stopped_before_index(const PathPair& p, std::size_t index) {
  return PathPair::unchecked(p.x.stopped_before_index(index), p.v.stopped_before_index(index));
}

PathPair horizontal_extend(const PathPair& p, double h) {
  if (h < 0.0) throw DomainError("horizontal extension needs h >= 0, got " + std::to_string(h));
  return extend_steps(p, p.grid().steps_in(h));
}

PathPair extend_steps(const PathPair& p, std::size_t steps) {
  return PathPair::unchecked(p.x.extended_by(steps), p.v.extended_by(steps));
}

PathPair vertical_perturb(const PathPair& p, const Vector& e) {
  return PathPair::unchecked(p.x.endpoint_bumped(e), p.v);
}

double d_infty(const PathPair& p, const PathPair& q) {
  if (!(p.grid() == q.grid())) throw DomainError("d_infty: pairs live on different grids");
  if (q.last_index() < p.last_index()) {
    throw DomainError("d_infty: second argument must have the longer horizon");
  }
  if (p.dim() != q.dim()) throw DomainError("d_infty: dimension mismatch");
  const std::size_t d = p.dim();
  const std::size_t pv = p.v.dim();
  double sup_x = 0.0;
  double sup_v = 0.0;
  std::vector<double> diff(std::max(d, pv));
  for (std::size_t i = 0; i <= q.last_index(); ++i) {
    const std::size_t ip = std::min(i, p.last_index());
    auto a = p.x.sample(ip);
    auto b = q.x.sample(i);
    double norm2 = 0.0;
    for (std::size_t c = 0; c < d; ++c) norm2 += (a[c] - b[c]) * (a[c] - b[c]);
    sup_x = std::max(sup_x, std::sqrt(norm2));
    auto va = p.v.sample(ip);
    auto vb = q.v.sample(i);
    for (std::size_t c = 0; c < pv; ++c) diff[c] = va[c] - vb[c];
    sup_v = std::max(sup_v, packed_frobenius({diff.data(), pv}, d));
  }
  const double h = q.horizon() - p.horizon();
  return sup_x + sup_v + h;
}

std::vector<TimedJump> jumps(const CadlagPath& path, double threshold) {
  std::vector<TimedJump> out;
  for (const auto& jump : path.registry()) {
    if (jump.delta.norm() >= threshold) {
      out.push_back({path.grid().time(jump.index), jump.index, jump.delta});
    }
  }
  return out;
}

StepApproximation step_approximation(const CadlagPath& path, std::span<const std::size_t> indices) {
  if (indices.empty() || indices.front() != 0 || indices.back() != path.last_index()) {
    throw DomainError("step approximation needs a subdivision from 0 to the path horizon");
  }
  const std::size_t d = path.dim();
  std::vector<double> values;
  values.reserve(path.size() * d);
  std::vector<Jump> step_jumps;
  double sup_error = 0.0;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const std::size_t from = indices[k];
    if (k > 0 && from <= indices[k - 1]) throw DomainError("subdivision indices must be increasing");
    const std::size_t to = (k + 1 < indices.size()) ? indices[k + 1] : from + 1;
    auto anchor = path.sample(from);
    if (from > 0) {
      if (const Jump* jump = path.jump_at(from)) step_jumps.push_back(*jump);
    }
    for (std::size_t j = from; j < to; ++j) {
      values.insert(values.end(), anchor.begin(), anchor.end());
      auto actual = path.sample(j);
      double norm2 = 0.0;
      for (std::size_t c = 0; c < d; ++c) norm2 += (actual[c] - anchor[c]) * (actual[c] - anchor[c]);
      sup_error = std::max(sup_error, std::sqrt(norm2));
    }
  }
  return {CadlagPath::from_samples(path.grid(), d, std::move(values), std::move(step_jumps)), sup_error};
}

bool identical(const CadlagPath& a, const CadlagPath& b) {
  if (!(a.grid() == b.grid()) || a.dim() != b.dim() || a.last_index() != b.last_index()) return false;
  if (a.materialize() != b.materialize()) return false;
  auto ra = a.registry();
  auto rb = b.registry();
  if (ra.size() != rb.size()) return false;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    if (ra[i].index != rb[i].index || ra[i].delta != rb[i].delta) return false;
  }
  return true;
}

}  // namespace pathcalc
