/*
 * Copyright 2026 The pathcalc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 */
#include "core/generators.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace pathcalc {

const char* to_string(GenKind kind) {
  switch (kind) {
    case GenKind::brownian: return "brownian";
    case GenKind::compound_poisson: return "compound_poisson";
    case GenKind::jump_diffusion: return "jump_diffusion";
    case GenKind::zero_qv: return "zero_qv";
    case GenKind::deterministic: return "deterministic";
  }
  return "?";
}

GenKind parse_gen_kind(const std::string& text) {
  if (text == "brownian") return GenKind::brownian;
  if (text == "compound_poisson") return GenKind::compound_poisson;
  if (text == "jump_diffusion") return GenKind::jump_diffusion;
  if (text == "zero_qv") return GenKind::zero_qv;
  if (text == "deterministic") return GenKind::deterministic;
  throw ConfigError("unknown path kind '" + text +
                    "' (expected brownian, compound_poisson, jump_diffusion, zero_qv or deterministic)");
}

void GenSpec::validate() const {
  Grid(horizon, depth);  // validates horizon and depth
  if (dim == 0) throw ConfigError("dimension must be positive");
  if (dim != 1 && kind != GenKind::brownian) throw ConfigError("only brownian paths may have dimension > 1");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("sigma must be finite and >= 0");
  if (!(rate >= 0.0) || !std::isfinite(rate)) throw ConfigError("jump rate must be finite and >= 0");
  if (!(jump_low <= jump_high) || !std::isfinite(jump_low) || !std::isfinite(jump_high)) {
    throw ConfigError("jump law needs finite bounds with low <= high");
  }
  if (kind == GenKind::zero_qv && !(alpha > 0.5 && alpha < 1.0)) throw ConfigError("alpha must lie in (0.5, 1)");
  if (kind == GenKind::deterministic && shape != "linear" && shape != "step" && shape != "sine") {
    throw ConfigError("unknown deterministic shape '" + shape + "' (expected linear, step or sine)");
  }
  if (!std::isfinite(amplitude)) throw ConfigError("amplitude must be finite");
}

namespace {

std::vector<double> brownian_values(const Grid& grid, std::size_t dim, double sigma, std::uint64_t seed) {
  const std::size_t n = grid.intervals();
  const double scale = sigma * std::sqrt(grid.step());
  const CounterRng rng(seed, Stream::brownian);
  std::vector<double> values((n + 1) * dim, 0.0);
  for (std::size_t j = 1; j <= n; ++j) {
    for (std::size_t c = 0; c < dim; ++c) {
      values[j * dim + c] = values[(j - 1) * dim + c] + scale * rng.normal((j - 1) * dim + c);
    }
  }
  return values;
}

// Jump times from exponential gaps, snapped up to the grid; marks uniform on
// [low, high]. Jumps sharing a grid cell are merged.
std::vector<Jump> poisson_jumps(const Grid& grid, double rate, double low, double high, std::uint64_t seed) {
  std::map<std::size_t, double> cells;
  if (rate > 0.0) {
    const CounterRng times(seed, Stream::jump_times);
    const CounterRng marks(seed, Stream::jump_marks);
    double t = 0.0;
    for (std::uint64_t k = 0;; ++k) {
      t += -std::log(times.uniform(k)) / rate;
      if (t > grid.horizon) break;
      const auto index = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(t / grid.step() - 1e-9)));
      cells[std::min(index, grid.intervals())] += low + (high - low) * marks.uniform(k);
    }
  }
  std::vector<Jump> out;
  for (const auto& [index, delta] : cells) {
    if (delta != 0.0) out.push_back({index, Vector::Constant(1, delta)});
  }
  return out;
}

void add_jumps(std::vector<double>& values, const std::vector<Jump>& jumps) {
  const std::size_t n = values.size();
  for (const auto& jump : jumps) {
    for (std::size_t j = jump.index; j < n; ++j) values[j] += jump.delta(0);
  }
}

std::vector<double> zero_qv_values(const Grid& grid, double amplitude, double alpha, std::uint64_t seed) {
  const std::size_t n = grid.intervals();
  const CounterRng phases(seed, Stream::phases);
  std::vector<double> values(n + 1, 0.0);
  for (int j = 0; j <= grid.depth; ++j) {
    const double weight = amplitude * std::pow(2.0, -alpha * j);
    const double freq = std::ldexp(std::numbers::pi, j) / grid.horizon;
    const double phase = 2.0 * std::numbers::pi * phases.uniform(static_cast<std::uint64_t>(j));
    const double start = weight * std::cos(phase);
    for (std::size_t i = 0; i <= n; ++i) values[i] += weight * std::cos(freq * grid.time(i) + phase) - start;
  }
  return values;
}

Generated deterministic(const GenSpec& spec, const Grid& grid) {
  const std::size_t n = grid.intervals();
  std::vector<double> values(n + 1);
  std::vector<Jump> planted;
  if (spec.shape == "linear") {
    for (std::size_t i = 0; i <= n; ++i) values[i] = spec.amplitude * grid.time(i);
  } else if (spec.shape == "sine") {
    for (std::size_t i = 0; i <= n; ++i) {
      values[i] = spec.amplitude * std::sin(2.0 * std::numbers::pi * grid.time(i) / grid.horizon);
    }
  } else {
    const auto index = grid.index_of(spec.jump_time);
    if (!index || *index == 0) throw ConfigError("step jump time must be a positive grid time");
    for (std::size_t i = 0; i <= n; ++i) values[i] = i >= *index ? spec.amplitude : 0.0;
    if (spec.amplitude != 0.0) planted.push_back({*index, Vector::Constant(1, spec.amplitude)});
  }
  Generated out{CadlagPath::from_samples(grid, 1, std::move(values), planted), {}};
  out.truth.jumps = std::move(planted);
  return out;
}

}  // namespace

Generated generate(const GenSpec& spec) {
  spec.validate();
  const Grid grid(spec.horizon, spec.depth);
  Generated out;
  switch (spec.kind) {
    case GenKind::brownian:
      out.path = CadlagPath::from_samples(grid, spec.dim, brownian_values(grid, spec.dim, spec.sigma, spec.seed));
      out.truth.qv_rate = spec.sigma * spec.sigma;
      break;
    case GenKind::compound_poisson:
    case GenKind::jump_diffusion: {
      std::vector<double> values = spec.kind == GenKind::jump_diffusion
                                       ? brownian_values(grid, 1, spec.sigma, spec.seed)
                                       : std::vector<double>(grid.intervals() + 1, 0.0);
      auto planted = poisson_jumps(grid, spec.rate, spec.jump_low, spec.jump_high, spec.seed);
      add_jumps(values, planted);
      out.path = CadlagPath::from_samples(grid, 1, std::move(values), planted);
      out.truth.jumps = std::move(planted);
      out.truth.qv_rate = spec.kind == GenKind::jump_diffusion ? spec.sigma * spec.sigma : 0.0;
      break;
    }
    case GenKind::zero_qv:
      out.path = CadlagPath::from_samples(grid, 1, zero_qv_values(grid, spec.sigma, spec.alpha, spec.seed));
      break;
    case GenKind::deterministic:
      out = deterministic(spec, grid);
      break;
  }
  out.truth.kind = spec.kind;
  out.truth.seed = spec.seed;
  return out;
}

Generated dirichlet_sum(const CadlagPath& x, const CadlagPath& b, const GroundTruth* x_truth) {
  if (!(x.grid() == b.grid()) || x.last_index() != b.last_index() || x.dim() != b.dim()) {
    throw DomainError("dirichlet_sum: paths must share grid, horizon and dimension");
  }
  if (b.jump_count() != 0) throw DomainError("dirichlet_sum: the zero-QV part must be continuous (empty registry)");
  std::vector<double> values = x.materialize();
  const std::vector<double> bv = b.materialize();
  for (std::size_t i = 0; i < values.size(); ++i) values[i] += bv[i];
  Generated out{CadlagPath::from_samples(x.grid(), x.dim(), std::move(values), x.registry()), {}};
  if (x_truth) out.truth = *x_truth;
  out.truth.jumps = x.registry();
  out.truth.martingale_part = x;
  out.truth.zero_qv_part = b;
  return out;
}

}  // namespace pathcalc
