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
#include <optional>
#include <string>
#include <vector>

#include "core/path_space.hpp"

namespace pathcalc {

enum class GenKind { brownian, compound_poisson, jump_diffusion, zero_qv, deterministic };
const char* to_string(GenKind kind);
GenKind parse_gen_kind(const std::string& text);

struct GenSpec {
  GenKind kind = GenKind::brownian;
  double horizon = 1.0;
  int depth = kDefaultDepth;
  std::uint64_t seed = 42;
  std::size_t dim = 1;  // brownian only; every other kind is scalar

  double sigma = 1.0;  // brownian / jump_diffusion volatility; zero_qv amplitude
  double rate = 0.0;   // jump intensity
  double jump_low = -0.5;
  double jump_high = 0.5;  // equal bounds give constant marks
  double alpha = 0.75;     // zero_qv Hoelder exponent

  std::string shape = "linear";  // deterministic: linear, step, sine
  double amplitude = 1.0;
  double jump_time = 0.5;  // deterministic step

  void validate() const;
};

struct GroundTruth {
  GenKind kind = GenKind::brownian;
  std::uint64_t seed = 0;
  double qv_rate = 0.0;  // expected continuous QV is qv_rate * t
  std::vector<Jump> jumps;
  /// Dirichlet sums: the semimartingale and zero-QV parts.
  std::optional<CadlagPath> martingale_part;
  std::optional<CadlagPath> zero_qv_part;

  double qv_continuous_expected(double t) const { return qv_rate * t; }
};

struct Generated {
  CadlagPath path;
  GroundTruth truth;
};

Generated generate(const GenSpec& spec);

/// x + b for a continuous b (DomainError if b has registered jumps). The
/// expected continuous QV is that of x, taken from `x_truth` when given.
Generated dirichlet_sum(const CadlagPath& x, const CadlagPath& b, const GroundTruth* x_truth = nullptr);

}  // namespace pathcalc
