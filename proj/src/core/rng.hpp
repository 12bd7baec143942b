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

namespace pathcalc {

/// Fixed stream ids; adding a stream never shifts the draws of another.
enum class Stream : std::uint64_t {
  brownian = 1,
  jump_times = 2,
  jump_marks = 3,
  phases = 4,
  probe = 5,
  perturbation = 6,
};

/// Counter-based generator keyed by (seed, stream).
///
/// Draw n is SplitMix64's output for state key + (n + 1) * golden, so any draw
/// can be computed independently of the others and the sequence is identical
/// on every platform. Gaussians use Box-Muller on draws (2n, 2n + 1).
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, Stream stream);
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t bits(std::uint64_t counter) const;
  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform(std::uint64_t counter) const;
  double normal(std::uint64_t counter) const;

  std::uint64_t next_bits() { return bits(counter_++); }
  double next_uniform() { return uniform(counter_++); }
  double next_normal() { return normal(counter_++); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace pathcalc
