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

// Seeded sample paths shared by the unit tests and the acceptance binary.

#include <string>
#include <vector>

#include "core/generators.hpp"
#include "core/path_space.hpp"

namespace pathcalc::testing {

inline constexpr std::uint64_t kShippedSeed = 42;

struct CorpusPath {
  std::string name;
  PathPair pair;
  bool has_jumps = false;
};

inline PathPair with_rate(const Generated& g) {
  const std::size_t d = g.path.dim();
  Vector v = Vector::Zero(static_cast<Eigen::Index>(packed_size(d)));
  for (std::size_t i = 0; i < d; ++i) v(static_cast<Eigen::Index>(packed_index(i, i, d))) = g.truth.qv_rate;
  return PathPair::with_constant_v(g.path, v);
}

inline Generated make(GenKind kind, std::uint64_t seed = kShippedSeed, int depth = 16) {
  GenSpec spec;
  spec.kind = kind;
  spec.seed = seed;
  spec.depth = depth;
  if (kind == GenKind::compound_poisson || kind == GenKind::jump_diffusion) spec.rate = 5.0;
  return generate(spec);
}

inline Generated dirichlet(std::uint64_t seed = kShippedSeed, int depth = 16) {
  const Generated bm = make(GenKind::brownian, seed, depth);
  const Generated zq = make(GenKind::zero_qv, seed, depth);
  return dirichlet_sum(bm.path, zq.path, &bm.truth);
}

/// linear, pure-jump, Brownian (1-d and 3-d), jump-diffusion and Dirichlet paths.
inline std::vector<CorpusPath> corpus(int depth = 16) {
  std::vector<CorpusPath> out;
  out.push_back({"linear", with_rate(make(GenKind::deterministic, kShippedSeed, depth)), false});
  out.push_back({"pure_jump", with_rate(make(GenKind::compound_poisson, kShippedSeed, depth)), true});
  out.push_back({"brownian", with_rate(make(GenKind::brownian, kShippedSeed, depth)), false});
  {
    GenSpec spec;
    spec.seed = kShippedSeed;
    spec.depth = depth;
    spec.dim = 3;
    out.push_back({"brownian_3d", with_rate(generate(spec)), false});
  }
  out.push_back({"jump_diffusion", with_rate(make(GenKind::jump_diffusion, kShippedSeed, depth)), true});
  out.push_back({"dirichlet", with_rate(dirichlet(kShippedSeed, depth)), false});
  return out;
}

}  // namespace pathcalc::testing
