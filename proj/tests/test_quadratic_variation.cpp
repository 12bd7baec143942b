/*
 * Copyright 2026 The pathcalc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 */
#include <gtest/gtest.h>

#include <cmath>

#include "core/errors.hpp"
#include "core/quadratic_variation.hpp"
#include "corpus.hpp"

namespace pathcalc {
namespace {

using testing::make;
using testing::with_rate;

TEST(Subdivision, Dyadic) {
  const Grid g(1.0, 6);
  const auto s = dyadic_subdivision(g, 3);
  EXPECT_EQ(s.size(), 9u);
  EXPECT_EQ(s.indices[1], 8u);
  EXPECT_TRUE(s.contains(16));
  EXPECT_FALSE(s.contains(17));
  EXPECT_THROW(dyadic_subdivision(g, 7), DomainError);
  EXPECT_THROW(dyadic_subdivision(g, 40, 4), PrecisionError);
  EXPECT_EQ(dyadic_subdivision(g, 32, 2).indices.back(), 32u);
}

TEST(Subdivision, JumpAugmentedAndStoppingAgree) {
  const PathPair p = with_rate(make(GenKind::jump_diffusion, 3, 12));
  for (int n : {0, 1, 3, 8, 12}) {
    const auto a = make_subdivision(Scheme::jump, p, n);
    const auto b = make_subdivision(Scheme::stopping, p, n);
    EXPECT_EQ(a.indices, b.indices) << n;  // no jump sits exactly at 1/n
    for (const auto& j : jumps(p.x, n > 0 ? 1.0 / n : 1e300)) EXPECT_TRUE(a.contains(j.index));
  }
}

TEST(Subdivision, BoundaryJumpSeparatesSchemes) {
  // A jump of exactly 1/2 enters the jump-augmented partition at n = 2 but
  // does not stop the recursion, which needs a strict exceedance.
  std::vector<double> s(17, 0.0);
  for (std::size_t i = 5; i < s.size(); ++i) s[i] = 0.5;
  const auto x = CadlagPath::from_samples(Grid(1.0, 4), 1, s, {{5, Vector::Constant(1, 0.5)}});
  const PathPair p = PathPair::with_constant_v(x, Vector::Zero(1));
  EXPECT_TRUE(make_subdivision(Scheme::jump, p, 2).contains(5));
  EXPECT_FALSE(make_subdivision(Scheme::stopping, p, 2).contains(5));
  EXPECT_TRUE(make_subdivision(Scheme::stopping, p, 3).contains(5));
}

TEST(QV, IdentityPath) {
  GenSpec spec;
  spec.kind = GenKind::deterministic;
  spec.depth = 10;
  const auto x = generate(spec).path;
  for (int n = 0; n <= 10; ++n) EXPECT_EQ(discrete_qv(x, dyadic_subdivision(x.grid(), n)).total(), std::ldexp(1.0, -n));
}

TEST(QV, PureJumpIsAllAtoms) {
  const auto g = make(GenKind::compound_poisson, 5, 12);
  const PathPair p = with_rate(g);
  const auto sub = make_subdivision(Scheme::jump, p, 6);
  const auto q = discrete_qv(p.x, sub);
  double atoms = 0.0;
  for (const auto& j : g.truth.jumps) {
    if (sub.contains(j.index)) atoms += j.delta(0) * j.delta(0);
  }
  double weights = 0.0;
  for (const auto& a : q.atoms) weights += a.weight;
  EXPECT_NEAR(weights, atoms, 1e-14);
  EXPECT_NEAR(q.atomic.back(), atoms, 1e-14);
  for (double c : q.continuous) EXPECT_GE(c, -1e-12 - q.cross_slack.back());
}

TEST(QV, CurveIsMonotoneAndDecomposes) {
  const PathPair p = with_rate(make(GenKind::jump_diffusion, 9, 12));
  const auto q = discrete_qv(p.x, make_subdivision(Scheme::jump, p, 10));
  ASSERT_EQ(q.curve.size(), q.times.size());
  for (std::size_t k = 1; k < q.curve.size(); ++k) EXPECT_GE(q.curve[k], q.curve[k - 1]);
  for (std::size_t k = 0; k < q.curve.size(); ++k) EXPECT_DOUBLE_EQ(q.continuous[k], q.curve[k] - q.atomic[k]);
  EXPECT_NO_THROW(qv_decompose(q));
  auto broken = q;
  broken.curve.back() -= 10.0;
  EXPECT_THROW(qv_decompose(broken), ConsistencyError);
}

TEST(QV, BrownianNearRate) {
  const auto g = make(GenKind::brownian, 42, 14);
  const double q = discrete_qv(g.path, dyadic_subdivision(g.path.grid(), 14)).total();
  EXPECT_NEAR(q, 1.0, 0.05);
}

TEST(CrossVariation, PolarizationAndPsd) {
  GenSpec spec;
  spec.dim = 3;
  spec.depth = 10;
  const auto x = generate(spec).path;
  const auto sub = dyadic_subdivision(x.grid(), 8);
  const auto a = cross_variation(x, sub);
  const auto b = cross_variation_polarized(x, sub);
  EXPECT_LT(polarization_gap(a, b), kPolarizationSlack);
  EXPECT_GE(min_increment_eigenvalue(a), -kPsdSlack);
  const Matrix inc = a.increment(0, sub.size() - 1);
  EXPECT_NEAR(inc(1, 1), discrete_qv(x, sub, 1).total(), 1e-12);
  EXPECT_EQ(inc, inc.transpose());
}

}  // namespace
}  // namespace pathcalc
