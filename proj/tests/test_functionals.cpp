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
#include "core/expression.hpp"
#include "core/functionals.hpp"
#include "corpus.hpp"

namespace pathcalc {
namespace {

TEST(Expression, ParseEvaluateDifferentiate) {
  const auto e = Expression::parse("t*x1^2 + sin(x2) - 3/x1", 2);
  const std::vector<double> x = {2.0, 0.5};
  EXPECT_NEAR(e.evaluate(1.5, x), 1.5 * 4 + std::sin(0.5) - 1.5, 1e-15);
  EXPECT_NEAR(e.derivative(1).evaluate(1.5, x), 2 * 1.5 * 2 + 3.0 / 4.0, 1e-15);
  EXPECT_NEAR(e.derivative(2).evaluate(1.5, x), std::cos(0.5), 1e-15);
  EXPECT_NEAR(e.derivative(0).evaluate(1.5, x), 4.0, 1e-15);
  EXPECT_TRUE(e.derivative(0).derivative(0).is_zero());
}

TEST(Expression, PrecedenceAndErrors) {
  const std::vector<double> x = {2.0};
  EXPECT_DOUBLE_EQ(Expression::parse("-x^2", 1).evaluate(0, x), -4.0);
  EXPECT_DOUBLE_EQ(Expression::parse("2^3^2", 1).evaluate(0, x), 512.0);
  EXPECT_DOUBLE_EQ(Expression::parse("exp(log(x))", 1).evaluate(0, x), 2.0);
  EXPECT_THROW(Expression::parse("x +", 1), ConfigError);
  EXPECT_THROW(Expression::parse("y", 1), ConfigError);
  EXPECT_THROW(Expression::parse("x", 2), ConfigError);  // x is ambiguous for d > 1
  EXPECT_THROW(Expression::parse("x3", 2), ConfigError);
}

PathPair brownian_pair(std::uint64_t seed = 7, double v = 1.0) {
  GenSpec spec;
  spec.seed = seed;
  spec.depth = 8;
  return PathPair::with_constant_v(generate(spec).path, Vector::Constant(1, v));
}

TEST(BuiltinSpec, RoundTrip) {
  const auto s = BuiltinSpec::parse("cylinder:f=t*x^2");
  EXPECT_EQ(s.name, "cylinder");
  EXPECT_EQ(s.params.at("f"), "t*x^2");
  EXPECT_EQ(BuiltinSpec::parse(s.to_string()).params, s.params);
  EXPECT_THROW(builtin("nope", 1), ConfigError);
  EXPECT_THROW(builtin("cylinder", 1), ConfigError);
  EXPECT_THROW(builtin("cylinder:f=x,g=x", 1), ConfigError);
  EXPECT_THROW(builtin("doleans", 2), ConfigError);
  EXPECT_THROW(builtin("running_integral:g=t*x", 1), ConfigError);
  EXPECT_EQ(builtin_names().size(), 5u);
}

TEST(Builtins, Values) {
  const PathPair p = brownian_pair();
  const double T = p.horizon();
  const double xT = p.x.endpoint()(0);
  EXPECT_NEAR(builtin("cylinder:f=t*x^2", 1)(p), T * xT * xT, 1e-14);
  EXPECT_NEAR(builtin("quadratic_cylinder", 1)(p), xT * xT, 1e-14);

  double integral = 0.0, running = 0.0;
  for (std::size_t j = 0; j < p.last_index(); ++j) integral += std::pow(p.x.sample(j, 0), 2) * p.grid().step();
  for (std::size_t j = 0; j <= p.last_index(); ++j) running = std::max(running, p.x.sample(j, 0));
  EXPECT_NEAR(builtin("running_integral:g=x^2", 1)(p), integral, 1e-12);
  EXPECT_DOUBLE_EQ(builtin("running_max", 1)(p), running);
  EXPECT_NEAR(builtin("doleans", 1)(p), std::exp(xT - 0.5 * T), 1e-12);
  EXPECT_THROW(builtin("running_max:i=2", 1)(p), Error);
}

TEST(Builtins, DoleansJumpFactors) {
  const auto x = CadlagPath::from_samples(Grid(1.0, 2), 1, {0, 0, 0.5, 0.5, 0.5}, {{2, Vector::Constant(1, 0.5)}});
  const PathPair p = PathPair::with_constant_v(x, Vector::Zero(1));
  EXPECT_NEAR(builtin("doleans", 1)(p), 1.5, 1e-15);
  const auto y = CadlagPath::from_samples(Grid(1.0, 2), 1, {0, 0, -1.5, -1.5, -1.5}, {{2, Vector::Constant(1, -1.5)}});
  EXPECT_THROW(builtin("doleans", 1)(PathPair::with_constant_v(y, Vector::Zero(1))), EvaluationError);
}

TEST(Builtins, NonAnticipative) {
  // F_t only sees the restriction: changing the future changes nothing.
  const PathPair p = brownian_pair(1);
  const PathPair q = brownian_pair(2);
  const double t = 0.5;
  for (const char* s : {"running_integral:g=x^2", "running_max", "doleans"}) {
    const auto F = builtin(s, 1);
    const double a = evaluate(F, t, restrict(p, t));
    std::vector<double> mixed = p.x.materialize();
    const auto qv = q.x.materialize();
    for (std::size_t j = p.grid().require_index(t) + 1; j < mixed.size(); ++j) mixed[j] = qv[j];
    const PathPair r = PathPair::with_constant_v(CadlagPath::from_samples(p.grid(), 1, mixed), Vector::Constant(1, 1.0));
    EXPECT_EQ(a, evaluate(F, t, restrict(r, t))) << s;
    EXPECT_THROW(evaluate(F, t, p), Error) << s;
  }
}

TEST(Builtins, LinearCombination) {
  const PathPair p = brownian_pair();
  const auto F = builtin("cylinder:f=x^3", 1);
  const auto G = builtin("quadratic_cylinder", 1);
  const auto H = linear_combination(2.0, F, -1.0, G);
  EXPECT_NEAR(H(p), 2 * F(p) - G(p), 1e-14);
  ASSERT_TRUE(H.has_vertical());
  EXPECT_NEAR(H.analytic_vertical(p)(0), 2 * F.analytic_vertical(p)(0) - G.analytic_vertical(p)(0), 1e-14);
  EXPECT_FALSE(linear_combination(1.0, F, 1.0, builtin("running_max", 1)).has_vertical());
}

TEST(Probes, PredictableInV) {
  const PathPair p = brownian_pair();
  EXPECT_TRUE(check_predictable_in_v(builtin("doleans", 1), p, 0.5, 1e-14));
  const auto v_endpoint = Functional("v_end", 1, [](const PathPair& q) { return q.v.endpoint()(0); });
  // a v with a jump at t makes an endpoint-reading functional fail the check
  const auto v = CadlagPath::from_samples(p.grid(), 1, [&] {
    std::vector<double> s(p.last_index() + 1, 1.0);
    for (std::size_t j = 128; j < s.size(); ++j) s[j] = 2.0;
    return s;
  }(), {{128, Vector::Constant(1, 1.0)}});
  EXPECT_FALSE(check_predictable_in_v(v_endpoint, PathPair(p.x, v), 0.5, 1e-14));
}

TEST(Probes, ContinuityModulusShrinks) {
  const PathPair p = brownian_pair();
  const std::vector<double> radii = {0.2, 0.05, 0.0125};
  for (auto dir : {ProbeDirection::fixed_time, ProbeDirection::left, ProbeDirection::right}) {
    const auto rows = continuity_probe(builtin("quadratic_cylinder", 1), p, 0.5, radii, dir);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_GT(rows[0].probes, 0u);
    EXPECT_LE(rows[2].modulus, rows[0].modulus);
    EXPECT_LT(rows[2].modulus, 0.2);
  }
  const std::vector<double> bad = {0.1, 0.2};
  EXPECT_THROW(continuity_probe(builtin("running_max", 1), p, 0.5, bad, ProbeDirection::left), Error);
}

TEST(Probes, Boundedness) {
  const double m = boundedness_probe(builtin("quadratic_cylinder", 1), 2.0, 1.0, 50, 3);
  EXPECT_GT(m, 0.0);
  EXPECT_LE(m, 4.0 + 1e-12);
  EXPECT_EQ(m, boundedness_probe(builtin("quadratic_cylinder", 1), 2.0, 1.0, 50, 3));
}

}  // namespace
}  // namespace pathcalc
