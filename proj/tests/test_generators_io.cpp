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
#include <filesystem>
#include <fstream>

#include "core/errors.hpp"
#include "core/generators.hpp"
#include "core/path_io.hpp"
#include "core/quadratic_variation.hpp"
#include "core/rng.hpp"
#include "corpus.hpp"

namespace pathcalc {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "pathcalc_unit";
  fs::create_directories(dir);
  return dir / name;
}

TEST(Rng, CounterBasedAndReproducible) {
  const CounterRng a(5, Stream::brownian), b(5, Stream::brownian), c(5, Stream::jump_times);
  EXPECT_EQ(a.bits(17), b.bits(17));
  EXPECT_NE(a.bits(17), c.bits(17));
  CounterRng seq(5, Stream::brownian);
  for (int k = 0; k < 4; ++k) EXPECT_EQ(seq.next_bits(), a.bits(static_cast<std::uint64_t>(k)));
  double sum = 0, sq = 0;
  for (std::uint64_t k = 0; k < 20000; ++k) {
    const double u = a.uniform(k);
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double z = a.normal(k);
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / 20000, 0.0, 0.05);
  EXPECT_NEAR(sq / 20000, 1.0, 0.05);
}

TEST(Generators, SeedsAndShapes) {
  GenSpec spec;
  spec.depth = 10;
  EXPECT_TRUE(identical(generate(spec).path, generate(spec).path));
  spec.seed = 43;
  const auto other = generate(spec).path;
  spec.seed = 42;
  EXPECT_FALSE(identical(generate(spec).path, other));

  spec.kind = GenKind::deterministic;
  spec.shape = "step";
  spec.jump_time = 0.25;
  const auto step = generate(spec);
  ASSERT_EQ(step.truth.jumps.size(), 1u);
  EXPECT_EQ(step.truth.jumps[0].index, 256u);
  spec.jump_time = 0.3;
  EXPECT_THROW(generate(spec), ConfigError);
  spec.shape = "cubic";
  EXPECT_THROW(generate(spec), ConfigError);
}

TEST(Generators, JumpDiffusionRegistryMatchesTruth) {
  const auto g = testing::make(GenKind::jump_diffusion, 17, 12);
  EXPECT_GT(g.truth.jumps.size(), 0u);
  const auto reg = g.path.registry();
  ASSERT_EQ(reg.size(), g.truth.jumps.size());
  for (std::size_t k = 0; k < reg.size(); ++k) {
    EXPECT_EQ(reg[k].index, g.truth.jumps[k].index);
    EXPECT_EQ(reg[k].delta(0), g.truth.jumps[k].delta(0));
  }
  EXPECT_DOUBLE_EQ(g.truth.qv_continuous_expected(0.5), 0.5);
}

TEST(Generators, ZeroQvAndDirichlet) {
  const auto zq = testing::make(GenKind::zero_qv, 3, 12);
  EXPECT_EQ(zq.path.sample(0, 0), 0.0);
  EXPECT_EQ(zq.path.jump_count(), 0u);
  const auto bm = testing::make(GenKind::brownian, 3, 12);
  const auto sum = dirichlet_sum(bm.path, zq.path, &bm.truth);
  EXPECT_DOUBLE_EQ(sum.path.sample(100, 0), bm.path.sample(100, 0) + zq.path.sample(100, 0));
  EXPECT_TRUE(sum.truth.zero_qv_part.has_value());
  const auto jd = testing::make(GenKind::jump_diffusion, 3, 12);
  EXPECT_THROW(dirichlet_sum(bm.path, jd.path), DomainError);
}

TEST(Generators, ZeroQvDecaysAtHoelderRate) {
  // dyadic QV ~ C 2^{n(1 - 2 alpha)}: a factor 2^{6 (2 alpha - 1)} = 8 from level 8 to 14
  const auto zq = testing::make(GenKind::zero_qv, 42, 16);
  const double q8 = discrete_qv(zq.path, dyadic_subdivision(zq.path.grid(), 8)).total();
  const double q14 = discrete_qv(zq.path, dyadic_subdivision(zq.path.grid(), 14)).total();
  const double observed = q8 / q14;
  EXPECT_GT(observed, 8.0 / 4.0);
  EXPECT_LT(observed, 8.0 * 4.0);
  for (int n = 9; n <= 14; ++n) {
    EXPECT_LT(discrete_qv(zq.path, dyadic_subdivision(zq.path.grid(), n)).total(),
              discrete_qv(zq.path, dyadic_subdivision(zq.path.grid(), n - 1)).total());
  }
}

TEST(PathIo, RoundTripWithJumps) {
  const auto g = testing::make(GenKind::jump_diffusion, 23, 10);
  const auto file = scratch("jd.csv");
  write_path_csv(file.string(), g.path, {"note=test"});
  const auto back = read_path_csv(file.string());
  EXPECT_EQ(back.grid(), g.path.grid());
  EXPECT_EQ(back.materialize(), g.path.materialize());
  const auto a = g.path.registry(), b = back.registry();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].index, b[k].index);
    EXPECT_NEAR(a[k].delta(0), b[k].delta(0), 1e-15);  // value - left value, one rounding
  }
}

TEST(PathIo, InfersGridAndFillsGaps) {
  const auto file = scratch("bare.csv");
  {
    std::ofstream out(file);
    out << "t,x1\n0,0\n0.25,1\n0.5,1\n0.5,3\n0.75,2\n1,2\n";
  }
  const auto x = read_path_csv(file.string());
  EXPECT_EQ(x.grid().depth, 2);
  ASSERT_NE(x.jump_at(2), nullptr);
  EXPECT_DOUBLE_EQ(x.jump_at(2)->delta(0), 2.0);
  {
    std::ofstream out(file);
    out << "# depth=3\n# horizon=1\nt,x1\n0,0\n0.25,1\n1,2\n";
  }
  const auto y = read_path_csv(file.string());
  EXPECT_EQ(y.last_index(), 8u);
  EXPECT_DOUBLE_EQ(y.sample(3, 0), 1.0);
  EXPECT_DOUBLE_EQ(y.sample(7, 0), 1.0);
}

TEST(PathIo, Errors) {
  const auto file = scratch("bad.csv");
  auto write = [&](const std::string& text) {
    std::ofstream out(file);
    out << text;
  };
  EXPECT_THROW(read_path_csv(scratch("missing.csv").string()), IoError);
  write("t,x1\n0,0\n0.5,abc\n1,1\n");
  EXPECT_THROW(read_path_csv(file.string()), IoError);
  write("t,x1\n0,0\n0.3,1\n1,1\n");
  EXPECT_THROW(read_path_csv(file.string()), IoError);
  write("t,x1\n0,0\n1,1\n0.5,1\n");
  EXPECT_THROW(read_path_csv(file.string()), IoError);
  write("t,x1\n0,0\n0.5,1\n0.75,1\n1,1\n");
  EXPECT_THROW(read_path_csv(file.string()), IoError);  // 3 intervals, no depth comment
}

TEST(MetaIo, RoundTrip) {
  const auto g = testing::make(GenKind::jump_diffusion, 29, 10);
  const auto file = scratch("jd.meta.csv");
  write_meta_csv(file.string(), g.truth, g.path.grid(), {{"rate", "5"}});
  const auto meta = read_meta_csv(file.string());
  EXPECT_EQ(meta.truth.seed, 29u);
  EXPECT_EQ(meta.truth.kind, GenKind::jump_diffusion);
  EXPECT_EQ(meta.truth.qv_rate, 1.0);
  EXPECT_EQ(meta.fields.at("rate"), "5");
  ASSERT_EQ(meta.truth.jumps.size(), g.truth.jumps.size());
  EXPECT_EQ(meta.truth.jumps[0].delta(0), g.truth.jumps[0].delta(0));
  EXPECT_EQ(meta_path_for("dir/bm.csv"), "dir/bm.meta.csv");
  EXPECT_EQ(meta_path_for("bm"), "bm.meta.csv");
}

}  // namespace
}  // namespace pathcalc
