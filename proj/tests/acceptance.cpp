/*
 * Copyright 2026 The pathcalc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 */

// Acceptance suite: one PASS/FAIL line per criterion.
//
// Exit status is 0 when every criterion passes except those listed in
// kKnownFailures, which are reported as FAIL but do not fail the run. A known
// failure that starts passing is reported as such and also fails the run so
// the list stays accurate.

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "core/derivatives.hpp"
#include "core/errors.hpp"
#include "core/follmer.hpp"
#include "core/functionals.hpp"
#include "core/generators.hpp"
#include "core/quadratic_variation.hpp"
#include "core/rng.hpp"
#include "corpus.hpp"

#ifndef PATHCALC_FIXTURE_DIR
#define PATHCALC_FIXTURE_DIR "tests/fixtures"
#endif

namespace pc = pathcalc;
namespace pt = pathcalc::testing;

namespace {

const std::set<int> kKnownFailures = {7, 8};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
  char buf[1024];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

// key,value fixture rows (comments start with '#').
std::map<std::string, double> read_fixture(const std::string& name) {
  std::ifstream in(std::string(PATHCALC_FIXTURE_DIR) + "/" + name);
  if (!in) throw pc::IoError("missing fixture " + name);
  std::map<std::string, double> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    try {
      out[line.substr(0, comma)] = std::stod(line.substr(comma + 1));
    } catch (const std::exception&) {
      // header row
    }
  }
  return out;
}

double relative(const pc::CovReport& r) {
  const double scale = 1.0 + std::abs(r.lhs) + std::abs(r.horizontal) + std::abs(r.trace) + std::abs(r.follmer) +
                       std::abs(r.jumps);
  return std::abs(r.residual()) / scale;
}

// 1. F = x(t)^2 telescopes exactly at every level, in both modes.
Outcome telescoping() {
  const pc::Functional F = pc::builtin("cylinder:f=x^2", 1);
  double worst = 0.0;
  std::string where;
  for (const auto& path : pt::corpus()) {
    if (path.pair.dim() != 1) continue;
    for (pc::Mode mode : {pc::Mode::continuous, pc::Mode::cadlag}) {
      const pc::Scheme scheme = mode == pc::Mode::cadlag ? pc::Scheme::jump : pc::Scheme::dyadic;
      for (const auto& r : pc::change_of_variable_report(F, path.pair, 0, 14, scheme, mode)) {
        if (!r.ok()) return {false, path.name + ": " + r.error};
        if (relative(r) > worst) {
          worst = relative(r);
          where = fmt("%s/%s/n=%d", path.name.c_str(), pc::to_string(mode), r.level);
        }
      }
    }
  }
  return {worst <= 1e-12, fmt("max relative residual %.3g at %s", worst, where.c_str())};
}

// 2. The identity path t -> t has level-n QV exactly 2^-n.
Outcome identity_qv() {
  pc::GenSpec spec;
  spec.kind = pc::GenKind::deterministic;
  const auto path = pc::generate(spec).path;
  double worst = 0.0;
  for (int n = 0; n <= 14; ++n) {
    const auto q = pc::discrete_qv(path, pc::dyadic_subdivision(path.grid(), n));
    worst = std::max(worst, std::abs(q.total() - std::ldexp(1.0, -n)));
  }
  return {worst <= 1e-15, fmt("max |curve(1) - 2^-n| = %.3g over n = 0..14", worst)};
}

// 3. x = a 1_[t0, 1]: exact once t0 is in the subdivision, with the Foellmer
// term vanishing and the jump term equal to a^2 for F = x^2.
Outcome pure_jump() {
  pc::GenSpec spec;
  spec.kind = pc::GenKind::deterministic;
  spec.shape = "step";
  spec.amplitude = 1.5;
  spec.jump_time = 19661.0 / 65536.0;  // not dyadic below level 16
  const auto g = pc::generate(spec);
  const pc::PathPair p = pc::PathPair::with_constant_v(g.path, pc::Vector::Zero(1));
  const double a2 = spec.amplitude * spec.amplitude;
  double worst = 0.0, worst_follmer = 0.0, worst_jump = 0.0;
  for (const char* f : {"x^2", "x^3-2*x", "t*x^2+x^3", "x^4"}) {
    const pc::Functional F = pc::builtin(std::string("cylinder:f=") + f, 1);
    for (const auto& r : pc::change_of_variable_report(F, p, 1, 14, pc::Scheme::jump, pc::Mode::cadlag)) {
      if (!r.ok()) return {false, std::string(f) + ": " + r.error};
      worst = std::max(worst, relative(r));
      if (std::string(f) == "x^2") {
        worst_follmer = std::max(worst_follmer, std::abs(r.follmer));
        worst_jump = std::max(worst_jump, std::abs(r.jumps - a2));
      }
    }
  }
  const bool ok = worst <= 1e-12 && worst_follmer <= 1e-12 && worst_jump <= 1e-12;
  return {ok, fmt("max relative residual %.3g; x^2: max |follmer| %.3g, max |jumps - a^2| %.3g", worst, worst_follmer,
                  worst_jump)};
}

// 4. Brownian QV band at level 14, checked against the oracle fixture.
Outcome brownian_qv() {
  const auto fixture = read_fixture("brownian_qv_1000.csv");
  const double lo = 0.95, hi = 1.05;
  auto qv_of = [](std::uint64_t seed) {
    const auto g = pt::make(pc::GenKind::brownian, seed);
    return pc::discrete_qv(g.path, pc::dyadic_subdivision(g.path.grid(), 14)).total();
  };
  const double shipped = qv_of(pt::kShippedSeed);
  int inside = 0;
  double oracle_gap = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const double q = qv_of(seed);
    inside += (q >= lo && q <= hi);
    const auto it = fixture.find(std::to_string(seed));
    if (it == fixture.end()) return {false, fmt("fixture lacks seed %llu", static_cast<unsigned long long>(seed))};
    oracle_gap = std::max(oracle_gap, std::abs(q - it->second));
  }
  const double oracle_fraction = fixture.count("fraction_in_band") ? fixture.at("fraction_in_band") : -1.0;
  const bool ok = shipped >= lo && shipped <= hi && inside >= 95 && oracle_gap <= 1e-10 && oracle_fraction >= 0.95;
  return {ok, fmt("seed 42 curve(1) = %.6f; %d/100 seeds in band; oracle 1000-seed fraction %.3f; max |C++ - oracle| "
                  "%.2g",
                  shipped, inside, oracle_fraction, oracle_gap)};
}

// 5. Ito reduction for t x^2 on the shipped Brownian path.
Outcome ito_reduction() {
  const auto fixture = read_fixture("thresholds.csv");
  const auto g = pt::make(pc::GenKind::brownian);
  const pc::PathPair p = pt::with_rate(g);
  const pc::Functional F = pc::builtin("cylinder:f=t*x^2", 1);
  const auto reports = pc::change_of_variable_report(F, p, 8, 14, pc::Scheme::dyadic, pc::Mode::continuous);
  std::string trail;
  bool decreasing = true;
  for (std::size_t k = 0; k < reports.size(); ++k) {
    if (!reports[k].ok()) return {false, reports[k].error};
    trail += fmt("%s%.2e", k ? " " : "", std::abs(reports[k].residual()));
    if (k >= 2 && !(std::abs(reports[k].residual()) < std::abs(reports[k - 2].residual()))) decreasing = false;
  }
  const auto& last = reports.back();
  const double F_T = last.lhs + pc::evaluate(F, 0.0, pc::restrict(p, 0.0));
  const double bound = 1e-2 * (1.0 + std::abs(F_T));
  const double oracle = fixture.at("ito_residual_level14");
  const bool matches_oracle = std::abs(std::abs(last.residual()) - oracle) <= 1e-9 * (1.0 + oracle);
  const bool ok = decreasing && std::abs(last.residual()) <= bound && matches_oracle;
  return {ok, fmt("|residual| n=8..14: %s; bound %.3g; oracle %.6g%s", trail.c_str(), bound, oracle,
                  matches_oracle ? "" : " (mismatch)")};
}

// 6. Doleans exponential: continuous and jump-diffusion cases.
Outcome doleans() {
  const auto fixture = read_fixture("thresholds.csv");
  const pc::Functional Y = pc::builtin("doleans", 1);

  const auto bm = pt::make(pc::GenKind::brownian);
  const pc::PathPair p = pc::PathPair::with_constant_v(bm.path, pc::Vector::Constant(1, 1.0));
  const auto sub = pc::dyadic_subdivision(p.grid(), 14);
  const double YT = pc::evaluate(Y, p.horizon(), p);
  const double S = pc::follmer_sum(Y, p, sub, pc::Mode::continuous);
  const double rel = std::abs(YT - 1.0 - S) / (1.0 + std::abs(YT));

  const auto jd = pt::make(pc::GenKind::jump_diffusion);
  const pc::PathPair q = pt::with_rate(jd);
  const auto r = pc::change_of_variable_report(Y, q, 14, 14, pc::Scheme::jump, pc::Mode::cadlag).front();
  if (!r.ok()) return {false, "jump-diffusion: " + r.error};
  const double threshold = fixture.at("doleans_jd_threshold");
  const bool ok = rel <= 5e-2 && std::abs(r.residual()) <= threshold;
  return {ok, fmt("continuous: relative %.3g (<= 5e-2); jump-diffusion: |residual| %.3g (threshold %.3g)", rel,
                  std::abs(r.residual()), threshold)};
}

// 7. Analytic against finite differences for every builtin with analytic derivatives.
Outcome derivatives() {
  const std::vector<std::string> specs = {"cylinder:f=t*x^2+sin(x)", "running_integral:g=x^2", "quadratic_cylinder",
                                          "doleans"};
  struct Worst {
    double gradient = 0, hessian = 0, horizontal = 0;
  };
  std::map<std::string, Worst> worst;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    pc::GenSpec spec;
    spec.seed = seed;
    spec.depth = 10;
    const auto g = pc::generate(spec);
    const pc::CounterRng rng(seed, pc::Stream::probe);
    const pc::PathPair p = pc::PathPair::with_constant_v(g.path, pc::Vector::Constant(1, rng.uniform(0)));
    const double t = p.grid().time(static_cast<std::size_t>(1 + rng.uniform(1) * (p.grid().intervals() - 8)));
    for (const auto& s : specs) {
      const pc::Functional F = pc::builtin(s, 1);
      for (const auto& row : pc::derivative_check(F, p, t)) {
        if (std::isnan(row.analytic)) continue;
        double& slot = row.kind == pc::DerivativeKind::gradient  ? worst[s].gradient
                       : row.kind == pc::DerivativeKind::hessian ? worst[s].hessian
                                                                 : worst[s].horizontal;
        slot = std::max(slot, row.rel_err);
      }
    }
  }
  bool ok = true;
  std::string detail;
  for (const auto& s : specs) {
    const Worst& w = worst[s];
    const bool pass = w.gradient <= 1e-6 && w.hessian <= 1e-4 && w.horizontal <= 1e-3;
    ok = ok && pass;
    detail += fmt("%s%s[%s grad %.1e hess %.1e hor %.1e]", detail.empty() ? "" : " ", s.c_str(),
                  pass ? "ok" : "FAIL", w.gradient, w.hessian, w.horizontal);
  }
  return {ok, detail + " (running_max carries no analytic derivatives)"};
}

// 8. Zero-QV path and Dirichlet sum.
Outcome zero_qv() {
  const auto zq = pt::make(pc::GenKind::zero_qv);
  const auto sub = pc::dyadic_subdivision(zq.path.grid(), 14);
  const double q_zero = pc::discrete_qv(zq.path, sub).total();
  const auto bm = pt::make(pc::GenKind::brownian);
  const auto sum = pt::dirichlet();
  const double q_bm = pc::discrete_qv(bm.path, sub).total();
  const double q_sum = pc::discrete_qv(sum.path, sub).total();
  const double gap = std::abs(q_sum - q_bm) / q_bm;
  return {q_zero <= 1e-2 && gap <= 0.02,
          fmt("zero-QV level-14 QV %.4g (<= 1e-2); Dirichlet QV %.5f vs Brownian %.5f, gap %.2f%% (<= 2%%)", q_zero,
              q_sum, q_bm, 100 * gap)};
}

// 9. Foellmer sums along jump-augmented and stopping-time subdivisions.
Outcome subdivision_independence() {
  const pc::Functional F = pc::builtin("cylinder:f=t*x^2+x^3", 1);
  std::string detail;
  bool ok = true;
  for (const auto& path : pt::corpus()) {
    if (path.pair.dim() != 1) continue;
    const pc::Mode mode = path.has_jumps ? pc::Mode::cadlag : pc::Mode::continuous;
    const auto a = pc::change_of_variable_report(F, path.pair, 14, 14, pc::Scheme::jump, mode).front();
    const auto b = pc::change_of_variable_report(F, path.pair, 14, 14, pc::Scheme::stopping, mode).front();
    if (!a.ok() || !b.ok()) return {false, path.name + ": " + a.error + b.error};
    const double diff = std::abs(a.follmer - b.follmer);
    const double allowed = std::max(std::abs(a.residual()), std::abs(b.residual()));
    const bool pass = diff <= allowed + 1e-12 * (1.0 + std::abs(a.follmer));
    ok = ok && pass;
    detail += fmt("%s%s %.1e<=%.1e", detail.empty() ? "" : "; ", path.name.c_str(), diff, allowed);
  }
  return {ok, detail};
}

// 10. Polarization and PSD increments of the cross-variation.
Outcome polarization() {
  double gap = 0.0, min_eig = 0.0;
  for (const auto& path : pt::corpus()) {
    for (int n : {6, 10, 14}) {
      const auto sub = pc::make_subdivision(path.has_jumps ? pc::Scheme::jump : pc::Scheme::dyadic, path.pair, n);
      const auto direct = pc::cross_variation(path.pair.x, sub);
      const auto polar = pc::cross_variation_polarized(path.pair.x, sub);
      gap = std::max(gap, pc::polarization_gap(direct, polar));
      min_eig = std::min(min_eig, pc::min_increment_eigenvalue(direct));
    }
  }
  return {gap <= 1e-12 && min_eig >= -1e-12,
          fmt("max polarization gap %.3g; smallest increment eigenvalue %.3g", gap, min_eig)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"telescoping exactness", telescoping},
      {"identity-path QV", identity_qv},
      {"pure-jump exactness", pure_jump},
      {"Brownian QV band", brownian_qv},
      {"Ito reduction", ito_reduction},
      {"Doleans identity", doleans},
      {"derivative validation", derivatives},
      {"zero-QV component", zero_qv},
      {"subdivision independence", subdivision_independence},
      {"polarization and PSD", polarization},
  };
  int unexpected = 0;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k + 1);
    Outcome outcome;
    try {
      outcome = criteria[k].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const bool known = kKnownFailures.count(id) > 0;
    std::printf("criterion %2d %s: %s : %s%s\n", id, outcome.pass ? "PASS" : "FAIL", criteria[k].first,
                outcome.detail.c_str(), !outcome.pass && known ? " [known failure, see decisions ledger]" : "");
    std::fflush(stdout);
    if (outcome.pass == known) ++unexpected;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("acceptance: %.1f s, %d unexpected outcome(s)\n", seconds, unexpected);
  return unexpected == 0 ? 0 : 1;
}
