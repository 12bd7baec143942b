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
#include <string>
#include <vector>

#include "core/functionals.hpp"

namespace pathcalc {

struct FDScheme {
  double vertical_eps = 1e-5;
  double hessian_eps = 1e-3;
  int horizontal_steps = 2;

  void validate() const;
};

/// Smallest absolute finite-difference step.
inline constexpr double kMinFdStep = 0x1.0p-40;

// All three take the full pair and a grid time t <= horizon(p); the pair is
// restricted to [0, t] before anything is evaluated. With force_fd == false an
// analytic derivative is returned when the functional carries one.

/// Forward difference over horizontal extensions of x and v by j grid steps,
/// j = 1..K, extrapolated to zero step (Richardson, polynomial in the step).
double horizontal_derivative(const Functional& F, const PathPair& p, double t, const FDScheme& scheme = {},
                             bool force_fd = false);
/// Central differences over endpoint bumps of x; v is left alone.
Vector vertical_gradient(const Functional& F, const PathPair& p, double t, const FDScheme& scheme = {},
                         bool force_fd = false);
/// Second differences over pairs of endpoint bumps; exactly symmetric.
Matrix vertical_hessian(const Functional& F, const PathPair& p, double t, const FDScheme& scheme = {},
                        bool force_fd = false);

/// max over seeded nearby pairs p' of |F_{t2}(p'_{t1} extended) - F_{t1}(p'_{t1})| / (t2 - t1).
double horizontal_lipschitz_probe(const Functional& F, const PathPair& p, double t1, double t2,
                                  std::size_t perturbations, std::uint64_t seed);

enum class DerivativeKind { horizontal, gradient, hessian };
const char* to_string(DerivativeKind kind);

struct DerivativeRow {
  DerivativeKind kind = DerivativeKind::horizontal;
  std::size_t row = 0;  // component i (0-based); for the Hessian also `col`
  std::size_t col = 0;
  double analytic = 0.0;  // NaN when the functional carries no analytic value
  double fd = 0.0;
  double abs_err = 0.0;
  double rel_err = 0.0;  // abs_err / (1 + |analytic|)
};

/// Analytic against finite-difference values for every derivative at (p, t).
/// The horizontal row is omitted when there is no forward room at t.
std::vector<DerivativeRow> derivative_check(const Functional& F, const PathPair& p, double t,
                                            const FDScheme& scheme = {});

}  // namespace pathcalc
