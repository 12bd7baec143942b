/*
 * Copyright 2026 The pathcalc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 */
#include "core/derivatives.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace pathcalc {

void FDScheme::validate() const {
  if (!(vertical_eps > 0.0) || !(hessian_eps > 0.0)) throw ConfigError("finite-difference steps must be positive");
  if (horizontal_steps < 1) throw ConfigError("horizontal_steps must be at least 1");
}

namespace {

PathPair restricted(const PathPair& p, double t) {
  const std::size_t index = p.grid().require_index(t);
  if (index > p.last_index()) throw DomainError("derivative requested beyond the pair horizon");
  return restrict_index(p, index);
}

double bump_size(double eps, double x) { return std::max(eps * std::max(1.0, std::abs(x)), kMinFdStep); }

Vector unit(std::size_t d, std::size_t i, double h) {
  Vector e = Vector::Zero(static_cast<Eigen::Index>(d));
  e(static_cast<Eigen::Index>(i)) = h;
  return e;
}

double bumped(const Functional& F, const PathPair& base, const Vector& e, const char* what) {
  try {
    return F(vertical_perturb(base, e));
  } catch (const Error& err) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << ": evaluation failed at endpoint bump [" << e.transpose() << "]: " << err.what();
    throw EvaluationError(msg.str());
  }
}

}  // namespace

double horizontal_derivative(const Functional& F, const PathPair& p, double t, const FDScheme& scheme,
                             bool force_fd) {
  scheme.validate();
  const PathPair base = restricted(p, t);
  if (F.has_horizontal() && !force_fd) return F.analytic_horizontal(base);
  const std::size_t K = static_cast<std::size_t>(scheme.horizontal_steps);
  if (base.last_index() + K > p.grid().intervals()) {
    throw DomainError("horizontal derivative at t = " + std::to_string(t) + " needs " + std::to_string(K) +
                      " grid steps of forward room");
  }
  const double step = p.grid().step();
  const double f0 = F(base);
  // Lagrange extrapolation to h = 0 through the nodes h_j = j * step.
  double result = 0.0;
  for (std::size_t j = 1; j <= K; ++j) {
    const double quotient = (F(extend_steps(base, j)) - f0) / (static_cast<double>(j) * step);
    double weight = 1.0;
    for (std::size_t m = 1; m <= K; ++m) {
      if (m != j) weight *= -static_cast<double>(m) / (static_cast<double>(j) - static_cast<double>(m));
    }
    result += weight * quotient;
  }
  return result;
}

Vector vertical_gradient(const Functional& F, const PathPair& p, double t, const FDScheme& scheme, bool force_fd) {
  scheme.validate();
  const PathPair base = restricted(p, t);
  if (F.has_vertical() && !force_fd) return F.analytic_vertical(base);
  const std::size_t d = base.dim();
  const auto x = base.x.sample(base.last_index());
  Vector grad(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) {
    const double h = bump_size(scheme.vertical_eps, x[i]);
    const double up = bumped(F, base, unit(d, i, h), "vertical_gradient");
    const double down = bumped(F, base, unit(d, i, -h), "vertical_gradient");
    grad(static_cast<Eigen::Index>(i)) = (up - down) / (2.0 * h);
  }
  return grad;
}

Matrix vertical_hessian(const Functional& F, const PathPair& p, double t, const FDScheme& scheme, bool force_fd) {
  scheme.validate();
  const PathPair base = restricted(p, t);
  const std::size_t d = base.dim();
  Matrix hess(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  if (F.has_vertical2() && !force_fd) {
    hess = F.analytic_vertical2(base);
  } else {
    const auto x = base.x.sample(base.last_index());
    std::vector<double> h(d);
    for (std::size_t i = 0; i < d; ++i) h[i] = bump_size(scheme.hessian_eps, x[i]);
    const double f0 = F(base);
    for (std::size_t i = 0; i < d; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const double up = bumped(F, base, unit(d, i, h[i]), "vertical_hessian");
      const double down = bumped(F, base, unit(d, i, -h[i]), "vertical_hessian");
      hess(ii, ii) = (up - 2.0 * f0 + down) / (h[i] * h[i]);
      for (std::size_t j = i + 1; j < d; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        const Vector ei = unit(d, i, h[i]);
        const Vector ej = unit(d, j, h[j]);
        const double pp = bumped(F, base, ei + ej, "vertical_hessian");
        const double pm = bumped(F, base, ei - ej, "vertical_hessian");
        const double mp = bumped(F, base, -ei + ej, "vertical_hessian");
        const double mm = bumped(F, base, -ei - ej, "vertical_hessian");
        hess(ii, jj) = hess(jj, ii) = (pp - pm - mp + mm) / (4.0 * h[i] * h[j]);
      }
    }
  }
  for (Eigen::Index i = 0; i < hess.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < hess.cols(); ++j) {
      const double avg = 0.5 * (hess(i, j) + hess(j, i));
      hess(i, j) = avg;
      hess(j, i) = avg;
    }
  }
  return hess;
}

double horizontal_lipschitz_probe(const Functional& F, const PathPair& p, double t1, double t2,
                                  std::size_t perturbations, std::uint64_t seed) {
  const std::size_t i1 = p.grid().require_index(t1);
  const std::size_t i2 = p.grid().require_index(t2);
  if (!(i1 < i2)) throw DomainError("horizontal_lipschitz_probe: need t1 < t2");
  if (i1 > p.last_index() || i2 > p.grid().intervals()) throw DomainError("horizontal_lipschitz_probe: window outside the horizon");
  const PathPair base = restrict_index(p, i1);
  const std::size_t d = base.dim();
  const double span = t2 - t1;
  CounterRng rng(seed, Stream::perturbation);
  double constant = 0.0;
  for (std::size_t k = 0; k <= perturbations; ++k) {
    PathPair q = base;
    if (k > 0) {
      // Uniform shift plus an endpoint bump, both of size around 1e-2.
      std::vector<double> values = q.x.materialize();
      std::vector<double> shift(d);
      for (auto& s : shift) s = 1e-2 * rng.next_normal();
      for (std::size_t i = 0; i < values.size(); ++i) values[i] += shift[i % d];
      Vector bump(static_cast<Eigen::Index>(d));
      for (Eigen::Index c = 0; c < bump.size(); ++c) bump(c) = 1e-2 * rng.next_normal();
      q = vertical_perturb(
          PathPair::unchecked(CadlagPath::from_samples(q.grid(), d, std::move(values), q.x.registry()), q.v), bump);
    }
    const double quotient = std::abs(F(extend_steps(q, i2 - i1)) - F(q)) / span;
    constant = std::max(constant, quotient);
  }
  return constant;
}

const char* to_string(DerivativeKind kind) {
  switch (kind) {
    case DerivativeKind::horizontal: return "horizontal";
    case DerivativeKind::gradient: return "gradient";
    case DerivativeKind::hessian: return "hessian";
  }
  return "?";
}

std::vector<DerivativeRow> derivative_check(const Functional& F, const PathPair& p, double t, const FDScheme& scheme) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<DerivativeRow> rows;
  auto push = [&](DerivativeKind kind, std::size_t r, std::size_t c, double analytic, double fd) {
    const double abs_err = std::abs(fd - analytic);
    rows.push_back({kind, r, c, analytic, fd, abs_err, abs_err / (1.0 + std::abs(analytic))});
  };
  const std::size_t index = p.grid().require_index(t);
  if (index + static_cast<std::size_t>(scheme.horizontal_steps) <= p.grid().intervals()) {
    const double fd = horizontal_derivative(F, p, t, scheme, true);
    push(DerivativeKind::horizontal, 0, 0, F.has_horizontal() ? horizontal_derivative(F, p, t, scheme) : nan, fd);
  }
  const Vector gfd = vertical_gradient(F, p, t, scheme, true);
  const Vector gan = F.has_vertical() ? vertical_gradient(F, p, t, scheme) : Vector::Constant(gfd.size(), nan);
  for (Eigen::Index i = 0; i < gfd.size(); ++i) {
    push(DerivativeKind::gradient, static_cast<std::size_t>(i), 0, gan(i), gfd(i));
  }
  const Matrix hfd = vertical_hessian(F, p, t, scheme, true);
  const Matrix han =
      F.has_vertical2() ? vertical_hessian(F, p, t, scheme) : Matrix::Constant(hfd.rows(), hfd.cols(), nan);
  for (Eigen::Index i = 0; i < hfd.rows(); ++i) {
    for (Eigen::Index j = i; j < hfd.cols(); ++j) {
      push(DerivativeKind::hessian, static_cast<std::size_t>(i), static_cast<std::size_t>(j), han(i, j), hfd(i, j));
    }
  }
  return rows;
}

}  // namespace pathcalc
