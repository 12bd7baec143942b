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

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace pathcalc {

namespace detail {
struct ExprNode;
}

/// Scalar expression in t and x1..xd.
///
/// Grammar (recursive descent):
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('+' | '-') unary | power
///   power   := primary ('^' unary)?            right associative
///   primary := number | 't' | 'x' | 'x'k | fn '(' expr ')' | '(' expr ')'
///   fn      := exp | log | sin | cos
/// `x` is an alias for `x1` when d == 1.
class Expression {
 public:
  /// Variable slot: 0 is t, k >= 1 is x_k.
  using Variable = std::size_t;

  static Expression parse(std::string_view text, std::size_t dim);
  static Expression constant(double value);

  double evaluate(double t, std::span<const double> x) const;
  Expression derivative(Variable var) const;

  bool is_constant() const;
  bool is_zero() const;
  std::string to_string() const;
  std::size_t dim() const { return dim_; }

 private:
  Expression(std::shared_ptr<const detail::ExprNode> root, std::size_t dim)
      : root_(std::move(root)), dim_(dim) {}

  std::shared_ptr<const detail::ExprNode> root_;
  std::size_t dim_ = 0;
};

}  // namespace pathcalc
