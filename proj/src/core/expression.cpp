/*
 * Copyright 2026 The pathcalc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 */
#include "core/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "core/errors.hpp"

namespace pathcalc {

namespace detail {

enum class Op { constant, variable, neg, add, sub, mul, div, pow, exp, log, sin, cos };

struct ExprNode {
  Op op = Op::constant;
  double value = 0.0;
  std::size_t var = 0;
  std::shared_ptr<const ExprNode> lhs;
  std::shared_ptr<const ExprNode> rhs;
};

}  // namespace detail

namespace {

using detail::ExprNode;
using detail::Op;
using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_constant(double value) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::constant;
  n->value = value;
  return n;
}

NodePtr make_variable(std::size_t var) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::variable;
  n->var = var;
  return n;
}

bool is_const(const NodePtr& n, double value) { return n->op == Op::constant && n->value == value; }

double apply(Op op, double a, double b) {
  switch (op) {
    case Op::neg: return -a;
    case Op::add: return a + b;
    case Op::sub: return a - b;
    case Op::mul: return a * b;
    case Op::div: return a / b;
    case Op::pow: return std::pow(a, b);
    case Op::exp: return std::exp(a);
    case Op::log: return std::log(a);
    case Op::sin: return std::sin(a);
    case Op::cos: return std::cos(a);
    default: return 0.0;
  }
}

// Node builders with light algebraic simplification so derivative trees stay small.
NodePtr make_unary(Op op, NodePtr a) {
  if (a->op == Op::constant) return make_constant(apply(op, a->value, 0.0));
  if (op == Op::neg && a->op == Op::neg) return a->lhs;
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->lhs = std::move(a);
  return n;
}

NodePtr make_binary(Op op, NodePtr a, NodePtr b) {
  if (a->op == Op::constant && b->op == Op::constant) return make_constant(apply(op, a->value, b->value));
  switch (op) {
    case Op::add:
      if (is_const(a, 0.0)) return b;
      if (is_const(b, 0.0)) return a;
      break;
    case Op::sub:
      if (is_const(b, 0.0)) return a;
      if (is_const(a, 0.0)) return make_unary(Op::neg, b);
      break;
    case Op::mul:
      if (is_const(a, 0.0) || is_const(b, 0.0)) return make_constant(0.0);
      if (is_const(a, 1.0)) return b;
      if (is_const(b, 1.0)) return a;
      break;
    case Op::div:
      if (is_const(a, 0.0)) return make_constant(0.0);
      if (is_const(b, 1.0)) return a;
      break;
    case Op::pow:
      if (is_const(b, 0.0)) return make_constant(1.0);
      if (is_const(b, 1.0)) return a;
      break;
    default:
      break;
  }
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

double evaluate_node(const ExprNode& n, double t, std::span<const double> x) {
  switch (n.op) {
    case Op::constant: return n.value;
    case Op::variable: return n.var == 0 ? t : x[n.var - 1];
    case Op::neg:
    case Op::exp:
    case Op::log:
    case Op::sin:
    case Op::cos: return apply(n.op, evaluate_node(*n.lhs, t, x), 0.0);
    default: return apply(n.op, evaluate_node(*n.lhs, t, x), evaluate_node(*n.rhs, t, x));
  }
}

NodePtr differentiate(const NodePtr& n, std::size_t var) {
  switch (n->op) {
    case Op::constant: return make_constant(0.0);
    case Op::variable: return make_constant(n->var == var ? 1.0 : 0.0);
    case Op::neg: return make_unary(Op::neg, differentiate(n->lhs, var));
    case Op::add: return make_binary(Op::add, differentiate(n->lhs, var), differentiate(n->rhs, var));
    case Op::sub: return make_binary(Op::sub, differentiate(n->lhs, var), differentiate(n->rhs, var));
    case Op::mul:
      return make_binary(Op::add, make_binary(Op::mul, differentiate(n->lhs, var), n->rhs),
                         make_binary(Op::mul, n->lhs, differentiate(n->rhs, var)));
    case Op::div: {
      // (u/w)' = u'/w - u w' / w^2
      auto du = differentiate(n->lhs, var);
      auto dw = differentiate(n->rhs, var);
      return make_binary(Op::sub, make_binary(Op::div, du, n->rhs),
                         make_binary(Op::div, make_binary(Op::mul, n->lhs, dw),
                                     make_binary(Op::mul, n->rhs, n->rhs)));
    }
    case Op::pow: {
      auto du = differentiate(n->lhs, var);
      if (n->rhs->op == Op::constant) {
        const double c = n->rhs->value;
        return make_binary(Op::mul,
                           make_binary(Op::mul, make_constant(c),
                                       make_binary(Op::pow, n->lhs, make_constant(c - 1.0))),
                           du);
      }
      // (u^w)' = u^w (w' log u + w u' / u)
      auto dw = differentiate(n->rhs, var);
      return make_binary(Op::mul, n,
                         make_binary(Op::add, make_binary(Op::mul, dw, make_unary(Op::log, n->lhs)),
                                     make_binary(Op::div, make_binary(Op::mul, n->rhs, du), n->lhs)));
    }
    case Op::exp: return make_binary(Op::mul, n, differentiate(n->lhs, var));
    case Op::log: return make_binary(Op::div, differentiate(n->lhs, var), n->lhs);
    case Op::sin: return make_binary(Op::mul, make_unary(Op::cos, n->lhs), differentiate(n->lhs, var));
    case Op::cos:
      return make_unary(Op::neg, make_binary(Op::mul, make_unary(Op::sin, n->lhs), differentiate(n->lhs, var)));
  }
  return make_constant(0.0);
}

void print(const ExprNode& n, std::ostringstream& out) {
  auto paren = [&](const ExprNode& child) {
    out << '(';
    print(child, out);
    out << ')';
  };
  switch (n.op) {
    case Op::constant: out << n.value; return;
    case Op::variable:
      if (n.var == 0) out << 't'; else out << 'x' << n.var;
      return;
    case Op::neg: out << '-'; paren(*n.lhs); return;
    case Op::exp: out << "exp"; paren(*n.lhs); return;
    case Op::log: out << "log"; paren(*n.lhs); return;
    case Op::sin: out << "sin"; paren(*n.lhs); return;
    case Op::cos: out << "cos"; paren(*n.lhs); return;
    default: {
      const char* sym = n.op == Op::add ? "+" : n.op == Op::sub ? "-" : n.op == Op::mul ? "*"
                      : n.op == Op::div ? "/" : "^";
      paren(*n.lhs);
      out << sym;
      paren(*n.rhs);
    }
  }
}

class Parser {
 public:
  Parser(std::string_view text, std::size_t dim) : text_(text), dim_(dim) {}

  NodePtr parse() {
    NodePtr root = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw ConfigError("expression '" + std::string(text_) + "': " + message + " at position " +
                      std::to_string(pos_));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) lhs = make_binary(Op::add, lhs, term());
      else if (accept('-')) lhs = make_binary(Op::sub, lhs, term());
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) lhs = make_binary(Op::mul, lhs, unary());
      else if (accept('/')) lhs = make_binary(Op::div, lhs, unary());
      else return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make_unary(Op::neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make_binary(Op::pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (accept('(')) {
      NodePtr inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const std::string rest(text_.substr(pos_));
    char* end = nullptr;
    const double value = std::strtod(rest.c_str(), &end);
    if (end == rest.c_str()) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - rest.c_str());
    return make_constant(value);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string name(text_.substr(start, pos_ - start));
    if (name == "t") return make_variable(0);
    if (name == "x") {
      if (dim_ != 1) fail("'x' is only allowed for scalar paths; use x1..x" + std::to_string(dim_));
      return make_variable(1);
    }
    if (name.size() > 1 && name[0] == 'x' &&
        name.find_first_not_of("0123456789", 1) == std::string::npos) {
      const std::size_t k = std::stoul(name.substr(1));
      if (k == 0 || k > dim_) fail("variable " + name + " outside x1..x" + std::to_string(dim_));
      return make_variable(k);
    }
    Op op;
    if (name == "exp") op = Op::exp;
    else if (name == "log") op = Op::log;
    else if (name == "sin") op = Op::sin;
    else if (name == "cos") op = Op::cos;
    else fail("unknown identifier '" + name + "'");
    if (!accept('(')) fail("expected '(' after " + name);
    NodePtr arg = expr();
    if (!accept(')')) fail("expected ')'");
    return make_unary(op, arg);
  }

  std::string_view text_;
  std::size_t dim_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(std::string_view text, std::size_t dim) {
  if (dim == 0) throw ConfigError("expression dimension must be positive");
  return Expression(Parser(text, dim).parse(), dim);
}

Expression Expression::constant(double value) { return Expression(make_constant(value), 1); }

double Expression::evaluate(double t, std::span<const double> x) const { return evaluate_node(*root_, t, x); }

Expression Expression::derivative(Variable var) const {
  if (var > dim_) throw ConfigError("derivative variable outside x1..x" + std::to_string(dim_));
  return Expression(differentiate(root_, var), dim_);
}

bool Expression::is_constant() const { return root_->op == Op::constant; }
bool Expression::is_zero() const { return is_const(root_, 0.0); }

std::string Expression::to_string() const {
  std::ostringstream out;
  out.precision(17);
  print(*root_, out);
  return out.str();
}

}  // namespace pathcalc
