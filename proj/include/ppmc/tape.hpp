#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ppmc/errors.hpp"

namespace ppmc {

class Tape;

/// Operation kind recorded per tape node, for debugging and inspection.
enum class OpCode : std::uint8_t {
  input, add, sub, mul, div, pow, neg, log, exp, sin, cos, sqrt, asin, sigm, lse
};

/// A scalar recorded on a reverse-mode tape. Constants carry no tape and
/// no node; combining them with recorded values folds them into the
/// partial derivatives of the resulting node.
class Var {
 public:
  static constexpr std::uint32_t kNoNode = std::numeric_limits<std::uint32_t>::max();

  /// Constant injection. Implicit so model code can mix literals freely.
  Var(double c = 0.0) : value_(c) {
    if (!std::isfinite(c)) throw DomainError("non-finite constant");
  }

  double value() const { return value_; }
  bool is_constant() const { return tape_ == nullptr; }
  Tape* tape() const { return tape_; }
  std::uint32_t node() const { return node_; }

 private:
  friend class Tape;
  friend Var record_binary(OpCode op, const Var& a, const Var& b,
                           double value, double da, double db);
  friend Var record_unary(OpCode op, const Var& a, double value, double d);
  Var(double v, Tape* tape, std::uint32_t node)
      : value_(v), tape_(tape), node_(node) {}

  double value_;
  Tape* tape_ = nullptr;
  std::uint32_t node_ = kNoNode;
};

/// Append-only record of the operations applied to recorded scalars.
/// Operand indices always precede the node that references them, so one
/// reverse sweep visits every node exactly once.
///
/// Single-threaded: one tape per chain, never shared, and a Var must never
/// cross tapes.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Records an input leaf; gradients are taken with respect to these.
  Var input(double v) {
    if (!std::isfinite(v)) throw DomainError("non-finite input");
    return Var(v, this, push(OpCode::input, kNone, kNone, 0.0, 0.0));
  }

  std::size_t size() const { return nodes_.size(); }

  void reset() { nodes_.clear(); }

  /// Partial derivatives of `output` with respect to each input, by one
  /// backward sweep. The tape is reset afterwards; all Vars recorded on it
  /// become invalid.
  std::vector<double> gradient(const Var& output, std::span<const Var> inputs) {
    if (!std::isfinite(output.value()))
      throw NumericalError("non-finite objective");
    for (const Var& in : inputs) {
      if (in.is_constant() || in.tape() != this)
        throw TapeMismatch("gradient input not recorded on this tape");
    }
    std::vector<double> grad(inputs.size(), 0.0);
    if (!output.is_constant()) {
      if (output.tape() != this)
        throw TapeMismatch("gradient output recorded on a different tape");
      adjoints_.assign(nodes_.size(), 0.0);
      adjoints_[output.node()] = 1.0;
      for (std::uint32_t i = static_cast<std::uint32_t>(nodes_.size()); i-- > 0;) {
        const double a = adjoints_[i];
        if (a == 0.0) continue;
        const Node& n = nodes_[i];
        if (n.lhs != kNone) adjoints_[n.lhs] += a * n.dl;
        if (n.rhs != kNone) adjoints_[n.rhs] += a * n.dr;
      }
      for (std::size_t k = 0; k < inputs.size(); ++k)
        grad[k] = adjoints_[inputs[k].node()];
    }
    reset();
    return grad;
  }

 private:
  static constexpr std::uint32_t kNone = Var::kNoNode;

  struct Node {
    OpCode op;
    std::uint32_t lhs, rhs;  // operand node indices, kNone if absent
    double dl, dr;           // local partials w.r.t. lhs/rhs
  };

  std::uint32_t push(OpCode op, std::uint32_t lhs, std::uint32_t rhs,
                     double dl, double dr) {
    nodes_.push_back(Node{op, lhs, rhs, dl, dr});
    return static_cast<std::uint32_t>(nodes_.size() - 1);
  }

  // Records a binary result; either operand may be a constant, in which
  // case its slot is dropped. Two constants never reach here.
  friend Var record_binary(OpCode op, const Var& a, const Var& b,
                           double value, double da, double db);
  friend Var record_unary(OpCode op, const Var& a, double value, double d);

  std::vector<Node> nodes_;
  std::vector<double> adjoints_;
};

inline Tape* common_tape(const Var& a, const Var& b) {
  if (a.tape() && b.tape() && a.tape() != b.tape())
    throw TapeMismatch("operands recorded on different tapes");
  return a.tape() ? a.tape() : b.tape();
}

inline Var record_binary(OpCode op, const Var& a, const Var& b,
                         double value, double da, double db) {
  Tape* t = common_tape(a, b);
  if (!t) return Var(value);  // constant fold
  const std::uint32_t la = a.is_constant() ? Tape::kNone : a.node();
  const std::uint32_t lb = b.is_constant() ? Tape::kNone : b.node();
  return Var(value, t, t->push(op, la, lb, da, db));
}

inline Var record_unary(OpCode op, const Var& a, double value, double d) {
  if (a.is_constant()) return Var(value);
  Tape* t = a.tape();
  return Var(value, t, t->push(op, a.node(), Tape::kNone, d, 0.0));
}

// -- arithmetic ------------------------------------------------------------

inline Var operator+(const Var& a, const Var& b) {
  return record_binary(OpCode::add, a, b, a.value() + b.value(), 1.0, 1.0);
}

inline Var operator-(const Var& a, const Var& b) {
  return record_binary(OpCode::sub, a, b, a.value() - b.value(), 1.0, -1.0);
}

inline Var operator*(const Var& a, const Var& b) {
  return record_binary(OpCode::mul, a, b, a.value() * b.value(),
                       b.value(), a.value());
}

inline Var operator/(const Var& a, const Var& b) {
  if (b.value() == 0.0) throw DomainError("div: division by zero");
  const double inv = 1.0 / b.value();
  return record_binary(OpCode::div, a, b, a.value() * inv, inv,
                       -a.value() * inv * inv);
}

inline Var operator-(const Var& a) {
  return record_unary(OpCode::neg, a, -a.value(), -1.0);
}

inline Var& operator+=(Var& a, const Var& b) { return a = a + b; }
inline Var& operator-=(Var& a, const Var& b) { return a = a - b; }
inline Var& operator*=(Var& a, const Var& b) { return a = a * b; }
inline Var& operator/=(Var& a, const Var& b) { return a = a / b; }

// -- elementary functions ----------------------------------------------------

inline Var log(const Var& a) {
  if (!(a.value() > 0.0)) throw DomainError("log: argument <= 0");
  return record_unary(OpCode::log, a, std::log(a.value()), 1.0 / a.value());
}

inline Var exp(const Var& a) {
  const double v = std::exp(a.value());
  return record_unary(OpCode::exp, a, v, v);
}

inline Var sin(const Var& a) {
  return record_unary(OpCode::sin, a, std::sin(a.value()), std::cos(a.value()));
}

inline Var cos(const Var& a) {
  return record_unary(OpCode::cos, a, std::cos(a.value()), -std::sin(a.value()));
}

inline Var sqrt(const Var& a) {
  if (!(a.value() > 0.0)) throw DomainError("sqrt: argument <= 0");
  const double v = std::sqrt(a.value());
  return record_unary(OpCode::sqrt, a, v, 0.5 / v);
}

inline Var asin(const Var& a) {
  const double x = a.value();
  if (!(x > -1.0 && x < 1.0)) throw DomainError("asin: |argument| >= 1");
  return record_unary(OpCode::asin, a, std::asin(x),
                      1.0 / std::sqrt(1.0 - x * x));
}

inline Var pow(const Var& a, const Var& b) {
  const double av = a.value(), bv = b.value();
  if (av <= 0.0) {
    const bool integral_exp = b.is_constant() && bv == std::floor(bv);
    if (!integral_exp)
      throw DomainError("pow: base <= 0 with non-integer exponent");
    if (av == 0.0 && bv < 1.0)
      throw DomainError("pow: zero base with exponent < 1");
    const double v = std::pow(av, bv);
    return record_binary(OpCode::pow, a, b, v,
                         bv == 0.0 ? 0.0 : bv * std::pow(av, bv - 1.0), 0.0);
  }
  const double v = std::pow(av, bv);
  return record_binary(OpCode::pow, a, b, v, bv * v / av, v * std::log(av));
}

/// Logistic function, branch-wise so that |a| > 709 does not overflow.
inline Var sigm(const Var& a) {
  const double x = a.value();
  double v;
  if (x >= 0.0) {
    v = 1.0 / (1.0 + std::exp(-x));
  } else {
    const double e = std::exp(x);
    v = e / (1.0 + e);
  }
  return record_unary(OpCode::sigm, a, v, v * (1.0 - v));
}

/// log(exp(a) + exp(b)) via max-shift; gradient is the softmax pair.
inline Var log_sum_exp(const Var& a, const Var& b) {
  const double av = a.value(), bv = b.value();
  const double m = av > bv ? av : bv;
  const double ea = std::exp(av - m), eb = std::exp(bv - m);
  const double s = ea + eb;
  return record_binary(OpCode::lse, a, b, m + std::log(s), ea / s, eb / s);
}

}  // namespace ppmc
