// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "leam/error.hpp"

namespace leam {

// The arithmetic expression language every solid dimension is written in,
// e.g. "Slot_Offset + Slot2_L" or "SL / 2".
//
//   expr    := term (('+' | '-') term)*
//   term    := factor (('*' | '/') factor)*
//   factor  := '-' factor | primary
//   primary := NUMBER | IDENT | '(' expr ')'
//
// NUMBER is a finite non-negative decimal (optional fraction, optional
// exponent); IDENT matches [A-Za-z_][A-Za-z0-9_]*. Binary operators are
// left-associative. Negative constants parse as unary minus applied to a
// literal, and Expr::number() builds that same shape so that printing and
// re-parsing always yields a structurally identical tree.
class Expr {
 public:
  enum class Kind { number, param, neg, add, sub, mul, div };

  Expr() = default;  // empty handle; only assignment is valid on it

  static Expr number(double value);
  static Expr param(std::string name);
  static Expr neg(Expr operand);
  static Expr binary(Kind op, Expr lhs, Expr rhs);

  Kind kind() const { return node_->kind; }
  double value() const { return node_->value; }             // number only
  const std::string& name() const { return node_->name; }   // param only
  const Expr& lhs() const { return node_->children[0]; }    // neg operand
  const Expr& rhs() const { return node_->children[1]; }

  bool valid() const { return node_ != nullptr; }

  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

 private:
  struct Node {
    Kind kind;
    double value = 0.0;
    std::string name;
    std::vector<Expr> children;  // one for neg, two for binary operators
  };
  std::shared_ptr<const Node> node_;
};

// Named parameter values, millimetres unless stated. Insertion order is
// preserved: it is the declaration order of the source file and the
// emission order of Para.bas.
class ParamEnv {
 public:
  // Throws duplicate_parameter / format_error (non-finite value).
  void define(const std::string& name, double value);
  // Reassigns an existing parameter; throws unknown_parameter.
  void assign(const std::string& name, double value);
  double get(const std::string& name) const;  // throws unbound_parameter
  bool contains(std::string_view name) const;
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const std::vector<std::pair<std::string, double>>& items() const { return items_; }

  friend bool operator==(const ParamEnv& a, const ParamEnv& b) { return a.items_ == b.items_; }

 private:
  std::vector<std::pair<std::string, double>> items_;
};

Expr parse_expr(std::string_view text);
std::string to_text(const Expr& e);  // canonical form; parse_expr(to_text(e)) == e
double eval_expr(const Expr& e, const ParamEnv& env);
std::set<std::string> free_params(const Expr& e);

bool is_identifier(std::string_view text);

// Shortest round-trip decimal form ("10", "0.035", "5.96e+07"). Negative
// zero normalizes to "0". Throws on non-finite input.
std::string format_number(double value);

}  // namespace leam
