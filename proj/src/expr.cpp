// SPDX-License-Identifier: Apache-2.0
#include "leam/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

namespace leam {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::syntax_error: return "syntax_error";
    case Errc::unknown_character: return "unknown_character";
    case Errc::unbound_parameter: return "unbound_parameter";
    case Errc::division_by_zero: return "division_by_zero";
    case Errc::format_error: return "format_error";
    case Errc::duplicate_solid: return "duplicate_solid";
    case Errc::duplicate_parameter: return "duplicate_parameter";
    case Errc::unknown_role: return "unknown_role";
    case Errc::unknown_shape: return "unknown_shape";
    case Errc::open_polygon: return "open_polygon";
    case Errc::degenerate_polygon: return "degenerate_polygon";
    case Errc::unknown_material: return "unknown_material";
    case Errc::unknown_solid: return "unknown_solid";
    case Errc::unknown_parameter: return "unknown_parameter";
    case Errc::unknown_block_kind: return "unknown_block_kind";
    case Errc::unknown_member: return "unknown_member";
    case Errc::empty_bounding_box: return "empty_bounding_box";
    case Errc::missing_artifact: return "missing_artifact";
    case Errc::fixture_miss: return "fixture_miss";
    case Errc::backend_error: return "backend_error";
    case Errc::validation_failed: return "validation_failed";
    case Errc::unsupported_shape: return "unsupported_shape";
    case Errc::config_error: return "config_error";
    case Errc::io_error: return "io_error";
  }
  return "unknown";
}

std::string format_number(double value) {
  if (!std::isfinite(value))
    throw Error(Errc::format_error, "non-finite number is not representable");
  if (value == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

bool is_identifier(std::string_view text) {
  if (text.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(text[0])) || text[0] == '_')) return false;
  return std::all_of(text.begin() + 1, text.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

Expr Expr::number(double value) {
  if (!std::isfinite(value))
    throw Error(Errc::format_error, "number literal must be finite");
  if (std::signbit(value)) {
    if (value == 0.0) value = 0.0;  // drop the sign of -0
    else return neg(number(-value));
  }
  Expr e;
  auto n = std::make_shared<Node>();
  n->kind = Kind::number;
  n->value = value;
  e.node_ = std::move(n);
  return e;
}

Expr Expr::param(std::string name) {
  if (!is_identifier(name))
    throw Error(Errc::format_error, "invalid parameter name '" + name + "'");
  Expr e;
  auto n = std::make_shared<Node>();
  n->kind = Kind::param;
  n->name = std::move(name);
  e.node_ = std::move(n);
  return e;
}

Expr Expr::neg(Expr operand) {
  Expr e;
  auto n = std::make_shared<Node>();
  n->kind = Kind::neg;
  n->children.push_back(std::move(operand));
  e.node_ = std::move(n);
  return e;
}

Expr Expr::binary(Kind op, Expr lhs, Expr rhs) {
  Expr e;
  auto n = std::make_shared<Node>();
  n->kind = op;
  n->children.push_back(std::move(lhs));
  n->children.push_back(std::move(rhs));
  e.node_ = std::move(n);
  return e;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Expr::Kind::number: return a.value() == b.value();
    case Expr::Kind::param: return a.name() == b.name();
    case Expr::Kind::neg: return a.lhs() == b.lhs();
    default: return a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
}

namespace {

struct Token {
  enum class Kind { number, ident, op, lparen, rparen, end };
  Kind kind;
  double number = 0.0;
  std::string ident;
  char op = 0;
  std::size_t offset = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
    tok_.offset = pos_;
    if (pos_ >= text_.size()) {
      tok_.kind = Token::Kind::end;
      return;
    }
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < text_.size() &&
         std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
      double v = 0.0;
      auto res = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
      if (res.ec != std::errc())
        throw Error(Errc::syntax_error, "malformed number literal", static_cast<long>(pos_));
      tok_.kind = Token::Kind::number;
      tok_.number = v;
      pos_ = static_cast<std::size_t>(res.ptr - text_.data());
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                     text_[pos_] == '_'))
        ++pos_;
      tok_.kind = Token::Kind::ident;
      tok_.ident = std::string(text_.substr(start, pos_ - start));
      return;
    }
    switch (c) {
      case '+': case '-': case '*': case '/':
        tok_.kind = Token::Kind::op;
        tok_.op = c;
        ++pos_;
        return;
      case '(':
        tok_.kind = Token::Kind::lparen;
        ++pos_;
        return;
      case ')':
        tok_.kind = Token::Kind::rparen;
        ++pos_;
        return;
      default:
        throw Error(Errc::unknown_character,
                    std::string("character '") + c + "' is not part of the expression grammar",
                    static_cast<long>(pos_));
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  Token tok_;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lex_(text) {}

  Expr parse() {
    Expr e = expr();
    const Token& t = lex_.peek();
    if (t.kind != Token::Kind::end)
      throw Error(Errc::syntax_error, "unexpected trailing input", static_cast<long>(t.offset));
    return e;
  }

 private:
  Expr expr() {
    Expr e = term();
    while (lex_.peek().kind == Token::Kind::op &&
           (lex_.peek().op == '+' || lex_.peek().op == '-')) {
      char op = lex_.take().op;
      e = Expr::binary(op == '+' ? Expr::Kind::add : Expr::Kind::sub, std::move(e), term());
    }
    return e;
  }

  Expr term() {
    Expr e = factor();
    while (lex_.peek().kind == Token::Kind::op &&
           (lex_.peek().op == '*' || lex_.peek().op == '/')) {
      char op = lex_.take().op;
      e = Expr::binary(op == '*' ? Expr::Kind::mul : Expr::Kind::div, std::move(e), factor());
    }
    return e;
  }

  Expr factor() {
    const Token& t = lex_.peek();
    if (t.kind == Token::Kind::op && t.op == '-') {
      lex_.take();
      return Expr::neg(factor());
    }
    return primary();
  }

  Expr primary() {
    Token t = lex_.take();
    switch (t.kind) {
      case Token::Kind::number:
        return Expr::number(t.number);
      case Token::Kind::ident:
        return Expr::param(std::move(t.ident));
      case Token::Kind::lparen: {
        Expr e = expr();
        Token close = lex_.take();
        if (close.kind != Token::Kind::rparen)
          throw Error(Errc::syntax_error, "expected ')'", static_cast<long>(close.offset));
        return e;
      }
      case Token::Kind::end:
        throw Error(Errc::syntax_error, "unexpected end of expression", static_cast<long>(t.offset));
      default:
        throw Error(Errc::syntax_error, "unexpected token", static_cast<long>(t.offset));
    }
  }

  Lexer lex_;
};

int precedence(Expr::Kind k) {
  switch (k) {
    case Expr::Kind::add:
    case Expr::Kind::sub: return 1;
    case Expr::Kind::mul:
    case Expr::Kind::div: return 2;
    case Expr::Kind::neg: return 3;
    default: return 4;
  }
}

bool is_binary(Expr::Kind k) {
  return k == Expr::Kind::add || k == Expr::Kind::sub || k == Expr::Kind::mul ||
         k == Expr::Kind::div;
}

char op_char(Expr::Kind k) {
  switch (k) {
    case Expr::Kind::add: return '+';
    case Expr::Kind::sub: return '-';
    case Expr::Kind::mul: return '*';
    default: return '/';
  }
}

void print(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case Expr::Kind::number:
      out += format_number(e.value());
      return;
    case Expr::Kind::param:
      out += e.name();
      return;
    case Expr::Kind::neg:
      out += '-';
      if (is_binary(e.lhs().kind())) {
        out += '(';
        print(e.lhs(), out);
        out += ')';
      } else {
        print(e.lhs(), out);
      }
      return;
    default: {
      int prec = precedence(e.kind());
      bool wrap_left = precedence(e.lhs().kind()) < prec;
      // Left associativity: a right child at the same precedence level
      // needs parentheses to survive a round trip.
      bool wrap_right = precedence(e.rhs().kind()) <= prec && is_binary(e.rhs().kind());
      if (wrap_left) out += '(';
      print(e.lhs(), out);
      if (wrap_left) out += ')';
      out += ' ';
      out += op_char(e.kind());
      out += ' ';
      if (wrap_right) out += '(';
      print(e.rhs(), out);
      if (wrap_right) out += ')';
      return;
    }
  }
}

}  // namespace

Expr parse_expr(std::string_view text) {
  if (text.empty()) throw Error(Errc::syntax_error, "empty expression", 0);
  return Parser(text).parse();
}

std::string to_text(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

double eval_expr(const Expr& e, const ParamEnv& env) {
  switch (e.kind()) {
    case Expr::Kind::number: return e.value();
    case Expr::Kind::param: return env.get(e.name());
    case Expr::Kind::neg: return -eval_expr(e.lhs(), env);
    case Expr::Kind::add: return eval_expr(e.lhs(), env) + eval_expr(e.rhs(), env);
    case Expr::Kind::sub: return eval_expr(e.lhs(), env) - eval_expr(e.rhs(), env);
    case Expr::Kind::mul: return eval_expr(e.lhs(), env) * eval_expr(e.rhs(), env);
    case Expr::Kind::div: {
      double denom = eval_expr(e.rhs(), env);
      if (denom == 0.0) throw Error(Errc::division_by_zero, "division by zero");
      return eval_expr(e.lhs(), env) / denom;
    }
  }
  throw Error(Errc::syntax_error, "invalid expression node");
}

namespace {
void collect_params(const Expr& e, std::set<std::string>& out) {
  switch (e.kind()) {
    case Expr::Kind::number: return;
    case Expr::Kind::param: out.insert(e.name()); return;
    case Expr::Kind::neg: collect_params(e.lhs(), out); return;
    default:
      collect_params(e.lhs(), out);
      collect_params(e.rhs(), out);
  }
}
}  // namespace

std::set<std::string> free_params(const Expr& e) {
  std::set<std::string> out;
  collect_params(e, out);
  return out;
}

void ParamEnv::define(const std::string& name, double value) {
  if (!is_identifier(name))
    throw Error(Errc::format_error, "invalid parameter name '" + name + "'");
  if (contains(name))
    throw Error(Errc::duplicate_parameter, "parameter '" + name + "' already defined");
  if (!std::isfinite(value))
    throw Error(Errc::format_error, "parameter '" + name + "' has a non-finite value");
  items_.emplace_back(name, value);
}

void ParamEnv::assign(const std::string& name, double value) {
  if (!std::isfinite(value))
    throw Error(Errc::format_error, "parameter '" + name + "' has a non-finite value");
  for (auto& [n, v] : items_) {
    if (n == name) {
      v = value;
      return;
    }
  }
  throw Error(Errc::unknown_parameter, "unknown parameter '" + name + "'");
}

double ParamEnv::get(const std::string& name) const {
  for (const auto& [n, v] : items_)
    if (n == name) return v;
  throw Error(Errc::unbound_parameter, "parameter '" + name + "' is not bound");
}

bool ParamEnv::contains(std::string_view name) const {
  for (const auto& [n, v] : items_)
    if (n == name) return true;
  return false;
}

}  // namespace leam
