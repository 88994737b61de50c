#pragma once

/* Coefficient expressions over one real variable `x`.
 *
 * expr    ::= term { ("+" | "-") term }
 * term    ::= unary { ("*" | "/") unary }
 * unary   ::= ("-" | "+") unary | power
 * power   ::= primary [ "^" unary ]
 * primary ::= number [ "i" ] | "i" | "x" | "pi" | call | "(" expr ")"
 * call    ::= ("sin" | "cos" | "exp" | "ln" | "sqrt" | "abs") "(" expr ")"
 *           | ("pow" | "besselj" | "besseli") "(" expr "," expr ")"
 *
 * `^` is right associative and binds tighter than unary minus, so -x^2 is
 * -(x^2) and 2^-1 is 0.5. Values are complex; `2i` is an imaginary literal.
 * besselj(nu, z) and besseli(nu, z) take a real constant order; besselj
 * needs a real argument.
 */

#include <charconv>
#include <cmath>
#include <complex>
#include <cstdio>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "spps/error.hpp"
#include "spps/special.hpp"

namespace spps {

using cplx = std::complex<double>;

class Expr {
 public:
  enum class Kind { Literal, Variable, Negate, Add, Sub, Mul, Div, Pow, Call };
  enum class Func { Sin, Cos, Exp, Ln, Sqrt, Abs, Pow, BesselJ, BesselI };

  struct Node {
    Kind kind;
    cplx value{};                     // Literal
    Func func{};                      // Call
    std::vector<std::shared_ptr<const Node>> args;
  };

  /// The constant zero.
  Expr() : root_(make_literal(0.0)) {}

  static Expr constant(cplx v) { return Expr(make_literal(v)); }
  static Expr parse(std::string_view text);

  cplx eval(double x) const { return eval_node(*root_, x); }

  /// Canonical, fully parenthesised rendering that parses back to the same tree.
  std::string to_string() const {
    std::string out;
    print_node(*root_, out);
    return out;
  }

  /// True when the tree contains no occurrence of `x`.
  bool is_constant() const { return !mentions_x(*root_); }

  const Node& root() const { return *root_; }

  friend bool operator==(const Expr& a, const Expr& b) { return same_tree(*a.root_, *b.root_); }

 private:
  using NodePtr = std::shared_ptr<const Node>;
  explicit Expr(NodePtr root) : root_(std::move(root)) {}

  static NodePtr make_literal(cplx v) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Literal;
    n->value = v;
    return n;
  }

  static cplx eval_node(const Node& n, double x);
  static void print_node(const Node& n, std::string& out);
  static bool mentions_x(const Node& n) {
    if (n.kind == Kind::Variable) return true;
    for (const auto& a : n.args)
      if (mentions_x(*a)) return true;
    return false;
  }
  static bool same_tree(const Node& a, const Node& b) {
    if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
    if (a.kind == Kind::Literal && a.value != b.value) return false;
    if (a.kind == Kind::Call && a.func != b.func) return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
      if (!same_tree(*a.args[i], *b.args[i])) return false;
    return true;
  }

  friend class ExprParser;
  NodePtr root_;
};

namespace detail {

inline cplx checked(cplx v, const char* what, double x) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s is not finite at x=%.17g", what, x);
    throw DomainError(buf);
  }
  return v;
}

inline cplx power(cplx base, cplx ex, double x) {
  if (base == cplx(0.0)) {
    if (ex.real() > 0.0) return 0.0;
    if (ex == cplx(0.0)) return 1.0;
    char buf[96];
    std::snprintf(buf, sizeof buf, "zero raised to a non-positive power at x=%.17g", x);
    throw DomainError(buf);
  }
  if (base.imag() == 0.0 && ex.imag() == 0.0) {
    const double b = base.real(), e = ex.real();
    if (b > 0.0 || e == std::round(e)) return std::pow(b, e);
  }
  return std::pow(base, ex);
}

}  // namespace detail

inline cplx Expr::eval_node(const Node& n, double x) {
  using detail::checked;
  switch (n.kind) {
    case Kind::Literal:
      return n.value;
    case Kind::Variable:
      return x;
    case Kind::Negate:
      return cplx(0.0) - eval_node(*n.args[0], x);  // keeps a real result free of -0 imaginary parts
    case Kind::Add:
      return checked(eval_node(*n.args[0], x) + eval_node(*n.args[1], x), "sum", x);
    case Kind::Sub:
      return checked(eval_node(*n.args[0], x) - eval_node(*n.args[1], x), "difference", x);
    case Kind::Mul:
      return checked(eval_node(*n.args[0], x) * eval_node(*n.args[1], x), "product", x);
    case Kind::Div: {
      const cplx num = eval_node(*n.args[0], x);
      const cplx den = eval_node(*n.args[1], x);
      if (den == cplx(0.0)) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "division by zero at x=%.17g", x);
        throw DomainError(buf);
      }
      return checked(num / den, "quotient", x);
    }
    case Kind::Pow:
      return checked(detail::power(eval_node(*n.args[0], x), eval_node(*n.args[1], x), x), "power", x);
    case Kind::Call: {
      const cplx a = eval_node(*n.args[0], x);
      switch (n.func) {
        case Func::Sin:
          return checked(a.imag() == 0.0 ? cplx(std::sin(a.real())) : std::sin(a), "sin", x);
        case Func::Cos:
          return checked(a.imag() == 0.0 ? cplx(std::cos(a.real())) : std::cos(a), "cos", x);
        case Func::Exp:
          return checked(a.imag() == 0.0 ? cplx(std::exp(a.real())) : std::exp(a), "exp", x);
        case Func::Ln:
          if (a == cplx(0.0)) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "ln of zero at x=%.17g", x);
            throw DomainError(buf);
          }
          return checked(a.imag() == 0.0 && a.real() > 0.0 ? cplx(std::log(a.real())) : std::log(a), "ln", x);
        case Func::Sqrt:
          return checked(a.imag() == 0.0 && a.real() >= 0.0 ? cplx(std::sqrt(a.real())) : std::sqrt(a), "sqrt", x);
        case Func::Abs:
          return std::abs(a);
        case Func::Pow:
          return checked(detail::power(a, eval_node(*n.args[1], x), x), "pow", x);
        case Func::BesselJ:
        case Func::BesselI: {
          const cplx z = eval_node(*n.args[1], x);
          if (a.imag() != 0.0) throw DomainError("Bessel order must be real");
          if (n.func == Func::BesselI) return checked(bench::bessel_I(a.real(), z), "besseli", x);
          if (z.imag() != 0.0) throw DomainError("besselj needs a real argument");
          return checked(bench::bessel_J(a.real(), z.real()), "besselj", x);
        }
      }
    }
  }
  return 0.0;  // unreachable
}

inline void Expr::print_node(const Node& n, std::string& out) {
  auto num = [&](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
  };
  switch (n.kind) {
    case Kind::Literal: {
      const double re = n.value.real(), im = n.value.imag();
      auto signed_num = [&](double v, const char* suffix) {
        if (std::signbit(v)) {
          out += "(-";
          num(-v);
          out += suffix;
          out += ")";
        } else {
          num(v);
          out += suffix;
        }
      };
      if (im == 0.0) {
        signed_num(re, "");
      } else if (re == 0.0) {
        signed_num(im, "i");
      } else {
        out += "(";
        signed_num(re, "");
        out += im < 0.0 ? " - " : " + ";
        num(std::abs(im));
        out += "i)";
      }
      return;
    }
    case Kind::Variable:
      out += "x";
      return;
    case Kind::Negate:
      out += "(-";
      print_node(*n.args[0], out);
      out += ")";
      return;
    case Kind::Add:
    case Kind::Sub:
    case Kind::Mul:
    case Kind::Div:
    case Kind::Pow: {
      static constexpr const char* ops[] = {" + ", " - ", " * ", " / ", "^"};
      const int idx = static_cast<int>(n.kind) - static_cast<int>(Kind::Add);
      out += "(";
      print_node(*n.args[0], out);
      out += ops[idx];
      print_node(*n.args[1], out);
      out += ")";
      return;
    }
    case Kind::Call: {
      static constexpr const char* names[] = {"sin", "cos", "exp", "ln", "sqrt", "abs", "pow", "besselj", "besseli"};
      out += names[static_cast<int>(n.func)];
      out += "(";
      print_node(*n.args[0], out);
      if (n.args.size() > 1) {
        out += ", ";
        print_node(*n.args[1], out);
      }
      out += ")";
      return;
    }
  }
}

class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : s_(text) {}

  Expr run() {
    if (s_.find_first_not_of(" \t\r\n") == std::string_view::npos) throw ParseError("empty expression", 0);
    auto root = expr();
    skip();
    if (pos_ != s_.size()) throw ParseError(std::string("unexpected '") + s_[pos_] + "'", pos_);
    return Expr(std::move(root));
  }

 private:
  using NodePtr = Expr::NodePtr;
  using Kind = Expr::Kind;

  static NodePtr binary(Kind k, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = k;
    n->args = {std::move(a), std::move(b)};
    return n;
  }

  void skip() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r' || s_[pos_] == '\n')) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= s_.size()) throw ParseError(std::string("expected '") + c + "' but input ended", pos_);
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  NodePtr expr() {
    auto lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = binary(Kind::Add, lhs, term());
      else if (accept('-'))
        lhs = binary(Kind::Sub, lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    auto lhs = unary();
    for (;;) {
      if (accept('*'))
        lhs = binary(Kind::Mul, lhs, unary());
      else if (accept('/'))
        lhs = binary(Kind::Div, lhs, unary());
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) {
      auto n = std::make_shared<Expr::Node>();
      n->kind = Kind::Negate;
      n->args = {unary()};
      return n;
    }
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    auto base = primary();
    if (accept('^')) return binary(Kind::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of expression", pos_);
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      auto inner = expr();
      expect(')');
      return inner;
    }
    if ((c >= '0' && c <= '9') || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  NodePtr number() {
    const std::size_t start = pos_;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (ec != std::errc()) throw ParseError("malformed number", start);
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    cplx value = v;
    // `2i` is an imaginary literal; `2in` would be a malformed identifier.
    if (pos_ < s_.size() && s_[pos_] == 'i' &&
        (pos_ + 1 == s_.size() || !std::isalnum(static_cast<unsigned char>(s_[pos_ + 1])))) {
      ++pos_;
      value = cplx(0.0, v);
    }
    return Expr::make_literal(value);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    const std::string_view name = s_.substr(start, pos_ - start);
    if (name == "x") {
      auto n = std::make_shared<Expr::Node>();
      n->kind = Kind::Variable;
      return n;
    }
    if (name == "i") return Expr::make_literal(cplx(0.0, 1.0));
    if (name == "pi") return Expr::make_literal(std::numbers::pi);

    static constexpr std::pair<std::string_view, Expr::Func> funcs[] = {
        {"sin", Expr::Func::Sin},   {"cos", Expr::Func::Cos},   {"exp", Expr::Func::Exp}, {"ln", Expr::Func::Ln},
        {"sqrt", Expr::Func::Sqrt}, {"abs", Expr::Func::Abs}, {"pow", Expr::Func::Pow},
        {"besselj", Expr::Func::BesselJ}, {"besseli", Expr::Func::BesselI}};
    for (const auto& [fname, f] : funcs) {
      if (name != fname) continue;
      expect('(');
      auto n = std::make_shared<Expr::Node>();
      n->kind = Kind::Call;
      n->func = f;
      n->args.push_back(expr());
      if (f == Expr::Func::Pow || f == Expr::Func::BesselJ || f == Expr::Func::BesselI) {
        expect(',');
        n->args.push_back(expr());
      }
      expect(')');
      return n;
    }
    throw ParseError("unknown identifier '" + std::string(name) + "'", start);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

inline Expr Expr::parse(std::string_view text) { return ExprParser(text).run(); }

/// Parses and evaluates a constant expression such as "1+2i" or "-3".
inline cplx parse_complex(std::string_view text) {
  const Expr e = Expr::parse(text);
  if (!e.is_constant()) throw ParseError("constant expected, found a function of x", 0);
  return e.eval(0.0);
}

}  // namespace spps
