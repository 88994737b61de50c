#pragma once

// Spectral problem
//   -u'' + (l(l+1)/x^2 + q(x)) u = lambda (r0(x) u + r1(x) u'),  0 < x <= a,
//   beta u(a) + gamma u'(a) = 0,
// with the regular behaviour u ~ x^{l+1} at the origin.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "spps/error.hpp"
#include "spps/expr.hpp"

namespace spps {

struct ProblemSpec {
  double l = 0.0;
  double a = 1.0;
  Expr q = Expr::constant(0.0);
  Expr r0 = Expr::constant(1.0);
  Expr r1 = Expr::constant(0.0);
  double alpha = 0.0;  // |q(x)| <= C x^alpha near the origin
  cplx beta = 1.0;
  cplx gamma = 0.0;
  // Optional closed-form particular solution at lambda = 0 and its derivative.
  std::optional<Expr> u0;
  std::optional<Expr> du0;

  bool q_is_zero() const { return q.is_constant() && q.eval(0.0) == cplx(0.0); }
  bool r0_is_zero() const { return r0.is_constant() && r0.eval(0.0) == cplx(0.0); }
  bool r0_is_one() const { return r0.is_constant() && r0.eval(0.0) == cplx(1.0); }
  bool r1_is_zero() const { return r1.is_constant() && r1.eval(0.0) == cplx(0.0); }
};

struct ValidationReport {
  double C = 0.0;  // max of |q(x)| x^{-alpha} over the sample mesh
  std::vector<std::string> warnings;
};

namespace detail {

// Log-spaced points accumulating at the origin followed by a uniform sweep.
inline std::vector<double> validation_mesh(double a) {
  std::vector<double> xs;
  for (int k = 60; k >= 1; --k) xs.push_back(a * std::pow(2.0, -0.5 * k));
  for (int k = 1; k <= 400; ++k) xs.push_back(a * k / 400.0);
  return xs;
}

}  // namespace detail

inline ValidationReport validate(const ProblemSpec& p) {
  if (!std::isfinite(p.l) || p.l < -0.5) throw ValidationError("l", "l below -1/2");
  if (!std::isfinite(p.a) || !(p.a > 0.0)) throw ValidationError("a", "right endpoint must be positive");
  if (!std::isfinite(p.alpha) || !(p.alpha > -2.0)) throw ValidationError("alpha", "alpha must exceed -2");
  if (std::abs(p.beta) + std::abs(p.gamma) == 0.0) throw ValidationError("beta", "beta and gamma are both zero");
  if (!std::isfinite(std::abs(p.beta)) || !std::isfinite(std::abs(p.gamma)))
    throw ValidationError("beta", "boundary coefficients must be finite");
  if (p.u0.has_value() != p.du0.has_value())
    throw ValidationError("u0", "u0 and du0 must be given together");

  ValidationReport rep;
  const auto xs = detail::validation_mesh(p.a);
  auto eval_field = [](const Expr& e, double x, const char* field) {
    try {
      return e.eval(x);
    } catch (const DomainError& err) {
      throw ValidationError(field, err.what());
    }
  };

  // Growth of q x^{-alpha}: the values on the inner half of the log mesh must
  // not blow up relative to the outer ones.
  double inner = 0.0, outer = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double x = xs[k];
    const double v = std::abs(eval_field(p.q, x, "q")) * std::pow(x, -p.alpha);
    if (!std::isfinite(v)) throw ValidationError("q", "q(x) x^-alpha is not finite at x=" + std::to_string(x));
    rep.C = std::max(rep.C, v);
    if (k < 30) inner = std::max(inner, v);
    else outer = std::max(outer, v);
    eval_field(p.r0, x, "r0");
    eval_field(p.r1, x, "r1");
  }
  if (inner > 100.0 * std::max(outer, 1e-300) && inner > 1e-12)
    throw ValidationError("alpha", "q(x) x^-alpha is unbounded near 0; alpha overstates the growth exponent");
  if (inner > 10.0 * std::max(outer, 1e-300) && inner > 1e-12)
    rep.warnings.push_back("q(x) x^-alpha grows towards the origin; check alpha");

  try {
    (void)p.r1.eval(0.0);
  } catch (const DomainError&) {
    rep.warnings.push_back("r1 is not defined at the origin");
  }
  return rep;
}

}  // namespace spps
