#pragma once

// Recursive-integral formal powers.
//
// X / Z family (Z with a shift centre lambda0, X is the case lambda0 = 0):
//   Z0 = 1, Z(-1) = 0,
//   odd n:  Zn = int_0^x ( p u0 R[u0] Z(n-1) - r1 Z(n-2) ),   R[u] = r0 u + r1 u'
//   even n: Zn = -int_0^x Z(n-1) / (p u0^2),                  p = exp(lambda0 int_0^x r1)
//
// Y family, for the particular solution u0 = x^{l+1} sum Y(2k) of the
// equation at lambda0 (the potential absorbs the shift):
//   odd n:  Yn = int_0^x Y(n-1) p t^{2l+2} Qs,   Qs = q - lambda0 r0 - lambda0 r1 (l+1)/t
//   even n: Yn = int_0^x Y(n-1) / (p t^{2l+2})

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "spps/error.hpp"
#include "spps/grid.hpp"
#include "spps/problem.hpp"

namespace spps {

enum class PowerKind { X, Y, Z };

inline const char* to_string(PowerKind k) {
  switch (k) {
    case PowerKind::X: return "X";
    case PowerKind::Y: return "Y";
    case PowerKind::Z: return "Z";
  }
  return "?";
}

struct PowerOptions {
  int J = 10;           // near-origin nodes replaced in every odd power
  bool strict = false;  // bound violations raise instead of warn
  bool check_bounds = true;
};

struct PowerConstants {
  double C = 1.0;  // max{1, C1, C2, C3}
  double C1 = 0.0, C2 = 0.0, C3 = 0.0;
  // Sharper constant max{C1', C2} with C1' = sup |r0 u0^2| / t^{2l+2}, only
  // meaningful when r1 vanishes identically.
  double C_r1_zero = std::numeric_limits<double>::quiet_NaN();
  // Y family: sup |Qs| t^{-alpha_eff} times max|p| max|1/p|.
  double C_q = std::numeric_limits<double>::quiet_NaN();
  double alpha = 0.0;
};

struct BoundViolation {
  int n;
  std::size_t node;
  double value;
  double bound;
};

struct FormalPowerSet {
  PowerKind kind = PowerKind::X;
  int order = 0;  // N; powers 0..2N are stored
  std::vector<GridFunction> powers;
  cplx lambda0 = 0.0;
  PowerConstants constants;
  GridFunction pfun;
  double l = 0.0;
  bool r1_zero = true;
  bool r0_one = true;
  std::vector<std::string> warnings;

  const GridFunction& operator[](int n) const { return powers.at(static_cast<std::size_t>(n)); }
  const Grid& grid() const { return *powers.front().grid; }
};

namespace detail {

/// Samples a coefficient on the grid. A coefficient undefined at the origin
/// takes the quadratic extrapolation of nodes 1..3 there.
inline GridFunction sample_coefficient(const Expr& e, const GridPtr& g, const char* field) {
  GridFunction f(g);
  for (std::size_t j = 1; j < g->size(); ++j) {
    try {
      f[j] = e.eval(g->x(j));
    } catch (const DomainError& err) {
      throw ValidationError(field, err.what());
    }
  }
  try {
    f[0] = e.eval(0.0);
  } catch (const DomainError&) {
    f[0] = 3.0 * f[1] - 3.0 * f[2] + f[3];
  }
  return f;
}

/// Leading exponent kappa of f ~ c x^kappa estimated from nodes r and 2r.
inline double leading_exponent(const GridFunction& f, std::size_t r) {
  if (2 * r >= f.size()) return std::numeric_limits<double>::quiet_NaN();
  const double a = std::abs(f[r]), b = std::abs(f[2 * r]);
  if (a == 0.0 || b == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::log(b / a) / std::log(2.0);
}

/// Replaces nodes 1..J by the power law through node J+1.
inline double regularize_near_origin(GridFunction& f, int J) {
  if (J <= 0) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t r = static_cast<std::size_t>(J) + 1;
  const double kappa = leading_exponent(f, r);
  if (!std::isfinite(kappa) || kappa == 0.0) return kappa;
  const cplx ref = f[r];
  for (std::size_t j = 1; j < r; ++j) f[j] = ref * std::pow(static_cast<double>(j) / static_cast<double>(r), kappa);
  return kappa;
}

/// g = f / t^s on nodes 1..M. Nodes where t^s or f underflows copy the first
/// representable quotient, whose index is stored in `first`; node 0 is
/// extrapolated.
inline GridFunction divide_by_power(const GridFunction& f, double s, std::size_t* first_out = nullptr) {
  const Grid& g = *f.grid;
  GridFunction out(f.grid);
  std::size_t first = 0;
  for (std::size_t j = 1; j < g.size(); ++j) {
    const double d = std::pow(g.x(j), s);
    if (d < 1e-280 || !std::isfinite(d) || (f[j] != cplx(0.0) && std::abs(f[j]) < 1e-290)) continue;
    out[j] = f[j] / d;
    if (first == 0) first = j;
  }
  if (first == 0) first = g.size() - 1;
  for (std::size_t j = 1; j < first; ++j) out[j] = out[first];
  out[0] = first == 1 ? extrapolate_to_origin(out) : out[first];
  if (first_out != nullptr) *first_out = first;
  return out;
}

/// Cumulative integral of an integrand f ~ c t^e at the origin, e > -1:
/// integrates t^e (f / t^e) with the product rule. Values below the
/// representable range are flushed to zero.
inline GridFunction integrate_with_exponent(const GridFunction& f, double e) {
  std::size_t first = 0;
  GridFunction F = cumulative_integral_power(divide_by_power(f, e, &first), e);
  for (std::size_t j = 1; j < F.size(); ++j)
    if (j < first || std::abs(F[j]) < 1e-290) F[j] = 0.0;
  return F;
}

/// p = exp(lambda0 int_0^x r1).
inline GridFunction polya_weight(const GridFunction& r1, cplx lambda0) {
  if (lambda0 == cplx(0.0) || r1.is_zero()) return GridFunction(r1.grid, 1.0);
  GridFunction p = cumulative_integral(r1);
  for (auto& v : p.values) v = std::exp(lambda0 * v);
  return p;
}

}  // namespace detail

/// Weights of the X/Z recursion sampled on the grid.
struct PowerWeights {
  GridFunction odd;   // p u0 R[u0] / t^{2l+1}, node 0 by the x^{l+1} law
  GridFunction inv;   // t^{2l+2} / (p u0^2), likewise
  GridFunction r0, r1, p;
};

inline PowerWeights power_weights(const ProblemSpec& spec, const GridFunction& u0, const GridFunction& du0, cplx lambda0) {
  const GridPtr& g = u0.grid;
  PowerWeights w;
  w.r0 = detail::sample_coefficient(spec.r0, g, "r0");
  w.r1 = detail::sample_coefficient(spec.r1, g, "r1");
  w.p = detail::polya_weight(w.r1, lambda0);
  w.odd = GridFunction(g);
  w.inv = GridFunction(g);
  for (std::size_t j = 1; j < g->size(); ++j) {
    const cplx u = u0[j];
    if (u == cplx(0.0) || !std::isfinite(std::abs(u))) throw U0Error("u0 vanishes at x=" + std::to_string(g->x(j)));
    const double x = g->x(j), xl = std::pow(x, spec.l + 1.0);
    const cplx un = u * (1.0 / xl);  // u0 / t^{l+1}
    w.odd[j] = w.p[j] * un * (w.r0[j] * un * x + w.r1[j] * du0[j] * x / xl);
    w.inv[j] = quick_div(1.0, w.p[j] * un * un);
  }
  // u0 R[u0] / t^{2l+1} -> (l+1) r1(0) at the origin.
  w.odd[0] = (spec.l + 1.0) * w.r1[0];
  w.inv[0] = 1.0;
  return w;
}

inline PowerConstants estimate_constants(const ProblemSpec& spec, const PowerWeights& w, const GridFunction& u0) {
  const Grid& g = *u0.grid;
  PowerConstants c;
  c.alpha = spec.alpha;
  for (std::size_t j = 1; j < g.size(); ++j) {
    c.C1 = std::max(c.C1, std::abs(w.odd[j]));
    c.C2 = std::max(c.C2, std::abs(w.inv[j]));
  }
  c.C2 = std::max(c.C2, std::abs(w.inv[0]));
  for (std::size_t j = 0; j < g.size(); ++j) c.C3 = std::max(c.C3, std::abs(w.r1[j]));
  c.C = std::max({1.0, c.C1, c.C2, c.C3});
  if (w.r1.is_zero()) {
    double c1 = 0.0;
    for (std::size_t j = 1; j < g.size(); ++j) c1 = std::max(c1, std::abs(w.r0[j] / w.inv[j]));
    c.C_r1_zero = std::max(c1, c.C2);
  }
  return c;
}

/// Checks the a-priori bounds of the family at every node, with an absolute
/// slack of 1e-10 max|power|. X/Z powers also get the sharper r1 = 0 bounds
/// when they apply. Every bound has the form K x^e.
inline std::vector<BoundViolation> check_bounds(const FormalPowerSet& s) {
  std::vector<BoundViolation> out;
  const Grid& g = s.grid();
  const double l = s.l;
  std::vector<double> logx(g.size(), -std::numeric_limits<double>::infinity());
  for (std::size_t j = 1; j < g.size(); ++j) logx[j] = std::log(g.x(j));
  auto lpoch = [](double x, int n) { return std::lgamma(x + n) - std::lgamma(x); };
  auto check = [&](int n, double logK, double e) {
    const GridFunction& f = s[n];
    const double slack = 1e-10 * f.max_abs();
    for (std::size_t j = 1; j < g.size(); ++j) {
      const double b = std::exp(logK + e * logx[j]);
      const double v = std::abs(f[j]);
      if (v > b + slack) out.push_back({n, j, v, b});
    }
  };

  if (s.kind == PowerKind::Y) {
    const PowerConstants& c = s.constants;
    if (!std::isfinite(c.C_q) || !(c.C_q > 0.0)) return out;
    const double lC = std::log(c.C_q), a2 = 2.0 + c.alpha, la2 = std::log(a2), nu1 = (2.0 * l + 1.0) / a2 + 1.0;
    for (int n = 1; n <= 2 * s.order; ++n) {
      const int k = (n + 1) / 2;
      if (n % 2 == 0)
        check(n, k * lC - 2 * k * la2 - std::lgamma(k + 1.0) - lpoch(nu1, k), k * a2);
      else
        check(n, k * lC - (2 * k - 1) * la2 - std::lgamma(static_cast<double>(k)) - lpoch(nu1, k), 2.0 * l + 1.0 + k * a2);
    }
    return out;
  }

  const double lC = std::log(s.constants.C);
  for (int n = 1; n <= 2 * s.order; ++n) {
    const int k = n / 2;
    if (n % 2 == 0)
      check(n, 2 * k * lC - lpoch(2.0 * l + 2.0, k), k);
    else
      check(n, std::log(k + 1.0) + (2 * k + 1) * lC - lpoch(2.0 * l + 2.0, k + 1), 2.0 * (l + 1.0) + k);
  }
  if (s.r1_zero && std::isfinite(s.constants.C_r1_zero) && s.constants.C_r1_zero > 0.0) {
    const double lD = std::log(s.constants.C_r1_zero), l2 = std::log(2.0);
    for (int n = 1; n <= 2 * s.order; ++n) {
      const int k = n / 2;
      if (n % 2 == 0)
        check(n, 2 * k * lD - 2 * k * l2 - std::lgamma(k + 1.0) - lpoch(l + 1.5, k), 2 * k);
      else
        check(n, (2 * k + 1) * lD - (2 * k + 1) * l2 - std::lgamma(k + 1.0) - lpoch(l + 1.5, k + 1), 2 * k + 1 + 2.0 * (l + 1.0));
    }
  }
  return out;
}

namespace detail {

inline void report_bounds(FormalPowerSet& s, const PowerOptions& opt) {
  if (!opt.check_bounds) return;
  const auto v = check_bounds(s);
  if (v.empty()) return;
  std::ostringstream msg;
  msg << v.size() << " a-priori bound violation(s) in the " << to_string(s.kind) << " powers; first at n=" << v.front().n
      << ", x=" << s.grid().x(v.front().node) << " (|value|=" << v.front().value << ", bound=" << v.front().bound
      << "); the grid may be too coarse";
  if (opt.strict) throw SolverError(msg.str());
  s.warnings.push_back(msg.str());
}

}  // namespace detail

/// Z powers centred at lambda0 from a particular solution u0 (and u0') of the
/// equation at lambda0. With lambda0 = 0 these are the X powers.
/// `recycle` (optional) is a spent set whose storage is reused.
inline FormalPowerSet compute_Z(const ProblemSpec& spec, const GridFunction& u0, const GridFunction& du0, cplx lambda0, int N,
                                const PowerOptions& opt = {}, FormalPowerSet* recycle = nullptr) {
  if (N < 0) throw ValidationError("N", "order must be non-negative");
  detail::require_same_grid(u0, du0);
  const GridPtr& g = u0.grid;
  if (g->size() < 2 * static_cast<std::size_t>(std::max(opt.J, 2)) + 3) throw ValidationError("M", "grid too coarse");

  PowerWeights w = power_weights(spec, u0, du0, lambda0);

  FormalPowerSet s;
  s.kind = lambda0 == cplx(0.0) ? PowerKind::X : PowerKind::Z;
  s.order = N;
  s.lambda0 = lambda0;
  s.l = spec.l;
  s.r1_zero = w.r1.is_zero();
  s.r0_one = spec.r0_is_one();
  s.pfun = w.p;
  s.constants = estimate_constants(spec, w, u0);
  std::vector<GridFunction> pool;
  if (recycle != nullptr) pool = std::move(recycle->powers);
  auto fresh = [&pool]() {
    if (pool.empty()) return GridFunction();
    GridFunction f = std::move(pool.back());
    pool.pop_back();
    return f;
  };
  s.powers.reserve(2 * N + 1);
  s.powers.emplace_back(g, 1.0);

  const std::size_t size = g->size();
  const double e = 2.0 * spec.l + 2.0;
  // t^{-(2l+1)} and t^{-(2l+2)} on nodes 1..M.
  std::vector<double> ip1(size, 0.0), ip2(size, 0.0), tp(size, 0.0);
  for (std::size_t j = 1; j < size; ++j) {
    tp[j] = std::pow(g->x(j), e - 1.0);
    ip1[j] = 1.0 / tp[j];
    ip2[j] = ip1[j] / g->x(j);
  }
  // Even weight -t^{-(2l+2)} t^{2l+2} / (p u0^2) as one factor.
  std::vector<cplx> ev(size);
  for (std::size_t j = 1; j < size; ++j) ev[j] = -ip2[j] * w.inv[j];
  const cplx* wodd = w.odd.values.data();
  const cplx* wr1 = w.r1.values.data();
  // Odd powers integrate t^{2l+1} g with g smooth; even powers integrate the
  // bounded quotient -Z(n-1) t^{-(2l+2)} t^{2l+2} / (p u0^2).
  for (int n = 1; n <= 2 * N; ++n) {
    const cplx* prev = s.powers[n - 1].values.data();
    if (n % 2 == 1) {
      GridFunction Zn = fresh();
      if (n >= 3 && !s.r1_zero) {
        const cplx* prev2 = s.powers[n - 2].values.data();
        const double* q = ip1.data();
        cumulative_integral_power_into(
            Zn, g, e - 1.0,
            [&](std::size_t j) { return j == 0 ? mul(wodd[0], prev[0]) : mul(wodd[j], prev[j]) - mul(wr1[j], prev2[j]) * q[j]; }, 40,
            &tp);
      } else {
        cumulative_integral_power_into(Zn, g, e - 1.0, [&](std::size_t j) { return mul(wodd[j], prev[j]); }, 40, &tp);
      }
      // Shifted powers are sums of several powers near 0; left as computed.
      if (opt.J > 0 && lambda0 == cplx(0.0)) detail::regularize_near_origin(Zn, opt.J);
      s.powers.push_back(std::move(Zn));
    } else {
      const cplx at0 = n == 2 ? -w.odd[0] / e * w.inv[0] : cplx(0.0);
      GridFunction Zn = fresh();
      cumulative_integral_into(Zn, g, [&](std::size_t j) { return j == 0 ? at0 : mul(prev[j], ev[j]); });
      s.powers.push_back(std::move(Zn));
    }
    const cplx last = s.powers.back().values.back();
    if (!std::isfinite(last.real()) || !std::isfinite(last.imag()))
      throw SolverError("formal power " + std::to_string(n) + " is not finite; try a spectral shift or a smaller N");
  }
  detail::report_bounds(s, opt);
  return s;
}

inline FormalPowerSet compute_X(const ProblemSpec& spec, const GridFunction& u0, const GridFunction& du0, int N,
                                const PowerOptions& opt = {}) {
  return compute_Z(spec, u0, du0, 0.0, N, opt);
}

/// Y powers for the particular solution at lambda0 (lambda0 = 0 is the plain case).
inline FormalPowerSet compute_Y(const ProblemSpec& spec, const GridPtr& g, int N, cplx lambda0 = 0.0,
                                const PowerOptions& opt = {}) {
  if (N < 0) throw ValidationError("N", "order must be non-negative");
  if (!(spec.alpha > -2.0)) throw ValidationError("alpha", "alpha must exceed -2");
  const std::size_t size = g->size();
  const double l = spec.l, e = 2.0 * l + 2.0;

  GridFunction r0 = detail::sample_coefficient(spec.r0, g, "r0");
  GridFunction r1 = detail::sample_coefficient(spec.r1, g, "r1");
  GridFunction p = detail::polya_weight(r1, lambda0);

  // Effective growth exponent of the shifted potential.
  double alpha = spec.alpha;
  if (lambda0 != cplx(0.0) && !r1.is_zero()) alpha = std::min(alpha, -1.0);
  if (lambda0 != cplx(0.0) && !r0.is_zero()) alpha = std::min(alpha, 0.0);

  GridFunction odd_w(g), even_w(g);
  double Cq = 0.0, pmax = 0.0, ipmax = 0.0;
  for (std::size_t j = 1; j < size; ++j) {
    const double x = g->x(j);
    cplx qs;
    try {
      qs = spec.q.eval(x);
    } catch (const DomainError& err) {
      throw ValidationError("q", err.what());
    }
    if (lambda0 != cplx(0.0)) qs -= lambda0 * (r0[j] + r1[j] * (l + 1.0) / x);
    const double xe = std::pow(x, e);
    odd_w[j] = p[j] * xe * qs;
    even_w[j] = 1.0 / (p[j] * xe);
    Cq = std::max(Cq, std::abs(qs) * std::pow(x, -alpha));
  }
  for (std::size_t j = 0; j < size; ++j) {
    pmax = std::max(pmax, std::abs(p[j]));
    ipmax = std::max(ipmax, 1.0 / std::abs(p[j]));
  }

  FormalPowerSet s;
  s.kind = PowerKind::Y;
  s.order = N;
  s.lambda0 = lambda0;
  s.l = l;
  s.r1_zero = r1.is_zero();
  s.r0_one = spec.r0_is_one();
  s.pfun = p;
  s.constants.alpha = alpha;
  s.constants.C_q = Cq * pmax * ipmax;
  s.powers.reserve(2 * N + 1);
  s.powers.emplace_back(g, 1.0);

  const double a2 = 2.0 + alpha;
  GridFunction integrand(g);
  for (int n = 1; n <= 2 * N; ++n) {
    const GridFunction& prev = s.powers[n - 1];
    const int k = (n + 1) / 2;
    if (n % 2 == 1) {
      for (std::size_t j = 1; j < size; ++j) integrand[j] = prev[j] * odd_w[j];
      GridFunction Yn = detail::integrate_with_exponent(integrand, 2.0 * l + k * a2);
      if (opt.J > 0 && lambda0 == cplx(0.0)) detail::regularize_near_origin(Yn, opt.J);
      s.powers.push_back(std::move(Yn));
    } else {
      for (std::size_t j = 1; j < size; ++j) integrand[j] = prev[j] * even_w[j];
      s.powers.push_back(detail::integrate_with_exponent(integrand, k * a2 - 1.0));
    }
    if (!s.powers.back().all_finite()) throw U0Error("Y power " + std::to_string(n) + " is not finite");
  }
  detail::report_bounds(s, opt);
  return s;
}

}  // namespace spps
