#pragma once

// Particular solution u0 of the equation at a fixed lambda0, with u0 ~ x^{l+1}
// at the origin.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "spps/error.hpp"
#include "spps/expr.hpp"
#include "spps/grid.hpp"
#include "spps/powers.hpp"
#include "spps/problem.hpp"

namespace spps {

enum class U0Source { Analytic, Series, Shifted, Propagated };

inline const char* to_string(U0Source s) {
  switch (s) {
    case U0Source::Analytic: return "analytic";
    case U0Source::Series: return "series";
    case U0Source::Shifted: return "shifted-series";
    case U0Source::Propagated: return "propagated";
  }
  return "?";
}

struct ParticularSolution {
  GridFunction u0;
  GridFunction du0;
  cplx lambda0 = 0.0;
  U0Source source = U0Source::Analytic;
  bool nonvanishing = true;
  double zero_location = std::numeric_limits<double>::quiet_NaN();
  double tail_bound = std::numeric_limits<double>::quiet_NaN();  // series source only
  int order = 0;                                                  // series terms used
  std::vector<std::string> warnings;

  const GridPtr& grid() const { return u0.grid; }
};

struct NonvanishingReport {
  bool nonvanishing = true;
  double location = std::numeric_limits<double>::quiet_NaN();  // nearest zero when not
  double min_abs = std::numeric_limits<double>::infinity();
  bool lower_bound_checked = false;  // real q >= 0: u0 >= x^{l+1}
  bool lower_bound_holds = true;
};

namespace detail {

/// Derivative of x^{l+1} at the origin; l < 0 has no finite value and gets 0.
inline cplx du0_at_origin(double l) { return l == 0.0 ? cplx(1.0) : cplx(0.0); }

/// Tail bound of sum_{k>N} Y(2k)(a) relative to the leading power:
/// sum_{k>N} C^k a^{k(2+alpha)} / ((2+alpha)^{2k} k! (nu'+1)_k).
inline double y_series_tail(double C, double alpha, double l, double a, int N) {
  if (!(C > 0.0)) return 0.0;
  const double a2 = 2.0 + alpha, nu1 = (2.0 * l + 1.0) / a2 + 1.0;
  const double lw = std::log(C) + a2 * std::log(a) - 2.0 * std::log(a2);
  double sum = 0.0;
  for (int k = N + 1; k < N + 100000; ++k) {
    const double lt = k * lw - std::lgamma(k + 1.0) - (std::lgamma(nu1 + k) - std::lgamma(nu1));
    if (lt > 700.0) return std::numeric_limits<double>::infinity();
    const double t = std::exp(lt);
    sum += t;
    if (t <= 1e-18 * sum && k > std::exp(lw)) break;
    if (sum == 0.0 && lt < -745.0 && k > std::exp(lw)) break;
  }
  return sum;
}

}  // namespace detail

/// Asymptotics x^{l+1} on the first decade of nodes, within 5%.
inline void check_asymptotics(const ParticularSolution& s, double l) {
  const Grid& g = *s.grid();
  for (std::size_t j = 1; j <= 10 && j < g.size(); ++j) {
    const double dev = std::abs(s.u0[j] / std::pow(g.x(j), l + 1.0) - 1.0);
    if (!(dev <= 0.05))
      throw U0Error("u0 does not behave like x^(l+1) near the origin (relative deviation " + std::to_string(dev) +
                    " at x=" + std::to_string(g.x(j)) + ")");
  }
}

/// Looks for zeros of u0 on (0, a]: tiny samples, or a phase jump of at least
/// 90 degrees between neighbouring nodes (a sign change for real data).
inline NonvanishingReport check_nonvanishing(const ParticularSolution& s, const ProblemSpec* spec = nullptr) {
  NonvanishingReport rep;
  const Grid& g = *s.grid();
  const GridFunction& u = s.u0;
  const double scale = u.max_abs(1);
  double nearest_mag = std::numeric_limits<double>::infinity();
  auto flag = [&](double x, double mag) {
    rep.nonvanishing = false;
    if (mag < nearest_mag) {
      nearest_mag = mag;
      rep.location = x;
    }
  };
  // Squared moduli relative to the scale stay in range.
  const double inv = scale > 0.0 ? 1.0 / scale : 1.0;
  double min2 = std::numeric_limits<double>::infinity();
  double run2 = 0.0;
  for (std::size_t j = 1; j < g.size(); ++j) {
    const double m2 = std::norm(u[j] * inv);
    min2 = std::min(min2, m2);
    // Tiny against what came before; u0 ~ x^{l+1} is legitimately tiny at the start.
    if (m2 <= 1e-28 * run2) flag(g.x(j), std::abs(u[j]));
    run2 = std::max(run2, m2);
    if (j + 1 < g.size()) {
      const cplx a = u[j], b = u[j + 1];
      // Angle between consecutive samples >= 90 degrees.
      if ((a * std::conj(b)).real() <= 0.0 && a != cplx(0.0) && b != cplx(0.0)) {
        const cplx d = b - a;
        double t = -(a * std::conj(d)).real() / std::norm(d);
        t = std::clamp(t, 0.0, 1.0);
        flag(g.x(j) + t * g.h(), std::abs(a + t * d));
      }
    }
  }
  rep.min_abs = std::sqrt(min2) * scale;
  if (spec != nullptr && s.lambda0 == cplx(0.0)) {
    bool nonneg = true;
    for (std::size_t j = 1; j < g.size() && nonneg; ++j) {
      const cplx qv = spec->q.eval(g.x(j));
      nonneg = qv.imag() == 0.0 && qv.real() >= 0.0;
    }
    if (nonneg) {
      rep.lower_bound_checked = true;
      for (std::size_t j = 1; j < g.size(); ++j) {
        const double xl = std::pow(g.x(j), spec->l + 1.0);
        if (u[j].real() < xl * (1.0 - 1e-12) || std::abs(u[j].imag()) > 1e-12 * xl) {
          rep.lower_bound_holds = false;
          break;
        }
      }
    }
  }
  return rep;
}

namespace detail {

inline void finish(ParticularSolution& s, const ProblemSpec& spec) {
  const NonvanishingReport rep = check_nonvanishing(s, &spec);
  s.nonvanishing = rep.nonvanishing;
  s.zero_location = rep.location;
  if (rep.lower_bound_checked && !rep.lower_bound_holds)
    s.warnings.push_back("q >= 0 but u0 < x^(l+1) somewhere; the series for u0 is inaccurate");
}

}  // namespace detail

/// u0 = x^{l+1} sum Y(2k) with u0' assembled from the same powers.
inline ParticularSolution assemble_u0(const ProblemSpec& spec, const FormalPowerSet& Y, int N) {
  const Grid& g = Y.grid();
  const GridPtr gp = Y[0].grid;
  const double l = spec.l;
  ParticularSolution s;
  s.u0 = GridFunction(gp);
  s.du0 = GridFunction(gp);
  s.lambda0 = Y.lambda0;
  s.source = Y.lambda0 == cplx(0.0) ? U0Source::Series : U0Source::Shifted;
  for (std::size_t j = 1; j < g.size(); ++j) {
    cplx even = 0.0, odd = 0.0;
    for (int k = N; k >= 1; --k) {
      even += Y[2 * k][j];
      odd += Y[2 * k - 1][j];
    }
    even += 1.0;
    const double x = g.x(j);
    const double xl = std::pow(x, l);
    s.u0[j] = xl * x * even;
    s.du0[j] = (l + 1.0) * xl * even + odd / (Y.pfun[j] * xl * x);
  }
  s.u0[0] = 0.0;
  s.du0[0] = detail::du0_at_origin(l);
  return s;
}

/// Particular solution at lambda0 from the Y series. lambda0 = 0 is the plain
/// case; a real lower bound of q as lambda0 keeps u0 positive for real data.
/// The series stops early once the tail bound at a drops below 1e-16 |u0(a)|.
inline ParticularSolution build_u0_shifted(const ProblemSpec& spec, cplx lambda0, const GridPtr& g, int N,
                                           const PowerOptions& opt = {}) {
  const double a = g->a(), lead = std::pow(a, spec.l + 1.0);
  auto build = [&](int K) {
    const FormalPowerSet Y = compute_Y(spec, g, K, lambda0, opt);
    ParticularSolution s = assemble_u0(spec, Y, K);
    s.warnings = Y.warnings;
    s.order = K;
    s.tail_bound = lead * detail::y_series_tail(Y.constants.C_q, Y.constants.alpha, spec.l, a, K);
    return s;
  };
  // First guess measured against the leading term a^{l+1}.
  int K = N;
  {
    const FormalPowerSet probe = compute_Y(spec, g, 0, lambda0, opt);
    for (int k = 1; k < N; ++k)
      if (detail::y_series_tail(probe.constants.C_q, probe.constants.alpha, spec.l, a, k) <= 1e-16) {
        K = k;
        break;
      }
  }
  ParticularSolution s = build(K);
  if (K < N && !(s.tail_bound <= 1e-16 * std::abs(s.u0.back()))) s = build(N);
  const double scale = s.u0.max_abs();
  if (!(s.tail_bound <= 1e-6 * scale))
    throw U0Error("series for u0 has not converged at x=a (tail bound " + std::to_string(s.tail_bound) + "); increase N");
  if (s.tail_bound > 1e-14 * scale) s.warnings.push_back("u0 series tail bound " + std::to_string(s.tail_bound) + " at x=a");
  detail::finish(s, spec);
  return s;
}

inline ParticularSolution build_u0_series(const ProblemSpec& spec, const GridPtr& g, int N, const PowerOptions& opt = {}) {
  return build_u0_shifted(spec, 0.0, g, N, opt);
}

/// Samples a closed-form u0 and u0' on the grid; node 0 follows x^{l+1}.
inline ParticularSolution build_u0_analytic(const ProblemSpec& spec, const std::function<cplx(double)>& u0,
                                            const std::function<cplx(double)>& du0, const GridPtr& g) {
  ParticularSolution s;
  s.u0 = GridFunction(g);
  s.du0 = GridFunction(g);
  s.source = U0Source::Analytic;
  for (std::size_t j = 1; j < g->size(); ++j) {
    const double x = g->x(j);
    try {
      s.u0[j] = u0(x);
      s.du0[j] = du0(x);
    } catch (const DomainError& e) {
      throw U0Error(std::string("u0 evaluation failed: ") + e.what());
    }
  }
  if (!s.u0.all_finite() || !s.du0.all_finite()) throw U0Error("u0 or du0 is not finite on (0, a]");
  s.u0[0] = 0.0;
  s.du0[0] = detail::du0_at_origin(spec.l);
  check_asymptotics(s, spec.l);
  detail::finish(s, spec);
  return s;
}

inline ParticularSolution build_u0_analytic(const ProblemSpec& spec, const Expr& u0, const Expr& du0, const GridPtr& g) {
  return build_u0_analytic(spec, [&](double x) { return u0.eval(x); }, [&](double x) { return du0.eval(x); }, g);
}

/// max over nodes in [from, to] of |-u'' + (l(l+1)/x^2 + q - lambda r0) u - lambda r1 u'| / max|u|,
/// with u'' from central differences and u' from `du`. The difference step is
/// a / 5000 (a stride of several nodes on fine grids) to keep rounding below
/// the truncation error; `stride` overrides it.
inline double ode_residual(const ProblemSpec& spec, const GridFunction& u, const GridFunction& du, cplx lambda, double from,
                           double to, std::size_t stride = 0) {
  const Grid& g = *u.grid;
  const std::size_t k = stride > 0 ? stride : std::max<std::size_t>(1, g.M() / 5000);
  const double h = k * g.h(), ll = spec.l * (spec.l + 1.0);
  double worst = 0.0;
  for (std::size_t j = k; j + k < g.size(); ++j) {
    const double x = g.x(j);
    if (x < from || x > to) continue;
    const cplx d2 = (u[j + k] - 2.0 * u[j] + u[j - k]) / (h * h);
    const cplx res = -d2 + (ll / (x * x) + spec.q.eval(x) - lambda * spec.r0.eval(x)) * u[j] - lambda * spec.r1.eval(x) * du[j];
    worst = std::max(worst, std::abs(res));
  }
  return worst / u.max_abs();
}

}  // namespace spps
