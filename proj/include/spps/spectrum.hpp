#pragma once

// Characteristic polynomial Phi_N, its roots, Rouche trust radii and the
// spectral-shift drivers.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "spps/error.hpp"
#include "spps/powers.hpp"
#include "spps/problem.hpp"
#include "spps/series.hpp"
#include "spps/usol.hpp"

namespace spps {

struct CharPoly {
  cplx center = 0.0;
  std::vector<cplx> c;  // coefficients of (lambda - center)^k
  cplx beta = 1.0, gamma = 0.0;
  double a = 1.0;
  cplx u0a = 0.0, du0a = 0.0;
  TailModel tail;

  int degree() const { return static_cast<int>(c.size()) - 1; }
  cplx operator()(cplx lambda) const {
    const cplx lt = lambda - center;
    cplx v = c.back();
    for (int k = degree() - 1; k >= 0; --k) v = mul(v, lt) + c[k];
    return v;
  }
  /// Bound on |Phi - Phi_N| at |lambda - center| = rho.
  double error_bound(double rho) const { return (std::abs(beta) + std::abs(gamma)) * tail(rho); }
};

inline CharPoly characteristic_poly(const ProblemSpec& spec, const FormalPowerSet& Z, const ParticularSolution& u0, int N = -1) {
  detail::require_same_grid(Z[0], u0.u0);
  N = effective_order(Z, N);
  const std::size_t j = Z.grid().size() - 1;
  CharPoly P;
  P.center = Z.lambda0;
  P.beta = spec.beta;
  P.gamma = spec.gamma;
  P.a = Z.grid().a();
  P.u0a = u0.u0[j];
  P.du0a = u0.du0[j];
  if (P.u0a == cplx(0.0)) throw U0Error("u0(a) = 0; the characteristic function cannot be formed");
  P.tail = tail_model(Z, u0, N);
  const cplx lead = spec.beta * P.u0a + spec.gamma * P.du0a;
  const cplx odd_scale = spec.gamma / (Z.pfun[j] * P.u0a);
  P.c.resize(static_cast<std::size_t>(N) + 1);
  P.c[0] = lead;
  for (int k = 1; k <= N; ++k) P.c[k] = lead * Z[2 * k][j] - odd_scale * Z[2 * k - 1][j];
  for (const cplx& v : P.c)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw SolverError("characteristic polynomial has non-finite coefficients");
  return P;
}

struct Root {
  cplx value;
  double residual = 0.0;  // |p(mu)| / sum |c_k| |mu|^k in the scaled variable
  bool converged = true;
};

namespace detail {

/// p(z) / p'(z) and the relative residual for coefficients c (ascending) with
/// moduli ac. Large |z| uses the reversed polynomial to stay in range.
inline std::pair<cplx, double> newton_ratio(const std::vector<cplx>& c, const std::vector<double>& ac, cplx z) {
  const int n = static_cast<int>(c.size()) - 1;
  const double az = std::abs(z);
  if (az <= 1.0) {
    cplx p = c[n], dp = 0.0;
    double m = ac[n];
    for (int k = n - 1; k >= 0; --k) {
      dp = mul(dp, z) + p;
      p = mul(p, z) + c[k];
      m = m * az + ac[k];
    }
    return {quick_div(p, dp), std::abs(p) / m};
  }
  const cplx w = quick_div(1.0, z);
  cplx q = c[0], dq = 0.0;
  double m = ac[0];
  const double aw = 1.0 / az;
  for (int k = 1; k <= n; ++k) {
    dq = mul(dq, w) + q;
    q = mul(q, w) + c[k];
    m = m * aw + ac[k];
  }
  return {quick_div(mul(z, q), static_cast<double>(n) * q - mul(w, dq)), std::abs(q) / m};
}

/// Initial guesses on circles whose radii come from the upper convex hull of
/// (k, log|c_k|).
inline std::vector<cplx> newton_polygon_guesses(const std::vector<cplx>& c) {
  const int n = static_cast<int>(c.size()) - 1;
  std::vector<double> lg(c.size());
  for (int k = 0; k <= n; ++k) lg[k] = c[k] == cplx(0.0) ? -std::numeric_limits<double>::infinity() : std::log(std::abs(c[k]));
  std::vector<int> hull;
  for (int k = 0; k <= n; ++k) {
    if (!std::isfinite(lg[k])) continue;
    while (hull.size() >= 2) {
      const int i = hull[hull.size() - 2], j = hull.back();
      // Drop j when it lies on or below the chord i -> k.
      if ((lg[j] - lg[i]) * (k - i) <= (lg[k] - lg[i]) * (j - i)) hull.pop_back();
      else break;
    }
    hull.push_back(k);
  }
  std::vector<cplx> z;
  z.reserve(n);
  for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
    const int i = hull[h], j = hull[h + 1], m = j - i;
    const double r = std::exp((lg[i] - lg[j]) / m);
    for (int q = 0; q < m; ++q) {
      const double th = 2.0 * std::numbers::pi * q / m + 2.0 * std::numbers::pi * i / n + 0.4;
      z.push_back(std::polar(r, th));
    }
  }
  return z;
}

}  // namespace detail

/// All roots of sum c_k z^k (ascending coefficients, c_n != 0) by Aberth-Ehrlich
/// iteration.
inline std::vector<Root> polynomial_roots(std::vector<cplx> c, int max_iter = 500) {
  while (c.size() > 1 && c.back() == cplx(0.0)) c.pop_back();
  const int n = static_cast<int>(c.size()) - 1;
  if (n < 1) throw SolverError("polynomial of degree 0 has no roots");
  // Leading zeros of the constant end are roots at 0.
  int zeros = 0;
  while (c[zeros] == cplx(0.0)) ++zeros;
  std::vector<cplx> d(c.begin() + zeros, c.end());
  const int m = n - zeros;

  std::vector<Root> out;
  for (int k = 0; k < zeros; ++k) out.push_back({0.0, 0.0, true});
  if (m == 0) return out;
  if (m == 1) {
    out.push_back({-d[0] / d[1], 0.0, true});
    return out;
  }

  std::vector<cplx> z = detail::newton_polygon_guesses(d);
  std::vector<double> ad(d.size());
  for (std::size_t k = 0; k < d.size(); ++k) ad[k] = std::abs(d[k]);
  std::vector<bool> done(m, false);
  std::vector<double> res(m, 1.0);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int it = 0; it < max_iter; ++it) {
    bool all = true;
    for (int i = 0; i < m; ++i) {
      if (done[i]) continue;
      const auto [ratio, r] = detail::newton_ratio(d, ad, z[i]);
      res[i] = r;
      cplx s = 0.0;
      for (int j = 0; j < m; ++j)
        if (j != i) s += quick_div(1.0, z[i] - z[j]);
      const cplx w = ratio / (1.0 - ratio * s);
      if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) {
        done[i] = r <= 1e-13;
        all = all && done[i];
        continue;
      }
      z[i] -= w;
      // Step at rounding level, or the residual already was.
      if (std::abs(w) <= 4.0 * eps * std::abs(z[i]) || r <= 4.0 * eps) done[i] = true;
      all = all && done[i];
    }
    if (all) break;
  }
  for (int i = 0; i < m; ++i) {
    res[i] = detail::newton_ratio(d, ad, z[i]).second;
    out.push_back({z[i], res[i], done[i] || res[i] <= 1e-13});
  }
  return out;
}

/// Roots of Phi_N in lambda. The polynomial is solved in mu = (lambda - center) / rho
/// with rho balancing the first and last coefficients.
inline std::vector<Root> roots(const CharPoly& P) {
  std::vector<cplx> c = P.c;
  while (c.size() > 1 && c.back() == cplx(0.0)) c.pop_back();
  const int n = static_cast<int>(c.size()) - 1;
  if (n < 1) throw SolverError("characteristic polynomial is constant");
  double rho = 1.0;
  if (c[0] != cplx(0.0)) rho = std::exp((std::log(std::abs(c[0])) - std::log(std::abs(c[n]))) / n);
  double scale = 0.0;
  {
    double rk = 1.0;
    for (int k = 0; k <= n; ++k, rk *= rho) {
      c[k] *= rk;
      scale = std::max(scale, std::abs(c[k]));
    }
  }
  for (cplx& v : c) v /= scale;
  std::vector<Root> r = polynomial_roots(c);
  for (Root& x : r) x.value = P.center + rho * x.value;
  return r;
}

/// Largest radius around the centre on which min |Phi_N| (sampled at K angles)
/// beats the truncation bound. Infinity when the bound vanishes identically.
inline double rouche_radius(const CharPoly& P, int K = 256) {
  const double inf = std::numeric_limits<double>::infinity();
  auto holds = [&](double r) {
    const double bound = P.error_bound(r);
    if (!(bound < inf)) return false;
    for (int k = 0; k < K; ++k) {
      const cplx lam = P.center + std::polar(r, 2.0 * std::numbers::pi * (k + 0.5) / K);
      if (!(std::abs(P(lam)) > bound)) return false;
    }
    return true;
  };
  // Beyond r_hi the bound exceeds sum |c_k| r^k >= max |Phi_N|.
  auto majorant = [&](double r) {
    double m = 0.0;
    for (int k = P.degree(); k >= 0; --k) m = m * r + std::abs(P.c[k]);
    return m;
  };
  if (P.error_bound(1e6) == 0.0) return inf;
  double r_hi = 1e-3;
  while (r_hi < 1e8 && !(P.error_bound(r_hi) > majorant(r_hi))) r_hi *= 2.0;
  const int S = 400;
  double best = 0.0, next = 0.0;
  for (int s = S; s >= 1; --s) {
    const double r = r_hi * s / S;
    if (holds(r)) {
      best = r;
      next = r_hi * (s + 1) / S;
      break;
    }
  }
  if (best == 0.0) return 0.0;
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (best + next);
    if (holds(mid)) best = mid;
    else next = mid;
  }
  return best;
}

enum class Strategy { Linear, Adaptive };

inline const char* to_string(Strategy s) { return s == Strategy::Linear ? "linear" : "adaptive"; }

struct SolverSettings {
  int N = 40;
  std::size_t M = 50000;
  Strategy strategy = Strategy::Linear;
  // Linear schedule: centres step * n + (imag_step * n + imag_offset) i, n = 0, 1, ...
  double step = 50.0;
  double imag_step = 2.0;
  double imag_offset = 0.0;
  // Adaptive chain: next centre = last eigenvalue + delta.
  cplx delta = cplx(0.0, -1.0);
  int count = 10;          // eigenvalues wanted
  int max_centers = 5000;  // hard cap on the chain length
  bool real_mode = true;
  int J = 10;
  bool strict = false;
  bool eigenfunctions = false;  // keep u, u' on the grid for each eigenvalue
  int u0_order = -1;            // series terms for u0; N when negative
};

struct Eigenvalue {
  cplx lambda;
  double residual = 0.0;
  int shift_index = 0;
  cplx center = 0.0;
  bool trusted = false;
  double trust_radius = 0.0;
  std::optional<SeriesValue> function;
};

struct EigenResult {
  std::vector<Eigenvalue> eigenvalues;
  std::vector<cplx> chain;
  std::vector<double> trust_radii;
  SolverSettings settings;
  U0Source u0_source = U0Source::Series;
  cplx seed_lambda = 0.0;
  std::vector<std::string> warnings;
  double seconds = 0.0;
};

inline double dedup_tolerance(cplx lambda) { return 1e-6 * (1.0 + std::abs(lambda)); }
inline double real_tolerance(cplx lambda) { return 1e-6 * (1.0 + std::abs(lambda.real())); }

namespace detail {

/// Particular solution at the start of the chain: the closed form when given,
/// the Y series at 0, or the series at a real shift below min q when the first
/// two vanish on (0, a].
inline ParticularSolution initial_u0(const ProblemSpec& spec, const GridPtr& g, int order, const PowerOptions& opt,
                                     std::vector<std::string>& warnings) {
  if (spec.u0) {
    ParticularSolution s = build_u0_analytic(spec, *spec.u0, *spec.du0, g);
    if (s.nonvanishing) return s;
    warnings.push_back("closed-form u0 vanishes near x=" + std::to_string(s.zero_location) + "; using the series");
  }
  ParticularSolution s = build_u0_series(spec, g, order, opt);
  if (s.nonvanishing) return s;
  double qmin = 0.0;
  const cplx r0 = spec.r0.eval(g->a());
  for (std::size_t j = 1; j < g->size(); j += std::max<std::size_t>(1, g->M() / 2000)) qmin = std::min(qmin, spec.q.eval(g->x(j)).real());
  if (spec.r0_is_one() && spec.r1_is_zero()) {
    const cplx shift = qmin - 1.0;
    warnings.push_back("u0 at lambda=0 vanishes near x=" + std::to_string(s.zero_location) + "; seeding at lambda0=" +
                       std::to_string(shift.real()));
    ParticularSolution t = build_u0_shifted(spec, shift, g, order, opt);
    if (t.nonvanishing) return t;
  }
  (void)r0;
  throw U0Error("no nonvanishing particular solution found (zero near x=" + std::to_string(s.zero_location) + ")");
}

/// Rescales a propagated particular solution so that the two weight
/// constants C1 ~ |u0|^2 and C2 ~ 1/|u0|^2 agree; the powers' constant C, and
/// with it the trust radius, is then as small as the scaling allows.
inline void balance_seed(const ProblemSpec& spec, ParticularSolution& s) {
  const PowerWeights w = power_weights(spec, s.u0, s.du0, s.lambda0);
  const PowerConstants c = estimate_constants(spec, w, s.u0);
  if (!(c.C1 > 0.0) || !(c.C2 > 0.0)) return;
  const double f = std::pow(c.C2 / c.C1, 0.25);
  if (!std::isfinite(f) || f == 1.0) return;
  for (cplx& v : s.u0.values) v *= f;
  for (cplx& v : s.du0.values) v *= f;
}

inline void insert_unique(std::vector<Eigenvalue>& out, Eigenvalue e) {
  for (Eigenvalue& v : out) {
    if (std::abs(v.lambda - e.lambda) <= dedup_tolerance(v.lambda)) {
      if (e.residual < v.residual) v = std::move(e);
      return;
    }
  }
  out.push_back(std::move(e));
}

}  // namespace detail

/// Runs the shift chain and collects eigenvalues. `on_center` (optional) sees
/// every centre's powers, seed and polynomial.
inline EigenResult solve(const ProblemSpec& spec, const SolverSettings& st,
                         const std::function<void(const FormalPowerSet&, const ParticularSolution&, const CharPoly&)>& on_center = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  validate(spec);
  if (st.N < 1) throw ValidationError("N", "order must be at least 1");
  if (st.M < 30 || st.M % 5 != 0) throw ValidationError("M", "M must be a positive multiple of 5 (at least 30)");
  if (st.count < 1) throw ValidationError("count", "at least one eigenvalue must be requested");
  if (st.strategy == Strategy::Linear && !(st.step > 0.0)) throw ValidationError("shift", "shift step must be positive");

  EigenResult R;
  R.settings = st;
  const GridPtr g = make_grid(spec.a, st.M);
  PowerOptions opt;
  opt.J = st.J;
  opt.strict = st.strict;

  ParticularSolution seed = detail::initial_u0(spec, g, st.u0_order < 0 ? st.N : st.u0_order, opt, R.warnings);
  R.u0_source = seed.source;
  R.seed_lambda = seed.lambda0;
  for (const std::string& w : seed.warnings) R.warnings.push_back(w);

  std::vector<Eigenvalue> found;
  auto centre_of = [&](int n) { return cplx(st.step * n, st.imag_step * n + st.imag_offset); };
  cplx centre = st.strategy == Strategy::Linear ? centre_of(0) : cplx(0.0);
  if (st.strategy == Strategy::Adaptive) centre = seed.lambda0;

  FormalPowerSet spent;  // previous centre, storage reused
  auto powers_at = [&](ParticularSolution& s, int index) {
    PowerOptions o = opt;
    o.check_bounds = opt.check_bounds && index == 0;
    return compute_Z(spec, s.u0, s.du0, s.lambda0, st.N, o, &spent);
  };

  // Bring the seed to the first centre.
  if (centre != seed.lambda0) {
    FormalPowerSet Z = powers_at(seed, 0);
    for (const std::string& w : Z.warnings) R.warnings.push_back(w);
    seed = propagate(Z, seed, centre);
    detail::balance_seed(spec, seed);
    spent = std::move(Z);
  }

  const double half = 0.5 * st.step;
  for (int n = 0; n < st.max_centers; ++n) {
    if (!seed.nonvanishing)
      throw SolverError("particular solution at centre (" + std::to_string(centre.real()) + ", " + std::to_string(centre.imag()) +
                        ") vanishes near x=" + std::to_string(seed.zero_location));
    FormalPowerSet Z = powers_at(seed, n);
    if (n == 0)
      for (const std::string& w : Z.warnings) R.warnings.push_back(w);
    const CharPoly P = characteristic_poly(spec, Z, seed);
    if (on_center) on_center(Z, seed, P);
    const double radius = rouche_radius(P);
    R.chain.push_back(centre);
    R.trust_radii.push_back(radius);
    const std::vector<Root> rts = roots(P);

    auto make = [&](const Root& r) {
      Eigenvalue e;
      e.lambda = r.value;
      e.residual = r.residual;
      e.shift_index = n;
      e.center = centre;
      e.trust_radius = radius;
      e.trusted = std::abs(r.value - centre) < radius;
      if (st.real_mode) e.lambda = cplx(e.lambda.real(), 0.0);
      if (st.eigenfunctions) e.function = evaluate(Z, seed, e.lambda);
      return e;
    };

    cplx next;
    if (st.strategy == Strategy::Linear) {
      const double re = centre.real();
      for (const Root& r : rts) {
        const cplx v = r.value;
        if (st.real_mode) {
          if (std::abs(v.imag()) > real_tolerance(v)) continue;
          // Nearest centre by real part; the first centre also owns everything below.
          if (v.real() >= re + half || (n > 0 && v.real() < re - half)) continue;
        } else if (!(std::abs(v - centre) < radius)) {
          continue;
        }
        detail::insert_unique(found, make(r));
      }
      // Every eigenvalue left of re + half has been seen.
      int below = 0;
      for (const Eigenvalue& e : found) below += e.lambda.real() < re + half;
      if (below >= st.count) break;
      next = centre_of(n + 1);
    } else {
      // Nearest root not already claimed; ties go to the larger imaginary part.
      const Root* best = nullptr;
      double bd = std::numeric_limits<double>::infinity();
      for (const Root& r : rts) {
        bool claimed = false;
        for (const Eigenvalue& e : found) claimed = claimed || std::abs(e.lambda - r.value) <= dedup_tolerance(e.lambda);
        if (claimed) continue;
        const double d = std::abs(r.value - centre);
        if (best == nullptr || d < bd * (1.0 - 1e-9) || (d <= bd * (1.0 + 1e-9) && r.value.imag() > best->value.imag())) {
          best = &r;
          bd = d;
        }
      }
      if (best == nullptr) throw SolverError("no unclaimed root left at the current centre");
      found.push_back(make(*best));
      if (static_cast<int>(found.size()) >= st.count) break;
      next = best->value + st.delta;
    }
    seed = propagate(Z, seed, next);
    detail::balance_seed(spec, seed);
    spent = std::move(Z);
    centre = next;
    if (n + 1 == st.max_centers) R.warnings.push_back("centre cap reached before all requested eigenvalues were found");
  }

  if (st.real_mode)
    std::sort(found.begin(), found.end(), [](const Eigenvalue& x, const Eigenvalue& y) { return x.lambda.real() < y.lambda.real(); });
  else
    std::sort(found.begin(), found.end(), [](const Eigenvalue& x, const Eigenvalue& y) { return std::abs(x.lambda) < std::abs(y.lambda); });
  if (st.strategy == Strategy::Linear && static_cast<int>(found.size()) > st.count) found.resize(static_cast<std::size_t>(st.count));
  R.eigenvalues = std::move(found);
  R.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return R;
}

}  // namespace spps
