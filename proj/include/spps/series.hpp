#pragma once

// Spectral parameter power series
//   u(x, lambda)  = u0 sum_k lt^k Z(2k),                 lt = lambda - lambda0
//   u'(x, lambda) = u0' sum_k lt^k Z(2k) - sum_{k>=1} lt^k Z(2k-1) / (p u0)
// and the a-priori tail of the truncated series.

#include <cmath>
#include <limits>
#include <string>

#include "spps/error.hpp"
#include "spps/grid.hpp"
#include "spps/powers.hpp"
#include "spps/usol.hpp"

namespace spps {

struct SeriesValue {
  GridFunction u;
  GridFunction du;
};

inline int effective_order(const FormalPowerSet& Z, int N) { return N < 0 ? Z.order : std::min(N, Z.order); }

/// u and u' on the whole grid, truncated at order N (all stored powers by default).
inline SeriesValue evaluate(const FormalPowerSet& Z, const ParticularSolution& u0, cplx lambda, int N = -1) {
  detail::require_same_grid(Z[0], u0.u0);
  N = effective_order(Z, N);
  const Grid& g = Z.grid();
  const cplx lt = lambda - Z.lambda0;
  SeriesValue out{GridFunction(u0.u0.grid), GridFunction(u0.u0.grid)};
  // Horner over the power index, one sweep over the grid per power.
  std::vector<cplx> even(Z[2 * N].values), odd(g.size(), 0.0);
  for (int k = N; k >= 1; --k) {
    const cplx* ze = Z[2 * k - 2].values.data();
    const cplx* zo = Z[2 * k - 1].values.data();
    for (std::size_t j = 0; j < g.size(); ++j) {
      even[j] = mul(even[j], lt) + ze[j];
      odd[j] = mul(odd[j] + zo[j], lt);
    }
  }
  for (std::size_t j = 0; j < g.size(); ++j) {
    out.u[j] = mul(u0.u0[j], even[j]);
    // Z(2k-1) / u0 -> 0 at the origin.
    out.du[j] = mul(u0.du0[j], even[j]) - (j == 0 ? cplx(0.0) : quick_div(odd[j], mul(Z.pfun[j], u0.u0[j])));
  }
  if (!out.u.all_finite() || !out.du.all_finite())
    throw SolverError("series overflow at lambda = (" + std::to_string(lambda.real()) + ", " + std::to_string(lambda.imag()) +
                      "); use a spectral shift closer to it");
  return out;
}

/// u(a) and u'(a) only.
inline std::pair<cplx, cplx> evaluate_endpoint(const FormalPowerSet& Z, const ParticularSolution& u0, cplx lambda, int N = -1) {
  N = effective_order(Z, N);
  const std::size_t j = Z.grid().size() - 1;
  const cplx lt = lambda - Z.lambda0;
  cplx even = Z[2 * N][j], odd = 0.0;
  for (int k = N - 1; k >= 0; --k) even = even * lt + Z[2 * k][j];
  for (int k = N; k >= 1; --k) odd = (odd + Z[2 * k - 1][j]) * lt;
  return {u0.u0[j] * even, u0.du0[j] * even - odd / (Z.pfun[j] * u0.u0[j])};
}

namespace detail {

/// sum_{k>N} exp(log_term(k)) for a log-concave term sequence, summed in log
/// space from k = N + 1. Returns +inf on overflow.
template <class LogTerm>
double log_tail(int N, LogTerm&& log_term) {
  double sum = 0.0, prev = -std::numeric_limits<double>::infinity();
  for (int k = N + 1; k < N + 1000000; ++k) {
    const double lt = log_term(k);
    if (lt > 700.0) return std::numeric_limits<double>::infinity();
    const double t = std::exp(lt);
    sum += t;
    // Past the peak and negligible.
    if (lt < prev && (t <= 1e-17 * sum || lt < -745.0)) break;
    prev = lt;
  }
  return sum;
}

}  // namespace detail

/// Bound on |u(x) - u_N(x)| for |lambda - lambda0| = rho, x = a, scaled by
/// max|u0|. General case: sum_{k>N} (C^2 rho a)^k / k!; r1 = 0 case:
/// sum_{k>N} (C^2 rho a^2)^k / (4^k k! (l+3/2)_k) with the sharper constant.
struct TailModel {
  double umax = 0.0;
  double C = 1.0;
  double D = std::numeric_limits<double>::quiet_NaN();  // r1 = 0 constant, NaN if unused
  double l = 0.0;
  double a = 1.0;
  int N = 0;

  double operator()(double rho) const {
    if (!(rho > 0.0) || umax == 0.0) return 0.0;
    if (std::isfinite(D)) {
      const double lw = std::log(D * D * rho * a * a / 4.0);
      return umax * detail::log_tail(N, [&](int k) {
               return k * lw - std::lgamma(k + 1.0) - (std::lgamma(l + 1.5 + k) - std::lgamma(l + 1.5));
             });
    }
    const double lw = std::log(C * C * rho * a);
    return umax * detail::log_tail(N, [&](int k) { return k * lw - std::lgamma(k + 1.0); });
  }
};

inline TailModel tail_model(const FormalPowerSet& Z, const ParticularSolution& u0, int N = -1) {
  TailModel t;
  t.umax = u0.u0.max_abs();
  t.C = Z.constants.C;
  if (Z.r1_zero && std::isfinite(Z.constants.C_r1_zero)) t.D = Z.constants.C_r1_zero;
  t.l = Z.l;
  t.a = Z.grid().a();
  t.N = effective_order(Z, N);
  return t;
}

inline double truncation_bound(const FormalPowerSet& Z, const ParticularSolution& u0, double rho, int N = -1) {
  return tail_model(Z, u0, N)(rho);
}

/// Transmutation image of x^{2k}: (-1)^k 4^k k! (l+3/2)_k u0 X(2k).
/// Defined for the plain Bessel weight only (r0 = 1, r1 = 0, lambda0 = 0).
inline GridFunction transmute_power(const FormalPowerSet& X, const ParticularSolution& u0, int k) {
  if (X.kind != PowerKind::X) throw ValidationError("lambda0", "transmutation images need the unshifted powers");
  if (!X.r1_zero || !X.r0_one) throw ValidationError("r0", "transmutation images need r0 = 1 and r1 = 0");
  if (k < 0 || k > X.order) throw ValidationError("k", "power index out of range");
  long double c = 1.0L;
  for (int i = 0; i < k; ++i) c *= -4.0L * (i + 1) * (X.l + 1.5L + i);
  return u0.u0 * X[2 * k] * cplx(static_cast<double>(c));
}

/// The series solution at lambda1 as the particular solution of the next
/// spectral-shift centre.
inline ParticularSolution propagate(const FormalPowerSet& Z, const ParticularSolution& u0, cplx lambda1, int N = -1) {
  SeriesValue v = evaluate(Z, u0, lambda1, N);
  ParticularSolution s;
  s.u0 = std::move(v.u);
  s.du0 = std::move(v.du);
  s.lambda0 = lambda1;
  s.source = U0Source::Propagated;
  const NonvanishingReport rep = check_nonvanishing(s);
  s.nonvanishing = rep.nonvanishing;
  s.zero_location = rep.location;
  return s;
}

}  // namespace spps
