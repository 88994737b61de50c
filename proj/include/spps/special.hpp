#pragma once

// Special functions used as reference oracles: Bessel J and I, Bessel zeros,
// Pochhammer symbols and Frobenius series for q = c/x.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <utility>
#include <vector>

#include "spps/error.hpp"

namespace spps::bench {

using cplx = std::complex<double>;
using cplxl = std::complex<long double>;

/// Rising factorial (x)_n = x (x+1) ... (x+n-1).
inline long double pochhammer(long double x, int n) {
  long double p = 1.0L;
  for (int k = 0; k < n; ++k) p *= x + k;
  return p;
}

namespace detail {

inline bool is_nonpositive_integer(long double v) { return v <= 0.0L && v == std::nearbyint(v); }

/// 1 / Gamma(v), zero at the poles.
inline long double rgamma(long double v) {
  if (is_nonpositive_integer(v)) return 0.0L;
  return 1.0L / std::tgamma(v);
}

// Coefficient a_k(nu) of the Hankel expansions:
// (4nu^2 - 1)(4nu^2 - 9)...(4nu^2 - (2k-1)^2) / (k! 8^k).
struct HankelTerms {
  long double mu;
  long double a = 1.0L;
  int k = 0;
  explicit HankelTerms(long double nu) : mu(4.0L * nu * nu) {}
  long double next() {
    ++k;
    const long double odd = 2.0L * k - 1.0L;
    a *= (mu - odd * odd) / (8.0L * k);
    return a;
  }
};

}  // namespace detail

/// Bessel function of the first kind J_nu(x) for real x >= 0.
inline double bessel_J(double nu, double x) {
  if (x < 0.0) throw DomainError("bessel_J: negative argument");
  if (nu < 0.0 && nu == std::nearbyint(nu)) {
    const double v = bessel_J(-nu, x);
    return (static_cast<long long>(-nu) % 2 == 0) ? v : -v;
  }
  if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;

  if (x < 16.5 + nu * nu / 4.0) {
    const long double h = 0.5L * x, h2 = -h * h;
    long double term = std::pow(h, static_cast<long double>(nu)) * detail::rgamma(nu + 1.0L);
    long double sum = term;
    for (int k = 1; k < 2000; ++k) {
      term *= h2 / (k * (k + static_cast<long double>(nu)));
      sum += term;
      if (std::fabs(term) < 1e-21L * std::fabs(sum) && k > h) break;
    }
    return static_cast<double>(sum);
  }

  // Hankel asymptotic expansion, truncated at its smallest term.
  const long double z = x;
  long double P = 1.0L, Q = 0.0L;
  detail::HankelTerms t(nu);
  long double prev = INFINITY, zk = 1.0L;
  for (int k = 1; k < 200; ++k) {
    zk *= z;
    const long double term = t.next() / zk;
    if (std::fabs(term) > prev) break;
    prev = std::fabs(term);
    // Odd k feed Q with signs +,-,+,...; even k feed P with signs -,+,...
    if (k % 2 == 1) Q += ((k / 2) % 2 == 0 ? term : -term);
    else P += ((k / 2) % 2 == 1 ? -term : term);
    if (prev < 1e-22L) break;
  }
  const long double w = z - (0.5L * nu + 0.25L) * std::numbers::pi_v<long double>;
  return static_cast<double>(std::sqrt(2.0L / (std::numbers::pi_v<long double> * z)) * (P * std::cos(w) - Q * std::sin(w)));
}

/// Modified Bessel function I_nu(z), principal branch, complex argument.
inline cplx bessel_I(double nu, cplx zd) {
  const cplxl z(zd.real(), zd.imag());
  if (nu < 0.0 && nu == std::nearbyint(nu)) return bessel_I(-nu, zd);
  if (z == cplxl(0.0L)) return nu == 0.0 ? 1.0 : 0.0;

  // Power series; accepted when the cancellation is mild.
  {
    const cplxl h = 0.5L * z, h2 = h * h;
    cplxl term = std::pow(h, static_cast<long double>(nu)) * detail::rgamma(nu + 1.0L);
    cplxl sum = term;
    long double mass = std::abs(term);
    for (int k = 1; k < 5000; ++k) {
      term *= h2 / (k * (k + static_cast<long double>(nu)));
      sum += term;
      mass += std::abs(term);
      if (std::abs(term) < 1e-21L * std::abs(sum) && k > std::abs(h)) break;
    }
    if (std::abs(sum) > 0.0L && mass / std::abs(sum) < 1e6L) return cplx(static_cast<double>(sum.real()), static_cast<double>(sum.imag()));
  }

  const long double pi = std::numbers::pi_v<long double>;
  if (nu == std::nearbyint(nu)) {
    // I_n(z) = (1/pi) int_0^pi exp(z cos t) cos(n t) dt; the integrand is
    // smooth and periodic so the trapezoid rule converges geometrically.
    const int K = 64 + 2 * static_cast<int>(std::abs(z));
    cplxl s = 0.0L;
    for (int k = 0; k <= K; ++k) {
      const long double t = pi * k / K;
      const long double w = (k == 0 || k == K) ? 0.5L : 1.0L;
      s += w * std::exp(z * std::cos(t)) * std::cos(static_cast<long double>(nu) * t);
    }
    s /= static_cast<long double>(K);
    return cplx(static_cast<double>(s.real()), static_cast<double>(s.imag()));
  }

  if (std::abs(z) >= 17.0L) {
    // Large-argument expansion with the exponentially small companion term.
    cplxl s1 = 1.0L, s2 = 1.0L, zk = 1.0L;
    detail::HankelTerms t(nu);
    long double prev = INFINITY;
    for (int k = 1; k < 200; ++k) {
      zk *= z;
      const long double a = t.next();
      const cplxl term = a / zk;
      if (std::abs(term) > prev) break;
      prev = std::abs(term);
      s1 += (k % 2 == 0 ? term : -term);
      s2 += term;
      if (prev < 1e-22L) break;
    }
    const cplxl root = std::sqrt(2.0L * pi * z);
    const cplxl I(0.0L, 1.0L);
    const long double sign = std::arg(z) > -pi / 2 ? 1.0L : -1.0L;
    const cplxl r = std::exp(z) / root * s1 + sign * I * std::exp(sign * I * pi * static_cast<long double>(nu)) * std::exp(-z) / root * s2;
    return cplx(static_cast<double>(r.real()), static_cast<double>(r.imag()));
  }
  throw DomainError("bessel_I: argument outside the supported range");
}

/// k-th positive zero of J_nu, by a coarse scan followed by bisection.
inline double bessel_zero(double nu, int k) {
  if (k < 1) throw DomainError("bessel_zero: k must be positive");
  const double step = 0.05;
  double s0 = 1e-3, f0 = bessel_J(nu, s0);
  int found = 0;
  for (double s1 = s0 + step; s1 < 1e5; s1 += step) {
    const double f1 = bessel_J(nu, s1);
    if ((f0 < 0.0) != (f1 < 0.0) || f1 == 0.0) {
      if (++found == k) {
        double lo = s0, hi = s1, flo = f0;
        for (int it = 0; it < 200 && hi - lo > 2e-16 * hi; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double fm = bessel_J(nu, mid);
          if (fm == 0.0) return mid;
          if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
        return 0.5 * (lo + hi);
      }
    }
    s0 = s1;
    f0 = f1;
  }
  throw DomainError("bessel_zero: scan range exhausted");
}

/// Characteristic function of -y'' + (3/4)/x^2 y = lambda y' on (0,1] with
/// y'(1) = 0: -(2 e^{-lambda/2}/lambda) ((1+lambda) I_1(lambda/2) - lambda I_0(lambda/2)).
inline cplx exact_phi_ex6(cplx lambda) {
  if (std::abs(lambda) < 2.0) {
    // Bracket divided by lambda, summed termwise so that the removable
    // singularity at 0 costs nothing: sum (lambda/4)^{2k} ((1+lambda)/(4 k!(k+1)!) - 1/k!^2).
    const cplxl L(lambda.real(), lambda.imag());
    const cplxl w = (L / 4.0L) * (L / 4.0L);
    cplxl pw = 1.0L, s = 0.0L;
    long double fk = 1.0L;  // k!
    for (int k = 0; k < 40; ++k) {
      if (k > 0) fk *= k;
      s += pw * ((1.0L + L) / (4.0L * fk * fk * (k + 1)) - 1.0L / (fk * fk));
      pw *= w;
    }
    const cplxl r = -2.0L * std::exp(-L / 2.0L) * s;
    return cplx(static_cast<double>(r.real()), static_cast<double>(r.imag()));
  }
  const cplx h = 0.5 * lambda;
  return -(2.0 * std::exp(-h) / lambda) * ((1.0 + lambda) * bessel_I(1.0, h) - lambda * bessel_I(0.0, h));
}

/// Regular solution y = x^{l+1} sum a_n x^n of -y'' + (l(l+1)/x^2 + c/x) y = lambda y,
/// a_0 = 1. Returns (y(x), y'(x)).
inline std::pair<cplx, cplx> frobenius_coulomb(double l, double c, cplx lambda, double x) {
  const cplxl lam(lambda.real(), lambda.imag());
  const long double X = x;
  cplxl am2 = 0.0L, am1 = 1.0L;  // a_{n-2}, a_{n-1}
  cplxl y = 1.0L, dy = static_cast<long double>(l + 1.0);
  long double xn = 1.0L;
  long double scale = 1.0L, prev = 1.0L;
  for (int n = 1; n < 5000; ++n) {
    const cplxl an = (static_cast<long double>(c) * am1 - lam * am2) / (static_cast<long double>(n) * (n + 2.0L * l + 1.0L));
    xn *= X;
    const cplxl t = an * xn;
    y += t;
    dy += (n + static_cast<long double>(l) + 1.0L) * t;
    scale = std::max(scale, std::abs(t));
    am2 = am1;
    am1 = an;
    if (n > 10 && std::abs(t) < 1e-24L * scale && prev < 1e-24L * scale) break;
    prev = std::abs(t);
  }
  const long double xl = std::pow(X, static_cast<long double>(l) + 1.0L);
  const cplxl Y = xl * y, DY = xl / X * dy;
  return {cplx(static_cast<double>(Y.real()), static_cast<double>(Y.imag())),
          cplx(static_cast<double>(DY.real()), static_cast<double>(DY.imag()))};
}

/// Real eigenvalue of the Dirichlet problem for -y'' + (l(l+1)/x^2 + c/x) y = lambda y
/// on (0, a], refined by the secant method from a bracketing guess.
inline double frobenius_dirichlet_eigenvalue(double l, double c, double a, double lo, double hi) {
  auto f = [&](double lam) { return frobenius_coulomb(l, c, lam, a).first.real(); };
  double flo = f(lo), fhi = f(hi);
  if ((flo < 0.0) == (fhi < 0.0)) throw DomainError("frobenius_dirichlet_eigenvalue: interval does not bracket a root");
  for (int it = 0; it < 300 && hi - lo > 1e-15 * std::fabs(hi); ++it) {
    // Illinois-modified regula falsi.
    double mid = hi - fhi * (hi - lo) / (fhi - flo);
    if (!(mid > lo && mid < hi)) mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (fhi < 0.0)) {
      hi = mid;
      fhi = fm;
      flo *= 0.5;
    } else {
      lo = mid;
      flo = fm;
      fhi *= 0.5;
    }
  }
  return 0.5 * (lo + hi);
}

/// First `count` Dirichlet eigenvalues of the Coulomb problem above: sign
/// changes of y(a; lambda) on a scan from `from` with step `step`, each refined.
inline std::vector<double> frobenius_dirichlet_spectrum(double l, double c, double a, int count, double from = -5.0,
                                                        double step = 0.01) {
  std::vector<double> out;
  auto f = [&](double lam) { return frobenius_coulomb(l, c, lam, a).first.real(); };
  double lo = from, flo = f(lo);
  for (int i = 0; static_cast<int>(out.size()) < count; ++i) {
    if (i > 10000000) throw DomainError("frobenius_dirichlet_spectrum: scan range exhausted");
    const double hi = from + (i + 1) * step, fhi = f(hi);
    if ((flo < 0.0) != (fhi < 0.0)) out.push_back(frobenius_dirichlet_eigenvalue(l, c, a, lo, hi));
    lo = hi;
    flo = fhi;
  }
  return out;
}

}  // namespace spps::bench
