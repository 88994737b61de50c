#pragma once

// Uniform grid on [0, a] and cumulative Newton-Cotes integration.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "spps/error.hpp"

namespace spps {

using cplx = std::complex<double>;

class Grid {
 public:
  Grid(double a, std::size_t M) : a_(a), M_(M), h_(a / static_cast<double>(M)) {
    if (!(a > 0.0) || !std::isfinite(a)) throw ValidationError("a", "right endpoint must be positive and finite");
    if (M == 0 || M % 5 != 0) throw ValidationError("M", "node count must be a positive multiple of 5");
  }

  double a() const { return a_; }
  std::size_t M() const { return M_; }
  std::size_t size() const { return M_ + 1; }
  double h() const { return h_; }
  double x(std::size_t j) const { return j == M_ ? a_ : static_cast<double>(j) * h_; }

  friend bool operator==(const Grid& l, const Grid& r) { return l.a_ == r.a_ && l.M_ == r.M_; }

 private:
  double a_;
  std::size_t M_;
  double h_;
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr make_grid(double a, std::size_t M) { return std::make_shared<const Grid>(a, M); }

/// Complex samples on every node of a grid.
struct GridFunction {
  GridPtr grid;
  std::vector<cplx> values;

  GridFunction() = default;
  explicit GridFunction(GridPtr g, cplx fill = 0.0) : grid(std::move(g)), values(grid->size(), fill) {}
  GridFunction(GridPtr g, std::vector<cplx> v) : grid(std::move(g)), values(std::move(v)) {
    if (values.size() != grid->size()) throw Error("grid function length does not match its grid");
  }

  template <class F>
  static GridFunction sample(const GridPtr& g, F&& f) {
    GridFunction out(g);
    for (std::size_t j = 0; j < g->size(); ++j) out.values[j] = f(g->x(j));
    return out;
  }

  std::size_t size() const { return values.size(); }
  cplx& operator[](std::size_t j) { return values[j]; }
  const cplx& operator[](std::size_t j) const { return values[j]; }
  cplx back() const { return values.back(); }

  double max_abs(std::size_t from = 0) const {
    double m = 0.0;
    for (std::size_t j = from; j < values.size(); ++j) m = std::max(m, std::norm(values[j]));
    if (m > 1e300 || (m < 1e-300 && m > 0.0)) {
      // |v|^2 out of range: redo with the safe modulus.
      m = 0.0;
      for (std::size_t j = from; j < values.size(); ++j) m = std::max(m, std::abs(values[j]));
      return m;
    }
    return std::sqrt(m);
  }
  bool all_finite() const {
    for (const auto& v : values)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
  }
  bool is_zero() const {
    for (const auto& v : values)
      if (v != cplx(0.0)) return false;
    return true;
  }
};

namespace detail {

inline void require_same_grid(const GridFunction& f, const GridFunction& g) {
  if (!f.grid || !g.grid || !(*f.grid == *g.grid) || f.size() != g.size())
    throw Error("grid functions live on different grids");
}

template <class Op>
GridFunction zip(const GridFunction& f, const GridFunction& g, Op op) {
  require_same_grid(f, g);
  GridFunction out(f.grid);
  for (std::size_t j = 0; j < f.size(); ++j) out.values[j] = op(f.values[j], g.values[j]);
  return out;
}

template <class Op>
GridFunction map(const GridFunction& f, Op op) {
  GridFunction out(f.grid);
  for (std::size_t j = 0; j < f.size(); ++j) out.values[j] = op(f.values[j]);
  return out;
}

}  // namespace detail

inline GridFunction operator+(const GridFunction& f, const GridFunction& g) {
  return detail::zip(f, g, [](cplx a, cplx b) { return a + b; });
}
inline GridFunction operator-(const GridFunction& f, const GridFunction& g) {
  return detail::zip(f, g, [](cplx a, cplx b) { return a - b; });
}
inline GridFunction operator*(const GridFunction& f, const GridFunction& g) {
  return detail::zip(f, g, [](cplx a, cplx b) { return a * b; });
}
inline GridFunction operator-(const GridFunction& f) {
  return detail::map(f, [](cplx a) { return -a; });
}
inline GridFunction operator+(const GridFunction& f, cplx s) {
  return detail::map(f, [s](cplx a) { return a + s; });
}
inline GridFunction operator*(const GridFunction& f, cplx s) {
  return detail::map(f, [s](cplx a) { return a * s; });
}
inline GridFunction operator*(cplx s, const GridFunction& f) { return f * s; }

/// Result of a nodewise division. Nodes where the divisor underflows are
/// listed in `flagged` and hold zero; the caller supplies the limit.
struct Quotient {
  GridFunction value;
  std::vector<std::size_t> flagged;
};

inline Quotient divide(const GridFunction& f, const GridFunction& g, double tiny = 1e-300) {
  detail::require_same_grid(f, g);
  Quotient q{GridFunction(f.grid), {}};
  for (std::size_t j = 0; j < f.size(); ++j) {
    if (std::abs(g.values[j]) <= tiny) {
      q.flagged.push_back(j);
    } else {
      q.value.values[j] = f.values[j] / g.values[j];
    }
  }
  return q;
}

inline Quotient divide(const GridFunction& f, cplx s) {
  Quotient q{GridFunction(f.grid), {}};
  if (s == cplx(0.0)) {
    for (std::size_t j = 0; j < f.size(); ++j) q.flagged.push_back(j);
    return q;
  }
  q.value = f * (1.0 / s);
  return q;
}

namespace detail {

/// Monomial coefficients of the Lagrange basis on the nodes {0,...,5}:
/// L_j(s) = sum_d lagrange()[j][d] s^d.
inline const std::array<std::array<long double, 6>, 6>& lagrange() {
  static const auto table = [] {
    std::array<std::array<long double, 6>, 6> out{};
    for (int j = 0; j < 6; ++j) {
      std::array<long double, 6> c{};
      c[0] = 1.0L;
      int deg = 0;
      long double denom = 1.0L;
      for (int k = 0; k < 6; ++k) {
        if (k == j) continue;
        for (int d = deg + 1; d >= 0; --d) c[d] = (d > 0 ? c[d - 1] : 0.0L) - static_cast<long double>(k) * c[d];
        ++deg;
        denom *= static_cast<long double>(j - k);
      }
      for (int d = 0; d < 6; ++d) out[j][d] = c[d] / denom;
    }
    return out;
  }();
  return table;
}

inline long double lagrange_eval(int j, long double u) {
  const auto& c = lagrange()[j];
  long double v = 0.0L;
  for (int d = 5; d >= 0; --d) v = v * u + c[d];
  return v;
}

/// 24-point Gauss-Legendre rule on [-1, 1].
inline const std::array<std::pair<long double, long double>, 24>& gauss_legendre() {
  static const auto rule = [] {
    constexpr int n = 24;
    std::array<std::pair<long double, long double>, n> r{};
    for (int i = 0; i < n; ++i) {
      long double x = std::cos(3.14159265358979323846264338327950288L * (i + 0.75L) / (n + 0.5L)), dp = 0.0L;
      for (int it = 0; it < 100; ++it) {
        long double p0 = 1.0L, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const long double p2 = ((2.0L * k - 1.0L) * x * p1 - (k - 1.0L) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0L);
        const long double dx = p1 / dp;
        x -= dx;
        if (std::fabs(dx) < 1e-19L) break;
      }
      r[i] = {x, 2.0L / ((1.0L - x * x) * dp * dp)};
    }
    return r;
  }();
  return rule;
}

}  // namespace detail

/// Cumulative weights of the six-point closed Newton-Cotes panel.
/// weights()[m][j] = integral over [0, m] of the Lagrange basis polynomial
/// for node j of {0,...,5}.
inline const std::array<std::array<double, 6>, 6>& newton_cotes_weights() {
  static const auto table = [] {
    std::array<std::array<double, 6>, 6> w{};
    const auto& c = detail::lagrange();
    for (int j = 0; j < 6; ++j)
      for (int m = 0; m < 6; ++m) {
        long double s = 0.0L, pw = static_cast<long double>(m);
        for (int d = 0; d <= 5; ++d) {
          s += c[j][d] * pw / static_cast<long double>(d + 1);
          pw *= static_cast<long double>(m);
        }
        w[m][j] = static_cast<double>(s);
      }
    return w;
  }();
  return table;
}

/// a * b without the library's inf/nan recovery path (hot loops only).
inline cplx mul(cplx a, cplx b) { return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()}; }

/// a / b without the library's scaling path when |b|^2 is comfortably in range.
inline cplx quick_div(cplx a, cplx b) {
  const double n = std::norm(b);
  if (n > 1e-280 && n < 1e280) return mul(a, std::conj(b)) / n;
  return a / b;
}

namespace detail {

/// out[m-1] = scale * sum_j w[m][j] v[j] for m = 1..5.
inline void panel_sums(const std::array<std::array<double, 6>, 6>& w, const std::array<cplx, 6>& v, double scale,
                       std::array<cplx, 5>& out) {
#if defined(__GNUC__)
  typedef double v2 __attribute__((vector_size(16)));
  v2 x[6];
  for (int j = 0; j < 6; ++j) x[j] = v2{v[j].real(), v[j].imag()};
  for (int m = 1; m <= 5; ++m) {
    v2 acc = {0.0, 0.0};
    for (int j = 0; j < 6; ++j) acc += w[m][j] * x[j];
    acc *= scale;
    out[m - 1] = cplx(acc[0], acc[1]);
  }
#else
  for (int m = 1; m <= 5; ++m) {
    double ar = 0.0, ai = 0.0;
    for (int j = 0; j < 6; ++j) {
      ar += w[m][j] * v[j].real();
      ai += w[m][j] * v[j].imag();
    }
    out[m - 1] = cplx(ar * scale, ai * scale);
  }
#endif
}

}  // namespace detail

/// F(x_j) = integral over [0, x_j] of the integrand with node values f(j).
///
/// Each panel of five intervals integrates the degree-5 interpolant of its
/// six samples; panel totals are chained with compensated summation. A
/// non-finite sample makes the last value non-finite.
/// The result goes to F, whose storage is reused.
template <class Fn>
void cumulative_integral_into(GridFunction& F, const GridPtr& grid, Fn&& f) {
  const auto& W = newton_cotes_weights();
  const std::size_t M = grid->M();
  if (M % 5 != 0) throw ValidationError("M", "node count must be a positive multiple of 5");
  const double h = grid->h();

  F.grid = grid;
  F.values.resize(grid->size());
  F.values[0] = 0.0;
  cplx base = 0.0, comp = 0.0;  // Kahan sum of completed panels
  std::array<cplx, 6> v;
  std::array<cplx, 5> sums;
  v[5] = f(std::size_t{0});
  for (std::size_t p = 0; p < M; p += 5) {
    v[0] = v[5];
    for (int j = 1; j < 6; ++j) v[j] = f(p + j);
    detail::panel_sums(W, v, h, sums);
    for (int m = 1; m <= 5; ++m) {
      const cplx s = sums[m - 1];
      if (m < 5) {
        F.values[p + m] = base + s;
      } else {
        const cplx y = s - comp;
        const cplx t = base + y;
        comp = (t - base) - y;
        base = t;
        F.values[p + 5] = base;
      }
    }
  }
}

template <class Fn>
GridFunction cumulative_integral_of(const GridPtr& grid, Fn&& f) {
  GridFunction F;
  cumulative_integral_into(F, grid, f);
  return F;
}

/// F(x_j) = integral of f over [0, x_j].
inline GridFunction cumulative_integral(const GridFunction& f) {
  const cplx* v = f.values.data();
  return cumulative_integral_of(f.grid, [v](std::size_t j) { return v[j]; });
}

/// Cumulative integral of an integrand behaving like c*t^p + b near 0 with
/// -1 < p < 0 (f(0) is ignored). c and b are fitted through nodes 1 and 2,
/// the smooth remainder is integrated numerically and the singular part
/// analytically.
inline GridFunction cumulative_integral_singular(const GridFunction& f, double p) {
  if (!(p > -1.0)) throw DomainError("integrand is not integrable at the origin");
  const Grid& g = *f.grid;
  const double x1 = g.x(1), x2 = g.x(2);
  const double t1 = std::pow(x1, p), t2 = std::pow(x2, p);
  const cplx c = (f.values[2] - f.values[1]) / (t2 - t1);
  const cplx b = f.values[1] - c * t1;

  GridFunction rest(f.grid);
  rest.values[0] = b;
  for (std::size_t j = 1; j < f.size(); ++j) rest.values[j] = f.values[j] - c * std::pow(g.x(j), p);
  GridFunction F = cumulative_integral(rest);
  for (std::size_t j = 1; j < F.size(); ++j) F.values[j] += c * std::pow(g.x(j), p + 1.0) / (p + 1.0);
  return F;
}

using PanelWeights = std::array<std::array<double, 6>, 6>;

/// Product weights of panel P for the weight t^s: w[m][j] = integral over
/// [0, m] of (5P + u)^s L_j(u) du for P = 0, and of (1 + u / 5P)^s L_j(u) du
/// otherwise (the factor (5P)^s is applied by the caller).
inline PanelWeights power_panel_weights(double s, std::size_t P) {
  PanelWeights w{};
  const auto& c = detail::lagrange();
  const long double S = s;
  if (P == 0) {
    for (int j = 0; j < 6; ++j)
      for (int m = 1; m < 6; ++m) {
        long double v = 0.0L;
        for (int d = 0; d <= 5; ++d) v += c[j][d] * std::pow(static_cast<long double>(m), S + d + 1.0L) / (S + d + 1.0L);
        w[m][j] = static_cast<double>(v);
      }
    return w;
  }
  const auto& gl = detail::gauss_legendre();
  const long double t0 = 5.0L * static_cast<long double>(P);
  for (int m = 1; m < 6; ++m) {
    const long double half = 0.5L * m;
    for (const auto& [node, weight] : gl) {
      const long double u = half * (node + 1.0L);
      const long double f = weight * half * std::pow(1.0L + u / t0, S);
      for (int j = 0; j < 6; ++j) w[m][j] += static_cast<double>(f * detail::lagrange_eval(j, u));
    }
  }
  return w;
}

/// F(x_j) = integral over [0, x_j] of t^s g(t), s > -1, with g given by its
/// node values g(j). On the first `exact_panels` panels the weight t^s is
/// integrated exactly against the degree-5 interpolant of g, so F keeps full
/// relative accuracy near the origin; later panels use the plain rule on
/// t^s g. `ts` may hold t^s on every node to save the powers.
template <class Fn>
void cumulative_integral_power_into(GridFunction& F, const GridPtr& grid, double s, Fn&& g, std::size_t exact_panels = 40,
                                    const std::vector<double>* ts = nullptr) {
  if (!(s > -1.0)) throw DomainError("integrand is not integrable at the origin");
  if (s == 0.0) return cumulative_integral_into(F, grid, g);
  const std::size_t M = grid->M();
  if (M % 5 != 0) throw ValidationError("M", "node count must be a positive multiple of 5");
  const double h = grid->h();
  const std::size_t npanels = M / 5, nexact = std::min(exact_panels, npanels);

  thread_local std::vector<std::pair<double, std::vector<PanelWeights>>> cache;
  const std::vector<PanelWeights>* table = nullptr;
  for (const auto& [key, tab] : cache)
    if (key == s && tab.size() >= nexact) table = &tab;
  if (table == nullptr) {
    std::vector<PanelWeights> tab;
    for (std::size_t P = 0; P < std::max(nexact, exact_panels); ++P) tab.push_back(power_panel_weights(s, P));
    if (cache.size() > 64) cache.erase(cache.begin());
    cache.emplace_back(s, std::move(tab));
    table = &cache.back().second;
  }
  auto tpow = [&](std::size_t j) { return ts ? (*ts)[j] : std::pow(grid->x(j), s); };

  const auto& W = newton_cotes_weights();
  const double hs = std::pow(h, s + 1.0);
  F.grid = grid;
  F.values.resize(grid->size());
  F.values[0] = 0.0;
  cplx base = 0.0, comp = 0.0;
  std::array<cplx, 6> v;
  std::array<cplx, 5> sums;
  auto panel = [&](std::size_t p, const PanelWeights& w, double scale) {
    detail::panel_sums(w, v, scale, sums);
    for (int m = 1; m <= 5; ++m) {
      const cplx acc = sums[m - 1];
      if (m < 5) {
        F.values[p + m] = base + acc;
      } else {
        const cplx y = acc - comp;
        const cplx t = base + y;
        comp = (t - base) - y;
        base = t;
        F.values[p + 5] = base;
      }
    }
  };
  for (std::size_t P = 0; P < nexact; ++P) {
    const std::size_t p = 5 * P;
    for (int j = 0; j < 6; ++j) v[j] = g(p + j);
    panel(p, (*table)[P], P == 0 ? hs : h * std::pow(grid->x(p), s));
  }
  if (nexact < npanels) v[5] = g(5 * nexact) * tpow(5 * nexact);
  for (std::size_t P = nexact; P < npanels; ++P) {
    const std::size_t p = 5 * P;
    v[0] = v[5];
    for (int j = 1; j < 6; ++j) v[j] = g(p + j) * tpow(p + j);
    panel(p, W, h);
  }
}

template <class Fn>
GridFunction cumulative_integral_power_of(const GridPtr& grid, double s, Fn&& g, std::size_t exact_panels = 40,
                                          const std::vector<double>* ts = nullptr) {
  GridFunction F;
  cumulative_integral_power_into(F, grid, s, g, exact_panels, ts);
  return F;
}

inline GridFunction cumulative_integral_power(const GridFunction& g, double s, std::size_t exact_panels = 40,
                                              const std::vector<double>* ts = nullptr) {
  const cplx* v = g.values.data();
  return cumulative_integral_power_of(g.grid, s, [v](std::size_t j) { return v[j]; }, exact_panels, ts);
}

/// Value at node 0 of a smooth function from nodes 1..6 (quintic extrapolation).
inline cplx extrapolate_to_origin(const GridFunction& f) {
  return 6.0 * f[1] - 15.0 * f[2] + 20.0 * f[3] - 15.0 * f[4] + 6.0 * f[5] - f[6];
}

}  // namespace spps
