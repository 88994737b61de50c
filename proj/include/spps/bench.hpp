#pragma once

// Built-in benchmark problems with reference eigenvalues and the settings
// that reproduce them.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "spps/error.hpp"
#include "spps/problem.hpp"
#include "spps/special.hpp"
#include "spps/spectrum.hpp"

namespace spps::bench {

struct Reference {
  int n = 1;
  cplx value;
  std::string source;  // "exact", "reference solver", "frobenius series"
  double tol = 1e-9;
  bool relative = true;
};

struct BenchmarkCase {
  std::string id;
  std::string title;
  ProblemSpec spec;
  SolverSettings settings;
  bool sqrt_values = false;  // references are sqrt(lambda)
  std::vector<Reference> references;
};

inline const std::vector<std::string>& case_ids() {
  static const std::vector<std::string> ids = {"bessel-5-16", "reciprocal", "harmonic-bessel", "hydrogen",
                                               "hydrogen-edge", "sin-perturbed", "complex-derivative"};
  return ids;
}

namespace detail {

inline SolverSettings linear(int N, std::size_t M, double step, double imag_step, double imag_offset) {
  SolverSettings s;
  s.N = N;
  s.M = M;
  s.strategy = Strategy::Linear;
  s.step = step;
  s.imag_step = imag_step;
  s.imag_offset = imag_offset;
  return s;
}

inline void add(BenchmarkCase& c, const std::vector<std::pair<int, double>>& vals, const char* source, double tol,
                bool relative = true) {
  for (const auto& [n, v] : vals) c.references.push_back({n, cplx(v), source, tol, relative});
}

inline void finish(BenchmarkCase& c) {
  std::sort(c.references.begin(), c.references.end(), [](const Reference& a, const Reference& b) { return a.n < b.n; });
  int top = 0;
  for (const Reference& r : c.references) top = std::max(top, r.n);
  c.settings.count = top;
}

}  // namespace detail

inline BenchmarkCase make_case(const std::string& id) {
  const double pi = std::numbers::pi;
  BenchmarkCase c;
  c.id = id;
  if (id == "bessel-5-16") {
    c.title = "-u'' + (5/16) u / x^2 = lambda u, u(1) = 0";
    c.spec.l = 0.25;
    c.spec.u0 = Expr::parse("x^(5/4)");
    c.spec.du0 = Expr::parse("5/4*x^(1/4)");
    c.settings = detail::linear(40, 50000, 50.0, 2.0, 0.0);
    detail::add(c,
                {{1, 12.1871394680951},
                 {2, 44.257559403502},
                 {3, 96.071604838843},
                 {4, 167.62571242058},
                 {5, 258.91930035744},
                 {6, 369.95220926235},
                 {7, 500.72438147579},
                 {8, 651.23579210254},
                 {9, 821.48642898238},
                 {10, 1011.47628560802}},
                "exact", 1e-11);
    detail::add(c, {{30, 8956.5077203636}, {50, 24797.222775294}}, "exact", 1e-9);
  } else if (id == "reciprocal") {
    c.title = "-u'' - u / x = lambda u, u(1) = 0";
    c.spec.q = Expr::parse("-1/x");
    c.spec.alpha = -1.0;
    c.spec.u0 = Expr::parse("sqrt(x)*besselj(1, 2*sqrt(x))");
    c.spec.du0 = Expr::parse("besselj(0, 2*sqrt(x))");
    c.settings = detail::linear(40, 50000, 50.0, 2.0, 0.5);
    detail::add(c, {{1, 7.3739850151751}}, "exact", 1e-10);
    detail::add(c,
                {{2, 36.3360195952318},
                 {3, 85.292582094137},
                 {4, 154.098623739767},
                 {5, 242.705559362911},
                 {6, 351.091167129418},
                 {8, 627.155044324564},
                 {10, 982.239093680188},
                 {20, 3942.42966385102},
                 {30, 8876.82700072941},
                 {40, 15785.2626475007},
                 {50, 24667.683593313}},
                "exact", 1e-9);
  } else if (id == "harmonic-bessel") {
    c.title = "-u'' + (15/4 / x^2 + x^2) u = lambda u, u(pi) = 0";
    c.spec.l = 1.5;
    c.spec.a = pi;
    c.spec.q = Expr::parse("x^2");
    c.spec.alpha = 2.0;
    c.spec.u0 = Expr::parse("4*sqrt(x)*besseli(1, x^2/2)");
    c.spec.du0 = Expr::parse("4*x^(3/2)*besseli(0, x^2/2) - 6/sqrt(x)*besseli(1, x^2/2)");
    c.settings = detail::linear(50, 50000, 10.0, 1.0, 1.0);
    c.sqrt_values = true;
    detail::add(c, {{1, 2.4629499739740}}, "exact", 1e-10);
    detail::add(c,
                {{2, 3.2883529299426},
                 {3, 4.1498642187448},
                 {4, 5.0636688237341},
                 {5, 6.0075814581160},
                 {7, 7.9397373768993},
                 {10, 10.8861250916173},
                 {15, 15.8426318195682},
                 {20, 20.8202301908124},
                 {30, 30.7973502195868},
                 {50, 50.77867680951}},
                "exact", 1e-10);
  } else if (id == "hydrogen") {
    c.title = "-u'' + (6 / x^2 + 1 / x) u = lambda u, u(pi) = 0";
    c.spec.l = 2.0;
    c.spec.a = pi;
    c.spec.q = Expr::parse("1/x");
    c.spec.alpha = -1.0;
    c.settings = detail::linear(40, 50000, 10.0, 1.0, 1.0);
    c.sqrt_values = true;
    detail::add(c, {{1, 1.97027445061572}}, "exact", 1e-10);
    detail::add(c,
                {{2, 3.00436042551857},
                 {3, 4.01515351791736},
                 {4, 5.0193472218612},
                 {5, 6.0210053515488},
                 {7, 8.0215089715478},
                 {10, 11.0202653559399},
                 {15, 16.0176675547294},
                 {20, 21.0155251794156},
                 {30, 31.0125189152597},
                 {50, 51.00916429551}},
                "exact", 1e-8);
  } else if (id == "hydrogen-edge") {
    c.title = "-u'' + (-1/4 / x^2 + 1 / x) u = lambda u, u(pi) = 0";
    c.spec.l = -0.5;
    c.spec.a = pi;
    c.spec.q = Expr::parse("1/x");
    c.spec.alpha = -1.0;
    c.settings = detail::linear(40, 1000000, 10.0, 1.0, 1.0);
    const std::vector<double> ref = frobenius_dirichlet_spectrum(-0.5, 1.0, pi, 10);
    for (int n = 1; n <= 10; ++n) c.references.push_back({n, ref[n - 1], "frobenius series", 1e-6, true});
  } else if (id == "sin-perturbed") {
    c.title = "-u'' + (2 / x^2 + sin x) u = lambda u, u(pi) = 0";
    c.spec.l = 1.0;
    c.spec.a = pi;
    c.spec.q = Expr::parse("sin(x)");
    c.spec.alpha = 1.0;
    c.settings = detail::linear(40, 50000, 10.0, 1.0, 1.0);
    c.sqrt_values = true;
    detail::add(c,
                {{1, 1.69965392162512},
                 {2, 2.60438727880111},
                 {3, 3.56972957088910},
                 {4, 4.55232022604096},
                 {5, 5.54189892161906},
                 {7, 7.53001773432606},
                 {10, 10.5211087141255},
                 {15, 15.5141539227760},
                 {20, 20.5106568768319},
                 {30, 30.5071385063018},
                 {50, 50.5043027452760}},
                "reference solver", 1e-9);
  } else if (id == "complex-derivative") {
    c.title = "-u'' + (3/4) u / x^2 = lambda u', u'(1) = 0";
    c.spec.l = 0.5;
    c.spec.r0 = Expr::constant(0.0);
    c.spec.r1 = Expr::constant(1.0);
    c.spec.beta = 0.0;
    c.spec.gamma = 1.0;
    c.spec.u0 = Expr::parse("x^(3/2)");
    c.spec.du0 = Expr::parse("3/2*x^(1/2)");
    c.settings.N = 50;
    c.settings.M = 200000;
    c.settings.strategy = Strategy::Adaptive;
    c.settings.delta = cplx(0.0, -1.0);
    c.settings.real_mode = false;
    const std::pair<int, cplx> vals[] = {{1, {4.47123493371, 6.76481747480}},  {2, {5.63553225515, 13.37799928396}},
                                         {3, {6.35749327947, 19.82515033081}}, {4, {6.88515095992, 26.20887598266}},
                                         {5, {7.30184486294, 32.56088281579}}, {10, {8.62739882786, 64.14303168978}},
                                         {20, {9.98333956726, 127.0816376257}}, {30, {10.7844002552, 189.9555609955}},
                                         {50, {11.7983559297, 315.6569255437}}};
    for (const auto& [n, v] : vals) c.references.push_back({n, v, "exact", 1e-8, false});
  } else {
    throw ValidationError("id", "unknown benchmark '" + id + "'");
  }
  detail::finish(c);
  return c;
}

struct Overrides {
  std::optional<int> N;
  std::optional<std::size_t> M;
  std::optional<int> count;  // trims the reference list as well
};

struct ComparisonRow {
  int n = 0;
  bool found = false;
  cplx computed;   // in the units of the reference
  cplx reference;
  double error = 0.0;
  double tol = 0.0;
  bool relative = true;
  bool pass = false;
  std::string source;
};

struct BenchmarkReport {
  BenchmarkCase bench;
  EigenResult result;
  std::vector<ComparisonRow> rows;
  bool pass = false;
};

inline BenchmarkReport compare(const BenchmarkCase& c, EigenResult R) {
  BenchmarkReport rep;
  rep.bench = c;
  rep.pass = true;
  for (const Reference& ref : c.references) {
    ComparisonRow row;
    row.n = ref.n;
    row.reference = ref.value;
    row.tol = ref.tol;
    row.relative = ref.relative;
    row.source = ref.source;
    if (ref.n <= static_cast<int>(R.eigenvalues.size())) {
      row.found = true;
      const cplx lam = R.eigenvalues[static_cast<std::size_t>(ref.n - 1)].lambda;
      row.computed = c.sqrt_values ? std::sqrt(lam) : lam;
      row.error = std::abs(row.computed - ref.value);
      if (ref.relative) row.error /= std::abs(ref.value);
      row.pass = row.error <= ref.tol;
    }
    rep.pass = rep.pass && row.pass;
    rep.rows.push_back(row);
  }
  rep.result = std::move(R);
  return rep;
}

inline BenchmarkReport run_benchmark(const std::string& id, const Overrides& o = {}) {
  BenchmarkCase c = make_case(id);
  if (o.N) c.settings.N = *o.N;
  if (o.M) c.settings.M = *o.M;
  if (o.count) {
    std::erase_if(c.references, [&](const Reference& r) { return r.n > *o.count; });
    if (c.references.empty()) throw ValidationError("count", "no reference eigenvalue at or below the requested count");
    c.settings.count = *o.count;
  }
  EigenResult R = solve(c.spec, c.settings);
  return compare(c, std::move(R));
}

}  // namespace spps::bench
