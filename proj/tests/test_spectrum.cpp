#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spps/special.hpp"
#include "spps/spectrum.hpp"

using namespace spps;

namespace {

std::vector<cplx> expand(const std::vector<cplx>& roots) {
  std::vector<cplx> c{1.0};
  for (const cplx& r : roots) {
    std::vector<cplx> n(c.size() + 1, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      n[k + 1] += c[k];
      n[k] -= r * c[k];
    }
    c = n;
  }
  return c;
}

double nearest(const std::vector<Root>& rs, cplx z) {
  double d = INFINITY;
  for (const Root& r : rs) d = std::min(d, std::abs(r.value - z));
  return d;
}

ProblemSpec bessel_case() {
  ProblemSpec p;
  p.l = 0.25;
  return p;
}

// -u'' + (3/4) u / x^2 = lambda u', u'(1) = 0
ProblemSpec derivative_case() {
  ProblemSpec p;
  p.l = 0.5;
  p.r0 = Expr::constant(0.0);
  p.r1 = Expr::constant(1.0);
  p.beta = 0.0;
  p.gamma = 1.0;
  return p;
}

CharPoly poly_at_zero(const ProblemSpec& p, int N, std::size_t M) {
  const GridPtr g = make_grid(p.a, M);
  std::vector<std::string> w;
  ParticularSolution s = detail::initial_u0(p, g, N, PowerOptions{}, w);
  FormalPowerSet Z = compute_Z(p, s.u0, s.du0, 0.0, N);
  return characteristic_poly(p, Z, s);
}

}  // namespace

TEST(Roots, Quadratic) {
  const auto rs = polynomial_roots({-1.0, 0.0, 1.0});
  ASSERT_EQ(rs.size(), 2u);
  EXPECT_LE(nearest(rs, 1.0), 1e-15);
  EXPECT_LE(nearest(rs, -1.0), 1e-15);
}

TEST(Roots, ConstructedQuintic) {
  const std::vector<cplx> want = {1.0, cplx(0, 1), -2.0, cplx(3, 4), cplx(0, -1)};
  const auto rs = polynomial_roots(expand(want));
  ASSERT_EQ(rs.size(), 5u);
  for (const cplx& z : want) EXPECT_LE(nearest(rs, z), 1e-12 * std::max(1.0, std::abs(z))) << z;
  for (const Root& r : rs) EXPECT_TRUE(r.converged);
}

TEST(Roots, WidelySpreadMagnitudes) {
  const std::vector<cplx> want = {1e-3, 1.0, cplx(0, 1e3), 1e5};
  const auto rs = polynomial_roots(expand(want));
  for (const cplx& z : want) EXPECT_LE(nearest(rs, z), 1e-10 * std::abs(z)) << z;
}

TEST(Roots, ZeroConstantTermGivesZeroRoot) {
  const auto rs = polynomial_roots({0.0, -4.0, 1.0});
  EXPECT_LE(nearest(rs, 0.0), 1e-15);
  EXPECT_LE(nearest(rs, 4.0), 1e-14);
}

// q = 0, Dirichlet: u = x^{l+1} sum (-lambda x^2 / 4)^k / (k! (l+3/2)_k), so the
// coefficients of Phi at lambda0 = 0 are its values at x = 1.
TEST(CharPoly, DirichletCoefficientsFollowTheBesselSeries) {
  const ProblemSpec p = bessel_case();
  const CharPoly P = poly_at_zero(p, 12, 50000);
  ASSERT_EQ(P.degree(), 12);
  for (int k = 0; k <= 12; ++k) {
    const double want = std::pow(-0.25, k) / (std::tgamma(k + 1.0) * static_cast<double>(bench::pochhammer(1.75L, k)));
    EXPECT_NEAR(P.c[k].real() / want, 1.0, 1e-12) << k;
  }
}

TEST(CharPoly, ValueAtCentreIsLeadingCoefficient) {
  const ProblemSpec p = derivative_case();
  const CharPoly P = poly_at_zero(p, 20, 20000);
  EXPECT_EQ(P(P.center), P.c[0]);
  // beta u0(a) + gamma u0'(a) with u0 = x^{3/2}
  EXPECT_NEAR(std::abs(P.c[0] - 1.5), 0.0, 1e-12);
}

TEST(CharPoly, VanishingSeedAtEndpointIsRejected) {
  const ProblemSpec p = bessel_case();
  const GridPtr g = make_grid(1.0, 1000);
  std::vector<std::string> w;
  ParticularSolution s = detail::initial_u0(p, g, 10, PowerOptions{}, w);
  FormalPowerSet Z = compute_Z(p, s.u0, s.du0, 0.0, 10);
  s.u0[g->size() - 1] = 0.0;
  EXPECT_THROW(characteristic_poly(p, Z, s), U0Error);
}

TEST(CharPoly, RootsOfRealProblemComeInConjugatePairs) {
  const CharPoly P = poly_at_zero(derivative_case(), 40, 50000);
  const auto rs = roots(P);
  for (const Root& r : rs) EXPECT_LE(nearest(rs, std::conj(r.value)), 1e-8 * (1.0 + std::abs(r.value))) << r.value;
}

TEST(Rouche, RadiusAndRootCountForTheDerivativeProblem) {
  const ProblemSpec p = derivative_case();
  const CharPoly P50 = poly_at_zero(p, 50, 200000);
  const double r50 = rouche_radius(P50);
  EXPECT_GE(r50, 5.0);
  EXPECT_LE(r50, 9.0);
  const CharPoly P75 = poly_at_zero(p, 75, 200000);
  const double r75 = rouche_radius(P75);
  EXPECT_GE(r75, 10.0);
  EXPECT_LE(r75, 14.0);
  int inside = 0;
  for (const Root& r : roots(P75)) inside += std::abs(r.value) < 24.0;
  EXPECT_EQ(inside, 6);
  // The exact function has the same count: roots trusted by the radius are true eigenvalues.
  for (const Root& r : roots(P75))
    if (std::abs(r.value) < r75) EXPECT_LE(std::abs(bench::exact_phi_ex6(r.value)), 1e-10) << r.value;
}

TEST(Rouche, VanishingBoundGivesInfiniteRadius) {
  CharPoly P;
  P.c = {1.0, 1.0};
  P.tail.umax = 0.0;
  EXPECT_TRUE(std::isinf(rouche_radius(P)));
}

TEST(Solve, FirstBesselEigenvalue) {
  SolverSettings st;
  st.count = 1;
  const EigenResult R = solve(bessel_case(), st);
  ASSERT_GE(R.eigenvalues.size(), 1u);
  const double z = bench::bessel_zero(0.75, 1);
  EXPECT_NEAR(R.eigenvalues[0].lambda.real() / (z * z), 1.0, 1e-12);
  EXPECT_EQ(R.eigenvalues[0].lambda.imag(), 0.0);
  EXPECT_TRUE(R.eigenvalues[0].trusted);
}

TEST(Solve, ShiftedEigenvaluesMatchBesselZeros) {
  SolverSettings st;
  st.count = 12;
  const EigenResult R = solve(bessel_case(), st);
  ASSERT_EQ(R.eigenvalues.size(), 12u);
  EXPECT_GT(R.chain.size(), 1u);
  for (int n = 1; n <= 12; ++n) {
    const double z = bench::bessel_zero(0.75, n);
    EXPECT_NEAR(R.eigenvalues[n - 1].lambda.real() / (z * z), 1.0, 1e-11) << n;
  }
}

TEST(Solve, AdaptiveChainFindsZerosOfTheExactFunction) {
  SolverSettings st;
  st.N = 50;
  st.M = 100000;
  st.strategy = Strategy::Adaptive;
  st.real_mode = false;
  st.count = 4;
  const EigenResult R = solve(derivative_case(), st);
  ASSERT_EQ(R.eigenvalues.size(), 4u);
  for (const Eigenvalue& e : R.eigenvalues) {
    const cplx h = 1e-4;
    const double slope = std::abs(bench::exact_phi_ex6(e.lambda + h) - bench::exact_phi_ex6(e.lambda - h)) / (2e-4);
    EXPECT_LE(std::abs(bench::exact_phi_ex6(e.lambda)), 1e-9 * slope) << e.lambda;
    EXPECT_GT(e.lambda.imag(), 0.0);
  }
  for (std::size_t i = 1; i < R.eigenvalues.size(); ++i)
    EXPECT_GT(std::abs(R.eigenvalues[i].lambda), std::abs(R.eigenvalues[i - 1].lambda));
}

TEST(Solve, EigenfunctionsSatisfyTheBoundaryCondition) {
  ProblemSpec p;
  p.q = Expr::parse("-1/x");
  p.alpha = -1.0;
  p.beta = 2.0;
  p.gamma = 1.0;
  SolverSettings st;
  st.count = 4;
  st.imag_offset = 0.5;
  st.eigenfunctions = true;
  const EigenResult R = solve(p, st);
  ASSERT_EQ(R.eigenvalues.size(), 4u);
  for (const Eigenvalue& e : R.eigenvalues) {
    ASSERT_TRUE(e.function.has_value());
    const std::size_t j = e.function->u.size() - 1;
    const cplx bc = p.beta * e.function->u[j] + p.gamma * e.function->du[j];
    EXPECT_LE(std::abs(bc), 1e-9 * 2.0 * e.function->u.max_abs()) << e.lambda;
    EXPECT_LE(ode_residual(p, e.function->u, e.function->du, e.lambda, 0.05, 1.0), 1e-4 * (1.0 + std::abs(e.lambda)));
  }
}

TEST(Solve, DuplicatesKeepTheSmallerResidual) {
  std::vector<Eigenvalue> out;
  Eigenvalue a, b, c;
  a.lambda = 100.0;
  a.residual = 1e-12;
  b.lambda = 100.0 + 5e-5;
  b.residual = 1e-14;
  c.lambda = 100.0 + 1e-3;
  detail::insert_unique(out, a);
  detail::insert_unique(out, b);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].residual, 1e-14);
  detail::insert_unique(out, c);
  EXPECT_EQ(out.size(), 2u);
}

TEST(Solve, InvalidSettingsAreRejected) {
  SolverSettings st;
  st.M = 1001;
  EXPECT_THROW(solve(bessel_case(), st), ValidationError);
  st = SolverSettings{};
  st.N = 0;
  EXPECT_THROW(solve(bessel_case(), st), ValidationError);
  ProblemSpec p = bessel_case();
  p.beta = 0.0;
  EXPECT_THROW(solve(p, SolverSettings{}), ValidationError);
}
