#include <gtest/gtest.h>

#include <cmath>

#include "spps/grid.hpp"

using spps::cplx;
using spps::GridFunction;

namespace {

double max_err(const GridFunction& F, double (*exact)(double)) {
  double e = 0.0;
  for (std::size_t j = 0; j < F.size(); ++j) e = std::max(e, std::abs(F[j] - exact(F.grid->x(j))));
  return e;
}

}  // namespace

TEST(Grid, NodesAndEndpoint) {
  spps::Grid g(M_PI, 50);
  EXPECT_EQ(g.x(0), 0.0);
  EXPECT_EQ(g.x(50), M_PI);
  for (std::size_t j = 1; j <= 50; ++j) EXPECT_LT(g.x(j - 1), g.x(j));
  EXPECT_THROW(spps::Grid(1.0, 12), spps::ValidationError);
  EXPECT_THROW(spps::Grid(0.0, 10), spps::ValidationError);
}

TEST(Grid, PanelWeightsMatchClassicalRule) {
  const auto& W = spps::newton_cotes_weights();
  const double full[6] = {19, 75, 50, 50, 75, 19};
  for (int j = 0; j < 6; ++j) EXPECT_DOUBLE_EQ(W[5][j], full[j] * 5.0 / 288.0);
  for (int j = 0; j < 6; ++j) EXPECT_EQ(W[0][j], 0.0);
  // Each row integrates the constant 1 exactly.
  for (int m = 0; m < 6; ++m) {
    double s = 0.0;
    for (int j = 0; j < 6; ++j) s += W[m][j];
    EXPECT_NEAR(s, m, 1e-15);
  }
}

TEST(Grid, ConstantIntegratesExactly) {
  auto g = spps::make_grid(1.0, 100);
  auto F = spps::cumulative_integral(GridFunction(g, 1.0));
  for (std::size_t j = 0; j < F.size(); ++j) EXPECT_NEAR(F[j].real(), g->x(j), 1e-15);
}

TEST(Grid, MonomialsUpToFifthDegreeAreExact) {
  for (std::size_t M : {5u, 35u, 1000u}) {
    auto g = spps::make_grid(1.0, M);
    for (int p = 0; p <= 5; ++p) {
      auto f = GridFunction::sample(g, [p](double t) { return cplx(std::pow(t, p)); });
      auto F = spps::cumulative_integral(f);
      for (std::size_t j = 0; j < F.size(); ++j) {
        const double want = std::pow(g->x(j), p + 1) / (p + 1);
        EXPECT_NEAR(F[j].real(), want, 1e-13 * std::max(1.0, want)) << "p=" << p << " j=" << j;
      }
    }
  }
}

TEST(Grid, ExponentialMatchesAntiderivative) {
  auto g = spps::make_grid(1.0, 50000);
  auto F = spps::cumulative_integral(GridFunction::sample(g, [](double t) { return cplx(std::exp(t)); }));
  EXPECT_NEAR(F.back().real(), std::exp(1.0) - 1.0, 1e-13);
  EXPECT_LT(max_err(F, [](double x) { return std::expm1(x); }), 1e-13);
}

TEST(Grid, ObservedOrderAtLeastSix) {
  auto err = [](std::size_t M) {
    auto g = spps::make_grid(2.0, M);
    auto F = spps::cumulative_integral(GridFunction::sample(g, [](double t) { return cplx(std::cos(3.0 * t)); }));
    return max_err(F, [](double x) { return std::sin(3.0 * x) / 3.0; });
  };
  const double e1 = err(20), e2 = err(40);
  EXPECT_GT(e1 / e2, 64.0);
}

TEST(Grid, Linearity) {
  auto g = spps::make_grid(1.5, 200);
  auto f = GridFunction::sample(g, [](double t) { return cplx(std::sin(t), t * t); });
  auto h = GridFunction::sample(g, [](double t) { return cplx(std::exp(-t), 1.0); });
  const cplx al(2.0, -1.0), be(-0.5, 3.0);
  auto lhs = spps::cumulative_integral(f * al + h * be);
  auto rhs = spps::cumulative_integral(f) * al + spps::cumulative_integral(h) * be;
  for (std::size_t j = 0; j < lhs.size(); ++j) EXPECT_NEAR(std::abs(lhs[j] - rhs[j]), 0.0, 1e-14);
}

TEST(Grid, Pointwise) {
  auto g = spps::make_grid(1.0, 10);
  auto f = GridFunction::sample(g, [](double t) { return cplx(t, -t); });
  auto one = f * cplx(1.0);
  EXPECT_EQ(one.values, f.values);
  auto zero = f + (-f);
  EXPECT_TRUE(zero.is_zero());

  auto x3 = GridFunction::sample(g, [](double t) { return cplx(t * t * t); });
  auto x2 = GridFunction::sample(g, [](double t) { return cplx(t * t); });
  auto q = spps::divide(x3, x2);
  ASSERT_EQ(q.flagged.size(), 1u);
  EXPECT_EQ(q.flagged[0], 0u);
  for (std::size_t j = 1; j < q.value.size(); ++j) EXPECT_NEAR(q.value[j].real(), g->x(j), 1e-15);

  auto other = spps::make_grid(2.0, 10);
  EXPECT_THROW(f + GridFunction(other), spps::Error);
}

TEST(Grid, SingularIntegrandSubtraction) {
  // f(t) = t^-1/2 + cos t, integral 2 sqrt(x) + sin x.
  auto g = spps::make_grid(1.0, 1000);
  auto f = GridFunction::sample(g, [](double t) { return t == 0.0 ? cplx(0.0) : cplx(1.0 / std::sqrt(t) + std::cos(t)); });
  auto F = spps::cumulative_integral_singular(f, -0.5);
  EXPECT_LT(max_err(F, [](double x) { return 2.0 * std::sqrt(x) + std::sin(x); }), 1e-7);
}

TEST(Grid, PowerWeightedIntegralKeepsRelativeAccuracy) {
  // int_0^x t^s e^t dt = sum_k x^{s+k+1} / (k! (s+k+1))
  auto g = spps::make_grid(1.0, 50000);
  const GridFunction e = GridFunction::sample(g, [](double x) { return std::exp(x); });
  for (double s : {-0.9, -0.5, 0.5, 1.5, 5.0}) {
    const GridFunction F = spps::cumulative_integral_power(e, s);
    for (std::size_t j : {1u, 2u, 3u, 7u, 50u, 5000u, 50000u}) {
      const long double x = g->x(j);
      long double want = 0.0L, fact = 1.0L;
      for (int k = 0; k < 40; ++k) {
        want += std::pow(x, s + k + 1.0L) / (fact * (s + k + 1.0L));
        fact *= k + 1;
      }
      EXPECT_NEAR(F[j].real() / static_cast<double>(want), 1.0, 2e-15) << s << " " << j;
    }
  }
}

TEST(Grid, PowerWeightedIntegralReducesToPlainRule) {
  auto g = spps::make_grid(2.0, 1000);
  const GridFunction f = GridFunction::sample(g, [](double x) { return std::cos(3.0 * x); });
  const GridFunction a = spps::cumulative_integral_power(f, 0.0), b = spps::cumulative_integral(f);
  for (std::size_t j = 0; j < g->size(); ++j) EXPECT_EQ(a[j], b[j]);
  EXPECT_THROW(spps::cumulative_integral_power(f, -1.0), spps::DomainError);
}
