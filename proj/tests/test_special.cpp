#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "spps/special.hpp"

using spps::bench::cplx;
namespace sb = spps::bench;

TEST(Special, HalfIntegerBesselJ) {
  for (double x : {0.3, 1.0, 7.5, 17.0, 19.0, 30.0, 157.0}) {
    const double want = std::sqrt(2.0 / (std::numbers::pi * x)) * std::sin(x);
    EXPECT_NEAR(sb::bessel_J(0.5, x), want, 1e-14) << x;
    const double want32 = std::sqrt(2.0 / (std::numbers::pi * x)) * (std::sin(x) / x - std::cos(x));
    EXPECT_NEAR(sb::bessel_J(1.5, x), want32, 1e-14) << x;
  }
  EXPECT_EQ(sb::bessel_J(0.5, 0.0), 0.0);
  EXPECT_EQ(sb::bessel_J(0.0, 0.0), 1.0);
}

TEST(Special, BesselRecurrenceAcrossBranches) {
  // J_{nu-1} + J_{nu+1} = (2 nu / x) J_nu
  for (double nu : {0.75, 1.0, 1.75}) {
    for (double x : {2.0, 10.0, 17.9, 18.1, 25.0, 60.0, 150.0}) {
      const double lhs = sb::bessel_J(nu - 1.0, x) + sb::bessel_J(nu + 1.0, x);
      const double rhs = 2.0 * nu / x * sb::bessel_J(nu, x);
      EXPECT_NEAR(lhs, rhs, 1e-13) << nu << " " << x;
    }
  }
}

TEST(Special, BesselZeros) {
  EXPECT_NEAR(sb::bessel_zero(1.0, 1), 3.8317059702075123, 1e-13);
  for (int k = 1; k <= 5; ++k) EXPECT_NEAR(sb::bessel_zero(0.5, k), k * std::numbers::pi, 1e-13);
  const double j1 = sb::bessel_zero(0.75, 1), j10 = sb::bessel_zero(0.75, 10), j50 = sb::bessel_zero(0.75, 50);
  EXPECT_NEAR(j1 * j1 / 12.1871394680951, 1.0, 1e-12);
  EXPECT_NEAR(j10 * j10 / 1011.47628560802, 1.0, 1e-12);
  EXPECT_NEAR(j50 * j50 / 24797.222775294, 1.0, 1e-11);
}

TEST(Special, ModifiedBesselHalfInteger) {
  for (cplx z : {cplx(0.5, 0.2), cplx(3.0, -4.0), cplx(20.0, 5.0), cplx(-18.0, 9.0), cplx(2.0, 30.0)}) {
    const cplx want = std::sqrt(2.0 / (std::numbers::pi * z)) * std::sinh(z);
    const cplx got = sb::bessel_I(0.5, z);
    EXPECT_LT(std::abs(got - want), 1e-13 * std::abs(want) + 1e-15) << z;
  }
  EXPECT_EQ(sb::bessel_I(0.5, 0.0), cplx(0.0));
  EXPECT_EQ(sb::bessel_I(2.3, 0.0), cplx(0.0));
  EXPECT_EQ(sb::bessel_I(0.0, 0.0), cplx(1.0));
}

TEST(Special, ModifiedBesselOnImaginaryAxis) {
  // I_n(i x) = i^n J_n(x)
  for (double x : {5.0, 40.0, 120.0}) {
    const cplx i0 = sb::bessel_I(0.0, cplx(0.0, x));
    const cplx i1 = sb::bessel_I(1.0, cplx(0.0, x));
    EXPECT_NEAR(i0.real(), sb::bessel_J(0.0, x), 1e-13);
    EXPECT_NEAR(i0.imag(), 0.0, 1e-13);
    EXPECT_NEAR(i1.imag(), sb::bessel_J(1.0, x), 1e-13);
  }
  // I_0 - I_2 = (2/z) I_1 for a large complex argument.
  const cplx z(35.0, 60.0);
  const cplx lhs = sb::bessel_I(0.0, z) - sb::bessel_I(2.0, z);
  const cplx rhs = 2.0 / z * sb::bessel_I(1.0, z);
  EXPECT_LT(std::abs(lhs - rhs), 1e-12 * std::abs(rhs));
}

TEST(Special, ExactCharacteristicFunctionEx6) {
  EXPECT_NEAR(std::abs(sb::exact_phi_ex6(0.0) - 1.5), 0.0, 1e-15);
  // Continuity across the small-argument branch.
  for (cplx z : {cplx(1.999, 0.0), cplx(0.0, 1.999)}) {
    const cplx a = sb::exact_phi_ex6(z);
    const cplx b = sb::exact_phi_ex6(z * (2.001 / 1.999));
    EXPECT_LT(std::abs(a - b), 0.01);
  }
  const cplx l(3.0, 7.0);
  EXPECT_LT(std::abs(sb::exact_phi_ex6(std::conj(l)) - std::conj(sb::exact_phi_ex6(l))), 1e-15);

  const cplx table[] = {{4.47123493371, 6.76481747480},  {5.63553225515, 13.37799928396},
                        {6.35749327947, 19.82515033081}, {6.88515095992, 26.20887598266},
                        {7.30184486294, 32.56088281579}, {8.62739882786, 64.14303168978},
                        {9.98333956726, 127.0816376257}};
  for (cplx lam : table) {
    const double h = 1e-6 * std::abs(lam);
    const double scale = std::abs(sb::exact_phi_ex6(lam + h) - sb::exact_phi_ex6(lam - h)) / (2 * h);
    // The tabulated digits limit how small the value can be.
    EXPECT_LT(std::abs(sb::exact_phi_ex6(lam)), 1e-9 * scale * std::abs(lam)) << lam;
  }
}

TEST(Special, FrobeniusReducesToBessel) {
  // With c = 0 the Dirichlet eigenvalues are squares of Bessel zeros.
  const double j = sb::bessel_zero(0.75, 1);
  const double lam = sb::frobenius_dirichlet_eigenvalue(0.25, 0.0, 1.0, 10.0, 15.0);
  EXPECT_NEAR(lam / (j * j), 1.0, 1e-13);
}

TEST(Special, FrobeniusHydrogen) {
  const double lam = sb::frobenius_dirichlet_eigenvalue(2.0, 1.0, std::numbers::pi, 3.0, 4.5);
  EXPECT_NEAR(std::sqrt(lam) / 1.97027445061572, 1.0, 1e-12);
  const double lam5 = sb::frobenius_dirichlet_eigenvalue(2.0, 1.0, std::numbers::pi, 35.0, 37.0);
  EXPECT_NEAR(std::sqrt(lam5) / 6.0210053515488, 1.0, 1e-12);
}

TEST(Special, Pochhammer) {
  EXPECT_EQ(sb::pochhammer(1.0L, 5), 120.0L);
  EXPECT_EQ(sb::pochhammer(2.5L, 0), 1.0L);
  EXPECT_NEAR(static_cast<double>(sb::pochhammer(0.5L, 3)), 0.5 * 1.5 * 2.5, 1e-16);
}
