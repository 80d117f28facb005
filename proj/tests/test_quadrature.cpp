#include <cmath>

#include <boost/math/special_functions/bessel.hpp>

#include "doctest.h"

#include "decaylab/errors.hpp"
#include "decaylab/quadrature.hpp"

using namespace decaylab;

TEST_CASE("spherical Bessel functions match Boost") {
  const int nmax = 20;
  double out[nmax + 1];
  for (double x : {1e-10, 1e-3, 0.3, 2.0, 7.5, 19.0, 21.0, 50.0, 400.0}) {
    quad::sph_bessel(nmax, x, out);
    for (int n = 0; n <= nmax; ++n) {
      const double ref = boost::math::sph_bessel(n, x);
      CHECK(std::abs(out[n] - ref) <= 1e-13 * std::max(1e-300, std::abs(ref)) + 1e-300);
    }
  }
  quad::sph_bessel(3, 0.0, out);
  CHECK(out[0] == 1.0);
  CHECK(out[1] == 0.0);
}

TEST_CASE("adaptive quadratures integrate known functions") {
  SUBCASE("tanh-sinh handles endpoint singularities") {
    const auto e = quad::tanh_sinh([](double x) -> cplx { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-12);
    CHECK(std::abs(e.value - 2.0) < 1e-10);
  }
  SUBCASE("exp-sinh on a half line") {
    const auto e = quad::exp_sinh([](double x) -> cplx { return std::exp(-x) * cplx(1.0, 2.0); }, 0.0, 1e-12);
    CHECK(std::abs(e.value - cplx(1.0, 2.0)) < 1e-10);
  }
  SUBCASE("Gauss-Kronrod on an oscillatory complex integrand") {
    const auto e = quad::gauss_kronrod([](double x) { return std::polar(1.0, 3.0 * x); }, 0.0, 2.0, 1e-13);
    const cplx ref = (std::polar(1.0, 6.0) - 1.0) / cplx(0.0, 3.0);
    CHECK(std::abs(e.value - ref) < 1e-12);
  }
}

TEST_CASE("Filon transform of a Gaussian density") {
  const double s = 0.7;
  auto w = [&](double E) -> cplx {
    return std::exp(-E * E / (2 * s * s)) / (s * std::sqrt(2.0 * M_PI));
  };
  const auto f = quad::FilonTransform::build(w, {-12 * s, -1.0, 0.0, 1.0, 12 * s}, 1e-13);
  CHECK(std::abs(f.mass() - 1.0) < 1e-12);
  CHECK(std::abs(f.first_moment()) < 1e-12);
  for (double t : {0.0, 0.5, 3.0, 10.0, 40.0}) {
    const cplx ref = std::exp(-0.5 * s * s * t * t);
    CHECK(std::abs(f.transform(t).value - ref) < 1e-11);
  }
}

TEST_CASE("Filon transform of a box reproduces the sinc exactly at large t") {
  // Polynomial densities are represented exactly by the Legendre expansion.
  auto w = [](double E) -> cplx { return 0.5 * (1.0 + E * E * E); };
  const auto f = quad::FilonTransform::build(w, {-1.0, 1.0}, 1e-14);
  for (double t : {0.3, 5.0, 500.0}) {
    // Integral of exp(-iEt)/2 over [-1,1] is sin t / t; the odd cubic part is
    // i times a real integral, computed by integration by parts.
    const double s = std::sin(t), c = std::cos(t);
    const double cubic = 2.0 * ((3.0 * t * t - 6.0) * s / std::pow(t, 4) - (t * t - 6.0) * c / std::pow(t, 3));
    const cplx ref = s / t + cplx(0.0, -0.5) * cubic;
    CHECK(std::abs(f.transform(t).value - ref) < 1e-12);
  }
}
