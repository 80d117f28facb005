#include <cmath>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "doctest.h"

#include "decaylab/core.hpp"
#include "decaylab/errors.hpp"

using namespace decaylab;

namespace {

FiniteModel random_model(std::mt19937_64& rng, int dim, double g, int a = 0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> h0(dim);
  for (double& e : h0) e = u(rng);
  Eigen::MatrixXcd hp = Eigen::MatrixXcd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      hp(i, j) = g * cplx(u(rng), u(rng));
      hp(j, i) = std::conj(hp(i, j));
    }
  return FiniteModel(h0, hp, a);
}

// Pade-based exponential as an independent oracle.
cplx pade_amplitude(const FiniteModel& m, double t) {
  const Eigen::MatrixXcd u = (cplx(0.0, -t) * m.hamiltonian()).exp();
  return u(m.initial_index(), m.initial_index());
}

}  // namespace

TEST_CASE("FiniteModel validates its inputs") {
  Eigen::MatrixXcd hp = Eigen::MatrixXcd::Zero(2, 2);
  CHECK_THROWS_AS(FiniteModel({}, Eigen::MatrixXcd(), 0), ArgumentError);
  CHECK_THROWS_AS(FiniteModel({0.0, 1.0}, Eigen::MatrixXcd::Zero(3, 3), 0), ArgumentError);
  CHECK_THROWS_AS(FiniteModel({0.0, 1.0}, hp, 2), ArgumentError);
  hp(0, 1) = 1.0;
  hp(1, 0) = 2.0;
  CHECK_THROWS_AS(FiniteModel({0.0, 1.0}, hp, 0), ArgumentError);
  hp(1, 0) = 1.0;
  hp(0, 0) = 0.5;
  CHECK_THROWS_AS(FiniteModel({0.0, 1.0}, hp, 0), ArgumentError);
  hp(0, 0) = std::nan("");
  CHECK_THROWS_AS(FiniteModel({0.0, 1.0}, hp, 0), ArgumentError);
}

TEST_CASE("exact survival against a Pade exponential") {
  std::mt19937_64 rng(7);
  for (int dim : {2, 5, 8}) {
    const FiniteModel m = random_model(rng, dim, 0.4, dim / 2);
    const std::vector<double> ts{0.0, 0.1, 1.0, 7.3, 30.0};
    const AmplitudeSeries h = survival_exact(m, ts, Picture::heisenberg);
    const AmplitudeSeries i = survival_exact(m, ts, Picture::interaction);
    for (std::size_t k = 0; k < ts.size(); ++k) {
      CHECK(std::abs(h.amplitudes[k] - pade_amplitude(m, ts[k])) < 1e-12);
      // The pictures differ by the phase exp(-i E_a t) only.
      CHECK(std::abs(i.amplitudes[k] - std::polar(1.0, m.e_a() * ts[k]) * h.amplitudes[k]) < 1e-12);
    }
    CHECK(h.amplitudes[0] == cplx(1.0));
  }
}

TEST_CASE("evolution is unitary and time grids are validated") {
  std::mt19937_64 rng(11);
  const FiniteModel m = random_model(rng, 6, 0.5);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(6);
  psi(2) = 1.0;
  for (double t : {0.5, 13.0}) CHECK(std::abs(evolve_unitary(m, psi, t).norm() - 1.0) < 1e-13);
  CHECK_THROWS_AS(survival_exact(m, {}), ArgumentError);
  CHECK_THROWS_AS(survival_exact(m, {-1.0}), ArgumentError);
  CHECK_THROWS_AS(survival_exact(m, {1.0, 0.5}), ArgumentError);
}

TEST_CASE("short-time coefficients") {
  std::mt19937_64 rng(3);
  const FiniteModel m = random_model(rng, 5, 0.3, 1);
  const ShortTimeCoefficients st = short_time_coefficients(m);
  // Variance equals <a|H'^2|a> because H' has no diagonal.
  const double v = (m.h_prime() * m.h_prime())(1, 1).real();
  CHECK(st.variance == doctest::Approx(v).epsilon(1e-13));
  CHECK(st.mean_energy == doctest::Approx(m.e_a()).epsilon(1e-13));
  REQUIRE(st.tau_gaussian);
  CHECK(*st.tau_gaussian == doctest::Approx(1.0 / std::sqrt(v)).epsilon(1e-13));

  SUBCASE("an eigenstate has no Gaussian region") {
    Eigen::MatrixXcd hp = Eigen::MatrixXcd::Zero(3, 3);
    hp(1, 2) = hp(2, 1) = 0.4;
    const FiniteModel iso({0.0, 1.0, 2.0}, hp, 0);
    CHECK(short_time_coefficients(iso).eigenstate());
  }
}

TEST_CASE("resolvent contour amplitude agrees with exact evolution") {
  std::mt19937_64 rng(5);
  const FiniteModel m = random_model(rng, 4, 0.5);
  const std::vector<double> ts{0.0, 0.5, 3.0, 7.0, 10.0};
  const AmplitudeSeries r = resolvent_amplitude(m, ts, 0.05, 1e-8);
  CHECK(r.picture == Picture::heisenberg);
  for (std::size_t k = 0; k < ts.size(); ++k) {
    CHECK(std::abs(r.amplitudes[k] - pade_amplitude(m, ts[k])) < 1e-7);
    CHECK(r.errors[k] <= 1e-8);
  }
  SUBCASE("the contour above the spectrum gives zero before t = 0") {
    const AmplitudeSeries neg = resolvent_amplitude(m, {-3.0, -0.5}, 0.05, 1e-8);
    for (const cplx& a : neg.amplitudes) CHECK(std::abs(a) < 1e-6);
  }
  CHECK_THROWS_AS(resolvent_amplitude(m, ts, 0.0), ArgumentError);
}

TEST_CASE("resolvent element is the Green function") {
  const FiniteModel m = two_level_model(1.0, 1.0);
  // <up|(E - H)^-1|up> = (E + 1) / (E^2 - 2).
  for (cplx E : {cplx(0.3, 0.1), cplx(-4.0, 0.0), cplx(2.0, -1.0)})
    CHECK(std::abs(resolvent_element(m, E) - (E + 1.0) / (E * E - 2.0)) < 1e-14);
}

TEST_CASE("self-energy series converges as g^6 on a tree coupling graph") {
  // Levels 0-1, 0-2, 1-3: no cycles, so the fourth-order term is exact through g^4.
  auto model = [](double g) {
    Eigen::MatrixXcd hp = Eigen::MatrixXcd::Zero(4, 4);
    hp(0, 1) = hp(1, 0) = 0.8 * g;
    hp(0, 2) = hp(2, 0) = cplx(0.3, 0.5) * g;
    hp(2, 0) = std::conj(hp(0, 2));
    hp(1, 3) = hp(3, 1) = 0.6 * g;
    return FiniteModel({0.0, 1.3, -0.9, 2.1}, hp, 0);
  };
  const cplx E(0.2, 0.05);
  std::vector<double> err2, err4;
  for (double g : {0.2, 0.1, 0.05}) {
    const FiniteModel m = model(g);
    const cplx exact = E - m.e_a() - 1.0 / resolvent_element(m, E);
    err2.push_back(std::abs(self_energy_series(m, E, 2) - exact));
    err4.push_back(std::abs(self_energy_series(m, E, 4) - exact));
  }
  for (int k = 0; k < 2; ++k) {
    CHECK(err2[k] / err2[k + 1] == doctest::Approx(16.0).epsilon(0.1));
    CHECK(err4[k] / err4[k + 1] == doctest::Approx(64.0).epsilon(0.1));
  }
  CHECK_THROWS_AS(self_energy_series(model(0.1), E, 3), ArgumentError);
  CHECK_THROWS_AS(self_energy_series(model(0.1), cplx(1.3, 0.0), 2), ArgumentError);
}

TEST_CASE("two-level model") {
  const FiniteModel m = two_level_model(1.0, 1.0);
  CHECK(m.dim() == 2);
  CHECK(m.e_a() == 1.0);
  // Rabi oscillation with W = sqrt(2).
  const double w = std::sqrt(2.0), t = 0.9;
  const cplx ref = std::cos(w * t) - cplx(0.0, 1.0) * std::sin(w * t) / w;
  CHECK(std::abs(survival_exact(m, {t}, Picture::heisenberg).amplitudes[0] - ref) < 1e-14);
}
