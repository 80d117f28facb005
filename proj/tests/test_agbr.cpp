#include <cmath>

#include <Eigen/Dense>

#include "doctest.h"

#include "decaylab/agbr.hpp"
#include "decaylab/errors.hpp"

using namespace decaylab;

namespace {

AgBrConfig array(int n, double coupling, double x1 = 1.0, double spacing = 1.0) {
  AgBrConfig c;
  c.n_spins = n;
  c.x1 = x1;
  c.spacing = spacing;
  c.coupling = coupling;
  c.omega = 0.9;
  return c;
}

AgBrConfig macroscopic(int n, double nbar) {
  AgBrConfig c = array(n, std::asin(std::sqrt(nbar / n)), 1.0, 1.0 / (n - 1));
  return c;
}

// Dense exp(-i A) with A = sum alpha_n K_n, K_n = sigma_+ e^{-i phi} + h.c.
cplx dense_amplitude(int n, const std::vector<double>& alpha, double phi) {
  const int dim = 1 << n;
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
  for (int s = 0; s < dim; ++s)
    for (int k = 0; k < n; ++k) {
      const int t = s ^ (1 << k);
      a(t, s) += alpha[k] * ((s & (1 << k)) ? std::polar(1.0, phi) : std::polar(1.0, -phi));
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a);
  const Eigen::VectorXcd v = es.eigenvectors().row(0).adjoint();
  cplx acc = 0.0;
  for (int k = 0; k < dim; ++k) acc += std::norm(v(k)) * std::polar(1.0, -es.eigenvalues()(k));
  return acc;
}

}  // namespace

TEST_CASE("configuration validation") {
  CHECK_NOTHROW(array(3, 0.2).validate());
  CHECK_THROWS_AS(array(0, 0.2).validate(), ArgumentError);
  CHECK_THROWS_AS(array(3, 0.2, 0.0).validate(), ArgumentError);
  CHECK_THROWS_AS(array(3, 0.2, 1.0, -1.0).validate(), ArgumentError);
  AgBrConfig c = array(100, 0.1);
  c.wave_packet = WavePacket{1.0, 0.0};
  CHECK_NOTHROW(c.validate());
  c.wave_packet->a = 3.0;  // a/2 >= x1
  CHECK_THROWS_AS(c.validate(), ArgumentError);
  c.x1 = 5.0;
  c.wave_packet->a = 20.0;  // not small against L = 99
  CHECK_THROWS_AS(c.validate(), ArgumentError);
}

TEST_CASE("derived quantities and final state") {
  const AgBrConfig c = array(40, 0.3);
  CHECK(spin_flip_probability(c) == doctest::Approx(std::sin(0.3) * std::sin(0.3)).epsilon(1e-15));
  CHECK(c.nbar() == doctest::Approx(40 * c.q()));
  CHECK(c.length() == 39.0);
  const FinalStateStats s = final_state(c);
  double norm = 0.0;
  for (const cplx& v : s.coefficients) norm += std::norm(v);
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(std::abs(s.coefficients[0]) == doctest::Approx(std::pow(std::cos(0.3), 40)).epsilon(1e-13));
  CHECK(s.visibility == doctest::Approx(std::pow(1.0 - c.q(), 20)).epsilon(1e-14));
}

TEST_CASE("delta propagator counts passed scatterers") {
  const AgBrConfig c = array(5, 0.4, 2.0, 1.5);
  CHECK(scatterers_passed(c, 0.0) == 0);
  CHECK(scatterers_passed(c, 2.0) == 1);
  CHECK(scatterers_passed(c, 3.49) == 1);
  CHECK(scatterers_passed(c, 3.5) == 2);
  CHECK(scatterers_passed(c, 100.0) == 5);
  CHECK(exact_propagator_delta(c, 4.0) == cplx(std::pow(std::cos(0.4), 2)));
  CHECK_THROWS_AS(exact_propagator_delta(c, -1.0), ArgumentError);
  for (double t : {0.0, 2.0, 4.7, 9.0})
    CHECK(std::abs(exact_propagator_delta(c, t) - brute_force_oracle(c, t, OracleMode::factorized)) < 1e-15);
}

TEST_CASE("full Hilbert oracle against dense diagonalisation") {
  const AgBrConfig c = array(6, 0.7, 1.0, 1.0);
  const Potential sq = Potential::square(0.6);
  const double x0 = 0.25;
  for (double t : {0.0, 1.0, 2.3, 4.1, 9.0}) {
    std::vector<double> alpha;
    for (int n = 1; n <= 6; ++n) alpha.push_back(tipping_angle(c, sq, n, x0, t));
    const cplx dense = dense_amplitude(6, alpha, c.omega * x0);
    CHECK(std::abs(brute_force_oracle(c, t, OracleMode::full_hilbert, sq, x0) - dense) < 1e-12);
    CHECK(std::abs(brute_force_oracle(c, t, OracleMode::factorized, sq, x0) - dense) < 1e-12);
  }
  CHECK_THROWS_AS(brute_force_oracle(array(15, 0.1), 1.0, OracleMode::full_hilbert), ArgumentError);
}

TEST_CASE("tipping angles of finite-width potentials") {
  const AgBrConfig c = array(3, 0.5);
  const Potential sq = Potential::square(0.4);
  CHECK(tipping_angle(c, sq, 1, 0.0, 0.7) == 0.0);
  CHECK(tipping_angle(c, sq, 1, 0.0, 1.0) == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(tipping_angle(c, sq, 1, 0.0, 5.0) == doctest::Approx(0.5).epsilon(1e-13));
  const Potential tri = Potential::custom([](double x) { return std::max(0.0, 1.0 - std::abs(x)); }, 1.0);
  CHECK(tipping_angle(c, tri, 2, 0.0, 10.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(tipping_angle(c, tri, 2, 0.0, 2.0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK_THROWS_AS(Potential::square(0.0), ArgumentError);
}

TEST_CASE("square potential") {
  SUBCASE("product form matches the oracle") {
    const AgBrConfig c = array(7, 0.3);
    for (double t : {0.5, 1.1, 3.0, 6.95, 12.0})
      CHECK(std::abs(square_potential_product(c, 0.3, t) -
                     brute_force_oracle(c, t, OracleMode::factorized, Potential::square(0.3))) < 1e-13);
  }
  SUBCASE("closed form is the macroscopic limit of the product") {
    double prev = 1.0;
    for (int n : {1000, 4000, 16000}) {
      const AgBrConfig c = macroscopic(n, 2.0);
      const double w = 0.5 * c.spacing;
      const double t = c.x1 + 0.37 * c.length();
      const SquareValue v = square_potential_propagator(c, w, t);
      CHECK(v.closed_form);
      const double dev = std::abs(v.value - square_potential_product(c, w, t));
      CHECK(dev < prev);
      prev = dev;
    }
    CHECK(prev < 1e-4);
  }
  CHECK_THROWS_AS(square_potential_propagator(array(5, 0.1), 1.0, 2.0), ArgumentError);
  CHECK_THROWS_AS(square_potential_propagator(array(5, 0.1), 0.0, 2.0), ArgumentError);
}

TEST_CASE("wave-packet propagator") {
  AgBrConfig c = macroscopic(4000, 2.0);
  const double a = c.length() / 40.0;
  c.wave_packet = WavePacket{a, 0.0};
  CHECK(wavepacket_propagator(c, 0.0).regime == Regime::before);
  CHECK(wavepacket_propagator(c, c.x1).regime == Regime::entry);
  CHECK(wavepacket_propagator(c, c.x1 + 0.5 * c.length()).regime == Regime::inside);
  CHECK(wavepacket_propagator(c, c.x_last()).regime == Regime::exit);
  CHECK(wavepacket_propagator(c, c.x_last() + a).regime == Regime::after);
  CHECK(wavepacket_propagator(c, 100.0).value.real() == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(regime_label(Regime::inside) == "inside");

  SUBCASE("finite-N packet converges to the macroscopic formula") {
    double prev = 1.0;
    for (int n : {500, 2000, 8000}) {
      AgBrConfig d = macroscopic(n, 2.0);
      d.wave_packet = WavePacket{d.length() / 40.0, 0.0};
      double dev = 0.0;
      for (int k = 0; k <= 200; ++k) {
        const double t = d.x1 - d.wave_packet->a + (d.length() + 2 * d.wave_packet->a) * k / 200.0;
        dev = std::max(dev, std::abs(wavepacket_propagator(d, t).value - wavepacket_propagator_finite(d, t)));
      }
      CHECK(dev < prev);
      prev = dev;
    }
    CHECK(prev < 1e-3);
  }
  AgBrConfig bare = c;
  bare.wave_packet.reset();
  CHECK_THROWS_AS(wavepacket_propagator(bare, 1.0), ArgumentError);
}

TEST_CASE("diagonal singularity counts") {
  for (int n : {1, 2, 3, 5}) {
    const SingularityCount s = diagonal_singularity_count(array(n, 0.1));
    CHECK(s.enumerated);
    CHECK(s.diagonal_terms == n);
    CHECK(s.max_offdiagonal_terms == (n >= 2 ? 2 : 0));
  }
  const SingularityCount big = diagonal_singularity_count(array(50, 0.1));
  CHECK_FALSE(big.enumerated);
  CHECK(big.diagonal_terms == 50);
}
