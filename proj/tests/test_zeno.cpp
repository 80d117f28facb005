#include <cmath>
#include <numbers>

#include "doctest.h"

#include "decaylab/errors.hpp"
#include "decaylab/zeno.hpp"

using namespace decaylab;

TEST_CASE("neutron closed form") {
  CHECK(neutron_survival_closed_form(1) < 1e-30);
  CHECK(neutron_survival_closed_form(2) == doctest::Approx(0.25).epsilon(1e-15));
  // Large N: 1 - pi^2 / 4N + O(1/N^2).
  const double n = 1e6;
  CHECK(1.0 - neutron_survival_closed_form(1000000) ==
        doctest::Approx(std::numbers::pi * std::numbers::pi / (4 * n)).epsilon(1e-5));
  // m = 1 is the 3 pi pulse.
  const double c = std::cos(3 * std::numbers::pi / 10);
  CHECK(neutron_survival_closed_form(5, 1) == doctest::Approx(std::pow(c * c, 5)).epsilon(1e-14));
  CHECK_THROWS_AS(neutron_survival_closed_form(0), ArgumentError);
}

TEST_CASE("pulsed survival") {
  SUBCASE("neutron model at omega T = pi matches the closed form") {
    const FiniteModel m = neutron_model(1.0);
    for (std::int64_t n : {1, 2, 3, 10, 1000})
      CHECK(pulsed_survival(m, n, std::numbers::pi) ==
            doctest::Approx(neutron_survival_closed_form(n)).epsilon(1e-12));
  }
  SUBCASE("rank-one measurement equals the product form") {
    Eigen::MatrixXcd hp = Eigen::MatrixXcd::Zero(3, 3);
    hp(0, 1) = hp(1, 0) = 0.7;
    hp(0, 2) = cplx(0.2, 0.4);
    hp(2, 0) = std::conj(hp(0, 2));
    hp(1, 2) = hp(2, 1) = 0.3;
    const FiniteModel m({0.0, 0.5, -1.0}, hp, 0);
    const double total = 3.0;
    for (std::int64_t n : {1, 4, 50}) {
      const double single = survival_exact(m, {total / n}).probabilities()[0];
      CHECK(pulsed_survival(m, n, total) == doctest::Approx(std::pow(single, n)).epsilon(1e-12));
    }
  }
  SUBCASE("projector onto a subspace") {
    // Measuring a subspace that contains every coupled level never loses probability.
    const FiniteModel m = neutron_model(2.0);
    CHECK(pulsed_survival(m, 7, 1.0, {0, 1}) == doctest::Approx(1.0).epsilon(1e-13));
  }
  CHECK_THROWS_AS(pulsed_survival(neutron_model(1.0), 0, 1.0), ArgumentError);
}

TEST_CASE("channel density matrices") {
  for (int n : {1, 2, 5, 17}) {
    const double c = std::cos(std::numbers::pi / (2 * n)), s = std::sin(std::numbers::pi / (2 * n));
    const ChannelDensityMatrix obs = channel_matrix(n, true);
    const ChannelDensityMatrix un = channel_matrix(n, false);
    CHECK_NOTHROW(validate_channel_matrix(obs));
    CHECK_NOTHROW(validate_channel_matrix(un));
    CHECK(obs.size() == n + 1);
    CHECK(std::abs(obs.entries(0, 0) - std::pow(c, 2 * n)) < 1e-15);
    CHECK(std::abs(obs.entries(0, 0) - un.entries(0, 0)) < 1e-15);
    CHECK(std::abs(obs.entries.trace() - 1.0) < 1e-13);
    CHECK(std::abs(un.entries.trace() - 1.0) < 1e-13);
    if (n >= 1) CHECK(std::abs(un.entries(0, 1) - cplx(0.0, s * std::pow(c, 2 * n - 1))) < 1e-15);
  }
  const ChannelComparison cmp = dynamical_vs_projective(5);
  CHECK(cmp.observed_deviation < 1e-12);
  CHECK(cmp.unobserved_deviation < 1e-12);
  CHECK(cmp.closed_form == doctest::Approx(neutron_survival_closed_form(5)).epsilon(1e-14));
}

TEST_CASE("uncertainty bound") {
  const UncertaintyParams p{0.0666, 1.0};
  const std::int64_t nh = n_for_half(p);
  CHECK(nh == std::llround(64 * std::numbers::ln2 / (0.0666 * 0.0666)));
  CHECK(n_for_half({1.0, 1.0}) == 44);
  CHECK(std::llabs(n_for_half({2.0, 1.0}) - 11) <= 1);
  // The bounded survival at n_for_half is 2^-4, not 1/2: see the bound formula.
  CHECK(uncertainty_bounded_survival(p, nh) == doctest::Approx(1.0 / 16.0).epsilon(2e-3));
  CHECK(uncertainty_bounded_survival({1e-6, 1.0}, 1000) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(uncertainty_bounded_survival({6.0, 1.0}, 3), DomainError);
  CHECK_THROWS_AS(uncertainty_bounded_survival(p, 0), ArgumentError);
  CHECK(regime_crossover(2.0, 8.0, 10) == doctest::Approx(5.0));
}
