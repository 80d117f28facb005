#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "decaylab/core.hpp"

namespace decaylab {

// Survival after N equally spaced projective measurements within total time T.
// The projector is onto span{|k> : k in indices}; by default the initial level.
double pulsed_survival(const FiniteModel& model, std::int64_t n, double total_time,
                       const std::vector<int>& indices = {});

// Spin-1/2 in a transverse field: H = (omega/2) sigma1, initial state up.
FiniteModel neutron_model(double omega);

// (cos^2((2m+1) pi / 2N))^N.
double neutron_survival_closed_form(std::int64_t n, int m = 0);

struct ChannelDensityMatrix {
  Eigen::MatrixXcd entries;
  bool observed = false;
  int size() const { return static_cast<int>(entries.rows()); }
};

ChannelDensityMatrix channel_matrix(int n, bool observed);

// Checks Hermiticity, positivity, unit trace and (when observed) diagonality.
void validate_channel_matrix(const ChannelDensityMatrix& m);

// Largest entrywise distance from the limiting matrix diag(1, 0, ..., 0).
double distance_from_limit(const ChannelDensityMatrix& m);

struct ChannelComparison {
  ChannelDensityMatrix observed;
  ChannelDensityMatrix unobserved;
  double closed_form = 0.0;
  // Largest entrywise deviation of each construction from channel_matrix.
  double observed_deviation = 0.0;
  double unobserved_deviation = 0.0;
};

// Builds both channel matrices by explicit step-by-step evolution.
ChannelComparison dynamical_vs_projective(int n);

struct UncertaintyParams {
  double delta_em;
  double delta_ek;
  double ratio() const { return delta_em / delta_ek; }
};

double uncertainty_bounded_survival(const UncertaintyParams& params, std::int64_t n);
std::int64_t n_for_half(const UncertaintyParams& params);
double regime_crossover(double tau_g, double tau_e, std::int64_t n);

}  // namespace decaylab
