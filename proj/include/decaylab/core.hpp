#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "decaylab/quadrature.hpp"

namespace decaylab {

enum class Picture { interaction, heisenberg };

// H = diag(h0) + H' with a designated initial level a. H' is Hermitian with a
// vanishing diagonal; it is symmetrized once on construction.
class FiniteModel {
 public:
  FiniteModel(std::vector<double> h0_diag, Eigen::MatrixXcd h_prime, int initial_index);

  int dim() const { return static_cast<int>(h0_.size()); }
  int initial_index() const { return a_; }
  const std::vector<double>& h0_diag() const { return h0_; }
  const Eigen::MatrixXcd& h_prime() const { return hp_; }
  double e_a() const { return h0_[a_]; }
  Eigen::MatrixXcd hamiltonian() const;
  // Largest |H' - H'^dagger| entry seen before symmetrization.
  double hermiticity_deviation() const { return herm_dev_; }

  const Eigen::VectorXd& eigenvalues() const { return evals_; }
  const Eigen::MatrixXcd& eigenvectors() const { return evecs_; }

  // True when H' couples a to the other levels only.
  bool restricted_interaction(double tol = 1e-14) const;

 private:
  std::vector<double> h0_;
  Eigen::MatrixXcd hp_;
  int a_;
  double herm_dev_ = 0.0;
  Eigen::VectorXd evals_;
  Eigen::MatrixXcd evecs_;
};

struct AmplitudeSeries {
  std::vector<double> times;
  std::vector<cplx> amplitudes;
  std::vector<double> errors;  // per-point error estimate, zero when exact
  Picture picture = Picture::interaction;

  std::vector<double> probabilities() const;
  std::size_t size() const { return times.size(); }
};

struct ShortTimeCoefficients {
  double mean_energy = 0.0;
  double variance = 0.0;
  // Empty when |a> is an eigenstate of H (no Gaussian region).
  std::optional<double> tau_gaussian;
  bool eigenstate() const { return !tau_gaussian.has_value(); }
};

Eigen::VectorXcd evolve_unitary(const FiniteModel& model, const Eigen::VectorXcd& state, double t);

AmplitudeSeries survival_exact(const FiniteModel& model, const std::vector<double>& times,
                               Picture picture = Picture::interaction);

ShortTimeCoefficients short_time_coefficients(const FiniteModel& model);

// Heisenberg-picture amplitude from the contour integral of <a|(E-H)^-1|a>
// along Im E = contour_offset. Negative times are allowed.
AmplitudeSeries resolvent_amplitude(const FiniteModel& model, const std::vector<double>& times,
                                    double contour_offset, double tol = 1e-8);

// <a|(E-H)^-1|a> by a direct linear solve.
cplx resolvent_element(const FiniteModel& model, cplx E);

// Second (and optionally fourth) order self-energy of level a.
cplx self_energy_series(const FiniteModel& model, cplx E, int max_order);

// Two-level model H0 = mu_b0 sigma3, H' = mu_b sigma1, initial level "up".
FiniteModel two_level_model(double mu_b0, double mu_b);

}  // namespace decaylab
