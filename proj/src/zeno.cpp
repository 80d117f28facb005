#include "decaylab/zeno.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "decaylab/errors.hpp"

namespace decaylab {

namespace {

void check_params(const UncertaintyParams& p) {
  if (!(p.delta_em > 0.0) || !(p.delta_ek > 0.0) || !std::isfinite(p.delta_em) ||
      !std::isfinite(p.delta_ek))
    throw ArgumentError("UncertaintyParams: energies must be positive");
}

}  // namespace

double pulsed_survival(const FiniteModel& model, std::int64_t n, double total_time,
                       const std::vector<int>& indices) {
  if (n < 1) throw ArgumentError("pulsed_survival: N must be >= 1");
  if (!(total_time > 0.0) || !std::isfinite(total_time))
    throw ArgumentError("pulsed_survival: T must be > 0");
  std::vector<int> idx = indices.empty() ? std::vector<int>{model.initial_index()} : indices;
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  for (int k : idx)
    if (k < 0 || k >= model.dim()) throw ArgumentError("pulsed_survival: index out of range");
  if (!std::binary_search(idx.begin(), idx.end(), model.initial_index()))
    throw ArgumentError("pulsed_survival: projector must contain the initial level");

  // O U(T/N) O restricted to the measured subspace.
  const double tau = total_time / static_cast<double>(n);
  const auto& v = model.eigenvectors();
  const auto& lam = model.eigenvalues();
  Eigen::VectorXcd phase(model.dim());
  for (int k = 0; k < model.dim(); ++k) phase(k) = std::polar(1.0, -lam(k) * tau);
  const Eigen::MatrixXcd u = v * phase.asDiagonal() * v.adjoint();
  const int m = static_cast<int>(idx.size());
  Eigen::MatrixXcd block(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) block(i, j) = u(idx[i], idx[j]);

  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(m);
  psi(std::lower_bound(idx.begin(), idx.end(), model.initial_index()) - idx.begin()) = 1.0;
  // Renormalise as we go and keep the log of the norm to avoid underflow.
  double log_norm = 0.0;
  for (std::int64_t step = 0; step < n; ++step) {
    psi = block * psi;
    const double nrm = psi.norm();
    if (nrm == 0.0) return 0.0;
    psi /= nrm;
    log_norm += 2.0 * std::log(nrm);
  }
  return std::exp(log_norm);
}

FiniteModel neutron_model(double omega) {
  if (!std::isfinite(omega)) throw ArgumentError("neutron_model: omega must be finite");
  Eigen::MatrixXcd hp = Eigen::MatrixXcd::Zero(2, 2);
  hp(0, 1) = 0.5 * omega;
  hp(1, 0) = 0.5 * omega;
  return FiniteModel({0.0, 0.0}, hp, 0);
}

double neutron_survival_closed_form(std::int64_t n, int m) {
  if (n < 1) throw ArgumentError("neutron_survival_closed_form: N must be >= 1");
  if (m < 0) throw ArgumentError("neutron_survival_closed_form: m must be >= 0");
  const double x = (2 * m + 1) * std::numbers::pi / (2.0 * static_cast<double>(n));
  const double c = std::cos(x);
  if (std::abs(c) < 1e-300) return 0.0;
  if (n == 1) return c * c;
  const double s = std::sin(x);
  return std::exp(static_cast<double>(n) * std::log1p(-s * s));
}

ChannelDensityMatrix channel_matrix(int n, bool observed) {
  if (n < 1) throw ArgumentError("channel_matrix: N must be >= 1");
  const double x = std::numbers::pi / (2.0 * n);
  const double c = std::cos(x), s = std::sin(x);
  ChannelDensityMatrix out;
  out.observed = observed;
  out.entries = Eigen::MatrixXcd::Zero(n + 1, n + 1);
  auto cp = [&](int k) { return std::pow(c, k); };
  if (observed) {
    out.entries(0, 0) = cp(2 * n);
    for (int j = 1; j <= n; ++j) out.entries(j, j) = s * s * cp(2 * n - 2 * j);
    return out;
  }
  out.entries(0, 0) = cp(2 * n);
  const cplx i(0.0, 1.0);
  for (int j = 1; j <= n; ++j) {
    out.entries(0, j) = i * s * cp(2 * n - j);
    out.entries(j, 0) = -i * s * cp(2 * n - j);
    for (int k = 1; k <= n; ++k) out.entries(j, k) = s * s * cp(2 * n - j - k);
  }
  return out;
}

void validate_channel_matrix(const ChannelDensityMatrix& m) {
  const auto& e = m.entries;
  if ((e - e.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw NumericalError("validate_channel_matrix", "matrix is not Hermitian");
  if (std::abs(e.trace() - 1.0) > 1e-10)
    throw NumericalError("validate_channel_matrix", "trace differs from 1",
                         std::abs(e.trace() - 1.0));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(e, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -1e-10)
    throw NumericalError("validate_channel_matrix", "matrix is not positive semidefinite",
                         -solver.eigenvalues().minCoeff());
  if (m.observed) {
    for (int i = 0; i < e.rows(); ++i)
      for (int j = 0; j < e.cols(); ++j)
        if (i != j && std::abs(e(i, j)) >= 1e-12)
          throw NumericalError("validate_channel_matrix", "observed matrix has coherences");
  }
}

double distance_from_limit(const ChannelDensityMatrix& m) {
  Eigen::MatrixXcd lim = Eigen::MatrixXcd::Zero(m.size(), m.size());
  lim(0, 0) = 1.0;
  return (m.entries - lim).cwiseAbs().maxCoeff();
}

ChannelComparison dynamical_vs_projective(int n) {
  if (n < 1) throw ArgumentError("dynamical_vs_projective: N must be >= 1");
  const int dim = n + 1;
  const double x = std::numbers::pi / (2.0 * n);
  const double c = std::cos(x), s = std::sin(x);
  const cplx i(0.0, 1.0);

  // Step k rotates the surviving channel 0 into matrix index n - k + 1.
  auto step = [&](int k) {
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
    const int ch = n - k + 1;
    u(0, 0) = c;
    u(ch, ch) = c;
    u(ch, 0) = -i * s;
    u(0, ch) = -i * s;
    return u;
  };

  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  psi(0) = 1.0;
  Eigen::MatrixXcd rho_obs = psi * psi.adjoint();
  for (int k = 1; k <= n; ++k) {
    const Eigen::MatrixXcd u = step(k);
    psi = u * psi;
    rho_obs = u * rho_obs * u.adjoint();
    // Detection after every step removes coherences between channels.
    const Eigen::VectorXcd diag = rho_obs.diagonal();
    rho_obs = diag.asDiagonal();
  }

  ChannelComparison out;
  out.unobserved.entries = psi * psi.adjoint();
  out.unobserved.observed = false;
  out.observed.entries = rho_obs;
  out.observed.observed = true;
  out.closed_form = neutron_survival_closed_form(n);
  out.observed_deviation =
      (out.observed.entries - channel_matrix(n, true).entries).cwiseAbs().maxCoeff();
  out.unobserved_deviation =
      (out.unobserved.entries - channel_matrix(n, false).entries).cwiseAbs().maxCoeff();
  const double d0 = std::max(std::abs(out.observed.entries(0, 0) - out.closed_form),
                             std::abs(out.unobserved.entries(0, 0) - out.closed_form));
  if (d0 > 1e-12)
    throw NumericalError("dynamical_vs_projective", "(0,0) entry disagrees with closed form", d0);
  return out;
}

double uncertainty_bounded_survival(const UncertaintyParams& params, std::int64_t n) {
  check_params(params);
  if (n < 1) throw ArgumentError("uncertainty_bounded_survival: N must be >= 1");
  const double r = params.ratio();
  const double bracket = r * r / 32.0;
  if (bracket >= 1.0)
    throw DomainError("bound formula outside small-angle regime (ratio >= sqrt(32))");
  return std::exp(2.0 * static_cast<double>(n) * std::log1p(-bracket));
}

std::int64_t n_for_half(const UncertaintyParams& params) {
  check_params(params);
  const double r = params.ratio();
  return std::llround(64.0 * std::numbers::ln2 / (r * r));
}

double regime_crossover(double tau_g, double tau_e, std::int64_t n) {
  if (!(tau_g > 0.0) || !(tau_e > 0.0) || n < 1)
    throw ArgumentError("regime_crossover: arguments must be positive");
  return static_cast<double>(n) * tau_g * tau_g / tau_e;
}

}  // namespace decaylab
