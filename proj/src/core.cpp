#include "decaylab/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "decaylab/errors.hpp"

namespace decaylab {

namespace {

constexpr double kHermTol = 1e-12;

void check_times(const std::vector<double>& times, bool allow_negative) {
  if (times.empty()) throw ArgumentError("time grid is empty");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!std::isfinite(times[k])) throw ArgumentError("time grid contains a non-finite value");
    if (!allow_negative && times[k] < 0.0) throw ArgumentError("times must be non-negative");
    if (k > 0 && times[k] < times[k - 1]) throw ArgumentError("times must be increasing");
  }
}

}  // namespace

FiniteModel::FiniteModel(std::vector<double> h0_diag, Eigen::MatrixXcd h_prime, int initial_index)
    : h0_(std::move(h0_diag)), hp_(std::move(h_prime)), a_(initial_index) {
  const int n = static_cast<int>(h0_.size());
  if (n == 0) throw ArgumentError("FiniteModel: dim must be positive");
  if (hp_.rows() != n || hp_.cols() != n)
    throw ArgumentError("FiniteModel: h_prime must be " + std::to_string(n) + "x" +
                        std::to_string(n));
  if (a_ < 0 || a_ >= n) throw ArgumentError("FiniteModel: initial index out of range");
  for (double e : h0_)
    if (!std::isfinite(e)) throw ArgumentError("FiniteModel: h0_diag has a non-finite entry");
  if (!hp_.allFinite()) throw ArgumentError("FiniteModel: h_prime has a non-finite entry");

  for (int i = 0; i < n; ++i) {
    if (std::abs(hp_(i, i)) > kHermTol)
      throw ArgumentError("FiniteModel: h_prime(" + std::to_string(i) + "," + std::to_string(i) +
                          ") must vanish");
    for (int j = i + 1; j < n; ++j)
      herm_dev_ = std::max(herm_dev_, std::abs(hp_(i, j) - std::conj(hp_(j, i))));
  }
  if (herm_dev_ > kHermTol) throw ArgumentError("FiniteModel: h_prime is not Hermitian");
  const Eigen::MatrixXcd sym = 0.5 * (hp_ + hp_.adjoint());
  hp_ = sym;
  hp_.diagonal().setZero();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hamiltonian());
  if (solver.info() != Eigen::Success)
    throw NumericalError("FiniteModel", "eigendecomposition failed");
  evals_ = solver.eigenvalues();
  evecs_ = solver.eigenvectors();
}

Eigen::MatrixXcd FiniteModel::hamiltonian() const {
  Eigen::MatrixXcd h = hp_;
  for (int i = 0; i < dim(); ++i) h(i, i) += h0_[i];
  return h;
}

bool FiniteModel::restricted_interaction(double tol) const {
  for (int i = 0; i < dim(); ++i)
    for (int j = 0; j < dim(); ++j)
      if (i != a_ && j != a_ && std::abs(hp_(i, j)) > tol) return false;
  return true;
}

std::vector<double> AmplitudeSeries::probabilities() const {
  std::vector<double> p(amplitudes.size());
  std::transform(amplitudes.begin(), amplitudes.end(), p.begin(),
                 [](cplx z) { return std::norm(z); });
  return p;
}

Eigen::VectorXcd evolve_unitary(const FiniteModel& model, const Eigen::VectorXcd& state, double t) {
  if (state.size() != model.dim()) throw ArgumentError("evolve_unitary: state has wrong length");
  if (std::abs(state.norm() - 1.0) > 1e-9)
    throw ArgumentError("evolve_unitary: state must have unit norm");
  if (!std::isfinite(t)) throw ArgumentError("evolve_unitary: t must be finite");
  const auto& v = model.eigenvectors();
  Eigen::VectorXcd c = v.adjoint() * state;
  for (int k = 0; k < c.size(); ++k) c(k) *= std::polar(1.0, -model.eigenvalues()(k) * t);
  Eigen::VectorXcd out = v * c;
  if (std::abs(out.norm() - 1.0) > 1e-9)
    throw NumericalError("evolve_unitary", "norm drift; eigenbasis is not unitary",
                         std::abs(out.norm() - 1.0));
  return out;
}

AmplitudeSeries survival_exact(const FiniteModel& model, const std::vector<double>& times,
                               Picture picture) {
  check_times(times, false);
  const int a = model.initial_index();
  const auto& v = model.eigenvectors();
  const auto& lam = model.eigenvalues();
  Eigen::VectorXd w(model.dim());
  for (int k = 0; k < model.dim(); ++k) w(k) = std::norm(v(a, k));

  AmplitudeSeries out;
  out.picture = picture;
  out.times = times;
  out.amplitudes.reserve(times.size());
  out.errors.assign(times.size(), 0.0);
  for (double t : times) {
    if (t == 0.0) {
      out.amplitudes.emplace_back(1.0, 0.0);
      continue;
    }
    cplx amp = 0.0;
    for (int k = 0; k < model.dim(); ++k) amp += w(k) * std::polar(1.0, -lam(k) * t);
    if (picture == Picture::interaction) amp *= std::polar(1.0, model.e_a() * t);
    out.amplitudes.push_back(amp);
  }
  return out;
}

ShortTimeCoefficients short_time_coefficients(const FiniteModel& model) {
  const Eigen::MatrixXcd h = model.hamiltonian();
  const int a = model.initial_index();
  ShortTimeCoefficients out;
  out.mean_energy = h(a, a).real();
  const double second = h.col(a).squaredNorm();
  out.variance = std::max(0.0, second - out.mean_energy * out.mean_energy);
  if (out.variance >= 1e-14) out.tau_gaussian = 1.0 / std::sqrt(out.variance);
  return out;
}

cplx resolvent_element(const FiniteModel& model, cplx E) {
  const int n = model.dim();
  Eigen::MatrixXcd m = -model.hamiltonian();
  for (int i = 0; i < n; ++i) m(i, i) += E;
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
  rhs(model.initial_index()) = 1.0;
  const Eigen::VectorXcd x = m.partialPivLu().solve(rhs);
  return x(model.initial_index());
}

AmplitudeSeries resolvent_amplitude(const FiniteModel& model, const std::vector<double>& times,
                                    double contour_offset, double tol) {
  check_times(times, true);
  if (!(contour_offset > 0.0)) throw ArgumentError("resolvent_amplitude: contour_offset must be > 0");
  if (!(tol > 0.0)) throw ArgumentError("resolvent_amplitude: tol must be > 0");
  const double eta = contour_offset;
  const Eigen::MatrixXcd h = model.hamiltonian();
  const ShortTimeCoefficients st = short_time_coefficients(model);
  const double mu = st.mean_energy;

  // Gershgorin bounds on the spectrum.
  double lo = mu, hi = mu;
  for (int i = 0; i < model.dim(); ++i) {
    const double r = h.row(i).cwiseAbs().sum() - std::abs(h(i, i));
    lo = std::min(lo, h(i, i).real() - r);
    hi = std::max(hi, h(i, i).real() + r);
  }
  const double spread = std::max(hi - lo, 1e-3);
  const double radius = std::max(hi - mu, mu - lo);
  double t_pos = 0.0;
  for (double t : times) t_pos = std::max(t_pos, t);
  const double growth = std::exp(eta * t_pos);

  // The subtracted pole 1/(E - mu) is transformed exactly; the remainder falls
  // off like variance / E^3, which fixes the window half-width.
  const double x_rel = std::sqrt(growth * std::max(st.variance, 1e-30) /
                                 (2.0 * std::numbers::pi * 0.1 * tol));
  const double half = std::max(x_rel + radius, 10.0 * spread + radius);
  const double a_lo = mu - half, a_hi = mu + half;

  std::vector<double> breaks;
  const double core_lo = lo - spread, core_hi = hi + spread;
  const int core_panels = 8;
  for (int k = 0; k <= core_panels; ++k)
    breaks.push_back(core_lo + (core_hi - core_lo) * k / core_panels);
  for (double d = spread; core_hi + d < a_hi; d *= 2.0) {
    breaks.push_back(core_hi + d);
    breaks.push_back(core_lo - d);
  }
  breaks.push_back(a_lo);
  breaks.push_back(a_hi);

  auto remainder = [&](double x) {
    const cplx E(x, eta);
    return resolvent_element(model, E) - 1.0 / (E - mu);
  };
  const double mesh_tol = 0.1 * tol * 2.0 * std::numbers::pi / growth;
  const auto filon = quad::FilonTransform::build(remainder, breaks, mesh_tol);

  AmplitudeSeries out;
  out.picture = Picture::heisenberg;
  out.times = times;
  for (double t : times) {
    const quad::Estimate est = filon.transform(t);
    const double g = std::exp(eta * t);
    cplx amp = cplx(0.0, 1.0) / (2.0 * std::numbers::pi) * g * est.value;
    if (t >= 0.0) amp += std::polar(1.0, -mu * t);
    const double trunc = g * std::max(st.variance, 0.0) /
                         (2.0 * std::numbers::pi * (half - radius) * (half - radius));
    const double err = g * est.error / (2.0 * std::numbers::pi) + trunc;
    out.amplitudes.push_back(amp);
    out.errors.push_back(err);
  }
  double worst = 0.0;
  for (double e : out.errors) worst = std::max(worst, e);
  if (worst > tol)
    throw NumericalError("resolvent_amplitude", "contour quadrature missed tolerance", worst);
  return out;
}

cplx self_energy_series(const FiniteModel& model, cplx E, int max_order) {
  if (max_order != 2 && max_order != 4)
    throw ArgumentError("self_energy_series: max_order must be 2 or 4");
  const int a = model.initial_index();
  const int n = model.dim();
  const auto& e0 = model.h0_diag();
  const auto& hp = model.h_prime();
  for (int k = 0; k < n; ++k)
    if (k != a && std::abs(E - e0[k]) < 1e-12)
      throw ArgumentError("self_energy_series: E collides with level " + std::to_string(k));
  cplx sigma = 0.0;
  for (int k = 0; k < n; ++k)
    if (k != a) sigma += std::norm(hp(a, k)) / (E - e0[k]);
  if (max_order == 4) {
    for (int k = 0; k < n; ++k) {
      if (k == a) continue;
      for (int kp = 0; kp < n; ++kp) {
        if (kp == a || kp == k) continue;
        const cplx dp = E - e0[kp];
        sigma += std::norm(hp(a, kp)) * std::norm(hp(kp, k)) / ((E - e0[k]) * dp * dp);
      }
    }
  }
  return sigma;
}

FiniteModel two_level_model(double mu_b0, double mu_b) {
  Eigen::MatrixXcd hp = Eigen::MatrixXcd::Zero(2, 2);
  hp(0, 1) = mu_b;
  hp(1, 0) = mu_b;
  return FiniteModel({mu_b0, -mu_b0}, hp, 0);
}

}  // namespace decaylab
