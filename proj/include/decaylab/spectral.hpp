#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "decaylab/core.hpp"

namespace decaylab {

enum class Sheet { first, second };

// Side from which a point on the real axis is approached.
enum class Approach { none, above, below };

enum class FormFactor { power_exp };

class SigmaRule;

// Continuum model with form factor B(E) = lambda^2 (E-e_g)^delta exp(-(E-e_g)/e_c).
class SpectralModel {
 public:
  SpectralModel(double e_g, double e_a, double lambda, double delta, double e_c,
                FormFactor form = FormFactor::power_exp);

  double e_g() const { return e_g_; }
  double e_a() const { return e_a_; }
  double lambda() const { return lambda_; }
  double delta() const { return delta_; }
  double e_c() const { return e_c_; }
  FormFactor form() const { return form_; }
  double e_ag() const { return e_a_ - e_g_; }

  SpectralModel with_lambda(double lambda) const;

  // B on the real axis (zero below threshold).
  double form_factor(double E) const;
  // Analytic continuation of B off the axis, principal branch of (E-e_g)^delta.
  cplx form_factor(cplx E) const;
  // k-th derivative of the continued B.
  cplx form_factor_derivative(cplx E, int k) const;
  // Upper end of the integration range for the continuum.
  double cutoff() const { return e_g_ + cutoff_span_; }

  const SigmaRule& rule() const { return *rule_; }

 private:
  double e_g_, e_a_, lambda_, delta_, e_c_;
  FormFactor form_;
  double cutoff_span_;
  std::shared_ptr<const SigmaRule> rule_;
};

struct SigmaValue {
  cplx value;
  cplx derivative;
};

enum class SigmaMethod { fixed_rule, adaptive };

// Self-energy Sigma(E) = integral of B(E')/(E - E') dE'. On the real axis above
// threshold the side must be given; the second sheet requires Im E < 0, or
// Im E = 0 approached from below.
cplx self_energy_continuum(const SpectralModel& model, cplx E, Sheet sheet,
                           Approach approach = Approach::none,
                           SigmaMethod method = SigmaMethod::fixed_rule);
SigmaValue self_energy_with_derivative(const SpectralModel& model, cplx E, Sheet sheet,
                                       Approach approach = Approach::none,
                                       SigmaMethod method = SigmaMethod::fixed_rule);

double golden_rule_rate(const SpectralModel& model);

struct PoleSolution {
  double delta_e = 0.0;
  double gamma = 0.0;
  cplx residue_z;
  cplx pole;  // E_a + delta_e - i gamma / 2
  int iterations = 0;
  double residual = 0.0;
};

PoleSolution pole_solve(const SpectralModel& model);

// Bound state below threshold, if the model has one.
struct BoundState {
  double energy;
  double weight;
};
std::optional<BoundState> bound_state(const SpectralModel& model);

// Energy density of the initial state, continuous part.
double spectral_density(const SpectralModel& model, double E);

struct DensityReport {
  double raw_mass = 0.0;
  bool renormalized = false;
  bool finite_mean_energy = true;
  double max_reliable_t = 0.0;
  std::vector<std::string> warnings;
};

struct SurvivalOptions {
  double tolerance = 1e-11;  // absolute mesh tolerance on the density
  double reference_energy = 0.0;
  std::vector<double> breakpoints;
};

AmplitudeSeries survival_from_density(const std::function<double(double)>& density, double lower,
                                      double upper, const std::vector<double>& times,
                                      const SurvivalOptions& options,
                                      DensityReport* report = nullptr);

// Direct amplitude of a spectral model from its energy density.
AmplitudeSeries direct_amplitude(const SpectralModel& model, const std::vector<double>& times,
                                 DensityReport* report = nullptr);

enum class CutRoute { discontinuity, u_integral };

AmplitudeSeries branch_cut_amplitude(const SpectralModel& model, const std::vector<double>& times,
                                     CutRoute route = CutRoute::discontinuity);

// The logarithmic integral A_u, equal to Sigma_I(e_g - e_ag u).
cplx log_integral_a(const SpectralModel& model, cplx u);

AmplitudeSeries pole_amplitude(const SpectralModel& model, const PoleSolution& pole,
                               const std::vector<double>& times);

struct Decomposition {
  AmplitudeSeries pole;
  AmplitudeSeries cut;
  AmplitudeSeries direct;
  PoleSolution pole_solution;
  double max_relative_deviation = 0.0;
};

Decomposition decompose_amplitude(const SpectralModel& model, const std::vector<double>& times);

struct TailFit {
  double exponent = 0.0;
  double expected = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  double r_squared = 0.0;
  double prefactor = 0.0;
};

TailFit fit_tail(const SpectralModel& model, double horizon, int points = 60);
// Least squares of ln|a| against ln t over the samples.
TailFit fit_power_law(const std::vector<double>& t, const std::vector<double>& abs_amp);

struct PaleyWienerResult {
  double integral_estimate = 0.0;
  double alpha = 0.0;
  bool divergent_trend = false;
};

PaleyWienerResult paley_wiener_test(const AmplitudeSeries& series, double horizon);
// Same test on precomputed ln|a|, for amplitudes that underflow.
PaleyWienerResult paley_wiener_test_log(const std::vector<double>& times,
                                        const std::vector<double>& log_abs, double horizon);

using AnyModel = std::variant<FiniteModel, SpectralModel>;

cplx g_function(const FiniteModel& model, cplx s, double t);
cplx g_function(const SpectralModel& model, cplx s, double t);

cplx large_t_exponent(const FiniteModel& model);
cplx large_t_exponent(const SpectralModel& model);

enum class CumulantRegime { wide, narrow, full };

cplx cumulant_survival(const SpectralModel& model, double t, int order, CumulantRegime regime);
cplx cumulant_survival(const FiniteModel& model, double t, int order, CumulantRegime regime);

// f2(tau) = <a|H' exp(i(E_a - H0) tau) H'|a>.
cplx f2(const SpectralModel& model, double tau);
cplx f2(const FiniteModel& model, double tau);
cplx f4(const FiniteModel& model, double t1, double t2, double t3);

struct VanHoveRow {
  double lambda = 0.0;
  double max_relative_deviation = 0.0;
  std::vector<double> abs_amplitude;   // |a(tau / lambda^2)|
  std::vector<double> exponential;     // exp(-(Gamma/lambda^2) tau / 2)
  std::vector<double> abs_cut;         // |X_C(tau / lambda^2)|
  double abs_cut_fixed_t = 0.0;        // |X_C(t_ref)|
};

struct VanHoveReport {
  std::vector<double> taus;
  double t_ref = 0.0;
  std::vector<VanHoveRow> rows;
  bool deviation_monotone = false;
};

VanHoveReport van_hove_rescale(const SpectralModel& base, const std::vector<double>& lambdas,
                               const std::vector<double>& taus, double t_ref = 20.0);

}  // namespace decaylab
