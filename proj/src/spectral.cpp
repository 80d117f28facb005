#include "decaylab/spectral.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "decaylab/errors.hpp"
#include "sigma_rule.hpp"

namespace decaylab {

SpectralModel::SpectralModel(double e_g, double e_a, double lambda, double delta, double e_c,
                             FormFactor form)
    : e_g_(e_g), e_a_(e_a), lambda_(lambda), delta_(delta), e_c_(e_c), form_(form) {
  if (!std::isfinite(e_g) || !std::isfinite(e_a))
    throw ArgumentError("SpectralModel: energies must be finite");
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw ArgumentError("SpectralModel: lambda must be >= 0");
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw ArgumentError("SpectralModel: delta must be > 0");
  if (!(e_c > 0.0) || !std::isfinite(e_c)) throw ArgumentError("SpectralModel: e_c must be > 0");
  cutoff_span_ = e_c * (60.0 + 10.0 * delta);
  rule_ = std::make_shared<const SigmaRule>(lambda, delta, e_c, cutoff_span_);
}

SpectralModel SpectralModel::with_lambda(double lambda) const {
  return SpectralModel(e_g_, e_a_, lambda, delta_, e_c_, form_);
}

double SpectralModel::form_factor(double E) const {
  const double x = E - e_g_;
  if (x <= 0.0) return 0.0;
  return lambda_ * lambda_ * std::pow(x, delta_) * std::exp(-x / e_c_);
}

cplx SpectralModel::form_factor(cplx E) const { return rule_->b(E - e_g_); }

cplx SpectralModel::form_factor_derivative(cplx E, int k) const {
  if (k < 0 || k > 8) throw ArgumentError("form_factor_derivative: order must be in [0, 8]");
  cplx out[9];
  rule_->b_derivatives(E - e_g_, k, out);
  return out[k];
}

SigmaValue self_energy_with_derivative(const SpectralModel& model, cplx E, Sheet sheet,
                                       Approach approach, SigmaMethod method) {
  const cplx z = E - model.e_g();
  if (sheet == Sheet::second) {
    const bool below_axis = z.imag() < 0.0 || (z.imag() == 0.0 && approach == Approach::below);
    if (!below_axis)
      throw ArgumentError("second-sheet self-energy needs Im E < 0 or approach from below");
  }
  SigmaValue out;
  model.rule().first_sheet(z, approach, method == SigmaMethod::adaptive, out.value,
                           out.derivative, true);
  if (sheet == Sheet::second) {
    cplx bz[2];
    model.rule().b_derivatives(z, 1, bz);
    out.value -= 2.0 * std::numbers::pi * cplx(0.0, 1.0) * bz[0];
    out.derivative -= 2.0 * std::numbers::pi * cplx(0.0, 1.0) * bz[1];
  }
  return out;
}

cplx self_energy_continuum(const SpectralModel& model, cplx E, Sheet sheet, Approach approach,
                           SigmaMethod method) {
  const cplx z = E - model.e_g();
  if (sheet == Sheet::second) return self_energy_with_derivative(model, E, sheet, approach, method).value;
  cplx v, d;
  model.rule().first_sheet(z, approach, method == SigmaMethod::adaptive, v, d, false);
  return v;
}

double golden_rule_rate(const SpectralModel& model) {
  if (model.e_a() <= model.e_g())
    throw DomainError("below threshold: no decay channel (e_a <= e_g)");
  return 2.0 * std::numbers::pi * model.form_factor(model.e_a());
}

PoleSolution pole_solve(const SpectralModel& model) {
  if (!(golden_rule_rate(model) > 0.0))
    throw DomainError("pole_solve: golden-rule rate vanishes, no resonance");
  const double ea = model.e_a();
  const cplx s0 = self_energy_continuum(model, ea, Sheet::first, Approach::above);
  cplx z = ea + s0;
  if (z.imag() >= 0.0) throw NumericalError("pole_solve", "initial guess is not below the axis");

  auto residual = [&](cplx e, cplx* deriv) {
    const SigmaValue s = self_energy_with_derivative(model, e, Sheet::second);
    if (deriv) *deriv = 1.0 - s.derivative;
    return e - ea - s.value;
  };
  const double target = 1e-13 * std::max(1.0, std::abs(ea));
  cplx fp;
  cplx f = residual(z, &fp);
  int it = 0;
  for (; it < 100 && std::abs(f) > target; ++it) {
    const cplx step = -f / fp;
    double damp = 1.0;
    bool accepted = false;
    for (int half = 0; half < 40; ++half, damp *= 0.5) {
      const cplx trial = z + damp * step;
      if (trial.imag() >= 0.0) continue;
      cplx tp;
      const cplx tf = residual(trial, &tp);
      if (std::abs(tf) < std::abs(f) || half == 39) {
        z = trial;
        f = tf;
        fp = tp;
        accepted = true;
        break;
      }
    }
    if (!accepted) throw NumericalError("pole_solve", "pole drifted onto the first sheet", std::abs(f));
  }
  if (std::abs(f) > 1e-10)
    throw NumericalError("pole_solve", "Newton iteration did not converge in 100 steps", std::abs(f));
  if (z.imag() >= 0.0) throw NumericalError("pole_solve", "pole drifted onto the first sheet");

  PoleSolution out;
  out.pole = z;
  out.delta_e = z.real() - ea;
  out.gamma = -2.0 * z.imag();
  out.residue_z = 1.0 / fp;
  out.iterations = it;
  out.residual = std::abs(f);
  return out;
}

std::optional<BoundState> bound_state(const SpectralModel& model) {
  const double ea = model.e_a(), eg = model.e_g();
  // F(E) = E - e_a - Sigma(E) increases on (-inf, e_g); Sigma(e_g) = -lambda^2 Gamma(delta) c^delta.
  const double l2 = model.lambda() * model.lambda();
  const double f_top = eg - ea + l2 * std::tgamma(model.delta()) * std::pow(model.e_c(), model.delta());
  if (!(f_top > 0.0) || l2 == 0.0) {
    if (l2 == 0.0 && ea < eg) return BoundState{ea, 1.0};
    return std::nullopt;
  }
  auto f = [&](double e) {
    return e - ea - self_energy_continuum(model, e, Sheet::first).real();
  };
  double lo = std::min(ea, eg) - 1.0, step = 1.0;
  while (f(lo) > 0.0) {
    step *= 2.0;
    lo -= step;
    if (step > 1e12) throw NumericalError("bound_state", "could not bracket the bound state");
  }
  double hi = eg - 1e-12 * std::max(1.0, std::abs(eg));
  if (f(hi) <= 0.0) hi = eg - 1e-300;
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(
      f, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
  const double e = 0.5 * (r.first + r.second);
  const SigmaValue s = self_energy_with_derivative(model, e, Sheet::first);
  return BoundState{e, 1.0 / (1.0 - s.derivative.real())};
}

cplx g_function(const FiniteModel& model, cplx s, double t) {
  if (!(t > 0.0)) throw ArgumentError("g_function: t must be > 0");
  if (!model.restricted_interaction())
    throw ArgumentError("g_function: model couples levels other than the initial one");
  const cplx E = model.e_a() + cplx(0.0, 1.0) * s / t;
  return s + cplx(0.0, 1.0) * t * self_energy_series(model, E, 2);
}

cplx g_function(const SpectralModel& model, cplx s, double t) {
  if (!(t > 0.0)) throw ArgumentError("g_function: t must be > 0");
  const cplx E = model.e_a() + cplx(0.0, 1.0) * s / t;
  if (std::abs(E - model.e_g()) == 0.0)
    throw DomainError("g_function: s collides with the branch point");
  cplx sigma;
  if (s.real() > 0.0) {
    sigma = self_energy_continuum(model, E, Sheet::first);
  } else if (s.real() < 0.0) {
    sigma = self_energy_continuum(model, E, Sheet::second);
  } else {
    const cplx Er(E.real(), 0.0);
    sigma = Er.real() < model.e_g() ? self_energy_continuum(model, Er, Sheet::first)
                                    : self_energy_continuum(model, Er, Sheet::first, Approach::above);
  }
  return s + cplx(0.0, 1.0) * t * sigma;
}

cplx large_t_exponent(const FiniteModel& model) {
  const int a = model.initial_index();
  const double ea = model.e_a();
  cplx sigma = 0.0, dsigma = 0.0;
  for (int n = 0; n < model.dim(); ++n) {
    if (n == a) continue;
    const double v2 = std::norm(model.h_prime()(a, n));
    if (v2 == 0.0) continue;
    const double d = ea - model.h0_diag()[n];
    if (std::abs(d) < 1e-12)
      throw NumericalError("large_t_exponent",
                           "defining integrals do not converge: level " + std::to_string(n) +
                               " is degenerate with the initial level");
    sigma += v2 / d;
    dsigma -= v2 / (d * d);
  }
  const cplx den = 1.0 - dsigma;
  if (std::abs(den) < 1e-10) throw NumericalError("large_t_exponent", "denominator vanishes", std::abs(den));
  return cplx(0.0, 1.0) * sigma / den;
}

cplx large_t_exponent(const SpectralModel& model) {
  const double ea = model.e_a();
  const bool on_cut = ea > model.e_g();
  if (ea == model.e_g()) throw DomainError("large_t_exponent: e_a sits at the branch point");
  const SigmaValue s = self_energy_with_derivative(model, ea, Sheet::first,
                                                   on_cut ? Approach::above : Approach::none);
  const cplx den = 1.0 - s.derivative;
  if (std::abs(den) < 1e-10) throw NumericalError("large_t_exponent", "denominator vanishes", std::abs(den));
  return cplx(0.0, 1.0) * s.value / den;
}

}  // namespace decaylab
