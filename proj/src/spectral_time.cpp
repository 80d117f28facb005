#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "decaylab/errors.hpp"
#include "decaylab/spectral.hpp"
#include "sigma_rule.hpp"

namespace decaylab {

namespace {

constexpr cplx kI(0.0, 1.0);
constexpr double kPi = std::numbers::pi;

void check_positive_times(const std::vector<double>& times, const char* op) {
  if (times.empty()) throw ArgumentError(std::string(op) + ": time grid is empty");
  for (double t : times)
    if (!(t > 0.0) || !std::isfinite(t))
      throw ArgumentError(std::string(op) + ": times must be strictly positive");
}

void check_nonnegative_times(const std::vector<double>& times, const char* op) {
  if (times.empty()) throw ArgumentError(std::string(op) + ": time grid is empty");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] >= 0.0) || !std::isfinite(times[k]))
      throw ArgumentError(std::string(op) + ": times must be non-negative");
    if (k > 0 && times[k] < times[k - 1])
      throw ArgumentError(std::string(op) + ": times must be increasing");
  }
}

struct DensityMesh {
  quad::FilonTransform filon;
  double scale = 1.0;
};

// Checks normalisation and the first-moment guard; returns the factor applied.
// A lower end at a spectral threshold is exact and does not enter the guard.
double normalise(const quad::FilonTransform& f, double discrete_mass, double center,
                 bool lower_is_threshold, DensityReport* report) {
  const double mass = f.mass().real() + discrete_mass;
  double factor = 1.0;
  DensityReport local;
  local.raw_mass = mass;
  const double dev = std::abs(mass - 1.0);
  if (dev > 1e-2 || !(mass > 0.0))
    throw ArgumentError("density is not normalised: integral = " + std::to_string(mass));
  if (dev > 1e-6) {
    factor = 1.0 / mass;
    local.renormalized = true;
    local.warnings.push_back("density renormalised from mass " + std::to_string(mass));
  }
  const double total = f.abs_moment(center);
  const double outer = f.outer_abs_moment(center, 0.05, !lower_is_threshold, true);
  local.finite_mean_energy = !(total > 0.0) || outer <= 1e-3 * total;
  if (!local.finite_mean_energy)
    local.warnings.push_back("mean energy not converged on the mesh; zero-slope check suspended");
  if (report) *report = local;
  return factor;
}

void fill_reliability(const AmplitudeSeries& s, DensityReport* report) {
  if (!report) return;
  report->max_reliable_t = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k)
    if (std::abs(s.amplitudes[k]) > 100.0 * s.errors[k]) report->max_reliable_t = s.times[k];
}

}  // namespace

double spectral_density(const SpectralModel& model, double E) {
  const double z = E - model.e_g();
  if (z <= 0.0 || z >= model.rule().span()) return 0.0;
  const double b = model.form_factor(E);
  if (b == 0.0) return 0.0;
  const double p = self_energy_continuum(model, E, Sheet::first, Approach::above).real();
  const double d = E - model.e_a() - p;
  return b / (d * d + kPi * kPi * b * b);
}

AmplitudeSeries survival_from_density(const std::function<double(double)>& density, double lower,
                                      double upper, const std::vector<double>& times,
                                      const SurvivalOptions& options, DensityReport* report) {
  check_nonnegative_times(times, "survival_from_density");
  if (!(upper > lower)) throw ArgumentError("survival_from_density: empty support");
  std::vector<double> breaks = {lower, upper};
  for (double b : options.breakpoints)
    if (b > lower && b < upper) breaks.push_back(b);
  auto w = [&](double e) -> cplx {
    const double v = density(e);
    if (v < 0.0) throw ArgumentError("survival_from_density: density is negative");
    return v;
  };
  auto filon = quad::FilonTransform::build(w, breaks, options.tolerance);
  const double factor = normalise(filon, 0.0, options.reference_energy, false, report);
  filon.scale(factor);
  AmplitudeSeries out;
  out.times = times;
  for (double t : times) {
    if (t == 0.0) {
      out.amplitudes.emplace_back(1.0, 0.0);
      out.errors.push_back(0.0);
      continue;
    }
    const quad::Estimate e = filon.transform(t);
    out.amplitudes.push_back(e.value * std::polar(1.0, options.reference_energy * t));
    out.errors.push_back(e.error);
  }
  fill_reliability(out, report);
  return out;
}

AmplitudeSeries direct_amplitude(const SpectralModel& model, const std::vector<double>& times,
                                 DensityReport* report) {
  check_nonnegative_times(times, "direct_amplitude");
  AmplitudeSeries out;
  out.times = times;
  if (model.lambda() == 0.0) {
    out.amplitudes.assign(times.size(), cplx(1.0, 0.0));
    out.errors.assign(times.size(), 0.0);
    if (report) *report = DensityReport{1.0, false, true, times.back(), {}};
    return out;
  }
  const double eg = model.e_g(), c = model.e_c();
  const double top = eg + model.rule().span();
  std::vector<double> breaks = {eg, top};
  for (int j = 1; j <= 12; ++j) breaks.push_back(eg + c * std::pow(4.0, -j));
  for (double f : {0.25, 1.0, 5.0, 20.0}) breaks.push_back(eg + f * c);
  if (model.e_a() > eg && model.form_factor(model.e_a()) > 0.0) {
    double center = model.e_a(), width = golden_rule_rate(model);
    try {
      const PoleSolution p = pole_solve(model);
      center = p.pole.real();
      width = p.gamma;
    } catch (const NumericalError&) {
    }
    breaks.push_back(center);
    for (double k : {0.25, 1.0, 4.0, 16.0, 64.0, 256.0}) {
      breaks.push_back(center - k * width);
      breaks.push_back(center + k * width);
    }
  }
  std::vector<double> inside;
  for (double b : breaks)
    if (b >= eg && b <= top) inside.push_back(b);
  auto w = [&](double e) -> cplx { return spectral_density(model, e); };
  auto filon = quad::FilonTransform::build(w, inside, 1e-12);
  const auto bound = bound_state(model);
  const double discrete = bound ? bound->weight : 0.0;
  const double factor = normalise(filon, discrete, model.e_a(), true, report);
  filon.scale(factor);
  for (double t : times) {
    if (t == 0.0) {
      out.amplitudes.emplace_back(1.0, 0.0);
      out.errors.push_back(0.0);
      continue;
    }
    const quad::Estimate e = filon.transform(t);
    cplx amp = e.value;
    if (bound) amp += factor * bound->weight * std::polar(1.0, -bound->energy * t);
    out.amplitudes.push_back(amp * std::polar(1.0, model.e_a() * t));
    out.errors.push_back(e.error);
  }
  fill_reliability(out, report);
  return out;
}

AmplitudeSeries pole_amplitude(const SpectralModel& model, const PoleSolution& pole,
                               const std::vector<double>& times) {
  AmplitudeSeries out;
  out.times = times;
  for (double t : times) {
    out.amplitudes.push_back(pole.residue_z * std::exp(-kI * (pole.pole - model.e_a()) * t));
    out.errors.push_back(0.0);
  }
  return out;
}

cplx log_integral_a(const SpectralModel& model, cplx u) {
  const double l2 = model.lambda() * model.lambda(), d = model.delta(), c = model.e_c();
  const cplx shift = model.e_ag() * u;
  auto f = [&](double x) -> cplx {
    if (x <= 0.0) return 0.0;
    const double db = l2 * std::exp(-x / c) * std::pow(x, d - 1.0) * (d - x / c);
    return std::log(x + shift) * db;
  };
  const double span = model.rule().span();
  std::vector<double> cuts = {0.0, span};
  for (double p : {std::abs(shift), c, 5.0 * c})
    if (p > 0.0 && p < span) cuts.push_back(p);
  std::sort(cuts.begin(), cuts.end());
  cplx acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    acc += quad::tanh_sinh(f, cuts[i], cuts[i + 1], 1e-12).value;
  return acc;
}

namespace {

// Discontinuity integral along the tilted ray e_g + y w below the cut.
cplx cut_discontinuity(const SpectralModel& model, double t, double* err) {
  const cplx w = std::polar(1.0, -kPi / 4.0);
  const double eg = model.e_g(), ea = model.e_a();
  auto integrand = [&](double v) -> cplx {
    if (v <= 0.0) return 0.0;
    const double y = v / t;
    const cplx E = eg + y * w;
    const cplx z = y * w;
    cplx s1, ds;
    model.rule().first_sheet(z, Approach::none, false, s1, ds, false);
    const cplx b = model.rule().b(z);
    const cplx s2 = s1 - 2.0 * kPi * kI * b;
    const cplx d1 = E - ea - s1, d2 = E - ea - s2;
    return -2.0 * kPi * kI * b / (d1 * d2) * std::exp(-kI * w * v);
  };
  const quad::Estimate e = quad::exp_sinh(integrand, 0.0, 1e-10);
  const cplx pref = kI * w / (2.0 * kPi) * std::polar(1.0, model.e_ag() * t) / t;
  if (err) *err = std::abs(pref) * e.error;
  return pref * e.value;
}

// The u-integral with u along exp(i pi/4), using A_u from the logarithmic integral.
cplx cut_u_integral(const SpectralModel& model, double t, double* err) {
  const double eag = model.e_ag();
  const cplx dir = std::polar(1.0, kPi / 4.0);
  auto integrand = [&](double v) -> cplx {
    if (v <= 0.0) return 0.0;
    const cplx u = v / (t * eag) * dir;
    const cplx bu = model.rule().b(eag * u);
    const cplx au = log_integral_a(model, u);
    const cplx d1 = eag * (1.0 + u) + au;
    const cplx d2 = d1 - 2.0 * kPi * kI * bu;
    return bu * std::exp(kI * t * eag * u) / (d1 * d2);
  };
  const quad::Estimate e = quad::exp_sinh(integrand, 0.0, 1e-9);
  const cplx pref = -eag * std::polar(1.0, eag * t) * dir / (t * eag);
  if (err) *err = std::abs(pref) * e.error;
  return pref * e.value;
}

}  // namespace

AmplitudeSeries branch_cut_amplitude(const SpectralModel& model, const std::vector<double>& times,
                                     CutRoute route) {
  check_positive_times(times, "branch_cut_amplitude");
  if (model.e_a() <= model.e_g())
    throw DomainError("branch_cut_amplitude: e_a must lie above the threshold");
  AmplitudeSeries out;
  out.times = times;
  for (double t : times) {
    double err = 0.0;
    cplx v = 0.0;
    if (model.lambda() > 0.0)
      v = route == CutRoute::discontinuity ? cut_discontinuity(model, t, &err)
                                           : cut_u_integral(model, t, &err);
    out.amplitudes.push_back(v);
    out.errors.push_back(err);
  }
  return out;
}

Decomposition decompose_amplitude(const SpectralModel& model, const std::vector<double>& times) {
  check_positive_times(times, "decompose_amplitude");
  Decomposition d;
  d.pole_solution = pole_solve(model);
  d.pole = pole_amplitude(model, d.pole_solution, times);
  d.cut = branch_cut_amplitude(model, times);
  d.direct = direct_amplitude(model, times);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const cplx sum = d.pole.amplitudes[k] + d.cut.amplitudes[k];
    const double rel = std::abs(d.direct.amplitudes[k] - sum) / std::abs(d.direct.amplitudes[k]);
    d.max_relative_deviation = std::max(d.max_relative_deviation, rel);
  }
  return d;
}

TailFit fit_power_law(const std::vector<double>& t, const std::vector<double>& abs_amp) {
  if (t.size() != abs_amp.size() || t.size() < 3)
    throw ArgumentError("fit_power_law: need at least three matching samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const double n = static_cast<double>(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!(t[k] > 0.0) || !(abs_amp[k] > 0.0))
      throw ArgumentError("fit_power_law: samples must be positive");
    const double x = std::log(t[k]), y = std::log(abs_amp[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double cov = sxy - sx * sy / n, vx = sxx - sx * sx / n, vy = syy - sy * sy / n;
  TailFit f;
  const double slope = cov / vx;
  f.exponent = -slope;
  f.prefactor = std::exp((sy - slope * sx) / n);
  f.r_squared = vy > 0.0 ? cov * cov / (vx * vy) : 1.0;
  f.window_lo = *std::min_element(t.begin(), t.end());
  f.window_hi = *std::max_element(t.begin(), t.end());
  return f;
}

TailFit fit_tail(const SpectralModel& model, double horizon, int points) {
  if (points < 3) throw ArgumentError("fit_tail: need at least three points");
  const PoleSolution p = pole_solve(model);
  const double lo = std::max(5.0 / p.gamma, 10.0 / model.e_ag());
  if (!(horizon > lo))
    throw ArgumentError("fit_tail: horizon must exceed the window start " + std::to_string(lo));
  std::vector<double> ts(points);
  for (int k = 0; k < points; ++k)
    ts[k] = lo * std::pow(horizon / lo, static_cast<double>(k) / (points - 1));
  const AmplitudeSeries cut = branch_cut_amplitude(model, ts);
  std::vector<double> mags(points);
  for (int k = 0; k < points; ++k) mags[k] = std::abs(cut.amplitudes[k]);
  TailFit f = fit_power_law(ts, mags);
  f.expected = 1.0 + model.delta();
  return f;
}

PaleyWienerResult paley_wiener_test_log(const std::vector<double>& times,
                                        const std::vector<double>& log_abs, double horizon) {
  if (times.size() != log_abs.size() || times.size() < 2)
    throw ArgumentError("paley_wiener_test: series too short");
  if (times.back() < horizon * (1.0 - 1e-12))
    throw ArgumentError("paley_wiener_test: series does not reach the horizon");
  PaleyWienerResult r;
  std::vector<double> x, y;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!std::isfinite(log_abs[k]))
      throw ArgumentError("paley_wiener_test: amplitude vanishes at t = " + std::to_string(times[k]));
    if (times[k] > horizon) break;
    if (k > 0) {
      const double f0 = std::abs(log_abs[k - 1]) / (1.0 + times[k - 1] * times[k - 1]);
      const double f1 = std::abs(log_abs[k]) / (1.0 + times[k] * times[k]);
      r.integral_estimate += 0.5 * (times[k] - times[k - 1]) * (f0 + f1);
    }
    if (times[k] >= 0.1 * horizon && times[k] > 0.0 && std::abs(log_abs[k]) > 0.0) {
      x.push_back(times[k]);
      y.push_back(std::abs(log_abs[k]));
    }
  }
  if (x.size() >= 3) {
    const TailFit f = fit_power_law(x, y);
    r.alpha = -f.exponent;
  }
  r.divergent_trend = r.alpha >= 1.0 - 0.01;
  return r;
}

PaleyWienerResult paley_wiener_test(const AmplitudeSeries& series, double horizon) {
  std::vector<double> la(series.size());
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double a = std::abs(series.amplitudes[k]);
    if (a == 0.0)
      throw ArgumentError("paley_wiener_test: amplitude vanishes at t = " +
                          std::to_string(series.times[k]));
    la[k] = std::log(a);
  }
  return paley_wiener_test_log(series.times, la, horizon);
}

cplx f2(const SpectralModel& model, double tau) {
  const double l2 = model.lambda() * model.lambda(), d = model.delta();
  return l2 * std::tgamma(1.0 + d) * std::polar(1.0, model.e_ag() * tau) *
         std::pow(cplx(1.0 / model.e_c(), tau), -(1.0 + d));
}

cplx f2(const FiniteModel& model, double tau) {
  const int a = model.initial_index();
  cplx acc = 0.0;
  for (int n = 0; n < model.dim(); ++n)
    if (n != a)
      acc += std::norm(model.h_prime()(a, n)) *
             std::polar(1.0, (model.e_a() - model.h0_diag()[n]) * tau);
  return acc;
}

cplx f4(const FiniteModel& model, double t1, double t2, double t3) {
  const int a = model.initial_index();
  const auto& hp = model.h_prime();
  const auto& e = model.h0_diag();
  cplx acc = 0.0;
  for (int np = 0; np < model.dim(); ++np) {
    if (np == a) continue;
    const double vp = std::norm(hp(a, np));
    if (vp == 0.0) continue;
    for (int n = 0; n < model.dim(); ++n) {
      if (n == a || n == np) continue;
      const double vn = std::norm(hp(np, n));
      if (vn == 0.0) continue;
      acc += vp * vn * std::polar(1.0, (e[a] - e[np]) * (t1 + t3) + (e[a] - e[n]) * t2);
    }
  }
  return acc;
}

namespace {

void check_cumulant(double t, int order) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw ArgumentError("cumulant_survival: t must be >= 0");
  if (order != 2 && order != 4) throw ArgumentError("cumulant_survival: order must be 2 or 4");
}

// Integral of (t - tau) f(tau) over [0, t] on panels short against the oscillation.
cplx weighted_f2_integral(const std::function<cplx(double)>& f, double t, double freq) {
  const double panel = std::min(1.0, 2.0 * kPi / std::max(freq, 1e-12));
  const int n = std::max(1, static_cast<int>(std::ceil(t / panel)));
  cplx acc = 0.0;
  for (int k = 0; k < n; ++k) {
    const double lo = t * k / n, hi = t * (k + 1) / n;
    acc += quad::gauss_kronrod([&](double x) { return (t - x) * f(x); }, lo, hi, 1e-13).value;
  }
  return acc;
}

}  // namespace

cplx cumulant_survival(const SpectralModel& model, double t, int order, CumulantRegime regime) {
  check_cumulant(t, order);
  // The restricted interaction has no proper fourth-order element, so order 4
  // coincides with order 2.
  auto f = [&](double tau) { return f2(model, tau); };
  switch (regime) {
    case CumulantRegime::narrow:
      return std::exp(-0.5 * f2(model, 0.0) * t * t);
    case CumulantRegime::wide: {
      const cplx head = quad::gauss_kronrod(f, 0.0, 1.0, 1e-13).value;
      auto rotated = [&](double s) -> cplx {
        const double l2 = model.lambda() * model.lambda(), d = model.delta();
        const cplx tau(1.0, s);
        return kI * l2 * std::tgamma(1.0 + d) * std::exp(kI * model.e_ag() * tau) *
               std::pow(1.0 / model.e_c() + kI * tau, -(1.0 + d));
      };
      const cplx tail = quad::exp_sinh(rotated, 0.0, 1e-12).value;
      return std::exp(-t * (head + tail));
    }
    case CumulantRegime::full:
      return std::exp(-weighted_f2_integral(f, t, std::abs(model.e_ag()) + 1.0));
  }
  return 0.0;
}

cplx cumulant_survival(const FiniteModel& model, double t, int order, CumulantRegime regime) {
  check_cumulant(t, order);
  const int a = model.initial_index();
  const auto& hp = model.h_prime();
  const auto& e = model.h0_diag();
  switch (regime) {
    case CumulantRegime::narrow: {
      cplx expo = -0.5 * f2(model, 0.0) * t * t;
      if (order == 4) expo += f4(model, 0.0, 0.0, 0.0) * std::pow(t, 4) / 24.0;
      return std::exp(expo);
    }
    case CumulantRegime::wide:
      throw NumericalError("cumulant_survival",
                           "wide-band integrals do not converge for a discrete spectrum");
    case CumulantRegime::full: {
      // Order 2 in closed form: integral of (t - tau) exp(i w tau).
      cplx expo = 0.0;
      for (int n = 0; n < model.dim(); ++n) {
        if (n == a) continue;
        const double w = e[a] - e[n];
        const double x = w * t;
        cplx k;
        if (std::abs(x) < 1e-3)
          k = t * t * (0.5 + kI * x / 6.0 - x * x / 24.0);
        else
          k = (1.0 - std::exp(kI * x) + kI * x) / (w * w);
        expo -= std::norm(hp(a, n)) * k;
      }
      if (order == 4) {
        // Collapsed Gauss-Legendre product rule on the simplex.
        const auto& gx = quad::gl_nodes();
        const auto& gw = quad::gl_weights();
        cplx acc = 0.0;
        for (int i = 0; i < quad::kPanelOrder; ++i) {
          const double t1 = 0.5 * t * (1.0 + gx[i]);
          const double r1 = t - t1;
          for (int j = 0; j < quad::kPanelOrder; ++j) {
            const double t2 = 0.5 * r1 * (1.0 + gx[j]);
            const double r2 = r1 - t2;
            for (int k = 0; k < quad::kPanelOrder; ++k) {
              const double t3 = 0.5 * r2 * (1.0 + gx[k]);
              const double wgt = gw[i] * gw[j] * gw[k] * 0.125 * t * r1 * r2;
              acc += wgt * (r2 - t3) * f4(model, t1, t2, t3);
            }
          }
        }
        expo += acc;
      }
      return std::exp(expo);
    }
  }
  return 0.0;
}

VanHoveReport van_hove_rescale(const SpectralModel& base, const std::vector<double>& lambdas,
                               const std::vector<double>& taus, double t_ref) {
  if (lambdas.empty() || taus.empty()) throw ArgumentError("van_hove_rescale: empty grid");
  VanHoveReport rep;
  rep.taus = taus;
  rep.t_ref = t_ref;
  for (double lam : lambdas) {
    if (!(lam > 0.0)) throw ArgumentError("van_hove_rescale: lambda must be > 0");
    const SpectralModel m = base.with_lambda(lam);
    VanHoveRow row;
    row.lambda = lam;
    const double rate = golden_rule_rate(m) / (lam * lam);
    std::vector<double> ts;
    for (double tau : taus) ts.push_back(tau / (lam * lam));
    std::vector<double> sorted = ts;
    std::sort(sorted.begin(), sorted.end());
    const AmplitudeSeries direct = direct_amplitude(m, sorted);
    std::vector<double> positive;
    for (double t : ts)
      if (t > 0.0) positive.push_back(t);
    AmplitudeSeries cut;
    if (!positive.empty()) cut = branch_cut_amplitude(m, positive);
    std::size_t ci = 0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
      const auto it = std::find(sorted.begin(), sorted.end(), ts[k]);
      const double a = std::abs(direct.amplitudes[it - sorted.begin()]);
      const double ex = std::exp(-rate * taus[k] / 2.0);
      row.abs_amplitude.push_back(a);
      row.exponential.push_back(ex);
      row.abs_cut.push_back(ts[k] > 0.0 ? std::abs(cut.amplitudes[ci++]) : 0.0);
      row.max_relative_deviation = std::max(row.max_relative_deviation, std::abs(a - ex) / ex);
    }
    row.abs_cut_fixed_t = std::abs(branch_cut_amplitude(m, {t_ref}).amplitudes[0]);
    rep.rows.push_back(row);
  }
  // Rows in order of decreasing lambda must show shrinking deviation.
  std::vector<const VanHoveRow*> order;
  for (const auto& r : rep.rows) order.push_back(&r);
  std::sort(order.begin(), order.end(), [](auto* x, auto* y) { return x->lambda > y->lambda; });
  rep.deviation_monotone = true;
  for (std::size_t k = 1; k < order.size(); ++k)
    if (!(order[k]->max_relative_deviation < order[k - 1]->max_relative_deviation))
      rep.deviation_monotone = false;
  return rep;
}

}  // namespace decaylab
