#include "decaylab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>

#include "decaylab/agbr.hpp"
#include "decaylab/core.hpp"
#include "decaylab/errors.hpp"
#include "decaylab/spectral.hpp"
#include "decaylab/zeno.hpp"

namespace decaylab::acceptance {

namespace {

using Checks = std::vector<Check>;

void at_most(Checks& c, std::string name, double measured, double tol) {
  c.push_back({std::move(name), measured, tol, "<=", measured <= tol});
}
void at_least(Checks& c, std::string name, double measured, double bound) {
  c.push_back({std::move(name), measured, bound, ">=", measured >= bound});
}
void above(Checks& c, std::string name, double measured, double bound) {
  c.push_back({std::move(name), measured, bound, ">", measured > bound});
}
void within(Checks& c, std::string name, double measured, double lo, double hi) {
  c.push_back({name + " >= lo", measured, lo, ">=", measured >= lo});
  c.push_back({std::move(name) + " <= hi", measured, hi, "<=", measured <= hi});
}
void holds(Checks& c, std::string name, bool ok) {
  c.push_back({std::move(name), ok ? 1.0 : 0.0, 1.0, "==", ok});
}

// Slope of ln y against ln x by least squares.
double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

bool non_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[i - 1]) return false;
  return true;
}

void zeno_closed_form(Checks& c) {
  at_most(c, "P(N=1)", neutron_survival_closed_form(1), 1e-15);
  at_most(c, "|P(N=2) - 0.25|", std::abs(neutron_survival_closed_form(2) - 0.25), 1e-15);
  at_least(c, "P(N=1e4)", neutron_survival_closed_form(10000), 0.9999);
  std::vector<std::int64_t> grid;
  for (int i = 0; i <= 400; ++i) {
    const auto n = static_cast<std::int64_t>(std::llround(2.0 * std::pow(5e5, i / 400.0)));
    if (grid.empty() || n > grid.back()) grid.push_back(n);
  }
  double min_step = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < grid.size(); ++i)
    min_step = std::min(min_step, neutron_survival_closed_form(grid[i]) -
                                      neutron_survival_closed_form(grid[i - 1]));
  above(c, "min increment on log grid 2..1e6", min_step, 0.0);
}

void zeno_channels(Checks& c) {
  double shared = 0.0, constructed = 0.0;
  std::vector<double> d_obs, d_unobs;
  for (int n = 1; n <= 64; ++n) {
    const ChannelComparison cmp = dynamical_vs_projective(n);
    shared = std::max(shared, std::abs(cmp.observed.entries(0, 0) - cmp.unobserved.entries(0, 0)));
    constructed = std::max({constructed, cmp.observed_deviation, cmp.unobserved_deviation});
    d_obs.push_back(distance_from_limit(channel_matrix(n, true)));
    d_unobs.push_back(distance_from_limit(channel_matrix(n, false)));
  }
  at_most(c, "max |obs(0,0) - unobs(0,0)|, N=1..64", shared, 1e-12);
  at_most(c, "max deviation of stepwise evolution from closed form", constructed, 1e-12);
  at_most(c, "observed distance from limit at N=64", d_obs.back(), 0.05);
  at_most(c, "unobserved distance from limit at N=64", d_unobs.back(), 0.05);
  holds(c, "observed distance monotone in N", non_increasing(d_obs));
  holds(c, "unobserved distance monotone in N", non_increasing(d_unobs));
}

void zeno_bound(Checks& c) {
  const UncertaintyParams p{0.0666, 1.0};
  const auto nh = n_for_half(p);
  within(c, "n_for_half(0.0666)", static_cast<double>(nh), 0.9e4, 1.1e4);
  std::vector<double> bounded, free;
  for (int k = 0; k <= 6; ++k) {
    const std::int64_t n = nh << k;
    bounded.push_back(uncertainty_bounded_survival(p, n));
    free.push_back(neutron_survival_closed_form(n));
  }
  holds(c, "bounded survival decreasing under N doubling", strictly_decreasing(bounded));
  at_most(c, "bounded survival at 64 n_half", bounded.back(), 1e-12);
  std::vector<double> neg_free(free.size());
  std::transform(free.begin(), free.end(), neg_free.begin(), [](double v) { return -v; });
  holds(c, "unbounded closed form increasing under N doubling", strictly_decreasing(neg_free));
  at_least(c, "unbounded closed form at 64 n_half", free.back(), 0.99999);
}

FiniteModel random_model(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim_dist(2, 8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int dim = dim_dist(rng);
  std::vector<double> h0(dim);
  for (double& e : h0) e = u(rng);
  Eigen::MatrixXcd hp = Eigen::MatrixXcd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      hp(i, j) = cplx(u(rng), u(rng)) * 0.5;
      hp(j, i) = std::conj(hp(i, j));
    }
  return FiniteModel(std::move(h0), std::move(hp), 0);
}

void short_time(Checks& c) {
  std::mt19937_64 rng(20240601);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const FiniteModel m = random_model(rng);
    const ShortTimeCoefficients st = short_time_coefficients(m);
    if (st.eigenstate()) throw NumericalError("short-time", "random model drew an eigenstate");
    const double tau = *st.tau_gaussian, t = 0.01 * tau;
    const double p = survival_exact(m, {t}).probabilities()[0];
    worst = std::max(worst, std::abs(p - (1.0 - t * t / (tau * tau))));
  }
  at_most(c, "max |P(t) - (1 - t^2/tau^2)| at t = 0.01 tau, 10 models", worst, 1e-6);
}

void discrete_oscillation(Checks& c) {
  const FiniteModel m = two_level_model(1.0, 1.0);
  const cplx lambda = large_t_exponent(m);
  at_most(c, "|Re Lambda|", std::abs(lambda.real()), 1e-14);
  at_most(c, "|Lambda - i/3|", std::abs(lambda - cplx(0.0, 1.0 / 3.0)), 1e-10);
  std::vector<double> ts;
  for (int i = 0; i <= 20000; ++i) ts.push_back(100.0 * i / 20000.0);
  const AmplitudeSeries s = survival_exact(m, ts);
  double lowest = std::numeric_limits<double>::infinity();
  for (const cplx& a : s.amplitudes) lowest = std::min(lowest, std::abs(a));
  // |a|^2 = cos^2(W t) + (mu_b0/W)^2 sin^2(W t), W^2 = mu_b0^2 + mu_b^2.
  const double floor = 1.0 / std::sqrt(2.0);
  at_least(c, "min |a(t)| - floor over [0, 100]", lowest - floor, -1e-12);
}

void golden_rule(Checks& c) {
  std::vector<double> lambdas{0.2, 0.1, 0.05}, residuals;
  for (double lam : lambdas) {
    const SpectralModel m(0.0, 1.0, lam, 1.0, 1.0);
    const PoleSolution p = pole_solve(m);
    residuals.push_back(std::abs(p.gamma - golden_rule_rate(m)));
  }
  const SpectralModel small(0.0, 1.0, 0.05, 1.0, 1.0);
  at_most(c, "relative |gamma - 2 pi B(e_a)| at lambda=0.05",
          residuals.back() / golden_rule_rate(small), 1e-2);
  within(c, "log-log slope of residual vs lambda", log_slope(lambdas, residuals), 3.5, 4.5);
}

void decomposition(Checks& c) {
  const SpectralModel m(0.0, 1.0, 0.1, 1.0, 1.0);
  const PoleSolution ps = pole_solve(m);
  const double g = ps.gamma;
  std::vector<double> era_t, gauss_t, power_t;
  for (int i = 0; i < 40; ++i) era_t.push_back(0.5 * std::pow(40.0, i / 39.0) / g);
  // Gaussian era: t e_ag < 1, which at this coupling is t < 0.023/gamma.
  for (double x : {0.001, 0.005, 0.01, 0.02}) gauss_t.push_back(x / g);
  // Crossover search for the power era.
  std::vector<double> scan;
  for (int i = 0; i <= 200; ++i) scan.push_back(5.0 * std::pow(40.0, i / 200.0) / g);
  const AmplitudeSeries pole_scan = pole_amplitude(m, ps, scan);
  const AmplitudeSeries cut_scan = branch_cut_amplitude(m, scan);
  double crossover = scan.back();
  for (std::size_t i = 0; i < scan.size(); ++i)
    if (std::abs(cut_scan.amplitudes[i]) > std::abs(pole_scan.amplitudes[i])) {
      crossover = scan[i];
      break;
    }
  for (double f : {1.5, 2.0, 3.0}) power_t.push_back(f * crossover);

  std::vector<double> ts = era_t;
  ts.insert(ts.end(), gauss_t.begin(), gauss_t.end());
  ts.insert(ts.end(), power_t.begin(), power_t.end());
  std::sort(ts.begin(), ts.end());
  const Decomposition d = decompose_amplitude(m, ts);
  auto at = [&](double t) {
    return static_cast<std::size_t>(std::lower_bound(ts.begin(), ts.end(), t) - ts.begin());
  };

  double era = 0.0;
  for (double t : era_t) {
    const std::size_t i = at(t);
    const cplx dir = d.direct.amplitudes[i];
    era = std::max(era, std::abs(d.pole.amplitudes[i] + d.cut.amplitudes[i] - dir) / std::abs(dir));
  }
  at_most(c, "max relative |pole + cut - direct| on [0.5, 20]/gamma", era, 1e-2);
  // Gaussian era: 1 - P is quadratic in t, the pole alone is not.
  double gauss = std::numeric_limits<double>::infinity();
  for (double t : gauss_t) {
    const std::size_t i = at(t);
    const double pd = std::norm(d.direct.amplitudes[i]), pp = std::norm(d.pole.amplitudes[i]);
    gauss = std::min(gauss, std::abs(pp - pd) / (1.0 - pd));
  }
  above(c, "min relative pole-only deviation of 1 - P, t e_ag < 1", gauss, 0.1);
  double power = std::numeric_limits<double>::infinity();
  for (double t : power_t) {
    const std::size_t i = at(t);
    const cplx dir = d.direct.amplitudes[i];
    power = std::min(power, std::abs(d.pole.amplitudes[i] - dir) / std::abs(dir));
  }
  above(c, "min relative pole-only deviation beyond crossover", power, 0.1);
}

void tail_exponents(Checks& c) {
  for (double delta : {0.5, 1.0}) {
    const SpectralModel m(0.0, 1.0, 0.1, delta, 1.0);
    const PoleSolution p = pole_solve(m);
    const TailFit f = fit_tail(m, 60.0 / p.gamma);
    at_most(c, "relative exponent error, delta=" + std::to_string(delta).substr(0, 3),
            std::abs(f.exponent - (1.0 + delta)) / (1.0 + delta), 0.05);
  }
}

void paley_wiener(Checks& c) {
  AmplitudeSeries ex, pw;
  for (int i = 0; i <= 4000; ++i) {
    const double t = 0.05 * i;
    ex.times.push_back(t);
    ex.amplitudes.push_back(std::exp(-t / 2.0));
    pw.times.push_back(t);
    pw.amplitudes.push_back(1.0 / ((1.0 + t) * (1.0 + t)));
  }
  holds(c, "exp(-t/2) divergent trend", paley_wiener_test(ex, 200.0).divergent_trend);
  holds(c, "(1+t)^-2 convergent trend", !paley_wiener_test(pw, 200.0).divergent_trend);
  struct P { double lambda, delta; };
  for (const P& p : {P{0.1, 0.5}, P{0.1, 1.0}, P{0.3, 1.0}, P{1.2, 1.0}}) {
    const SpectralModel m(0.0, 1.0, p.lambda, p.delta, 1.0);
    std::vector<double> ts;
    for (int i = 0; i <= 2000; ++i) ts.push_back(2.0 * i);
    const PaleyWienerResult r = paley_wiener_test(direct_amplitude(m, ts), 4000.0);
    holds(c, "spectral model lambda=" + std::to_string(p.lambda).substr(0, 3) +
                 " delta=" + std::to_string(p.delta).substr(0, 3) + " convergent trend",
          !r.divergent_trend);
  }
}

void van_hove(Checks& c) {
  const std::vector<double> lambdas{0.2, 0.1, 0.05};
  const VanHoveReport r = van_hove_rescale(SpectralModel(0.0, 1.0, 0.2, 1.0, 1.0), lambdas,
                                           {0.5, 1.0, 2.0, 3.0, 4.0});
  std::vector<double> dev, cut;
  for (const VanHoveRow& row : r.rows) {
    dev.push_back(row.max_relative_deviation);
    cut.push_back(row.abs_cut_fixed_t);
  }
  holds(c, "deviation from exponential decreasing in lambda", strictly_decreasing(dev));
  within(c, "log-log slope of |cut| vs lambda", log_slope(lambdas, cut), 1.8, 2.2);
}

void agbr_oracle(Checks& c) {
  double worst = 0.0;
  for (int n : {8, 10, 12}) {
    AgBrConfig cfg;
    cfg.n_spins = n;
    cfg.x1 = 1.0;
    cfg.spacing = 1.0;
    cfg.coupling = 0.4;
    cfg.omega = 1.3;
    for (int i = 0; i < 50; ++i) {
      const double t = (cfg.x_last() + 2.0) * i / 49.0;
      worst = std::max(worst, std::abs(exact_propagator_delta(cfg, t) -
                                       brute_force_oracle(cfg, t, OracleMode::full_hilbert)));
    }
  }
  at_most(c, "max |closed form - full Hilbert oracle|, N=8,10,12", worst, 1e-10);
}

AgBrConfig macroscopic(int n, double nbar) {
  AgBrConfig cfg;
  cfg.n_spins = n;
  cfg.x1 = 1.0;
  cfg.spacing = 1.0 / (n - 1);
  cfg.coupling = std::asin(std::sqrt(nbar / n));
  return cfg;
}

void agbr_exponential(Checks& c) {
  const AgBrConfig cfg = macroscopic(10000, 2.0);
  const double l = cfg.length(), nbar = cfg.nbar();
  std::vector<double> ts, logs;
  for (int i = 0; i <= 400; ++i) {
    const double t = cfg.x1 + l * (0.05 + 0.9 * i / 400.0);
    ts.push_back(t);
    logs.push_back(std::log(std::abs(exact_propagator_delta(cfg, t))));
  }
  double st = 0, sl = 0, stt = 0, stl = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    st += ts[i];
    sl += logs[i];
    stt += ts[i] * ts[i];
    stl += ts[i] * logs[i];
  }
  const double n = static_cast<double>(ts.size());
  const double slope = (n * stl - st * sl) / (n * stt - st * st);
  const double expected = -nbar / (2.0 * l);
  at_most(c, "relative slope error of ln|G|", std::abs(slope / expected - 1.0), 1e-3);

  auto deviation = [](const AgBrConfig& a) {
    double d = 0.0;
    for (int i = 1; i < 2000; ++i) {
      const double t = a.x1 + a.length() * i / 2000.0;
      d = std::max(d, std::abs(std::abs(exact_propagator_delta(a, t)) - exponential_law(a, t)));
    }
    return d;
  };
  const double ratio = deviation(cfg) / deviation(macroscopic(20000, 2.0));
  within(c, "deviation ratio N=1e4 / N=2e4", ratio, 1.8, 2.2);

  AgBrConfig wp = cfg;
  const double a = l / 20.0;
  wp.wave_packet = WavePacket{a, 0.0};
  double jump = 0.0;
  for (double b : {cfg.x1 - a / 2, cfg.x1 + a / 2, cfg.x_last() - a / 2, cfg.x_last() + a / 2}) {
    const cplx lo = wavepacket_propagator(wp, std::nextafter(b, -1e300)).value;
    const cplx hi = wavepacket_propagator(wp, std::nextafter(b, 1e300)).value;
    jump = std::max(jump, std::abs(hi - lo));
  }
  at_most(c, "max jump at the four breakpoints", jump, 1e-12);

  // Cubic remainder: the residual must shrink by ~8 per halving of p.
  std::vector<double> ps, printed, taylor;
  for (double f : {0.1, 0.05, 0.025, 0.0125}) {
    const double p = f * a;
    const double g1 = wavepacket_propagator(wp, cfg.x1 - a / 2 + p).value.real();
    ps.push_back(p);
    printed.push_back(std::abs(g1 - (1.0 - p * p / (4.0 * nbar * a * l))));
    taylor.push_back(std::abs(g1 - (1.0 - nbar * p * p / (4.0 * a * l))));
  }
  within(c, "residual order vs printed 1/(4 nbar a L) coefficient", log_slope(ps, printed), 2.7, 3.3);
  within(c, "residual order vs Taylor nbar/(4 a L) coefficient", log_slope(ps, taylor), 2.7, 3.3);
}

void agbr_statistics(Checks& c) {
  std::vector<double> dev;
  for (int k = 0; k <= 6; ++k) {
    const AgBrConfig cfg = macroscopic(100 << k, 2.0);
    dev.push_back(std::abs(final_state(cfg).visibility - std::exp(-1.0)));
  }
  holds(c, "visibility deviation from 1/e decreasing under N doubling", strictly_decreasing(dev));
  at_most(c, "visibility deviation at N=6400", dev.back(), 1e-3);
  double worst = 0.0;
  for (int n : {10, 100, 1000}) {
    AgBrConfig cfg = macroscopic(n, 2.0);
    cfg.omega = 1.7;
    const FinalStateStats s = final_state(cfg);
    // Binomial moments from the coefficient weights.
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t j = 0; j < s.coefficients.size(); ++j) {
      const double w = std::norm(s.coefficients[j]);
      m1 += w * j;
      m2 += w * j * j;
    }
    const double mean = m1 * cfg.omega, fluct = std::sqrt(m2 - m1 * m1) * cfg.omega;
    worst = std::max({worst, std::abs(s.mean_energy - mean) / mean,
                      std::abs(s.energy_fluctuation - fluct) / fluct});
  }
  at_most(c, "max relative moment mismatch, N=10,100,1000", worst, 1e-12);
}

void diagonal_singularity(Checks& c) {
  for (int n : {4, 6, 8}) {
    AgBrConfig cfg;
    cfg.n_spins = n;
    const SingularityCount s = diagonal_singularity_count(cfg);
    holds(c, "N=" + std::to_string(n) + " enumerated counts (N, 2)",
          s.enumerated && s.diagonal_terms == n && s.max_offdiagonal_terms == 2);
  }
}

struct Entry {
  SuiteInfo info;
  std::function<void(Checks&)> body;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> r{
      {{1, "zeno-closed-form", "Zeno closed form", 1.0}, zeno_closed_form},
      {{2, "zeno-channels", "Projective/dynamical equivalence", 1.0}, zeno_channels},
      {{3, "zeno-bound", "Uncertainty bound", 1.0}, zeno_bound},
      {{4, "short-time", "Short-time law", 1.0}, short_time},
      {{5, "discrete-oscillation", "Discrete-model oscillation", 1.0}, discrete_oscillation},
      {{6, "golden-rule", "Golden rule and pole", 10.0}, golden_rule},
      {{7, "decomposition", "Three-era decomposition", 60.0}, decomposition},
      {{8, "tail-exponents", "Tail exponents", 60.0}, tail_exponents},
      {{9, "paley-wiener", "Paley-Wiener trend", 10.0}, paley_wiener},
      {{10, "van-hove", "van Hove limit", 60.0}, van_hove},
      {{11, "agbr-oracle", "AgBr oracle", 30.0}, agbr_oracle},
      {{12, "agbr-exponential", "AgBr exponential era", 10.0}, agbr_exponential},
      {{13, "agbr-statistics", "AgBr statistics", 1.0}, agbr_statistics},
      {{14, "diagonal-singularity", "Diagonal singularity", 1.0}, diagonal_singularity},
  };
  return r;
}

}  // namespace

bool CriterionResult::passed() const {
  if (!error.empty() || checks.empty()) return false;
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const std::vector<SuiteInfo>& suites() {
  static const std::vector<SuiteInfo> s = [] {
    std::vector<SuiteInfo> out;
    for (const Entry& e : registry()) out.push_back(e.info);
    return out;
  }();
  return s;
}

bool has_suite(const std::string& name) {
  if (name == "all") return true;
  return std::any_of(registry().begin(), registry().end(),
                     [&](const Entry& e) { return e.info.name == name; });
}

CriterionResult run_criterion(int id) {
  const auto it = std::find_if(registry().begin(), registry().end(),
                               [&](const Entry& e) { return e.info.id == id; });
  if (it == registry().end()) throw ArgumentError("unknown criterion " + std::to_string(id));
  CriterionResult r;
  r.id = id;
  r.suite = it->info.name;
  r.title = it->info.title;
  r.runtime_limit_s = it->info.runtime_limit_s;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    it->body(r.checks);
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  at_most(r.checks, "runtime [s]", r.runtime_s, r.runtime_limit_s);
  return r;
}

std::vector<CriterionResult> run_suite(const std::string& name) {
  if (!has_suite(name)) throw ArgumentError("unknown suite '" + name + "'");
  std::vector<CriterionResult> out;
  for (const Entry& e : registry())
    if (name == "all" || e.info.name == name) out.push_back(run_criterion(e.info.id));
  return out;
}

}  // namespace decaylab::acceptance
