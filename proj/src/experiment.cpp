#include "decaylab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <thread>

#include "decaylab/errors.hpp"

namespace decaylab {

namespace {

using io::Cell;
using io::json;
using io::ObjectReader;
using io::Table;

struct Product {
  Table table;
  std::string summary;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<double> time_grid(ObjectReader& r) {
  if (r.has("times")) {
    std::vector<double> ts = r.numbers("times");
    if (ts.empty()) throw ArgumentError(r.context() + ": times must not be empty");
    return ts;
  }
  const double lo = r.number("t_min"), hi = r.number("t_max");
  const std::int64_t n = r.integer("points");
  const std::string spacing = r.string_or("spacing", "linear");
  if (n < 1 || n > 10000000) throw ArgumentError(r.context() + ": points must be in [1, 1e7]");
  if (!(hi >= lo)) throw ArgumentError(r.context() + ": t_max must be >= t_min");
  std::vector<double> ts(n);
  for (std::int64_t i = 0; i < n; ++i) {
    const double f = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    if (spacing == "linear") {
      ts[i] = lo + (hi - lo) * f;
    } else if (spacing == "log") {
      if (!(lo > 0.0)) throw ArgumentError(r.context() + ": log spacing needs t_min > 0");
      ts[i] = lo * std::pow(hi / lo, f);
    } else {
      throw ArgumentError(r.context() + ": spacing must be linear or log");
    }
  }
  return ts;
}

Table amplitude_table(const AmplitudeSeries& s) {
  Table t{{"t", "re_amp", "im_amp", "prob", "err_estimate"}, {}};
  for (std::size_t i = 0; i < s.size(); ++i)
    t.add({s.times[i], s.amplitudes[i].real(), s.amplitudes[i].imag(), std::norm(s.amplitudes[i]),
           s.errors[i]});
  return t;
}

Product run_zeno(ObjectReader& r) {
  const std::string protocol = r.string_or("protocol", "neutron");
  std::vector<std::int64_t> ns;
  if (r.has("n")) {
    for (double v : r.numbers("n")) {
      if (v < 1 || std::floor(v) != v) throw ArgumentError("parameters: n must hold integers >= 1");
      ns.push_back(static_cast<std::int64_t>(v));
    }
  } else {
    const std::int64_t lo = r.integer("n_min"), hi = r.integer("n_max");
    if (lo < 1 || hi < lo) throw ArgumentError("parameters: need 1 <= n_min <= n_max");
    const std::string grid = r.string_or("grid", "linear");
    if (grid == "linear") {
      if (hi - lo > 10000000) throw ArgumentError("parameters: linear N grid too long");
      for (std::int64_t n = lo; n <= hi; ++n) ns.push_back(n);
    } else if (grid == "log") {
      const std::int64_t pts = r.integer_or("points", 50);
      if (pts < 2) throw ArgumentError("parameters: points must be >= 2");
      for (std::int64_t i = 0; i < pts; ++i) {
        const auto n = static_cast<std::int64_t>(
            std::llround(lo * std::pow(static_cast<double>(hi) / lo, static_cast<double>(i) / (pts - 1))));
        if (ns.empty() || n > ns.back()) ns.push_back(n);
      }
    } else {
      throw ArgumentError("parameters: grid must be linear or log");
    }
  }
  Product p{{{"N", "P"}, {}}, {}};
  if (protocol == "neutron") {
    const std::int64_t m = r.integer_or("m", 0);
    if (m < 0) throw ArgumentError("parameters: m must be >= 0");
    for (std::int64_t n : ns) p.table.add({n, neutron_survival_closed_form(n, static_cast<int>(m))});
  } else if (protocol == "pulsed") {
    const FiniteModel model = io::finite_model_from_json(r.required("model"));
    const double total = r.number("total_time");
    for (std::int64_t n : ns) p.table.add({n, pulsed_survival(model, n, total)});
  } else {
    throw ArgumentError("parameters: protocol must be neutron or pulsed");
  }
  p.summary = "P^(N) at N=" + std::to_string(ns.back()) + ": " +
              fmt("%.10g", std::get<double>(p.table.rows.back()[1]));
  return p;
}

Product run_survival(ObjectReader& r) {
  const FiniteModel model = io::finite_model_from_json(r.required("model"));
  const std::vector<double> ts = time_grid(r);
  const std::string method = r.string_or("method", "exact");
  const std::string pic = r.string_or("picture", "interaction");
  Picture picture;
  if (pic == "interaction")
    picture = Picture::interaction;
  else if (pic == "heisenberg")
    picture = Picture::heisenberg;
  else
    throw ArgumentError("parameters: picture must be interaction or heisenberg");
  AmplitudeSeries s;
  if (method == "exact") {
    s = survival_exact(model, ts, picture);
  } else if (method == "resolvent") {
    if (picture != Picture::heisenberg)
      throw ArgumentError("parameters: the resolvent method yields the heisenberg picture");
    s = resolvent_amplitude(model, ts, r.number_or("contour_offset", 0.1), r.number_or("tol", 1e-8));
  } else {
    throw ArgumentError("parameters: method must be exact or resolvent");
  }
  const ShortTimeCoefficients st = short_time_coefficients(model);
  Product p{amplitude_table(s), {}};
  p.summary = "tau_G: " + (st.tau_gaussian ? fmt("%.10g", *st.tau_gaussian) : std::string("none")) +
              ", P(t_last): " + fmt("%.10g", std::norm(s.amplitudes.back()));
  return p;
}

std::string spectral_summary(const SpectralModel& m, const PoleSolution& ps) {
  std::string s = "gamma: " + fmt("%.12g", ps.gamma) + ", deltaE: " + fmt("%.12g", ps.delta_e);
  if (m.e_a() > m.e_g()) s += ", Gamma(golden rule): " + fmt("%.12g", golden_rule_rate(m));
  return s;
}

Product run_spectral(ObjectReader& r) {
  const SpectralModel model = io::spectral_model_from_json(r.required("model"));
  const std::string task = r.string("task");
  Product p;
  if (task == "pole") {
    const PoleSolution ps = pole_solve(model);
    p.table = {{"delta_e", "gamma", "re_z", "im_z", "re_pole", "im_pole", "residual"}, {}};
    p.table.add({ps.delta_e, ps.gamma, ps.residue_z.real(), ps.residue_z.imag(), ps.pole.real(),
                 ps.pole.imag(), ps.residual});
    p.summary = spectral_summary(model, ps);
  } else if (task == "tail") {
    const PoleSolution ps = pole_solve(model);
    const double horizon = r.number_or("horizon", 60.0 / ps.gamma);
    const std::int64_t pts = r.integer_or("points", 60);
    if (pts < 3) throw ArgumentError("parameters: points must be >= 3");
    const TailFit f = fit_tail(model, horizon, static_cast<int>(pts));
    p.table = {{"exponent", "expected", "window_lo", "window_hi", "r_squared", "prefactor"}, {}};
    p.table.add({f.exponent, f.expected, f.window_lo, f.window_hi, f.r_squared, f.prefactor});
    p.summary = "tail exponent: " + fmt("%.6g", f.exponent) + " (expected " + fmt("%.6g", f.expected) + ")";
  } else if (task == "direct" || task == "cut") {
    const std::vector<double> ts = time_grid(r);
    AmplitudeSeries s;
    if (task == "direct") {
      DensityReport rep;
      s = direct_amplitude(model, ts, &rep);
      for (const std::string& w : rep.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    } else {
      const std::string route = r.string_or("route", "discontinuity");
      if (route != "discontinuity" && route != "u_integral")
        throw ArgumentError("parameters: route must be discontinuity or u_integral");
      s = branch_cut_amplitude(model, ts, route == "discontinuity" ? CutRoute::discontinuity
                                                                   : CutRoute::u_integral);
    }
    p.table = amplitude_table(s);
    p.summary = "P(t_last): " + fmt("%.10g", std::norm(s.amplitudes.back()));
  } else if (task == "decompose") {
    const std::vector<double> ts = time_grid(r);
    const Decomposition d = decompose_amplitude(model, ts);
    p.table = {{"t", "re_direct", "im_direct", "re_pole", "im_pole", "re_cut", "im_cut"}, {}};
    for (std::size_t i = 0; i < ts.size(); ++i)
      p.table.add({ts[i], d.direct.amplitudes[i].real(), d.direct.amplitudes[i].imag(),
                   d.pole.amplitudes[i].real(), d.pole.amplitudes[i].imag(),
                   d.cut.amplitudes[i].real(), d.cut.amplitudes[i].imag()});
    p.summary = spectral_summary(model, d.pole_solution) +
                ", max |pole+cut-direct|/|direct|: " + fmt("%.3e", d.max_relative_deviation);
  } else if (task == "van_hove") {
    const std::vector<double> lambdas = r.numbers("lambdas");
    const std::vector<double> taus = r.numbers("taus");
    const VanHoveReport rep = van_hove_rescale(model, lambdas, taus, r.number_or("t_ref", 20.0));
    p.table = {{"lambda", "tau", "abs_amp", "exponential", "abs_cut"}, {}};
    for (const VanHoveRow& row : rep.rows)
      for (std::size_t i = 0; i < taus.size(); ++i)
        p.table.add({row.lambda, taus[i], row.abs_amplitude[i], row.exponential[i], row.abs_cut[i]});
    p.summary = std::string("deviation monotone in lambda: ") + (rep.deviation_monotone ? "yes" : "no");
  } else {
    throw ArgumentError("parameters: task must be one of pole, tail, direct, cut, decompose, van_hove");
  }
  return p;
}

Product run_agbr(ObjectReader& r) {
  const AgBrConfig cfg = io::agbr_config_from_json(r.required("config"));
  const std::string prop = r.string_or("propagator", "delta");
  const std::vector<double> ts = time_grid(r);
  Product p{{{"t", "re_G", "im_G", "abs_G", "regime_label"}, {}}, {}};
  auto regime_of = [&](double t) {
    if (t < cfg.x1) return Regime::before;
    return t <= cfg.x_last() ? Regime::inside : Regime::after;
  };
  auto add = [&](double t, cplx g, Regime reg) {
    p.table.add({t, g.real(), g.imag(), std::abs(g), regime_label(reg)});
  };
  if (prop == "delta") {
    for (double t : ts) add(t, exact_propagator_delta(cfg, t), regime_of(t));
  } else if (prop == "wavepacket") {
    for (double t : ts) {
      const PropagatorValue v = wavepacket_propagator(cfg, t);
      add(t, v.value, v.regime);
    }
  } else if (prop == "square") {
    const double width = r.number("width");
    for (double t : ts) add(t, square_potential_propagator(cfg, width, t).value, regime_of(t));
  } else if (prop == "oracle") {
    const std::string mode = r.string_or("mode", "full_hilbert");
    if (mode != "factorized" && mode != "full_hilbert")
      throw ArgumentError("parameters: mode must be factorized or full_hilbert");
    const OracleMode om = mode == "factorized" ? OracleMode::factorized : OracleMode::full_hilbert;
    for (double t : ts) add(t, brute_force_oracle(cfg, t, om), regime_of(t));
  } else {
    throw ArgumentError("parameters: propagator must be delta, wavepacket, square or oracle");
  }
  const FinalStateStats st = final_state(cfg);
  p.summary = "nbar: " + fmt("%.10g", cfg.nbar()) + ", visibility: " + fmt("%.10g", st.visibility) +
              ", mean energy: " + fmt("%.10g", st.mean_energy);
  return p;
}

struct Output {
  std::string path;
  std::string format;
};

Output read_output(const json& config) {
  ObjectReader o(config.at("output"), "output");
  Output out{o.string("path"), o.string_or("format", "csv")};
  o.finish();
  if (out.format != "csv" && out.format != "json")
    throw ArgumentError("output: format must be csv or json");
  if (out.path.empty()) throw ArgumentError("output: path must not be empty");
  return out;
}

Product run_single(const std::string& kind, const json& params) {
  ObjectReader r(params, "parameters");
  Product p;
  if (kind == "zeno")
    p = run_zeno(r);
  else if (kind == "survival")
    p = run_survival(r);
  else if (kind == "spectral")
    p = run_spectral(r);
  else if (kind == "agbr")
    p = run_agbr(r);
  else
    throw ArgumentError("kind must be one of zeno, survival, spectral, agbr, sweep");
  r.finish();
  return p;
}

std::string point_path(const std::string& path, std::size_t index) {
  const std::filesystem::path p(path);
  std::filesystem::path out = p.parent_path() / (p.stem().string() + "_" + std::to_string(index));
  out += p.extension();
  return out.string();
}

RunOutcome run_sweep(const json& params, const Output& out, const std::string& hash) {
  ObjectReader r(params, "parameters");
  const std::string kind = r.string("kind");
  if (kind == "sweep") throw ArgumentError("parameters: nested sweeps are not supported");
  const json& base = r.required("base");
  const std::string pointer = r.string("parameter");
  const json& values = r.required("values");
  r.finish();
  if (!values.is_array() || values.empty())
    throw ArgumentError("parameters: values must be a non-empty array");
  json::json_pointer ptr;
  try {
    ptr = json::json_pointer(pointer);
  } catch (const json::exception& e) {
    throw ArgumentError("parameters: bad parameter pointer '" + pointer + "'");
  }
  if (!base.contains(ptr)) throw ArgumentError("parameters: base has no field at '" + pointer + "'");

  const std::size_t n = values.size();
  std::vector<Product> products(n);
  std::vector<std::string> errors(n);
  std::vector<int> codes(n, 0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        json point = base;
        point[ptr] = values[i];
        products[i] = run_single(kind, point);
      } catch (const ArgumentError& e) {
        errors[i] = e.what();
        codes[i] = 2;
      } catch (const NumericalError& e) {
        errors[i] = e.what();
        codes[i] = 3;
      }
    }
  };
  const unsigned threads = std::min<unsigned>(sweep_threads(), static_cast<unsigned>(n));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  for (std::size_t i = 0; i < n; ++i) {
    if (codes[i] == 2) throw ArgumentError("sweep point " + std::to_string(i) + ": " + errors[i]);
    if (codes[i] == 3) throw NumericalError("sweep point " + std::to_string(i), errors[i]);
  }

  RunOutcome outcome;
  Table index{{"index", "value", "path", "summary"}, {}};
  for (std::size_t i = 0; i < n; ++i) {
    const std::string path = point_path(out.path, i);
    io::write_table(products[i].table, path, out.format, hash);
    outcome.written.push_back(path);
    index.add({static_cast<std::int64_t>(i), values[i].dump(), path, products[i].summary});
  }
  io::write_table(index, out.path, out.format, hash);
  outcome.written.insert(outcome.written.begin(), out.path);
  outcome.summary = "sweep over " + pointer + ": " + std::to_string(n) + " points";
  return outcome;
}

}  // namespace

unsigned sweep_threads() {
  if (const char* env = std::getenv("DECAYLAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(std::min(v, 1024L));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

RunOutcome run_experiment(const json& config) {
  ObjectReader r(config, "config");
  const std::string kind = r.string("kind");
  const json& params = r.required("parameters");
  r.required("output");
  if (const json* seed = r.optional("seed"))
    if (!seed->is_number_integer()) throw ArgumentError("config: seed must be an integer");
  r.finish();
  const Output out = read_output(config);
  const std::string hash = io::config_hash(config);
  if (kind == "sweep") return run_sweep(params, out, hash);
  Product p = run_single(kind, params);
  io::write_table(p.table, out.path, out.format, hash);
  return {p.summary, {out.path}};
}

io::json acceptance_report(const std::vector<acceptance::CriterionResult>& results) {
  json list = json::array();
  bool all = true;
  for (const acceptance::CriterionResult& c : results) {
    json checks = json::array();
    for (const acceptance::Check& k : c.checks)
      checks.push_back({{"name", k.name},
                        {"measured", std::isfinite(k.measured) ? json(k.measured) : json(io::format_double(k.measured))},
                        {"relation", k.relation},
                        {"tolerance", k.tolerance},
                        {"passed", k.passed}});
    json entry = {{"id", c.id},           {"suite", c.suite},
                  {"title", c.title},     {"passed", c.passed()},
                  {"runtime_s", c.runtime_s}, {"runtime_limit_s", c.runtime_limit_s},
                  {"checks", checks}};
    if (!c.error.empty()) entry["error"] = c.error;
    all = all && c.passed();
    list.push_back(entry);
  }
  return {{"passed", all}, {"criteria", list}};
}

}  // namespace decaylab
