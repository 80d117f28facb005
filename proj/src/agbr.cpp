#include "decaylab/agbr.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "decaylab/errors.hpp"

namespace decaylab {

double AgBrConfig::q() const {
  const double s = std::sin(coupling);
  return s * s;
}

void AgBrConfig::validate() const {
  if (n_spins < 1) throw ArgumentError("AgBrConfig: n_spins must be >= 1");
  if (!(x1 > 0.0) || !std::isfinite(x1)) throw ArgumentError("AgBrConfig: x1 must be > 0");
  if (!(spacing > 0.0) || !std::isfinite(spacing))
    throw ArgumentError("AgBrConfig: spacing must be > 0");
  if (!std::isfinite(coupling)) throw ArgumentError("AgBrConfig: coupling must be finite");
  if (!(omega >= 0.0) || !std::isfinite(omega)) throw ArgumentError("AgBrConfig: omega must be >= 0");
  if (wave_packet) {
    const double a = wave_packet->a;
    if (!(a > 0.0) || !std::isfinite(a)) throw ArgumentError("AgBrConfig: packet size must be > 0");
    if (!std::isfinite(wave_packet->p0)) throw ArgumentError("AgBrConfig: p0 must be finite");
    if (!(a / 2.0 < x1)) throw ArgumentError("AgBrConfig: packet overlaps the array (a/2 >= x1)");
    if (!(a < length() / 10.0))
      throw ArgumentError("AgBrConfig: packet must be small against the array (a < L/10)");
  }
}

double spin_flip_probability(const AgBrConfig& cfg) {
  cfg.validate();
  return cfg.q();
}

FinalStateStats final_state(const AgBrConfig& cfg) {
  cfg.validate();
  const int n = cfg.n_spins;
  const double q = cfg.q(), p = 1.0 - q;
  FinalStateStats out;
  out.coefficients.resize(n + 1);
  static const cplx phase[4] = {cplx(1, 0), cplx(0, -1), cplx(-1, 0), cplx(0, 1)};
  for (int j = 0; j <= n; ++j) {
    double mag;
    if ((q == 0.0 && j > 0) || (p == 0.0 && j < n)) {
      mag = 0.0;
    } else {
      const double lb = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0);
      const double lq = j > 0 ? j * std::log(q) : 0.0;
      const double lp = j < n ? (n - j) * std::log(p) : 0.0;
      mag = std::exp(0.5 * (lb + lq + lp));
    }
    out.coefficients[j] = mag * phase[j % 4];
  }
  out.visibility = std::pow(p, 0.5 * n);
  out.mean_energy = q * n * cfg.omega;
  out.energy_fluctuation = std::sqrt(q * p * n) * cfg.omega;
  return out;
}

int scatterers_passed(const AgBrConfig& cfg, double t) {
  if (t < cfg.x1) return 0;
  long long k = static_cast<long long>(std::floor((t - cfg.x1) / cfg.spacing)) + 1;
  k = std::clamp<long long>(k, 0, cfg.n_spins);
  while (k < cfg.n_spins && cfg.position(static_cast<int>(k) + 1) <= t) ++k;
  while (k > 0 && cfg.position(static_cast<int>(k)) > t) --k;
  return static_cast<int>(k);
}

cplx exact_propagator_delta(const AgBrConfig& cfg, double t) {
  cfg.validate();
  if (!(t >= 0.0) || !std::isfinite(t)) throw ArgumentError("exact_propagator_delta: t must be >= 0");
  return std::pow(std::cos(cfg.coupling), scatterers_passed(cfg, t));
}

double exponential_law(const AgBrConfig& cfg, double t) {
  return std::exp(-cfg.nbar() * (t - cfg.x1) / (2.0 * cfg.length()));
}

std::string regime_label(Regime r) {
  switch (r) {
    case Regime::before: return "before";
    case Regime::entry: return "entry";
    case Regime::inside: return "inside";
    case Regime::exit: return "exit";
    case Regime::after: return "after";
  }
  return "unknown";
}

PropagatorValue wavepacket_propagator(const AgBrConfig& cfg, double t) {
  cfg.validate();
  if (!cfg.wave_packet) throw ArgumentError("wavepacket_propagator: no wave packet configured");
  if (!(t >= 0.0) || !std::isfinite(t)) throw ArgumentError("wavepacket_propagator: t must be >= 0");
  const double a = cfg.wave_packet->a, l = cfg.length(), nbar = cfg.nbar();
  const double x1 = cfg.x1, xn = cfg.x_last();
  const double k = nbar / (2.0 * l);
  if (t <= x1 - a / 2.0) return {1.0, Regime::before};
  if (nbar == 0.0) {
    const Regime r = t < x1 + a / 2.0 ? Regime::entry
                     : t <= xn - a / 2.0 ? Regime::inside
                     : t < xn + a / 2.0 ? Regime::exit
                                        : Regime::after;
    return {1.0, r};
  }
  // expm1 keeps 1 - exp(-k p) accurate for small penetration p.
  if (t < x1 + a / 2.0) {
    const double p = t - x1 + a / 2.0;
    return {1.0 - std::expm1(-k * p) / (k * a) - p / a, Regime::entry};
  }
  if (t <= xn - a / 2.0) {
    return {-std::expm1(-k * a) / (k * a) * std::exp(-k * (t - x1 - a / 2.0)), Regime::inside};
  }
  if (t < xn + a / 2.0) {
    const double p = t - xn - a / 2.0;
    return {std::exp(-nbar / 2.0) * (1.0 + std::expm1(-k * p) / (k * a) + p / a), Regime::exit};
  }
  return {std::exp(-nbar / 2.0), Regime::after};
}

cplx wavepacket_propagator_finite(const AgBrConfig& cfg, double t) {
  cfg.validate();
  if (!cfg.wave_packet) throw ArgumentError("wavepacket_propagator_finite: no wave packet configured");
  if (!(t >= 0.0)) throw ArgumentError("wavepacket_propagator_finite: t must be >= 0");
  // Average of cos(coupling)^k(x) over packet points x in [-a/2, a/2], where k
  // counts scatterers with x_n <= t + x; k is piecewise constant.
  const double a = cfg.wave_packet->a;
  const double lo = t - a / 2.0, hi = t + a / 2.0;
  const double c = std::cos(cfg.coupling);
  int k = scatterers_passed(cfg, lo);
  double pos = lo, acc = 0.0;
  while (pos < hi) {
    double next = hi;
    if (k < cfg.n_spins) next = std::min(hi, cfg.position(k + 1));
    acc += (next - pos) * std::pow(c, k);
    pos = next;
    if (next < hi) ++k;
  }
  return acc / a;
}

cplx square_potential_product(const AgBrConfig& cfg, double width, double t) {
  cplx g = 1.0;
  for (int n = 1; n <= cfg.n_spins; ++n) {
    const double f = std::clamp((t - (cfg.position(n) - width / 2.0)) / width, 0.0, 1.0);
    g *= std::cos(cfg.coupling * f);
  }
  return g;
}

SquareValue square_potential_propagator(const AgBrConfig& cfg, double width, double t) {
  cfg.validate();
  if (!(width > 0.0)) throw ArgumentError("square_potential_propagator: width must be > 0");
  if (width >= cfg.spacing)
    throw ArgumentError("square_potential_propagator: overlapping potentials (width >= spacing)");
  if (!(t >= 0.0) || !std::isfinite(t)) throw ArgumentError("square_potential_propagator: t must be >= 0");
  const double l = cfg.length();
  if (cfg.n_spins > 1 && t > cfg.x1 + width / 2.0 && t < cfg.x_last() - width / 2.0) {
    const double nbar = cfg.nbar();
    return {std::exp(-nbar * (t - cfg.x1) / (2.0 * l) + nbar * width / (12.0 * l)), true};
  }
  return {square_potential_product(cfg, width, t), false};
}

Potential Potential::square(double width) {
  if (!(width > 0.0)) throw ArgumentError("Potential: square width must be > 0");
  Potential p;
  p.kind = Kind::square;
  p.width = width;
  return p;
}

Potential Potential::custom(std::function<double(double)> profile, double half_width) {
  if (!(half_width > 0.0)) throw ArgumentError("Potential: half width must be > 0");
  Potential p;
  p.kind = Kind::custom;
  p.profile = std::move(profile);
  p.half_width = half_width;
  return p;
}

double tipping_angle(const AgBrConfig& cfg, const Potential& pot, int n, double x0, double t) {
  const double xn = cfg.position(n);
  if (pot.kind == Potential::Kind::delta) {
    const double hit = xn - x0;
    return (hit >= 0.0 && hit <= t) ? cfg.coupling : 0.0;
  }
  const double hw = pot.kind == Potential::Kind::square ? 0.5 * pot.width : pot.half_width;
  // Profile as seen along the path x = x0 + t'.
  const double lo = std::max(0.0, xn - hw - x0), hi = std::min(t, xn + hw - x0);
  if (!(hi > lo)) return 0.0;
  std::function<cplx(double)> f;
  if (pot.kind == Potential::Kind::square)
    f = [&](double) -> cplx { return 1.0 / pot.width; };
  else
    f = [&](double s) -> cplx { return pot.profile(x0 + s - xn); };
  const quad::Estimate e = quad::gauss_kronrod(f, lo, hi, 1e-14);
  if (e.error > 1e-11) throw NumericalError("tipping_angle", "quadrature of the profile failed", e.error);
  return cfg.coupling * e.value.real();
}

namespace {

// exp(-i sum_n alpha_n K_n)|0...0>, K_n = sigma_+ e^{-i phi} + h.c. on site n,
// by a scaled Taylor series on the full 2^N state vector.
cplx full_hilbert_amplitude(int n, const std::vector<double>& alpha, double phi) {
  const std::size_t dim = std::size_t{1} << n;
  std::vector<cplx> psi(dim, 0.0), term(dim), next(dim);
  psi[0] = 1.0;
  double bound = 0.0;
  for (double a : alpha) bound += std::abs(a);
  const int steps = std::max(1, static_cast<int>(std::ceil(bound / 0.5)));
  const cplx up = std::polar(1.0, -phi), down = std::polar(1.0, phi);
  auto apply = [&](const std::vector<cplx>& in, std::vector<cplx>& out, double scale) {
    std::fill(out.begin(), out.end(), cplx(0.0));
    for (std::size_t s = 0; s < dim; ++s) {
      const cplx v = in[s];
      if (v == 0.0) continue;
      for (int site = 0; site < n; ++site) {
        if (alpha[site] == 0.0) continue;
        const std::size_t bit = std::size_t{1} << site;
        // Raising when the spin is down, lowering when it is up.
        const cplx f = (s & bit) ? down : up;
        out[s ^ bit] += scale * alpha[site] * f * v;
      }
    }
  };
  for (int st = 0; st < steps; ++st) {
    term = psi;
    for (int m = 1; m < 60; ++m) {
      apply(term, next, 1.0 / steps);
      const cplx c = cplx(0.0, -1.0) / static_cast<double>(m);
      double nrm = 0.0;
      for (std::size_t s = 0; s < dim; ++s) {
        term[s] = c * next[s];
        psi[s] += term[s];
        nrm += std::norm(term[s]);
      }
      if (nrm < 1e-34) break;
    }
  }
  return psi[0];
}

}  // namespace

cplx brute_force_oracle(const AgBrConfig& cfg, double t, OracleMode mode, const Potential& pot,
                        double x0) {
  cfg.validate();
  if (!(t >= 0.0) || !std::isfinite(t)) throw ArgumentError("brute_force_oracle: t must be >= 0");
  if (mode == OracleMode::full_hilbert && cfg.n_spins > 14)
    throw ArgumentError("brute_force_oracle: N too large for full_hilbert mode (max 14)");
  std::vector<double> alpha(cfg.n_spins);
  for (int n = 1; n <= cfg.n_spins; ++n) alpha[n - 1] = tipping_angle(cfg, pot, n, x0, t);
  if (mode == OracleMode::factorized) {
    cplx g = 1.0;
    for (double a : alpha) g *= std::cos(a);
    return g;
  }
  return full_hilbert_amplitude(cfg.n_spins, alpha, cfg.omega * x0);
}

SingularityCount diagonal_singularity_count(const AgBrConfig& cfg) {
  cfg.validate();
  const int n = cfg.n_spins;
  SingularityCount out;
  if (n > 8) {
    out.diagonal_terms = n;
    out.max_offdiagonal_terms = n >= 2 ? 2 : 0;
    return out;
  }
  // Explicit H' (spin part, unit couplings) in the occupation basis.
  const int dim = 1 << n;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  const cplx up = std::polar(1.0, -cfg.omega * 0.0);
  for (int s = 0; s < dim; ++s)
    for (int site = 0; site < n; ++site) {
      const int t = s ^ (1 << site);
      h(t, s) = (s & (1 << site)) ? std::conj(up) : up;
    }
  long long diag = 0, off = 0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      long long count = 0;
      for (int m = 0; m < dim; ++m)
        if (h(i, m) != 0.0 && h(m, j) != 0.0) ++count;
      if (i == 0 && j == 0) diag = count;
      if (i != j) off = std::max(off, count);
    }
  out.diagonal_terms = diag;
  out.max_offdiagonal_terms = off;
  out.enumerated = true;
  return out;
}

}  // namespace decaylab
