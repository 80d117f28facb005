#include "sigma_rule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "decaylab/errors.hpp"
#include "decaylab/spectral.hpp"

namespace decaylab {

namespace {

constexpr int kTaylor = 6;
constexpr double kFactorial[kTaylor + 1] = {1, 1, 2, 6, 24, 120, 720};

void add_panels(std::vector<double>& x, std::vector<double>& w, double lo, double hi) {
  const auto& gx = quad::gl_nodes();
  const auto& gw = quad::gl_weights();
  const double mid = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
  for (int k = 0; k < quad::kPanelOrder; ++k) {
    x.push_back(mid + h * gx[k]);
    w.push_back(h * gw[k]);
  }
}

// Taylor forms of the subtracted integrands about x = z, with h = x - z.
void taylor(const cplx* bz, cplx h, cplx& value, cplx& derivative) {
  cplx sv = 0.0, sd = 0.0, p1 = 1.0, p2 = 1.0;
  for (int m = 1; m <= kTaylor; ++m) {
    sv += bz[m] * p1 / kFactorial[m];
    p1 *= h;
    if (m >= 2) {
      sd += bz[m] * p2 / kFactorial[m];
      p2 *= h;
    }
  }
  value = -sv;
  derivative = -sd;
}

}  // namespace

SigmaRule::SigmaRule(double lambda, double delta, double c, double span)
    : lambda2_(lambda * lambda), delta_(delta), c_(c), span_(span) {
  // Geometric grading towards the threshold, then uniform panels.
  const int graded = 24;
  add_panels(x_, w_, 0.0, c_ * std::pow(4.0, -graded));
  for (int j = graded - 1; j >= 0; --j)
    add_panels(x_, w_, c_ * std::pow(4.0, -(j + 1)), c_ * std::pow(4.0, -j));
  double lo = c_;
  while (lo < std::min(10.0 * c_, span_) - 1e-12 * c_) {
    const double hi = std::min(lo + 0.5 * c_, span_);
    add_panels(x_, w_, lo, hi);
    lo = hi;
  }
  while (lo < span_ - 1e-12 * c_) {
    const double hi = std::min(lo + 2.0 * c_, span_);
    add_panels(x_, w_, lo, hi);
    lo = hi;
  }
  bx_.resize(x_.size());
  for (std::size_t k = 0; k < x_.size(); ++k)
    bx_[k] = lambda2_ * std::pow(x_[k], delta_) * std::exp(-x_[k] / c_);
}

cplx SigmaRule::b(cplx z) const {
  if (z == 0.0) return 0.0;
  return lambda2_ * std::pow(z, delta_) * std::exp(-z / c_);
}

void SigmaRule::b_derivatives(cplx z, int kmax, cplx* out) const {
  // Leibniz rule on z^delta * exp(-z/c).
  const cplx pref = lambda2_ * std::exp(-z / c_);
  const cplx zd = std::pow(z, delta_);
  for (int k = 0; k <= kmax; ++k) {
    cplx acc = 0.0;
    double binom = 1.0, falling = 1.0;
    cplx zpow = zd;
    for (int j = 0; j <= k; ++j) {
      acc += binom * falling * zpow * std::pow(-1.0 / c_, k - j);
      binom = binom * (k - j) / (j + 1);
      falling *= (delta_ - j);
      zpow /= z;
    }
    out[k] = pref * acc;
  }
}

void SigmaRule::fixed(cplx z, bool subtract, const cplx* bz, cplx& value, cplx& derivative,
                      bool want_derivative) const {
  const double near = 1e-2 * std::min(std::abs(z), c_);
  cplx v = 0.0, d = 0.0;
  for (std::size_t k = 0; k < x_.size(); ++k) {
    const cplx diff = z - x_[k];
    if (!subtract) {
      const cplx r = bx_[k] / diff;
      v += w_[k] * r;
      if (want_derivative) d -= w_[k] * r / diff;
      continue;
    }
    if (std::abs(diff) < near) {
      cplx tv, td;
      taylor(bz, -diff, tv, td);
      v += w_[k] * tv;
      d += w_[k] * td;
      continue;
    }
    v += w_[k] * (bx_[k] - bz[0]) / diff;
    if (want_derivative) d -= w_[k] * (bx_[k] - bz[0] + bz[1] * diff) / (diff * diff);
  }
  value = v;
  derivative = d;
}

void SigmaRule::adaptive(cplx z, bool subtract, const cplx* bz, cplx& value, cplx& derivative,
                         bool want_derivative) const {
  const double near = 1e-2 * std::min(std::abs(z), c_);
  auto bx = [&](double x) { return lambda2_ * std::pow(x, delta_) * std::exp(-x / c_); };
  auto fv = [&](double x) -> cplx {
    const cplx diff = z - x;
    if (!subtract) return bx(x) / diff;
    if (std::abs(diff) < near) {
      cplx tv, td;
      taylor(bz, -diff, tv, td);
      return tv;
    }
    return (bx(x) - bz[0]) / diff;
  };
  auto fd = [&](double x) -> cplx {
    const cplx diff = z - x;
    if (!subtract) return -bx(x) / (diff * diff);
    if (std::abs(diff) < near) {
      cplx tv, td;
      taylor(bz, -diff, tv, td);
      return td;
    }
    return -(bx(x) - bz[0] + bz[1] * diff) / (diff * diff);
  };
  std::vector<double> cuts = {0.0, span_};
  for (double p : {z.real(), std::abs(z), c_, 5.0 * c_})
    if (p > 0.0 && p < span_) cuts.push_back(p);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  value = 0.0;
  derivative = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    value += quad::tanh_sinh(fv, cuts[i], cuts[i + 1], 1e-13).value;
    if (want_derivative) derivative += quad::tanh_sinh(fd, cuts[i], cuts[i + 1], 1e-13).value;
  }
}

void SigmaRule::first_sheet(cplx z, Approach approach, bool use_adaptive, cplx& value,
                            cplx& derivative, bool want_derivative) const {
  if (z == 0.0) throw DomainError("self-energy requested at the branch point");
  const bool on_axis = z.imag() == 0.0;
  const bool on_cut = on_axis && z.real() > 0.0 && z.real() < span_;
  if (on_cut && approach == Approach::none)
    throw ArgumentError("self-energy on the branch cut needs an approach side");
  const bool subtract = z.real() > 0.0;
  cplx bz[kTaylor + 1] = {};
  if (subtract) b_derivatives(z, kTaylor, bz);

  cplx integral, dintegral;
  if (use_adaptive)
    adaptive(z, subtract, bz, integral, dintegral, want_derivative);
  else
    fixed(z, subtract, bz, integral, dintegral, want_derivative);
  if (!subtract) {
    value = integral;
    derivative = dintegral;
    return;
  }
  cplx log_term;
  if (on_cut) {
    const double lr = std::log(z.real() / (span_ - z.real()));
    log_term = cplx(lr, approach == Approach::above ? -std::numbers::pi : std::numbers::pi);
  } else {
    log_term = std::log(z) - std::log(z - span_);
  }
  value = integral + bz[0] * log_term;
  derivative = dintegral + bz[0] * (1.0 / z - 1.0 / (z - span_)) + bz[1] * log_term;
}

}  // namespace decaylab
