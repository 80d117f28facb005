#include "decaylab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "decaylab/errors.hpp"

namespace decaylab::quad {

namespace {

struct Rule {
  std::array<double, kPanelOrder> x{};
  std::array<double, kPanelOrder> w{};
  // legendre[m][k] = P_m(x_k)
  std::array<std::array<double, kPanelOrder>, kPanelOrder> legendre{};

  Rule() {
    using G = boost::math::quadrature::gauss<double, kPanelOrder>;
    const auto& a = G::abscissa();
    const auto& wt = G::weights();
    const int half = kPanelOrder / 2;
    for (int k = 0; k < half; ++k) {
      x[half - 1 - k] = -a[k];
      w[half - 1 - k] = wt[k];
      x[half + k] = a[k];
      w[half + k] = wt[k];
    }
    for (int k = 0; k < kPanelOrder; ++k) {
      double p0 = 1.0, p1 = x[k];
      legendre[0][k] = p0;
      legendre[1][k] = p1;
      for (int m = 1; m + 1 < kPanelOrder; ++m) {
        const double p2 = ((2 * m + 1) * x[k] * p1 - m * p0) / (m + 1);
        legendre[m + 1][k] = p2;
        p0 = p1;
        p1 = p2;
      }
    }
  }
};

const Rule& rule() {
  static const Rule r;
  return r;
}

}  // namespace

const std::array<double, kPanelOrder>& gl_nodes() { return rule().x; }
const std::array<double, kPanelOrder>& gl_weights() { return rule().w; }

void sph_bessel(int nmax, double x, double* out) {
  if (x < 1e-8) {
    out[0] = 1.0 - x * x / 6.0;
    for (int n = 1; n <= nmax; ++n) out[n] = out[n - 1] * x / (2 * n + 1);
    return;
  }
  const double s = std::sin(x), c = std::cos(x);
  const double j0 = s / x;
  if (x >= nmax) {
    out[0] = j0;
    if (nmax == 0) return;
    out[1] = s / (x * x) - c / x;
    for (int n = 1; n < nmax; ++n) out[n + 1] = (2 * n + 1) / x * out[n] - out[n - 1];
    return;
  }
  // Miller's backward recurrence, normalised against j0 or j1.
  const int start = nmax + 30 + static_cast<int>(std::sqrt(40.0 * nmax));
  std::vector<double> buf(start + 2, 0.0);
  buf[start] = 1e-30;
  for (int n = start; n > 0; --n) {
    buf[n - 1] = (2 * n + 1) / x * buf[n] - buf[n + 1];
    if (std::abs(buf[n - 1]) > 1e250)
      for (int m = n - 1; m <= start; ++m) buf[m] *= 1e-250;
  }
  for (int n = 0; n <= nmax; ++n) out[n] = buf[n];
  const double j1 = s / (x * x) - c / x;
  double scale;
  if (std::abs(j0) >= std::abs(j1) || x < 1e-2 || nmax == 0)
    scale = j0 / out[0];
  else
    scale = j1 / out[1];
  for (int n = 0; n <= nmax; ++n) out[n] *= scale;
}

namespace {

template <class F>
Estimate guarded(const char* op, F&& body) {
  try {
    return body();
  } catch (const NumericalError&) {
    throw;
  } catch (const std::exception& e) {
    throw NumericalError(op, e.what());
  }
}

}  // namespace

Estimate tanh_sinh(const std::function<cplx(double)>& f, double a, double b, double tol) {
  thread_local boost::math::quadrature::tanh_sinh<double> integrator;
  return guarded("tanh_sinh", [&] {
    double err = 0.0, l1 = 0.0;
    const cplx v = integrator.integrate(f, a, b, tol, &err, &l1);
    return Estimate{v, err * std::max(l1, 1e-300)};
  });
}

Estimate exp_sinh(const std::function<cplx(double)>& f, double a, double tol) {
  thread_local boost::math::quadrature::exp_sinh<double> integrator;
  return guarded("exp_sinh", [&] {
    double err = 0.0, l1 = 0.0;
    const cplx v =
        integrator.integrate(f, a, std::numeric_limits<double>::infinity(), tol, &err, &l1);
    return Estimate{v, err * std::max(l1, 1e-300)};
  });
}

Estimate gauss_kronrod(const std::function<cplx(double)>& f, double a, double b, double tol,
                       int max_depth) {
  return guarded("gauss_kronrod", [&] {
    double err = 0.0, l1 = 0.0;
    const cplx v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, a, b, static_cast<unsigned>(max_depth), tol, &err, &l1);
    return Estimate{v, err * std::max(l1, 1e-300)};
  });
}

FilonTransform FilonTransform::build(const std::function<cplx(double)>& w,
                                     std::vector<double> breaks, double tol_abs, int max_panels) {
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  if (breaks.size() < 2) throw ArgumentError("FilonTransform: need at least two breakpoints");
  const Rule& r = rule();
  const double span = breaks.back() - breaks.front();
  const double tiny = 1e-14 * std::max(std::abs(breaks.front()), std::abs(breaks.back()));

  auto fit = [&](double lo, double hi) {
    Panel p{lo, hi, {}, {}};
    const double mid = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    for (int k = 0; k < kPanelOrder; ++k) {
      const cplx v = w(mid + h * r.x[k]);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw NumericalError("FilonTransform", "density is not finite at E = " +
                                                   std::to_string(mid + h * r.x[k]));
      p.samples[k] = v;
    }
    for (int m = 0; m < kPanelOrder; ++m) {
      cplx acc = 0.0;
      for (int k = 0; k < kPanelOrder; ++k) acc += r.w[k] * p.samples[k] * r.legendre[m][k];
      p.coef[m] = 0.5 * (2 * m + 1) * acc;
    }
    return p;
  };
  auto tail = [](const Panel& p) {
    const double h = 0.5 * (p.hi - p.lo);
    return 2.0 * h * (std::abs(p.coef[kPanelOrder - 1]) + std::abs(p.coef[kPanelOrder - 2]));
  };

  FilonTransform out;
  std::vector<Panel> stack;
  for (std::size_t i = breaks.size() - 1; i > 0; --i) stack.push_back(fit(breaks[i - 1], breaks[i]));
  while (!stack.empty()) {
    Panel p = stack.back();
    stack.pop_back();
    const double width = p.hi - p.lo;
    const double allowed = tol_abs * std::max(width / span, 1e-3);
    const double est = tail(p);
    if (est <= allowed || width <= tiny) {
      out.error_bound_ += est;
      out.panels_.push_back(p);
      continue;
    }
    if (static_cast<int>(out.panels_.size() + stack.size()) > max_panels)
      throw NumericalError("FilonTransform", "panel budget exhausted", out.error_bound_ + est);
    const double mid = 0.5 * (p.lo + p.hi);
    stack.push_back(fit(mid, p.hi));
    stack.push_back(fit(p.lo, mid));
  }
  return out;
}

Estimate FilonTransform::transform(double t) const {
  std::array<double, kPanelOrder> j{};
  static const std::array<cplx, 4> ipow = {cplx(1, 0), cplx(0, -1), cplx(-1, 0), cplx(0, 1)};
  cplx acc = 0.0;
  for (const Panel& p : panels_) {
    const double mid = 0.5 * (p.lo + p.hi), h = 0.5 * (p.hi - p.lo);
    const double theta = h * t;
    sph_bessel(kPanelOrder - 1, std::abs(theta), j.data());
    cplx local = 0.0;
    for (int m = 0; m < kPanelOrder; ++m) {
      const double jm = (theta < 0 && (m % 2)) ? -j[m] : j[m];
      local += p.coef[m] * jm * ipow[m % 4];
    }
    acc += 2.0 * h * local * std::polar(1.0, -mid * t);
  }
  return {acc, error_bound_};
}

cplx FilonTransform::mass() const {
  cplx acc = 0.0;
  for (const Panel& p : panels_) acc += (p.hi - p.lo) * p.coef[0];
  return acc;
}

cplx FilonTransform::first_moment() const {
  cplx acc = 0.0;
  for (const Panel& p : panels_) {
    const double mid = 0.5 * (p.lo + p.hi), h = 0.5 * (p.hi - p.lo);
    acc += h * (2.0 * mid * p.coef[0] + h * (2.0 / 3.0) * p.coef[1]);
  }
  return acc;
}

namespace {

template <class P>
double panel_abs_moment(const P& p, double center) {
  const Rule& r = rule();
  const double mid = 0.5 * (p.lo + p.hi), h = 0.5 * (p.hi - p.lo);
  double acc = 0.0;
  for (int k = 0; k < kPanelOrder; ++k)
    acc += r.w[k] * std::abs(mid + h * r.x[k] - center) * std::abs(p.samples[k]);
  return h * acc;
}

}  // namespace

double FilonTransform::abs_moment(double center) const {
  double acc = 0.0;
  for (const Panel& p : panels_) acc += panel_abs_moment(p, center);
  return acc;
}

double FilonTransform::outer_abs_moment(double center, double fraction, bool lower_end,
                                        bool upper_end) const {
  const double lo = lower(), hi = upper();
  const double inner_lo = lo + fraction * (hi - lo), inner_hi = hi - fraction * (hi - lo);
  double acc = 0.0;
  for (const Panel& p : panels_) {
    const double mid = 0.5 * (p.lo + p.hi);
    if ((lower_end && mid < inner_lo) || (upper_end && mid > inner_hi))
      acc += panel_abs_moment(p, center);
  }
  return acc;
}

void FilonTransform::scale(double factor) {
  for (Panel& p : panels_) {
    for (cplx& c : p.coef) c *= factor;
    for (cplx& s : p.samples) s *= factor;
  }
  error_bound_ *= std::abs(factor);
}

}  // namespace decaylab::quad
