#pragma once

#include <array>
#include <complex>
#include <functional>
#include <vector>

namespace decaylab {

using cplx = std::complex<double>;

namespace quad {

inline constexpr int kPanelOrder = 16;

// Gauss-Legendre rule on [-1, 1] with kPanelOrder nodes.
const std::array<double, kPanelOrder>& gl_nodes();
const std::array<double, kPanelOrder>& gl_weights();

// Spherical Bessel functions j_0..j_nmax at x >= 0.
void sph_bessel(int nmax, double x, double* out);

struct Estimate {
  cplx value;
  double error = 0.0;
};

// Adaptive quadratures of complex integrands (Boost.Math backends).
Estimate tanh_sinh(const std::function<cplx(double)>& f, double a, double b, double tol);
Estimate exp_sinh(const std::function<cplx(double)>& f, double a, double tol);
Estimate gauss_kronrod(const std::function<cplx(double)>& f, double a, double b, double tol,
                       int max_depth = 15);

// Fourier transform of a smooth function: integral of w(E) exp(-iEt) over a
// mesh of panels. The density is sampled once and replaced on every panel by
// its Legendre expansion, whose moments against exp(-iEt) are exact.
class FilonTransform {
 public:
  FilonTransform() = default;

  // Bisects panels between consecutive breakpoints until the discarded
  // Legendre tail on each panel is small against tol_abs.
  static FilonTransform build(const std::function<cplx(double)>& w, std::vector<double> breaks,
                              double tol_abs, int max_panels = 200000);

  Estimate transform(double t) const;
  cplx mass() const;
  cplx first_moment() const;
  // Integral of |E - center| w(E), in total and restricted to the outer
  // `fraction` of the mesh span at the selected ends.
  double abs_moment(double center) const;
  double outer_abs_moment(double center, double fraction, bool lower_end = true,
                          bool upper_end = true) const;
  double error_bound() const { return error_bound_; }
  std::size_t panel_count() const { return panels_.size(); }
  double lower() const { return panels_.empty() ? 0.0 : panels_.front().lo; }
  double upper() const { return panels_.empty() ? 0.0 : panels_.back().hi; }
  void scale(double factor);

 private:
  struct Panel {
    double lo, hi;
    std::array<cplx, kPanelOrder> coef;  // Legendre coefficients, local coordinate
    std::array<cplx, kPanelOrder> samples;
  };
  std::vector<Panel> panels_;
  double error_bound_ = 0.0;
};

}  // namespace quad
}  // namespace decaylab
