#pragma once

#include <vector>

#include "decaylab/quadrature.hpp"

namespace decaylab {

enum class Approach;

// Precomputed quadrature for the continuum self-energy in the shifted variable
// z = E - e_g, with b(x) = lambda^2 x^delta exp(-x/c) on [0, span].
class SigmaRule {
 public:
  SigmaRule(double lambda, double delta, double c, double span);

  cplx b(cplx z) const;
  // Derivatives b^(0..kmax)(z) into out.
  void b_derivatives(cplx z, int kmax, cplx* out) const;
  double span() const { return span_; }

  // First-sheet self-energy and its derivative at z. For real z inside
  // (0, span) the approach side selects the boundary value.
  void first_sheet(cplx z, Approach approach, bool adaptive, cplx& value, cplx& derivative,
                   bool want_derivative) const;

 private:
  double lambda2_, delta_, c_, span_;
  std::vector<double> x_, w_, bx_;

  void fixed(cplx z, bool subtract, const cplx* bz, cplx& value, cplx& derivative,
             bool want_derivative) const;
  void adaptive(cplx z, bool subtract, const cplx* bz, cplx& value, cplx& derivative,
                bool want_derivative) const;
};

}  // namespace decaylab
