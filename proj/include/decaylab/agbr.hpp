#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "decaylab/quadrature.hpp"

namespace decaylab {

// Units: hbar = c = 1, so c t is written t. The tipping angle
// V0 Omega / (hbar c) is `coupling`.
struct WavePacket {
  double a = 0.0;   // size
  double p0 = 0.0;  // momentum
};

struct AgBrConfig {
  int n_spins = 1;
  double x1 = 1.0;
  double spacing = 1.0;
  double coupling = 0.0;
  double omega = 0.0;
  std::optional<WavePacket> wave_packet;

  double q() const;
  double nbar() const { return q() * n_spins; }
  double length() const { return (n_spins - 1) * spacing; }
  double x_last() const { return x1 + (n_spins - 1) * spacing; }
  double position(int n) const { return x1 + (n - 1) * spacing; }  // n = 1..N

  void validate() const;
};

double spin_flip_probability(const AgBrConfig& cfg);

struct FinalStateStats {
  double visibility = 0.0;
  double mean_energy = 0.0;
  double energy_fluctuation = 0.0;
  std::vector<cplx> coefficients;  // j = 0..N flipped spins
};

FinalStateStats final_state(const AgBrConfig& cfg);

// Number of scatterers with x_n <= t.
int scatterers_passed(const AgBrConfig& cfg, double t);

cplx exact_propagator_delta(const AgBrConfig& cfg, double t);

// exp(-nbar (t - x1) / 2L), the macroscopic-limit law inside the array.
double exponential_law(const AgBrConfig& cfg, double t);

enum class Regime { before, entry, inside, exit, after };
std::string regime_label(Regime r);

struct PropagatorValue {
  cplx value;
  Regime regime = Regime::before;
};

PropagatorValue wavepacket_propagator(const AgBrConfig& cfg, double t);
// Finite-N packet average of the delta-potential product.
cplx wavepacket_propagator_finite(const AgBrConfig& cfg, double t);

struct SquareValue {
  cplx value;
  bool closed_form = false;
};

SquareValue square_potential_propagator(const AgBrConfig& cfg, double width, double t);
// Product of cos(coupling * overlap fraction) over all scatterers.
cplx square_potential_product(const AgBrConfig& cfg, double width, double t);

// Normalised potential profile (integral 1) with support [-half_width, half_width].
struct Potential {
  enum class Kind { delta, square, custom } kind = Kind::delta;
  double width = 0.0;
  std::function<double(double)> profile;  // custom only
  double half_width = 0.0;                // custom only

  static Potential delta() { return {}; }
  static Potential square(double width);
  static Potential custom(std::function<double(double)> profile, double half_width);
};

enum class OracleMode { factorized, full_hilbert };

// Tipping angle accumulated by scatterer n along x = x0 + t'.
double tipping_angle(const AgBrConfig& cfg, const Potential& pot, int n, double x0, double t);

cplx brute_force_oracle(const AgBrConfig& cfg, double t, OracleMode mode,
                        const Potential& pot = Potential::delta(), double x0 = 0.0);

struct SingularityCount {
  long long diagonal_terms = 0;
  long long max_offdiagonal_terms = 0;
  bool enumerated = false;
};

SingularityCount diagonal_singularity_count(const AgBrConfig& cfg);

}  // namespace decaylab
