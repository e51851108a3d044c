#pragma once

#include <iosfwd>
#include <variant>
#include <vector>

#include "condensate/grid.hpp"

namespace condensate {

// Time-dependent trap A_t(x). Harmonic presets use A(x) = omega^2 (x - center)^2,
// scaled by a ramp factor s(t) that is 1 before t_on, falls linearly to 0 at t_off
// and stays 0 afterwards.
class ExternalPotential {
 public:
  enum class Preset { none, static_harmonic, ramped_harmonic };

  static ExternalPotential none();
  static ExternalPotential static_harmonic(double omega, double center);
  static ExternalPotential ramped_harmonic(double omega, double center, double t_on, double t_off);

  Preset preset() const { return preset_; }
  double omega() const { return omega_; }
  double center() const { return center_; }
  double t_on() const { return t_on_; }
  double t_off() const { return t_off_; }

  double ramp(double t) const;
  double ramp_rate(double t) const;

  double value(double x, double t) const;
  double time_derivative(double x, double t) const;

  bool is_static() const { return preset_ != Preset::ramped_harmonic; }

  // A_t sampled at arbitrary points.
  Eigen::VectorXd sample(const Eigen::VectorXd& xs, double t) const;
  Eigen::VectorXd sample(const Grid& grid, double t) const;

 private:
  Preset preset_ = Preset::none;
  double omega_ = 0.0;
  double center_ = 0.0;
  double t_on_ = 0.0;
  double t_off_ = 0.0;
};

struct FreeField {};

// V = v * |phi|^2 with a real, nonnegative kernel v.
struct HartreeField {
  GridFunction kernel;
};

// V = coupling * |phi|^2.
struct GrossPitaevskiiField {
  double coupling = 0.0;
};

using MeanFieldKind = std::variant<FreeField, HartreeField, GrossPitaevskiiField>;

MeanFieldKind make_hartree(GridFunction kernel);
MeanFieldKind make_gross_pitaevskii(double coupling);

// Symbol of the kinetic operator -Delta: k^2 (spectral) or 4 sin^2(kh/2)/h^2, the symbol
// of the periodic second-difference stencil used by the lattice many-body backend.
enum class Dispersion { spectral, lattice };

Eigen::VectorXd kinetic_symbol(const Grid& grid, Dispersion dispersion);

struct Orbital {
  GridFunction psi;
  double time = 0.0;
};

struct EnergyBreakdown {
  double e_kin = 0.0;
  double e_pot = 0.0;
  double e_total = 0.0;
};

struct RegularityReport {
  double sup_linf = 0.0;
  double sup_grad_linf = 0.0;
  double sup_lap_linf = 0.0;
  double decay_integral = 0.0;
};

struct StepOptions {
  Dispersion dispersion = Dispersion::spectral;
};

struct EvolveOptions {
  Dispersion dispersion = Dispersion::spectral;
  int sample_stride = 1;
};

struct MeanFieldTrajectory {
  std::vector<Orbital> samples;
  RegularityReport report;
};

Eigen::VectorXd mean_field_potential(const MeanFieldKind& kind, const GridFunction& phi);

// One Strang step: half kick with A_{t+dt/2} + V_phi, exact kinetic flow, half kick.
// Negative dt runs the step backwards. Throws std::runtime_error on non-finite values.
Orbital strang_step(const Orbital& phi, double dt, const MeanFieldKind& kind,
                    const ExternalPotential& trap, const StepOptions& options = {});

MeanFieldTrajectory evolve(const Orbital& phi0, double total_time, double dt,
                           const MeanFieldKind& kind, const ExternalPotential& trap,
                           const EvolveOptions& options = {});

EnergyBreakdown gp_energy(const Orbital& phi, const ExternalPotential& trap, double t,
                          const MeanFieldKind& kind, Dispersion dispersion = Dispersion::spectral);

// Per-sample sup norms used by the regularity report.
struct SupNorms {
  double linf;
  double grad_linf;
  double lap_linf;
};
SupNorms sup_norms(const GridFunction& phi);

// Columns: t, norm, e_kin, e_pot, e_total, linf, grad_linf.
void write_trajectory_csv(std::ostream& out, const std::vector<Orbital>& samples,
                          const MeanFieldKind& kind, const ExternalPotential& trap,
                          Dispersion dispersion = Dispersion::spectral);

// Normalized Gaussian exp(-(x-x0)^2/(4 sigma^2) + i k0 x) on the grid (l2 = 1).
GridFunction gaussian_orbital(const Grid& grid, double center, double sigma, double momentum = 0.0);

void normalize(GridFunction& f);

}  // namespace condensate
