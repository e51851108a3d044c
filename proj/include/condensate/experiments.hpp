#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "condensate/counting.hpp"
#include "condensate/manybody.hpp"
#include "condensate/meanfield.hpp"
#include "condensate/scattering.hpp"

namespace condensate {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Regime { hartree, gp_proxy };

struct InteractionPreset {
  std::string kind = "gaussian";  // none | gaussian | profile | onsite
  double strength = 1.0;
  double width = 1.0;   // gaussian width in units of the lattice spacing
  int radius = 2;       // gaussian support radius in sites
  std::vector<double> profile;
  double lambda = 1.0;  // onsite proxy strength
  double beta = 0.5;    // onsite proxy exponent
};

struct TrapPreset {
  std::string kind = "none";  // none | static_harmonic | ramped_harmonic
  double omega = 1.0;
  double center = 0.0;
  double t_on = 0.0;
  double t_off = 1.0;
};

struct InitialPreset {
  std::string kind = "gaussian";  // gaussian | uniform
  double center = 0.0;
  double sigma = 1.0;
  double momentum = 0.0;
  double noise = 0.0;  // weight of a seeded random admixture in Psi_0
};

struct SweepConfig {
  Regime regime = Regime::hartree;
  std::vector<int> n_list{2, 4, 6, 8};
  LatticeConfig lattice{10, 0.4};
  InteractionPreset interaction;
  TrapPreset trap;
  InitialPreset initial;
  double total_time = 1.0;
  double dt = 0.01;
  int sample_stride = 5;
  KrylovOptions krylov;
  std::size_t max_dimension = OccupationBasis::default_max_dimension;
  double envelope_gamma = 0.1;
  double condition_delta = 0.1;
  Dispersion dispersion = Dispersion::lattice;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;

  void validate() const;
  PairInteraction pair(int particles) const;
  ExternalPotential potential() const;
  LatticeOrbital initial_orbital() const;
  MeanFieldKind kind(int particles) const;
  SymmetricState initial_state(int particles) const;
};

struct ScatterConfig {
  double barrier_height = 1.0;
  double barrier_radius = 1.0;
  std::vector<double> beta1{0.25, 2.0 / 7.0};
  std::vector<double> beta2{0.5, 1.0};
  std::vector<double> n_list{1e2, 1e3, 1e4};
  int grid_points = 2048;
  int positivity_cells = 20000;
  double class_beta = 1.0;
  double class_delta = 0.1;
  double class_barrier_height = 1e6;
  std::filesystem::path output_dir = "out";

  void validate() const;
};

SweepConfig parse_sweep_config(const std::string& toml_text);
SweepConfig load_sweep_config(const std::filesystem::path& path);
ScatterConfig parse_scatter_config(const std::string& toml_text);
ScatterConfig load_scatter_config(const std::filesystem::path& path);

std::string regime_name(Regime regime);
// Resolved configuration as pretty-printed JSON (deterministic key order).
std::string config_json(const SweepConfig& cfg);

// ---------------------------------------------------------------------------
enum class EnvelopeMode { hartree, gp };

// hartree: (alpha0 + N^-1/2) e^{C t} - N^-1/2
// gp:      ((ln N)^{1/3} alpha0 + N^-gamma) exp(C (ln N)^{1/3} I_t) - N^-gamma, divided by (ln N)^{1/3}
double gronwall_envelope(double alpha0, double c, double particles, double t, EnvelopeMode mode,
                         double phi_norm_integral = 0.0, double gamma = 0.1);

// Smallest C with alpha_t <= envelope(t) at every sample (0 if none is needed).
double fit_envelope_constant(const std::vector<double>& times, const std::vector<double>& alpha,
                             const std::vector<double>& integrals, double particles, EnvelopeMode mode,
                             double gamma = 0.1);

struct RunSample {
  double t = 0.0;
  double alpha = 0.0;   // <n^>
  double alpha2 = 0.0;  // <n^2>
  double condensate_overlap = 0.0;
  double energy_per_particle = 0.0;
  double e_gp = 0.0;
  double envelope = 0.0;
  double decay_integral = 0.0;  // int_0^t (||phi||_inf + ||grad phi||_inf) ds
};

struct RunRecord {
  int particles = 0;
  bool ok = false;
  std::string error;
  std::vector<RunSample> samples;
  double fitted_c = 0.0;
  double cond1 = 0.0;
  double cond2 = 0.0;
  double wall_seconds = 0.0;

  // hartree: <n^2> (the alpha_t of the Hartree analysis); gp_proxy: <n^>.
  double tracked(const RunSample& s, Regime regime) const {
    return regime == Regime::hartree ? s.alpha2 : s.alpha;
  }
};

RunRecord run_single(const SweepConfig& cfg, int particles);

// Runs every N on a worker pool (CONDENSATE_LAB_THREADS caps the worker count). Results are
// sorted by N. Writes run_N<N>.csv, summary.csv and run_meta.json when write_files is set.
std::vector<RunRecord> run_convergence(const SweepConfig& cfg, bool write_files = true);

void write_run_csv(std::ostream& out, const RunRecord& record, const SweepConfig& cfg);
void write_summary_csv(std::ostream& out, const std::vector<RunRecord>& records, const SweepConfig& cfg);

struct ConditionReport {
  double cond1 = 0.0;
  double cond2 = 0.0;
  double cond1_scaled = 0.0;  // N^delta cond1
  double cond2_scaled = 0.0;
};

ConditionReport condition_report(const SweepConfig& cfg, int particles);

struct DerivativeRow {
  double dt = 0.0;
  double max_error = 0.0;
  double max_rate = 0.0;
};

struct DerivativeTable {
  std::vector<DerivativeRow> rows;
  std::vector<double> orders;  // log2(e(2 dt) / e(dt)) for consecutive halvings
};

// Co-evolves Psi_t (Krylov) and phi_t (Strang) with step dt and compares the centered
// difference of <n^> with 2 a1 + 4 a2 along the trajectory.
DerivativeTable derivative_identity_report(const SweepConfig& cfg, int particles,
                                           const std::vector<double>& dt_list);

// ---------------------------------------------------------------------------
struct ScatterRow {
  double beta1 = 0.0;
  double beta2 = 0.0;
  double particles = 0.0;
  MicroStructure micro;
  MicroBounds bounds;
  PositivityResult positivity;
  bool monotone = false;
  bool f_in_unit = false;
  bool f_above_j = false;
};

ScatterRow scatter_point(const RadialPotential& v_base, double radius, double beta1, double beta2,
                         double particles, int grid_points = 2048, int positivity_cells = 20000);

std::string identity_report_json(const std::vector<IdentityReport>& reports, std::uint64_t seed);

}  // namespace condensate
