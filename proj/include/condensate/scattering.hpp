#pragma once

#include <functional>
#include <optional>
#include <vector>

namespace condensate {

// Spherically symmetric potential v(r) with compact support, stored as disjoint radial
// pieces. Constant pieces are propagated exactly by the zero-energy solver; profile
// pieces are integrated with classical RK4 at `steps` steps per piece.
class RadialPotential {
 public:
  struct Piece {
    double begin = 0.0;
    double end = 0.0;
    double value = 0.0;                     // used when profile is empty
    std::function<double(double)> profile;  // v(r) on [begin, end)
    bool is_constant() const { return !profile; }
    double at(double r) const { return profile ? profile(r) : value; }
  };

  static constexpr int default_steps = 512;

  static RadialPotential zero();
  // height * 1_{r < radius}; height < 0 requires nonnegative = false.
  static RadialPotential square(double height, double radius, bool nonnegative = true);
  static RadialPotential from_function(std::function<double(double)> v, double support,
                                       bool nonnegative = true, int steps = default_steps);
  // Samples v(r_i) at r_i = i * dr, i = 1..P, linearly interpolated (v(0) = v(r_1)).
  static RadialPotential from_samples(double dr, std::vector<double> samples, bool nonnegative = true,
                                      int steps = default_steps);

  // amplitude * v(r / length)
  RadialPotential scaled(double amplitude, double length) const;
  // Adds `value` on [begin, end); the interval must not overlap existing pieces.
  RadialPotential with_shelf(double begin, double end, double value, bool nonnegative) const;
  RadialPotential with_steps(int steps) const;

  double operator()(double r) const;
  const std::vector<Piece>& pieces() const { return pieces_; }
  double support_radius() const;
  bool nonnegative() const { return nonnegative_; }
  int steps() const { return steps_; }
  bool vanishes() const;

  double sup_norm() const;
  // 4 pi int |v| r^2 dr
  double l1_norm() const;
  // int v r^2 dr (signed)
  double radial_moment() const;
  std::vector<double> samples(double dr) const;

 private:
  std::vector<Piece> pieces_;  // sorted, disjoint
  bool nonnegative_ = true;
  int steps_ = default_steps;

  void check_sign() const;
};

// Zero-energy radial solution u = r f of -u'' + v u = 0, u(0) = 0, normalized so that
// u(r) = r - a beyond the support.
struct ScatteringSolution {
  double a = 0.0;
  double match_radius = 0.0;
  std::vector<double> r;
  std::vector<double> u;
  std::vector<double> f;
};

// Scattering length only (no profile sampling).
double scattering_length_value(const RadialPotential& v);

// Samples the profile at `points` uniform radii on [0, match_radius]; match_radius defaults
// to 1.25 times the support radius. Throws std::runtime_error near a zero-energy resonance.
ScatteringSolution scattering_length(const RadialPotential& v, int points = 513,
                                     std::optional<double> match_radius = std::nullopt);

// Zero-energy state f = u / (c r) normalized to 1 at infinity, at arbitrary ascending radii.
std::vector<double> zero_energy_state(const RadialPotential& v, const std::vector<double>& radii);

// int v r^2 dr, i.e. (1/4 pi) int v d^3x: first-order value of the scattering length.
double born_approximation(const RadialPotential& v);

struct MicroStructure {
  double beta1 = 0.0;
  double beta2 = 0.0;
  double particles = 0.0;
  double a = 0.0;  // N * scat(v_{beta2})
  double amplitude = 0.0;
  double inner_radius = 0.0;
  double outer_radius = 0.0;
  double residual_scattering_length = 0.0;  // scat(v - W) at outer_radius
  double K = 1.0;
  double K_spread = 0.0;  // max relative deviation of j / f from K on the inner region
  RadialPotential interaction;  // v_{beta2}
  RadialPotential effective;    // v_{beta2} - W
  std::vector<double> r;  // uniform segments of segment_points intervals sharing endpoints
  int segment_points = 0;
  std::vector<double> f;
  std::vector<double> g;
  std::vector<double> j;  // zero-energy state of v_{beta2}
};

struct MicroOptions {
  int scan_samples = 16;
  double cap_factor = 4.0;  // initial bracket cap, in units of N^-beta1
  int cap_growths = 8;
  int grid_points = 2048;   // per radial segment
};

// v_{beta2}(r) = N^(-1+3 beta2) v_base(N^beta2 r). `radius` bounds the support of v_base.
MicroStructure build_micro(const RadialPotential& v_base, double beta1, double beta2, double particles,
                           double radius, const MicroOptions& options = {});

struct MicroBounds {
  double l2_g = 0.0;
  double l1_g = 0.0;
  double bound_l2 = 0.0;
  double bound_l1 = 0.0;
  double max_pointwise_ratio = 0.0;  // max N r |g(r)| / a
  bool l2_ok = false;
  bool l1_ok = false;
  bool pointwise_ok = false;
  double wf_l1 = 0.0;         // 4 pi int W f r^2 dr
  double wf_deviation = 0.0;  // N^(1-beta1) (wf_l1 / 4 pi - a / N)
  bool all_ok() const { return l2_ok && l1_ok && pointwise_ok; }
};

MicroBounds micro_norms(const MicroStructure& ms);

struct PositivityResult {
  double lowest_eigenvalue = 0.0;
  double scale = 1.0;
  double box_radius = 0.0;
  bool positive = false;
};

// Lowest Dirichlet eigenvalue of -d^2/dr^2 + v on (0, box_radius) via a finite-difference
// tridiagonal with cell-averaged potential and Sturm bisection.
PositivityResult positivity_check(const RadialPotential& v, double box_radius, int cells = 20000,
                                  double tolerance = 1e-8);

struct ClassRow {
  double particles = 0.0;
  double l1 = 0.0;
  double linf = 0.0;
  double support = 0.0;
  double scat = 0.0;
  double scaled_linf = 0.0;  // N^(1-3 beta) ||v||_inf
  double deviation = 0.0;    // N^(1+delta) (||v||_1 - a/N)  or  N^(1+delta) (scat - a/N)
  double relative_gap = 0.0; // (value - a/N) / (a/N)
};

struct ClassReport {
  double beta = 0.0;
  double delta = 0.0;
  double a = 0.0;
  std::vector<ClassRow> rows;
  double linf_slope = 0.0;
  double deviation_slope = 0.0;
};

// v^N(r) = N^(-1+3 beta) v_base(N^beta r). The reference a defaults to ||v_base||_1 for
// beta < 1 and scat(v_base) for beta = 1.
ClassReport class_check(const RadialPotential& v_base, double beta, const std::vector<double>& n_list,
                        double delta, std::optional<double> reference_a = std::nullopt);

}  // namespace condensate
