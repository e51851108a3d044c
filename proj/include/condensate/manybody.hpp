#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>
#include <vector>

#include "condensate/basis.hpp"
#include "condensate/grid.hpp"
#include "condensate/meanfield.hpp"

namespace condensate {

// M-site periodic lattice with spacing h; kinetic term is the second-difference
// Laplacian with hopping 1/h^2.
struct LatticeConfig {
  int sites = 8;
  double spacing = 1.0;

  void validate() const;
  double length() const { return sites * spacing; }
  Eigen::VectorXd positions() const;
  // One-particle kinetic matrix (-Delta_h) in the site basis.
  Eigen::MatrixXd kinetic_matrix() const;
  // Grid carrying the same points, for mean-field co-evolution (needs sites >= 4).
  Grid grid() const { return Grid(sites, length()); }
};

// Pair interaction on lattice displacements. The Hamiltonian sums v_eff over ordered pairs
// j != k, i.e. twice over unordered pairs.
//  - hartree:      v_eff(d) = profile(|d|) / N
//  - onsite_proxy: v_eff(d) = lambda N^(beta-1) / h for d = 0, zero otherwise
struct PairInteraction {
  enum class Scaling { hartree, onsite_proxy };

  std::vector<double> profile;  // v(d) for d = 0..support radius (even extension)
  double beta = 0.0;
  int particles = 1;
  Scaling scaling = Scaling::hartree;
  double lambda = 0.0;

  static PairInteraction none(int particles);
  static PairInteraction hartree(std::vector<double> profile, int particles);
  static PairInteraction onsite_proxy(double lambda, double beta, int particles);

  int support_radius() const;
  bool vanishes() const;
  // Effective pair potential for a lattice displacement (any integer; reduced mod M).
  double effective(int displacement, const LatticeConfig& lattice) const;
  // Mean-field kind whose potential matches the ordered-pair sum at large N:
  // hartree -> kernel 2 v, onsite_proxy -> gp coupling 2 lambda N^beta.
  MeanFieldKind mean_field_kind(const LatticeConfig& lattice) const;
  void validate(const LatticeConfig& lattice) const;
};

// One-particle wave function on the lattice, normalized with the h-weighted l2 norm.
struct LatticeOrbital {
  Eigen::VectorXcd values;
  double spacing = 1.0;

  static LatticeOrbital from_grid(const GridFunction& f);
  GridFunction to_grid() const;
  // sqrt(h) * values: unit vector in the orthonormal site basis.
  Eigen::VectorXcd site_amplitudes() const;
  double norm() const;
};

struct SymmetricState {
  std::shared_ptr<const OccupationBasis> basis;
  Eigen::VectorXcd coeffs;

  int particles() const { return basis->particles(); }
  int sites() const { return basis->sites(); }
  double norm() const { return coeffs.norm(); }
};

SymmetricState random_symmetric_state(std::shared_ptr<const OccupationBasis> basis,
                                      std::uint64_t seed);

// Coefficients of phi^{(x)N} in the occupation basis.
SymmetricState product_state(const LatticeOrbital& phi, std::shared_ptr<const OccupationBasis> basis);

// Applies the one-body operator sum_ij m_ij a_i^dag a_j.
Eigen::VectorXcd apply_one_body(const OccupationBasis& basis, const Eigen::MatrixXcd& m,
                                const Eigen::VectorXcd& in);

// Rigid translation of all particles by one site (n_i -> n_{i+1}).
Eigen::VectorXcd translate_state(const OccupationBasis& basis, const Eigen::VectorXcd& in);

// H(t) = sum_j [-Delta_h + A_t](x_j) + sum_{j != k} v_eff(x_j - x_k).
class ManyBodyHamiltonian {
 public:
  ManyBodyHamiltonian(std::shared_ptr<const OccupationBasis> basis, const LatticeConfig& lattice,
                      const PairInteraction& pair, const ExternalPotential& trap);

  const OccupationBasis& basis() const { return *basis_; }
  std::shared_ptr<const OccupationBasis> basis_ptr() const { return basis_; }
  const LatticeConfig& lattice() const { return lattice_; }
  const ExternalPotential& trap() const { return trap_; }
  bool is_static() const { return trap_.is_static(); }

  // Matrix-free application of H(t).
  void apply(double t, const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const;
  Eigen::VectorXcd apply(double t, const Eigen::VectorXcd& in) const;

  Eigen::VectorXd diagonal(double t) const;
  Eigen::MatrixXd dense(double t) const;
  const Eigen::SparseMatrix<double, Eigen::RowMajor>& static_part() const { return static_part_; }

 private:
  std::shared_ptr<const OccupationBasis> basis_;
  LatticeConfig lattice_;
  ExternalPotential trap_;
  Eigen::SparseMatrix<double, Eigen::RowMajor> static_part_;  // hopping + interaction
  Eigen::MatrixXd site_occupations_;                           // dim x M, for sum_i A_i n_i
};

ManyBodyHamiltonian build_hamiltonian(const LatticeConfig& lattice, const PairInteraction& pair,
                                      const ExternalPotential& trap,
                                      std::size_t max_dimension = OccupationBasis::default_max_dimension);

struct KrylovOptions {
  int dimension = 20;
  double tolerance = 1e-12;
  int max_substeps = 1024;
};

// exp(-i dt H(t + dt/2)) psi via Lanczos on the matrix-free operator. Throws
// std::runtime_error if the error estimate stays above tolerance after substepping.
Eigen::VectorXcd krylov_step(const ManyBodyHamiltonian& h, double t, double dt,
                             const Eigen::VectorXcd& psi, const KrylovOptions& options = {});

struct ManyBodySample {
  double time;
  SymmetricState state;
};

std::vector<ManyBodySample> evolve_krylov(const SymmetricState& state, const ManyBodyHamiltonian& h,
                                          double total_time, double dt, int sample_stride = 1,
                                          const KrylovOptions& options = {});

double energy_per_particle(const SymmetricState& state, const ManyBodyHamiltonian& h, double t);

// Dense first-quantized representation: tensor over M^N site tuples, coordinate 1 most
// significant.
struct FirstQuantizedState {
  int particles = 0;
  int sites = 0;
  Eigen::VectorXcd tensor;

  std::size_t index(std::span<const int> coords) const;
  std::vector<int> coordinates(std::size_t index) const;
  double symmetry_residual() const;
};

struct TensorBudget {
  int max_particles = 5;
  int max_sites = 8;
};

void check_budget(int particles, int sites, const TensorBudget& budget);

FirstQuantizedState to_first_quantized(const SymmetricState& state, const TensorBudget& budget = {});
// Orthogonal projection of the tensor onto the occupation basis (exact inverse on
// symmetric tensors).
SymmetricState from_first_quantized(const FirstQuantizedState& fq,
                                    std::shared_ptr<const OccupationBasis> basis,
                                    const TensorBudget& budget = {});

}  // namespace condensate
