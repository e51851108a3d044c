#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "condensate/manybody.hpp"

namespace condensate {

// Weights f : {0..N} -> R defining f^ = sum_k f(k) P_k, and its translates
// f^_d = sum_k f(k - d) P_k (terms with k - d outside {0..N} vanish).
struct HatWeights {
  std::vector<double> values;
  int shift = 0;

  static HatWeights counting(int particles);                  // n(k) = sqrt(k/N)
  static HatWeights moment(int particles, double gamma);      // (k/N)^(gamma/2)
  static HatWeights constant(int particles, double value);

  int particles() const { return static_cast<int>(values.size()) - 1; }
  HatWeights shifted(int d) const;
  double at(int k) const;

  void validate() const;
};

// Pointwise product of unshifted weights.
HatWeights operator*(const HatWeights& f, const HatWeights& g);

// w_k = ||P_k Psi||^2.
struct SpectralWeights {
  std::vector<double> w;
  double total() const;
};

struct OneParticleDensity {
  Eigen::MatrixXcd mu;  // site basis, trace 1; as an integral kernel it is mu / h
  double condensate_overlap = 0.0;
};

// Functionals whose combination 2 a1 + 4 a2 is the time derivative of <Psi, n^ Psi>.
struct DerivativeTerms {
  double a1 = 0.0;
  double a2 = 0.0;
  double rate() const { return 2.0 * a1 + 4.0 * a2; }
};

// ---------------------------------------------------------------------------
// Second-quantized backend: P_k from Lagrange polynomials in the mode-number
// operator N_phi = a_phi^dag a_phi, which has eigenvalue N - k on Ran P_k.
class ModeNumber {
 public:
  explicit ModeNumber(std::shared_ptr<const OccupationBasis> basis);

  const OccupationBasis& basis() const { return *basis_; }

  // a_phi psi in the (N-1)-particle basis, for a unit site-basis orbital c.
  Eigen::VectorXcd annihilate(const Eigen::VectorXcd& c, const Eigen::VectorXcd& psi) const;
  Eigen::VectorXcd create(const Eigen::VectorXcd& c, const Eigen::VectorXcd& chi) const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& c, const Eigen::VectorXcd& psi) const;

  // All P_k psi, k = 0..N.
  std::vector<Eigen::VectorXcd> components(const Eigen::VectorXcd& c, const Eigen::VectorXcd& psi) const;

  // mu_xy = <a_y^dag a_x> / N in the orthonormal site basis.
  Eigen::MatrixXcd density(const Eigen::VectorXcd& psi) const;

 private:
  std::shared_ptr<const OccupationBasis> basis_;
  std::size_t lower_dimension_ = 0;
  std::vector<std::int64_t> lower_index_;  // dim x M, -1 where n_j = 0
  std::vector<double> root_occupation_;    // dim x M, sqrt(n_j)
};

Eigen::VectorXcd combine_components(const std::vector<Eigen::VectorXcd>& components,
                                    const HatWeights& f);

SpectralWeights pk_weights(const SymmetricState& state, const LatticeOrbital& phi);
Eigen::VectorXcd apply_hat(const SymmetricState& state, const LatticeOrbital& phi,
                           const HatWeights& f);
double alpha_moment(const SymmetricState& state, const LatticeOrbital& phi, double gamma);
double alpha_moment(const SpectralWeights& weights, double gamma);
OneParticleDensity reduced_density(const SymmetricState& state, const LatticeOrbital& phi);

// ---------------------------------------------------------------------------
// First-quantized backend: operators on distinguished coordinates (1-based as in
// p_1, q_2), acting on M^N tensors.
namespace tensor_ops {

Eigen::VectorXcd apply_p(const Eigen::VectorXcd& psi, int particles, int sites, int coordinate,
                         const Eigen::VectorXcd& c);
Eigen::VectorXcd apply_q(const Eigen::VectorXcd& psi, int particles, int sites, int coordinate,
                         const Eigen::VectorXcd& c);

// P_{j,k} psi for k = 0..j, summed over the 0/1 strings with k ones acting on the last j
// coordinates.
std::vector<Eigen::VectorXcd> block_projections(const Eigen::VectorXcd& psi, int particles,
                                                int sites, int block, const Eigen::VectorXcd& c);

Eigen::VectorXcd apply_hat(const Eigen::VectorXcd& psi, int particles, int sites,
                           const Eigen::VectorXcd& c, const HatWeights& f);

// Multiplication by w(x_1, x_2) (w given as an M x M matrix).
Eigen::VectorXcd multiply_pair(const Eigen::VectorXcd& psi, int particles, int sites,
                               const Eigen::MatrixXcd& w);
// Multiplication by w(x_j).
Eigen::VectorXcd multiply_one(const Eigen::VectorXcd& psi, int particles, int sites,
                              int coordinate, const Eigen::VectorXcd& w);

}  // namespace tensor_ops

SpectralWeights pk_weights_first_quantized(const FirstQuantizedState& fq, const LatticeOrbital& phi);

// h_{1,2} = (N-1) v_eff(x_1 - x_2) - V(x_1)/2 - V(x_2)/2 on the site grid.
Eigen::MatrixXd pair_coupling(const LatticeConfig& lattice, const PairInteraction& pair,
                              const Eigen::VectorXd& mean_field);

// a1 = N Im <h_{1,2} (n^ - n^_{-2}) p1 p2 Psi, Psi>, a2 = N Im <h_{1,2} (n^ - n^_{-1}) p1 q2 Psi, Psi>
// with <.,.> conjugate-linear in the first slot. Runs on the tensor backend.
DerivativeTerms alpha_derivative_terms(const SymmetricState& state, const LatticeOrbital& phi,
                                       const LatticeConfig& lattice, const PairInteraction& pair,
                                       const MeanFieldKind& kind, const TensorBudget& budget = {});

// ---------------------------------------------------------------------------
struct IdentityReport {
  std::uint64_t seed = 0;
  int particles = 0;
  int sites = 0;
  int trials = 0;
  std::map<std::string, double> residuals;  // exact identities: max residual
  std::map<std::string, double> margins;    // inequalities: max (lhs - rhs), <= 0 means holds
  std::map<std::string, int> violations;    // inequalities: count of trials with lhs > rhs + slack

  double max_residual() const;
  int total_violations() const;
};

IdentityReport identity_suite(std::uint64_t seed, int particles, int sites, int trials,
                              double inequality_slack = 1e-12);

}  // namespace condensate
