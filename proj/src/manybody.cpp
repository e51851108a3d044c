#include "condensate/manybody.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace condensate {

void LatticeConfig::validate() const {
  if (sites < 2) throw std::invalid_argument("lattice: need at least 2 sites");
  if (!(spacing > 0.0) || !std::isfinite(spacing))
    throw std::invalid_argument("lattice: spacing must be positive");
}

Eigen::VectorXd LatticeConfig::positions() const {
  Eigen::VectorXd x(sites);
  for (int i = 0; i < sites; ++i) x(i) = i * spacing;
  return x;
}

Eigen::MatrixXd LatticeConfig::kinetic_matrix() const {
  validate();
  const double hop = 1.0 / (spacing * spacing);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(sites, sites);
  for (int i = 0; i < sites; ++i) {
    t(i, i) += 2.0 * hop;
    t(i, (i + 1) % sites) -= hop;
    t(i, (i + sites - 1) % sites) -= hop;
  }
  return t;
}

PairInteraction PairInteraction::none(int particles) {
  PairInteraction p;
  p.particles = particles;
  return p;
}

PairInteraction PairInteraction::hartree(std::vector<double> profile, int particles) {
  PairInteraction p;
  p.profile = std::move(profile);
  p.particles = particles;
  p.scaling = Scaling::hartree;
  for (double v : p.profile)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("pair profile must be finite and nonnegative");
  return p;
}

PairInteraction PairInteraction::onsite_proxy(double lambda, double beta, int particles) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("onsite proxy strength must be >= 0");
  PairInteraction p;
  p.lambda = lambda;
  p.beta = beta;
  p.particles = particles;
  p.scaling = Scaling::onsite_proxy;
  return p;
}

int PairInteraction::support_radius() const {
  if (scaling == Scaling::onsite_proxy) return 0;
  return profile.empty() ? 0 : static_cast<int>(profile.size()) - 1;
}

bool PairInteraction::vanishes() const {
  if (scaling == Scaling::onsite_proxy) return lambda == 0.0;
  for (double v : profile)
    if (v != 0.0) return false;
  return true;
}

void PairInteraction::validate(const LatticeConfig& lattice) const {
  if (particles < 1) throw std::invalid_argument("pair interaction: need N >= 1");
  // support radius * h must stay below half the ring.
  if (2 * support_radius() >= lattice.sites)
    throw std::invalid_argument("pair interaction: support radius " +
                                std::to_string(support_radius()) + " exceeds half the ring of " +
                                std::to_string(lattice.sites) + " sites");
}

double PairInteraction::effective(int displacement, const LatticeConfig& lattice) const {
  int d = ((displacement % lattice.sites) + lattice.sites) % lattice.sites;
  d = std::min(d, lattice.sites - d);
  if (scaling == Scaling::onsite_proxy) {
    if (d != 0) return 0.0;
    return lambda * std::pow(static_cast<double>(particles), beta - 1.0) / lattice.spacing;
  }
  if (d >= static_cast<int>(profile.size())) return 0.0;
  return profile[d] / particles;
}

MeanFieldKind PairInteraction::mean_field_kind(const LatticeConfig& lattice) const {
  if (scaling == Scaling::onsite_proxy)
    return make_gross_pitaevskii(2.0 * lambda * std::pow(static_cast<double>(particles), beta));
  GridFunction kernel(lattice.grid());
  for (int i = 0; i < lattice.sites; ++i) {
    const int d = std::min(i, lattice.sites - i);
    if (d < static_cast<int>(profile.size())) kernel.values(i) = 2.0 * profile[d];
  }
  return make_hartree(std::move(kernel));
}

LatticeOrbital LatticeOrbital::from_grid(const GridFunction& f) {
  return {f.values, f.grid.spacing()};
}

GridFunction LatticeOrbital::to_grid() const {
  return GridFunction(Grid(static_cast<int>(values.size()), values.size() * spacing), values);
}

Eigen::VectorXcd LatticeOrbital::site_amplitudes() const { return std::sqrt(spacing) * values; }

double LatticeOrbital::norm() const { return std::sqrt(spacing) * values.norm(); }

SymmetricState random_symmetric_state(std::shared_ptr<const OccupationBasis> basis,
                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXcd c(basis->dimension());
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = cplx(normal(rng), normal(rng));
  c.normalize();
  return {std::move(basis), std::move(c)};
}

SymmetricState product_state(const LatticeOrbital& phi, std::shared_ptr<const OccupationBasis> basis) {
  if (phi.values.size() != basis->sites())
    throw std::invalid_argument("product_state: orbital size does not match lattice");
  const Eigen::VectorXcd c = phi.site_amplitudes();
  const int n = basis->particles();
  std::vector<double> log_factorial(n + 1, 0.0);
  for (int k = 1; k <= n; ++k) log_factorial[k] = log_factorial[k - 1] + std::log(k);

  Eigen::VectorXcd coeffs(basis->dimension());
  for (std::size_t idx = 0; idx < basis->dimension(); ++idx) {
    auto occ = basis->occupation(idx);
    double log_multinomial = log_factorial[n];
    cplx amplitude = 1.0;
    for (int i = 0; i < basis->sites(); ++i) {
      log_multinomial -= log_factorial[occ[i]];
      for (int m = 0; m < occ[i]; ++m) amplitude *= c(i);
    }
    coeffs(idx) = std::exp(0.5 * log_multinomial) * amplitude;
  }
  return {std::move(basis), std::move(coeffs)};
}

Eigen::VectorXcd apply_one_body(const OccupationBasis& basis, const Eigen::MatrixXcd& m,
                                const Eigen::VectorXcd& in) {
  const int sites = basis.sites();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(in.size());
  std::vector<std::uint8_t> work(sites);
  for (std::size_t idx = 0; idx < basis.dimension(); ++idx) {
    const cplx amp = in(idx);
    if (amp == cplx(0.0)) continue;
    auto occ = basis.occupation(idx);
    std::copy(occ.begin(), occ.end(), work.begin());
    for (int j = 0; j < sites; ++j) {
      if (occ[j] == 0) continue;
      out(idx) += m(j, j) * static_cast<double>(occ[j]) * amp;
      work[j] -= 1;
      for (int i = 0; i < sites; ++i) {
        if (i == j || m(i, j) == cplx(0.0)) continue;
        work[i] += 1;
        const double factor = std::sqrt(static_cast<double>(occ[j]) * (occ[i] + 1));
        out(basis.rank(work)) += m(i, j) * factor * amp;
        work[i] -= 1;
      }
      work[j] += 1;
    }
  }
  return out;
}

Eigen::VectorXcd translate_state(const OccupationBasis& basis, const Eigen::VectorXcd& in) {
  const int sites = basis.sites();
  Eigen::VectorXcd out(in.size());
  std::vector<std::uint8_t> work(sites);
  for (std::size_t idx = 0; idx < basis.dimension(); ++idx) {
    auto occ = basis.occupation(idx);
    for (int i = 0; i < sites; ++i) work[(i + 1) % sites] = occ[i];
    out(basis.rank(work)) = in(idx);
  }
  return out;
}

ManyBodyHamiltonian::ManyBodyHamiltonian(std::shared_ptr<const OccupationBasis> basis,
                                         const LatticeConfig& lattice, const PairInteraction& pair,
                                         const ExternalPotential& trap)
    : basis_(std::move(basis)), lattice_(lattice), trap_(trap) {
  lattice_.validate();
  pair.validate(lattice_);
  if (basis_->sites() != lattice_.sites || basis_->particles() != pair.particles)
    throw std::invalid_argument("hamiltonian: basis does not match lattice or particle number");

  const int sites = lattice_.sites;
  const Eigen::MatrixXd kinetic = lattice_.kinetic_matrix();
  std::vector<double> veff(sites);
  for (int d = 0; d < sites; ++d) veff[d] = pair.effective(d, lattice_);

  const std::size_t dim = basis_->dimension();
  site_occupations_.resize(dim, sites);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(dim * (2 * sites + 1));
  std::vector<std::uint8_t> work(sites);

  for (std::size_t idx = 0; idx < dim; ++idx) {
    auto occ = basis_->occupation(idx);
    double diag = 0.0;
    for (int i = 0; i < sites; ++i) {
      site_occupations_(idx, i) = occ[i];
      diag += kinetic(i, i) * occ[i];
      // ordered pairs j != k: same-site pairs n_i (n_i - 1), distinct sites n_i n_l
      diag += veff[0] * occ[i] * (occ[i] - 1.0);
      for (int l = 0; l < sites; ++l)
        if (l != i) diag += veff[(l - i + sites) % sites] * occ[i] * occ[l];
    }
    triplets.emplace_back(idx, idx, diag);

    std::copy(occ.begin(), occ.end(), work.begin());
    for (int j = 0; j < sites; ++j) {
      if (occ[j] == 0) continue;
      work[j] -= 1;
      for (int i = 0; i < sites; ++i) {
        if (i == j || kinetic(i, j) == 0.0) continue;
        work[i] += 1;
        triplets.emplace_back(basis_->rank(work), idx,
                              kinetic(i, j) * std::sqrt(static_cast<double>(occ[j]) * (occ[i] + 1)));
        work[i] -= 1;
      }
      work[j] += 1;
    }
  }
  static_part_.resize(dim, dim);
  static_part_.setFromTriplets(triplets.begin(), triplets.end());
  static_part_.makeCompressed();
}

Eigen::VectorXd ManyBodyHamiltonian::diagonal(double t) const {
  if (trap_.preset() == ExternalPotential::Preset::none)
    return Eigen::VectorXd::Zero(basis_->dimension());
  return site_occupations_ * trap_.sample(lattice_.positions(), t);
}

void ManyBodyHamiltonian::apply(double t, const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const {
  out.noalias() = static_part_ * in;
  if (trap_.preset() != ExternalPotential::Preset::none)
    out.array() += diagonal(t).array() * in.array();
}

Eigen::VectorXcd ManyBodyHamiltonian::apply(double t, const Eigen::VectorXcd& in) const {
  Eigen::VectorXcd out(in.size());
  apply(t, in, out);
  return out;
}

Eigen::MatrixXd ManyBodyHamiltonian::dense(double t) const {
  Eigen::MatrixXd h = Eigen::MatrixXd(static_part_);
  h.diagonal() += diagonal(t);
  return h;
}

ManyBodyHamiltonian build_hamiltonian(const LatticeConfig& lattice, const PairInteraction& pair,
                                      const ExternalPotential& trap, std::size_t max_dimension) {
  auto basis = std::make_shared<const OccupationBasis>(pair.particles, lattice.sites, max_dimension);
  return ManyBodyHamiltonian(std::move(basis), lattice, pair, trap);
}

namespace {

struct LanczosResult {
  Eigen::VectorXcd state;
  double error_estimate;
};

LanczosResult lanczos_exponential(const ManyBodyHamiltonian& h, double t_mid, double dt,
                                  const Eigen::VectorXcd& psi, int max_dim) {
  const double beta0 = psi.norm();
  if (beta0 == 0.0) return {psi, 0.0};
  const Eigen::Index n = psi.size();
  const int m_max = static_cast<int>(std::min<Eigen::Index>(max_dim, n));

  std::vector<Eigen::VectorXcd> v;
  v.reserve(m_max + 1);
  v.push_back(psi / beta0);
  std::vector<double> alpha, beta;
  Eigen::VectorXcd w(n);
  double residual = 0.0;
  int m = 0;
  const double scale = std::max(1.0, h.static_part().cwiseAbs().sum() / std::max<Eigen::Index>(1, n));
  for (int j = 0; j < m_max; ++j) {
    h.apply(t_mid, v[j], w);
    const double a = v[j].dot(w).real();
    alpha.push_back(a);
    w -= a * v[j];
    if (j > 0) w -= beta[j - 1] * v[j - 1];
    // Full reorthogonalization keeps the small basis orthonormal to round-off.
    for (int pass = 0; pass < 2; ++pass)
      for (int k = 0; k <= j; ++k) w -= v[k].dot(w) * v[k];
    const double b = w.norm();
    m = j + 1;
    if (b <= 1e-14 * scale) {  // invariant subspace: the projection is exact
      residual = 0.0;
      break;
    }
    residual = b;
    if (j + 1 < m_max) {
      beta.push_back(b);
      v.push_back(w / b);
    } else if (m_max == n) {
      residual = 0.0;
    }
  }

  Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
  for (int j = 0; j < m; ++j) {
    tri(j, j) = alpha[j];
    if (j + 1 < m) tri(j, j + 1) = tri(j + 1, j) = beta[j];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(tri);
  const Eigen::MatrixXd& vecs = eig.eigenvectors();
  Eigen::VectorXcd phases(m);
  for (int j = 0; j < m; ++j) phases(j) = std::polar(1.0, -dt * eig.eigenvalues()(j));
  const Eigen::VectorXcd y = vecs.cast<cplx>() * phases.cwiseProduct(vecs.row(0).transpose().cast<cplx>());

  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
  for (int j = 0; j < m; ++j) out += y(j) * v[j];
  out *= beta0;
  return {out, beta0 * residual * std::abs(y(m - 1))};
}

Eigen::VectorXcd krylov_substep(const ManyBodyHamiltonian& h, double t_mid, double dt,
                                const Eigen::VectorXcd& psi, const KrylovOptions& options,
                                int depth) {
  LanczosResult r = lanczos_exponential(h, t_mid, dt, psi, options.dimension);
  if (r.error_estimate <= options.tolerance) return r.state;
  if ((1 << depth) >= options.max_substeps)
    throw std::runtime_error("krylov_step: error estimate " + std::to_string(r.error_estimate) +
                             " above tolerance " + std::to_string(options.tolerance));
  // Same frozen generator on both halves, so splitting is exact.
  Eigen::VectorXcd half = krylov_substep(h, t_mid, dt / 2.0, psi, options, depth + 1);
  return krylov_substep(h, t_mid, dt / 2.0, half, options, depth + 1);
}

}  // namespace

Eigen::VectorXcd krylov_step(const ManyBodyHamiltonian& h, double t, double dt,
                             const Eigen::VectorXcd& psi, const KrylovOptions& options) {
  if (options.dimension < 1) throw std::invalid_argument("krylov_step: dimension must be >= 1");
  return krylov_substep(h, t + dt / 2.0, dt, psi, options, 0);
}

std::vector<ManyBodySample> evolve_krylov(const SymmetricState& state, const ManyBodyHamiltonian& h,
                                          double total_time, double dt, int sample_stride,
                                          const KrylovOptions& options) {
  if (!(dt > 0.0)) throw std::invalid_argument("evolve_krylov: dt must be positive");
  if (sample_stride < 1) throw std::invalid_argument("evolve_krylov: stride must be >= 1");
  std::vector<ManyBodySample> out;
  out.push_back({0.0, state});
  if (total_time <= 0.0) return out;
  const long steps = std::max(1L, std::lround(total_time / dt));
  const double step = total_time / static_cast<double>(steps);
  Eigen::VectorXcd psi = state.coeffs;
  for (long n = 0; n < steps; ++n) {
    psi = krylov_step(h, n * step, step, psi, options);
    if ((n + 1) % sample_stride == 0 || n + 1 == steps)
      out.push_back({(n + 1) * step, SymmetricState{state.basis, psi}});
  }
  return out;
}

double energy_per_particle(const SymmetricState& state, const ManyBodyHamiltonian& h, double t) {
  return state.coeffs.dot(h.apply(t, state.coeffs)).real() / state.particles();
}

}  // namespace condensate
