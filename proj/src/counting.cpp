#include "condensate/counting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace condensate {

// ---------------------------------------------------------------------------
// HatWeights

HatWeights HatWeights::counting(int particles) {
  if (particles < 1) throw std::invalid_argument("HatWeights: need N >= 1");
  HatWeights f;
  f.values.resize(particles + 1);
  for (int k = 0; k <= particles; ++k) f.values[k] = std::sqrt(static_cast<double>(k) / particles);
  return f;
}

HatWeights HatWeights::moment(int particles, double gamma) {
  if (particles < 1) throw std::invalid_argument("HatWeights: need N >= 1");
  HatWeights f;
  f.values.resize(particles + 1);
  for (int k = 0; k <= particles; ++k)
    f.values[k] = k == 0 ? 0.0 : std::pow(static_cast<double>(k) / particles, gamma / 2.0);
  return f;
}

HatWeights HatWeights::constant(int particles, double value) {
  HatWeights f;
  f.values.assign(particles + 1, value);
  return f;
}

HatWeights HatWeights::shifted(int d) const {
  HatWeights f = *this;
  f.shift += d;
  return f;
}

double HatWeights::at(int k) const {
  const int j = k - shift;
  if (j < 0 || j >= static_cast<int>(values.size())) return 0.0;
  return values[j];
}

void HatWeights::validate() const {
  if (values.empty()) throw std::invalid_argument("HatWeights: empty weight table");
  for (double v : values)
    if (!std::isfinite(v)) throw std::invalid_argument("HatWeights: non-finite weight");
}

HatWeights operator*(const HatWeights& f, const HatWeights& g) {
  if (f.values.size() != g.values.size() || f.shift != 0 || g.shift != 0)
    throw std::invalid_argument("HatWeights product needs unshifted weights of equal length");
  HatWeights out = f;
  for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] *= g.values[k];
  return out;
}

double SpectralWeights::total() const { return std::accumulate(w.begin(), w.end(), 0.0); }

// ---------------------------------------------------------------------------
// Second-quantized backend

ModeNumber::ModeNumber(std::shared_ptr<const OccupationBasis> basis) : basis_(std::move(basis)) {
  const int n = basis_->particles();
  const int m = basis_->sites();
  if (n < 1) throw std::invalid_argument("ModeNumber: need N >= 1");
  const OccupationBasis lower(n - 1, m, std::numeric_limits<std::size_t>::max());
  lower_dimension_ = lower.dimension();
  const std::size_t dim = basis_->dimension();
  lower_index_.assign(dim * m, -1);
  root_occupation_.assign(dim * m, 0.0);
  std::vector<std::uint8_t> work(m);
  for (std::size_t idx = 0; idx < dim; ++idx) {
    auto occ = basis_->occupation(idx);
    std::copy(occ.begin(), occ.end(), work.begin());
    for (int j = 0; j < m; ++j) {
      if (occ[j] == 0) continue;
      work[j] -= 1;
      lower_index_[idx * m + j] = static_cast<std::int64_t>(lower.rank(work));
      root_occupation_[idx * m + j] = std::sqrt(static_cast<double>(occ[j]));
      work[j] += 1;
    }
  }
}

Eigen::VectorXcd ModeNumber::annihilate(const Eigen::VectorXcd& c, const Eigen::VectorXcd& psi) const {
  const int m = basis_->sites();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(lower_dimension_);
  for (std::size_t idx = 0; idx < basis_->dimension(); ++idx) {
    const cplx amp = psi(idx);
    for (int j = 0; j < m; ++j) {
      const std::int64_t l = lower_index_[idx * m + j];
      if (l >= 0) out(l) += std::conj(c(j)) * root_occupation_[idx * m + j] * amp;
    }
  }
  return out;
}

Eigen::VectorXcd ModeNumber::create(const Eigen::VectorXcd& c, const Eigen::VectorXcd& chi) const {
  const int m = basis_->sites();
  Eigen::VectorXcd out(basis_->dimension());
  for (std::size_t idx = 0; idx < basis_->dimension(); ++idx) {
    cplx acc = 0.0;
    for (int j = 0; j < m; ++j) {
      const std::int64_t l = lower_index_[idx * m + j];
      if (l >= 0) acc += c(j) * root_occupation_[idx * m + j] * chi(l);
    }
    out(idx) = acc;
  }
  return out;
}

Eigen::VectorXcd ModeNumber::apply(const Eigen::VectorXcd& c, const Eigen::VectorXcd& psi) const {
  return create(c, annihilate(c, psi));
}

std::vector<Eigen::VectorXcd> ModeNumber::components(const Eigen::VectorXcd& c,
                                                     const Eigen::VectorXcd& psi) const {
  const int n = basis_->particles();
  // Unnormalized Lagrange products prod_{m != e} (N_phi - m) psi for every eigenvalue e,
  // by divide and conquer over the eigenvalue range: O(N log N) applications.
  std::vector<Eigen::VectorXcd> by_eigenvalue(n + 1);
  auto recurse = [&](auto&& self, const Eigen::VectorXcd& vec, int lo, int hi) -> void {
    if (hi - lo == 1) {
      by_eigenvalue[lo] = vec;
      return;
    }
    const int mid = (lo + hi) / 2;
    Eigen::VectorXcd left = vec;
    for (int e = mid; e < hi; ++e) left = apply(c, left) - static_cast<double>(e) * left;
    self(self, left, lo, mid);
    Eigen::VectorXcd right = vec;
    for (int e = lo; e < mid; ++e) right = apply(c, right) - static_cast<double>(e) * right;
    self(self, right, mid, hi);
  };
  recurse(recurse, psi, 0, n + 1);

  std::vector<Eigen::VectorXcd> out(n + 1);
  for (int e = 0; e <= n; ++e) {
    double denom = 1.0;
    for (int m = 0; m <= n; ++m)
      if (m != e) denom *= static_cast<double>(e - m);
    out[n - e] = by_eigenvalue[e] / denom;
  }
  return out;
}

Eigen::MatrixXcd ModeNumber::density(const Eigen::VectorXcd& psi) const {
  const int m = basis_->sites();
  Eigen::MatrixXcd lowered = Eigen::MatrixXcd::Zero(lower_dimension_, m);  // column x: a_x psi
  for (std::size_t idx = 0; idx < basis_->dimension(); ++idx)
    for (int j = 0; j < m; ++j) {
      const std::int64_t l = lower_index_[idx * m + j];
      if (l >= 0) lowered(l, j) += root_occupation_[idx * m + j] * psi(idx);
    }
  const Eigen::MatrixXcd gram = lowered.adjoint() * lowered;  // gram(y, x) = <a_y psi, a_x psi>
  return gram.transpose() / static_cast<double>(basis_->particles());
}

Eigen::VectorXcd combine_components(const std::vector<Eigen::VectorXcd>& components,
                                    const HatWeights& f) {
  if (components.empty()) throw std::invalid_argument("combine_components: no components");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(components.front().size());
  for (int k = 0; k < static_cast<int>(components.size()); ++k) {
    const double w = f.at(k);
    if (w != 0.0) out += w * components[k];
  }
  return out;
}

namespace {

Eigen::VectorXcd checked_amplitudes(const LatticeOrbital& phi, int sites) {
  if (static_cast<int>(phi.values.size()) != sites)
    throw std::invalid_argument("orbital size does not match the lattice");
  const double norm = phi.norm();
  if (std::abs(norm - 1.0) > 1e-9)
    throw std::invalid_argument("orbital is not normalized (norm " + std::to_string(norm) + ")");
  return phi.site_amplitudes();
}

SpectralWeights weights_of(const std::vector<Eigen::VectorXcd>& components) {
  SpectralWeights out;
  for (const auto& v : components) out.w.push_back(v.squaredNorm());
  return out;
}

}  // namespace

SpectralWeights pk_weights(const SymmetricState& state, const LatticeOrbital& phi) {
  const Eigen::VectorXcd c = checked_amplitudes(phi, state.sites());
  return weights_of(ModeNumber(state.basis).components(c, state.coeffs));
}

Eigen::VectorXcd apply_hat(const SymmetricState& state, const LatticeOrbital& phi,
                           const HatWeights& f) {
  f.validate();
  const Eigen::VectorXcd c = checked_amplitudes(phi, state.sites());
  return combine_components(ModeNumber(state.basis).components(c, state.coeffs), f);
}

double alpha_moment(const SpectralWeights& weights, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("alpha_moment: gamma must be positive");
  const int n = static_cast<int>(weights.w.size()) - 1;
  double sum = 0.0;
  for (int k = 1; k <= n; ++k)
    sum += std::pow(static_cast<double>(k) / n, gamma / 2.0) * weights.w[k];
  return sum;
}

double alpha_moment(const SymmetricState& state, const LatticeOrbital& phi, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("alpha_moment: gamma must be positive");
  return alpha_moment(pk_weights(state, phi), gamma);
}

OneParticleDensity reduced_density(const SymmetricState& state, const LatticeOrbital& phi) {
  const Eigen::VectorXcd c = checked_amplitudes(phi, state.sites());
  OneParticleDensity out;
  out.mu = ModeNumber(state.basis).density(state.coeffs);
  out.condensate_overlap = c.dot(out.mu * c).real();
  return out;
}

// ---------------------------------------------------------------------------
// First-quantized backend

namespace tensor_ops {

namespace {

std::size_t power(int base, int exponent) {
  std::size_t out = 1;
  for (int i = 0; i < exponent; ++i) out *= static_cast<std::size_t>(base);
  return out;
}

void check_coordinate(int particles, int coordinate) {
  if (coordinate < 1 || coordinate > particles)
    throw std::out_of_range("tensor_ops: coordinate " + std::to_string(coordinate) + " outside 1.." +
                            std::to_string(particles));
}

}  // namespace

Eigen::VectorXcd apply_p(const Eigen::VectorXcd& psi, int particles, int sites, int coordinate,
                         const Eigen::VectorXcd& c) {
  check_coordinate(particles, coordinate);
  const std::size_t pre = power(sites, coordinate - 1);
  const std::size_t post = power(sites, particles - coordinate);
  Eigen::VectorXcd out(psi.size());
  for (std::size_t a = 0; a < pre; ++a)
    for (std::size_t b = 0; b < post; ++b) {
      cplx overlap = 0.0;
      for (int y = 0; y < sites; ++y) overlap += std::conj(c(y)) * psi((a * sites + y) * post + b);
      for (int x = 0; x < sites; ++x) out((a * sites + x) * post + b) = c(x) * overlap;
    }
  return out;
}

Eigen::VectorXcd apply_q(const Eigen::VectorXcd& psi, int particles, int sites, int coordinate,
                         const Eigen::VectorXcd& c) {
  return psi - apply_p(psi, particles, sites, coordinate, c);
}

std::vector<Eigen::VectorXcd> block_projections(const Eigen::VectorXcd& psi, int particles,
                                                int sites, int block, const Eigen::VectorXcd& c) {
  if (block < 0 || block > particles) throw std::out_of_range("block_projections: bad block size");
  // Expanding the sum over 0/1 strings one coordinate at a time: after processing l
  // coordinates, terms[k] holds the partial sum over strings with k ones so far.
  std::vector<Eigen::VectorXcd> terms{psi};
  for (int l = 1; l <= block; ++l) {
    const int coordinate = particles - block + l;
    std::vector<Eigen::VectorXcd> next(terms.size() + 1, Eigen::VectorXcd::Zero(psi.size()));
    for (std::size_t k = 0; k < terms.size(); ++k) {
      const Eigen::VectorXcd p = apply_p(terms[k], particles, sites, coordinate, c);
      next[k] += p;
      next[k + 1] += terms[k] - p;
    }
    terms = std::move(next);
  }
  return terms;
}

Eigen::VectorXcd apply_hat(const Eigen::VectorXcd& psi, int particles, int sites,
                           const Eigen::VectorXcd& c, const HatWeights& f) {
  return combine_components(block_projections(psi, particles, sites, particles, c), f);
}

Eigen::VectorXcd multiply_pair(const Eigen::VectorXcd& psi, int particles, int sites,
                               const Eigen::MatrixXcd& w) {
  if (particles < 2) throw std::invalid_argument("multiply_pair: need N >= 2");
  const std::size_t post = power(sites, particles - 2);
  Eigen::VectorXcd out(psi.size());
  for (int x1 = 0; x1 < sites; ++x1)
    for (int x2 = 0; x2 < sites; ++x2) {
      const std::size_t base = (static_cast<std::size_t>(x1) * sites + x2) * post;
      out.segment(base, post) = w(x1, x2) * psi.segment(base, post);
    }
  return out;
}

Eigen::VectorXcd multiply_one(const Eigen::VectorXcd& psi, int particles, int sites,
                              int coordinate, const Eigen::VectorXcd& w) {
  check_coordinate(particles, coordinate);
  const std::size_t pre = power(sites, coordinate - 1);
  const std::size_t post = power(sites, particles - coordinate);
  Eigen::VectorXcd out(psi.size());
  for (std::size_t a = 0; a < pre; ++a)
    for (int x = 0; x < sites; ++x) {
      const std::size_t base = (a * sites + x) * post;
      out.segment(base, post) = w(x) * psi.segment(base, post);
    }
  return out;
}

}  // namespace tensor_ops

SpectralWeights pk_weights_first_quantized(const FirstQuantizedState& fq, const LatticeOrbital& phi) {
  const Eigen::VectorXcd c = checked_amplitudes(phi, fq.sites);
  return weights_of(
      tensor_ops::block_projections(fq.tensor, fq.particles, fq.sites, fq.particles, c));
}

Eigen::MatrixXd pair_coupling(const LatticeConfig& lattice, const PairInteraction& pair,
                              const Eigen::VectorXd& mean_field) {
  const int m = lattice.sites;
  if (mean_field.size() != m) throw std::invalid_argument("pair_coupling: potential size mismatch");
  Eigen::MatrixXd h(m, m);
  for (int x1 = 0; x1 < m; ++x1)
    for (int x2 = 0; x2 < m; ++x2)
      h(x1, x2) = (pair.particles - 1) * pair.effective(x1 - x2, lattice) -
                  0.5 * mean_field(x1) - 0.5 * mean_field(x2);
  return h;
}

DerivativeTerms alpha_derivative_terms(const SymmetricState& state, const LatticeOrbital& phi,
                                       const LatticeConfig& lattice, const PairInteraction& pair,
                                       const MeanFieldKind& kind, const TensorBudget& budget) {
  const int n = state.particles();
  const int m = state.sites();
  check_budget(n, m, budget);
  if (n < 2) return {};
  if (lattice.sites != m || pair.particles != n)
    throw std::invalid_argument("alpha_derivative_terms: lattice or particle number mismatch");
  const Eigen::VectorXcd c = checked_amplitudes(phi, m);
  const FirstQuantizedState fq = to_first_quantized(state, budget);
  const Eigen::VectorXd mean_field = mean_field_potential(kind, phi.to_grid());
  const Eigen::MatrixXcd h12 = pair_coupling(lattice, pair, mean_field).cast<cplx>();

  const HatWeights count = HatWeights::counting(n);
  const auto& psi = fq.tensor;
  const Eigen::VectorXcd p2 = tensor_ops::apply_p(psi, n, m, 2, c);
  const Eigen::VectorXcd p1p2 = tensor_ops::apply_p(p2, n, m, 1, c);
  const Eigen::VectorXcd p1q2 = tensor_ops::apply_p(psi - p2, n, m, 1, c);

  auto term = [&](const Eigen::VectorXcd& v, int shift) {
    const auto comps = tensor_ops::block_projections(v, n, m, n, c);
    const Eigen::VectorXcd diff =
        combine_components(comps, count) - combine_components(comps, count.shifted(shift));
    const cplx value = psi.dot(tensor_ops::multiply_pair(diff, n, m, h12));
    return -static_cast<double>(n) * value.imag();
  };
  return {term(p1p2, -2), term(p1q2, -1)};
}

// ---------------------------------------------------------------------------
// Identity suite

double IdentityReport::max_residual() const {
  double worst = 0.0;
  for (const auto& [name, value] : residuals) worst = std::max(worst, value);
  return worst;
}

int IdentityReport::total_violations() const {
  int total = 0;
  for (const auto& [name, count] : violations) total += count;
  return total;
}

namespace {

struct TrialContext {
  int n;
  int m;
  Eigen::VectorXcd c;
  Eigen::VectorXcd psi;

  Eigen::VectorXcd p(const Eigen::VectorXcd& v, int j) const { return tensor_ops::apply_p(v, n, m, j, c); }
  Eigen::VectorXcd q(const Eigen::VectorXcd& v, int j) const { return tensor_ops::apply_q(v, n, m, j, c); }
  Eigen::VectorXcd hat(const Eigen::VectorXcd& v, const HatWeights& f) const {
    return tensor_ops::apply_hat(v, n, m, c, f);
  }
  // Q_0 = p1 p2, Q_1 = p1 q2, Q_2 = q1 q2
  Eigen::VectorXcd big_q(const Eigen::VectorXcd& v, int j) const {
    switch (j) {
      case 0: return p(p(v, 2), 1);
      case 1: return p(q(v, 2), 1);
      default: return q(q(v, 2), 1);
    }
  }
};

void record_max(std::map<std::string, double>& table, const std::string& key, double value) {
  auto [it, inserted] = table.emplace(key, value);
  if (!inserted) it->second = std::max(it->second, value);
}

}  // namespace

IdentityReport identity_suite(std::uint64_t seed, int particles, int sites, int trials,
                              double inequality_slack) {
  if (particles < 2) throw std::invalid_argument("identity_suite: need N >= 2");
  if (trials < 1) throw std::invalid_argument("identity_suite: need at least one trial");
  const TensorBudget budget;
  check_budget(particles, sites, budget);

  IdentityReport report;
  report.seed = seed;
  report.particles = particles;
  report.sites = sites;
  report.trials = trials;
  for (const char* name : {"komb2", "komb6"}) {
    report.violations[name] = 0;
    report.margins[name] = -std::numeric_limits<double>::infinity();
  }

  auto basis = std::make_shared<const OccupationBasis>(particles, sites);
  const ModeNumber modes(basis);
  const int n = particles;
  const int m = sites;
  const double spacing = 1.0 / m;

  for (int trial = 0; trial < trials; ++trial) {
    // Per-trial stream so results do not depend on evaluation order.
    std::seed_seq seq{seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(m),
                      static_cast<std::uint64_t>(trial)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    LatticeOrbital phi{Eigen::VectorXcd(m), spacing};
    for (int i = 0; i < m; ++i) phi.values(i) = cplx(normal(rng), normal(rng));
    phi.values /= phi.norm();
    const Eigen::VectorXcd c = phi.site_amplitudes();

    // Odd trials sit close to the condensate so the inequalities are tested where they bite.
    SymmetricState state = random_symmetric_state(basis, rng());
    if (trial % 2 == 1) {
      const double eps = std::pow(10.0, -4.0 * uniform(rng));
      state.coeffs = product_state(phi, basis).coeffs + eps * state.coeffs;
      state.coeffs.normalize();
    }

    HatWeights f, g;
    f.values.resize(n + 1);
    g.values.resize(n + 1);
    for (int k = 0; k <= n; ++k) {
      f.values[k] = uniform(rng);
      g.values[k] = uniform(rng);
    }
    Eigen::VectorXcd w(m);
    for (int i = 0; i < m; ++i) w(i) = std::polar(uniform(rng), 2.0 * std::numbers::pi * uniform(rng));
    Eigen::MatrixXcd v(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) v(i, j) = normal(rng);

    const FirstQuantizedState fq = to_first_quantized(state, budget);
    const TrialContext ctx{n, m, c, fq.tensor};
    const Eigen::VectorXcd& psi = ctx.psi;
    const HatWeights count = HatWeights::counting(n);

    // (a)
    record_max(report.residuals, "a_product",
               (ctx.hat(ctx.hat(psi, g), f) - ctx.hat(psi, f * g)).norm());
    record_max(report.residuals, "a_commute",
               (ctx.hat(ctx.hat(psi, g), f) - ctx.hat(ctx.hat(psi, f), g)).norm());
    for (int j = 1; j <= n; ++j)
      record_max(report.residuals, "a_hat_p",
                 (ctx.hat(ctx.p(psi, j), f) - ctx.p(ctx.hat(psi, f), j)).norm());
    for (int block = 1; block < n; ++block) {
      const auto plain = tensor_ops::block_projections(psi, n, m, block, c);
      const auto hatted = tensor_ops::block_projections(ctx.hat(psi, f), n, m, block, c);
      for (int k = 0; k <= block; ++k)
        record_max(report.residuals, "a_hat_block", (ctx.hat(plain[k], f) - hatted[k]).norm());
    }

    // (b)
    Eigen::VectorXcd q_sum = Eigen::VectorXcd::Zero(psi.size());
    for (int j = 1; j <= n; ++j) q_sum += ctx.q(psi, j);
    record_max(report.residuals, "b_number",
               (ctx.hat(ctx.hat(psi, count), count) - q_sum / static_cast<double>(n)).norm());

    // (c)
    const Eigen::VectorXcd n_psi = ctx.hat(psi, count);
    const double komb1_lhs = ctx.hat(ctx.q(psi, 1), f).squaredNorm();
    const double komb1_rhs = ctx.hat(n_psi, f).squaredNorm();
    record_max(report.residuals, "c_komb1", std::abs(komb1_lhs - komb1_rhs));
    const double komb2_lhs = ctx.hat(ctx.q(ctx.q(psi, 2), 1), f).squaredNorm();
    const double komb2_rhs =
        static_cast<double>(n) / (n - 1) * ctx.hat(ctx.hat(n_psi, count), f).squaredNorm();
    record_max(report.margins, "komb2", komb2_lhs - komb2_rhs);
    if (komb2_lhs > komb2_rhs + inequality_slack) ++report.violations["komb2"];

    // (d)
    for (int j = 0; j <= 2; ++j)
      for (int k = 0; k <= 2; ++k) {
        const Eigen::VectorXcd lhs =
            ctx.hat(ctx.big_q(tensor_ops::multiply_pair(ctx.big_q(psi, k), n, m, v), j), f);
        const Eigen::VectorXcd rhs = ctx.big_q(
            tensor_ops::multiply_pair(ctx.hat(ctx.big_q(psi, k), f.shifted(k - j)), n, m, v), j);
        record_max(report.residuals, "d_shift", (lhs - rhs).norm());
      }

    // (e)
    const double w_sup = w.cwiseAbs().maxCoeff();
    const cplx w_psi = psi.dot(tensor_ops::multiply_one(psi, n, m, 1, w));
    const cplx w_phi = c.dot(w.cwiseProduct(c));
    const double alpha = psi.dot(n_psi).real();
    const double komb6_lhs = std::abs(w_psi - w_phi);
    const double komb6_rhs = 4.0 * w_sup * (std::pow(static_cast<double>(n), -0.25) + alpha);
    record_max(report.margins, "komb6", komb6_lhs - komb6_rhs);
    if (komb6_lhs > komb6_rhs + inequality_slack) ++report.violations["komb6"];

    // Four-term decomposition of m^ = sum m(k) P_k.
    {
      HatWeights mw;
      mw.values.resize(n + 1);
      for (int k = 0; k <= n; ++k) mw.values[k] = uniform(rng);
      auto diff = [&](const Eigen::VectorXcd& x, int d) -> Eigen::VectorXcd {
        return ctx.hat(x, mw) - ctx.hat(x, mw.shifted(d));
      };
      const Eigen::VectorXcd p2 = ctx.p(psi, 2);
      const Eigen::VectorXcd q2 = psi - p2;
      const Eigen::VectorXcd p1p2 = ctx.p(p2, 1);
      const Eigen::VectorXcd p1q2 = ctx.p(q2, 1);
      const Eigen::VectorXcd q1p2 = p2 - p1p2;
      Eigen::VectorXcd rest = Eigen::VectorXcd::Zero(psi.size());
      const auto tail = tensor_ops::block_projections(psi, n, m, n - 2, c);
      for (int k = 2; k <= n; ++k) rest += mw.values[k] * tail[k - 2];
      const Eigen::VectorXcd rhs = diff(p1p2, -2) + diff(p1q2, -1) + diff(q1p2, -1) + rest;
      record_max(report.residuals, "decomposition", (ctx.hat(psi, mw) - rhs).norm());
    }

    // Projector algebra and backend agreement.
    const auto comps = modes.components(c, state.coeffs);
    Eigen::VectorXcd sum = Eigen::VectorXcd::Zero(state.coeffs.size());
    for (int k = 0; k <= n; ++k) {
      sum += comps[k];
      const auto again = modes.components(c, comps[k]);
      for (int l = 0; l <= n; ++l)
        record_max(report.residuals, l == k ? "projector_idempotence" : "projector_orthogonality",
                   (again[l] - (l == k ? comps[k] : Eigen::VectorXcd::Zero(comps[k].size()))).norm());
    }
    record_max(report.residuals, "projector_completeness", (sum - state.coeffs).norm());
    const auto fq_comps = tensor_ops::block_projections(psi, n, m, n, c);
    for (int k = 0; k <= n; ++k)
      record_max(report.residuals, "backend_weights",
                 std::abs(comps[k].squaredNorm() - fq_comps[k].squaredNorm()));
  }
  return report;
}

}  // namespace condensate
