#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "condensate/manybody.hpp"

namespace condensate {

void check_budget(int particles, int sites, const TensorBudget& budget) {
  if (particles > budget.max_particles || sites > budget.max_sites)
    throw std::length_error("first-quantized budget exceeded: N=" + std::to_string(particles) +
                            ", M=" + std::to_string(sites) + " (limits N<=" +
                            std::to_string(budget.max_particles) +
                            ", M<=" + std::to_string(budget.max_sites) + ")");
}

std::size_t FirstQuantizedState::index(std::span<const int> coords) const {
  std::size_t idx = 0;
  for (int x : coords) idx = idx * sites + x;
  return idx;
}

std::vector<int> FirstQuantizedState::coordinates(std::size_t idx) const {
  std::vector<int> coords(particles);
  for (int j = particles - 1; j >= 0; --j) {
    coords[j] = static_cast<int>(idx % sites);
    idx /= sites;
  }
  return coords;
}

double FirstQuantizedState::symmetry_residual() const {
  // Adjacent transpositions generate the symmetric group.
  double worst = 0.0;
  for (std::size_t idx = 0; idx < static_cast<std::size_t>(tensor.size()); ++idx) {
    std::vector<int> coords = coordinates(idx);
    for (int j = 0; j + 1 < particles; ++j) {
      std::swap(coords[j], coords[j + 1]);
      worst = std::max(worst, std::abs(tensor(idx) - tensor(index(coords))));
      std::swap(coords[j], coords[j + 1]);
    }
  }
  return worst;
}

namespace {

double tuple_count(std::span<const std::uint8_t> occ, int particles) {
  double log_count = std::lgamma(particles + 1.0);
  for (auto n : occ) log_count -= std::lgamma(n + 1.0);
  return std::exp(log_count);
}

std::vector<std::uint8_t> occupation_of(const std::vector<int>& coords, int sites) {
  std::vector<std::uint8_t> occ(sites, 0);
  for (int x : coords) occ[x] += 1;
  return occ;
}

}  // namespace

FirstQuantizedState to_first_quantized(const SymmetricState& state, const TensorBudget& budget) {
  const int n = state.particles();
  const int m = state.sites();
  check_budget(n, m, budget);
  FirstQuantizedState fq{n, m, {}};
  std::size_t size = 1;
  for (int j = 0; j < n; ++j) size *= m;
  fq.tensor.resize(size);
  for (std::size_t idx = 0; idx < size; ++idx) {
    const auto occ = occupation_of(fq.coordinates(idx), m);
    const std::size_t r = state.basis->rank(occ);
    fq.tensor(idx) = state.coeffs(r) / std::sqrt(tuple_count(occ, n));
  }
  return fq;
}

SymmetricState from_first_quantized(const FirstQuantizedState& fq,
                                    std::shared_ptr<const OccupationBasis> basis,
                                    const TensorBudget& budget) {
  check_budget(fq.particles, fq.sites, budget);
  if (basis->particles() != fq.particles || basis->sites() != fq.sites)
    throw std::invalid_argument("from_first_quantized: basis mismatch");
  Eigen::VectorXcd coeffs = Eigen::VectorXcd::Zero(basis->dimension());
  for (std::size_t idx = 0; idx < static_cast<std::size_t>(fq.tensor.size()); ++idx) {
    const auto occ = occupation_of(fq.coordinates(idx), fq.sites);
    coeffs(basis->rank(occ)) += fq.tensor(idx) / std::sqrt(tuple_count(occ, fq.particles));
  }
  return {std::move(basis), std::move(coeffs)};
}

}  // namespace condensate
