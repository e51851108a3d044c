#include "condensate/basis.hpp"

#include <limits>
#include <stdexcept>
#include <string>

namespace condensate {

std::size_t OccupationBasis::count(int parts, int total) {
  if (total < 0 || parts < 0) return 0;
  if (parts == 0) return total == 0 ? 1 : 0;
  // C(total + parts - 1, parts - 1), computed incrementally to stay exact.
  const int k = parts - 1;
  long double value = 1.0L;
  std::size_t exact = 1;
  for (int i = 1; i <= k; ++i) {
    value = value * (total + i) / i;
    if (value > static_cast<long double>(std::numeric_limits<std::size_t>::max() / 2))
      return std::numeric_limits<std::size_t>::max();
    exact = exact * static_cast<std::size_t>(total + i) / static_cast<std::size_t>(i);
  }
  return exact;
}

OccupationBasis::OccupationBasis(int particles, int sites, std::size_t max_dimension)
    : particles_(particles), sites_(sites) {
  if (particles < 0) throw std::invalid_argument("OccupationBasis: negative particle number");
  if (sites < 1) throw std::invalid_argument("OccupationBasis: need at least one site");
  if (particles > 255) throw std::invalid_argument("OccupationBasis: at most 255 particles");
  dimension_ = count(sites, particles);
  if (dimension_ > max_dimension)
    throw std::length_error("OccupationBasis: dimension " + std::to_string(dimension_) +
                            " exceeds guard " + std::to_string(max_dimension));

  table_.resize(static_cast<std::size_t>(sites + 1) * (particles + 1));
  for (int m = 0; m <= sites; ++m)
    for (int s = 0; s <= particles; ++s) table_[m * (particles + 1) + s] = count(m, s);

  occupations_.resize(dimension_ * sites_);
  std::vector<std::uint8_t> state(sites_, 0);
  state[0] = static_cast<std::uint8_t>(particles);
  for (std::size_t idx = 0; idx < dimension_; ++idx) {
    std::copy(state.begin(), state.end(), occupations_.begin() + idx * sites_);
    if (idx + 1 == dimension_) break;
    // Next state in descending lexicographic order: find the rightmost non-last position
    // with a particle, move one particle right and gather the tail behind it.
    int i = sites_ - 2;
    while (i >= 0 && state[i] == 0) --i;
    int tail = state[sites_ - 1];
    state[sites_ - 1] = 0;
    state[i] -= 1;
    state[i + 1] = static_cast<std::uint8_t>(tail + 1);
  }
}

std::size_t OccupationBasis::rank(std::span<const std::uint8_t> occupation) const {
  std::size_t r = 0;
  int remaining = particles_;
  for (int i = 0; i + 1 < sites_; ++i) {
    // States whose i-th entry exceeds occupation[i] (with equal prefix) come first.
    r += table(sites_ - i, remaining - occupation[i] - 1);
    remaining -= occupation[i];
  }
  return r;
}

}  // namespace condensate
