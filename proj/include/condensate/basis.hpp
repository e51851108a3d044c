#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace condensate {

// Bosonic occupation-number basis {(n_1..n_M) : sum n_i = N} in descending lexicographic
// order, so rank 0 is (N, 0, ..., 0) and the last state is (0, ..., 0, N).
class OccupationBasis {
 public:
  static constexpr std::size_t default_max_dimension = 200000;

  OccupationBasis(int particles, int sites, std::size_t max_dimension = default_max_dimension);

  int particles() const { return particles_; }
  int sites() const { return sites_; }
  std::size_t dimension() const { return dimension_; }

  std::span<const std::uint8_t> occupation(std::size_t index) const {
    return {occupations_.data() + index * sites_, static_cast<std::size_t>(sites_)};
  }

  // O(M) lookup through the combinatorial rank table.
  std::size_t rank(std::span<const std::uint8_t> occupation) const;

  // Number of compositions of `total` into `parts` nonnegative integers.
  static std::size_t count(int parts, int total);

 private:
  int particles_;
  int sites_;
  std::size_t dimension_;
  // table_[parts * (N + 1) + total] = count(parts, total)
  std::vector<std::size_t> table_;
  std::vector<std::uint8_t> occupations_;

  std::size_t table(int parts, int total) const {
    if (total < 0) return 0;
    return table_[static_cast<std::size_t>(parts) * (particles_ + 1) + total];
  }
};

}  // namespace condensate
