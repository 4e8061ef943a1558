#pragma once

#include <cstddef>
#include <cstdint>

namespace irns {

// Work accounting in units of n-dimensional scalar products.
//
// Counting contract:
//   - one inner product of length-n vectors          = 1 unit
//   - an n x n matrix-vector product                 = n units
//   - vector additions, scalings and h/merit scalar
//     arithmetic                                     = free
//   - residual data (hinge margins, LCP residual
//     vectors) computed for a value evaluation is
//     shared with subgradient and directional-sup
//     queries at the same point and charged once
//
// Counts are deterministic: identical call sequences with identical seeds
// produce identical counters.
class FevCounter {
 public:
  void charge(std::uint64_t units = 1) { count_ += units; }
  void charge_matvec(std::size_t n) { count_ += n; }
  std::uint64_t count() const { return count_; }

 private:
  std::uint64_t count_ = 0;
};

}  // namespace irns
