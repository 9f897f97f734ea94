#pragma once

#include <cstddef>
#include <vector>

#include "mop/multi_index.hpp"

namespace mop {

/// A finite co-ideal B of N^n: closed under componentwise decrease.
/// Elements are kept sorted in canonical (grlex) order.
class Staircase {
 public:
  Staircase() = default;
  Staircase(std::size_t n, std::vector<MultiIndex> elements);

  std::size_t n() const { return n_; }
  std::size_t size() const { return elements_.size(); }
  bool empty() const { return elements_.empty(); }
  const std::vector<MultiIndex>& elements() const { return elements_; }
  bool contains(const MultiIndex& m) const;

  friend bool operator==(const Staircase& a, const Staircase& b) {
    return a.n_ == b.n_ && a.elements_ == b.elements_;
  }

 private:
  std::size_t n_ = 0;
  std::vector<MultiIndex> elements_;
};

/// True iff every componentwise predecessor of every element is present.
bool is_coideal(std::size_t n, const std::vector<MultiIndex>& elements);

inline constexpr std::size_t kDefaultStaircaseCap = 100000;

/// All co-ideals of N^n with exactly k elements, in a fixed order.
/// Throws std::length_error when more than `cap` would be produced.
std::vector<Staircase> enumerate_staircases(std::size_t n, std::size_t k,
                                            std::size_t cap = kDefaultStaircaseCap);

}  // namespace mop
