#include "mop/staircase.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace mop {

Staircase::Staircase(std::size_t n, std::vector<MultiIndex> elements) : n_(n), elements_(std::move(elements)) {
  for (const auto& e : elements_) {
    if (e.size() != n_) throw std::invalid_argument("staircase element dimension mismatch");
  }
  std::sort(elements_.begin(), elements_.end(), GrlexLess{});
  if (std::adjacent_find(elements_.begin(), elements_.end()) != elements_.end()) {
    throw std::invalid_argument("staircase has repeated elements");
  }
  if (!is_coideal(n_, elements_)) throw std::invalid_argument("set is not closed under decrease");
}

bool Staircase::contains(const MultiIndex& m) const {
  return std::binary_search(elements_.begin(), elements_.end(), m, GrlexLess{});
}

bool is_coideal(std::size_t n, const std::vector<MultiIndex>& elements) {
  std::set<MultiIndex, GrlexLess> present(elements.begin(), elements.end());
  for (const auto& e : elements) {
    for (std::size_t i = 0; i < n; ++i) {
      if (e[i] == 0) continue;
      MultiIndex d = e;
      d.set(i, e[i] - 1);
      if (!present.count(d)) return false;
    }
  }
  return true;
}

namespace {

// Co-ideals are represented as sorted vectors so that containment between
// consecutive slices is a std::includes test.
using Ideal = std::vector<MultiIndex>;

class Enumerator {
 public:
  Enumerator(std::size_t k, std::size_t cap) : k_(k), cap_(cap) {}

  // by_size[s] lists the co-ideals of N^dim of size s, for s <= k.
  std::vector<std::vector<Ideal>> build(std::size_t dim) {
    std::vector<std::vector<Ideal>> by_size(k_ + 1);
    if (dim == 0) {
      by_size[0].push_back({});
      if (k_ >= 1) by_size[1].push_back({MultiIndex(std::size_t{0})});
      return by_size;
    }
    lower_ = build(dim - 1);
    dim_ = dim;
    produced_ = 0;
    for (std::size_t total = 0; total <= k_; ++total) {
      out_ = &by_size[total];
      Ideal acc;
      extend(total, nullptr, 0, acc);
    }
    return by_size;
  }

 private:
  // Append slices x_dim = level, level+1, ... each contained in the previous.
  void extend(std::size_t remaining, const Ideal* prev, unsigned level, Ideal& acc) {
    if (remaining == 0) {
      Ideal sorted = acc;
      std::sort(sorted.begin(), sorted.end(), GrlexLess{});
      out_->push_back(std::move(sorted));
      if (++produced_ > cap_) throw std::length_error("staircase enumeration cap exceeded");
      return;
    }
    const std::size_t max_size = prev ? std::min(remaining, prev->size()) : remaining;
    for (std::size_t s = max_size; s >= 1; --s) {
      for (const Ideal& slice : lower_[s]) {
        if (prev && !std::includes(prev->begin(), prev->end(), slice.begin(), slice.end(), GrlexLess{})) {
          continue;
        }
        const std::size_t mark = acc.size();
        for (const auto& m : slice) {
          MultiIndex lifted(dim_);
          for (std::size_t i = 0; i + 1 < dim_; ++i) lifted.set(i, m[i]);
          lifted.set(dim_ - 1, level);
          acc.push_back(lifted);
        }
        extend(remaining - s, &slice, level + 1, acc);
        acc.resize(mark);
      }
    }
  }

  std::size_t k_;
  std::size_t cap_;
  std::size_t produced_ = 0;
  std::size_t dim_ = 0;
  std::vector<std::vector<Ideal>> lower_;
  std::vector<Ideal>* out_ = nullptr;
};

}  // namespace

std::vector<Staircase> enumerate_staircases(std::size_t n, std::size_t k, std::size_t cap) {
  if (n < 1) throw std::invalid_argument("staircases need n >= 1");
  if (n > MultiIndex::kMaxVars) throw std::invalid_argument("too many variables (max 8)");
  Enumerator e(k, cap);
  auto by_size = e.build(n);
  std::vector<Staircase> out;
  out.reserve(by_size[k].size());
  for (auto& ideal : by_size[k]) out.emplace_back(n, std::move(ideal));
  return out;
}

}  // namespace mop
