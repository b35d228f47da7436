// Redelmeier's enumeration of fixed animals in Z^d: grow from the origin,
// only ever adding cells lexicographically after it, each candidate cell
// entering the untried set at most once along a branch.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "klab/bounds.hpp"

namespace klab::bounds {

namespace {

int max_size(int d) {
  if (d == 2) return 10;
  if (d == 3) return 8;
  return 6;
}

class Redelmeier {
 public:
  Redelmeier(int n, int d) : n_(n), d_(d), counts_(n + 1, 0) {
    const int width = 2 * n + 1;
    stride_.assign(d, 1);
    for (int i = d - 2; i >= 0; --i) stride_[i] = stride_[i + 1] * width;
    std::size_t cells = 1;
    for (int i = 0; i < d; ++i) cells *= width;
    seen_.assign(cells, 0);
    origin_ = 0;
    for (int i = 0; i < d; ++i) origin_ += static_cast<long>(n) * stride_[i];
    width_ = width;
  }

  std::vector<std::uint64_t> run() {
    seen_[origin_] = 1;
    std::vector<long> untried{origin_};
    grow(untried, 0);
    return counts_;
  }

 private:
  void grow(std::vector<long> untried, int size) {
    while (!untried.empty()) {
      const long c = untried.back();
      untried.pop_back();
      ++counts_[size + 1];
      if (size + 1 == n_) continue;
      std::vector<long> next = untried;
      std::vector<long> added;
      for (int i = 0; i < d_; ++i) {
        const long coord = (c / stride_[i]) % width_;
        for (int dir : {-1, 1}) {
          if (coord + dir < 0 || coord + dir >= width_) continue;
          const long nb = c + dir * stride_[i];
          if (nb < origin_ || seen_[nb]) continue;
          seen_[nb] = 1;
          next.push_back(nb);
          added.push_back(nb);
        }
      }
      grow(std::move(next), size + 1);
      for (long a : added) seen_[a] = 0;
    }
  }

  int n_;
  int d_;
  long width_ = 0;
  long origin_ = 0;
  std::vector<long> stride_;
  std::vector<std::uint8_t> seen_;
  std::vector<std::uint64_t> counts_;
};

}  // namespace

std::uint64_t fixed_animals(int n, int d) {
  if (d < 1 || d > 6) throw std::domain_error("lattice animals: dimension must lie in [1,6]");
  if (n < 1) throw std::domain_error("lattice animals: n must be at least 1");
  if (n > max_size(d))
    throw std::out_of_range("lattice animals: n = " + std::to_string(n) + " exceeds the enumeration budget " +
                            std::to_string(max_size(d)) + " in d = " + std::to_string(d));
  return Redelmeier(n, d).run()[n];
}

std::uint64_t lattice_animals(int n, int d) {
  return static_cast<std::uint64_t>(n) * fixed_animals(n, d);
}

}  // namespace klab::bounds
