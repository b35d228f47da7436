#include "klab/upsets.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>

namespace klab::exact {

namespace {

struct UpsetWalker {
  unsigned s;
  std::vector<unsigned> order;  // states by decreasing popcount
  const std::function<void(std::uint64_t)>* visit;

  // States of higher rank are decided first, so when a state is considered all
  // of its covers already are.
  void run(std::size_t i, std::uint64_t family) {
    if (i == order.size()) {
      (*visit)(family);
      return;
    }
    const unsigned x = order[i];
    run(i + 1, family);
    for (unsigned b = 0; b < s; ++b) {
      const unsigned cover = x | (1u << b);
      if (cover != x && !((family >> cover) & 1u)) return;
    }
    run(i + 1, family | (std::uint64_t{1} << x));
  }
};

}  // namespace

void for_each_upset(unsigned s, const std::function<void(std::uint64_t)>& visit) {
  if (s > 6) throw std::invalid_argument("up-set enumeration supports at most 6 elements");
  UpsetWalker w{s, {}, &visit};
  w.order.resize(std::size_t{1} << s);
  std::iota(w.order.begin(), w.order.end(), 0u);
  std::stable_sort(w.order.begin(), w.order.end(),
                   [](unsigned a, unsigned b) { return std::popcount(a) > std::popcount(b); });
  w.run(0, 0);
}

std::vector<std::uint64_t> all_upsets(unsigned s) {
  std::vector<std::uint64_t> out;
  for_each_upset(s, [&](std::uint64_t f) { out.push_back(f); });
  return out;
}

bool is_upset(std::uint64_t family, unsigned s) {
  const unsigned n = 1u << s;
  for (unsigned x = 0; x < n; ++x) {
    if (!((family >> x) & 1u)) continue;
    for (unsigned b = 0; b < s; ++b)
      if (!((family >> (x | (1u << b))) & 1u)) return false;
  }
  return true;
}

}  // namespace klab::exact
