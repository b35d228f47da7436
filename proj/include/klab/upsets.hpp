#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace klab::exact {

// Increasing families of subsets of an s-element set (s <= 6). A family is a
// bitmask over the 2^s states: bit x set means state x (itself a bitmask of
// open edges) belongs to the event.
void for_each_upset(unsigned s, const std::function<void(std::uint64_t)>& visit);

std::vector<std::uint64_t> all_upsets(unsigned s);

// Whether a family over s elements is closed upward.
bool is_upset(std::uint64_t family, unsigned s);

}  // namespace klab::exact
