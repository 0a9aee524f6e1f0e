#pragma once

#include <cstddef>
#include <span>

namespace asyncrev {

// Levenshtein distance with unit costs.
std::size_t edit_distance(std::span<const int> ref, std::span<const int> hyp);

// edit_distance / |ref|. An empty reference scores |hyp| (as if |ref| were 1).
double cer(std::span<const int> ref, std::span<const int> hyp);

}  // namespace asyncrev
