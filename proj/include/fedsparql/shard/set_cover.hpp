#pragma once

#include <cstddef>
#include <vector>

namespace fedsparql::shard {

struct SetCoverResult {
    std::vector<std::size_t> selected; // candidate indices, ascending
    bool covers_all = false;
    std::vector<std::size_t> uncovered; // universe elements no candidate covers
};

/// Greedy max-uncovered-gain; ties break towards the lowest candidate index,
/// so callers get determinism by ordering candidates canonically.
SetCoverResult solve_set_cover_greedy(const std::vector<std::vector<std::size_t>>& covers,
                                      std::size_t universe_size);

/// Exact minimum via element branching with a greedy upper bound and a
/// coverage lower bound. Intended for instances up to ~20 candidates.
SetCoverResult solve_set_cover_exact(const std::vector<std::vector<std::size_t>>& covers,
                                     std::size_t universe_size);

/// Exact when |candidates| <= exact_threshold, greedy otherwise.
SetCoverResult solve_set_cover(const std::vector<std::vector<std::size_t>>& covers,
                               std::size_t universe_size, std::size_t exact_threshold = 20);

} // namespace fedsparql::shard
