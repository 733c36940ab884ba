#include "fedsparql/shard/set_cover.hpp"

#include <algorithm>

namespace fedsparql::shard {

namespace {

class Bits {
  public:
    explicit Bits(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}
    void set(std::size_t i) { words_[i / 64] |= 1ULL << (i % 64); }
    bool test(std::size_t i) const { return words_[i / 64] >> (i % 64) & 1; }
    std::size_t count() const {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(__builtin_popcountll(w));
        return c;
    }
    Bits& operator|=(const Bits& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
        return *this;
    }
    /// Elements of `o` not in *this.
    std::size_t missing_count(const Bits& o) const {
        std::size_t c = 0;
        for (std::size_t i = 0; i < words_.size(); ++i)
            c += static_cast<std::size_t>(__builtin_popcountll(o.words_[i] & ~words_[i]));
        return c;
    }
    std::size_t size() const { return n_; }

  private:
    std::size_t n_;
    std::vector<std::uint64_t> words_;
};

std::vector<Bits> to_bits(const std::vector<std::vector<std::size_t>>& covers, std::size_t n) {
    std::vector<Bits> out;
    out.reserve(covers.size());
    for (const auto& c : covers) {
        Bits b(n);
        for (std::size_t e : c)
            if (e < n) b.set(e);
        out.push_back(std::move(b));
    }
    return out;
}

std::vector<std::size_t> uncoverable(const std::vector<Bits>& sets, std::size_t n) {
    Bits all(n);
    for (const Bits& s : sets) all |= s;
    std::vector<std::size_t> out;
    for (std::size_t e = 0; e < n; ++e)
        if (!all.test(e)) out.push_back(e);
    return out;
}

} // namespace

SetCoverResult solve_set_cover_greedy(const std::vector<std::vector<std::size_t>>& covers,
                                      std::size_t universe_size) {
    auto sets = to_bits(covers, universe_size);
    SetCoverResult result;
    result.uncovered = uncoverable(sets, universe_size);
    if (!result.uncovered.empty()) return result;

    Bits covered(universe_size);
    std::vector<bool> used(sets.size(), false);
    while (covered.count() < universe_size) {
        std::size_t best = sets.size();
        std::size_t best_gain = 0;
        for (std::size_t i = 0; i < sets.size(); ++i) {
            if (used[i]) continue;
            std::size_t gain = covered.missing_count(sets[i]);
            if (gain > best_gain) {
                best_gain = gain;
                best = i;
            }
        }
        if (best == sets.size()) break; // unreachable: uncoverable handled above
        used[best] = true;
        covered |= sets[best];
        result.selected.push_back(best);
    }
    std::sort(result.selected.begin(), result.selected.end());
    result.covers_all = covered.count() == universe_size;
    return result;
}

namespace {

struct Searcher {
    const std::vector<Bits>& sets;
    std::size_t universe;
    std::size_t max_set_size = 1;
    std::vector<std::size_t> best;
    std::vector<std::size_t> current;

    void search(const Bits& covered) {
        std::size_t remaining = universe - covered.count();
        if (remaining == 0) {
            if (current.size() < best.size()) best = current;
            return;
        }
        // Lower bound: even perfectly disjoint sets need this many more.
        std::size_t bound = current.size() + (remaining + max_set_size - 1) / max_set_size;
        if (bound >= best.size()) return;

        // Branch on the first uncovered element: some chosen set must cover it.
        std::size_t elem = 0;
        while (covered.test(elem)) ++elem;
        for (std::size_t i = 0; i < sets.size(); ++i) {
            if (!sets[i].test(elem)) continue;
            current.push_back(i);
            Bits next = covered;
            next |= sets[i];
            search(next);
            current.pop_back();
        }
    }
};

} // namespace

SetCoverResult solve_set_cover_exact(const std::vector<std::vector<std::size_t>>& covers,
                                     std::size_t universe_size) {
    auto sets = to_bits(covers, universe_size);
    SetCoverResult result;
    result.uncovered = uncoverable(sets, universe_size);
    if (!result.uncovered.empty()) return result;
    if (universe_size == 0) {
        result.covers_all = true;
        return result;
    }

    SetCoverResult greedy = solve_set_cover_greedy(covers, universe_size);
    Searcher s{sets, universe_size, 1, greedy.selected, {}};
    for (const Bits& b : sets) s.max_set_size = std::max(s.max_set_size, b.count());
    s.search(Bits(universe_size));

    result.selected = s.best;
    std::sort(result.selected.begin(), result.selected.end());
    result.covers_all = true;
    return result;
}

SetCoverResult solve_set_cover(const std::vector<std::vector<std::size_t>>& covers,
                               std::size_t universe_size, std::size_t exact_threshold) {
    if (covers.size() <= exact_threshold) return solve_set_cover_exact(covers, universe_size);
    return solve_set_cover_greedy(covers, universe_size);
}

} // namespace fedsparql::shard
