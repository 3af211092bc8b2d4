#pragma once

#include <limits>
#include <random>
#include <string>

#include "instance.hpp"

namespace fairdiv {

/// Knobs for the deterministic instance generator.
struct GenParams {
    int agents = 2;
    int items = 4;
    long long util_min = -3;
    long long util_max = 3;
    bool chores_only = false;  // force every utility strictly negative
    bool cake = false;         // add per-agent piecewise-constant densities
    int max_segments = 3;      // cake segments per agent, 0..max
};

namespace detail {

/// Uniform draw from [0, n) by rejection, so the byte stream of mt19937_64
/// maps to identical results on every platform (the std distributions are
/// implementation-defined).
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % n;
    for (;;) {
        const std::uint64_t x = rng();
        if (x < limit) return x % n;
    }
}

inline long long uniform_range(std::mt19937_64& rng, long long lo, long long hi) {
    return lo + static_cast<long long>(
                    uniform_below(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

} // namespace detail

/// Deterministic random instance: same params and seed give the identical
/// instance on every platform. Utilities are uniform integers in
/// [util_min, util_max]; cake densities are uniform integers in [0,3] over up
/// to max_segments segments with breakpoints on an eighth grid, and the
/// result is normalized so positive-value agents see total cake value 1.
inline Instance generate_instance(const GenParams& params, std::uint64_t seed) {
    if (params.agents < 1) throw std::invalid_argument("generate_instance: need >= 1 agent");
    if (params.items < 0) throw std::invalid_argument("generate_instance: negative item count");
    if (params.max_segments < 0 || params.max_segments > 4)
        throw std::invalid_argument("generate_instance: max_segments must be in [0,4]");
    long long lo = params.util_min, hi = params.util_max;
    if (params.chores_only) {
        lo = std::min(lo, -1LL);
        hi = std::min(hi, -1LL);
    }
    if (lo > hi) throw std::invalid_argument("generate_instance: empty utility range");

    std::mt19937_64 rng(seed);
    Instance inst;
    for (int a = 0; a < params.agents; ++a) inst.agents.push_back("a" + std::to_string(a));
    for (int t = 0; t < params.items; ++t) inst.items.push_back("t" + std::to_string(t));
    inst.utility.assign(params.agents, std::vector<Ratio>(params.items));
    for (int a = 0; a < params.agents; ++a)
        for (int t = 0; t < params.items; ++t)
            inst.utility[a][t] = Ratio(detail::uniform_range(rng, lo, hi));

    if (params.cake) {
        const int grid = 8;
        std::vector<std::vector<DensitySegment>> cake(params.agents);
        for (int a = 0; a < params.agents; ++a) {
            const int segments =
                static_cast<int>(detail::uniform_below(rng, params.max_segments + 1));
            if (segments == 0) continue;
            // 2*segments distinct breakpoints on the grid, sorted.
            std::vector<int> marks;
            while (static_cast<int>(marks.size()) < 2 * segments) {
                const int mark = static_cast<int>(detail::uniform_below(rng, grid + 1));
                if (std::find(marks.begin(), marks.end(), mark) == marks.end())
                    marks.push_back(mark);
            }
            std::sort(marks.begin(), marks.end());
            for (int s = 0; s < segments; ++s) {
                const Ratio density(detail::uniform_below(rng, 4));
                cake[a].push_back({Ratio(marks[2 * s], grid), Ratio(marks[2 * s + 1], grid),
                                   density});
            }
        }
        inst.cake = std::move(cake);
        inst = normalize(std::move(inst));
    }
    return inst;
}

} // namespace fairdiv
