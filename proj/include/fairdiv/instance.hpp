#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ratio.hpp"

namespace fairdiv {

/// One piecewise-constant density segment of an agent's cake valuation:
/// constant `density` >= 0 on [start, end) with 0 <= start < end <= 1.
struct DensitySegment {
    Ratio start;
    Ratio end;
    Ratio density;
};

/// A fair-division instance: n agents with additive utilities over m
/// indivisible items, plus an optional divisible cake on [0,1] described by
/// per-agent piecewise-constant densities. Utilities may be any sign (goods,
/// chores, and anything in between); densities are non-negative.
struct Instance {
    std::vector<std::string> agents;                 // external ids, index order
    std::vector<std::string> items;                  // external ids, index order
    std::vector<std::vector<Ratio>> utility;         // n x m
    std::optional<std::vector<std::vector<DensitySegment>>> cake; // per agent, sorted

    int agent_count() const { return static_cast<int>(agents.size()); }
    int item_count() const { return static_cast<int>(items.size()); }
    bool has_cake() const { return cake.has_value(); }
};

/// A bundle is a sorted list of distinct item indices.
using Bundle = std::vector<int>;

/// Finitely many disjoint cake intervals, sorted by left endpoint.
struct Interval {
    Ratio lo;
    Ratio hi;
};
struct CakePiece {
    std::vector<Interval> intervals;
};

/// One bundle per agent; the bundles partition the item set.
struct DiscreteAllocation {
    std::vector<Bundle> bundles;
};

/// Non-negative money payments, one per agent.
using PaymentVector = std::vector<Ratio>;

/// A discrete allocation plus a divisible part: either money payments or
/// cake pieces (exactly one of the two shapes is active).
struct MixedAllocation {
    DiscreteAllocation discrete;
    std::variant<PaymentVector, std::vector<CakePiece>> divisible;

    bool has_payments() const { return divisible.index() == 0; }
    const PaymentVector& payments() const { return std::get<0>(divisible); }
    const std::vector<CakePiece>& pieces() const { return std::get<1>(divisible); }
};

inline bool bundle_contains(const Bundle& b, int item) {
    return std::binary_search(b.begin(), b.end(), item);
}

inline Bundle bundle_union(const Bundle& a, const Bundle& b) {
    Bundle out;
    out.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline Bundle bundle_without(const Bundle& b, int item) {
    Bundle out;
    out.reserve(b.size());
    for (int t : b)
        if (t != item) out.push_back(t);
    return out;
}

/// Additive value of a bundle for one agent.
inline Ratio bundle_value(const Instance& inst, int agent, const Bundle& bundle) {
    Ratio total = 0;
    for (int t : bundle) total += inst.utility[agent][t];
    return total;
}

/// Exact integral of an agent's density over one interval.
inline Ratio interval_value(const Instance& inst, int agent, const Interval& iv) {
    Ratio total = 0;
    if (!inst.cake) return total;
    for (const DensitySegment& seg : (*inst.cake)[agent]) {
        const Ratio lo = std::max(seg.start, iv.lo);
        const Ratio hi = std::min(seg.end, iv.hi);
        if (lo < hi) total += seg.density * (hi - lo);
    }
    return total;
}

/// Exact cake value of a piece for one agent (0 when the instance has no cake).
inline Ratio cake_value(const Instance& inst, int agent, const CakePiece& piece) {
    Ratio total = 0;
    for (const Interval& iv : piece.intervals) total += interval_value(inst, agent, iv);
    return total;
}

/// Value of the whole cake [0,1] for one agent.
inline Ratio whole_cake_value(const Instance& inst, int agent) {
    return interval_value(inst, agent, Interval{Ratio(0), Ratio(1)});
}

/// Agents whose whole-cake value is positive.
inline std::vector<int> positive_cake_agents(const Instance& inst) {
    std::vector<int> out;
    for (int i = 0; i < inst.agent_count(); ++i)
        if (whole_cake_value(inst, i) > 0) out.push_back(i);
    return out;
}

/// Rescale every agent with positive whole-cake value v_i by 1/v_i (items and
/// densities alike), so each such agent values the whole cake at exactly 1.
/// Zero-value agents and item-only instances are returned unchanged.
/// Per-agent uniform scaling preserves every fairness verdict.
inline Instance normalize(Instance inst) {
    if (!inst.cake) return inst;
    for (int i = 0; i < inst.agent_count(); ++i) {
        const Ratio v = whole_cake_value(inst, i);
        if (v <= 0) continue;
        for (Ratio& u : inst.utility[i]) u /= v;
        for (DensitySegment& seg : (*inst.cake)[i]) seg.density /= v;
    }
    return inst;
}

/// True when the bundles are sorted, in range, and partition the item set.
inline bool is_partition(const Instance& inst, const DiscreteAllocation& alloc) {
    if (static_cast<int>(alloc.bundles.size()) != inst.agent_count()) return false;
    std::vector<int> seen(inst.item_count(), 0);
    for (const Bundle& b : alloc.bundles) {
        if (!std::is_sorted(b.begin(), b.end())) return false;
        for (int t : b) {
            if (t < 0 || t >= inst.item_count() || seen[t]++) return false;
        }
    }
    for (int c : seen)
        if (c != 1) return false;
    return true;
}

/// Test/generator convenience: build an item-only instance from a utility
/// matrix, with synthetic ids a0..a{n-1} / t0..t{m-1}.
inline Instance make_instance(std::vector<std::vector<Ratio>> utility) {
    Instance inst;
    inst.utility = std::move(utility);
    const int n = static_cast<int>(inst.utility.size());
    const int m = n == 0 ? 0 : static_cast<int>(inst.utility[0].size());
    for (int i = 0; i < n; ++i) inst.agents.push_back("a" + std::to_string(i));
    for (int t = 0; t < m; ++t) inst.items.push_back("t" + std::to_string(t));
    return inst;
}

} // namespace fairdiv
