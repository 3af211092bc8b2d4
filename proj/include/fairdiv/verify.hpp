#pragma once

#include <optional>
#include <string>
#include <vector>

#include "envy.hpp"
#include "instance.hpp"

namespace fairdiv {

/// A failed pair: `envier` objects to `envied`'s share; `reason` names the
/// clause that failed.
struct Witness {
    int envier;
    int envied;
    std::string reason;
};

struct FairnessReport {
    bool verdict = true;
    std::vector<Witness> witnesses;
};

namespace detail {

/// EF1 clause for one ordered pair: own value (plus a fixed own-side bonus
/// that removals cannot touch) must reach the other bundle's value after
/// removing at most one item from either side.
inline bool ef1_pair_ok(const Instance& inst, const Bundle& own_bundle, const Ratio& own_bonus,
                        int agent, const Bundle& other_bundle) {
    const Ratio own = bundle_value(inst, agent, own_bundle) + own_bonus;
    const Ratio other = bundle_value(inst, agent, other_bundle);
    if (own >= other) return true;
    for (int t : own_bundle)
        if (own - inst.utility[agent][t] >= other) return true;
    for (int t : other_bundle)
        if (own >= other - inst.utility[agent][t]) return true;
    return false;
}

} // namespace detail

/// Envy-freeness up to one item, with mixed signs: for every pair, either no
/// envy, or some single item whose removal (from either bundle) kills it.
inline FairnessReport check_ef1(const Instance& inst, const DiscreteAllocation& alloc) {
    FairnessReport report;
    const int n = inst.agent_count();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (!detail::ef1_pair_ok(inst, alloc.bundles[i], Ratio(0), i, alloc.bundles[j])) {
                report.verdict = false;
                report.witnesses.push_back({i, j, "envy survives every single-item removal"});
            }
        }
    return report;
}

/// Envy-freeness once non-negative money payments are added to each bundle.
inline FairnessReport check_envy_free_money(const Instance& inst, const DiscreteAllocation& alloc,
                                            const PaymentVector& payments) {
    const int n = inst.agent_count();
    if (static_cast<int>(payments.size()) != n)
        throw std::invalid_argument("check_envy_free_money: payment count mismatch");
    for (const Ratio& p : payments)
        if (p < 0) throw std::invalid_argument("check_envy_free_money: negative payment");
    FairnessReport report;
    for (int i = 0; i < n; ++i) {
        const Ratio own = bundle_value(inst, i, alloc.bundles[i]) + payments[i];
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (own < bundle_value(inst, i, alloc.bundles[j]) + payments[j]) {
                report.verdict = false;
                report.witnesses.push_back({i, j, "envies even after payments"});
            }
        }
    }
    return report;
}

/// Envy-freeness for mixed allocations: toward anyone whose divisible share
/// the evaluator values positively, full envy-freeness is required; toward
/// everyone else, the EF1 clause on the discrete parts suffices. Pieces are
/// worth their exact cake value to every evaluator. Payments on a cake-less
/// instance are money, valued at face by everyone; payments on a cake
/// instance stand for consensus shares of the cake, so each is worth its
/// fraction times the evaluator's whole-cake value (zero for an agent who
/// does not value the cake).
inline FairnessReport check_efm(const Instance& inst, const MixedAllocation& mixed) {
    const int n = inst.agent_count();
    FairnessReport report;
    for (int i = 0; i < n; ++i) {
        const Ratio unit = inst.cake ? whole_cake_value(inst, i) : Ratio(1);
        const auto share_value = [&](int owner) -> Ratio {
            if (mixed.has_payments()) return mixed.payments()[owner] * unit;
            return cake_value(inst, i, mixed.pieces()[owner]);
        };
        const Ratio own_bonus = share_value(i);
        const Ratio own = bundle_value(inst, i, mixed.discrete.bundles[i]) + own_bonus;
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const Ratio other_share = share_value(j);
            if (other_share > 0) {
                if (own < bundle_value(inst, i, mixed.discrete.bundles[j]) + other_share) {
                    report.verdict = false;
                    report.witnesses.push_back(
                        {i, j, mixed.has_payments() ? "payment clause" : "cake clause"});
                }
            } else if (!detail::ef1_pair_ok(inst, mixed.discrete.bundles[i], own_bonus, i,
                                            mixed.discrete.bundles[j])) {
                report.verdict = false;
                report.witnesses.push_back({i, j, "ef1 clause"});
            }
        }
    }
    return report;
}

/// Exhaustive existence oracle: enumerate every way to hand n^m bundles out
/// and return the first (in lexicographic item-to-agent order) that is both
/// EF1 and envy-freeable. Guarded to desk scale.
inline std::optional<DiscreteAllocation> brute_force_ef1_efable(const Instance& inst) {
    const int n = inst.agent_count();
    const int m = inst.item_count();
    if (n > 3 || m > 6)
        throw std::invalid_argument("brute_force_ef1_efable: instance too large (n > 3 or m > 6)");
    std::vector<int> owner(m, 0);
    for (;;) {
        DiscreteAllocation alloc;
        alloc.bundles.assign(n, {});
        for (int t = 0; t < m; ++t) alloc.bundles[owner[t]].push_back(t);
        if (check_ef1(inst, alloc).verdict && envy_freeable_by_permutation(inst, alloc))
            return alloc;
        int t = m - 1;
        while (t >= 0 && owner[t] == n - 1) owner[t--] = 0;
        if (t < 0) return std::nullopt;
        ++owner[t];
    }
}

} // namespace fairdiv
