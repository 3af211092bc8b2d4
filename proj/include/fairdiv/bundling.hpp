#pragma once

#include <stdexcept>
#include <vector>

#include "instance.hpp"

namespace fairdiv {

/// Working partition of the item set during bundling: merged meta-goods,
/// loose goods peeled off as singletons, and still-unattached objective
/// chores. The three parts are pairwise disjoint and cover every item.
struct BundlingState {
    std::vector<Bundle> meta_goods;
    Bundle loose_goods;
    Bundle chores;
};

/// Agents that value the bundle non-negatively.
inline std::vector<int> supporters(const Instance& inst, const Bundle& bundle) {
    std::vector<int> out;
    for (int i = 0; i < inst.agent_count(); ++i)
        if (bundle_value(inst, i, bundle) >= 0) out.push_back(i);
    return out;
}

/// A meta-good is a nonempty bundle somebody values non-negatively.
inline bool is_meta_good(const Instance& inst, const Bundle& bundle) {
    return !bundle.empty() && !supporters(inst, bundle).empty();
}

/// An item nobody values non-negatively.
inline bool is_objective_chore(const Instance& inst, int item) {
    for (int i = 0; i < inst.agent_count(); ++i)
        if (inst.utility[i][item] >= 0) return false;
    return true;
}

/// Chore-maximal: attaching any of the given chores would turn the bundle
/// into a chore for every agent. Requires the bundle to be a meta-good.
inline bool is_chore_maximal(const Instance& inst, const Bundle& bundle, const Bundle& chores) {
    if (!is_meta_good(inst, bundle))
        throw std::invalid_argument("is_chore_maximal: bundle is not a meta-good");
    for (int c : chores) {
        const Bundle grown = bundle_union(bundle, Bundle{c});
        for (int i = 0; i < inst.agent_count(); ++i)
            if (bundle_value(inst, i, grown) >= 0) return false;
    }
    return true;
}

/// Good-minimal: no agent can point at a good inside the bundle whose removal
/// leaves a remainder that agent still values positively. Requires the bundle
/// to be a meta-good. The optional agent list restricts who may object.
inline bool is_good_minimal(const Instance& inst, const Bundle& bundle,
                            const std::vector<int>* agents = nullptr) {
    if (!is_meta_good(inst, bundle))
        throw std::invalid_argument("is_good_minimal: bundle is not a meta-good");
    const int n = inst.agent_count();
    for (int a = 0; a < (agents ? static_cast<int>(agents->size()) : n); ++a) {
        const int i = agents ? (*agents)[a] : a;
        for (int g : bundle) {
            if (inst.utility[i][g] < 0) continue;
            if (bundle_value(inst, i, bundle) - inst.utility[i][g] > 0) return false;
        }
    }
    return true;
}

/// Bundle subjective goods into at most n meta-goods, then let meta-goods
/// absorb objective chores while somebody still values the result
/// non-negatively. Returns the meta-goods plus the leftover free chores;
/// loose_goods is always empty here. Scans are lowest-index-first throughout,
/// so the outcome is deterministic.
inline BundlingState iterative_item_merge(const Instance& inst) {
    const int n = inst.agent_count();
    BundlingState state;
    for (int t = 0; t < inst.item_count(); ++t) {
        if (is_objective_chore(inst, t))
            state.chores.push_back(t);
        else
            state.meta_goods.push_back(Bundle{t});
    }

    // Merge while some agent supports two or more nodes: the merged node
    // replaces them at the end of the list.
    for (;;) {
        int who = -1;
        for (int i = 0; i < n && who < 0; ++i) {
            int degree = 0;
            for (const Bundle& node : state.meta_goods)
                if (bundle_value(inst, i, node) >= 0) ++degree;
            if (degree >= 2) who = i;
        }
        if (who < 0) break;
        Bundle merged;
        std::vector<Bundle> rest;
        for (Bundle& node : state.meta_goods) {
            if (bundle_value(inst, who, node) >= 0)
                merged = bundle_union(merged, node);
            else
                rest.push_back(std::move(node));
        }
        rest.push_back(std::move(merged));
        state.meta_goods = std::move(rest);
    }

    // Absorb free chores into meta-goods while the grown bundle keeps a
    // supporter. Restart the (node, agent, chore) scan after each hit.
    for (bool hit = true; hit;) {
        hit = false;
        for (std::size_t j = 0; j < state.meta_goods.size() && !hit; ++j)
            for (int i = 0; i < n && !hit; ++i)
                for (std::size_t z = 0; z < state.chores.size() && !hit; ++z) {
                    const int c = state.chores[z];
                    if (bundle_value(inst, i, state.meta_goods[j]) + inst.utility[i][c] >= 0) {
                        state.meta_goods[j] = bundle_union(state.meta_goods[j], Bundle{c});
                        state.chores.erase(state.chores.begin() + z);
                        hit = true;
                    }
                }
    }
    return state;
}

namespace detail {

/// Merge meta-goods to a fixpoint: while some agent supports two, the two
/// lowest-positioned bundles it supports merge in place of the first.
inline void merge_supported_pairs(const Instance& inst, std::vector<Bundle>& metas) {
    for (bool hit = true; hit;) {
        hit = false;
        for (int i = 0; i < inst.agent_count() && !hit; ++i) {
            int first = -1;
            for (std::size_t r = 0; r < metas.size(); ++r) {
                if (bundle_value(inst, i, metas[r]) < 0) continue;
                if (first < 0) {
                    first = static_cast<int>(r);
                } else {
                    metas[first] = bundle_union(metas[first], metas[r]);
                    metas.erase(metas.begin() + r);
                    hit = true;
                    break;
                }
            }
        }
    }
}

} // namespace detail

/// Refine a bundling whose free chores are scarce (1 <= |chores| < n): peel
/// goods until every meta-good is good-minimal, and let chores absorb any
/// helper set of loose goods and meta-goods that keeps them non-negative for
/// somebody. On return: every meta-good is good-minimal and chore-maximal,
/// and no remaining chore can be rescued by any helper set.
inline BundlingState refine(const Instance& inst, BundlingState state) {
    const int n = inst.agent_count();
    const int k = static_cast<int>(state.chores.size());
    if (k < 1 || k >= n)
        throw std::invalid_argument("refine: free chore count must be in [1, n-1]");
    for (int c : state.chores)
        if (!is_objective_chore(inst, c))
            throw std::invalid_argument("refine: free item is not an objective chore");

    for (;;) {
        bool changed = false;

        // Peel a removable good off the first non-minimal meta-good.
        for (std::size_t j = 0; j < state.meta_goods.size() && !changed; ++j) {
            for (int i = 0; i < n && !changed; ++i) {
                for (std::size_t gi = 0; gi < state.meta_goods[j].size(); ++gi) {
                    const int g = state.meta_goods[j][gi];
                    if (inst.utility[i][g] < 0) continue;
                    if (bundle_value(inst, i, state.meta_goods[j]) - inst.utility[i][g] > 0) {
                        state.meta_goods[j] =
                            bundle_without(state.meta_goods[j], g);
                        state.loose_goods.insert(
                            std::lower_bound(state.loose_goods.begin(),
                                             state.loose_goods.end(), g),
                            g);
                        changed = true;
                        break;
                    }
                }
            }
        }

        // Otherwise let the first rescuable chore absorb the canonical helper
        // set: every loose good and meta-good its agent values non-negatively.
        if (!changed) {
            for (int i = 0; i < n && !changed; ++i) {
                for (std::size_t z = 0; z < state.chores.size() && !changed; ++z) {
                    const int c = state.chores[z];
                    Ratio best = inst.utility[i][c];
                    for (int g : state.loose_goods)
                        if (inst.utility[i][g] > 0) best += inst.utility[i][g];
                    for (const Bundle& meta : state.meta_goods) {
                        const Ratio v = bundle_value(inst, i, meta);
                        if (v > 0) best += v;
                    }
                    if (best < 0) continue;

                    Bundle grown{c};
                    Bundle keep_loose;
                    for (int g : state.loose_goods) {
                        if (inst.utility[i][g] >= 0)
                            grown = bundle_union(grown, Bundle{g});
                        else
                            keep_loose.push_back(g);
                    }
                    std::vector<Bundle> keep_metas;
                    for (Bundle& meta : state.meta_goods) {
                        if (bundle_value(inst, i, meta) >= 0)
                            grown = bundle_union(grown, meta);
                        else
                            keep_metas.push_back(std::move(meta));
                    }
                    state.loose_goods = std::move(keep_loose);
                    state.meta_goods = std::move(keep_metas);
                    state.meta_goods.push_back(std::move(grown));
                    state.chores.erase(state.chores.begin() + z);
                    changed = true;
                }
            }
        }

        if (!changed) break;
        detail::merge_supported_pairs(inst, state.meta_goods);
    }
    return state;
}

} // namespace fairdiv
