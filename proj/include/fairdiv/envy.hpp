#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <vector>

#include "instance.hpp"

namespace fairdiv {

/// Complete weighted digraph over a set of agents: weight[a][b] is how much
/// node a envies node b under the evaluated bundles, u_a(A_b) - u_a(A_a).
/// `agents` maps node positions back to original agent indices.
struct EnvyGraph {
    std::vector<int> agents;
    std::vector<std::vector<Ratio>> weight;

    int size() const { return static_cast<int>(agents.size()); }
};

/// Build the envy graph of an allocation, optionally restricted to a subset
/// of agents (only their mutual envies, over their own bundles).
inline EnvyGraph build_envy_graph(const Instance& inst, const DiscreteAllocation& alloc,
                                  std::optional<std::vector<int>> subset = std::nullopt) {
    EnvyGraph g;
    if (subset) {
        g.agents = *subset;
    } else {
        g.agents.resize(inst.agent_count());
        std::iota(g.agents.begin(), g.agents.end(), 0);
    }
    const int k = g.size();
    g.weight.assign(k, std::vector<Ratio>(k, Ratio(0)));
    std::vector<Ratio> own(k);
    for (int a = 0; a < k; ++a)
        own[a] = bundle_value(inst, g.agents[a], alloc.bundles[g.agents[a]]);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
            if (a != b)
                g.weight[a][b] =
                    bundle_value(inst, g.agents[a], alloc.bundles[g.agents[b]]) - own[a];
    return g;
}

/// True iff some directed cycle has strictly positive total weight.
/// Negate weights and look for a negative cycle by iterative relaxation from
/// a virtual source at distance 0 everywhere: if a full sweep still improves
/// after n rounds, a negative (i.e. originally positive) cycle exists.
inline bool has_positive_cycle(const EnvyGraph& g) {
    const int n = g.size();
    if (n <= 1) return false;
    std::vector<Ratio> dist(n, Ratio(0));
    for (int round = 0; round < n; ++round) {
        bool improved = false;
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                if (a == b) continue;
                const Ratio cand = dist[a] - g.weight[a][b];
                if (cand < dist[b]) {
                    dist[b] = cand;
                    improved = true;
                }
            }
        }
        if (!improved) return false;
    }
    return true;
}

/// Reference oracle: an allocation's envy can be eliminated with payments iff
/// no bundle permutation beats the identity's total welfare. Factorial cost,
/// guarded at n <= 8.
inline bool envy_freeable_by_permutation(const Instance& inst, const DiscreteAllocation& alloc) {
    const int n = inst.agent_count();
    if (n > 8)
        throw std::invalid_argument("envy_freeable_by_permutation: instance too large (n > 8)");
    Ratio identity = 0;
    for (int i = 0; i < n; ++i) identity += bundle_value(inst, i, alloc.bundles[i]);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        Ratio welfare = 0;
        for (int i = 0; i < n; ++i) welfare += bundle_value(inst, i, alloc.bundles[perm[i]]);
        if (welfare > identity) return false;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return true;
}

/// Heaviest-path labels q_i = max over directed paths starting at i of the
/// path's total envy weight (empty path included, so q_i >= 0 and the label
/// of some node is exactly 0). Longest-walk relaxation converges within n-1
/// sweeps when the graph has no positive cycle; otherwise throws CycleError.
/// The labels satisfy q_a >= weight[a][b] + q_b for every pair.
inline PaymentVector heaviest_path_payments(const EnvyGraph& g) {
    const int n = g.size();
    PaymentVector q(n, Ratio(0));
    const auto sweep = [&] {
        bool improved = false;
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                if (a == b) continue;
                const Ratio cand = g.weight[a][b] + q[b];
                if (cand > q[a]) {
                    q[a] = cand;
                    improved = true;
                }
            }
        }
        return improved;
    };
    for (int round = 0; round + 1 < n; ++round)
        if (!sweep()) return q;
    if (sweep()) throw CycleError("heaviest_path_payments: positive-weight envy cycle");
    return q;
}

} // namespace fairdiv
