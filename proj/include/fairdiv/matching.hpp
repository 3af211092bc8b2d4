#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "instance.hpp"

namespace fairdiv {

/// Composite matching objects: a dummy placeholder (valued 0 by everyone), a
/// lone chore, a merged bundle some agent likes (meta-good), or a meta-good
/// with a chore attached (meta-chore).
enum class MetaKind { Dummy, SingletonChore, MetaGood, MetaChore };

struct MetaItem {
    MetaKind kind = MetaKind::Dummy;
    Bundle items;
};

inline Ratio meta_value(const Instance& inst, int agent, const MetaItem& item) {
    return bundle_value(inst, agent, item.items);
}

/// One matching round: per agent, an optional matched index (column index for
/// the single-shot operations, pool index inside traces) and the round's
/// total matched value.
struct RoundMatching {
    std::vector<std::optional<int>> assigned;
    Ratio value;
};

/// Full record of an iterated matching run: the ambient agents, the item pool,
/// every round, and the per-agent accumulated pool indices.
struct MatchingTrace {
    std::vector<int> agents;
    std::vector<MetaItem> pool;
    std::vector<RoundMatching> rounds;
    std::vector<std::vector<int>> allocation;
};

namespace detail {

/// Weight with two tie-break layers under the exact value: matched edge count
/// (more is better), then an order key encoding the assignment vector (so the
/// optimum is unique and deterministic). Compared lexicographically.
struct MatchWeight {
    Ratio value;
    long long matched = 0;
    Ratio order;

    friend bool operator<(const MatchWeight& a, const MatchWeight& b) {
        if (a.value != b.value) return a.value < b.value;
        if (a.matched != b.matched) return a.matched < b.matched;
        return a.order < b.order;
    }
    friend MatchWeight operator+(const MatchWeight& a, const MatchWeight& b) {
        return {a.value + b.value, a.matched + b.matched, a.order + b.order};
    }
    friend MatchWeight operator-(const MatchWeight& a, const MatchWeight& b) {
        return {a.value - b.value, a.matched - b.matched, a.order - b.order};
    }
};

/// Order key for cell (row, col) of a rows x cols matrix. Maximizing the sum
/// of keys picks, among value-and-cardinality ties, the assignment whose
/// column vector (row 0 first) is lexicographically smallest: each row's key
/// is -(col+1) scaled by a positional power big enough to dominate all later
/// rows combined.
inline Ratio assignment_order_key(int rows, int cols, int row, int col) {
    const BigInt base = cols + 1;
    BigInt key = boost::multiprecision::pow(base, static_cast<unsigned>(rows - 1 - row));
    key *= -(col + 1);
    return Ratio(key);
}

/// Exact min-cost assignment on a complete rows x cols matrix (rows <= cols):
/// every row receives a distinct column and the total cost is minimal.
/// Potentials + shortest augmenting path; needs only +, -, < on W and that
/// W{} is the additive identity, so it runs on any ordered abelian group.
template <class W>
std::vector<int> min_cost_assignment(const std::vector<std::vector<W>>& cost) {
    const int n = static_cast<int>(cost.size());
    if (n == 0) return {};
    const int m = static_cast<int>(cost[0].size());
    if (m < n) throw std::invalid_argument("min_cost_assignment: fewer columns than rows");

    // 1-based arrays; match[j] is the row occupying column j (0 = free).
    std::vector<W> u(n + 1, W{}), v(m + 1, W{});
    std::vector<int> match(m + 1, 0), way(m + 1, 0);
    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<std::optional<W>> minv(m + 1);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = match[j0];
            int j1 = -1;
            std::optional<W> delta;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const W cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (!minv[j] || cur < *minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (!delta || *minv[j] < *delta) {
                    delta = *minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[match[j]] = u[match[j]] + *delta;
                    v[j] = v[j] - *delta;
                } else if (minv[j]) {
                    *minv[j] = *minv[j] - *delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= m; ++j)
        if (match[j] != 0) row_to_col[match[j] - 1] = j - 1;
    return row_to_col;
}

/// Maximize the total MatchWeight over complete assignments (rows <= cols).
inline std::vector<int> max_weight_assignment(const std::vector<std::vector<MatchWeight>>& weight) {
    const int n = static_cast<int>(weight.size());
    if (n == 0) return {};
    const int m = static_cast<int>(weight[0].size());
    std::vector<std::vector<MatchWeight>> cost(n, std::vector<MatchWeight>(m));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) cost[i][j] = MatchWeight{} - weight[i][j];
    return min_cost_assignment(cost);
}

} // namespace detail

/// Maximum-weight perfect matching on a square matrix weight[agent][item].
/// Ties in total value are broken toward the lexicographically smallest
/// assignment vector (agent 0's column first). Exact and deterministic.
inline RoundMatching max_weight_perfect_matching(const std::vector<std::vector<Ratio>>& weight) {
    const int n = static_cast<int>(weight.size());
    for (const auto& row : weight)
        if (static_cast<int>(row.size()) != n)
            throw std::invalid_argument("max_weight_perfect_matching: matrix not square");
    std::vector<std::vector<detail::MatchWeight>> w(n, std::vector<detail::MatchWeight>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            w[i][j] = {weight[i][j], 0, detail::assignment_order_key(n, n, i, j)};
    const std::vector<int> cols = detail::max_weight_assignment(w);
    RoundMatching out;
    out.assigned.resize(n);
    out.value = 0;
    for (int i = 0; i < n; ++i) {
        out.assigned[i] = cols[i];
        out.value += weight[i][cols[i]];
    }
    return out;
}

struct WeightedEdge {
    int agent;
    int good;
    Ratio weight;
};

/// Maximum-weight (not necessarily perfect) matching on a bipartite edge set
/// with non-negative weights. Among maximum-value matchings the one matching
/// the most edges wins; remaining ties go to the lexicographically smallest
/// assignment vector. Agents without a chosen edge are left unmatched.
inline RoundMatching max_weight_matching(int agent_count, int good_count,
                                         const std::vector<WeightedEdge>& edges) {
    std::vector<std::vector<std::optional<Ratio>>> w(
        agent_count, std::vector<std::optional<Ratio>>(good_count));
    Ratio magnitude = 1;
    for (const WeightedEdge& e : edges) {
        if (e.agent < 0 || e.agent >= agent_count || e.good < 0 || e.good >= good_count)
            throw std::invalid_argument("max_weight_matching: edge endpoint out of range");
        if (e.weight < 0)
            throw std::invalid_argument("max_weight_matching: negative edge weight");
        w[e.agent][e.good] = e.weight;
        magnitude += e.weight;
    }

    // Columns: the goods, then one zero-weight slack column per agent; a
    // missing edge costs enough that it is never picked over going slack.
    const int cols = good_count + agent_count;
    std::vector<std::vector<detail::MatchWeight>> weight(
        agent_count, std::vector<detail::MatchWeight>(cols));
    for (int i = 0; i < agent_count; ++i) {
        for (int j = 0; j < cols; ++j) {
            const Ratio order = detail::assignment_order_key(agent_count, cols, i, j);
            if (j >= good_count)
                weight[i][j] = {Ratio(0), 0, order};
            else if (w[i][j])
                weight[i][j] = {*w[i][j], 1, order};
            else
                weight[i][j] = {-magnitude, 0, order};
        }
    }
    const std::vector<int> assignment = detail::max_weight_assignment(weight);
    RoundMatching out;
    out.assigned.resize(agent_count);
    out.value = 0;
    for (int i = 0; i < agent_count; ++i) {
        const int j = assignment[i];
        if (j < good_count) {
            if (!w[i][j])
                throw std::logic_error("max_weight_matching: non-edge selected");
            out.assigned[i] = j;
            out.value += *w[i][j];
        }
    }
    return out;
}

/// Iterated maximum-weight perfect matching: the pool (padded to a multiple
/// of n with dummies by the caller) is handed out over |pool|/n rounds; each
/// round perfectly matches all n agents against the remaining pool, removes
/// the matched entries, and repeats. Trace rounds store pool indices.
inline MatchingTrace imwpm(const Instance& inst, std::vector<MetaItem> pool) {
    const int n = inst.agent_count();
    if (n == 0) throw std::invalid_argument("imwpm: no agents");
    if (pool.size() % n != 0)
        throw std::invalid_argument("imwpm: pool size not a multiple of the agent count");

    MatchingTrace trace;
    trace.agents.resize(n);
    for (int i = 0; i < n; ++i) trace.agents[i] = i;
    trace.pool = std::move(pool);
    trace.allocation.assign(n, {});

    std::vector<int> remaining(trace.pool.size());
    for (std::size_t j = 0; j < trace.pool.size(); ++j) remaining[j] = static_cast<int>(j);

    while (!remaining.empty()) {
        const int r = static_cast<int>(remaining.size());
        std::vector<std::vector<detail::MatchWeight>> weight(
            n, std::vector<detail::MatchWeight>(r));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < r; ++j)
                weight[i][j] = {meta_value(inst, i, trace.pool[remaining[j]]), 0,
                                detail::assignment_order_key(n, r, i, j)};
        const std::vector<int> cols = detail::max_weight_assignment(weight);

        RoundMatching round;
        round.assigned.resize(n);
        round.value = 0;
        std::vector<char> taken(r, 0);
        for (int i = 0; i < n; ++i) {
            const int pool_idx = remaining[cols[i]];
            round.assigned[i] = pool_idx;
            round.value += meta_value(inst, i, trace.pool[pool_idx]);
            trace.allocation[i].push_back(pool_idx);
            taken[cols[i]] = 1;
        }
        trace.rounds.push_back(std::move(round));

        std::vector<int> next;
        next.reserve(r - n);
        for (int j = 0; j < r; ++j)
            if (!taken[j]) next.push_back(remaining[j]);
        remaining = std::move(next);
    }
    return trace;
}

/// Iterated maximum-weight matching for goods: each round matches the given
/// agents against the remaining pool along non-negative edges only, removes
/// what was matched, and repeats until the pool is empty. Every pool entry
/// must be liked by at least one of the agents, or the loop could not finish.
inline MatchingTrace imwm(const Instance& inst, const std::vector<int>& agents,
                          std::vector<MetaItem> pool) {
    const int k = static_cast<int>(agents.size());
    if (k == 0 && !pool.empty())
        throw std::invalid_argument("imwm: nonempty pool but no agents");
    for (const MetaItem& item : pool) {
        bool supported = false;
        for (int a : agents)
            if (meta_value(inst, a, item) >= 0) {
                supported = true;
                break;
            }
        if (!supported)
            throw std::invalid_argument("imwm: orphan meta-good valued negatively by all agents");
    }

    MatchingTrace trace;
    trace.agents = agents;
    trace.pool = std::move(pool);
    trace.allocation.assign(k, {});

    std::vector<int> remaining(trace.pool.size());
    for (std::size_t j = 0; j < trace.pool.size(); ++j) remaining[j] = static_cast<int>(j);

    while (!remaining.empty()) {
        const int r = static_cast<int>(remaining.size());
        std::vector<WeightedEdge> edges;
        for (int a = 0; a < k; ++a)
            for (int j = 0; j < r; ++j) {
                const Ratio value = meta_value(inst, agents[a], trace.pool[remaining[j]]);
                if (value >= 0) edges.push_back({a, j, value});
            }
        RoundMatching matched = max_weight_matching(k, r, edges);

        RoundMatching round;
        round.assigned.resize(k);
        round.value = matched.value;
        std::vector<char> taken(r, 0);
        int hits = 0;
        for (int a = 0; a < k; ++a) {
            if (!matched.assigned[a]) continue;
            const int j = *matched.assigned[a];
            const int pool_idx = remaining[j];
            round.assigned[a] = pool_idx;
            trace.allocation[a].push_back(pool_idx);
            taken[j] = 1;
            ++hits;
        }
        if (hits == 0) throw std::logic_error("imwm: round matched nothing");
        trace.rounds.push_back(std::move(round));

        std::vector<int> next;
        next.reserve(r - hits);
        for (int j = 0; j < r; ++j)
            if (!taken[j]) next.push_back(remaining[j]);
        remaining = std::move(next);
    }
    return trace;
}

/// Round monotonicity: anything an agent receives in an earlier round is
/// worth at least as much to them as anything anyone receives later
/// (an unmatched round counts as value 0 for its agent).
inline bool is_round_monotone(const Instance& inst, const MatchingTrace& trace) {
    const int k = static_cast<int>(trace.agents.size());
    const int rounds = static_cast<int>(trace.rounds.size());
    for (int t = 0; t < rounds; ++t) {
        for (int a = 0; a < k; ++a) {
            const int agent = trace.agents[a];
            Ratio own = 0;
            if (trace.rounds[t].assigned[a])
                own = meta_value(inst, agent, trace.pool[*trace.rounds[t].assigned[a]]);
            for (int later = t + 1; later < rounds; ++later)
                for (int b = 0; b < k; ++b) {
                    if (!trace.rounds[later].assigned[b]) continue;
                    const MetaItem& item = trace.pool[*trace.rounds[later].assigned[b]];
                    if (meta_value(inst, agent, item) > own) return false;
                }
        }
    }
    return true;
}

} // namespace fairdiv
