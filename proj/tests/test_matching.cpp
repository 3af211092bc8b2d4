#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <random>

#include <fairdiv/gen.hpp>
#include <fairdiv/matching.hpp>

using namespace fairdiv;

namespace {

Ratio rand_ratio(std::mt19937_64& rng, long long lo, long long hi) {
    return Ratio(fairdiv::detail::uniform_range(rng, lo, hi));
}

/// Brute-force perfect-matching oracle: max total value, ties broken toward
/// the lexicographically smallest assignment vector.
std::pair<Ratio, std::vector<int>> perfect_oracle(const std::vector<std::vector<Ratio>>& w) {
    const int n = static_cast<int>(w.size());
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::optional<std::pair<Ratio, std::vector<int>>> best;
    do {
        Ratio total = 0;
        for (int i = 0; i < n; ++i) total += w[i][perm[i]];
        if (!best || total > best->first || (total == best->first && perm < best->second))
            best = {total, perm};
    } while (std::next_permutation(perm.begin(), perm.end()));
    return *best;
}

/// Brute-force partial-matching oracle over edge subsets encoded as per-agent
/// choices (column or unmatched): max value, then max cardinality, then
/// lexicographically smallest assignment (unmatched ordered last).
struct PartialBest {
    Ratio value = 0;
    int matched = -1;
    std::vector<int> assigned; // column or -1
};

PartialBest partial_oracle(int agents, int goods,
                           const std::vector<std::vector<std::optional<Ratio>>>& w) {
    PartialBest best;
    std::vector<int> pick(agents, -1);
    const auto lex_key = [&](const std::vector<int>& a) {
        std::vector<int> key(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) key[i] = a[i] < 0 ? goods + 1 : a[i];
        return key;
    };
    const auto recurse = [&](auto&& self, int agent, std::vector<char>& used) -> void {
        if (agent == agents) {
            Ratio value = 0;
            int matched = 0;
            for (int i = 0; i < agents; ++i)
                if (pick[i] >= 0) {
                    value += *w[i][pick[i]];
                    ++matched;
                }
            if (best.matched < 0 || value > best.value ||
                (value == best.value && matched > best.matched) ||
                (value == best.value && matched == best.matched &&
                 lex_key(pick) < lex_key(best.assigned))) {
                best = {value, matched, pick};
            }
            return;
        }
        pick[agent] = -1;
        self(self, agent + 1, used);
        for (int j = 0; j < goods; ++j) {
            if (used[j] || !w[agent][j]) continue;
            used[j] = 1;
            pick[agent] = j;
            self(self, agent + 1, used);
            pick[agent] = -1;
            used[j] = 0;
        }
    };
    std::vector<char> used(goods, 0);
    recurse(recurse, 0, used);
    return best;
}

} // namespace

TEST_CASE("perfect matching on a frozen 2x2 all-chore matrix") {
    const RoundMatching m = max_weight_perfect_matching(
        {{Ratio(-1), Ratio(-2)}, {Ratio(-7), Ratio(-2)}});
    CHECK(m.value == Ratio(-3));
    CHECK(*m.assigned[0] == 0);
    CHECK(*m.assigned[1] == 1);
}

TEST_CASE("perfect matching breaks value ties lexicographically") {
    const RoundMatching m = max_weight_perfect_matching(
        {{Ratio(1), Ratio(1), Ratio(1)},
         {Ratio(1), Ratio(1), Ratio(1)},
         {Ratio(1), Ratio(1), Ratio(1)}});
    CHECK(m.value == Ratio(3));
    CHECK(*m.assigned[0] == 0);
    CHECK(*m.assigned[1] == 1);
    CHECK(*m.assigned[2] == 2);
}

TEST_CASE("perfect matching agrees with the permutation oracle") {
    std::mt19937_64 rng(4242);
    for (int trial = 0; trial < 250; ++trial) {
        const int n = 1 + static_cast<int>(fairdiv::detail::uniform_below(rng, 5));
        std::vector<std::vector<Ratio>> w(n, std::vector<Ratio>(n));
        for (auto& row : w)
            for (Ratio& v : row) v = rand_ratio(rng, -4, 4);
        const RoundMatching got = max_weight_perfect_matching(w);
        const auto [value, perm] = perfect_oracle(w);
        CHECK(got.value == value);
        for (int i = 0; i < n; ++i) CHECK(*got.assigned[i] == perm[i]);
    }
}

TEST_CASE("perfect matching rejects non-square matrices") {
    CHECK_THROWS_AS(max_weight_perfect_matching({{Ratio(1), Ratio(2)}}),
                    std::invalid_argument);
}

TEST_CASE("partial matching agrees with the subset oracle") {
    std::mt19937_64 rng(1717);
    for (int trial = 0; trial < 250; ++trial) {
        const int agents = 1 + static_cast<int>(fairdiv::detail::uniform_below(rng, 4));
        const int goods = static_cast<int>(fairdiv::detail::uniform_below(rng, 5));
        std::vector<std::vector<std::optional<Ratio>>> w(
            agents, std::vector<std::optional<Ratio>>(goods));
        std::vector<WeightedEdge> edges;
        for (int i = 0; i < agents; ++i)
            for (int j = 0; j < goods; ++j)
                if (fairdiv::detail::uniform_below(rng, 3) != 0) { // ~2/3 edge density
                    const Ratio value = rand_ratio(rng, 0, 4);
                    w[i][j] = value;
                    edges.push_back({i, j, value});
                }
        const RoundMatching got = max_weight_matching(agents, goods, edges);
        const PartialBest want = partial_oracle(agents, goods, w);
        CHECK(got.value == want.value);
        int matched = 0;
        for (int i = 0; i < agents; ++i) {
            const int col = got.assigned[i] ? *got.assigned[i] : -1;
            CHECK(col == want.assigned[i]);
            matched += col >= 0;
        }
        CHECK(matched == want.matched);
    }
}

TEST_CASE("partial matching gives a contested good to its higher bidder") {
    const RoundMatching m =
        max_weight_matching(2, 1, {{0, 0, Ratio(2)}, {1, 0, Ratio(3)}});
    CHECK(m.value == Ratio(3));
    CHECK_FALSE(m.assigned[0].has_value());
    CHECK(*m.assigned[1] == 0);
}

TEST_CASE("partial matching takes disjoint unit edges whole") {
    const RoundMatching m =
        max_weight_matching(2, 2, {{0, 0, Ratio(1)}, {1, 1, Ratio(1)}});
    CHECK(m.value == Ratio(2));
    CHECK(*m.assigned[0] == 0);
    CHECK(*m.assigned[1] == 1);
}

TEST_CASE("partial matching prefers more edges among equal-value optima") {
    // Zero-value edges still get matched: value ties, cardinality decides.
    const RoundMatching m =
        max_weight_matching(2, 2, {{0, 0, Ratio(0)}, {1, 1, Ratio(0)}});
    CHECK(m.value == 0);
    CHECK(*m.assigned[0] == 0);
    CHECK(*m.assigned[1] == 1);
}

TEST_CASE("partial matching validates its edges") {
    CHECK_THROWS_AS(max_weight_matching(1, 1, {{0, 0, Ratio(-1)}}), std::invalid_argument);
    CHECK_THROWS_AS(max_weight_matching(1, 1, {{0, 1, Ratio(1)}}), std::invalid_argument);
    CHECK_THROWS_AS(max_weight_matching(1, 1, {{-1, 0, Ratio(1)}}), std::invalid_argument);
}

TEST_CASE("imwpm deals a frozen pair of chores to the right agent") {
    // u(c0) = (-1, -1), u(c1) = (-3, -1): agent 0 must avoid c1.
    const Instance inst = make_instance({{Ratio(-1), Ratio(-3)}, {Ratio(-1), Ratio(-1)}});
    const MatchingTrace trace = imwpm(
        inst, {{MetaKind::SingletonChore, {0}}, {MetaKind::SingletonChore, {1}}});
    REQUIRE(trace.rounds.size() == 1);
    CHECK(trace.allocation[0] == std::vector<int>{0});
    CHECK(trace.allocation[1] == std::vector<int>{1});
    CHECK(trace.rounds[0].value == Ratio(-2));
    CHECK(is_round_monotone(inst, trace));
}

TEST_CASE("imwpm runs pool-size/n rounds") {
    const Instance inst = make_instance(
        {{Ratio(-1), Ratio(-1), Ratio(-1), Ratio(-1)},
         {Ratio(-1), Ratio(-1), Ratio(-1), Ratio(-1)}});
    std::vector<MetaItem> pool;
    for (int t = 0; t < 4; ++t) pool.push_back({MetaKind::SingletonChore, {t}});
    const MatchingTrace trace = imwpm(inst, std::move(pool));
    CHECK(trace.rounds.size() == 2);
    CHECK(trace.allocation[0].size() == 2);
    CHECK(trace.allocation[1].size() == 2);
    CHECK(is_round_monotone(inst, trace));
}

TEST_CASE("imwpm insists on a pool that is a multiple of n") {
    const Instance inst = make_instance({{Ratio(-1)}, {Ratio(-1)}});
    CHECK_THROWS_AS(imwpm(inst, {{MetaKind::SingletonChore, {0}}}), std::invalid_argument);
}

TEST_CASE("imwm hands each agent its favorite when interests are disjoint") {
    // u(g0) = (3, 1), u(g1) = (2, 0).
    const Instance inst = make_instance({{Ratio(3), Ratio(2)}, {Ratio(1), Ratio(0)}});
    const MatchingTrace trace = imwm(
        inst, {0, 1}, {{MetaKind::MetaGood, {0}}, {MetaKind::MetaGood, {1}}});
    REQUIRE(trace.rounds.size() == 1);
    CHECK(trace.allocation[0] == std::vector<int>{0});
    CHECK(trace.allocation[1] == std::vector<int>{1});
    CHECK(trace.rounds[0].value == Ratio(3));
}

TEST_CASE("imwm skips negative edges even when that costs a round") {
    // u(g0) = (2, -1), u(g1) = (-1, 2): one round, everyone on their own good.
    const Instance inst = make_instance({{Ratio(2), Ratio(-1)}, {Ratio(-1), Ratio(2)}});
    const MatchingTrace trace = imwm(
        inst, {0, 1}, {{MetaKind::MetaGood, {0}}, {MetaKind::MetaGood, {1}}});
    REQUIRE(trace.rounds.size() == 1);
    CHECK(trace.rounds[0].value == Ratio(4));
    CHECK(trace.allocation[0] == std::vector<int>{0});
    CHECK(trace.allocation[1] == std::vector<int>{1});
}

TEST_CASE("imwm rejects a pool entry that nobody supports") {
    const Instance inst = make_instance({{Ratio(-1)}, {Ratio(-2)}});
    CHECK_THROWS_AS(imwm(inst, {0, 1}, {{MetaKind::MetaGood, {0}}}), std::invalid_argument);
}

TEST_CASE("imwm traces are round monotone on random goods pools") {
    std::mt19937_64 rng(5555);
    for (int trial = 0; trial < 100; ++trial) {
        GenParams params;
        params.agents = 2 + static_cast<int>(fairdiv::detail::uniform_below(rng, 3));
        params.items = 1 + static_cast<int>(fairdiv::detail::uniform_below(rng, 6));
        params.util_min = 0;
        params.util_max = 5;
        const Instance inst = generate_instance(params, 60000 + trial);
        std::vector<MetaItem> pool;
        for (int t = 0; t < inst.item_count(); ++t)
            pool.push_back({MetaKind::MetaGood, {t}});
        std::vector<int> agents(inst.agent_count());
        std::iota(agents.begin(), agents.end(), 0);
        const MatchingTrace trace = imwm(inst, agents, std::move(pool));
        CHECK(is_round_monotone(inst, trace));
        std::size_t handed = 0;
        for (const auto& got : trace.allocation) handed += got.size();
        CHECK(handed == static_cast<std::size_t>(inst.item_count()));
    }
}

TEST_CASE("imwpm traces are round monotone on random chore pools") {
    std::mt19937_64 rng(5556);
    for (int trial = 0; trial < 100; ++trial) {
        GenParams params;
        params.agents = 2 + static_cast<int>(fairdiv::detail::uniform_below(rng, 3));
        params.items = 1 + static_cast<int>(fairdiv::detail::uniform_below(rng, 6));
        params.chores_only = true;
        const Instance inst = generate_instance(params, 61000 + trial);
        std::vector<MetaItem> pool;
        for (int t = 0; t < inst.item_count(); ++t)
            pool.push_back({MetaKind::SingletonChore, {t}});
        while (pool.size() % inst.agent_count() != 0) pool.push_back({MetaKind::Dummy, {}});
        const MatchingTrace trace = imwpm(inst, std::move(pool));
        CHECK(is_round_monotone(inst, trace));
    }
}
