#include <catch2/catch_amalgamated.hpp>

#include <numeric>
#include <random>

#include <fairdiv/division.hpp>
#include <fairdiv/gen.hpp>
#include <fairdiv/verify.hpp>

using namespace fairdiv;

namespace {

Instance uniform_cake(std::vector<std::vector<Ratio>> utility) {
    Instance inst = make_instance(std::move(utility));
    std::vector<std::vector<DensitySegment>> cake(inst.agent_count());
    for (auto& segs : cake) segs.push_back({Ratio(0), Ratio(1), Ratio(1)});
    inst.cake = std::move(cake);
    return inst;
}

} // namespace

TEST_CASE("efm_money: surplus labels get an equal top-up") {
    // A0 = {}, A1 = {t0}; agent 0 envies by 1/4, agent 1 is content.
    const Instance inst = make_instance({{Ratio(1, 4)}, {Ratio(9)}});
    const DiscreteAllocation alloc{{{}, {0}}};
    const MoneyResult out = efm_money(inst, alloc, {0, 1});
    CHECK(out.labels[0] == Ratio(1, 4));
    CHECK(out.labels[1] == 0);
    CHECK(out.payments[0] == Ratio(5, 8));
    CHECK(out.payments[1] == Ratio(3, 8));
    CHECK_FALSE(out.schedule.has_value());
    CHECK(check_envy_free_money(inst, alloc, out.payments).verdict);
}

TEST_CASE("efm_money: zero envy splits the unit evenly") {
    const Instance inst = make_instance({{Ratio(1), Ratio(0)}, {Ratio(0), Ratio(1)}});
    const MoneyResult out = efm_money(inst, {{{0}, {1}}}, {0, 1});
    CHECK(out.payments == PaymentVector{Ratio(1, 2), Ratio(1, 2)});
    CHECK_FALSE(out.schedule.has_value());
}

TEST_CASE("efm_money: deficit that exhausts exactly on the first gap") {
    // Labels (3/2, 1/2, 0): the first gap costs exactly the whole budget.
    const Instance inst = make_instance({{Ratio(1), Ratio(3, 2)},
                                         {Ratio(2), Ratio(5, 2)},
                                         {Ratio(1), Ratio(5)}});
    const DiscreteAllocation alloc{{{}, {0}, {1}}};
    const MoneyResult out = efm_money(inst, alloc, {0, 1, 2});
    CHECK(out.labels == PaymentVector{Ratio(3, 2), Ratio(1, 2), Ratio(0)});
    CHECK(out.payments == PaymentVector{Ratio(1), Ratio(0), Ratio(0)});
    REQUIRE(out.schedule.has_value());
    CHECK(out.schedule->final_round == 1);
    CHECK(out.schedule->residual_share == 0);
    CHECK(out.schedule->distinct_values ==
          std::vector<Ratio>{Ratio(3, 2), Ratio(1, 2), Ratio(0)});
    CHECK(out.schedule->groups ==
          std::vector<std::vector<int>>{{0}, {1}, {2}});
}

TEST_CASE("efm_money: deficit truncated inside the first round") {
    // Labels (2, 0): the gap of 2 is cut to a residual share of 1.
    const Instance inst = make_instance({{Ratio(2)}, {Ratio(5)}});
    const MoneyResult out = efm_money(inst, {{{}, {0}}}, {0, 1});
    CHECK(out.labels == PaymentVector{Ratio(2), Ratio(0)});
    CHECK(out.payments == PaymentVector{Ratio(1), Ratio(0)});
    REQUIRE(out.schedule.has_value());
    CHECK(out.schedule->final_round == 1);
    CHECK(out.schedule->residual_share == 1);
}

TEST_CASE("efm_money: deficit truncated in a later round") {
    // Labels (3/2, 1, 0): round one pays 1/2, round two is cut at 1/4 each.
    const Instance inst = make_instance({{Ratio(1, 4), Ratio(3, 2)},
                                         {Ratio(3), Ratio(4)},
                                         {Ratio(-1), Ratio(8)}});
    const DiscreteAllocation alloc{{{}, {0}, {1}}};
    const MoneyResult out = efm_money(inst, alloc, {0, 1, 2});
    CHECK(out.labels == PaymentVector{Ratio(3, 2), Ratio(1), Ratio(0)});
    CHECK(out.payments == PaymentVector{Ratio(3, 4), Ratio(1, 4), Ratio(0)});
    REQUIRE(out.schedule.has_value());
    CHECK(out.schedule->final_round == 2);
    CHECK(out.schedule->residual_share == Ratio(1, 4));
}

TEST_CASE("efm_money rejects an empty paid set and positive cycles") {
    const Instance inst = make_instance({{Ratio(0), Ratio(5)}, {Ratio(5), Ratio(0)}});
    CHECK_THROWS_AS(efm_money(inst, {{{0}, {1}}}, {}), std::invalid_argument);
    // Each agent holds the other's favorite: not envy-freeable.
    CHECK_THROWS_AS(efm_money(inst, {{{0}, {1}}}, {0, 1}), CycleError);
}

TEST_CASE("consensus_split validates inputs") {
    const Instance no_cake = make_instance({{Ratio(1)}});
    CHECK_THROWS_AS(consensus_split(no_cake, {0}, {Ratio(1)}), std::invalid_argument);

    const Instance inst = uniform_cake({{Ratio(0)}, {Ratio(0)}});
    CHECK_THROWS_AS(consensus_split(inst, {0, 1}, {Ratio(1)}), std::invalid_argument);
    CHECK_THROWS_AS(consensus_split(inst, {0, 1}, {Ratio(-1, 2), Ratio(1)}),
                    std::invalid_argument);
    CHECK_THROWS_AS(consensus_split(inst, {0, 1}, {Ratio(3, 4), Ratio(1, 2)}),
                    std::invalid_argument);

    Instance skewed = uniform_cake({{Ratio(0)}, {Ratio(0)}});
    (*skewed.cake)[1][0].density = 2; // whole-cake value 2: not normalized
    CHECK_THROWS_AS(consensus_split(skewed, {0, 1}, {Ratio(1, 2), Ratio(1, 2)}),
                    std::invalid_argument);
}

TEST_CASE("consensus_split on a uniform cake is plain proportional cutting") {
    const Instance inst = uniform_cake({{Ratio(0)}, {Ratio(0)}});
    const auto pieces = consensus_split(inst, {0, 1}, {Ratio(1, 3), Ratio(2, 3)});
    REQUIRE(pieces[0].intervals.size() == 1);
    REQUIRE(pieces[1].intervals.size() == 1);
    CHECK(pieces[0].intervals[0].lo == 0);
    CHECK(pieces[0].intervals[0].hi == Ratio(1, 3));
    CHECK(pieces[1].intervals[0].lo == Ratio(1, 3));
    CHECK(pieces[1].intervals[0].hi == 1);
}

TEST_CASE("consensus_split splits every elementary interval proportionally") {
    Instance inst = make_instance({{Ratio(0)}, {Ratio(0)}});
    inst.cake = {{
        {{Ratio(0), Ratio(1, 2), Ratio(2)}},  // agent 0: all value up front
        {{Ratio(0), Ratio(1), Ratio(1)}},     // agent 1: uniform
    }};
    const auto pieces = consensus_split(inst, {0, 1}, {Ratio(1, 2), Ratio(1, 2)});
    // Both elementary intervals [0,1/2] and [1/2,1] are halved.
    REQUIRE(pieces[0].intervals.size() == 2);
    CHECK(pieces[0].intervals[0].lo == 0);
    CHECK(pieces[0].intervals[0].hi == Ratio(1, 4));
    CHECK(pieces[0].intervals[1].lo == Ratio(1, 2));
    CHECK(pieces[0].intervals[1].hi == Ratio(3, 4));
    for (int evaluator : {0, 1})
        for (int owner : {0, 1})
            CHECK(cake_value(inst, evaluator, pieces[owner]) == Ratio(1, 2));
}

TEST_CASE("consensus_split is exact for random cakes and shares") {
    std::mt19937_64 rng(123);
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 200 && checked < 80; ++seed) {
        GenParams params;
        params.agents = 2 + static_cast<int>(seed % 3);
        params.items = 0;
        params.cake = true;
        const Instance inst = normalize(generate_instance(params, 40000 + seed));
        const std::vector<int> paid = positive_cake_agents(inst);
        if (paid.size() < 2) continue;
        ++checked;

        // Random non-negative shares over a common denominator, summing to 1.
        const long long den = 12;
        std::vector<long long> raw(paid.size());
        long long left = den;
        for (std::size_t a = 0; a + 1 < paid.size(); ++a) {
            raw[a] = static_cast<long long>(
                fairdiv::detail::uniform_below(rng, static_cast<std::uint64_t>(left + 1)));
            left -= raw[a];
        }
        raw.back() = left;
        std::vector<Ratio> shares;
        for (long long r : raw) shares.emplace_back(r, den);

        const auto pieces = consensus_split(inst, paid, shares);
        Ratio covered = 0;
        Ratio last_hi = 0;
        std::vector<std::pair<Ratio, Ratio>> all;
        for (std::size_t a = 0; a < paid.size(); ++a) {
            for (const Interval& iv : pieces[a].intervals) {
                REQUIRE(iv.lo < iv.hi);
                REQUIRE(iv.lo >= 0);
                REQUIRE(iv.hi <= 1);
                covered += iv.hi - iv.lo;
                all.emplace_back(iv.lo, iv.hi);
            }
            for (std::size_t b = 0; b < paid.size(); ++b)
                CHECK(cake_value(inst, paid[b], pieces[a]) == shares[a]);
        }
        CHECK(covered == 1);
        std::sort(all.begin(), all.end());
        for (const auto& [lo, hi] : all) {
            CHECK(lo >= last_hi); // pairwise disjoint
            last_hi = hi;
        }
    }
    CHECK(checked >= 40);
}

TEST_CASE("solve_efm needs a cake") {
    CHECK_THROWS_AS(solve_efm(make_instance({{Ratio(1)}})), std::invalid_argument);
}

TEST_CASE("solve_efm hands an unwanted cake to agent 0 whole") {
    Instance inst = make_instance({{Ratio(2)}, {Ratio(1)}});
    inst.cake = std::vector<std::vector<DensitySegment>>(2); // nobody values the cake
    const EfmSolution sol = solve_efm(inst);
    CHECK(sol.paid_agents.empty());
    REQUIRE(sol.pieces[0].intervals.size() == 1);
    CHECK(sol.pieces[0].intervals[0].lo == 0);
    CHECK(sol.pieces[0].intervals[0].hi == 1);
    CHECK(sol.pieces[1].intervals.empty());
    CHECK(check_efm(sol.normalized, sol.with_pieces()).verdict);
}

TEST_CASE("solve_efm pipeline, frozen end to end") {
    // Two goods with opposite favorites, one heavy shared chore, and a
    // uniform cake each agent values at 1.  The discrete stage attaches the
    // chore to agent 0's favorite good; the labels come out (2, 0), which
    // exceeds the cake budget, so agent 0 is compensated with the whole cake.
    const Instance inst = uniform_cake(
        {{Ratio(2), Ratio(-1), Ratio(-5)}, {Ratio(-1), Ratio(2), Ratio(-5)}});
    const EfmSolution sol = solve_efm(inst);

    CHECK(sol.discrete.bundles[0] == Bundle{0, 2});
    CHECK(sol.discrete.bundles[1] == Bundle{1});
    CHECK(sol.paid_agents == std::vector<int>{0, 1});
    CHECK(sol.labels == PaymentVector{Ratio(2), Ratio(0)});
    CHECK(sol.payments == PaymentVector{Ratio(1), Ratio(0)});
    REQUIRE(sol.schedule.has_value());
    CHECK(sol.schedule->final_round == 1);
    CHECK(sol.schedule->residual_share == 1);
    REQUIRE(sol.pieces[0].intervals.size() == 1);
    CHECK(sol.pieces[0].intervals[0].lo == 0);
    CHECK(sol.pieces[0].intervals[0].hi == 1);
    CHECK(sol.pieces[1].intervals.empty());
    CHECK(check_efm(sol.normalized, sol.with_pieces()).verdict);
    CHECK(check_efm(sol.normalized, sol.with_payments()).verdict);
}

TEST_CASE("solve_efm output is EFM in both the pieces and the payments form") {
    for (std::uint64_t seed = 0; seed < 120; ++seed) {
        GenParams params;
        params.agents = 2 + static_cast<int>(seed % 3);
        params.items = static_cast<int>(seed % 6);
        params.cake = true;
        const Instance inst = generate_instance(params, 50000 + seed);
        const EfmSolution sol = solve_efm(inst);
        INFO("seed " << seed << ", case " << case_tag_name(sol.certificate.case_tag));

        CHECK(is_partition(sol.normalized, sol.discrete));
        CHECK(check_efm(sol.normalized, sol.with_pieces()).verdict);
        CHECK(check_efm(sol.normalized, sol.with_payments()).verdict);

        if (!sol.paid_agents.empty()) {
            Ratio total = 0;
            for (const Ratio& p : sol.payments) {
                CHECK(p >= 0);
                total += p;
            }
            CHECK(total == 1);
            // Every paid agent appraises every piece at its exact payment.
            for (int i : sol.paid_agents)
                for (int j = 0; j < sol.normalized.agent_count(); ++j)
                    CHECK(cake_value(sol.normalized, i, sol.pieces[j]) == sol.payments[j]);
            // Unpaid agents hold no cake and receive no payment.
            for (int j = 0; j < sol.normalized.agent_count(); ++j) {
                if (std::find(sol.paid_agents.begin(), sol.paid_agents.end(), j) !=
                    sol.paid_agents.end())
                    continue;
                CHECK(sol.pieces[j].intervals.empty());
                CHECK(sol.payments[j] == 0);
            }
        }
    }
}

TEST_CASE("solve_efm schedules appear exactly when labels exceed the budget") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        GenParams params;
        params.agents = 2;
        params.items = 1 + static_cast<int>(seed % 5);
        params.cake = true;
        params.util_min = -6;
        params.util_max = 6;
        const Instance inst = generate_instance(params, 55000 + seed);
        const EfmSolution sol = solve_efm(inst);
        if (sol.paid_agents.empty()) continue;
        Ratio label_total = 0;
        for (const Ratio& q : sol.labels) label_total += q;
        CHECK(sol.schedule.has_value() == (label_total > 1));
        if (sol.schedule) {
            const RoundSchedule& s = *sol.schedule;
            REQUIRE(s.final_round >= 1);
            CHECK(s.distinct_values.back() == 0);
            for (std::size_t r = 0; r + 1 < s.distinct_values.size(); ++r)
                CHECK(s.distinct_values[r] > s.distinct_values[r + 1]);
            std::size_t grouped = 0;
            for (const auto& g : s.groups) grouped += g.size();
            CHECK(grouped == sol.paid_agents.size());
        }
    }
}
