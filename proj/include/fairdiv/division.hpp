#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "envy.hpp"
#include "solver.hpp"

namespace fairdiv {

/// Payment rounds of the deficit branch: agents grouped by their descending
/// distinct heaviest-path labels (the value list always ends at 0); rounds
/// 1..final_round paid out, the last one possibly truncated to residual_share
/// per agent instead of the full label gap.
struct RoundSchedule {
    std::vector<Ratio> distinct_values;
    std::vector<std::vector<int>> groups;
    int final_round = 0;
    Ratio residual_share = 0;
};

/// Money simulation of one unit of divisible value spread over the paid
/// agents. `payments` and `labels` cover all n agents (zero outside the paid
/// set); `schedule` is present exactly when the labels outgrow the budget.
struct MoneyResult {
    PaymentVector payments;
    PaymentVector labels;
    std::optional<RoundSchedule> schedule;
};

/// Turn heaviest-path labels over the paid agents into payments summing to
/// exactly 1: spread surplus equally when the labels fit the budget, or pay
/// label gaps top-down round by round until the budget is exhausted.
/// The result keeps every paid agent envy-free toward other paid agents'
/// bundles-plus-payments. Throws CycleError when the restricted allocation
/// is not envy-freeable.
inline MoneyResult efm_money(const Instance& inst, const DiscreteAllocation& alloc,
                             const std::vector<int>& paid) {
    const int n = inst.agent_count();
    const int np = static_cast<int>(paid.size());
    if (np == 0) throw std::invalid_argument("efm_money: empty paid agent set");

    const EnvyGraph graph = build_envy_graph(inst, alloc, paid);
    const PaymentVector q = heaviest_path_payments(graph);
    Ratio total = 0;
    for (const Ratio& v : q) total += v;

    MoneyResult out;
    out.payments.assign(n, Ratio(0));
    out.labels.assign(n, Ratio(0));
    for (int a = 0; a < np; ++a) out.labels[paid[a]] = q[a];

    if (total <= 1) {
        const Ratio topup = (1 - total) / np;
        for (int a = 0; a < np; ++a) out.payments[paid[a]] = q[a] + topup;
        return out;
    }

    RoundSchedule schedule;
    for (const Ratio& v : q) schedule.distinct_values.push_back(v);
    std::sort(schedule.distinct_values.begin(), schedule.distinct_values.end(),
              std::greater<Ratio>());
    schedule.distinct_values.erase(
        std::unique(schedule.distinct_values.begin(), schedule.distinct_values.end()),
        schedule.distinct_values.end());
    if (schedule.distinct_values.back() != 0) schedule.distinct_values.push_back(Ratio(0));
    for (const Ratio& v : schedule.distinct_values) {
        std::vector<int> group;
        for (int a = 0; a < np; ++a)
            if (q[a] == v) group.push_back(paid[a]);
        schedule.groups.push_back(std::move(group));
    }

    Ratio remaining = 1;
    std::vector<int> cumulative;
    for (std::size_t r = 0; r + 1 < schedule.distinct_values.size(); ++r) {
        for (int agent : schedule.groups[r]) cumulative.push_back(agent);
        const Ratio gap = schedule.distinct_values[r] - schedule.distinct_values[r + 1];
        const Ratio need = gap * static_cast<int>(cumulative.size());
        if (need < remaining) {
            for (int agent : cumulative) out.payments[agent] += gap;
            remaining -= need;
            continue;
        }
        schedule.final_round = static_cast<int>(r) + 1;
        if (need == remaining) {
            for (int agent : cumulative) out.payments[agent] += gap;
        } else {
            schedule.residual_share = remaining / static_cast<int>(cumulative.size());
            for (int agent : cumulative) out.payments[agent] += schedule.residual_share;
        }
        remaining = 0;
        break;
    }
    if (remaining != 0) throw std::logic_error("efm_money: deficit rounds failed to exhaust 1");
    out.schedule = std::move(schedule);
    return out;
}

/// Cut the (normalized) cake into one piece per paid agent so that everybody
/// in the paid set values agent a's piece at exactly shares[a]: each
/// elementary interval between density breakpoints is split in the given
/// proportions. When the shares sum to less than 1 the leftover is appended
/// to the first paid agent (and is worth its full missing value, so exact
/// proportionality is only claimed for shares summing to 1).
inline std::vector<CakePiece> consensus_split(const Instance& inst, const std::vector<int>& paid,
                                              const std::vector<Ratio>& shares) {
    if (!inst.cake) throw std::invalid_argument("consensus_split: instance has no cake");
    const int np = static_cast<int>(paid.size());
    if (static_cast<int>(shares.size()) != np)
        throw std::invalid_argument("consensus_split: share count mismatch");
    Ratio total = 0;
    for (const Ratio& s : shares) {
        if (s < 0) throw std::invalid_argument("consensus_split: negative share");
        total += s;
    }
    if (total > 1) throw std::invalid_argument("consensus_split: shares sum exceeds 1");
    for (int agent : paid)
        if (whole_cake_value(inst, agent) != 1)
            throw std::invalid_argument("consensus_split: cake not normalized for paid agent");

    std::vector<Ratio> cuts{Ratio(0), Ratio(1)};
    for (int agent : paid)
        for (const DensitySegment& seg : (*inst.cake)[agent]) {
            cuts.push_back(seg.start);
            cuts.push_back(seg.end);
        }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<CakePiece> pieces(np);
    const auto append = [&](int who, const Ratio& lo, const Ratio& hi) {
        if (lo >= hi) return;
        std::vector<Interval>& ivs = pieces[who].intervals;
        if (!ivs.empty() && ivs.back().hi == lo)
            ivs.back().hi = hi;
        else
            ivs.push_back({lo, hi});
    };
    for (std::size_t e = 0; e + 1 < cuts.size(); ++e) {
        const Ratio lo = cuts[e];
        const Ratio len = cuts[e + 1] - cuts[e];
        Ratio done = 0;
        for (int a = 0; a < np; ++a) {
            append(a, lo + done * len, lo + (done + shares[a]) * len);
            done += shares[a];
        }
        append(0, lo + done * len, lo + len);
    }
    return pieces;
}

/// Complete EFM solution: the normalized instance it is stated over, the
/// discrete allocation with its certificate, the money simulation, and the
/// realized cake pieces (one per agent, empty outside the paid set).
struct EfmSolution {
    Instance normalized;
    DiscreteAllocation discrete;
    SolveCertificate certificate;
    std::vector<int> paid_agents;
    PaymentVector payments;
    PaymentVector labels;
    std::optional<RoundSchedule> schedule;
    std::vector<CakePiece> pieces;

    MixedAllocation with_pieces() const { return {discrete, pieces}; }
    MixedAllocation with_payments() const { return {discrete, payments}; }
};

/// End-to-end pipeline for an instance with items and a cake: normalize,
/// solve the discrete part (EF1 + envy-freeable), convert the restricted
/// envy graph into payments summing to 1, and realize the payments as cake
/// pieces every positive-value agent appraises exactly. Agents valuing the
/// whole cake at zero receive no cake (one of them takes everything when
/// nobody values it). The result is EFM on the normalized instance.
inline EfmSolution solve_efm(const Instance& inst, const SolveOptions& opts = {}) {
    if (!inst.has_cake()) throw std::invalid_argument("solve_efm: instance has no cake");

    EfmSolution sol;
    sol.normalized = normalize(inst);
    SolveResult discrete = solve_ef1_envy_freeable(sol.normalized, opts);
    sol.discrete = std::move(discrete.allocation);
    sol.certificate = std::move(discrete.certificate);
    sol.paid_agents = positive_cake_agents(sol.normalized);

    const int n = sol.normalized.agent_count();
    sol.pieces.assign(n, {});
    sol.payments.assign(n, Ratio(0));
    sol.labels.assign(n, Ratio(0));

    if (sol.paid_agents.empty()) {
        // Nobody values the cake; hand all of it to agent 0.
        sol.pieces[0].intervals.push_back({Ratio(0), Ratio(1)});
        return sol;
    }

    MoneyResult money = efm_money(sol.normalized, sol.discrete, sol.paid_agents);
    sol.payments = std::move(money.payments);
    sol.labels = std::move(money.labels);
    sol.schedule = std::move(money.schedule);

    std::vector<Ratio> shares;
    shares.reserve(sol.paid_agents.size());
    for (int agent : sol.paid_agents) shares.push_back(sol.payments[agent]);
    const std::vector<CakePiece> split = consensus_split(sol.normalized, sol.paid_agents, shares);
    for (std::size_t a = 0; a < sol.paid_agents.size(); ++a)
        sol.pieces[sol.paid_agents[a]] = split[a];
    return sol;
}

} // namespace fairdiv
