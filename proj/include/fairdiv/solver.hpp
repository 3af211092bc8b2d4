#pragma once

#include <cstdint>
#include <exception>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "bundling.hpp"
#include "matching.hpp"

namespace fairdiv {

/// Which branch of the dispatch produced an allocation.
enum class CaseTag { Empty, ChoresOnly, CaseI, CaseII1, CaseII2 };

inline const char* case_tag_name(CaseTag tag) {
    switch (tag) {
    case CaseTag::Empty: return "empty";
    case CaseTag::ChoresOnly: return "chores-only";
    case CaseTag::CaseI: return "I";
    case CaseTag::CaseII1: return "II.1";
    case CaseTag::CaseII2: return "II.2";
    }
    return "?";
}

struct SolveOptions {
    /// Hard cap on exhaustive-search candidates; exceeding it is an error
    /// unless `heuristic` is set.
    std::uint64_t search_budget = 1'000'000;
    /// Replace the exhaustive searches with deterministic hill-climbing.
    bool heuristic = false;
    /// Worker threads for candidate evaluation (results are identical for
    /// any thread count).
    int threads = 1;
};

/// Audit trail of one solve: the bundling stages, the chosen search decision,
/// and every matching round, sufficient to replay the allocation.
struct SolveCertificate {
    CaseTag case_tag = CaseTag::Empty;
    BundlingState initial;   // bundling straight out of iterative_item_merge
    BundlingState bundling;  // state the matching stage actually consumed
    bool refined = false;    // bundling went through refine()

    // Chosen search decision. CaseI: per meta-good, the attached position in
    // bundling.chores. CaseII2: per chore position, the attached element
    // indices (elements = loose goods in item order, then meta-goods).
    std::vector<int> injection;
    std::vector<std::vector<int>> attachments;
    std::vector<int> chore_agents;  // CaseII2: receiver per chore position
    std::vector<int> dummy_agents;  // CaseII2: agents left to the goods stage

    std::vector<MatchingTrace> traces;
};

struct SolveResult {
    DiscreteAllocation allocation;
    SolveCertificate certificate;
};

namespace detail {

/// Deterministic parallel argmax over candidates [0, count): strictly better
/// wins, ties keep the lowest index, for any thread count.
template <class Value, class Eval, class Better>
std::pair<std::uint64_t, Value> best_candidate(std::uint64_t count, int threads,
                                               const Eval& eval, const Better& better) {
    if (count == 0) throw std::invalid_argument("best_candidate: no candidates");
    const auto scan = [&](std::uint64_t lo, std::uint64_t hi) {
        std::uint64_t best = lo;
        Value best_value = eval(lo);
        for (std::uint64_t idx = lo + 1; idx < hi; ++idx) {
            Value v = eval(idx);
            if (better(v, best_value)) {
                best = idx;
                best_value = std::move(v);
            }
        }
        return std::make_pair(best, std::move(best_value));
    };

    const std::uint64_t workers =
        std::min<std::uint64_t>(std::max(threads, 1), std::min<std::uint64_t>(count, 64));
    if (workers < 2 || count < 128) return scan(0, count);

    std::vector<std::optional<std::pair<std::uint64_t, Value>>> part(workers);
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::uint64_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                const std::uint64_t lo = count * w / workers;
                const std::uint64_t hi = count * (w + 1) / workers;
                if (lo < hi) part[w] = scan(lo, hi);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (std::thread& t : pool) t.join();
    for (const std::exception_ptr& e : errors)
        if (e) std::rethrow_exception(e);

    std::optional<std::pair<std::uint64_t, Value>> best;
    for (auto& p : part) {
        if (!p) continue;
        if (!best || better(p->second, best->second)) best = std::move(p);
    }
    return *best;
}

/// The idx-th injection of `slots` meta-goods into `k` chores, in ascending
/// lexicographic order of the injection vector (Lehmer decoding).
inline std::vector<int> unrank_injection(std::uint64_t idx, int k, int slots) {
    std::vector<int> unused(k);
    for (int c = 0; c < k; ++c) unused[c] = c;
    std::vector<std::uint64_t> radix(slots);
    std::uint64_t scale = 1;
    for (int r = slots - 1; r >= 0; --r) {
        radix[r] = scale;
        scale *= static_cast<std::uint64_t>(k - r);
    }
    std::vector<int> phi(slots);
    for (int r = 0; r < slots; ++r) {
        const std::uint64_t digit = idx / radix[r];
        idx %= radix[r];
        phi[r] = unused[digit];
        unused.erase(unused.begin() + static_cast<std::ptrdiff_t>(digit));
    }
    return phi;
}

inline std::uint64_t checked_candidate_count(const BigInt& count, const SolveOptions& opts,
                                             const char* where) {
    if (!opts.heuristic && count > opts.search_budget)
        throw BudgetError(std::string(where) + ": candidate count " + count.str() +
                          " exceeds budget " + std::to_string(opts.search_budget));
    return static_cast<std::uint64_t>(count);
}

/// Pool for one injection choice: meta-goods with their attached chore first,
/// then the unattached chores in item order, then dummies up to a multiple of
/// the agent count.
inline std::vector<MetaItem> injection_pool(const Instance& inst, const BundlingState& state,
                                            const std::vector<int>& phi) {
    const int n = inst.agent_count();
    const int k = static_cast<int>(state.chores.size());
    std::vector<char> attached(k, 0);
    std::vector<MetaItem> pool;
    for (std::size_t r = 0; r < state.meta_goods.size(); ++r) {
        attached[phi[r]] = 1;
        pool.push_back({MetaKind::MetaChore,
                        bundle_union(state.meta_goods[r], Bundle{state.chores[phi[r]]})});
    }
    for (int c = 0; c < k; ++c)
        if (!attached[c]) pool.push_back({MetaKind::SingletonChore, Bundle{state.chores[c]}});
    while (pool.size() % n != 0) pool.push_back({MetaKind::Dummy, {}});
    return pool;
}

inline std::vector<Ratio> round_values(const MatchingTrace& trace) {
    std::vector<Ratio> out;
    out.reserve(trace.rounds.size());
    for (const RoundMatching& r : trace.rounds) out.push_back(r.value);
    return out;
}

inline DiscreteAllocation trace_allocation(const Instance& inst, const MatchingTrace& trace) {
    DiscreteAllocation alloc;
    alloc.bundles.assign(inst.agent_count(), {});
    for (std::size_t a = 0; a < trace.agents.size(); ++a)
        for (int pool_idx : trace.allocation[a])
            alloc.bundles[trace.agents[a]] =
                bundle_union(alloc.bundles[trace.agents[a]], trace.pool[pool_idx].items);
    return alloc;
}

/// One element of the refined ground set: a loose good or a whole meta-good.
struct PoolElement {
    bool meta;
    int index; // item index (loose) or meta-good position
};

inline std::vector<PoolElement> ground_elements(const BundlingState& state) {
    std::vector<PoolElement> out;
    for (std::size_t g = 0; g < state.loose_goods.size(); ++g)
        out.push_back({false, state.loose_goods[g]});
    for (std::size_t r = 0; r < state.meta_goods.size(); ++r)
        out.push_back({true, static_cast<int>(r)});
    return out;
}

inline Bundle element_items(const BundlingState& state, const PoolElement& e) {
    return e.meta ? state.meta_goods[e.index] : Bundle{e.index};
}

} // namespace detail

/// Hand out meta-goods (plus loose goods as singletons) to the given agents:
/// peel goods until every bundle is good-minimal in their eyes, then run
/// iterated maximum-weight matching rounds. Returns one bundle per given
/// agent together with the trace.
inline std::pair<std::vector<Bundle>, MatchingTrace> allocate_meta_goods(
    const Instance& inst, const std::vector<int>& agents, std::vector<Bundle> metas,
    const Bundle& loose) {
    for (int g : loose) metas.push_back(Bundle{g});

    for (bool hit = true; hit;) {
        hit = false;
        for (std::size_t j = 0; j < metas.size() && !hit; ++j)
            for (int i : agents) {
                if (hit) break;
                for (std::size_t gi = 0; gi < metas[j].size(); ++gi) {
                    const int g = metas[j][gi];
                    if (inst.utility[i][g] < 0) continue;
                    if (bundle_value(inst, i, metas[j]) - inst.utility[i][g] > 0) {
                        metas[j] = bundle_without(metas[j], g);
                        metas.push_back(Bundle{g});
                        hit = true;
                        break;
                    }
                }
            }
    }

    std::vector<MetaItem> pool;
    pool.reserve(metas.size());
    for (Bundle& b : metas) pool.push_back({MetaKind::MetaGood, std::move(b)});
    MatchingTrace trace = imwm(inst, agents, std::move(pool));

    std::vector<Bundle> bundles(agents.size());
    for (std::size_t a = 0; a < agents.size(); ++a)
        for (int pool_idx : trace.allocation[a])
            bundles[a] = bundle_union(bundles[a], trace.pool[pool_idx].items);
    return {std::move(bundles), std::move(trace)};
}

/// All items are objective chores: pad with dummies and deal them out by
/// iterated maximum-weight perfect matching.
inline DiscreteAllocation solve_chores_only(const Instance& inst) {
    for (int t = 0; t < inst.item_count(); ++t)
        if (!is_objective_chore(inst, t))
            throw std::invalid_argument("solve_chores_only: non-chore item present");
    std::vector<MetaItem> pool;
    for (int t = 0; t < inst.item_count(); ++t)
        pool.push_back({MetaKind::SingletonChore, Bundle{t}});
    while (pool.size() % inst.agent_count() != 0) pool.push_back({MetaKind::Dummy, {}});
    return detail::trace_allocation(inst, imwpm(inst, std::move(pool)));
}

/// Chores outnumber agents (k >= n): search all ways to attach each meta-good
/// to a distinct chore, score each pool by its per-round matched-value vector,
/// and keep the lexicographically largest (ties: lowest injection). The
/// winning pool's rounds hand every agent one entry per round.
inline SolveResult solve_case_one(const Instance& inst, const BundlingState& state,
                                  const SolveOptions& opts = {}) {
    const int n = inst.agent_count();
    const int k = static_cast<int>(state.chores.size());
    const int slots = static_cast<int>(state.meta_goods.size());
    if (k < n) throw std::invalid_argument("solve_case_one: needs at least n free chores");
    if (!state.loose_goods.empty())
        throw std::invalid_argument("solve_case_one: loose goods not allowed here");
    if (slots > k) throw std::invalid_argument("solve_case_one: more meta-goods than chores");

    const auto evaluate = [&](const std::vector<int>& phi) {
        return detail::round_values(imwpm(inst, detail::injection_pool(inst, state, phi)));
    };
    const auto lex_greater = [](const std::vector<Ratio>& a, const std::vector<Ratio>& b) {
        return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
    };

    std::vector<int> chosen;
    if (!opts.heuristic) {
        BigInt count = 1;
        for (int r = 0; r < slots; ++r) count *= (k - r);
        const std::uint64_t total =
            detail::checked_candidate_count(count, opts, "solve_case_one");
        const auto [best_idx, best_value] = detail::best_candidate<std::vector<Ratio>>(
            total, opts.threads,
            [&](std::uint64_t idx) { return evaluate(detail::unrank_injection(idx, k, slots)); },
            lex_greater);
        chosen = detail::unrank_injection(best_idx, k, slots);
    } else {
        // Hill-climb over single re-attachments and pairwise swaps; both move
        // kinds mirror the exchange arguments, so fixpoints keep the
        // structural guarantees checked below.
        chosen.resize(slots);
        for (int r = 0; r < slots; ++r) chosen[r] = r;
        std::vector<Ratio> current = evaluate(chosen);
        std::uint64_t evals = 1;
        for (bool improved = true; improved;) {
            improved = false;
            std::vector<char> used(k, 0);
            for (int r : chosen) used[r] = 1;
            for (int r = 0; r < slots && !improved; ++r)
                for (int c = 0; c < k && !improved; ++c) {
                    if (used[c]) continue;
                    std::vector<int> cand = chosen;
                    cand[r] = c;
                    if (++evals > opts.search_budget)
                        throw BudgetError("solve_case_one: hill-climb exceeded budget");
                    std::vector<Ratio> v = evaluate(cand);
                    if (lex_greater(v, current)) {
                        chosen = std::move(cand);
                        current = std::move(v);
                        improved = true;
                    }
                }
            for (int r = 0; r < slots && !improved; ++r)
                for (int s = r + 1; s < slots && !improved; ++s) {
                    std::vector<int> cand = chosen;
                    std::swap(cand[r], cand[s]);
                    if (++evals > opts.search_budget)
                        throw BudgetError("solve_case_one: hill-climb exceeded budget");
                    std::vector<Ratio> v = evaluate(cand);
                    if (lex_greater(v, current)) {
                        chosen = std::move(cand);
                        current = std::move(v);
                        improved = true;
                    }
                }
        }
    }

    MatchingTrace trace = imwpm(inst, detail::injection_pool(inst, state, chosen));

    // Every meta-good-plus-chore must land on an agent that values the plain
    // meta-good non-negatively; anything else breaks the fairness argument.
    for (int r = 0; r < slots; ++r) {
        int owner = -1;
        for (std::size_t a = 0; a < trace.allocation.size() && owner < 0; ++a)
            for (int pool_idx : trace.allocation[a])
                if (pool_idx == r) {
                    owner = static_cast<int>(a);
                    break;
                }
        if (owner < 0 || bundle_value(inst, owner, state.meta_goods[r]) < 0)
            throw std::logic_error("solve_case_one: attached bundle landed outside its support");
    }

    SolveResult result;
    result.allocation = detail::trace_allocation(inst, trace);
    result.certificate.case_tag = CaseTag::CaseI;
    result.certificate.initial = state;
    result.certificate.bundling = state;
    result.certificate.injection = std::move(chosen);
    result.certificate.traces.push_back(std::move(trace));
    return result;
}

/// No free chores: good-minimal meta-goods go out via matching rounds.
inline SolveResult solve_case_two_zero(const Instance& inst, const BundlingState& state,
                                       const SolveOptions& = {}) {
    if (!state.chores.empty())
        throw std::invalid_argument("solve_case_two_zero: free chores present");
    std::vector<int> agents(inst.agent_count());
    for (int i = 0; i < inst.agent_count(); ++i) agents[i] = i;
    auto [bundles, trace] =
        allocate_meta_goods(inst, agents, state.meta_goods, state.loose_goods);

    SolveResult result;
    result.allocation.bundles = std::move(bundles);
    result.certificate.case_tag = CaseTag::CaseII1;
    result.certificate.initial = state;
    result.certificate.bundling = state;
    result.certificate.traces.push_back(std::move(trace));
    return result;
}

/// Scarce chores (1 <= k < n) on a refined state: search over all ways to
/// attach disjoint helper sets of ground elements to the chores, maximizing
/// the matched value of chores-plus-dummies against all agents, then matched
/// element count, then lowest encoding. Agents matched to dummies split the
/// unattached elements via the goods stage.
inline SolveResult solve_case_two_pos(const Instance& inst, const BundlingState& state,
                                      const SolveOptions& opts = {}) {
    const int n = inst.agent_count();
    const int k = static_cast<int>(state.chores.size());
    if (k < 1 || k >= n)
        throw std::invalid_argument("solve_case_two_pos: free chore count must be in [1, n-1]");

    const std::vector<detail::PoolElement> elements = detail::ground_elements(state);
    const int ecount = static_cast<int>(elements.size());

    // A candidate is one digit per element: the chore position it attaches
    // to, or k for unattached. Digit vectors are enumerated in ascending
    // lexicographic order (element 0 most significant).
    const auto unrank = [&](std::uint64_t idx) {
        std::vector<int> digits(ecount);
        for (int e = ecount - 1; e >= 0; --e) {
            digits[e] = static_cast<int>(idx % (k + 1));
            idx /= (k + 1);
        }
        return digits;
    };

    const auto build_pool = [&](const std::vector<int>& digits) {
        std::vector<MetaItem> pool(n);
        for (int c = 0; c < k; ++c) pool[c] = {MetaKind::SingletonChore, Bundle{state.chores[c]}};
        for (int e = 0; e < ecount; ++e) {
            if (digits[e] >= k) continue;
            MetaItem& slot = pool[digits[e]];
            slot.kind = MetaKind::MetaChore;
            slot.items = bundle_union(slot.items, detail::element_items(state, elements[e]));
        }
        for (int d = k; d < n; ++d) pool[d] = {MetaKind::Dummy, {}};
        return pool;
    };

    using Score = std::pair<Ratio, int>; // (matched value, attached element count)
    const auto evaluate = [&](const std::vector<int>& digits) -> Score {
        const std::vector<MetaItem> pool = build_pool(digits);
        std::vector<std::vector<Ratio>> weight(n, std::vector<Ratio>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) weight[i][j] = meta_value(inst, i, pool[j]);
        int attached = 0;
        for (int d : digits)
            if (d < k) ++attached;
        return {max_weight_perfect_matching(weight).value, attached};
    };
    const auto better = [](const Score& a, const Score& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second > b.second;
    };

    std::vector<int> digits;
    if (!opts.heuristic) {
        BigInt count = boost::multiprecision::pow(BigInt(k + 1), static_cast<unsigned>(ecount));
        const std::uint64_t total =
            detail::checked_candidate_count(count, opts, "solve_case_two_pos");
        const auto [best_idx, best_score] = detail::best_candidate<Score>(
            total, opts.threads, [&](std::uint64_t idx) { return evaluate(unrank(idx)); },
            better);
        digits = unrank(best_idx);
    } else {
        // Hill-climb over single-element re-assignments; add/drop/move all
        // mirror the exchange arguments, so fixpoints keep the structural
        // guarantees checked below.
        digits.assign(ecount, k);
        Score current = evaluate(digits);
        std::uint64_t evals = 1;
        for (bool improved = true; improved;) {
            improved = false;
            for (int e = 0; e < ecount && !improved; ++e)
                for (int d = 0; d <= k && !improved; ++d) {
                    if (d == digits[e]) continue;
                    std::vector<int> cand = digits;
                    cand[e] = d;
                    if (++evals > opts.search_budget)
                        throw BudgetError("solve_case_two_pos: hill-climb exceeded budget");
                    Score v = evaluate(cand);
                    if (better(v, current)) {
                        digits = std::move(cand);
                        current = v;
                        improved = true;
                    }
                }
        }
    }

    // Final matching for the chosen attachment.
    const std::vector<MetaItem> pool = build_pool(digits);
    std::vector<std::vector<Ratio>> weight(n, std::vector<Ratio>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) weight[i][j] = meta_value(inst, i, pool[j]);
    RoundMatching matched = max_weight_perfect_matching(weight);

    SolveCertificate cert;
    cert.case_tag = CaseTag::CaseII2;
    cert.bundling = state;
    cert.attachments.assign(k, {});
    for (int e = 0; e < ecount; ++e)
        if (digits[e] < k) cert.attachments[digits[e]].push_back(e);
    cert.chore_agents.assign(k, -1);
    for (int i = 0; i < n; ++i) {
        const int j = *matched.assigned[i];
        if (j < k)
            cert.chore_agents[j] = i;
        else
            cert.dummy_agents.push_back(i);
    }

    MatchingTrace main_trace;
    main_trace.agents.resize(n);
    for (int i = 0; i < n; ++i) main_trace.agents[i] = i;
    main_trace.pool = pool;
    main_trace.rounds.push_back(matched);
    main_trace.allocation.assign(n, {});
    for (int i = 0; i < n; ++i) main_trace.allocation[i].push_back(*matched.assigned[i]);

    // Structural checks the fairness argument rests on: receivers like every
    // element attached to their chore; unattached elements are chores for
    // every chore receiver; no one likes any chore-plus-helpers bundle.
    for (int c = 0; c < k; ++c)
        for (int e : cert.attachments[c])
            if (bundle_value(inst, cert.chore_agents[c],
                             detail::element_items(state, elements[e])) < 0)
                throw std::logic_error("solve_case_two_pos: receiver dislikes attached element");
    for (int e = 0; e < ecount; ++e) {
        if (digits[e] < k) continue;
        for (int c = 0; c < k; ++c)
            if (bundle_value(inst, cert.chore_agents[c],
                             detail::element_items(state, elements[e])) >= 0)
                throw std::logic_error("solve_case_two_pos: chore receiver likes a leftover");
    }
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < k; ++c)
            if (meta_value(inst, i, pool[c]) >= 0)
                throw std::logic_error("solve_case_two_pos: someone likes a chore bundle");

    DiscreteAllocation alloc;
    alloc.bundles.assign(n, {});
    for (int c = 0; c < k; ++c) alloc.bundles[cert.chore_agents[c]] = pool[c].items;

    // Unattached elements go to the dummy-matched agents via the goods stage.
    std::vector<Bundle> leftover_metas;
    Bundle leftover_loose;
    for (int e = 0; e < ecount; ++e) {
        if (digits[e] < k) continue;
        if (elements[e].meta)
            leftover_metas.push_back(state.meta_goods[elements[e].index]);
        else
            leftover_loose.push_back(elements[e].index);
    }
    auto [bundles, goods_trace] =
        allocate_meta_goods(inst, cert.dummy_agents, std::move(leftover_metas), leftover_loose);
    for (std::size_t a = 0; a < cert.dummy_agents.size(); ++a)
        alloc.bundles[cert.dummy_agents[a]] = std::move(bundles[a]);

    cert.traces.push_back(std::move(main_trace));
    cert.traces.push_back(std::move(goods_trace));

    SolveResult result;
    result.allocation = std::move(alloc);
    result.certificate = std::move(cert);
    return result;
}

/// Full dispatch: produce an allocation that is EF1 and whose envy graph has
/// no positive cycle, for any mix of goods and chores.
inline SolveResult solve_ef1_envy_freeable(const Instance& inst, const SolveOptions& opts = {}) {
    const int n = inst.agent_count();
    if (n < 1) throw std::invalid_argument("solve: instance has no agents");

    if (inst.item_count() == 0) {
        SolveResult result;
        result.allocation.bundles.assign(n, {});
        result.certificate.case_tag = CaseTag::Empty;
        return result;
    }

    bool all_chores = true;
    for (int t = 0; t < inst.item_count() && all_chores; ++t)
        all_chores = is_objective_chore(inst, t);
    if (all_chores) {
        SolveResult result;
        result.allocation = solve_chores_only(inst);
        result.certificate.case_tag = CaseTag::ChoresOnly;
        for (int t = 0; t < inst.item_count(); ++t)
            result.certificate.bundling.chores.push_back(t);
        result.certificate.initial = result.certificate.bundling;
        return result;
    }

    const BundlingState merged = iterative_item_merge(inst);
    const int free_chores = static_cast<int>(merged.chores.size());
    if (free_chores >= n) {
        SolveResult result = solve_case_one(inst, merged, opts);
        result.certificate.initial = merged;
        return result;
    }
    if (free_chores == 0) return solve_case_two_zero(inst, merged, opts);

    BundlingState refined = refine(inst, merged);
    if (refined.chores.empty()) {
        SolveResult result = solve_case_two_zero(inst, refined, opts);
        result.certificate.initial = merged;
        result.certificate.refined = true;
        return result;
    }
    SolveResult result = solve_case_two_pos(inst, refined, opts);
    result.certificate.initial = merged;
    result.certificate.refined = true;
    return result;
}

/// Re-run the deterministic parts of a solve from its recorded decisions.
/// Produces the identical allocation without repeating any search.
inline DiscreteAllocation replay(const Instance& inst, const SolveCertificate& cert) {
    const int n = inst.agent_count();
    switch (cert.case_tag) {
    case CaseTag::Empty: {
        DiscreteAllocation alloc;
        alloc.bundles.assign(n, {});
        return alloc;
    }
    case CaseTag::ChoresOnly:
        return solve_chores_only(inst);
    case CaseTag::CaseI:
        return detail::trace_allocation(
            inst, imwpm(inst, detail::injection_pool(inst, cert.bundling, cert.injection)));
    case CaseTag::CaseII1: {
        std::vector<int> agents(n);
        for (int i = 0; i < n; ++i) agents[i] = i;
        auto [bundles, trace] = allocate_meta_goods(inst, agents, cert.bundling.meta_goods,
                                                    cert.bundling.loose_goods);
        DiscreteAllocation alloc;
        alloc.bundles = std::move(bundles);
        return alloc;
    }
    case CaseTag::CaseII2: {
        const std::vector<detail::PoolElement> elements = detail::ground_elements(cert.bundling);
        const int k = static_cast<int>(cert.bundling.chores.size());
        std::vector<int> digits(elements.size(), k);
        for (int c = 0; c < k; ++c)
            for (int e : cert.attachments[c]) digits[e] = c;

        std::vector<MetaItem> pool(n);
        for (int c = 0; c < k; ++c)
            pool[c] = {MetaKind::SingletonChore, Bundle{cert.bundling.chores[c]}};
        for (std::size_t e = 0; e < elements.size(); ++e) {
            if (digits[e] >= k) continue;
            MetaItem& slot = pool[digits[e]];
            slot.kind = MetaKind::MetaChore;
            slot.items = bundle_union(slot.items, detail::element_items(cert.bundling, elements[e]));
        }
        for (int d = k; d < n; ++d) pool[d] = {MetaKind::Dummy, {}};

        std::vector<std::vector<Ratio>> weight(n, std::vector<Ratio>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) weight[i][j] = meta_value(inst, i, pool[j]);
        const RoundMatching matched = max_weight_perfect_matching(weight);

        DiscreteAllocation alloc;
        alloc.bundles.assign(n, {});
        std::vector<int> dummy_agents;
        for (int i = 0; i < n; ++i) {
            const int j = *matched.assigned[i];
            if (j < k)
                alloc.bundles[i] = pool[j].items;
            else
                dummy_agents.push_back(i);
        }
        std::vector<Bundle> leftover_metas;
        Bundle leftover_loose;
        for (std::size_t e = 0; e < elements.size(); ++e) {
            if (digits[e] < k) continue;
            if (elements[e].meta)
                leftover_metas.push_back(cert.bundling.meta_goods[elements[e].index]);
            else
                leftover_loose.push_back(elements[e].index);
        }
        auto [bundles, trace] =
            allocate_meta_goods(inst, dummy_agents, std::move(leftover_metas), leftover_loose);
        for (std::size_t a = 0; a < dummy_agents.size(); ++a)
            alloc.bundles[dummy_agents[a]] = std::move(bundles[a]);
        return alloc;
    }
    }
    throw std::logic_error("replay: unknown case tag");
}

} // namespace fairdiv
