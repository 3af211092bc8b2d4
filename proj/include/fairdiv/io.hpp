#pragma once

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "division.hpp"
#include "instance.hpp"
#include "solver.hpp"
#include "verify.hpp"

namespace fairdiv {

namespace detail {

inline Ratio json_ratio(const nlohmann::json& v, const std::string& what) {
    if (v.is_string()) {
        try {
            return parse_ratio(v.get<std::string>());
        } catch (const ParseError& e) {
            throw ParseError(what + ": " + e.what());
        }
    }
    if (v.is_number_unsigned()) return Ratio(BigInt(v.get<std::uint64_t>()));
    if (v.is_number_integer()) return Ratio(BigInt(v.get<std::int64_t>()));
    throw ParseError(what + ": rationals must be \"p/q\" strings or integers");
}

inline nlohmann::json parse_json_text(const std::string& text) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
}

inline int lookup(const std::map<std::string, int>& index, const std::string& id,
                  const std::string& what) {
    const auto it = index.find(id);
    if (it == index.end()) throw ParseError(what + ": unknown id '" + id + "'");
    return it->second;
}

} // namespace detail

/// Parse an instance document. Agents and items are identified by unique
/// strings; every item must carry a utility for every agent (no implicit
/// zeros); cake densities are optional, per agent, with sorted
/// non-overlapping segments inside [0,1]. All malformations are ParseErrors.
inline Instance parse_instance(const std::string& text) {
    const nlohmann::json j = detail::parse_json_text(text);
    if (!j.is_object()) throw ParseError("instance: top level must be an object");

    Instance inst;
    if (!j.contains("agents") || !j["agents"].is_array() || j["agents"].empty())
        throw ParseError("instance: 'agents' must be a nonempty array of ids");
    std::map<std::string, int> agent_index;
    for (const auto& a : j["agents"]) {
        if (!a.is_string()) throw ParseError("instance: agent ids must be strings");
        const std::string id = a.get<std::string>();
        if (id.empty() || agent_index.count(id))
            throw ParseError("instance: empty or duplicate agent id '" + id + "'");
        agent_index[id] = inst.agent_count();
        inst.agents.push_back(id);
    }
    const int n = inst.agent_count();

    std::map<std::string, int> item_index;
    if (j.contains("items")) {
        if (!j["items"].is_array()) throw ParseError("instance: 'items' must be an array");
        for (const auto& entry : j["items"]) {
            if (!entry.is_object() || !entry.contains("id") || !entry["id"].is_string())
                throw ParseError("instance: each item needs a string 'id'");
            const std::string id = entry["id"].get<std::string>();
            if (id.empty() || item_index.count(id))
                throw ParseError("instance: empty or duplicate item id '" + id + "'");
            if (!entry.contains("utilities") || !entry["utilities"].is_object())
                throw ParseError("instance: item '" + id + "' needs a 'utilities' object");
            std::vector<Ratio> column(n);
            std::vector<char> seen(n, 0);
            for (const auto& [agent_id, value] : entry["utilities"].items()) {
                const int a = detail::lookup(agent_index, agent_id,
                                             "instance: item '" + id + "' utilities");
                seen[a] = 1;
                column[a] = detail::json_ratio(value, "instance: item '" + id + "'");
            }
            for (int a = 0; a < n; ++a)
                if (!seen[a])
                    throw ParseError("instance: item '" + id + "' missing utility for agent '" +
                                     inst.agents[a] + "'");
            item_index[id] = inst.item_count();
            inst.items.push_back(id);
            for (int a = 0; a < n; ++a) {
                if (static_cast<int>(inst.utility.size()) <= a) inst.utility.emplace_back();
                inst.utility[a].push_back(column[a]);
            }
        }
    }
    if (inst.utility.empty()) inst.utility.assign(n, {});

    if (j.contains("cake")) {
        if (!j["cake"].is_object()) throw ParseError("instance: 'cake' must be an object");
        std::vector<std::vector<DensitySegment>> cake(n);
        for (const auto& [agent_id, segs] : j["cake"].items()) {
            const int a = detail::lookup(agent_index, agent_id, "instance: cake");
            if (!segs.is_array()) throw ParseError("instance: cake segments must be an array");
            for (const auto& seg : segs) {
                if (!seg.is_object() || !seg.contains("start") || !seg.contains("end") ||
                    !seg.contains("density"))
                    throw ParseError("instance: cake segment needs start/end/density");
                DensitySegment d{detail::json_ratio(seg["start"], "instance: cake start"),
                                 detail::json_ratio(seg["end"], "instance: cake end"),
                                 detail::json_ratio(seg["density"], "instance: cake density")};
                if (d.start < 0 || d.end > 1 || d.start >= d.end)
                    throw ParseError("instance: cake segment must satisfy 0 <= start < end <= 1");
                if (d.density < 0) throw ParseError("instance: negative cake density");
                cake[a].push_back(d);
            }
            std::sort(cake[a].begin(), cake[a].end(),
                      [](const DensitySegment& x, const DensitySegment& y) {
                          return x.start < y.start;
                      });
            for (std::size_t s = 0; s + 1 < cake[a].size(); ++s)
                if (cake[a][s + 1].start < cake[a][s].end)
                    throw ParseError("instance: overlapping cake segments for agent '" +
                                     agent_id + "'");
        }
        inst.cake = std::move(cake);
    }
    return inst;
}

inline nlohmann::json instance_to_json(const Instance& inst) {
    nlohmann::json j;
    j["agents"] = inst.agents;
    j["items"] = nlohmann::json::array();
    for (int t = 0; t < inst.item_count(); ++t) {
        nlohmann::json entry;
        entry["id"] = inst.items[t];
        nlohmann::json utilities;
        for (int a = 0; a < inst.agent_count(); ++a)
            utilities[inst.agents[a]] = ratio_to_string(inst.utility[a][t]);
        entry["utilities"] = utilities;
        j["items"].push_back(entry);
    }
    if (inst.cake) {
        nlohmann::json cake = nlohmann::json::object();
        for (int a = 0; a < inst.agent_count(); ++a) {
            nlohmann::json segs = nlohmann::json::array();
            for (const DensitySegment& seg : (*inst.cake)[a])
                segs.push_back({{"start", ratio_to_string(seg.start)},
                                {"end", ratio_to_string(seg.end)},
                                {"density", ratio_to_string(seg.density)}});
            cake[inst.agents[a]] = segs;
        }
        j["cake"] = cake;
    }
    return j;
}

inline std::string serialize_instance(const Instance& inst) {
    return instance_to_json(inst).dump(2) + "\n";
}

/// Allocation document as read back from disk; divisible parts are optional.
struct ParsedAllocation {
    DiscreteAllocation discrete;
    std::optional<PaymentVector> payments;
    std::optional<std::vector<CakePiece>> pieces;
};

/// Parse and cross-validate an allocation against its instance: bundles must
/// partition the items; payments must be non-negative and cover exactly the
/// agent set; pieces must be disjoint intervals covering the whole cake.
inline ParsedAllocation parse_allocation(const Instance& inst, const std::string& text) {
    const nlohmann::json j = detail::parse_json_text(text);
    if (!j.is_object() || !j.contains("bundles") || !j["bundles"].is_object())
        throw ParseError("allocation: needs a 'bundles' object");

    std::map<std::string, int> agent_index, item_index;
    for (int a = 0; a < inst.agent_count(); ++a) agent_index[inst.agents[a]] = a;
    for (int t = 0; t < inst.item_count(); ++t) item_index[inst.items[t]] = t;

    ParsedAllocation out;
    out.discrete.bundles.assign(inst.agent_count(), {});
    std::vector<char> seen_agent(inst.agent_count(), 0);
    std::vector<char> seen_item(inst.item_count(), 0);
    for (const auto& [agent_id, items] : j["bundles"].items()) {
        const int a = detail::lookup(agent_index, agent_id, "allocation: bundles");
        seen_agent[a] = 1;
        if (!items.is_array()) throw ParseError("allocation: bundle must be an array of item ids");
        for (const auto& item : items) {
            if (!item.is_string()) throw ParseError("allocation: item ids must be strings");
            const int t = detail::lookup(item_index, item.get<std::string>(), "allocation");
            if (seen_item[t]++)
                throw ParseError("allocation: item '" + inst.items[t] + "' assigned twice");
            out.discrete.bundles[a].push_back(t);
        }
        std::sort(out.discrete.bundles[a].begin(), out.discrete.bundles[a].end());
    }
    for (int a = 0; a < inst.agent_count(); ++a)
        if (!seen_agent[a])
            throw ParseError("allocation: missing bundle for agent '" + inst.agents[a] + "'");
    for (int t = 0; t < inst.item_count(); ++t)
        if (!seen_item[t])
            throw ParseError("allocation: item '" + inst.items[t] + "' unallocated");

    if (j.contains("payments")) {
        if (!j["payments"].is_object()) throw ParseError("allocation: 'payments' must be an object");
        PaymentVector p(inst.agent_count(), Ratio(0));
        std::vector<char> seen(inst.agent_count(), 0);
        for (const auto& [agent_id, value] : j["payments"].items()) {
            const int a = detail::lookup(agent_index, agent_id, "allocation: payments");
            seen[a] = 1;
            p[a] = detail::json_ratio(value, "allocation: payment");
            if (p[a] < 0) throw ParseError("allocation: negative payment");
        }
        for (int a = 0; a < inst.agent_count(); ++a)
            if (!seen[a])
                throw ParseError("allocation: missing payment for agent '" + inst.agents[a] + "'");
        out.payments = std::move(p);
    }

    if (j.contains("pieces")) {
        if (!j["pieces"].is_object()) throw ParseError("allocation: 'pieces' must be an object");
        std::vector<CakePiece> pieces(inst.agent_count());
        std::vector<char> seen(inst.agent_count(), 0);
        for (const auto& [agent_id, intervals] : j["pieces"].items()) {
            const int a = detail::lookup(agent_index, agent_id, "allocation: pieces");
            seen[a] = 1;
            if (!intervals.is_array()) throw ParseError("allocation: pieces must be arrays");
            for (const auto& iv : intervals) {
                if (!iv.is_array() || iv.size() != 2)
                    throw ParseError("allocation: each piece interval is a [lo, hi] pair");
                Interval interval{detail::json_ratio(iv[0], "allocation: piece lo"),
                                  detail::json_ratio(iv[1], "allocation: piece hi")};
                if (interval.lo < 0 || interval.hi > 1 || interval.lo >= interval.hi)
                    throw ParseError("allocation: piece interval must satisfy 0 <= lo < hi <= 1");
                pieces[a].intervals.push_back(interval);
            }
            for (std::size_t s = 0; s + 1 < pieces[a].intervals.size(); ++s)
                if (pieces[a].intervals[s + 1].lo < pieces[a].intervals[s].hi)
                    throw ParseError("allocation: pieces of agent '" + agent_id +
                                     "' are unsorted or overlap");
        }
        for (int a = 0; a < inst.agent_count(); ++a)
            if (!seen[a])
                throw ParseError("allocation: missing pieces entry for agent '" +
                                 inst.agents[a] + "'");

        std::vector<Interval> all;
        Ratio covered = 0;
        for (const CakePiece& piece : pieces)
            for (const Interval& iv : piece.intervals) {
                all.push_back(iv);
                covered += iv.hi - iv.lo;
            }
        std::sort(all.begin(), all.end(),
                  [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
        for (std::size_t s = 0; s + 1 < all.size(); ++s)
            if (all[s + 1].lo < all[s].hi)
                throw ParseError("allocation: pieces of different agents overlap");
        if (covered != 1) throw ParseError("allocation: pieces do not cover the whole cake");
        out.pieces = std::move(pieces);
    }
    return out;
}

inline std::string serialize_allocation(const Instance& inst, const DiscreteAllocation& alloc,
                                        const std::optional<PaymentVector>& payments = std::nullopt,
                                        const std::optional<std::vector<CakePiece>>& pieces =
                                            std::nullopt) {
    nlohmann::json j;
    nlohmann::json bundles = nlohmann::json::object();
    for (int a = 0; a < inst.agent_count(); ++a) {
        nlohmann::json ids = nlohmann::json::array();
        for (int t : alloc.bundles[a]) ids.push_back(inst.items[t]);
        bundles[inst.agents[a]] = ids;
    }
    j["bundles"] = bundles;
    if (payments) {
        nlohmann::json p = nlohmann::json::object();
        for (int a = 0; a < inst.agent_count(); ++a)
            p[inst.agents[a]] = ratio_to_string((*payments)[a]);
        j["payments"] = p;
    }
    if (pieces) {
        nlohmann::json p = nlohmann::json::object();
        for (int a = 0; a < inst.agent_count(); ++a) {
            nlohmann::json ivs = nlohmann::json::array();
            for (const Interval& iv : (*pieces)[a].intervals)
                ivs.push_back({ratio_to_string(iv.lo), ratio_to_string(iv.hi)});
            p[inst.agents[a]] = ivs;
        }
        j["pieces"] = p;
    }
    return j.dump(2) + "\n";
}

namespace detail {

inline nlohmann::json bundling_to_json(const Instance& inst, const BundlingState& state) {
    nlohmann::json j;
    j["meta_goods"] = nlohmann::json::array();
    for (const Bundle& b : state.meta_goods) {
        nlohmann::json ids = nlohmann::json::array();
        for (int t : b) ids.push_back(inst.items[t]);
        j["meta_goods"].push_back(ids);
    }
    j["loose_goods"] = nlohmann::json::array();
    for (int t : state.loose_goods) j["loose_goods"].push_back(inst.items[t]);
    j["chores"] = nlohmann::json::array();
    for (int t : state.chores) j["chores"].push_back(inst.items[t]);
    return j;
}

inline const char* meta_kind_name(MetaKind kind) {
    switch (kind) {
    case MetaKind::Dummy: return "dummy";
    case MetaKind::SingletonChore: return "chore";
    case MetaKind::MetaGood: return "meta-good";
    case MetaKind::MetaChore: return "meta-chore";
    }
    return "?";
}

inline nlohmann::json trace_to_json(const Instance& inst, const MatchingTrace& trace) {
    nlohmann::json j;
    j["agents"] = nlohmann::json::array();
    for (int a : trace.agents) j["agents"].push_back(inst.agents[a]);
    j["pool"] = nlohmann::json::array();
    for (const MetaItem& item : trace.pool) {
        nlohmann::json entry;
        entry["kind"] = meta_kind_name(item.kind);
        entry["items"] = nlohmann::json::array();
        for (int t : item.items) entry["items"].push_back(inst.items[t]);
        j["pool"].push_back(entry);
    }
    j["rounds"] = nlohmann::json::array();
    for (const RoundMatching& round : trace.rounds) {
        nlohmann::json r;
        r["value"] = ratio_to_string(round.value);
        nlohmann::json assigned = nlohmann::json::object();
        for (std::size_t a = 0; a < trace.agents.size(); ++a)
            assigned[inst.agents[trace.agents[a]]] =
                round.assigned[a] ? nlohmann::json(*round.assigned[a]) : nlohmann::json();
        r["assigned"] = assigned;
        j["rounds"].push_back(r);
    }
    return j;
}

} // namespace detail

/// Human-auditable record of the solve: case tag, bundling stages, the chosen
/// search decision, and every matching round.
inline std::string serialize_certificate(const Instance& inst, const SolveCertificate& cert) {
    nlohmann::json j;
    j["case"] = case_tag_name(cert.case_tag);
    j["refined"] = cert.refined;
    j["initial_bundling"] = detail::bundling_to_json(inst, cert.initial);
    j["bundling"] = detail::bundling_to_json(inst, cert.bundling);
    if (cert.case_tag == CaseTag::CaseI) {
        nlohmann::json inj = nlohmann::json::array();
        for (std::size_t r = 0; r < cert.injection.size(); ++r)
            inj.push_back(inst.items[cert.bundling.chores[cert.injection[r]]]);
        j["injection"] = inj;
    }
    if (cert.case_tag == CaseTag::CaseII2) {
        const auto elements = detail::ground_elements(cert.bundling);
        nlohmann::json att = nlohmann::json::array();
        for (std::size_t c = 0; c < cert.attachments.size(); ++c) {
            nlohmann::json entry;
            entry["chore"] = inst.items[cert.bundling.chores[c]];
            entry["receiver"] = inst.agents[cert.chore_agents[c]];
            nlohmann::json elems = nlohmann::json::array();
            for (int e : cert.attachments[c]) {
                nlohmann::json item = nlohmann::json::array();
                for (int t : detail::element_items(cert.bundling, elements[e]))
                    item.push_back(inst.items[t]);
                elems.push_back(item);
            }
            entry["elements"] = elems;
            att.push_back(entry);
        }
        j["attachments"] = att;
        nlohmann::json dummies = nlohmann::json::array();
        for (int a : cert.dummy_agents) dummies.push_back(inst.agents[a]);
        j["goods_stage_agents"] = dummies;
    }
    j["traces"] = nlohmann::json::array();
    for (const MatchingTrace& trace : cert.traces)
        j["traces"].push_back(detail::trace_to_json(inst, trace));
    return j.dump(2) + "\n";
}

/// Verification report: one entry per performed check.
inline std::string serialize_report(const Instance& inst,
                                    const std::vector<std::pair<std::string, FairnessReport>>& checks) {
    nlohmann::json j;
    bool all = true;
    nlohmann::json obj = nlohmann::json::object();
    for (const auto& [name, report] : checks) {
        nlohmann::json entry;
        entry["verdict"] = report.verdict;
        nlohmann::json witnesses = nlohmann::json::array();
        for (const Witness& w : report.witnesses)
            witnesses.push_back({{"envier", inst.agents[w.envier]},
                                 {"envied", inst.agents[w.envied]},
                                 {"reason", w.reason}});
        entry["witnesses"] = witnesses;
        obj[name] = entry;
        all = all && report.verdict;
    }
    j["checks"] = obj;
    j["all_pass"] = all;
    return j.dump(2) + "\n";
}

} // namespace fairdiv
