#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "division.hpp"
#include "gen.hpp"
#include "io.hpp"
#include "solver.hpp"
#include "verify.hpp"

namespace fairdiv {

/// Everything one command invocation needs. Paths left empty are derived
/// from the input path (<stem>.alloc.json, <stem>.cert.json, <stem>.report.json).
struct RunConfig {
    std::string instance_path;
    std::string allocation_path;
    std::string certificate_path;
    std::string report_path;
    std::string mode = "discrete"; // "discrete" or "efm"
    SolveOptions solve;
};

/// Exit codes shared by the library entry points and the binary.
enum ExitCode : int {
    ExitOk = 0,
    ExitFailure = 1,
    ExitParse = 2,
    ExitBudget = 3,
    ExitVerify = 4,
};

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

/// Write via a temp file + rename, so readers never see a half-written file.
inline void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << content;
        if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
    }
    std::filesystem::rename(tmp, path);
}

inline std::string derived_path(const std::string& input, const std::string& suffix) {
    std::filesystem::path p(input);
    p.replace_extension();
    return p.string() + suffix;
}

inline int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return ExitParse;
    } catch (const BudgetError& e) {
        err << "error: " << e.what() << "\n";
        return ExitBudget;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return ExitParse;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return ExitFailure;
    }
}

} // namespace detail

/// Solve an instance file and write the allocation plus its certificate.
/// Mode "discrete" emits bundles only; mode "efm" (requires a cake) also
/// emits the money simulation and the exact cake pieces.
inline int run_solve(const RunConfig& cfg, std::ostream& out = std::cout,
                     std::ostream& err = std::cerr) {
    return detail::guarded(err, [&]() -> int {
        const Instance inst = parse_instance(detail::read_file(cfg.instance_path));
        const std::string alloc_path = cfg.allocation_path.empty()
                                           ? detail::derived_path(cfg.instance_path, ".alloc.json")
                                           : cfg.allocation_path;
        const std::string cert_path = cfg.certificate_path.empty()
                                          ? detail::derived_path(cfg.instance_path, ".cert.json")
                                          : cfg.certificate_path;

        if (cfg.mode == "efm") {
            if (!inst.has_cake())
                throw std::invalid_argument("solve: efm mode requires a cake in the instance");
            const EfmSolution sol = solve_efm(inst, cfg.solve);
            detail::write_file_atomic(
                alloc_path, serialize_allocation(inst, sol.discrete, sol.payments, sol.pieces));
            detail::write_file_atomic(cert_path, serialize_certificate(inst, sol.certificate));
            out << "case " << case_tag_name(sol.certificate.case_tag) << ", "
                << sol.paid_agents.size() << " paid agent(s)\n";
        } else if (cfg.mode == "discrete") {
            const SolveResult result = solve_ef1_envy_freeable(inst, cfg.solve);
            detail::write_file_atomic(alloc_path, serialize_allocation(inst, result.allocation));
            detail::write_file_atomic(cert_path, serialize_certificate(inst, result.certificate));
            out << "case " << case_tag_name(result.certificate.case_tag) << "\n";
        } else {
            throw std::invalid_argument("solve: unknown mode '" + cfg.mode + "'");
        }
        out << "allocation: " << alloc_path << "\n" << "certificate: " << cert_path << "\n";
        return ExitOk;
    });
}

/// Check an allocation file against its instance: EF1 and envy-freeability
/// always; the mixed-allocation check when a divisible part is present
/// (pieces preferred over payments). Writes a report file; exits 0 only if
/// every performed check passes.
inline int run_verify(const RunConfig& cfg, std::ostream& out = std::cout,
                      std::ostream& err = std::cerr) {
    return detail::guarded(err, [&]() -> int {
        const Instance inst = parse_instance(detail::read_file(cfg.instance_path));
        const ParsedAllocation parsed =
            parse_allocation(inst, detail::read_file(cfg.allocation_path));
        const std::string report_path =
            cfg.report_path.empty() ? detail::derived_path(cfg.allocation_path, ".report.json")
                                    : cfg.report_path;

        std::vector<std::pair<std::string, FairnessReport>> checks;
        checks.emplace_back("ef1", check_ef1(inst, parsed.discrete));

        FairnessReport freeable;
        freeable.verdict = !has_positive_cycle(build_envy_graph(inst, parsed.discrete));
        if (!freeable.verdict)
            freeable.witnesses.push_back({0, 0, "positive-weight envy cycle"});
        if (inst.agent_count() <= 8 &&
            freeable.verdict != envy_freeable_by_permutation(inst, parsed.discrete))
            throw std::logic_error("verify: cycle and permutation oracles disagree");
        checks.emplace_back("envy_freeable", freeable);

        if (parsed.pieces) {
            const Instance norm = normalize(inst);
            checks.emplace_back("efm",
                                check_efm(norm, MixedAllocation{parsed.discrete, *parsed.pieces}));
        } else if (parsed.payments) {
            const Instance base = inst.has_cake() ? normalize(inst) : inst;
            checks.emplace_back(
                "efm", check_efm(base, MixedAllocation{parsed.discrete, *parsed.payments}));
        }

        detail::write_file_atomic(report_path, serialize_report(inst, checks));
        bool all = true;
        for (const auto& [name, report] : checks) {
            out << name << ": " << (report.verdict ? "pass" : "FAIL") << "\n";
            all = all && report.verdict;
        }
        out << "report: " << report_path << "\n";
        return all ? ExitOk : ExitVerify;
    });
}

/// Generate a deterministic instance file from a seed.
inline int run_gen(const GenParams& params, std::uint64_t seed, const std::string& out_path,
                   std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    return detail::guarded(err, [&]() -> int {
        const Instance inst = generate_instance(params, seed);
        detail::write_file_atomic(out_path, serialize_instance(inst));
        out << "instance: " << out_path << "\n";
        return ExitOk;
    });
}

} // namespace fairdiv
