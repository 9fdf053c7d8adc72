#pragma once

// One function per CLI command: RunConfig in, report and CSV bodies out.

#include <string>
#include <vector>

#include "bloch.hpp"
#include "constructions.hpp"
#include "ifs.hpp"
#include "io.hpp"
#include "maps.hpp"
#include "stretch.hpp"

namespace hypiter {

namespace detail {

inline BlochBudget budget_from(const RunConfig& cfg) {
    BlochBudget b;
    b.depth = cfg.number("depth");
    b.ring_step = cfg.number("ring_step");
    b.verify_samples = static_cast<int>(cfg.count("verify_samples"));
    return b;
}

inline const char* budget_class(const BlochReport& r) {
    return r.verdict.kind == BlochVerdict::Kind::NonBlochWitness ? "witness" : "bounded";
}

inline Outputs with_run(const RunConfig& cfg, std::span<const MapDescriptor> seq, std::vector<DiskPoint> marked) {
    RunOptions opt;
    opt.probe = cfg.grid("probe");
    opt.steps = seq.size();
    opt.tol = cfg.number("tol");
    opt.marked = std::move(marked);
    const RunResult result = run(seq, opt);
    Outputs out;
    out.report["run"] = to_json(result);
    out.trace = trace_csv(result.trace);
    out.grid = grid_csv(seq, seq.size(), cfg.grid("grid"));
    return out;
}

inline Outputs command_bloch(const RunConfig& cfg) {
    const auto x = parse_domain(cfg.text("domain"));
    Outputs out;
    out.report["search"] = to_json(bloch_radius_search(*x, budget_from(cfg)));
    return out;
}

inline Outputs command_qc(const RunConfig& cfg) {
    const auto x = parse_domain(cfg.text("domain"));
    const BlochBudget budget = budget_from(cfg);
    const BlochReport original = bloch_radius_search(*x, budget);
    Outputs out;
    Json runs = Json::array();
    bool preserved = true, identity = true;
    for (double k : cfg.numbers("K")) {
        const RadialStretch f(k);
        const BlochReport image = qc_image_experiment(x, f, budget);
        preserved = preserved && std::string(budget_class(image)) == budget_class(original);
        if (f.is_identity()) identity = identity && image == original;
        runs.push_back({{"K", k}, {"class", budget_class(image)}, {"search", to_json(image)}});
    }
    out.report["original"] = to_json(original);
    out.report["original_class"] = budget_class(original);
    out.report["runs"] = runs;
    out.report["classes_preserved"] = preserved;
    out.report["identity_reproduces"] = identity;
    return out;
}

inline Outputs command_ifs(const RunConfig& cfg) {
    const auto x = parse_domain(cfg.text("domain"));
    const std::size_t n = cfg.count("N");
    std::vector<MapDescriptor> seq;
    if (cfg.has("map")) {
        seq.assign(n, parse_map(cfg.text("map")));
    } else {
        seq = random_system(x, cfg.count("seed"), n);
    }
    std::vector<DiskPoint> marked;
    for (const auto& z : cfg.complexes("marked")) marked.emplace_back(z);
    return with_run(cfg, seq, std::move(marked));
}

inline Outputs command_t7(const RunConfig& cfg) {
    const auto x = parse_domain(cfg.text("domain"));
    const DiskPoint a0(cfg.complex("a0"));
    if (!x->contains(a0)) throw PreconditionError("construct-t7: a0 is not in " + x->describe());
    const DiskPoint w0 = cfg.has("w0") ? DiskPoint(cfg.complex("w0")) : point_at_rho_x(*x, a0, cfg.number("rho_x"));
    const Theorem7Result built = theorem7_build(x, a0, w0, static_cast<int>(cfg.count("N")));
    Outputs out = with_run(cfg, built.maps, {DiskPoint{}});
    bool all = true;
    for (const auto& s : built.states) all = all && s.checks.all();
    out.report["construction"] = to_json(built);
    out.report["all_checks"] = all;
    return out;
}

inline Outputs command_t8(const RunConfig& cfg) {
    const auto x = parse_domain(cfg.text("domain"));
    const DiskPoint a(cfg.complex("a"));
    const Theorem8Result built = theorem8_build(x, a, DiskPoint(cfg.complex("a1")), static_cast<int>(cfg.count("N")));
    Outputs out = with_run(cfg, built.maps, {a});
    bool all = true;
    for (const auto& s : built.states) all = all && s.ok();
    out.report["construction"] = to_json(built);
    out.report["all_checks"] = all;
    return out;
}

inline Outputs command_dw(const RunConfig& cfg) {
    const MapDescriptor f = parse_map(cfg.text("map"));
    const DiskPoint z0(cfg.complex("z0"));
    const DenjoyWolffResult r = denjoy_wolff(f, z0, cfg.count("N"), cfg.number("tol"));
    Outputs out;
    out.report["limit"] = to_json(r.limit);
    out.report["kind"] = to_string(r.kind);
    out.report["iterations"] = r.iterations;
    // The orbit itself, as a one-point trace.
    Complex z = z0;
    for (std::size_t k = 1; k <= r.iterations; ++k) {
        const auto next = f.try_apply(z);
        if (!next) break;
        z = *next;
        out.trace += std::to_string(k) + ",0,";
        append_double(out.trace, z.real());
        out.trace += ',';
        append_double(out.trace, z.imag());
        out.trace += ",0\n";
    }
    return out;
}

inline Outputs command_lemmas(const RunConfig& cfg) {
    const std::string which = cfg.text("lemma");
    if (which != "all" && which != "lemma1" && which != "lemma2") {
        throw PreconditionError("verify-lemmas: lemma must be all, lemma1 or lemma2");
    }
    Outputs out;
    if (which != "lemma2") {
        Json reports = Json::array();
        bool decreasing = true, domination = true;
        double previous = 0;
        bool first = true;
        for (double c : cfg.numbers("C")) {
            const Lemma1Report r = lemma1_verify(c, static_cast<int>(cfg.count("samples")));
            decreasing = decreasing && (first || r.eps_hat < previous);
            domination = domination && r.domination;
            previous = r.eps_hat;
            first = false;
            reports.push_back(to_json(r));
        }
        out.report["lemma1"] = {{"reports", reports}, {"decreasing", decreasing}, {"domination", domination}};
    }
    if (which != "lemma1") {
        const DiskPoint c(cfg.complex("c"));
        const auto moduli = cfg.numbers("moduli");
        out.report["lemma2"] = {{"real_axis", to_json(lemma2_verify(c, moduli, 0.0))},
                                {"random_argument", to_json(lemma2_verify(c, moduli, std::nullopt, cfg.count("seed")))}};
    }
    return out;
}

}  // namespace detail

/// Runs cfg.command(). Errors propagate as PreconditionError / NumericError.
inline Outputs execute(const RunConfig& cfg) {
    const std::string& c = cfg.command();
    Outputs out;
    if (c == "bloch") out = detail::command_bloch(cfg);
    else if (c == "qc") out = detail::command_qc(cfg);
    else if (c == "ifs-run") out = detail::command_ifs(cfg);
    else if (c == "construct-t7") out = detail::command_t7(cfg);
    else if (c == "construct-t8") out = detail::command_t8(cfg);
    else if (c == "dw") out = detail::command_dw(cfg);
    else if (c == "verify-lemmas") out = detail::command_lemmas(cfg);
    else throw PreconditionError("unknown command '" + c + "'");
    out.report["command"] = c;
    out.report["config"] = cfg.json();
    return out;
}

}  // namespace hypiter
