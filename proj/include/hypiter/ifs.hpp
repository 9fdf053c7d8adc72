#pragma once

// Left compositions F_n = f_1 o ... o f_n evaluated on a compact probe set,
// with constant / non-constant / multiple-accumulation classification and the
// single-map (Denjoy-Wolff) and random-system baselines.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core.hpp"
#include "domain.hpp"
#include "maps.hpp"
#include "parallel.hpp"

namespace hypiter {

/// F_n(z) = f_1(f_2(...f_n(z))); the innermost map is f_n. nullopt when the
/// orbit hits the boundary guard.
inline std::optional<Complex> try_compose(std::span<const MapDescriptor> seq, Complex z, std::size_t n) {
    if (n > seq.size()) throw PreconditionError("compose_eval: n exceeds the sequence length");
    if (!detail::guarded(z)) return std::nullopt;
    for (std::size_t i = n; i-- > 0;) {
        const auto w = seq[i].try_apply(z);
        if (!w) return std::nullopt;
        z = *w;
    }
    return z;
}

inline DiskPoint compose_eval(std::span<const MapDescriptor> seq, DiskPoint z, std::size_t n) {
    const auto w = try_compose(seq, z, n);
    if (!w) throw NumericError("compose_eval: orbit hit the boundary guard");
    return *w;
}

/// Polar grid on {rho(0, z) <= radius}: the origin followed by `rings` circles
/// at equally spaced rho-radii, each with `angles` points.
struct ProbeGrid {
    double radius = 1.2;
    int rings = 24;
    int angles = 24;

    [[nodiscard]] std::vector<Complex> points() const {
        std::vector<Complex> out;
        if (rings <= 0 || angles <= 0) return out;
        out.reserve(1 + static_cast<std::size_t>(rings) * static_cast<std::size_t>(angles));
        out.emplace_back(0.0, 0.0);
        for (int i = 0; i < rings; ++i) {
            const double t = std::tanh(radius * (i + 1) / rings);
            for (int j = 0; j < angles; ++j) out.push_back(std::polar(t, detail::two_pi<double> * j / angles));
        }
        return out;
    }
};

struct RunOptions {
    ProbeGrid probe;
    std::size_t steps = 50;
    double tol = 1e-8;
    std::vector<DiskPoint> marked;
    int sustain = 5;                 // consecutive steps below tol for a constant limit
    double nonconstant_floor = 1e-3; // tail diameter floor for a non-constant verdict
    double linkage_factor = 10.0;    // cluster linkage = linkage_factor * tol
};

struct StepRecord {
    std::size_t n = 0;
    std::vector<Complex> values;     // F_n on the probe grid
    std::vector<std::uint8_t> ok;    // 0 where the orbit hit the boundary guard
    std::vector<std::optional<Complex>> marked;
    double diameter = 0;             // rho-diameter of F_n(probe grid)
    bool schwarz_pick = true;        // rho(F_n z, F_n w) <= rho(z, w) on all probe pairs
};

struct IFSTrace {
    std::vector<Complex> probes;
    std::vector<DiskPoint> marked;
    std::vector<StepRecord> steps;
    double elapsed_seconds = 0;
};

struct Cluster {
    Complex representative;
    std::vector<std::size_t> steps;
};

struct ConvergenceReport {
    enum class Verdict { ConstantLimit, NonConstant, MultipleAccumulation, Undecided };

    Verdict verdict = Verdict::Undecided;
    Complex constant{};              // ConstantLimit
    double diameter_floor = 0;       // min diameter over the tail
    std::size_t constant_from = 0;   // first step of the sustained run below tol
    std::vector<std::size_t> cluster_counts;  // per marked point, over the tail
    std::vector<Cluster> clusters;   // first marked point with more than one cluster
    std::vector<double> diameters;
    bool schwarz_pick = true;
    std::size_t failed_points = 0;
};

inline const char* to_string(ConvergenceReport::Verdict v) {
    switch (v) {
        case ConvergenceReport::Verdict::ConstantLimit: return "ConstantLimit";
        case ConvergenceReport::Verdict::NonConstant: return "NonConstant";
        case ConvergenceReport::Verdict::MultipleAccumulation: return "MultipleAccumulation";
        case ConvergenceReport::Verdict::Undecided: return "Undecided";
    }
    return "Undecided";
}

struct RunResult {
    IFSTrace trace;
    ConvergenceReport report;
};

namespace detail {

// sinh^2 of the rho-distance; monotone in rho and cheap.
inline double sinh2_rho(Complex z, Complex w) {
    return std::norm(z - w) / (one_minus_abs2(z) * one_minus_abs2(w));
}

inline std::vector<Cluster> single_linkage(const std::vector<std::pair<std::size_t, Complex>>& values,
                                           double linkage) {
    const std::size_t n = values.size();
    std::vector<std::size_t> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
    const auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (rho(values[i].second, values[j].second) <= linkage) parent[find(j)] = find(i);
        }
    }
    std::vector<Cluster> out;
    std::vector<std::size_t> slot(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t root = find(i);
        if (slot[root] == n) {
            slot[root] = out.size();
            out.push_back({values[i].second, {}});
        }
        out[slot[root]].steps.push_back(values[i].first);
    }
    return out;
}

}  // namespace detail

/// Evaluates F_1..F_N on the probe grid and marked points and classifies the
/// accumulation behaviour.
inline RunResult run(std::span<const MapDescriptor> seq, const RunOptions& opt) {
    if (opt.steps > seq.size()) throw PreconditionError("run: more steps than maps");
    if (!(opt.probe.radius >= 0) || !std::isfinite(opt.probe.radius) || std::tanh(opt.probe.radius) >= 1.0 - 1e-14) {
        throw PreconditionError("run: probe grid must lie in a compact subdisk");
    }
    const auto start = std::chrono::steady_clock::now();
    RunResult result;
    IFSTrace& trace = result.trace;
    trace.probes = opt.probe.points();
    trace.marked = opt.marked;
    const std::size_t p = trace.probes.size();
    const std::size_t m = opt.marked.size();
    const std::size_t steps = opt.steps;

    trace.steps.resize(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        auto& s = trace.steps[k];
        s.n = k + 1;
        s.values.assign(p, Complex{});
        s.ok.assign(p, 0);
        s.marked.assign(m, std::nullopt);
    }

    // Each point is an independent task writing its own column.
    parallel_for(p + m, [&](std::size_t idx) {
        const Complex z0 = idx < p ? trace.probes[idx] : opt.marked[idx - p].value();
        for (std::size_t k = 0; k < steps; ++k) {
            const auto w = try_compose(seq, z0, k + 1);
            auto& s = trace.steps[k];
            if (idx < p) {
                if (w) {
                    s.values[idx] = *w;
                    s.ok[idx] = 1;
                }
            } else {
                s.marked[idx - p] = w;
            }
        }
    });

    std::vector<double> base(p * p, 0.0);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = i + 1; j < p; ++j) base[i * p + j] = detail::sinh2_rho(trace.probes[i], trace.probes[j]);
    }

    ConvergenceReport& rep = result.report;
    parallel_for(steps, [&](std::size_t k) {
        auto& s = trace.steps[k];
        double max_q = 0;
        bool contraction = true;
        for (std::size_t i = 0; i < p; ++i) {
            if (!s.ok[i]) continue;
            for (std::size_t j = i + 1; j < p; ++j) {
                if (!s.ok[j]) continue;
                const double q = detail::sinh2_rho(s.values[i], s.values[j]);
                max_q = std::max(max_q, q);
                const double q0 = base[i * p + j];
                if (q > q0 && rho(s.values[i], s.values[j]) > std::asinh(std::sqrt(q0)) + 1e-8) contraction = false;
            }
        }
        s.diameter = std::asinh(std::sqrt(max_q));
        s.schwarz_pick = contraction;
    });

    for (const auto& s : trace.steps) {
        rep.diameters.push_back(s.diameter);
        rep.schwarz_pick = rep.schwarz_pick && s.schwarz_pick;
        for (auto ok : s.ok) rep.failed_points += ok ? 0 : 1;
    }
    trace.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (steps == 0 || p == 0) return result;

    const std::size_t tail_begin = steps / 2;
    rep.diameter_floor = *std::min_element(rep.diameters.begin() + static_cast<std::ptrdiff_t>(tail_begin),
                                           rep.diameters.end());

    // Constant limit: a sustained run below tol reaching the last step.
    std::size_t run_start = steps;
    while (run_start > 0 && rep.diameters[run_start - 1] < opt.tol) --run_start;
    if (steps - run_start >= static_cast<std::size_t>(opt.sustain)) {
        const auto& last = trace.steps.back();
        rep.constant = last.values[0];
        bool tight = last.ok[0] != 0;
        for (std::size_t i = 0; i < p && tight; ++i) {
            tight = last.ok[i] && std::abs(last.values[i] - rep.constant) < opt.tol;
        }
        if (tight) {
            rep.verdict = ConvergenceReport::Verdict::ConstantLimit;
            rep.constant_from = run_start + 1;
            return result;
        }
    }

    const double linkage = opt.linkage_factor * opt.tol;
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<std::pair<std::size_t, Complex>> values;
        for (std::size_t k = tail_begin; k < steps; ++k) {
            if (trace.steps[k].marked[j]) values.emplace_back(k + 1, *trace.steps[k].marked[j]);
        }
        auto clusters = detail::single_linkage(values, linkage);
        rep.cluster_counts.push_back(clusters.size());
        if (clusters.size() > 1 && rep.clusters.empty()) rep.clusters = std::move(clusters);
    }
    if (!rep.clusters.empty()) {
        rep.verdict = ConvergenceReport::Verdict::MultipleAccumulation;
    } else if (rep.diameter_floor >= opt.nonconstant_floor) {
        rep.verdict = ConvergenceReport::Verdict::NonConstant;
    }
    return result;
}

// ---------------------------------------------------------------------------

struct DenjoyWolffResult {
    enum class Kind { Interior, Boundary };
    Complex limit;
    Kind kind = Kind::Interior;
    std::size_t iterations = 0;
};

inline const char* to_string(DenjoyWolffResult::Kind k) {
    return k == DenjoyWolffResult::Kind::Interior ? "interior" : "boundary";
}

/// Iterates f from z0 until successive iterates agree to tol. The limit is
/// interior when the orbit also converges in rho; otherwise it is the boundary
/// point the orbit approaches (reported on the unit circle).
inline DenjoyWolffResult denjoy_wolff(const MapDescriptor& f, DiskPoint z0, std::size_t max_steps, double tol) {
    if (f.is_single_automorphism()) throw PreconditionError("denjoy_wolff: f is a disk automorphism");
    if (!f.holomorphic()) throw PreconditionError("denjoy_wolff: f must be holomorphic");
    Complex z = z0;
    for (std::size_t k = 1; k <= max_steps; ++k) {
        const auto next = f.try_apply(z);
        if (!next) {
            // Orbit reached the boundary guard; the limit is on the circle.
            return {z / std::abs(z), DenjoyWolffResult::Kind::Boundary, k};
        }
        const double step = std::abs(*next - z);
        if (step < tol) {
            const bool interior = rho(z, *next) < std::sqrt(tol);
            if (interior) return {*next, DenjoyWolffResult::Kind::Interior, k};
            return {*next / std::abs(*next), DenjoyWolffResult::Kind::Boundary, k};
        }
        z = *next;
    }
    throw NumericError("denjoy_wolff: Undecided, no convergence within " + std::to_string(max_steps) + " steps");
}

/// f_i = riemann_to(X) o b_i with b_i a seeded random automorphism or degree-2
/// Blaschke product.
inline std::vector<MapDescriptor> random_system(const DomainPtr& x, std::uint64_t seed, std::size_t count) {
    if (!x || !x->simply_connected()) throw PreconditionError("random_system: domain needs a Riemann map");
    Rng rng(seed);
    std::vector<MapDescriptor> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const bool blaschke = rng.coin();
        const double modulus = 0.95 * std::sqrt(rng.uniform(1e-4, 1.0));
        const double arg = rng.uniform(0.0, detail::two_pi<double>);
        const DiskPoint a(std::polar(modulus, arg));
        const double theta = rng.uniform(0.0, detail::two_pi<double>);
        Piece inner = blaschke ? Piece(Blaschke2(a)) : Piece(MobiusAut(a, theta));
        out.emplace_back(std::vector<Piece>{inner, RiemannTo{x}}, x);
    }
    return out;
}

}  // namespace hypiter
