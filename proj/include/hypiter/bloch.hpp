#pragma once

// Search for the rho-Bloch radius sup_a inradius_at(a), certification of
// witness disks, and the radial-stretch image experiment.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <memory>
#include <numbers>
#include <vector>

#include "core.hpp"
#include "domain.hpp"
#include "parallel.hpp"
#include "stretch.hpp"

namespace hypiter {

struct BlochBudget {
    double depth = 5.0;            // outermost ring of candidate centers, rho-units
    double ring_step = 0.25;
    int max_angles = 720;          // cap on candidates per ring
    int refine_steps = 40;         // golden-section iterations per coordinate sweep
    double witness_threshold = -1; // < 0 means 0.6 * depth
    int verify_samples = 10000;
    double growth_margin = 0.25;   // outer-vs-inner gain that signals an unfinished search

    [[nodiscard]] double threshold() const { return witness_threshold < 0 ? 0.6 * depth : witness_threshold; }
};

struct BlochVerdict {
    enum class Kind { BlochUpTo, NonBlochWitness, BudgetExhausted };
    Kind kind = Kind::BlochUpTo;
    double value = 0;  // bound, certified witness radius, or best value seen
};

inline const char* to_string(BlochVerdict::Kind k) {
    switch (k) {
        case BlochVerdict::Kind::BlochUpTo: return "BlochUpTo";
        case BlochVerdict::Kind::NonBlochWitness: return "NonBlochWitness";
        case BlochVerdict::Kind::BudgetExhausted: return "BudgetExhausted";
    }
    return "BlochUpTo";
}

struct BlochReport {
    DiskPoint best_center;
    double best_inradius = 0;
    BlochBudget budget;
    BlochVerdict verdict;
    std::vector<double> ring_maxima;  // refined maximum per ring, index 0 is the origin
    bool witness_verified = false;
    std::size_t candidates = 0;

    friend bool operator==(const BlochReport& a, const BlochReport& b) {
        return a.best_center == b.best_center && a.best_inradius == b.best_inradius &&
               a.verdict.kind == b.verdict.kind && a.verdict.value == b.verdict.value &&
               a.ring_maxima == b.ring_maxima && a.witness_verified == b.witness_verified &&
               a.candidates == b.candidates;
    }
};

/// True iff deterministic boundary and interior samples of d all lie in X and
/// no isolated complement point of X lies inside d.
inline bool witness_disk_verify(const Domain& x, const HyperbolicDisk& d, int samples) {
    if (samples <= 0) return true;
    const MobiusAut from_origin = mobius_invert(MobiusAut(d.center, 0.0));
    const double t = std::tanh(d.radius);
    const int boundary = std::max(1, samples / 2);
    for (int j = 0; j < boundary; ++j) {
        const Complex z = from_origin.apply(std::polar(t, detail::two_pi<double> * j / boundary));
        if (!x.contains(z)) return false;
    }
    const int interior = samples - boundary;
    for (int i = 0; i < interior; ++i) {
        // sunflower pattern, uniform in rho-radius
        const double r = d.radius * std::sqrt((i + 0.5) / interior);
        const Complex z = from_origin.apply(std::polar(std::tanh(r), 2.399963229728653 * i));
        if (!x.contains(z)) return false;
    }
    if (const auto* p = x.punctures()) {
        if (p->nearest_distance(d.center) <= d.radius) return false;
    }
    return true;
}

namespace detail {

struct Candidate {
    Complex center;
    double value = -1;  // -1: not an admissible center
};

inline bool better(const Candidate& a, const Candidate& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.center.real() != b.center.real()) return a.center.real() < b.center.real();
    return a.center.imag() < b.center.imag();
}

inline double objective(const Domain& x, Complex z) {
    if (!DiskPoint::admissible(z) || !x.valid_center(z) || !x.contains(z)) return -1;
    return x.inradius_at(z);
}

inline int ring_angles(double r, const BlochBudget& b) {
    if (r == 0) return 1;
    // rho-circumference of a circle of rho-radius r is pi sinh(2r).
    const double want = std::ceil(std::numbers::pi * std::sinh(2 * r) / b.ring_step);
    return static_cast<int>(std::clamp(want, 8.0, static_cast<double>(b.max_angles)));
}

// Coordinate golden-section ascent in (rho-radius, angle) inside the ring's
// annulus; returns the best point seen (never worse than the start).
inline Candidate refine_ring(const Domain& x, Candidate start, double r_lo, double r_hi, double dphi,
                             const BlochBudget& b) {
    Candidate best = start;
    double r = rho0(start.center);
    double phi = std::arg(start.center);
    const auto eval = [&](double rr, double pp) {
        Candidate c{std::polar(std::tanh(rr), pp), -1};
        c.value = objective(x, c.center);
        if (better(c, best)) best = c;
        return c.value;
    };
    const auto golden = [&](double lo, double hi, auto&& f) {
        constexpr double g = 0.6180339887498949;
        double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
        double fc = f(c), fd = f(d);
        for (int it = 0; it < b.refine_steps; ++it) {
            if (fc > fd) {
                hi = d, d = c, fd = fc;
                c = hi - g * (hi - lo);
                fc = f(c);
            } else {
                lo = c, c = d, fc = fd;
                d = lo + g * (hi - lo);
                fd = f(d);
            }
        }
        return 0.5 * (lo + hi);
    };
    for (int sweep = 0; sweep < 2; ++sweep) {
        if (dphi > 0) phi = golden(phi - dphi, phi + dphi, [&](double p) { return eval(r, p); });
        r = golden(r_lo, r_hi, [&](double rr) { return eval(rr, phi); });
        r = rho0(best.center);
        phi = std::arg(best.center);
    }
    return best;
}

}  // namespace detail

/// Two-phase search: candidate centers on rings at multiples of ring_step up
/// to the budget depth, then per-ring golden-section refinement. The per-ring
/// maxima do not depend on the depth, so the result is monotone in the budget.
inline BlochReport bloch_radius_search(const Domain& x, const BlochBudget& budget = {}) {
    if (!(budget.depth >= 0) || !(budget.ring_step > 0)) throw PreconditionError("bloch_radius_search: bad budget");
    const auto rings = static_cast<std::size_t>(std::floor(budget.depth / budget.ring_step + 1e-9)) + 1;

    std::vector<detail::Candidate> ring_best(rings);
    std::vector<std::size_t> ring_count(rings);
    parallel_for(rings, [&](std::size_t k) {
        const double r = static_cast<double>(k) * budget.ring_step;
        const int m = detail::ring_angles(r, budget);
        ring_count[k] = static_cast<std::size_t>(m);
        detail::Candidate best{Complex(std::tanh(r), 0.0), -1};
        for (int j = 0; j < m; ++j) {
            detail::Candidate c{std::polar(std::tanh(r), detail::two_pi<double> * j / m), -1};
            c.value = detail::objective(x, c.center);
            if (detail::better(c, best)) best = c;
        }
        if (best.value >= 0) {
            const double half = budget.ring_step / 2;
            best = detail::refine_ring(x, best, std::max(0.0, r - half), r + half,
                                       k == 0 ? 0.0 : detail::two_pi<double> / m, budget);
        }
        ring_best[k] = best;
    });

    BlochReport rep;
    rep.budget = budget;
    detail::Candidate overall{Complex(0.0), -1};
    for (std::size_t k = 0; k < rings; ++k) {
        rep.ring_maxima.push_back(std::max(0.0, ring_best[k].value));
        rep.candidates += ring_count[k];
        if (detail::better(ring_best[k], overall)) overall = ring_best[k];
    }
    if (overall.value < 0) {
        rep.verdict = {BlochVerdict::Kind::BlochUpTo, 0.0};
        return rep;
    }
    rep.best_center = overall.center;
    rep.best_inradius = overall.value;

    const double threshold = budget.threshold();
    if (rep.best_inradius >= threshold) {
        // Certify a slightly smaller disk; shrink until the sampler agrees.
        double r = rep.best_inradius * (1 - 1e-9);
        for (int attempt = 0; attempt < 60 && r >= threshold; ++attempt, r *= 0.99) {
            if (witness_disk_verify(x, {rep.best_center, r}, budget.verify_samples)) {
                rep.witness_verified = true;
                rep.verdict = {BlochVerdict::Kind::NonBlochWitness, r};
                return rep;
            }
        }
    }
    // Inner rings stop one unit short of the budget depth.
    double inner = 0;
    for (std::size_t k = 0; k < rings; ++k) {
        if (static_cast<double>(k) * budget.ring_step <= budget.depth - 1.0) inner = std::max(inner, rep.ring_maxima[k]);
    }
    if (rep.best_inradius > inner + budget.growth_margin) {
        rep.verdict = {BlochVerdict::Kind::BudgetExhausted, rep.best_inradius};
    } else {
        rep.verdict = {BlochVerdict::Kind::BlochUpTo, rep.best_inradius};
    }
    return rep;
}

/// Bloch search on f(X), with membership through the inverse stretch.
inline BlochReport qc_image_experiment(const DomainPtr& x, const RadialStretch& f, const BlochBudget& budget = {}) {
    const StretchedDomain image(x, f);
    return bloch_radius_search(image, budget);
}

}  // namespace hypiter
