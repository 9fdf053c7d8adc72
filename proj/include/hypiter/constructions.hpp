#pragma once

// Builders for explicit map sequences on a non-Bloch / non-relatively-compact
// domain, plus direct numerical checks of the two disk-geometry lemmas.
//
// Non-constant limit: f_n = pi_n o A_{a_n}, where pi_n is the Riemann map with
// pi_n(0) = a_{n-1} rotated so that w_{n-1} lifts to the positive axis, and a_n
// is a deep point of X. Then F_n(0) = a_0 and F_n(w~_n) = w_0 for every n while
// rho(0, w~_n) stays below 1.
//
// Two accumulation points: f_n are rotated Riemann maps with f_n(a) = a_{n-1}
// and f_n(a_n) = a, so F_{2n}(a) = a and F_{2n+1}(a) = a_0.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"
#include "domain.hpp"
#include "ifs.hpp"
#include "maps.hpp"
#include "parallel.hpp"

namespace hypiter {

/// eps_n = 2^{2^{-(n+1)}} - 1, so prod_{i<=n} (1 + eps_i)^2 = 2^{1 - 2^{-n}} < 2.
inline double epsilon_sequence(int n) {
    if (n < 1) throw PreconditionError("epsilon_sequence: index must be >= 1");
    return std::expm1(std::numbers::ln2 * std::ldexp(1.0, -(n + 1)));
}

/// prod_{i=1}^{n} (1 + eps_i) = 2^{(1 - 2^{-n}) / 2}.
inline double epsilon_product(int n) { return std::exp2(0.5 * -std::expm1(-std::numbers::ln2 * n)); }

// ---------------------------------------------------------------------------

struct Theorem7Checks {
    bool images = false;          // f_n(0) = f_n(a_n) = a_{n-1}, f_n(w_n) = f_n(w~_n) = w_{n-1}
    bool lift_bound = false;      // rho(a_n, w_n) = rho(0, w~_n) < (1 + eps_n) rho_X(a_{n-1}, w_{n-1})
    bool step_ratio = false;      // rho_X(a_n, w_n) < (1 + eps_n) rho(a_n, w_n) < (1 + eps_n)^2 rho_X(a_{n-1}, w_{n-1})
    bool disk_product = false;    // rho(0, w~_n) < prod (1 + eps_i) rho(0, c_0) < 1
    bool domain_product = false;  // rho_X(a_n, w_n) < prod (1 + eps_i)^2 rho(0, c_0) < 1

    [[nodiscard]] bool all() const { return images && lift_bound && step_ratio && disk_product && domain_product; }
};

struct Theorem7State {
    int n = 0;
    DiskPoint a;          // a_n
    DiskPoint w;          // w_n
    DiskPoint w_tilde;    // w~_n
    DiskPoint c_prev;     // lift of w_{n-1} under pi_n
    double depth = 0;     // deep-point parameter chosen for a_n
    double eps = 0;
    double product = 0;   // prod (1 + eps_i)
    double product_sq = 0;
    double rho_a_w = 0;
    double rho_x_a_w = 0;
    double rho_0_w_tilde = 0;
    double image_error = 0;
    Theorem7Checks checks;
};

struct Theorem7Result {
    std::vector<MapDescriptor> maps;
    std::vector<Theorem7State> states;
    DiskPoint a0;
    DiskPoint w0;
    double rho_c0 = 0;                // rho(0, c_0) = rho_X(a_0, w_0)
    Complex final_at_origin;          // F_N(0)
    Complex final_at_w_tilde;         // F_N(w~_N)
    double final_error = 0;           // max(|F_N(0) - a0|, |F_N(w~_N) - w0|)
};

struct Theorem7Options {
    double depth_start = 2.0;
    double depth_step = 0.5;
    double depth_cap = 60.0;
};

/// The point at rho_X-distance `distance` from `from`, along the X-geodesic
/// leaving in direction `angle` (measured in the Riemann-map frame).
inline DiskPoint point_at_rho_x(const Domain& x, DiskPoint from, double distance, double angle = 0.0) {
    const MobiusAut back = mobius_invert(MobiusAut(x.riemann_from(from), 0.0));
    return x.riemann_to(back(DiskPoint(std::polar(std::tanh(distance), angle))));
}

/// Recomputes every recorded quantity of a state from scratch and evaluates the
/// five step inequalities.
inline Theorem7Checks check_theorem7_state(const Domain& x, const MapDescriptor& f, DiskPoint a_prev,
                                           DiskPoint w_prev, double rho_c0, Theorem7State& s) {
    const double eps = epsilon_sequence(s.n);
    const double prev_x = x.rho_X(a_prev, w_prev);
    const double rho_aw = rho(s.a, s.w);
    const double rho_0wt = rho(DiskPoint{}, s.w_tilde);
    const double rho_x_aw = x.rho_X(s.a, s.w);
    const double prod = epsilon_product(s.n);

    double err = 0;
    for (auto [z, target] : {std::pair{DiskPoint{}, a_prev}, std::pair{s.a, a_prev}, std::pair{s.w, w_prev},
                             std::pair{s.w_tilde, w_prev}}) {
        const auto image = f.try_apply(z);
        err = std::max(err, image ? std::abs(*image - target.value()) : std::numeric_limits<double>::infinity());
    }
    s.image_error = err;

    Theorem7Checks c;
    c.images = err < 1e-9;
    c.lift_bound = std::abs(rho_aw - rho_0wt) < 1e-9 && rho_0wt < (1 + eps) * prev_x;
    c.step_ratio = rho_x_aw < (1 + eps) * rho_aw && rho_aw < (1 + eps) * prev_x;
    c.disk_product = rho_0wt < prod * rho_c0 && prod * rho_c0 < 1;
    c.domain_product = rho_x_aw < prod * prod * rho_c0 && prod * prod * rho_c0 < 1;
    return c;
}

/// Builds f_1..f_N on a non-Bloch simply connected X with F_n(0) = a0 and
/// F_n(w~_n) = w0. Each a_n is a deep point whose parameter is raised from
/// depth_start in depth_step increments until the step inequalities hold with
/// rho_X(a_n, w_n) < (1 + eps_n) rho_X(a_{n-1}, w_{n-1}); that per-step
/// contraction keeps the cumulative products below their bounds.
inline Theorem7Result theorem7_build(const DomainPtr& x, DiskPoint a0, DiskPoint w0, int steps,
                                     const Theorem7Options& opt = {}) {
    if (!x || !x->simply_connected()) throw PreconditionError("theorem7_build: domain needs a Riemann map");
    if (!x->has_deep_points()) {
        throw PreconditionError("theorem7_build: " + x->describe() + " is a Bloch entry (no deep points)");
    }
    if (!x->contains(a0) || !x->contains(w0)) throw PreconditionError("theorem7_build: a0 and w0 must lie in X");
    if (a0 == w0) throw PreconditionError("theorem7_build: a0 and w0 must be distinct");
    const double rho_c0 = x->rho_X(a0, w0);
    if (!(rho_c0 < 0.5)) throw PreconditionError("theorem7_build: requires rho_X(a0, w0) < 1/2");

    Theorem7Result out;
    out.a0 = a0;
    out.w0 = w0;
    out.rho_c0 = rho_c0;
    DiskPoint a_prev = a0, w_prev = w0;

    for (int n = 1; n <= steps; ++n) {
        const double eps = epsilon_sequence(n);
        const double prev_x = x->rho_X(a_prev, w_prev);

        // pi_n(0) = a_{n-1}, rotated so the lift of w_{n-1} is real positive.
        const DiskPoint p = x->riemann_from(a_prev);
        const DiskPoint q = x->riemann_from(w_prev);
        const Complex lift = MobiusAut(p, 0.0).apply(q.value());
        const double theta = std::arg(lift);
        const MobiusAut transport = mobius_two_point(DiskPoint{}, p, theta);
        const DiskPoint c(std::abs(lift));

        std::optional<Theorem7State> chosen;
        std::string last_failure = "no depth tried";
        for (double t = opt.depth_start; t <= opt.depth_cap; t += opt.depth_step) {
            DiskPoint a;
            try {
                a = x->deep_point(t);
            } catch (const NumericError& e) {
                last_failure = e.what();
                break;
            }
            const auto roots = blaschke2_preimages(Blaschke2(a), c);
            Theorem7State s;
            s.n = n;
            s.a = a;
            s.w_tilde = roots.z1;
            s.w = roots.z2;
            s.c_prev = c;
            s.depth = t;
            const double rho_0wt = rho(DiskPoint{}, s.w_tilde);
            if (!(rho_0wt < (1 + eps) * rho0(c.value()))) {
                last_failure = "rho(0, w~_n) < (1 + eps_n) rho(0, c_{n-1})";
                continue;
            }
            if (!x->contains(s.w)) {
                last_failure = "w_n in X";
                continue;
            }
            if (!(x->inradius_at(a) > 1.0)) {
                last_failure = "inradius(a_n) > 1";
                continue;
            }
            const double rho_aw = rho(s.a, s.w);
            const double rho_x_aw = x->rho_X(s.a, s.w);
            if (!(rho_x_aw < (1 + eps) * rho_aw)) {
                last_failure = "rho_X(a_n, w_n) < (1 + eps_n) rho(a_n, w_n)";
                continue;
            }
            if (!(rho_x_aw < (1 + eps) * prev_x)) {
                last_failure = "rho_X(a_n, w_n) < (1 + eps_n) rho_X(a_{n-1}, w_{n-1})";
                continue;
            }
            chosen = s;
            break;
        }
        if (!chosen) {
            throw NumericError("theorem7_build: deep-point search exhausted at step " + std::to_string(n) +
                               "; violated bound: " + last_failure);
        }

        Theorem7State s = *chosen;
        MapDescriptor f({Blaschke2(s.a), transport, RiemannTo{x}}, x);
        s.eps = eps;
        s.product = epsilon_product(n);
        s.product_sq = s.product * s.product;
        s.rho_a_w = rho(s.a, s.w);
        s.rho_x_a_w = x->rho_X(s.a, s.w);
        s.rho_0_w_tilde = rho(DiskPoint{}, s.w_tilde);
        s.checks = check_theorem7_state(*x, f, a_prev, w_prev, rho_c0, s);

        out.maps.push_back(std::move(f));
        out.states.push_back(s);
        a_prev = s.a;
        w_prev = s.w;
    }

    const std::size_t n = out.maps.size();
    out.final_at_origin = compose_eval(out.maps, DiskPoint{}, n);
    out.final_at_w_tilde = n ? compose_eval(out.maps, out.states.back().w_tilde, n).value() : w0.value();
    out.final_error = std::max(std::abs(out.final_at_origin - a0.value()), std::abs(out.final_at_w_tilde - w0.value()));
    return out;
}

// ---------------------------------------------------------------------------

struct Theorem8State {
    int n = 0;
    DiskPoint a_n;
    double theta = 0;
    double circle_radius = 0;  // rho_X(a, a_{n-1})
    double rho_a_n_a = 0;      // rho(a_n, a)
    double image_error = 0;    // max(|f_n(a) - a_{n-1}|, |f_n(a_n) - a|)
    bool in_x = false;

    [[nodiscard]] bool ok() const { return in_x && image_error < 1e-9 && std::abs(rho_a_n_a - circle_radius) < 1e-9; }
};

struct Theorem8Result {
    std::vector<MapDescriptor> maps;
    std::vector<Theorem8State> states;
    DiskPoint a;
    DiskPoint a1;
    std::vector<Complex> orbit;  // F_n(a), n = 1..N
};

struct Theorem8Options {
    int theta_samples = 4096;
    double theta_resolution = 1e-12;
};

/// Builds rotated Riemann maps f_n with f_n(a) = a_{n-1} (a_0 = a1) and
/// f_n(a_n) = a, choosing the rotation so that a_n lies in X.
inline Theorem8Result theorem8_build(const DomainPtr& x, DiskPoint a, DiskPoint a1, int steps,
                                     const Theorem8Options& opt = {}) {
    if (!x || !x->simply_connected()) throw PreconditionError("theorem8_build: domain needs a Riemann map");
    if (x->relatively_compact()) throw PreconditionError("theorem8_build: domain is relatively compact");
    if (!x->contains(a) || !x->contains(a1)) throw PreconditionError("theorem8_build: a and a1 must lie in X");
    if (a == a1) throw PreconditionError("theorem8_build: a and a1 must be distinct");

    Theorem8Result out;
    out.a = a;
    out.a1 = a1;
    const DiskPoint a_lift = x->riemann_from(a);
    DiskPoint prev = a1;

    for (int n = 1; n <= steps; ++n) {
        const DiskPoint target = x->riemann_from(prev);
        // a_n(theta) is the preimage of a under the covering rotated by theta;
        // it runs over the rho-circle about a of radius rho_X(a, a_{n-1}).
        const auto preimage = [&](double theta) -> std::optional<Complex> {
            const MobiusAut m = mobius_two_point(a, target, theta);
            const Complex z = mobius_invert(m).apply(a_lift.value());
            if (!DiskPoint::admissible(z)) return std::nullopt;
            return z;
        };
        const auto inside = [&](double theta) {
            const auto z = preimage(theta);
            return z && x->contains(*z);
        };

        const int samples = opt.theta_samples;
        const double step = detail::two_pi<double> / samples;
        std::vector<std::uint8_t> member(static_cast<std::size_t>(samples));
        parallel_for(member.size(), [&](std::size_t j) { member[j] = inside(step * static_cast<double>(j)) ? 1 : 0; });

        const double radius = x->rho_X(a, prev);
        double theta = 0;
        const auto count = std::count(member.begin(), member.end(), std::uint8_t{1});
        if (count == 0) {
            throw NumericError("theorem8_build: theta scan found no preimage in X at step " + std::to_string(n) +
                               " (circle radius rho_X(a, a_{n-1}) = " + std::to_string(radius) + ")");
        }
        if (count == samples) {
            // Whole circle inside X: take the deepest sample.
            double best = -1;
            for (int j = 0; j < samples; ++j) {
                const double depth = x->inradius_at(*preimage(step * j));
                if (depth > best) best = depth, theta = step * j;
            }
        } else {
            // Longest cyclic run of members; bisect both ends, take the middle.
            int best_start = 0, best_len = 0;
            for (int j = 0; j < samples; ++j) {
                if (!member[static_cast<std::size_t>(j)] || member[static_cast<std::size_t>((j + samples - 1) % samples)]) continue;
                int len = 0;
                while (len < samples && member[static_cast<std::size_t>((j + len) % samples)]) ++len;
                if (len > best_len) best_len = len, best_start = j;
            }
            const auto edge = [&](double in, double out_) {
                while (std::abs(out_ - in) > opt.theta_resolution) {
                    const double mid = 0.5 * (in + out_);
                    (inside(mid) ? in : out_) = mid;
                }
                return in;
            };
            const double lo = edge(step * best_start, step * (best_start - 1));
            const double hi = edge(step * (best_start + best_len - 1), step * (best_start + best_len));
            theta = detail::wrap_angle(0.5 * (lo + hi));
            if (!inside(theta)) theta = detail::wrap_angle(step * (best_start + best_len / 2));
        }

        MapDescriptor f({mobius_two_point(a, target, theta), RiemannTo{x}}, x);
        Theorem8State s;
        s.n = n;
        s.theta = theta;
        s.a_n = *preimage(theta);
        s.in_x = x->contains(s.a_n);
        s.circle_radius = radius;
        s.rho_a_n_a = rho(s.a_n, a);
        const auto fa = f.try_apply(a), fan = f.try_apply(s.a_n);
        s.image_error = (fa && fan) ? std::max(std::abs(*fa - prev.value()), std::abs(*fan - a.value()))
                                   : std::numeric_limits<double>::infinity();
        out.maps.push_back(std::move(f));
        out.states.push_back(s);
        prev = s.a_n;
    }
    for (std::size_t n = 1; n <= out.maps.size(); ++n) out.orbit.push_back(compose_eval(out.maps, a, n).value());
    return out;
}

// ---------------------------------------------------------------------------

struct Lemma1Report {
    double big_c = 0;        // rho-radius C of the disk D
    double euclid_c = 0;     // c = tanh C
    double eps_hat = 0;      // max rho_D(0, z) / rho(0, z) - 1 over samples
    bool domination = true;  // rho_D >= rho on every sample
    int samples = 0;
};

/// With D the rho-disk of radius C about 0, compares rho_D(0, z) = artanh(|z|/c)
/// with rho(0, z) on samples 0 < rho(0, z) < 1.
inline Lemma1Report lemma1_verify(double big_c, int samples) {
    if (!(big_c > 1)) throw PreconditionError("lemma1_verify: requires C > 1");
    if (samples <= 0) throw PreconditionError("lemma1_verify: sample count must be positive");
    Lemma1Report rep;
    rep.big_c = big_c;
    rep.euclid_c = std::tanh(big_c);
    rep.samples = samples;
    const double edge = std::tanh(1.0);
    double worst = 0;
    for (int i = 0; i < samples; ++i) {
        const double m = edge * (i + 1.0) / (samples + 1.0);
        const Complex z = std::polar(m, 2.399963229728653 * i);
        const double in_disk = std::atanh(std::abs(z) / rep.euclid_c);
        const double in_delta = rho0(z);
        rep.domination = rep.domination && in_disk >= in_delta;
        worst = std::max(worst, in_disk / in_delta - 1.0);
    }
    rep.eps_hat = worst;
    return rep;
}

struct Lemma2Sample {
    double modulus = 0;
    DiskPoint a;
    DiskPoint z1;
    DiskPoint z2;
    double rho_0_z1 = 0;
    double rho_a_z2 = 0;
    double gap = 0;  // |rho(0, z1) - rho(0, c)|
    double vieta_error = 0;
};

struct Lemma2Report {
    DiskPoint c;
    std::vector<Lemma2Sample> samples;
    bool monotone = true;
    bool identity_holds = true;  // rho(0, z1) = rho(a, z2) to 1e-10
};

/// Preimages of c under A_a for each |a| in `moduli`. The argument of a is
/// `argument` when given, otherwise drawn from a stream seeded by `seed`.
inline Lemma2Report lemma2_verify(DiskPoint c, const std::vector<double>& moduli,
                                  std::optional<double> argument = 0.0, std::uint64_t seed = 0) {
    if (c.value() == Complex(0) || !(rho0(c.value()) < 1)) {
        throw PreconditionError("lemma2_verify: requires c != 0 and rho(0, c) < 1");
    }
    Rng rng(seed);
    Lemma2Report rep;
    rep.c = c;
    const double rho_c = rho0(c.value());
    for (double m : moduli) {
        const double arg = argument ? *argument : rng.uniform(0.0, detail::two_pi<double>);
        Lemma2Sample s;
        s.modulus = m;
        s.a = DiskPoint(std::polar(m, arg));
        const auto roots = blaschke2_preimages(Blaschke2(s.a), c);
        s.z1 = roots.z1;
        s.z2 = roots.z2;
        s.rho_0_z1 = rho0(s.z1.value());
        s.rho_a_z2 = rho(s.a, s.z2);
        s.gap = std::abs(s.rho_0_z1 - rho_c);
        s.vieta_error = std::abs(s.z1.value() * s.z2.value() + c.value());
        rep.identity_holds = rep.identity_holds && std::abs(s.rho_0_z1 - s.rho_a_z2) < 1e-10;
        if (!rep.samples.empty() && !(s.gap < rep.samples.back().gap)) rep.monotone = false;
        rep.samples.push_back(s);
    }
    return rep;
}

}  // namespace hypiter
