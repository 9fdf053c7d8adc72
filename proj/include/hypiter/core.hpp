#pragma once

// Exact-formula algebra on the unit disk: the Poincare distance with density
// 1/(1-|z|^2), disk automorphisms, degree-2 Blaschke products and the
// hyperbolic <-> Euclidean description of round disks.

#include <cmath>
#include <complex>
#include <concepts>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hypiter {

/// Caller violated a documented precondition (bad input, unsupported domain).
struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not produce a trustworthy answer.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

template <std::floating_point Real>
constexpr Real two_pi = Real(2) * std::numbers::pi_v<Real>;

template <std::floating_point Real>
Real wrap_angle(Real theta) {
    Real t = std::fmod(theta, two_pi<Real>);
    if (t < 0) t += two_pi<Real>;
    if (t >= two_pi<Real>) t = 0;
    return t;
}

// 1 - |z|^2 without forming |z|^2 first.
template <std::floating_point Real>
Real one_minus_abs2(std::complex<Real> z) {
    const Real m = std::abs(z);
    return (Real(1) - m) * (Real(1) + m);
}

}  // namespace detail

/// Points closer than this (in Euclidean modulus) to the unit circle are not
/// representable as disk points.
template <std::floating_point Real>
inline constexpr Real kBoundaryMargin = Real(1e-15);

/// A complex number of modulus strictly less than one.
template <std::floating_point Real = double>
class BasicDiskPoint {
  public:
    using value_type = std::complex<Real>;

    constexpr BasicDiskPoint() = default;

    BasicDiskPoint(value_type z) : z_(z) {  // NOLINT(google-explicit-constructor)
        if (!admissible(z)) {
            throw PreconditionError("disk point must satisfy |z| < 1 - 1e-15, got (" +
                                    std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")");
        }
    }

    BasicDiskPoint(Real re, Real im = 0) : BasicDiskPoint(value_type(re, im)) {}

    static bool admissible(value_type z) {
        const Real m = std::abs(z);
        return std::isfinite(m) && m < 1 && Real(1) - m >= kBoundaryMargin<Real>;
    }

    [[nodiscard]] value_type value() const { return z_; }
    [[nodiscard]] Real real() const { return z_.real(); }
    [[nodiscard]] Real imag() const { return z_.imag(); }
    [[nodiscard]] Real modulus() const { return std::abs(z_); }

    operator value_type() const { return z_; }  // NOLINT(google-explicit-constructor)

    friend bool operator==(const BasicDiskPoint&, const BasicDiskPoint&) = default;

  private:
    value_type z_{};
};

using DiskPoint = BasicDiskPoint<double>;
using Complex = std::complex<double>;

/// Poincare distance for density 1/(1-|z|^2):
/// artanh|(z-w)/(1-conj(w) z)|, evaluated as asinh(|z-w| / sqrt((1-|z|^2)(1-|w|^2)))
/// so that points near the circle keep full relative accuracy.
template <std::floating_point Real>
Real rho(std::complex<Real> z, std::complex<Real> w) {
    const Real denom = std::sqrt(detail::one_minus_abs2(z) * detail::one_minus_abs2(w));
    return std::asinh(std::abs(z - w) / denom);
}

template <std::floating_point Real>
Real rho(BasicDiskPoint<Real> z, BasicDiskPoint<Real> w) {
    return rho(z.value(), w.value());
}

/// Distance from the origin, artanh|z|.
template <std::floating_point Real>
Real rho0(std::complex<Real> z) {
    return rho(std::complex<Real>(0), z);
}

/// z -> e^{i theta} (z - a) / (1 - conj(a) z).
template <std::floating_point Real = double>
class BasicMobiusAut {
  public:
    using value_type = std::complex<Real>;

    BasicMobiusAut() : BasicMobiusAut(BasicDiskPoint<Real>{}, 0) {}

    BasicMobiusAut(BasicDiskPoint<Real> a, Real theta)
        : a_(a), theta_(detail::wrap_angle(theta)), rotation_(std::polar(Real(1), theta_)) {}

    static BasicMobiusAut identity() { return {}; }

    [[nodiscard]] BasicDiskPoint<Real> a() const { return a_; }
    [[nodiscard]] Real theta() const { return theta_; }
    [[nodiscard]] value_type rotation() const { return rotation_; }

    /// Raw evaluation; defined for every z with conj(a) z != 1.
    [[nodiscard]] value_type apply(value_type z) const {
        const value_type a = a_.value();
        return rotation_ * (z - a) / (Real(1) - std::conj(a) * z);
    }

    BasicDiskPoint<Real> operator()(BasicDiskPoint<Real> z) const { return apply(z.value()); }

    /// Derivative at z.
    [[nodiscard]] value_type derivative(value_type z) const {
        const value_type a = a_.value();
        const value_type d = Real(1) - std::conj(a) * z;
        return rotation_ * detail::one_minus_abs2(a) / (d * d);
    }

  private:
    BasicDiskPoint<Real> a_;
    Real theta_;
    value_type rotation_;
};

using MobiusAut = BasicMobiusAut<double>;

template <std::floating_point Real>
BasicDiskPoint<Real> mobius_apply(const BasicMobiusAut<Real>& m, BasicDiskPoint<Real> z) {
    return m(z);
}

template <std::floating_point Real>
BasicMobiusAut<Real> mobius_invert(const BasicMobiusAut<Real>& m) {
    return {BasicDiskPoint<Real>(-m.rotation() * m.a().value()), -m.theta()};
}

/// outer o inner, i.e. z -> outer(inner(z)).
template <std::floating_point Real>
BasicMobiusAut<Real> mobius_compose(const BasicMobiusAut<Real>& outer, const BasicMobiusAut<Real>& inner) {
    using C = std::complex<Real>;
    // The composite sends inner^{-1}(outer.a) to zero; its rotation is the
    // phase of the chain-rule derivative there.
    const C zero_pre = mobius_invert(inner).apply(outer.a().value());
    const C d = outer.derivative(inner.apply(zero_pre)) * inner.derivative(zero_pre);
    return {BasicDiskPoint<Real>(zero_pre), std::arg(d)};
}

/// An automorphism M with M(p) = q; theta rotates about p before transport.
template <std::floating_point Real>
BasicMobiusAut<Real> mobius_two_point(BasicDiskPoint<Real> p, BasicDiskPoint<Real> q, Real theta) {
    const BasicMobiusAut<Real> to_origin(p, theta);
    const BasicMobiusAut<Real> from_origin = mobius_invert(BasicMobiusAut<Real>(q, 0));
    return mobius_compose(from_origin, to_origin);
}

/// A_a(z) = z (z - a) / (1 - conj(a) z), a != 0.
template <std::floating_point Real = double>
class BasicBlaschke2 {
  public:
    using value_type = std::complex<Real>;

    explicit BasicBlaschke2(BasicDiskPoint<Real> a) : a_(a) {
        if (a.value() == value_type(0)) throw PreconditionError("Blaschke2 requires a != 0");
    }

    [[nodiscard]] BasicDiskPoint<Real> a() const { return a_; }

    [[nodiscard]] value_type apply(value_type z) const {
        const value_type a = a_.value();
        return z * (z - a) / (Real(1) - std::conj(a) * z);
    }

    BasicDiskPoint<Real> operator()(BasicDiskPoint<Real> z) const { return apply(z.value()); }

  private:
    BasicDiskPoint<Real> a_;
};

using Blaschke2 = BasicBlaschke2<double>;

template <std::floating_point Real>
BasicDiskPoint<Real> blaschke2_apply(const BasicBlaschke2<Real>& b, BasicDiskPoint<Real> z) {
    return b(z);
}

template <std::floating_point Real = double>
struct BasicPreimages {
    BasicDiskPoint<Real> z1;  // smaller modulus
    BasicDiskPoint<Real> z2;
};

using Preimages = BasicPreimages<double>;

/// The two solutions of A_a(z) = c, i.e. roots of z^2 - (a - conj(a) c) z - c = 0.
/// Requires c != 0 and rho(0, c) < 1. The larger root is formed directly and the
/// smaller one recovered from z1 z2 = -c.
template <std::floating_point Real>
BasicPreimages<Real> blaschke2_preimages(const BasicBlaschke2<Real>& b, BasicDiskPoint<Real> c) {
    using C = std::complex<Real>;
    const C cv = c.value();
    if (cv == C(0)) throw PreconditionError("blaschke2_preimages: c must be nonzero");
    if (!(rho0(cv) < Real(1))) throw PreconditionError("blaschke2_preimages: requires rho(0, c) < 1");

    const C a = b.a().value();
    const C lin = a - std::conj(a) * cv;
    const C root = std::sqrt(lin * lin + Real(4) * cv);
    const C big = std::real(std::conj(lin) * root) >= 0 ? (lin + root) / Real(2) : (lin - root) / Real(2);
    const C small = -cv / big;
    if (std::abs(std::abs(big) - std::abs(small)) <= Real(1e-14)) {
        throw NumericError("blaschke2_preimages: roots have equal modulus, ordering is ambiguous");
    }
    return {BasicDiskPoint<Real>(small), BasicDiskPoint<Real>(big)};
}

template <std::floating_point Real = double>
struct BasicHyperbolicDisk {
    BasicDiskPoint<Real> center;
    Real radius = 0;  // rho-units
};

template <std::floating_point Real = double>
struct BasicEuclideanDisk {
    std::complex<Real> center;
    Real radius = 0;
};

using HyperbolicDisk = BasicHyperbolicDisk<double>;
using EuclideanDisk = BasicEuclideanDisk<double>;

template <std::floating_point Real>
BasicEuclideanDisk<Real> hyp_to_euclid(const BasicHyperbolicDisk<Real>& d) {
    if (!(d.radius >= 0)) throw PreconditionError("hyp_to_euclid: radius must be nonnegative");
    const std::complex<Real> h = d.center.value();
    const Real t = std::tanh(d.radius);
    const Real h2 = std::norm(h);
    const Real denom = Real(1) - h2 * t * t;
    return {h * ((Real(1) - t) * (Real(1) + t) / denom), t * detail::one_minus_abs2(h) / denom};
}

template <std::floating_point Real>
BasicHyperbolicDisk<Real> euclid_to_hyp(std::complex<Real> center, Real radius) {
    const Real m = std::abs(center);
    if (!(radius > 0) || !(m + radius < 1) || Real(1) - (m + radius) < kBoundaryMargin<Real>) {
        throw PreconditionError("euclid_to_hyp: closure of the Euclidean disk must lie inside the unit disk");
    }
    // Diameter endpoints on the ray through the center; the hyperbolic center is
    // their midpoint along that geodesic.
    const Real lo = std::atanh(m - radius);
    const Real hi = std::atanh(m + radius);
    const std::complex<Real> dir = m > 0 ? center / m : std::complex<Real>(1);
    return {BasicDiskPoint<Real>(dir * std::tanh((lo + hi) / 2)), (hi - lo) / 2};
}

template <std::floating_point Real>
BasicHyperbolicDisk<Real> euclid_to_hyp(const BasicEuclideanDisk<Real>& d) {
    return euclid_to_hyp(d.center, d.radius);
}

}  // namespace hypiter
