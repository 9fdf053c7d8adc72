#pragma once

// Subdomains X of the unit disk: membership, Riemann map pairs for the simply
// connected entries, the intrinsic metric rho_X, inradius and deep points.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "core.hpp"
#include "stretch.hpp"

namespace hypiter {

/// Isolated complement points laid out on concentric circles with uniform
/// angular spacing, plus an optional point at the origin.
class PunctureRings {
  public:
    struct Ring {
        double radius;  // Euclidean
        std::size_t count;
        double phase;
    };

    PunctureRings() = default;
    PunctureRings(std::vector<Ring> rings, bool origin) : rings_(std::move(rings)), origin_(origin) {}

    [[nodiscard]] const std::vector<Ring>& rings() const { return rings_; }
    [[nodiscard]] bool has_origin() const { return origin_; }

    [[nodiscard]] std::size_t size() const {
        std::size_t n = origin_ ? 1 : 0;
        for (const auto& r : rings_) n += r.count;
        return n;
    }

    [[nodiscard]] std::vector<Complex> points() const {
        std::vector<Complex> out;
        out.reserve(size());
        if (origin_) out.emplace_back(0.0, 0.0);
        for (const auto& r : rings_) {
            for (std::size_t j = 0; j < r.count; ++j) out.push_back(point(r, j));
        }
        return out;
    }

    /// min over punctures of rho(a, p). On a fixed circle rho(a, .) grows with
    /// the angular offset, so only the angularly nearest point per ring matters.
    [[nodiscard]] double nearest_distance(Complex a) const {
        double best = std::numeric_limits<double>::infinity();
        if (origin_) best = rho0(a);
        const double alpha = std::arg(a);
        for (const auto& r : rings_) {
            const double step = detail::two_pi<double> / static_cast<double>(r.count);
            const double k = std::floor((alpha - r.phase) / step);
            for (double j : {k, k + 1.0}) {
                best = std::min(best, rho(a, std::polar(r.radius, r.phase + j * step)));
            }
        }
        return best;
    }

    template <class RadiusMap>
    [[nodiscard]] PunctureRings mapped(RadiusMap&& f) const {
        std::vector<Ring> out;
        out.reserve(rings_.size());
        for (const auto& r : rings_) out.push_back({f(r.radius), r.count, r.phase});
        return {std::move(out), origin_};
    }

  private:
    static Complex point(const Ring& r, std::size_t j) {
        return std::polar(r.radius, r.phase + detail::two_pi<double> * static_cast<double>(j) /
                                                  static_cast<double>(r.count));
    }

    std::vector<Ring> rings_;
    bool origin_ = false;
};

class Domain;

struct InradiusOptions {
    int directions = 64;
    double step = 0.05;       // rho-units per march step
    double max_radius = 18.0; // rays that never leave X within this are unbounded
    double tolerance = 1e-9;
    int refine_iterations = 40;
};

inline double numeric_inradius(const Domain& x, DiskPoint a, const InradiusOptions& options = {});

/// A subdomain X of the unit disk.
class Domain {
  public:
    virtual ~Domain() = default;

    /// Grammar string (`disk(...)`, `horodisk(...)`, `rdense(...)`) or a
    /// description for derived domains.
    [[nodiscard]] virtual std::string describe() const = 0;

    [[nodiscard]] virtual bool contains(Complex z) const = 0;

    [[nodiscard]] virtual bool relatively_compact() const = 0;
    [[nodiscard]] virtual bool expected_bloch() const = 0;

    /// Whether Delta \ X has interior points (so boundary rays must be
    /// marched); isolated complement points are reported through punctures().
    [[nodiscard]] virtual bool complement_has_interior() const = 0;
    [[nodiscard]] virtual const PunctureRings* punctures() const { return nullptr; }

    /// Centers where an inradius value is meaningful for Bloch-radius claims.
    [[nodiscard]] virtual bool valid_center(Complex) const { return true; }

    /// rho-distance from a to Delta \ X.
    [[nodiscard]] double inradius_at(DiskPoint a) const {
        if (!contains(a)) throw PreconditionError("inradius_at: point is not in " + describe());
        return inradius_unchecked(a);
    }

    [[nodiscard]] virtual bool simply_connected() const { return false; }

    [[nodiscard]] virtual DiskPoint riemann_to(DiskPoint) const {
        throw PreconditionError("no Riemann map for " + describe());
    }
    [[nodiscard]] virtual DiskPoint riemann_from(DiskPoint) const {
        throw PreconditionError("no Riemann map for " + describe());
    }

    /// Intrinsic metric; the Riemann map is an isometry onto (X, rho_X).
    [[nodiscard]] double rho_X(DiskPoint u, DiskPoint v) const {
        if (!contains(u) || !contains(v)) throw PreconditionError("rho_X: points must lie in " + describe());
        return rho(riemann_from(u), riemann_from(v));
    }

    [[nodiscard]] virtual bool has_deep_points() const { return false; }

    /// A point with inradius >= t, moving monotonically toward the circle.
    [[nodiscard]] virtual DiskPoint deep_point(double) const {
        throw PreconditionError("deep_point: " + describe() + " is a Bloch entry without deep points");
    }

  protected:
    [[nodiscard]] virtual double inradius_unchecked(DiskPoint a) const { return numeric_inradius(*this, a); }
};

using DomainPtr = std::shared_ptr<const Domain>;

/// Euclidean disk |z - center| < radius whose closure lies in Delta.
class EuclideanSubdisk final : public Domain {
  public:
    EuclideanSubdisk(Complex center, double radius)
        : center_(center), radius_(radius), hyperbolic_(euclid_to_hyp(center, radius)) {}

    [[nodiscard]] Complex center() const { return center_; }
    [[nodiscard]] double radius() const { return radius_; }
    [[nodiscard]] const HyperbolicDisk& as_hyperbolic() const { return hyperbolic_; }

    [[nodiscard]] std::string describe() const override {
        return "disk(" + fmt(center_.real()) + "," + fmt(center_.imag()) + "," + fmt(radius_) + ")";
    }
    [[nodiscard]] bool contains(Complex z) const override { return std::abs(z - center_) < radius_; }
    [[nodiscard]] bool relatively_compact() const override { return true; }
    [[nodiscard]] bool expected_bloch() const override { return true; }
    [[nodiscard]] bool complement_has_interior() const override { return true; }
    [[nodiscard]] bool simply_connected() const override { return true; }

    [[nodiscard]] DiskPoint riemann_to(DiskPoint u) const override { return center_ + radius_ * u.value(); }
    [[nodiscard]] DiskPoint riemann_from(DiskPoint x) const override { return (x.value() - center_) / radius_; }

  protected:
    // Every Euclidean disk inside Delta is a hyperbolic disk.
    [[nodiscard]] double inradius_unchecked(DiskPoint a) const override {
        return std::max(0.0, hyperbolic_.radius - rho(hyperbolic_.center, a));
    }

  private:
    static std::string fmt(double v) {
        char buf[32];
        auto res = std::to_chars(buf, buf + sizeof buf, v);
        return {buf, res.ptr};
    }

    Complex center_;
    double radius_;
    HyperbolicDisk hyperbolic_;
};

/// Euclidean disk of radius s internally tangent to the circle at xi = e^{i angle}.
class Horodisk final : public Domain {
  public:
    Horodisk(double angle, double s) : angle_(angle), s_(s), xi_(std::polar(1.0, angle)) {
        if (!(s > 0 && s < 1)) throw PreconditionError("horodisk: Euclidean radius must lie in (0, 1)");
    }

    [[nodiscard]] Complex tangency() const { return xi_; }
    [[nodiscard]] double euclidean_radius() const { return s_; }
    [[nodiscard]] DiskPoint anchor() const { return (1.0 - s_) * xi_; }

    [[nodiscard]] std::string describe() const override {
        char buf[64];
        auto p = std::to_chars(buf, buf + 30, angle_).ptr;
        *p++ = ',';
        p = std::to_chars(p, buf + sizeof buf, s_).ptr;
        return "horodisk(" + std::string(buf, p) + ")";
    }
    [[nodiscard]] bool contains(Complex z) const override { return std::abs(z - (1.0 - s_) * xi_) < s_; }
    [[nodiscard]] bool relatively_compact() const override { return false; }
    [[nodiscard]] bool expected_bloch() const override { return false; }
    [[nodiscard]] bool complement_has_interior() const override { return true; }
    [[nodiscard]] bool simply_connected() const override { return true; }

    [[nodiscard]] DiskPoint riemann_to(DiskPoint u) const override { return xi_ * ((1.0 - s_) + s_ * u.value()); }
    [[nodiscard]] DiskPoint riemann_from(DiskPoint x) const override {
        return (std::conj(xi_) * x.value() - (1.0 - s_)) / s_;
    }

    [[nodiscard]] bool has_deep_points() const override { return true; }

    /// Points x xi on the geodesic from the anchor toward the tangency point.
    [[nodiscard]] DiskPoint deep_point(double t) const override {
        if (!(t >= 0)) throw PreconditionError("deep_point: depth must be nonnegative");
        const DiskPoint a = anchor();
        if (t <= inradius_unchecked(a)) return a;
        // inradius(x xi) = artanh(x) - artanh(1 - 2s) on this geodesic.
        const double x = std::tanh(t + 1e-9 + 0.5 * std::log((1.0 - s_) / s_));
        if (1.0 - x < 1e-14) {
            throw NumericError("deep_point: depth " + std::to_string(t) + " is beyond double precision");
        }
        return x * xi_;
    }

  protected:
    // Horocycles are level sets of the Poisson kernel P(a, xi); the rho-distance
    // between two of them is half the log of the kernel ratio.
    [[nodiscard]] double inradius_unchecked(DiskPoint a) const override {
        const double poisson = detail::one_minus_abs2(a.value()) / std::norm(xi_ - a.value());
        return std::max(0.0, 0.5 * std::log(poisson * s_ / (1.0 - s_)));
    }

  private:
    double angle_;
    double s_;
    Complex xi_;
};

/// Delta minus an R-net of punctures on the hyperbolic circles of radii
/// R, 2R, ... (covering rho(0, z) <= depth) and the origin.
class RDenseComplement final : public Domain {
  public:
    RDenseComplement(double mesh, double depth) : mesh_(mesh), depth_(depth) {
        if (!(mesh > 0) || !(depth > 0)) throw PreconditionError("rdense: mesh and depth must be positive");
        const auto ring_count = static_cast<std::size_t>(std::ceil(depth / mesh - 1e-12));
        if (static_cast<double>(ring_count) * mesh > 17.0) {
            throw PreconditionError("rdense: net depth exceeds double precision range");
        }
        std::vector<PunctureRings::Ring> rings;
        for (std::size_t k = 1; k <= ring_count; ++k) {
            const double t = std::tanh(static_cast<double>(k) * mesh);
            // Adjacent punctures on the circle are within `mesh` of each other, so
            // any point is within mesh/2 radially plus mesh/2 along the circle.
            const double half_gap = std::sinh(mesh / 2) * (1.0 - t) * (1.0 + t) / (2.0 * t);
            std::size_t count = 1;
            if (half_gap < 1.0) {
                const double alpha = 2.0 * std::asin(half_gap);
                count = static_cast<std::size_t>(std::ceil(std::numbers::pi / alpha));
            }
            rings.push_back({t, std::max<std::size_t>(count, 1), 0.0});
        }
        punctures_ = PunctureRings(std::move(rings), true);
    }

    [[nodiscard]] double mesh() const { return mesh_; }
    [[nodiscard]] double depth() const { return depth_; }

    [[nodiscard]] std::string describe() const override {
        char buf[64];
        auto p = std::to_chars(buf, buf + 30, mesh_).ptr;
        *p++ = ',';
        p = std::to_chars(p, buf + sizeof buf, depth_).ptr;
        return "rdense(" + std::string(buf, p) + ")";
    }
    [[nodiscard]] bool contains(Complex z) const override {
        return std::abs(z) < 1.0 && punctures_.nearest_distance(z) > 1e-12;
    }
    [[nodiscard]] bool relatively_compact() const override { return false; }
    [[nodiscard]] bool expected_bloch() const override { return true; }
    [[nodiscard]] bool complement_has_interior() const override { return false; }
    [[nodiscard]] const PunctureRings* punctures() const override { return &punctures_; }
    [[nodiscard]] bool valid_center(Complex a) const override { return rho0(a) <= depth_ - mesh_; }

  protected:
    [[nodiscard]] double inradius_unchecked(DiskPoint a) const override { return punctures_.nearest_distance(a); }

  private:
    double mesh_;
    double depth_;
    PunctureRings punctures_;
};

/// f(X) for a radial stretch f; membership is tested through f^{-1}.
class StretchedDomain final : public Domain {
  public:
    StretchedDomain(DomainPtr source, RadialStretch stretch) : source_(std::move(source)), stretch_(stretch) {
        if (!source_) throw PreconditionError("StretchedDomain: null source");
        if (const auto* p = source_->punctures()) {
            punctures_ = p->mapped([this](double t) { return stretch_.apply_modulus(t); });
        }
    }

    [[nodiscard]] const Domain& source() const { return *source_; }
    [[nodiscard]] const RadialStretch& stretch() const { return stretch_; }

    [[nodiscard]] std::string describe() const override {
        return "stretch(" + std::to_string(stretch_.k()) + "," + source_->describe() + ")";
    }
    [[nodiscard]] bool contains(Complex z) const override {
        return std::abs(z) < 1.0 && source_->contains(stretch_.inverse(z));
    }
    [[nodiscard]] bool relatively_compact() const override { return source_->relatively_compact(); }
    [[nodiscard]] bool expected_bloch() const override { return source_->expected_bloch(); }
    [[nodiscard]] bool complement_has_interior() const override { return source_->complement_has_interior(); }
    [[nodiscard]] const PunctureRings* punctures() const override {
        return source_->punctures() ? &punctures_ : nullptr;
    }
    [[nodiscard]] bool valid_center(Complex z) const override { return source_->valid_center(stretch_.inverse(z)); }

  protected:
    // K = 1 is the identity, which preserves rho exactly.
    [[nodiscard]] double inradius_unchecked(DiskPoint a) const override {
        if (stretch_.is_identity()) return source_->inradius_at(a);
        return numeric_inradius(*this, a);
    }

  private:
    DomainPtr source_;
    RadialStretch stretch_;
    PunctureRings punctures_;
};

/// m(X) for a disk automorphism m; every query is transported through m^{-1}.
class MobiusImage final : public Domain {
  public:
    MobiusImage(DomainPtr source, MobiusAut m) : source_(std::move(source)), map_(m), inverse_(mobius_invert(m)) {
        if (!source_) throw PreconditionError("MobiusImage: null source");
    }

    [[nodiscard]] std::string describe() const override { return "mobius_image(" + source_->describe() + ")"; }
    [[nodiscard]] bool contains(Complex z) const override {
        return DiskPoint::admissible(z) && source_->contains(inverse_.apply(z));
    }
    [[nodiscard]] bool relatively_compact() const override { return source_->relatively_compact(); }
    [[nodiscard]] bool expected_bloch() const override { return source_->expected_bloch(); }
    [[nodiscard]] bool complement_has_interior() const override { return source_->complement_has_interior(); }
    [[nodiscard]] bool valid_center(Complex z) const override {
        return DiskPoint::admissible(z) && source_->valid_center(inverse_.apply(z));
    }
    [[nodiscard]] bool simply_connected() const override { return source_->simply_connected(); }
    [[nodiscard]] DiskPoint riemann_to(DiskPoint u) const override { return map_(source_->riemann_to(u)); }
    [[nodiscard]] DiskPoint riemann_from(DiskPoint x) const override { return source_->riemann_from(inverse_(x)); }
    [[nodiscard]] bool has_deep_points() const override { return source_->has_deep_points(); }
    [[nodiscard]] DiskPoint deep_point(double t) const override { return map_(source_->deep_point(t)); }

  protected:
    [[nodiscard]] double inradius_unchecked(DiskPoint a) const override { return source_->inradius_at(inverse_(a)); }

  private:
    DomainPtr source_;
    MobiusAut map_;
    MobiusAut inverse_;
};

// ---------------------------------------------------------------------------

namespace detail {

// First rho-radius along the ray from a in direction phi (measured in the frame
// sending a to 0) where the point leaves X; +inf if it never does before cap.
inline double exit_radius(const Domain& x, const MobiusAut& from_origin, double phi, double cap,
                          const InradiusOptions& opt) {
    const Complex dir = std::polar(1.0, phi);
    const double limit = std::min(cap, opt.max_radius);
    double inside = 0.0;
    for (double r = opt.step;; r += opt.step) {
        const double rr = std::min(r, limit);
        const Complex z = from_origin.apply(std::tanh(rr) * dir);
        if (!DiskPoint::admissible(z)) return std::numeric_limits<double>::infinity();
        if (!x.contains(z)) {
            double lo = inside, hi = rr;
            while (hi - lo > opt.tolerance) {
                const double mid = 0.5 * (lo + hi);
                (x.contains(from_origin.apply(std::tanh(mid) * dir)) ? lo : hi) = mid;
            }
            return hi;
        }
        inside = rr;
        if (rr >= limit) return std::numeric_limits<double>::infinity();
    }
}

}  // namespace detail

/// rho-distance from a to the complement: nearest isolated complement point,
/// and for complements with interior, ray marching with bisection to the first
/// exit followed by golden-section refinement of the best direction.
inline double numeric_inradius(const Domain& x, DiskPoint a, const InradiusOptions& opt) {
    double best = std::numeric_limits<double>::infinity();
    if (const auto* p = x.punctures()) best = p->nearest_distance(a);
    if (!x.complement_has_interior()) return best;

    const MobiusAut from_origin = mobius_invert(MobiusAut(a, 0.0));
    const double spacing = detail::two_pi<double> / opt.directions;
    int best_dir = -1;
    for (int j = 0; j < opt.directions; ++j) {
        const double r = detail::exit_radius(x, from_origin, j * spacing, best, opt);
        if (r < best) {
            best = r;
            best_dir = j;
        }
    }
    if (best_dir < 0) return best;

    const auto exit_at = [&](double phi) {
        return detail::exit_radius(x, from_origin, phi, std::numeric_limits<double>::infinity(), opt);
    };
    constexpr double inv_phi = 0.6180339887498949;
    double lo = (best_dir - 1) * spacing, hi = (best_dir + 1) * spacing;
    double c = hi - inv_phi * (hi - lo), d = lo + inv_phi * (hi - lo);
    double fc = exit_at(c), fd = exit_at(d);
    for (int it = 0; it < opt.refine_iterations; ++it) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = exit_at(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = exit_at(d);
        }
        best = std::min({best, fc, fd});
    }
    return best;
}

// ---------------------------------------------------------------------------
// Domain grammar: disk(cx,cy,r) | horodisk(angle,s) | rdense(R,depth)

namespace detail {

class SpecCursor {
  public:
    explicit SpecCursor(std::string_view text) : text_(text) {}

    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
    }

    std::string_view identifier() {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        if (start == pos_) fail("expected a name");
        return text_.substr(start, pos_ - start);
    }

    void expect(char c) {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    double number() {
        skip_ws();
        std::size_t start = pos_;
        if (pos_ < text_.size() && text_[pos_] == '+') ++start, ++pos_;
        double v = 0;
        auto res = std::from_chars(text_.data() + start, text_.data() + text_.size(), v);
        if (res.ec != std::errc()) fail("expected a number");
        pos_ = static_cast<std::size_t>(res.ptr - text_.data());
        return v;
    }

    std::vector<double> numbers() {
        expect('(');
        std::vector<double> out;
        if (accept(')')) return out;
        do {
            out.push_back(number());
        } while (accept(','));
        expect(')');
        return out;
    }

    /// Raw text of a balanced parenthesised argument list, without the parens.
    std::string_view nested() {
        expect('(');
        const std::size_t start = pos_;
        int depth = 1;
        while (pos_ < text_.size() && depth > 0) {
            if (text_[pos_] == '(') ++depth;
            if (text_[pos_] == ')') --depth;
            ++pos_;
        }
        if (depth != 0) fail("unbalanced parentheses");
        return text_.substr(start, pos_ - 1 - start);
    }

    [[nodiscard]] bool at_end() {
        skip_ws();
        return pos_ >= text_.size();
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw PreconditionError("spec '" + std::string(text_) + "' at offset " + std::to_string(pos_) + ": " + what);
    }

  private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline DomainPtr parse_domain(std::string_view text) {
    detail::SpecCursor cur(text);
    const std::string name(cur.identifier());
    const auto args = cur.numbers();
    if (!cur.at_end()) cur.fail("trailing characters");
    const auto arity = [&](std::size_t n) {
        if (args.size() != n) cur.fail(name + " takes " + std::to_string(n) + " arguments");
    };
    if (name == "disk") {
        arity(3);
        return std::make_shared<EuclideanSubdisk>(Complex(args[0], args[1]), args[2]);
    }
    if (name == "horodisk") {
        arity(2);
        return std::make_shared<Horodisk>(args[0], args[1]);
    }
    if (name == "rdense") {
        arity(2);
        return std::make_shared<RDenseComplement>(args[0], args[1]);
    }
    cur.fail("unknown domain '" + name + "'");
}

}  // namespace hypiter
