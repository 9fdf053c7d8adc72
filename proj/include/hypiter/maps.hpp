#pragma once

// Maps Delta -> X as chains of primitive pieces applied in order.

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "core.hpp"
#include "domain.hpp"
#include "stretch.hpp"

namespace hypiter {

/// z -> scale z + shift with |scale| + |shift| <= 1, a self-map of the disk.
struct Affine {
    Complex scale;
    Complex shift;
};

/// z -> z^k, k >= 1.
struct Power {
    int k;
};

struct RiemannTo {
    DomainPtr domain;
};

struct RiemannFrom {
    DomainPtr domain;
};

using Piece = std::variant<MobiusAut, Blaschke2, Affine, Power, RiemannTo, RiemannFrom, RadialStretch>;

/// Intermediate values with 1 - |z| below this abort the orbit.
inline constexpr double kOrbitGuard = 1e-14;

namespace detail {

inline bool guarded(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()) && 1.0 - std::abs(z) >= kOrbitGuard; }

inline std::optional<Complex> apply_piece(const Piece& piece, Complex z) {
    return std::visit(
        [z](const auto& p) -> std::optional<Complex> {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, MobiusAut> || std::is_same_v<T, Blaschke2>) {
                return p.apply(z);
            } else if constexpr (std::is_same_v<T, Affine>) {
                return p.scale * z + p.shift;
            } else if constexpr (std::is_same_v<T, Power>) {
                Complex out = z;
                for (int i = 1; i < p.k; ++i) out *= z;
                return out;
            } else if constexpr (std::is_same_v<T, RiemannTo>) {
                return p.domain->riemann_to(DiskPoint(z)).value();
            } else if constexpr (std::is_same_v<T, RiemannFrom>) {
                if (!p.domain->contains(z)) return std::nullopt;
                return p.domain->riemann_from(DiskPoint(z)).value();
            } else {
                return p.apply(z);
            }
        },
        piece);
}

inline void validate_piece(const Piece& piece) {
    if (const auto* a = std::get_if<Affine>(&piece)) {
        if (!(std::abs(a->scale) + std::abs(a->shift) <= 1.0 + 1e-15)) {
            throw PreconditionError("affine piece must satisfy |scale| + |shift| <= 1");
        }
    } else if (const auto* p = std::get_if<Power>(&piece)) {
        if (p->k < 1) throw PreconditionError("power piece requires k >= 1");
    } else if (const auto* r = std::get_if<RiemannTo>(&piece)) {
        if (!r->domain || !r->domain->simply_connected()) throw PreconditionError("riemann_to needs a simply connected domain");
    } else if (const auto* r = std::get_if<RiemannFrom>(&piece)) {
        if (!r->domain || !r->domain->simply_connected()) throw PreconditionError("riemann_from needs a simply connected domain");
    }
}

}  // namespace detail

class MapDescriptor {
  public:
    MapDescriptor() = default;

    /// `target` may be null, meaning the whole disk. Holomorphic chains are
    /// checked on a fixed sample set to land in the target.
    explicit MapDescriptor(std::vector<Piece> chain, DomainPtr target = nullptr)
        : chain_(std::move(chain)), target_(std::move(target)) {
        for (const auto& p : chain_) detail::validate_piece(p);
        const bool starts_in_x = !chain_.empty() && std::holds_alternative<RiemannFrom>(chain_.front());
        for (int i = 0; i < 64; ++i) {
            // sunflower sample of {rho(0, z) <= 3}
            const double r = std::tanh(3.0 * std::sqrt((i + 0.5) / 64.0));
            const Complex z = std::polar(r, 2.399963229728653 * i);
            const auto w = try_apply(z);
            if (!w) {
                if (starts_in_x) continue;
                throw PreconditionError("map chain leaves the disk on a sample point");
            }
            if (target_ && !target_->contains(*w)) {
                throw PreconditionError("map chain does not land in " + target_->describe());
            }
        }
    }

    [[nodiscard]] const std::vector<Piece>& chain() const { return chain_; }
    [[nodiscard]] const DomainPtr& target() const { return target_; }

    [[nodiscard]] bool holomorphic() const {
        for (const auto& p : chain_) {
            if (std::holds_alternative<RadialStretch>(p)) return false;
        }
        return true;
    }

    [[nodiscard]] bool is_single_automorphism() const {
        return chain_.size() == 1 && std::holds_alternative<MobiusAut>(chain_.front());
    }

    /// Applies the chain front to back; nullopt if any intermediate value comes
    /// within kOrbitGuard of the circle.
    [[nodiscard]] std::optional<Complex> try_apply(Complex z) const {
        if (!detail::guarded(z)) return std::nullopt;
        for (const auto& p : chain_) {
            const auto next = detail::apply_piece(p, z);
            if (!next || !detail::guarded(*next)) return std::nullopt;
            z = *next;
        }
        return z;
    }

    DiskPoint operator()(DiskPoint z) const {
        const auto w = try_apply(z);
        if (!w) throw NumericError("map evaluation hit the boundary guard");
        return *w;
    }

  private:
    std::vector<Piece> chain_;
    DomainPtr target_;
};

/// Riemann map of X precomposed with the automorphism sending u0 to
/// riemann_from(x0); theta is the rotation freedom about u0.
inline MapDescriptor covering_with_basepoint(const DomainPtr& x, DiskPoint u0, DiskPoint x0, double theta) {
    if (!x || !x->simply_connected()) throw PreconditionError("covering_with_basepoint: domain has no Riemann map");
    if (!x->contains(x0)) throw PreconditionError("covering_with_basepoint: basepoint image is not in the domain");
    return MapDescriptor({mobius_two_point(u0, x->riemann_from(x0), theta), RiemannTo{x}}, x);
}

/// Map grammar: pieces separated by ';', applied left to right.
///   mobius(are,aim,theta) blaschke(are,aim) affine(s,b) affine(sre,sim,bre,bim)
///   power(k) stretch(K) riemann_to(<domain>) riemann_from(<domain>)
inline MapDescriptor parse_map(std::string_view text) {
    std::vector<Piece> chain;
    DomainPtr target;  // set when the chain ends in riemann_to
    std::size_t start = 0;
    int depth = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i < text.size() && text[i] == '(') ++depth;
        if (i < text.size() && text[i] == ')') --depth;
        if (i < text.size() && (text[i] != ';' || depth != 0)) continue;
        detail::SpecCursor cur(text.substr(start, i - start));
        start = i + 1;
        const std::string name(cur.identifier());
        target = nullptr;
        if (name == "riemann_to" || name == "riemann_from") {
            auto domain = parse_domain(cur.nested());
            if (!cur.at_end()) cur.fail("trailing characters");
            if (name == "riemann_to") {
                chain.emplace_back(RiemannTo{domain});
                target = domain;
            } else {
                chain.emplace_back(RiemannFrom{domain});
            }
            continue;
        }
        const auto args = cur.numbers();
        if (!cur.at_end()) cur.fail("trailing characters");
        const auto need = [&](std::size_t n) {
            if (args.size() != n) cur.fail(name + " takes " + std::to_string(n) + " arguments");
        };
        if (name == "mobius") {
            need(3);
            chain.emplace_back(MobiusAut(DiskPoint(args[0], args[1]), args[2]));
        } else if (name == "blaschke") {
            need(2);
            chain.emplace_back(Blaschke2(DiskPoint(args[0], args[1])));
        } else if (name == "affine") {
            if (args.size() == 2) {
                chain.emplace_back(Affine{Complex(args[0]), Complex(args[1])});
            } else {
                need(4);
                chain.emplace_back(Affine{Complex(args[0], args[1]), Complex(args[2], args[3])});
            }
        } else if (name == "power") {
            need(1);
            if (args[0] != std::floor(args[0])) cur.fail("power takes an integer exponent");
            chain.emplace_back(Power{static_cast<int>(args[0])});
        } else if (name == "stretch") {
            need(1);
            chain.emplace_back(RadialStretch(args[0]));
        } else {
            cur.fail("unknown map piece '" + name + "'");
        }
    }
    if (chain.empty()) throw PreconditionError("empty map chain");
    return MapDescriptor(std::move(chain), std::move(target));
}

}  // namespace hypiter
