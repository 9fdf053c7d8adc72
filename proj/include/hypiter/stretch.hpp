#pragma once

#include <cmath>
#include <complex>

#include "core.hpp"

namespace hypiter {

/// z -> z |z|^{K-1}: a K-quasiconformal self-homeomorphism of the disk fixing 0.
class RadialStretch {
  public:
    explicit RadialStretch(double k) : k_(k) {
        if (!(k >= 1) || !std::isfinite(k)) throw PreconditionError("RadialStretch: K must be a finite value >= 1");
    }

    [[nodiscard]] double k() const { return k_; }
    [[nodiscard]] bool is_identity() const { return k_ == 1.0; }

    [[nodiscard]] Complex apply(Complex z) const { return scale(z, k_ - 1.0); }
    [[nodiscard]] Complex inverse(Complex z) const { return scale(z, 1.0 / k_ - 1.0); }

    /// Image of the circle |z| = t.
    [[nodiscard]] double apply_modulus(double t) const { return std::pow(t, k_); }

  private:
    static Complex scale(Complex z, double exponent) {
        const double m = std::abs(z);
        if (m == 0.0) return z;
        return z * std::pow(m, exponent);
    }

    double k_;
};

}  // namespace hypiter
