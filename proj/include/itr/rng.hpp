// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace itr {

/// Seedable Gaussian generator on top of mt19937_64. The mt19937_64 stream is
/// pinned by the standard and Box-Muller avoids the implementation-defined
/// std::normal_distribution, so equal seeds give equal draws on every platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform in (0, 1].
    double uniform()
    {
        return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1p-53;
    }

    /// Standard normal.
    double gaussian()
    {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u = uniform();
        const double v = uniform();
        const double r = std::sqrt(-2.0 * std::log(u));
        const double t = 2.0 * std::numbers::pi * v;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    std::complex<double> cgaussian(double variance)
    {
        const double s = std::sqrt(variance / 2.0);
        const double re = s * gaussian();
        const double im = s * gaussian();
        return {re, im};
    }

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace itr
