// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace itr::signals {

using cplx = std::complex<double>;

/// Finite complex-valued discrete-time signal with an explicit integer start
/// offset. Samples outside [start, start+length) are implicitly zero, so
/// negative indices are fine. Immutable after construction.
class ComplexSequence {
  public:
    ComplexSequence() = default; // canonical empty: start 0, length 0

    ComplexSequence(long start, std::vector<cplx> taps)
        : start_(taps.empty() ? 0 : start), taps_(std::move(taps))
    {
    }

    static ComplexSequence delta(long pos, cplx value = 1.0)
    {
        return ComplexSequence(pos, {value});
    }

    bool empty() const { return taps_.empty(); }
    long start() const { return start_; }
    long length() const { return static_cast<long>(taps_.size()); }
    long end() const { return start_ + length(); } // one past last index

    /// Sample at absolute index k, zero outside the support.
    cplx at(long k) const
    {
        long j = k - start_;
        if (j < 0 || j >= length())
            return {0.0, 0.0};
        return taps_[static_cast<std::size_t>(j)];
    }

    std::span<const cplx> taps() const { return taps_; }

  private:
    long start_ = 0;
    std::vector<cplx> taps_;
};

/// result[k] = sum_j a[j] * b[k-j]; empty if either operand is empty.
ComplexSequence convolve(const ComplexSequence& a, const ComplexSequence& b);

/// result[tau] = sum_k a[k] * conj(b[k-tau]), so crosscorr(a,a)[0] = energy(a).
ComplexSequence crosscorr(const ComplexSequence& a, const ComplexSequence& b);

/// sum |a[k]|^2
double energy(const ComplexSequence& a);

/// result[k] = acc[k] + c * b[k - shift]
ComplexSequence accumulate_shifted(const ComplexSequence& acc, cplx c, long shift,
                                   const ComplexSequence& b);

/// Absolute index and value of the largest-magnitude sample; ties broken by
/// smallest index. Throws std::invalid_argument on an empty sequence.
std::pair<long, cplx> peak(const ComplexSequence& a);

/// result[k] = conj(a[pivot - k])
ComplexSequence time_reverse_conj(const ComplexSequence& a, long pivot);

ComplexSequence scale(const ComplexSequence& a, cplx c);

/// Max absolute sample difference over the union of supports.
double max_abs_diff(const ComplexSequence& a, const ComplexSequence& b);

/// Value equality under zero padding.
bool approx_equal(const ComplexSequence& a, const ComplexSequence& b,
                  double tol = 1e-12);

} // namespace itr::signals
