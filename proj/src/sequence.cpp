// SPDX-License-Identifier: Apache-2.0
#include "itr/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace itr::signals {

ComplexSequence convolve(const ComplexSequence& a, const ComplexSequence& b)
{
    if (a.empty() || b.empty())
        return {};
    const long n = a.length() + b.length() - 1;
    std::vector<cplx> out(static_cast<std::size_t>(n), cplx{0.0, 0.0});
    auto ta = a.taps();
    auto tb = b.taps();
    for (long i = 0; i < a.length(); ++i)
        for (long j = 0; j < b.length(); ++j)
            out[static_cast<std::size_t>(i + j)] +=
                ta[static_cast<std::size_t>(i)] * tb[static_cast<std::size_t>(j)];
    return {a.start() + b.start(), std::move(out)};
}

ComplexSequence crosscorr(const ComplexSequence& a, const ComplexSequence& b)
{
    if (a.empty() || b.empty())
        return {};
    // tau ranges over [a.start - (b.end()-1), a.end()-1 - b.start]
    const long tau0 = a.start() - (b.end() - 1);
    const long n = a.length() + b.length() - 1;
    std::vector<cplx> out(static_cast<std::size_t>(n), cplx{0.0, 0.0});
    auto ta = a.taps();
    auto tb = b.taps();
    for (long i = 0; i < a.length(); ++i)
        for (long j = 0; j < b.length(); ++j) {
            // k = a.start+i, k-tau = b.start+j  =>  tau = a.start+i - b.start-j
            const long tau = a.start() + i - b.start() - j;
            out[static_cast<std::size_t>(tau - tau0)] +=
                ta[static_cast<std::size_t>(i)] *
                std::conj(tb[static_cast<std::size_t>(j)]);
        }
    return {tau0, std::move(out)};
}

double energy(const ComplexSequence& a)
{
    double e = 0.0;
    for (const auto& v : a.taps())
        e += std::norm(v);
    return e;
}

ComplexSequence accumulate_shifted(const ComplexSequence& acc, cplx c, long shift,
                                   const ComplexSequence& b)
{
    if (b.empty())
        return acc;
    const long bs = b.start() + shift;
    const long be = b.end() + shift;
    const long lo = acc.empty() ? bs : std::min(acc.start(), bs);
    const long hi = acc.empty() ? be : std::max(acc.end(), be);
    std::vector<cplx> out(static_cast<std::size_t>(hi - lo), cplx{0.0, 0.0});
    for (long k = acc.start(); k < acc.end(); ++k)
        out[static_cast<std::size_t>(k - lo)] = acc.at(k);
    auto tb = b.taps();
    for (long j = 0; j < b.length(); ++j)
        out[static_cast<std::size_t>(b.start() + shift + j - lo)] +=
            c * tb[static_cast<std::size_t>(j)];
    return {lo, std::move(out)};
}

std::pair<long, cplx> peak(const ComplexSequence& a)
{
    if (a.empty())
        throw std::invalid_argument("peak: empty sequence");
    long best = a.start();
    double mag = -1.0;
    for (long k = a.start(); k < a.end(); ++k) {
        const double m = std::abs(a.at(k));
        if (m > mag) {
            mag = m;
            best = k;
        }
    }
    return {best, a.at(best)};
}

ComplexSequence time_reverse_conj(const ComplexSequence& a, long pivot)
{
    if (a.empty())
        return {};
    // result[k] = conj(a[pivot-k]); support [pivot-(a.end()-1), pivot-a.start]
    const long rs = pivot - (a.end() - 1);
    std::vector<cplx> out(static_cast<std::size_t>(a.length()));
    auto ta = a.taps();
    for (long j = 0; j < a.length(); ++j)
        out[static_cast<std::size_t>(j)] =
            std::conj(ta[static_cast<std::size_t>(a.length() - 1 - j)]);
    return {rs, std::move(out)};
}

ComplexSequence scale(const ComplexSequence& a, cplx c)
{
    std::vector<cplx> out(a.taps().begin(), a.taps().end());
    for (auto& v : out)
        v *= c;
    return {a.start(), std::move(out)};
}

double max_abs_diff(const ComplexSequence& a, const ComplexSequence& b)
{
    if (a.empty() && b.empty())
        return 0.0;
    const long lo = std::min(a.empty() ? b.start() : a.start(),
                             b.empty() ? a.start() : b.start());
    const long hi =
        std::max(a.empty() ? b.end() : a.end(), b.empty() ? a.end() : b.end());
    double d = 0.0;
    for (long k = lo; k < hi; ++k)
        d = std::max(d, std::abs(a.at(k) - b.at(k)));
    return d;
}

bool approx_equal(const ComplexSequence& a, const ComplexSequence& b, double tol)
{
    return max_abs_diff(a, b) <= tol;
}

} // namespace itr::signals
