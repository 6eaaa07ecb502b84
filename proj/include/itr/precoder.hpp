// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "itr/channel.hpp"
#include "itr/sequence.hpp"

namespace itr::precoder {

using channel::CirSet;
using signals::ComplexSequence;
using signals::cplx;

enum class PrecoderKind { TR, ITRDMA };

struct TraceEntry {
    int iteration;          // n, starting at 0
    int user;               // selected user i_hat
    long lag;               // selected lag tau_hat
    cplx residual;          // residual value before cancellation
    double max_abs_after;   // max |Delta| over the grid after the update
};

/// Residual field Delta_i(tau) over tau in [-(L-1), L-1], plus the iteration
/// trace. Delta is the difference between the current focused field at each
/// user (in lags relative to the focusing tap L-1) and the single-spike target.
class ResidualGrid {
  public:
    ResidualGrid(int n_users, int n_taps);

    int n_users() const { return n_users_; }
    long half_window() const { return half_window_; } // L-1

    cplx at(int user, long lag) const;
    void set(int user, long lag, cplx v);
    void add(int user, long lag, cplx v);

    double max_abs() const;
    /// Argmax of |Delta|, ties broken by smallest lag then smallest user.
    std::pair<int, long> argmax() const;

    std::vector<TraceEntry> trace;

  private:
    int n_users_;
    long half_window_;
    std::vector<cplx> delta_; // user-major, lag-minor (lag + L-1)
};

/// Per-target-user, per-antenna transmit waveforms, energy-normalized across
/// antennas for each target user.
struct PrecoderSet {
    PrecoderKind kind = PrecoderKind::TR;
    int n_users = 0;
    int n_antennas = 0;
    std::vector<std::vector<ComplexSequence>> s; // [target user][antenna]
    std::vector<int> iterations_used;            // per target user
    double epsilon = 0.0;
    int n_max = 0;
};

/// N x N table of R~_{j,i}[tau] = sum_m crosscorr(h~_{j,m}, h~_{i,m})[tau].
/// bank[j][i]; R~_{i,i}[0] = 1.
using CorrelationBank = std::vector<std::vector<ComplexSequence>>;
CorrelationBank normalized_correlation_bank(const CirSet& cirset);

/// Conventional TR: s_{i0,m} = conj-time-reversal of h~_{i0,m} about L-1.
std::vector<ComplexSequence> tr_precoder(const CirSet& cirset, int i0);

struct ItrdmaResult {
    std::vector<ComplexSequence> s; // energy-normalized
    ResidualGrid grid;
    int iterations_used = 0;
};

ItrdmaResult itrdma_precoder(const CirSet& cirset, int i0, double epsilon,
                             int n_max);

/// Observation hook: called with the pre-normalization precoder and residual
/// grid after every iteration (and once with n = 0 before the loop).
using IterationObserver =
    std::function<void(int n, const std::vector<ComplexSequence>& s_prenorm,
                       const ResidualGrid& grid)>;

ItrdmaResult itrdma_precoder_observed(const CirSet& cirset, int i0,
                                      double epsilon, int n_max,
                                      const IterationObserver& observer);

/// Like itrdma_precoder but snapshots the (normalized) precoder at each of the
/// requested iteration counts; checkpoints must be sorted ascending. Runs the
/// loop once up to the largest checkpoint.
std::vector<std::vector<ComplexSequence>>
itrdma_checkpoints(const CirSet& cirset, int i0, double epsilon,
                   const std::vector<int>& checkpoints);

PrecoderSet build_tr(const CirSet& cirset);
PrecoderSet build_itrdma(const CirSet& cirset, double epsilon, int n_max);

/// Test oracle: recompute the focused field of a pre-normalization precoder by
/// direct convolution through the normalized channel and compare with the
/// tracked residual over the window. Returns the max absolute mismatch.
double residual_consistency_check(const CirSet& cirset, int i0,
                                  const std::vector<ComplexSequence>& s_prenorm,
                                  const ResidualGrid& grid);

/// JSON export of the precoder set (sequences with start offsets) and CSV
/// export of iteration traces (columns n, i_hat, tau_hat, re, im,
/// max_abs_delta_after).
void store_json(const PrecoderSet& set, const std::filesystem::path& path);
PrecoderSet load_json(const std::filesystem::path& path);
void store_trace_csv(const std::vector<TraceEntry>& trace,
                     const std::filesystem::path& path);

} // namespace itr::precoder
