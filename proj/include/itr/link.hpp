// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "itr/channel.hpp"
#include "itr/precoder.hpp"
#include "itr/sequence.hpp"

namespace itr::link {

using channel::CirSet;
using precoder::PrecoderSet;
using signals::ComplexSequence;
using signals::cplx;

/// w[i][j]: the field at user i produced by the precoder targeting user j,
/// through the UN-normalized channel. peak_index is the designed focusing tap.
struct EquivalentChannelSet {
    int n_users = 0;
    long peak_index = 0;
    std::vector<std::vector<ComplexSequence>> w;
};

EquivalentChannelSet equivalent_channel(const CirSet& cirset,
                                        const PrecoderSet& precoders);

/// Linear SINR at user i: |w_ii[peak]|^2 over (ISI + IUI + sigma^2).
/// sigma = 0 gives the SIR.
double sinr(const EquivalentChannelSet& eq, int user, double sigma);

double to_db(double linear);
double from_db(double db);

enum class Constellation { BPSK, QPSK };

/// Received sequence per user: y_i[k] = sum_j sum_l x_j[l]*w_ij[k - l*spacing]
/// plus CN(0, sigma^2) noise per sample.
std::vector<ComplexSequence>
simulate_transmission(const EquivalentChannelSet& eq,
                      const std::vector<std::vector<cplx>>& symbols,
                      double sigma, std::uint64_t seed, int symbol_spacing = 1);

/// Nearest-point slicing at peak_index + l*spacing; bit error rate.
double demodulate_ber(const ComplexSequence& received,
                      const std::vector<cplx>& reference,
                      Constellation constellation, long peak_index,
                      int symbol_spacing = 1);

std::vector<cplx> random_symbols(Constellation constellation, int count,
                                 std::uint64_t seed);

struct UserLinkResult {
    int user = 0;
    double sir_db = 0.0;
    double sinr_db = 0.0;
    std::optional<double> ber;
};

struct LinkReport {
    std::vector<UserLinkResult> users;
    double sigma = 0.0;
    int symbol_count = 0;
    std::string config_echo;

    void write_json(const std::filesystem::path& path) const;
    /// Flat CSV, one row per user:
    /// scenario_id,user,sir_db,sinr_db,sigma,ber,iterations,displacement_m,speed_mps
    void append_csv(std::ostream& os, const std::string& scenario_id,
                    const std::vector<int>& iterations, double displacement_m,
                    double speed_mps) const;
};

LinkReport evaluate(const CirSet& cirset, const PrecoderSet& precoders,
                    double sigma, int symbol_count = 0,
                    std::uint64_t noise_seed = 1,
                    Constellation constellation = Constellation::BPSK);

} // namespace itr::link
