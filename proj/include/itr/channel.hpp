// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "itr/sequence.hpp"

namespace itr::channel {

using signals::ComplexSequence;
using signals::cplx;

enum class Pdp { Exponential, Flat };

/// Synthetic channel parameters. decay_taps is the exponential power-delay
/// time constant in taps; ignored for a flat profile.
struct ChannelSpec {
    int n_users = 2;
    int n_antennas = 8;
    int n_taps = 256;
    double decay_taps = 64.0;
    std::uint64_t seed = 0;
    Pdp pdp = Pdp::Exponential;
};

/// N x M bank of length-L channel impulse responses plus sampling metadata.
/// Synthetic sets keep their per-tap variance profile so they can be displaced;
/// sets loaded from disk do not.
class CirSet {
  public:
    CirSet(int n_users, int n_antennas, int n_taps,
           std::vector<ComplexSequence> cirs, double tap_interval,
           double carrier_wavelength);

    int n_users() const { return n_users_; }
    int n_antennas() const { return n_antennas_; }
    int n_taps() const { return n_taps_; }
    double tap_interval() const { return tap_interval_; }
    double carrier_wavelength() const { return carrier_wavelength_; }

    const ComplexSequence& cir(int user, int antenna) const;

    /// Total energy of user i's bank, sum over antennas and taps.
    double user_energy(int user) const;

    const std::optional<std::vector<double>>& power_profile() const
    {
        return power_profile_;
    }
    void set_power_profile(std::vector<double> p) { power_profile_ = std::move(p); }

  private:
    int n_users_, n_antennas_, n_taps_;
    double tap_interval_, carrier_wavelength_;
    std::vector<ComplexSequence> cirs_; // user-major, antenna-minor
    std::optional<std::vector<double>> power_profile_;
};

/// Draw a CirSet with i.i.d. CN(0, P[k]) taps, P[k] per the chosen profile.
CirSet generate_synthetic(const ChannelSpec& spec, double tap_interval = 1e-8,
                          double carrier_wavelength = 0.15);

/// Per-antenna normalized CIRs of one user (joint normalization across
/// antennas, so the bank's total energy becomes 1).
std::vector<ComplexSequence> normalize_user(const CirSet& cirset, int user);

/// Diffuse-field correlation sin(x)/x at x = 2*pi*d/lambda.
double spatial_correlation(double d, double wavelength);

/// Mix each tap with an independent innovation so corresponding taps correlate
/// as rho(d); marginal tap law preserved. Requires a synthetic-origin CirSet.
/// coherence_multiplier stretches the effective wavelength.
CirSet displaced(const CirSet& cirset, double d, std::uint64_t seed,
                 double coherence_multiplier = 1.0);

// Binary "CIR1" format and a JSON mirror with the same field names.
void store(const CirSet& cirset, const std::filesystem::path& path);
CirSet load(const std::filesystem::path& path);
void store_json(const CirSet& cirset, const std::filesystem::path& path);
CirSet load_json(const std::filesystem::path& path);

} // namespace itr::channel
