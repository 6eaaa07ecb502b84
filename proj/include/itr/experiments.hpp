// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "itr/channel.hpp"
#include "itr/link.hpp"
#include "itr/precoder.hpp"

namespace itr::experiments {

using channel::ChannelSpec;
using channel::CirSet;

/// One scripted sweep's parameters. All randomness flows from `seeds`;
/// ensemble statistics are computed in the linear domain then converted to dB.
struct ExperimentConfig {
    ChannelSpec chanspec;              // seed field unused; ensemble seeds below
    double tap_interval = 1e-8;        // seconds, 1/B at B = 100 MHz
    double carrier_wavelength = 0.15;  // meters, 2 GHz carrier
    std::vector<std::uint64_t> seeds = {1, 2, 3};
    std::vector<int> iteration_counts = {0, 10, 20, 50, 100, 200, 400};
    double epsilon = 0.0;
    double snr_db_displacement = 30.0;
    std::vector<double> snr_db_speed = {2.0, 10.0};
    std::vector<double> displacement_grid;   // meters, must include 0
    double tau_s = 1e-3;                     // channel age
    std::vector<double> speed_grid;          // m/s
    double coherence_multiplier = 1.0;
    int itrdma_small = 20;
    int itrdma_large = 50;
    int parallelism = 0;                     // 0 = hardware concurrency
    std::string config_echo;                 // canonical config text

    void validate() const;
};

std::uint64_t fnv1a64(const std::string& text);
std::string config_hash_hex(const ExperimentConfig& cfg);

// ---- iteration sweep (Fig. 3 analogue) ----

struct IterationSweep {
    std::vector<int> n;
    std::vector<std::uint64_t> seeds;
    // sir_linear[ni][si]: per-seed SIR, mean over users of the linear ratio
    std::vector<std::vector<double>> sir_linear;
    std::vector<double> mean_sir_db; // dB of the linear ensemble mean
    std::vector<double> std_db;      // std of per-seed dB values
};

IterationSweep sweep_iterations(const ExperimentConfig& cfg);
void write_iteration_csv(const IterationSweep& sweep,
                         const ExperimentConfig& cfg,
                         const std::filesystem::path& path);

// ---- focusing profiles (Fig. 2 / Fig. 4 analogue) ----

struct ProfileRow {
    std::uint64_t seed;
    double displacement_m;
    std::string kind; // "TR" or "ITRDMA"
    int user;         // receiving user; target is user 0
    long tap;         // absolute tap index
    double amplitude; // |w_{user,0}[tap]|
};

std::vector<ProfileRow> focusing_profile(const ExperimentConfig& cfg,
                                         bool across_displacement = false);
void write_profile_csv(const std::vector<ProfileRow>& rows,
                       const ExperimentConfig& cfg,
                       const std::filesystem::path& path);

// ---- displacement sweep (Fig. 5 analogue) ----

struct DisplacementSweep {
    std::vector<double> d;              // meters
    std::vector<std::string> kinds;     // TR, ITRDMA20, ITRDMA50
    // mean_sinr_db[kind][di]: dB of linear ensemble mean, user 0
    std::vector<std::vector<double>> mean_sinr_db;
    // mean_amp[kind][di]: ensemble-mean |w_{0,0}[peak]|
    std::vector<std::vector<double>> mean_amp;
};

DisplacementSweep sweep_displacement(const ExperimentConfig& cfg);
void write_displacement_csv(const DisplacementSweep& sweep,
                            const ExperimentConfig& cfg,
                            const std::filesystem::path& path);

// ---- speed sweep (Fig. 6 analogue) ----

struct SpeedSweep {
    std::vector<double> v;          // m/s
    std::vector<double> snr_db;
    std::vector<std::string> kinds;
    // mean_sinr_db[snr][kind][vi]
    std::vector<std::vector<std::vector<double>>> mean_sinr_db;
};

SpeedSweep sweep_speed(const ExperimentConfig& cfg);
void write_speed_csv(const SpeedSweep& sweep, const ExperimentConfig& cfg,
                     const std::filesystem::path& path);

// ---- Table I ----

struct Speed {
    double mps;
    double kmh;
};

/// v = d_half / tau.
Speed half_strength_speed(double d_half_m, double tau_s);
void write_table1_csv(const std::vector<double>& tau_list_s, double d_half_m,
                      const ExperimentConfig& cfg,
                      const std::filesystem::path& path);

/// Linear interpolation of the amplitude-vs-displacement curve at half its
/// d = 0 value; nullopt when the curve never drops to half within the grid.
std::optional<double>
estimate_half_strength_distance(const std::vector<double>& d,
                                const std::vector<double>& amplitude);

/// JSON config echo (keys + hash) written alongside every CSV.
void write_config_echo(const ExperimentConfig& cfg,
                       const std::filesystem::path& csv_path);

} // namespace itr::experiments
