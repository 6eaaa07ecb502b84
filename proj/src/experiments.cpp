// SPDX-License-Identifier: Apache-2.0
#include "itr/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

namespace itr::experiments {

void ExperimentConfig::validate() const
{
    if (chanspec.n_users < 1 || chanspec.n_antennas < 1 || chanspec.n_taps < 1)
        throw std::invalid_argument("config: channel counts must be >= 1");
    if (chanspec.pdp == channel::Pdp::Exponential && chanspec.decay_taps <= 0.0)
        throw std::invalid_argument("config: decay_taps must be > 0");
    if (seeds.empty())
        throw std::invalid_argument("config: seed list is empty");
    std::set<std::uint64_t> uniq(seeds.begin(), seeds.end());
    if (uniq.size() != seeds.size())
        throw std::invalid_argument("config: seeds must be distinct");
    if (epsilon < 0.0)
        throw std::invalid_argument("config: epsilon must be >= 0");
    if (tau_s <= 0.0)
        throw std::invalid_argument("config: tau must be > 0");
    if (coherence_multiplier <= 0.0)
        throw std::invalid_argument("config: coherence_multiplier must be > 0");
}

std::uint64_t fnv1a64(const std::string& text)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string config_hash_hex(const ExperimentConfig& cfg)
{
    std::ostringstream os;
    os << std::hex << fnv1a64(cfg.config_echo);
    return os.str();
}

namespace {

void parallel_for(std::size_t n_jobs, int parallelism,
                  const std::function<void(std::size_t)>& fn)
{
    int threads = parallelism > 0
                      ? parallelism
                      : static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1)
        threads = 1;
    threads = std::min<std::size_t>(threads, n_jobs);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n_jobs; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = next.fetch_add(1); i < n_jobs;
                     i = next.fetch_add(1))
                    fn(i);
            } catch (...) {
                errors[static_cast<std::size_t>(t)] = std::current_exception();
            }
        });
    for (auto& th : pool)
        th.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

CirSet make_channel(const ExperimentConfig& cfg, std::uint64_t seed)
{
    ChannelSpec spec = cfg.chanspec;
    spec.seed = seed;
    return channel::generate_synthetic(spec, cfg.tap_interval,
                                       cfg.carrier_wavelength);
}

double mean(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v)
        s += x;
    return s / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v)
{
    if (v.size() < 2)
        return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v)
        s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::trunc | std::ios::binary);
        if (!os)
            throw std::runtime_error("cannot open " + tmp.string());
        os << content;
        if (!os)
            throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

void csv_header(std::ostringstream& os, const ExperimentConfig& cfg)
{
    os << "# config_hash=" << config_hash_hex(cfg) << '\n';
    os << "# ensemble_convention=linear_mean_then_db\n";
    os << "# snr_reference=tr_peak_power_over_sigma_squared\n";
}

// deterministic per-(seed, grid point) displacement seed
std::uint64_t displace_seed(std::uint64_t base, std::size_t point)
{
    return fnv1a64(std::to_string(base) + ":" + std::to_string(point));
}

} // namespace

IterationSweep sweep_iterations(const ExperimentConfig& cfg)
{
    cfg.validate();
    if (cfg.iteration_counts.empty())
        throw std::invalid_argument("sweep_iterations: iteration list empty");
    auto counts = cfg.iteration_counts;
    if (!std::is_sorted(counts.begin(), counts.end()))
        std::sort(counts.begin(), counts.end());
    if (counts.front() != 0)
        throw std::invalid_argument(
            "sweep_iterations: iteration list must include 0 (TR baseline)");

    IterationSweep sweep;
    sweep.n = counts;
    sweep.seeds = cfg.seeds;
    sweep.sir_linear.assign(counts.size(),
                            std::vector<double>(cfg.seeds.size(), 0.0));

    parallel_for(cfg.seeds.size(), cfg.parallelism, [&](std::size_t si) {
        const auto cirset = make_channel(cfg, cfg.seeds[si]);
        // per-user precoder snapshots at every requested n
        std::vector<std::vector<std::vector<signals::ComplexSequence>>> snaps;
        for (int i0 = 0; i0 < cirset.n_users(); ++i0)
            snaps.push_back(
                precoder::itrdma_checkpoints(cirset, i0, cfg.epsilon, counts));
        for (std::size_t ni = 0; ni < counts.size(); ++ni) {
            precoder::PrecoderSet set;
            set.kind = counts[ni] == 0 ? precoder::PrecoderKind::TR
                                       : precoder::PrecoderKind::ITRDMA;
            set.n_users = cirset.n_users();
            set.n_antennas = cirset.n_antennas();
            set.epsilon = cfg.epsilon;
            set.n_max = counts[ni];
            for (int i0 = 0; i0 < cirset.n_users(); ++i0) {
                set.s.push_back(snaps[static_cast<std::size_t>(i0)][ni]);
                set.iterations_used.push_back(counts[ni]);
            }
            const auto eq = link::equivalent_channel(cirset, set);
            double acc = 0.0;
            for (int i = 0; i < eq.n_users; ++i)
                acc += link::sinr(eq, i, 0.0);
            sweep.sir_linear[ni][si] = acc / eq.n_users;
        }
    });

    for (std::size_t ni = 0; ni < counts.size(); ++ni) {
        sweep.mean_sir_db.push_back(link::to_db(mean(sweep.sir_linear[ni])));
        std::vector<double> per_seed_db;
        for (double x : sweep.sir_linear[ni])
            per_seed_db.push_back(link::to_db(x));
        sweep.std_db.push_back(stddev(per_seed_db));
    }
    return sweep;
}

void write_iteration_csv(const IterationSweep& sweep,
                         const ExperimentConfig& cfg,
                         const std::filesystem::path& path)
{
    std::ostringstream os;
    csv_header(os, cfg);
    os << "n,seed,sir_db,ensemble_mean_sir_db,ensemble_std_db\n";
    os.precision(12);
    for (std::size_t ni = 0; ni < sweep.n.size(); ++ni)
        for (std::size_t si = 0; si < sweep.seeds.size(); ++si)
            os << sweep.n[ni] << ',' << sweep.seeds[si] << ','
               << link::to_db(sweep.sir_linear[ni][si]) << ','
               << sweep.mean_sir_db[ni] << ',' << sweep.std_db[ni] << '\n';
    write_file_atomic(path, os.str());
    write_config_echo(cfg, path);
}

std::vector<ProfileRow> focusing_profile(const ExperimentConfig& cfg,
                                         bool across_displacement)
{
    cfg.validate();
    if (cfg.chanspec.n_users < 2)
        throw std::invalid_argument("focusing_profile: needs at least 2 users");
    std::vector<double> grid = {0.0};
    if (across_displacement) {
        if (cfg.displacement_grid.empty())
            throw std::invalid_argument(
                "focusing_profile: displacement grid empty");
        grid = cfg.displacement_grid;
    }

    std::vector<std::vector<ProfileRow>> per_seed(cfg.seeds.size());
    parallel_for(cfg.seeds.size(), cfg.parallelism, [&](std::size_t si) {
        const auto h0 = make_channel(cfg, cfg.seeds[si]);
        const auto tr = precoder::build_tr(h0);
        const auto itr =
            precoder::build_itrdma(h0, cfg.epsilon, cfg.itrdma_large);
        auto& rows = per_seed[si];
        for (std::size_t di = 0; di < grid.size(); ++di) {
            const auto hd =
                grid[di] == 0.0
                    ? h0
                    : channel::displaced(h0, grid[di],
                                         displace_seed(cfg.seeds[si], di),
                                         cfg.coherence_multiplier);
            for (const auto* set : {&tr, &itr}) {
                const auto eq = link::equivalent_channel(hd, *set);
                const char* kind =
                    set->kind == precoder::PrecoderKind::TR ? "TR" : "ITRDMA";
                for (int u = 0; u < eq.n_users; ++u) {
                    const auto& w = eq.w[static_cast<std::size_t>(u)][0];
                    for (long k = w.start(); k < w.end(); ++k)
                        rows.push_back({cfg.seeds[si], grid[di], kind, u, k,
                                        std::abs(w.at(k))});
                }
            }
        }
    });

    std::vector<ProfileRow> rows;
    for (auto& r : per_seed)
        rows.insert(rows.end(), r.begin(), r.end());
    return rows;
}

void write_profile_csv(const std::vector<ProfileRow>& rows,
                       const ExperimentConfig& cfg,
                       const std::filesystem::path& path)
{
    std::ostringstream os;
    csv_header(os, cfg);
    os << "seed,displacement_m,kind,user,tap,amplitude\n";
    os.precision(12);
    for (const auto& r : rows)
        os << r.seed << ',' << r.displacement_m << ',' << r.kind << ','
           << r.user << ',' << r.tap << ',' << r.amplitude << '\n';
    write_file_atomic(path, os.str());
    write_config_echo(cfg, path);
}

namespace {

struct KindSets {
    std::vector<precoder::PrecoderSet> sets;
    std::vector<std::string> names;
};

KindSets build_kind_sets(const CirSet& h0, const ExperimentConfig& cfg)
{
    KindSets k;
    k.sets.push_back(precoder::build_tr(h0));
    k.names.push_back("TR");
    k.sets.push_back(precoder::build_itrdma(h0, cfg.epsilon, cfg.itrdma_small));
    k.names.push_back("ITRDMA" + std::to_string(cfg.itrdma_small));
    k.sets.push_back(precoder::build_itrdma(h0, cfg.epsilon, cfg.itrdma_large));
    k.names.push_back("ITRDMA" + std::to_string(cfg.itrdma_large));
    return k;
}

// sigma referenced to the conventional-TR peak power on the undisplaced
// channel, shared across precoder kinds
double sigma_for_snr(const CirSet& h0, const precoder::PrecoderSet& tr,
                     double snr_db)
{
    const auto eq = link::equivalent_channel(h0, tr);
    const double peak_power = std::norm(eq.w[0][0].at(eq.peak_index));
    return std::sqrt(peak_power / link::from_db(snr_db));
}

} // namespace

DisplacementSweep sweep_displacement(const ExperimentConfig& cfg)
{
    cfg.validate();
    if (cfg.displacement_grid.empty())
        throw std::invalid_argument("sweep_displacement: grid empty");
    if (std::find(cfg.displacement_grid.begin(), cfg.displacement_grid.end(),
                  0.0) == cfg.displacement_grid.end())
        throw std::invalid_argument("sweep_displacement: grid must include 0");

    const std::size_t nk = 3;
    DisplacementSweep sweep;
    sweep.d = cfg.displacement_grid;

    // [kind][d][seed]
    std::vector<std::vector<std::vector<double>>> sinr_lin(
        nk, std::vector<std::vector<double>>(
                sweep.d.size(), std::vector<double>(cfg.seeds.size(), 0.0)));
    auto amp = sinr_lin;

    std::vector<std::string> names;
    parallel_for(cfg.seeds.size(), cfg.parallelism, [&](std::size_t si) {
        const auto h0 = make_channel(cfg, cfg.seeds[si]);
        const auto kinds = build_kind_sets(h0, cfg);
        if (si == 0)
            names = kinds.names;
        const double sigma =
            sigma_for_snr(h0, kinds.sets[0], cfg.snr_db_displacement);
        for (std::size_t di = 0; di < sweep.d.size(); ++di) {
            const auto hd =
                sweep.d[di] == 0.0
                    ? h0
                    : channel::displaced(h0, sweep.d[di],
                                         displace_seed(cfg.seeds[si], di),
                                         cfg.coherence_multiplier);
            for (std::size_t ki = 0; ki < nk; ++ki) {
                const auto eq = link::equivalent_channel(hd, kinds.sets[ki]);
                sinr_lin[ki][di][si] = link::sinr(eq, 0, sigma);
                amp[ki][di][si] = std::abs(eq.w[0][0].at(eq.peak_index));
            }
        }
    });

    sweep.kinds = names;
    sweep.mean_sinr_db.assign(nk, std::vector<double>(sweep.d.size(), 0.0));
    sweep.mean_amp.assign(nk, std::vector<double>(sweep.d.size(), 0.0));
    for (std::size_t ki = 0; ki < nk; ++ki)
        for (std::size_t di = 0; di < sweep.d.size(); ++di) {
            sweep.mean_sinr_db[ki][di] = link::to_db(mean(sinr_lin[ki][di]));
            sweep.mean_amp[ki][di] = mean(amp[ki][di]);
        }
    return sweep;
}

void write_displacement_csv(const DisplacementSweep& sweep,
                            const ExperimentConfig& cfg,
                            const std::filesystem::path& path)
{
    std::ostringstream os;
    csv_header(os, cfg);
    os << "displacement_m,kind,mean_sinr_db,mean_peak_amplitude\n";
    os.precision(12);
    for (std::size_t ki = 0; ki < sweep.kinds.size(); ++ki)
        for (std::size_t di = 0; di < sweep.d.size(); ++di)
            os << sweep.d[di] << ',' << sweep.kinds[ki] << ','
               << sweep.mean_sinr_db[ki][di] << ',' << sweep.mean_amp[ki][di]
               << '\n';
    write_file_atomic(path, os.str());
    write_config_echo(cfg, path);
}

SpeedSweep sweep_speed(const ExperimentConfig& cfg)
{
    cfg.validate();
    if (cfg.speed_grid.empty())
        throw std::invalid_argument("sweep_speed: speed grid empty");
    if (cfg.snr_db_speed.empty())
        throw std::invalid_argument("sweep_speed: SNR list empty");

    const std::size_t nk = 3;
    SpeedSweep sweep;
    sweep.v = cfg.speed_grid;
    sweep.snr_db = cfg.snr_db_speed;

    // [snr][kind][v][seed]
    std::vector<std::vector<std::vector<std::vector<double>>>> sinr_lin(
        sweep.snr_db.size(),
        std::vector<std::vector<std::vector<double>>>(
            nk, std::vector<std::vector<double>>(
                    sweep.v.size(),
                    std::vector<double>(cfg.seeds.size(), 0.0))));

    std::vector<std::string> names;
    parallel_for(cfg.seeds.size(), cfg.parallelism, [&](std::size_t si) {
        const auto h0 = make_channel(cfg, cfg.seeds[si]);
        const auto kinds = build_kind_sets(h0, cfg);
        if (si == 0)
            names = kinds.names;
        std::vector<double> sigmas;
        for (double snr : sweep.snr_db)
            sigmas.push_back(sigma_for_snr(h0, kinds.sets[0], snr));
        for (std::size_t vi = 0; vi < sweep.v.size(); ++vi) {
            const double d = sweep.v[vi] * cfg.tau_s;
            const auto hd =
                d == 0.0 ? h0
                         : channel::displaced(h0, d,
                                              displace_seed(cfg.seeds[si], vi),
                                              cfg.coherence_multiplier);
            for (std::size_t ki = 0; ki < nk; ++ki) {
                const auto eq = link::equivalent_channel(hd, kinds.sets[ki]);
                for (std::size_t qi = 0; qi < sigmas.size(); ++qi)
                    sinr_lin[qi][ki][vi][si] = link::sinr(eq, 0, sigmas[qi]);
            }
        }
    });

    sweep.kinds = names;
    sweep.mean_sinr_db.assign(
        sweep.snr_db.size(),
        std::vector<std::vector<double>>(nk,
                                         std::vector<double>(sweep.v.size())));
    for (std::size_t qi = 0; qi < sweep.snr_db.size(); ++qi)
        for (std::size_t ki = 0; ki < nk; ++ki)
            for (std::size_t vi = 0; vi < sweep.v.size(); ++vi)
                sweep.mean_sinr_db[qi][ki][vi] =
                    link::to_db(mean(sinr_lin[qi][ki][vi]));
    return sweep;
}

void write_speed_csv(const SpeedSweep& sweep, const ExperimentConfig& cfg,
                     const std::filesystem::path& path)
{
    std::ostringstream os;
    csv_header(os, cfg);
    os << "speed_mps,snr_db,kind,mean_sinr_db\n";
    os.precision(12);
    for (std::size_t qi = 0; qi < sweep.snr_db.size(); ++qi)
        for (std::size_t ki = 0; ki < sweep.kinds.size(); ++ki)
            for (std::size_t vi = 0; vi < sweep.v.size(); ++vi)
                os << sweep.v[vi] << ',' << sweep.snr_db[qi] << ','
                   << sweep.kinds[ki] << ',' << sweep.mean_sinr_db[qi][ki][vi]
                   << '\n';
    write_file_atomic(path, os.str());
    write_config_echo(cfg, path);
}

Speed half_strength_speed(double d_half_m, double tau_s)
{
    if (d_half_m <= 0.0 || tau_s <= 0.0)
        throw std::invalid_argument(
            "half_strength_speed: inputs must be positive");
    const double mps = d_half_m / tau_s;
    return {mps, mps * 3.6};
}

void write_table1_csv(const std::vector<double>& tau_list_s, double d_half_m,
                      const ExperimentConfig& cfg,
                      const std::filesystem::path& path)
{
    std::ostringstream os;
    csv_header(os, cfg);
    os << "tau_s,d_half_m,speed_mps,speed_kmh\n";
    os.precision(12);
    for (double tau : tau_list_s) {
        const auto v = half_strength_speed(d_half_m, tau);
        os << tau << ',' << d_half_m << ',' << v.mps << ',' << v.kmh << '\n';
    }
    write_file_atomic(path, os.str());
    write_config_echo(cfg, path);
}

std::optional<double>
estimate_half_strength_distance(const std::vector<double>& d,
                                const std::vector<double>& amplitude)
{
    if (d.size() != amplitude.size() || d.empty())
        throw std::invalid_argument(
            "estimate_half_strength_distance: bad curve");
    const double target = amplitude.front() / 2.0;
    for (std::size_t i = 1; i < d.size(); ++i) {
        if (amplitude[i] <= target) {
            const double a0 = amplitude[i - 1];
            const double a1 = amplitude[i];
            if (a0 == a1)
                return d[i];
            const double t = (a0 - target) / (a0 - a1);
            return d[i - 1] + t * (d[i] - d[i - 1]);
        }
    }
    return std::nullopt;
}

void write_config_echo(const ExperimentConfig& cfg,
                       const std::filesystem::path& csv_path)
{
    nlohmann::json j;
    j["config_hash"] = config_hash_hex(cfg);
    j["config"] = cfg.config_echo;
    auto path = csv_path;
    path += ".config.json";
    write_file_atomic(path, j.dump(1) + "\n");
}

} // namespace itr::experiments
