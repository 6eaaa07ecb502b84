// SPDX-License-Identifier: Apache-2.0
#include "itr/link.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "itr/rng.hpp"

namespace itr::link {

EquivalentChannelSet equivalent_channel(const CirSet& cirset,
                                        const PrecoderSet& precoders)
{
    if (precoders.n_users != cirset.n_users() ||
        precoders.n_antennas != cirset.n_antennas())
        throw std::invalid_argument(
            "equivalent_channel: channel/precoder dimension mismatch");
    EquivalentChannelSet eq;
    eq.n_users = cirset.n_users();
    eq.peak_index = cirset.n_taps() - 1;
    eq.w.assign(static_cast<std::size_t>(eq.n_users),
                std::vector<ComplexSequence>(static_cast<std::size_t>(eq.n_users)));
    for (int i = 0; i < eq.n_users; ++i)
        for (int j = 0; j < eq.n_users; ++j) {
            ComplexSequence acc;
            for (int m = 0; m < cirset.n_antennas(); ++m)
                acc = signals::accumulate_shifted(
                    acc, 1.0, 0,
                    signals::convolve(
                        cirset.cir(i, m),
                        precoders.s[static_cast<std::size_t>(j)]
                                   [static_cast<std::size_t>(m)]));
            eq.w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                std::move(acc);
        }
    return eq;
}

double sinr(const EquivalentChannelSet& eq, int user, double sigma)
{
    if (sigma < 0.0)
        throw std::invalid_argument("sinr: sigma must be >= 0");
    if (user < 0 || user >= eq.n_users)
        throw std::out_of_range("sinr: bad user index");
    const auto& own =
        eq.w[static_cast<std::size_t>(user)][static_cast<std::size_t>(user)];
    const double num = std::norm(own.at(eq.peak_index));
    double interference = signals::energy(own) - num; // ISI
    for (int j = 0; j < eq.n_users; ++j)
        if (j != user)
            interference += signals::energy(
                eq.w[static_cast<std::size_t>(user)][static_cast<std::size_t>(j)]);
    return num / (interference + sigma * sigma);
}

double to_db(double linear) { return 10.0 * std::log10(linear); }
double from_db(double db) { return std::pow(10.0, db / 10.0); }

std::vector<ComplexSequence>
simulate_transmission(const EquivalentChannelSet& eq,
                      const std::vector<std::vector<cplx>>& symbols,
                      double sigma, std::uint64_t seed, int symbol_spacing)
{
    if (symbols.size() != static_cast<std::size_t>(eq.n_users))
        throw std::invalid_argument(
            "simulate_transmission: one symbol stream per user required");
    if (sigma < 0.0)
        throw std::invalid_argument("simulate_transmission: sigma must be >= 0");
    if (symbol_spacing < 1)
        throw std::invalid_argument("simulate_transmission: spacing must be >= 1");

    std::vector<ComplexSequence> received;
    received.reserve(static_cast<std::size_t>(eq.n_users));
    Rng rng(seed);
    for (int i = 0; i < eq.n_users; ++i) {
        // output support: union over streams of shifted equivalent channels
        bool any = false;
        long lo = 0, hi = 0;
        for (int j = 0; j < eq.n_users; ++j) {
            const auto& w =
                eq.w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            const auto& x = symbols[static_cast<std::size_t>(j)];
            if (w.empty() || x.empty())
                continue;
            const long last =
                static_cast<long>(x.size() - 1) * symbol_spacing;
            if (!any) {
                lo = w.start();
                hi = w.end() + last;
                any = true;
            } else {
                lo = std::min(lo, w.start());
                hi = std::max(hi, w.end() + last);
            }
        }
        if (!any) {
            received.emplace_back();
            continue;
        }
        std::vector<cplx> taps(static_cast<std::size_t>(hi - lo), cplx{0, 0});
        for (int j = 0; j < eq.n_users; ++j) {
            const auto& w =
                eq.w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            const auto& x = symbols[static_cast<std::size_t>(j)];
            auto tw = w.taps();
            for (std::size_t l = 0; l < x.size(); ++l) {
                const long off =
                    w.start() + static_cast<long>(l) * symbol_spacing - lo;
                for (long k = 0; k < w.length(); ++k)
                    taps[static_cast<std::size_t>(off + k)] +=
                        x[l] * tw[static_cast<std::size_t>(k)];
            }
        }
        if (sigma > 0.0)
            for (auto& v : taps)
                v += rng.cgaussian(sigma * sigma);
        received.emplace_back(lo, std::move(taps));
    }
    return received;
}

namespace {

cplx slice(cplx v, Constellation c)
{
    switch (c) {
    case Constellation::BPSK:
        return v.real() >= 0.0 ? cplx{1.0, 0.0} : cplx{-1.0, 0.0};
    case Constellation::QPSK: {
        const double s = 1.0 / std::sqrt(2.0);
        return {v.real() >= 0.0 ? s : -s, v.imag() >= 0.0 ? s : -s};
    }
    }
    throw std::invalid_argument("unknown constellation");
}

int bit_errors(cplx decided, cplx reference, Constellation c)
{
    switch (c) {
    case Constellation::BPSK:
        return (decided.real() >= 0.0) != (reference.real() >= 0.0) ? 1 : 0;
    case Constellation::QPSK:
        return ((decided.real() >= 0.0) != (reference.real() >= 0.0) ? 1 : 0) +
               ((decided.imag() >= 0.0) != (reference.imag() >= 0.0) ? 1 : 0);
    }
    throw std::invalid_argument("unknown constellation");
}

} // namespace

double demodulate_ber(const ComplexSequence& received,
                      const std::vector<cplx>& reference,
                      Constellation constellation, long peak_index,
                      int symbol_spacing)
{
    if (reference.empty())
        return 0.0;
    const int bits_per_symbol = constellation == Constellation::BPSK ? 1 : 2;
    long errors = 0;
    for (std::size_t l = 0; l < reference.size(); ++l) {
        const cplx sample =
            received.at(peak_index + static_cast<long>(l) * symbol_spacing);
        const cplx decided = slice(sample, constellation);
        errors += bit_errors(decided, reference[l], constellation);
    }
    return static_cast<double>(errors) /
           (static_cast<double>(reference.size()) * bits_per_symbol);
}

std::vector<cplx> random_symbols(Constellation constellation, int count,
                                 std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<cplx> out;
    out.reserve(static_cast<std::size_t>(count));
    const double s = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < count; ++i) {
        const double u = rng.uniform();
        if (constellation == Constellation::BPSK)
            out.emplace_back(u < 0.5 ? -1.0 : 1.0, 0.0);
        else {
            const double v = rng.uniform();
            out.emplace_back(u < 0.5 ? -s : s, v < 0.5 ? -s : s);
        }
    }
    return out;
}

LinkReport evaluate(const CirSet& cirset, const PrecoderSet& precoders,
                    double sigma, int symbol_count, std::uint64_t noise_seed,
                    Constellation constellation)
{
    const auto eq = equivalent_channel(cirset, precoders);
    LinkReport report;
    report.sigma = sigma;
    report.symbol_count = symbol_count;

    std::vector<std::vector<cplx>> symbols;
    std::vector<ComplexSequence> received;
    if (symbol_count > 0) {
        for (int i = 0; i < eq.n_users; ++i)
            symbols.push_back(random_symbols(
                constellation, symbol_count,
                noise_seed * 1000003u + static_cast<std::uint64_t>(i)));
        received = simulate_transmission(eq, symbols, sigma, noise_seed);
    }
    for (int i = 0; i < eq.n_users; ++i) {
        UserLinkResult r;
        r.user = i;
        r.sir_db = to_db(sinr(eq, i, 0.0));
        r.sinr_db = to_db(sinr(eq, i, sigma));
        if (symbol_count > 0)
            r.ber = demodulate_ber(received[static_cast<std::size_t>(i)],
                                   symbols[static_cast<std::size_t>(i)],
                                   constellation, eq.peak_index);
        report.users.push_back(r);
    }
    return report;
}

void LinkReport::write_json(const std::filesystem::path& path) const
{
    nlohmann::json j;
    j["sigma"] = sigma;
    j["symbol_count"] = symbol_count;
    j["config_echo"] = config_echo;
    auto& users_j = j["users"] = nlohmann::json::array();
    for (const auto& u : users) {
        nlohmann::json uj;
        uj["user"] = u.user;
        uj["sir_db"] = u.sir_db;
        uj["sinr_db"] = u.sinr_db;
        if (u.ber)
            uj["ber"] = *u.ber;
        users_j.push_back(std::move(uj));
    }
    std::ofstream os(path, std::ios::trunc);
    if (!os)
        throw std::runtime_error("write_json: cannot open " + path.string());
    os << j.dump(1) << '\n';
}

void LinkReport::append_csv(std::ostream& os, const std::string& scenario_id,
                            const std::vector<int>& iterations,
                            double displacement_m, double speed_mps) const
{
    os.precision(12);
    for (std::size_t i = 0; i < users.size(); ++i) {
        const auto& u = users[i];
        const int iters =
            i < iterations.size() ? iterations[i] : (iterations.empty() ? 0 : iterations.back());
        os << scenario_id << ',' << u.user << ',' << u.sir_db << ','
           << u.sinr_db << ',' << sigma << ',';
        if (u.ber)
            os << *u.ber;
        os << ',' << iters << ',' << displacement_m << ',' << speed_mps << '\n';
    }
}

} // namespace itr::link
