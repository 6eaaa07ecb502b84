// SPDX-License-Identifier: Apache-2.0
#include "itr/channel.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "itr/rng.hpp"

namespace itr::channel {

CirSet::CirSet(int n_users, int n_antennas, int n_taps,
               std::vector<ComplexSequence> cirs, double tap_interval,
               double carrier_wavelength)
    : n_users_(n_users), n_antennas_(n_antennas), n_taps_(n_taps),
      tap_interval_(tap_interval), carrier_wavelength_(carrier_wavelength),
      cirs_(std::move(cirs))
{
    if (n_users_ < 1 || n_antennas_ < 1 || n_taps_ < 1)
        throw std::invalid_argument("CirSet: all dimensions must be >= 1");
    if (cirs_.size() != static_cast<std::size_t>(n_users_) * n_antennas_)
        throw std::invalid_argument("CirSet: wrong number of sequences");
    for (const auto& h : cirs_)
        if (h.start() != 0 || h.length() != n_taps_)
            throw std::invalid_argument(
                "CirSet: every CIR must have start 0 and exactly L taps");
}

const ComplexSequence& CirSet::cir(int user, int antenna) const
{
    if (user < 0 || user >= n_users_ || antenna < 0 || antenna >= n_antennas_)
        throw std::out_of_range("CirSet::cir: index out of range");
    return cirs_[static_cast<std::size_t>(user) * n_antennas_ + antenna];
}

double CirSet::user_energy(int user) const
{
    double e = 0.0;
    for (int m = 0; m < n_antennas_; ++m)
        e += signals::energy(cir(user, m));
    return e;
}

CirSet generate_synthetic(const ChannelSpec& spec, double tap_interval,
                          double carrier_wavelength)
{
    if (spec.n_users < 1 || spec.n_antennas < 1 || spec.n_taps < 1)
        throw std::invalid_argument("generate_synthetic: counts must be >= 1");
    if (spec.pdp == Pdp::Exponential && spec.decay_taps <= 0.0)
        throw std::invalid_argument("generate_synthetic: decay_taps must be > 0");

    std::vector<double> profile(static_cast<std::size_t>(spec.n_taps));
    for (int k = 0; k < spec.n_taps; ++k)
        profile[static_cast<std::size_t>(k)] =
            spec.pdp == Pdp::Flat ? 1.0 : std::exp(-k / spec.decay_taps);

    Rng rng(spec.seed);
    std::vector<ComplexSequence> cirs;
    cirs.reserve(static_cast<std::size_t>(spec.n_users) * spec.n_antennas);
    for (int i = 0; i < spec.n_users; ++i)
        for (int m = 0; m < spec.n_antennas; ++m) {
            std::vector<cplx> taps(static_cast<std::size_t>(spec.n_taps));
            for (int k = 0; k < spec.n_taps; ++k)
                taps[static_cast<std::size_t>(k)] =
                    rng.cgaussian(profile[static_cast<std::size_t>(k)]);
            cirs.emplace_back(0, std::move(taps));
        }
    CirSet out(spec.n_users, spec.n_antennas, spec.n_taps, std::move(cirs),
               tap_interval, carrier_wavelength);
    out.set_power_profile(std::move(profile));
    return out;
}

std::vector<ComplexSequence> normalize_user(const CirSet& cirset, int user)
{
    const double e = cirset.user_energy(user);
    if (e <= 0.0)
        throw std::domain_error("normalize_user: user bank has zero energy");
    const double inv = 1.0 / std::sqrt(e);
    std::vector<ComplexSequence> out;
    out.reserve(static_cast<std::size_t>(cirset.n_antennas()));
    for (int m = 0; m < cirset.n_antennas(); ++m)
        out.push_back(signals::scale(cirset.cir(user, m), inv));
    return out;
}

double spatial_correlation(double d, double wavelength)
{
    if (d < 0.0)
        throw std::invalid_argument("spatial_correlation: d must be >= 0");
    if (wavelength <= 0.0)
        throw std::invalid_argument("spatial_correlation: wavelength must be > 0");
    const double x = 2.0 * std::numbers::pi * d / wavelength;
    if (x < 1e-9)
        return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

CirSet displaced(const CirSet& cirset, double d, std::uint64_t seed,
                 double coherence_multiplier)
{
    if (!cirset.power_profile())
        throw std::domain_error(
            "displaced: CirSet has no tap variance profile (not synthetic); "
            "supply per-position CIRs instead");
    if (d == 0.0)
        return cirset;
    const auto& profile = *cirset.power_profile();
    const double rho =
        spatial_correlation(d, cirset.carrier_wavelength() * coherence_multiplier);
    const double mix = std::sqrt(std::max(0.0, 1.0 - rho * rho));

    Rng rng(seed);
    std::vector<ComplexSequence> cirs;
    cirs.reserve(static_cast<std::size_t>(cirset.n_users()) * cirset.n_antennas());
    for (int i = 0; i < cirset.n_users(); ++i)
        for (int m = 0; m < cirset.n_antennas(); ++m) {
            const auto& h = cirset.cir(i, m);
            std::vector<cplx> taps(static_cast<std::size_t>(cirset.n_taps()));
            for (int k = 0; k < cirset.n_taps(); ++k)
                taps[static_cast<std::size_t>(k)] =
                    rho * h.at(k) +
                    mix * rng.cgaussian(profile[static_cast<std::size_t>(k)]);
            cirs.emplace_back(0, std::move(taps));
        }
    CirSet out(cirset.n_users(), cirset.n_antennas(), cirset.n_taps(),
               std::move(cirs), cirset.tap_interval(),
               cirset.carrier_wavelength());
    out.set_power_profile(profile);
    return out;
}

namespace {

void put_u32(std::ostream& os, std::uint32_t v)
{
    char b[4];
    std::memcpy(b, &v, 4);
    os.write(b, 4);
}

void put_f64(std::ostream& os, double v)
{
    char b[8];
    std::memcpy(b, &v, 8);
    os.write(b, 8);
}

std::uint32_t get_u32(std::istream& is, const char* what)
{
    char b[4];
    if (!is.read(b, 4))
        throw std::runtime_error(std::string("CIR file truncated at ") + what);
    std::uint32_t v;
    std::memcpy(&v, b, 4);
    return v;
}

double get_f64(std::istream& is, const char* what)
{
    char b[8];
    if (!is.read(b, 8))
        throw std::runtime_error(std::string("CIR file truncated at ") + what);
    double v;
    std::memcpy(&v, b, 8);
    return v;
}

} // namespace

void store(const CirSet& cirset, const std::filesystem::path& path)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw std::runtime_error("store: cannot open " + path.string());
    os.write("CIR1", 4);
    put_u32(os, 1);
    put_u32(os, static_cast<std::uint32_t>(cirset.n_users()));
    put_u32(os, static_cast<std::uint32_t>(cirset.n_antennas()));
    put_u32(os, static_cast<std::uint32_t>(cirset.n_taps()));
    put_f64(os, cirset.tap_interval());
    put_f64(os, cirset.carrier_wavelength());
    for (int i = 0; i < cirset.n_users(); ++i)
        for (int m = 0; m < cirset.n_antennas(); ++m)
            for (int k = 0; k < cirset.n_taps(); ++k) {
                const cplx v = cirset.cir(i, m).at(k);
                put_f64(os, v.real());
                put_f64(os, v.imag());
            }
    if (!os)
        throw std::runtime_error("store: write failed for " + path.string());
}

CirSet load(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::runtime_error("load: cannot open " + path.string());
    char magic[4];
    if (!is.read(magic, 4))
        throw std::runtime_error("CIR file truncated at magic");
    if (std::memcmp(magic, "CIR1", 4) != 0)
        throw std::runtime_error("CIR file has wrong magic");
    const std::uint32_t version = get_u32(is, "version");
    if (version != 1)
        throw std::runtime_error("CIR file has unsupported version " +
                                 std::to_string(version));
    const std::uint32_t n = get_u32(is, "N");
    const std::uint32_t m = get_u32(is, "M");
    const std::uint32_t l = get_u32(is, "L");
    const double tap_interval = get_f64(is, "tap_interval");
    const double wavelength = get_f64(is, "carrier_wavelength");
    if (n < 1 || m < 1 || l < 1)
        throw std::runtime_error("CIR file header has zero dimension");

    std::vector<ComplexSequence> cirs;
    cirs.reserve(static_cast<std::size_t>(n) * m);
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t a = 0; a < m; ++a) {
            std::vector<cplx> taps(l);
            for (std::uint32_t k = 0; k < l; ++k) {
                const double re = get_f64(is, "taps");
                const double im = get_f64(is, "taps");
                taps[k] = {re, im};
            }
            cirs.emplace_back(0, std::move(taps));
        }
    char extra;
    if (is.read(&extra, 1))
        throw std::runtime_error(
            "CIR file has trailing data beyond N*M*L tap records");
    return {static_cast<int>(n), static_cast<int>(m), static_cast<int>(l),
            std::move(cirs), tap_interval, wavelength};
}

void store_json(const CirSet& cirset, const std::filesystem::path& path)
{
    nlohmann::json j;
    j["magic"] = "CIR1";
    j["version"] = 1;
    j["N"] = cirset.n_users();
    j["M"] = cirset.n_antennas();
    j["L"] = cirset.n_taps();
    j["tap_interval"] = cirset.tap_interval();
    j["carrier_wavelength"] = cirset.carrier_wavelength();
    auto& taps = j["taps"] = nlohmann::json::array();
    for (int i = 0; i < cirset.n_users(); ++i)
        for (int m = 0; m < cirset.n_antennas(); ++m)
            for (int k = 0; k < cirset.n_taps(); ++k) {
                const cplx v = cirset.cir(i, m).at(k);
                taps.push_back({v.real(), v.imag()});
            }
    std::ofstream os(path, std::ios::trunc);
    if (!os)
        throw std::runtime_error("store_json: cannot open " + path.string());
    os << j.dump(1) << '\n';
}

CirSet load_json(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("load_json: cannot open " + path.string());
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("load_json: parse error: " +
                                 std::string(e.what()));
    }
    for (const char* key :
         {"magic", "version", "N", "M", "L", "tap_interval", "carrier_wavelength",
          "taps"})
        if (!j.contains(key))
            throw std::runtime_error(std::string("load_json: missing field ") +
                                     key);
    if (j["magic"] != "CIR1")
        throw std::runtime_error("load_json: wrong magic");
    if (j["version"] != 1)
        throw std::runtime_error("load_json: unsupported version");
    const int n = j["N"], m = j["M"], l = j["L"];
    if (n < 1 || m < 1 || l < 1)
        throw std::runtime_error("load_json: zero dimension in header");
    const auto& taps = j["taps"];
    if (taps.size() != static_cast<std::size_t>(n) * m * l)
        throw std::runtime_error("load_json: tap count does not match N*M*L");
    std::vector<ComplexSequence> cirs;
    cirs.reserve(static_cast<std::size_t>(n) * m);
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < m; ++a) {
            std::vector<cplx> row(static_cast<std::size_t>(l));
            for (int k = 0; k < l; ++k, ++idx)
                row[static_cast<std::size_t>(k)] = {taps[idx][0].get<double>(),
                                                    taps[idx][1].get<double>()};
            cirs.emplace_back(0, std::move(row));
        }
    return {n, m, l, std::move(cirs), j["tap_interval"].get<double>(),
            j["carrier_wavelength"].get<double>()};
}

} // namespace itr::channel
