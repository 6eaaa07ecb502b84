// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "itr/channel.hpp"

using namespace itr::channel;
using itr::signals::ComplexSequence;
using itr::signals::cplx;

namespace {

CirSet flat_single(std::uint64_t seed, int n_taps)
{
    ChannelSpec spec;
    spec.n_users = 1;
    spec.n_antennas = 1;
    spec.n_taps = n_taps;
    spec.pdp = Pdp::Flat;
    spec.seed = seed;
    return generate_synthetic(spec);
}

struct TempFile {
    std::filesystem::path path;
    explicit TempFile(const char* name)
        : path(std::filesystem::temp_directory_path() / name)
    {
    }
    ~TempFile() { std::filesystem::remove(path); }
};

} // namespace

TEST_CASE("generate_synthetic determinism and profile")
{
    ChannelSpec spec;
    spec.n_users = 2;
    spec.n_antennas = 3;
    spec.n_taps = 8;
    spec.decay_taps = 2.0;
    spec.seed = 99;

    const auto a = generate_synthetic(spec);
    const auto b = generate_synthetic(spec);
    for (int i = 0; i < 2; ++i)
        for (int m = 0; m < 3; ++m)
            CHECK(itr::signals::max_abs_diff(a.cir(i, m), b.cir(i, m)) == 0.0);

    // L=1: single Rayleigh-amplitude tap, E|h|^2 = 1
    ChannelSpec one;
    one.n_users = 1;
    one.n_antennas = 1;
    one.n_taps = 1;
    double acc = 0.0;
    const int draws = 20000;
    for (int s = 0; s < draws; ++s) {
        one.seed = static_cast<std::uint64_t>(s);
        acc += itr::signals::energy(generate_synthetic(one).cir(0, 0));
    }
    CHECK(acc / draws == doctest::Approx(1.0).epsilon(0.05));

    // tap-power law at k = 0 and k = decay_taps
    ChannelSpec two;
    two.n_users = 1;
    two.n_antennas = 1;
    two.n_taps = 3;
    two.decay_taps = 2.0;
    double p0 = 0.0, p2 = 0.0;
    for (int s = 0; s < draws; ++s) {
        two.seed = static_cast<std::uint64_t>(s);
        const auto h = generate_synthetic(two).cir(0, 0);
        p0 += std::norm(h.at(0));
        p2 += std::norm(h.at(2));
    }
    CHECK(p0 / draws == doctest::Approx(1.0).epsilon(0.05));
    CHECK(p2 / draws == doctest::Approx(std::exp(-1.0)).epsilon(0.05));

    ChannelSpec bad;
    bad.n_users = 0;
    CHECK_THROWS_AS(generate_synthetic(bad), std::invalid_argument);
    bad = ChannelSpec{};
    bad.decay_taps = 0.0;
    CHECK_THROWS_AS(generate_synthetic(bad), std::invalid_argument);
}

TEST_CASE("normalize_user")
{
    // 3-4-5
    CirSet c345(1, 1, 2, {ComplexSequence(0, {{3, 0}, {4, 0}})}, 1e-8, 0.15);
    const auto n = normalize_user(c345, 0);
    CHECK(itr::signals::max_abs_diff(
              n[0], ComplexSequence(0, {{0.6, 0}, {0.8, 0}})) < 1e-15);

    // two equal antennas
    CirSet sym(1, 2, 1,
               {ComplexSequence(0, {{1, 0}}), ComplexSequence(0, {{1, 0}})},
               1e-8, 0.15);
    const auto ns = normalize_user(sym, 0);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(ns[0].at(0) - cplx{inv_sqrt2, 0}) < 1e-15);
    CHECK(std::abs(ns[1].at(0) - cplx{inv_sqrt2, 0}) < 1e-15);

    // defining property + idempotence on a random bank
    ChannelSpec spec;
    spec.n_users = 1;
    spec.n_antennas = 4;
    spec.n_taps = 16;
    spec.seed = 5;
    const auto set = generate_synthetic(spec);
    const auto norm = normalize_user(set, 0);
    double e = 0.0;
    for (const auto& h : norm)
        e += itr::signals::energy(h);
    CHECK(e == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<ComplexSequence> again = norm;
    CirSet normalized(1, 4, 16, std::move(again), 1e-8, 0.15);
    const auto norm2 = normalize_user(normalized, 0);
    for (int m = 0; m < 4; ++m)
        CHECK(itr::signals::max_abs_diff(norm[static_cast<std::size_t>(m)],
                                         norm2[static_cast<std::size_t>(m)]) <
              1e-12);

    // zero-energy bank errors
    CirSet zero(1, 1, 2, {ComplexSequence(0, {{0, 0}, {0, 0}})}, 1e-8, 0.15);
    CHECK_THROWS_AS(normalize_user(zero, 0), std::domain_error);
}

TEST_CASE("spatial_correlation")
{
    CHECK(spatial_correlation(0.0, 0.15) == doctest::Approx(1.0));
    CHECK(spatial_correlation(0.075, 0.15) == doctest::Approx(0.0).epsilon(1e-12));
    // half-strength point of sinc: x ~ 1.8955, d = x*lambda/(2*pi)
    const double d_half = 1.8955 * 0.15 / (2 * std::numbers::pi);
    CHECK(d_half == doctest::Approx(0.04525).epsilon(1e-3));
    CHECK(spatial_correlation(d_half, 0.15) == doctest::Approx(0.5).epsilon(1e-3));
    for (double d : {0.01, 0.05, 0.1, 0.5, 2.0})
        CHECK(std::abs(spatial_correlation(d, 0.15)) <= 1.0);
    CHECK_THROWS_AS(spatial_correlation(-1.0, 0.15), std::invalid_argument);
    CHECK_THROWS_AS(spatial_correlation(0.1, 0.0), std::invalid_argument);
}

TEST_CASE("displaced mixing")
{
    const int taps = 20000;
    const auto h0 = flat_single(77, taps);

    // d = 0 is the identity
    const auto same = displaced(h0, 0.0, 123);
    CHECK(itr::signals::max_abs_diff(same.cir(0, 0), h0.cir(0, 0)) == 0.0);

    auto empirical_corr = [&](double d) {
        const auto hd = displaced(h0, d, 321);
        cplx cross{0, 0};
        double e0 = 0.0, ed = 0.0;
        for (int k = 0; k < taps; ++k) {
            cross += hd.cir(0, 0).at(k) * std::conj(h0.cir(0, 0).at(k));
            e0 += std::norm(h0.cir(0, 0).at(k));
            ed += std::norm(hd.cir(0, 0).at(k));
        }
        return std::abs(cross) / std::sqrt(e0 * ed);
    };

    // half wavelength: fully decorrelated
    CHECK(empirical_corr(0.075) < 0.05);
    // quarter wavelength: sinc(pi/2) = 2/pi
    CHECK(empirical_corr(0.0375) ==
          doctest::Approx(2.0 / std::numbers::pi).epsilon(0.05));

    // marginal second moment preserved
    const auto hd = displaced(h0, 0.03, 55);
    CHECK(itr::signals::energy(hd.cir(0, 0)) /
              itr::signals::energy(h0.cir(0, 0)) ==
          doctest::Approx(1.0).epsilon(0.05));

    // loaded sets have no variance profile
    TempFile f("itr_test_displaced.cir");
    store(h0, f.path);
    const auto loaded = load(f.path);
    CHECK_THROWS_AS(displaced(loaded, 0.01, 1), std::domain_error);
}

TEST_CASE("store/load round trip")
{
    ChannelSpec spec;
    spec.n_users = 2;
    spec.n_antennas = 2;
    spec.n_taps = 5;
    spec.seed = 31;
    const auto set = generate_synthetic(spec);

    TempFile bin("itr_test_roundtrip.cir");
    store(set, bin.path);
    const auto back = load(bin.path);
    CHECK(back.n_users() == 2);
    CHECK(back.n_antennas() == 2);
    CHECK(back.n_taps() == 5);
    CHECK(back.tap_interval() == set.tap_interval());
    CHECK(back.carrier_wavelength() == set.carrier_wavelength());
    for (int i = 0; i < 2; ++i)
        for (int m = 0; m < 2; ++m)
            CHECK(itr::signals::max_abs_diff(back.cir(i, m), set.cir(i, m)) ==
                  0.0);

    // two stores are byte-identical
    TempFile bin2("itr_test_roundtrip2.cir");
    store(set, bin2.path);
    std::ifstream a(bin.path, std::ios::binary), b(bin2.path, std::ios::binary);
    std::string sa((std::istreambuf_iterator<char>(a)), {});
    std::string sb((std::istreambuf_iterator<char>(b)), {});
    CHECK(sa == sb);

    // truncation reports the missing section
    TempFile trunc("itr_test_trunc.cir");
    {
        std::ofstream os(trunc.path, std::ios::binary);
        os << sa.substr(0, 10);
    }
    CHECK_THROWS_WITH_AS(load(trunc.path),
                         doctest::Contains("truncated at N"),
                         std::runtime_error);

    // header claiming more taps than the file holds
    TempFile liar("itr_test_liar.cir");
    {
        std::string doctored = sa;
        doctored[16] = 9; // bump L
        std::ofstream os(liar.path, std::ios::binary);
        os << doctored.substr(0, doctored.size());
    }
    CHECK_THROWS_WITH_AS(load(liar.path), doctest::Contains("truncated"),
                         std::runtime_error);

    // wrong magic
    TempFile magic("itr_test_magic.cir");
    {
        std::string doctored = sa;
        doctored[0] = 'X';
        std::ofstream os(magic.path, std::ios::binary);
        os << doctored;
    }
    CHECK_THROWS_WITH_AS(load(magic.path), doctest::Contains("magic"),
                         std::runtime_error);
}

TEST_CASE("json mirror round trips identical doubles")
{
    ChannelSpec spec;
    spec.n_users = 1;
    spec.n_antennas = 2;
    spec.n_taps = 7;
    spec.seed = 63;
    const auto set = generate_synthetic(spec);

    TempFile js("itr_test_roundtrip.json");
    store_json(set, js.path);
    const auto back = load_json(js.path);
    for (int m = 0; m < 2; ++m)
        CHECK(itr::signals::max_abs_diff(back.cir(0, m), set.cir(0, m)) == 0.0);
    CHECK(back.tap_interval() == set.tap_interval());

    TempFile bad("itr_test_bad.json");
    {
        std::ofstream os(bad.path);
        os << "{\"magic\": \"CIR1\", \"version\": 1}";
    }
    CHECK_THROWS_WITH_AS(load_json(bad.path), doctest::Contains("missing field"),
                         std::runtime_error);
}
