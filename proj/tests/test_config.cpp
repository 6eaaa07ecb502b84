// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "itr/config.hpp"

using itr::config::Config;
using itr::config::ParseError;

TEST_CASE("defaults parse and expose every section")
{
    const auto cfg = Config::defaults();
    CHECK(cfg.get_int("channel.n_users") == 2);
    CHECK(cfg.get_int("channel.n_antennas") == 8);
    CHECK(cfg.get_int("channel.n_taps") == 256);
    CHECK(cfg.get_double("precoder.epsilon") == doctest::Approx(1e-3));
    CHECK(cfg.get("link.constellation") == "bpsk");
    CHECK(cfg.get_u64_list("experiments.seeds").size() == 30);
    const auto ec = itr::config::to_experiment_config(cfg);
    ec.validate();
}

TEST_CASE("file parsing, overrides, and errors")
{
    const auto path =
        std::filesystem::temp_directory_path() / "itr_test_config.ini";
    {
        std::ofstream os(path);
        os << "# comment\n[channel]\nn_users = 3\n\n[experiments]\n"
              "seeds = 7,8\n";
    }
    auto cfg = Config::parse_file(path);
    CHECK(cfg.get_int("channel.n_users") == 3);
    CHECK(cfg.get_u64_list("experiments.seeds") ==
          std::vector<std::uint64_t>{7, 8});
    // untouched keys keep defaults
    CHECK(cfg.get_int("channel.n_taps") == 256);

    cfg.apply_override("channel.n_taps=64");
    CHECK(cfg.get_int("channel.n_taps") == 64);
    CHECK_THROWS_AS(cfg.apply_override("channel.no_such_key=1"), ParseError);
    CHECK_THROWS_AS(cfg.apply_override("nonsense"), ParseError);

    {
        std::ofstream os(path);
        os << "[channel]\nmade_up = 1\n";
    }
    CHECK_THROWS_AS(Config::parse_file(path), ParseError);

    {
        std::ofstream os(path);
        os << "key_without_section = 1\n";
    }
    CHECK_THROWS_AS(Config::parse_file(path), ParseError);

    CHECK_THROWS_AS(Config::parse_file("/no/such/file.ini"), ParseError);
    std::filesystem::remove(path);
}

TEST_CASE("list and range syntax")
{
    auto cfg = Config::defaults();
    cfg.apply_override("experiments.displacement_grid=0:0.05:0.2");
    const auto grid = cfg.get_double_list("experiments.displacement_grid");
    REQUIRE(grid.size() == 5);
    CHECK(grid.front() == 0.0);
    CHECK(grid.back() == doctest::Approx(0.2));

    cfg.apply_override("experiments.iteration_counts=0, 10, 20");
    CHECK(cfg.get_int_list("experiments.iteration_counts") ==
          std::vector<int>{0, 10, 20});

    cfg.apply_override("experiments.speed_grid=oops");
    CHECK_THROWS_AS(cfg.get_double_list("experiments.speed_grid"), ParseError);
}

TEST_CASE("canonical form is stable and drives the hash")
{
    auto a = Config::defaults();
    auto b = Config::defaults();
    CHECK(a.canonical() == b.canonical());
    b.apply_override("channel.seed=2");
    CHECK(a.canonical() != b.canonical());
    CHECK(itr::experiments::fnv1a64(a.canonical()) !=
          itr::experiments::fnv1a64(b.canonical()));
}
