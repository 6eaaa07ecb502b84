// SPDX-License-Identifier: Apache-2.0
//
// trsim: command-line front end for the time-reversal / ITRDMA link simulator.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "itr/channel.hpp"
#include "itr/config.hpp"
#include "itr/experiments.hpp"
#include "itr/link.hpp"
#include "itr/precoder.hpp"

namespace fs = std::filesystem;
using itr::config::Config;

namespace {

constexpr const char* kVersion = "trsim 1.0.0 (cir-format 1, precoder-format 1)";

struct MissingInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require_file(const fs::path& p)
{
    if (!fs::exists(p))
        throw MissingInput("input file does not exist: " + p.string());
}

bool is_json(const fs::path& p) { return p.extension() == ".json"; }

itr::channel::CirSet load_cirset(const fs::path& p)
{
    require_file(p);
    return is_json(p) ? itr::channel::load_json(p) : itr::channel::load(p);
}

void store_cirset_atomic(const itr::channel::CirSet& set, const fs::path& p)
{
    fs::path tmp = p;
    tmp += ".tmp";
    if (is_json(p))
        itr::channel::store_json(set, tmp);
    else
        itr::channel::store(set, tmp);
    fs::rename(tmp, p);
}

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string outdir = ".";
    long long seed = -1;
};

void add_common(CLI::App* sub, CommonArgs& args)
{
    sub->add_option("--config", args.config_path, "config file (INI-style)");
    sub->add_option("-D,--set", args.overrides,
                    "override a config key, section.key=value");
    sub->add_option("--outdir", args.outdir, "output directory");
    sub->add_option("--seed", args.seed, "override channel.seed");
}

Config load_config(const CommonArgs& args)
{
    Config cfg = args.config_path.empty()
                     ? Config::defaults()
                     : Config::parse_file(args.config_path);
    for (const auto& o : args.overrides)
        cfg.apply_override(o);
    if (args.seed >= 0)
        cfg.apply_override("channel.seed=" + std::to_string(args.seed));
    return cfg;
}

void print_hash(const Config& cfg)
{
    std::ostringstream os;
    os << std::hex << itr::experiments::fnv1a64(cfg.canonical());
    std::cout << "config_hash=" << os.str() << '\n';
}

itr::channel::ChannelSpec channel_spec(const Config& cfg)
{
    auto ec = itr::config::to_experiment_config(cfg);
    auto spec = ec.chanspec;
    spec.seed = cfg.get_u64("channel.seed");
    return spec;
}

int cmd_gen_channel(const CommonArgs& args, const std::string& out)
{
    Config cfg = load_config(args);
    auto ec = itr::config::to_experiment_config(cfg);
    auto spec = channel_spec(cfg);
    auto set = itr::channel::generate_synthetic(spec, ec.tap_interval,
                                                ec.carrier_wavelength);
    fs::path path = fs::path(args.outdir) / out;
    store_cirset_atomic(set, path);
    print_hash(cfg);
    std::cout << "wrote " << path.string() << '\n';
    return 0;
}

int cmd_precode(const CommonArgs& args, const std::string& channel_file,
                const std::string& out, std::string kind, int n_max_flag)
{
    Config cfg = load_config(args);
    auto set = load_cirset(channel_file);
    const double epsilon = cfg.get_double("precoder.epsilon");
    int n_max = n_max_flag >= 0 ? n_max_flag : cfg.get_int("precoder.n_max");
    if (kind.empty())
        kind = "itrdma";

    fs::path path = fs::path(args.outdir) / out;

    itr::precoder::PrecoderSet pre;
    if (kind == "tr") {
        pre = itr::precoder::build_tr(set);
    } else if (kind == "itrdma") {
        pre.kind = itr::precoder::PrecoderKind::ITRDMA;
        pre.n_users = set.n_users();
        pre.n_antennas = set.n_antennas();
        pre.epsilon = epsilon;
        pre.n_max = n_max;
        for (int i0 = 0; i0 < set.n_users(); ++i0) {
            auto r = itr::precoder::itrdma_precoder(set, i0, epsilon, n_max);
            pre.s.push_back(std::move(r.s));
            pre.iterations_used.push_back(r.iterations_used);
            fs::path trace = path;
            trace += ".trace.user" + std::to_string(i0) + ".csv";
            fs::path ttmp = trace;
            ttmp += ".tmp";
            itr::precoder::store_trace_csv(r.grid.trace, ttmp);
            fs::rename(ttmp, trace);
        }
    } else {
        throw itr::config::ParseError("precoder kind must be tr or itrdma");
    }

    fs::path tmp = path;
    tmp += ".tmp";
    itr::precoder::store_json(pre, tmp);
    fs::rename(tmp, path);
    print_hash(cfg);
    std::cout << "wrote " << path.string() << '\n';
    return 0;
}

int cmd_evaluate(const CommonArgs& args, const std::string& channel_file,
                 const std::string& precoder_file, const std::string& out)
{
    Config cfg = load_config(args);
    auto set = load_cirset(channel_file);
    require_file(precoder_file);
    auto pre = itr::precoder::load_json(precoder_file);

    const double sigma = cfg.get_double("link.sigma");
    const int symbol_count = cfg.get_int("link.symbol_count");
    const std::string cname = cfg.get("link.constellation");
    itr::link::Constellation constellation;
    if (cname == "bpsk")
        constellation = itr::link::Constellation::BPSK;
    else if (cname == "qpsk")
        constellation = itr::link::Constellation::QPSK;
    else
        throw itr::config::ParseError("link.constellation must be bpsk or qpsk");

    auto report = itr::link::evaluate(set, pre, sigma, symbol_count,
                                      cfg.get_u64("link.noise_seed"),
                                      constellation);
    report.config_echo = cfg.canonical();

    fs::path path = fs::path(args.outdir) / out;
    fs::path tmp = path;
    tmp += ".tmp";
    report.write_json(tmp);
    fs::rename(tmp, path);

    fs::path csv = path;
    csv.replace_extension(".csv");
    fs::path ctmp = csv;
    ctmp += ".tmp";
    {
        std::ofstream os(ctmp, std::ios::trunc);
        os << "scenario_id,user,sir_db,sinr_db,sigma,ber,iterations,"
              "displacement_m,speed_mps\n";
        report.append_csv(os, "evaluate", pre.iterations_used, 0.0, 0.0);
    }
    fs::rename(ctmp, csv);
    print_hash(cfg);
    std::cout << "wrote " << path.string() << " and " << csv.string() << '\n';
    return 0;
}

int cmd_sweep_iterations(const CommonArgs& args)
{
    Config cfg = load_config(args);
    auto ec = itr::config::to_experiment_config(cfg);
    auto sweep = itr::experiments::sweep_iterations(ec);
    fs::path path = fs::path(args.outdir) / "fig3_sir_vs_iter.csv";
    itr::experiments::write_iteration_csv(sweep, ec, path);
    print_hash(cfg);
    std::cout << "wrote " << path.string() << '\n';
    return 0;
}

int cmd_sweep_displacement(const CommonArgs& args)
{
    Config cfg = load_config(args);
    auto ec = itr::config::to_experiment_config(cfg);
    auto sweep = itr::experiments::sweep_displacement(ec);
    fs::path path = fs::path(args.outdir) / "fig5_sinr_vs_disp.csv";
    itr::experiments::write_displacement_csv(sweep, ec, path);
    print_hash(cfg);
    std::cout << "wrote " << path.string() << '\n';
    return 0;
}

int cmd_sweep_speed(const CommonArgs& args)
{
    Config cfg = load_config(args);
    auto ec = itr::config::to_experiment_config(cfg);
    auto sweep = itr::experiments::sweep_speed(ec);
    fs::path path = fs::path(args.outdir) / "fig6_sinr_vs_speed.csv";
    itr::experiments::write_speed_csv(sweep, ec, path);
    print_hash(cfg);
    std::cout << "wrote " << path.string() << '\n';
    return 0;
}

int cmd_table1(const CommonArgs& args)
{
    Config cfg = load_config(args);
    auto ec = itr::config::to_experiment_config(cfg);
    fs::path path = fs::path(args.outdir) / "table1_speed.csv";
    itr::experiments::write_table1_csv(cfg.get_double_list("table1.tau_list_s"),
                                       cfg.get_double("table1.d_half_m"), ec,
                                       path);
    print_hash(cfg);
    std::cout << "wrote " << path.string() << '\n';
    return 0;
}

int cmd_profiles(const CommonArgs& args, bool map)
{
    Config cfg = load_config(args);
    auto ec = itr::config::to_experiment_config(cfg);
    auto rows = itr::experiments::focusing_profile(ec, map);
    fs::path path = fs::path(args.outdir) / "fig2_profiles.csv";
    itr::experiments::write_profile_csv(rows, ec, path);
    print_hash(cfg);
    std::cout << "wrote " << path.string() << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"time-reversal / ITRDMA multi-user MISO link simulator"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(0, 1);

    bool print_defaults = false;
    app.add_flag("--print-defaults", print_defaults,
                 "print the full default config and exit");

    CommonArgs gen_args, pre_args, eval_args, it_args, disp_args, speed_args,
        tab_args, prof_args;

    auto* gen = app.add_subcommand("gen-channel", "generate a synthetic CIR set");
    add_common(gen, gen_args);
    std::string gen_out = "channel.cir";
    gen->add_option("--out", gen_out, "output file (.cir binary or .json)");

    auto* pre = app.add_subcommand("precode", "compute TR/ITRDMA precoders");
    add_common(pre, pre_args);
    std::string pre_channel, pre_out = "precoder.json", pre_kind;
    int pre_nmax = -1;
    pre->add_option("--channel", pre_channel, "CIR set file")->required();
    pre->add_option("--out", pre_out, "output precoder JSON");
    pre->add_option("--kind", pre_kind, "tr or itrdma (default itrdma)");
    pre->add_option("--n-max", pre_nmax, "iteration cap (default from config)");

    auto* ev = app.add_subcommand("evaluate", "evaluate a precoder on a channel");
    add_common(ev, eval_args);
    std::string ev_channel, ev_precoder, ev_out = "report.json";
    ev->add_option("--channel", ev_channel, "CIR set file")->required();
    ev->add_option("--precoder", ev_precoder, "precoder JSON")->required();
    ev->add_option("--out", ev_out, "output report JSON");

    auto* swi = app.add_subcommand("sweep-iterations", "SIR vs iteration count");
    add_common(swi, it_args);
    auto* swd = app.add_subcommand("sweep-displacement", "SINR vs displacement");
    add_common(swd, disp_args);
    auto* sws = app.add_subcommand("sweep-speed", "SINR vs user speed");
    add_common(sws, speed_args);
    auto* tab = app.add_subcommand("table1", "half-strength speed table");
    add_common(tab, tab_args);
    auto* prof = app.add_subcommand("profiles", "focusing profiles");
    add_common(prof, prof_args);
    bool prof_map = false;
    prof->add_flag("--map", prof_map,
                   "emit profiles across the displacement grid");

    CLI11_PARSE(app, argc, argv);

    if (print_defaults) {
        std::cout << Config::defaults().canonical();
        return 0;
    }
    if (app.get_subcommands().empty()) {
        std::cerr << app.help();
        return 1;
    }

    try {
        if (gen->parsed())
            return cmd_gen_channel(gen_args, gen_out);
        if (pre->parsed())
            return cmd_precode(pre_args, pre_channel, pre_out, pre_kind,
                               pre_nmax);
        if (ev->parsed())
            return cmd_evaluate(eval_args, ev_channel, ev_precoder, ev_out);
        if (swi->parsed())
            return cmd_sweep_iterations(it_args);
        if (swd->parsed())
            return cmd_sweep_displacement(disp_args);
        if (sws->parsed())
            return cmd_sweep_speed(speed_args);
        if (tab->parsed())
            return cmd_table1(tab_args);
        if (prof->parsed())
            return cmd_profiles(prof_args, prof_map);
    } catch (const itr::config::ParseError& e) {
        std::cerr << "config_parse_error: " << e.what() << '\n';
        return 2;
    } catch (const MissingInput& e) {
        std::cerr << "missing_input: " << e.what() << '\n';
        return 3;
    } catch (const std::domain_error& e) {
        std::cerr << "numeric_failure: " << e.what() << '\n';
        return 5;
    } catch (const std::invalid_argument& e) {
        std::cerr << "dimension_mismatch: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "internal_error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
