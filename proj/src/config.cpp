// SPDX-License-Identifier: Apache-2.0
#include "itr/config.hpp"

#include <fstream>
#include <sstream>

namespace itr::config {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

const char* kDefaultConfig = R"(
[channel]
n_users = 2
n_antennas = 8
n_taps = 256
decay_taps = 64
pdp = exponential
tap_interval = 1e-8
carrier_wavelength = 0.15
coherence_multiplier = 1.0
seed = 1

[precoder]
epsilon = 1e-3
n_max = 50
itrdma_small = 20
itrdma_large = 50

[link]
sigma = 0.0
symbol_count = 0
symbol_spacing = 1
constellation = bpsk
noise_seed = 1

[experiments]
seeds = 1:1:30
iteration_counts = 0,10,20,50,100,200,400
epsilon = 0.0
snr_db_displacement = 30
snr_db_speed = 2,10
displacement_grid = 0:0.005:0.2
tau_s = 0.001
speed_grid = 0:10:200
parallelism = 0

[table1]
d_half_m = 0.03
tau_list_s = 0.05,0.01,0.001
)";

} // namespace

Config Config::defaults() { return parse_text(kDefaultConfig); }

Config Config::parse_text(const std::string& text)
{
    Config cfg;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParseError("config line " + std::to_string(lineno) +
                                 ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ParseError("config line " + std::to_string(lineno) +
                                 ": empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("config line " + std::to_string(lineno) +
                             ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ParseError("config line " + std::to_string(lineno) +
                             ": empty key");
        if (section.empty())
            throw ParseError("config line " + std::to_string(lineno) +
                             ": key outside any [section]");
        cfg.kv_[section + "." + key] = value;
    }
    return cfg;
}

Config Config::parse_file(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is)
        throw ParseError("cannot open config file " + path.string());
    std::ostringstream buf;
    buf << is.rdbuf();
    // start from defaults so partial files are valid and every key is known
    Config cfg = defaults();
    for (const auto& [k, v] : parse_text(buf.str()).kv_) {
        if (!cfg.kv_.count(k))
            throw ParseError("unknown config key: " + k);
        cfg.kv_[k] = v;
    }
    return cfg;
}

void Config::apply_override(const std::string& keyval)
{
    const auto eq = keyval.find('=');
    if (eq == std::string::npos)
        throw ParseError("override must be section.key=value: " + keyval);
    const std::string key = trim(keyval.substr(0, eq));
    const std::string value = trim(keyval.substr(eq + 1));
    if (!kv_.count(key))
        throw ParseError("override references unknown config key: " + key);
    kv_[key] = value;
}

const std::string& Config::get(const std::string& key) const
{
    const auto it = kv_.find(key);
    if (it == kv_.end())
        throw ParseError("missing config key: " + key);
    return it->second;
}

double Config::get_double(const std::string& key) const
{
    try {
        std::size_t pos = 0;
        const double v = std::stod(get(key), &pos);
        if (pos != get(key).size())
            throw std::invalid_argument("");
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (...) {
        throw ParseError("config key " + key + " is not a number: " + get(key));
    }
}

int Config::get_int(const std::string& key) const
{
    const double v = get_double(key);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
        throw ParseError("config key " + key + " is not an integer");
    return i;
}

std::uint64_t Config::get_u64(const std::string& key) const
{
    try {
        return std::stoull(get(key));
    } catch (const ParseError&) {
        throw;
    } catch (...) {
        throw ParseError("config key " + key + " is not an unsigned integer");
    }
}

std::vector<double> Config::get_double_list(const std::string& key) const
{
    const std::string& raw = get(key);
    std::vector<double> out;
    auto parse_one = [&](const std::string& tok) {
        try {
            return std::stod(tok);
        } catch (...) {
            throw ParseError("config key " + key + ": bad number '" + tok + "'");
        }
    };
    if (raw.find(':') != std::string::npos) {
        // start:step:stop, inclusive of stop within half a step
        std::istringstream is(raw);
        std::string a, b, c;
        if (!std::getline(is, a, ':') || !std::getline(is, b, ':') ||
            !std::getline(is, c))
            throw ParseError("config key " + key +
                             ": range must be start:step:stop");
        const double start = parse_one(trim(a));
        const double step = parse_one(trim(b));
        const double stop = parse_one(trim(c));
        if (step <= 0.0)
            throw ParseError("config key " + key + ": range step must be > 0");
        for (double v = start; v <= stop + step / 2; v += step)
            out.push_back(v);
        return out;
    }
    std::istringstream is(raw);
    std::string tok;
    while (std::getline(is, tok, ','))
        out.push_back(parse_one(trim(tok)));
    if (out.empty())
        throw ParseError("config key " + key + ": empty list");
    return out;
}

std::vector<int> Config::get_int_list(const std::string& key) const
{
    std::vector<int> out;
    for (double v : get_double_list(key)) {
        const int i = static_cast<int>(v);
        if (static_cast<double>(i) != v)
            throw ParseError("config key " + key + ": non-integer entry");
        out.push_back(i);
    }
    return out;
}

std::vector<std::uint64_t> Config::get_u64_list(const std::string& key) const
{
    std::vector<std::uint64_t> out;
    for (double v : get_double_list(key)) {
        if (v < 0 || static_cast<double>(static_cast<std::uint64_t>(v)) != v)
            throw ParseError("config key " + key + ": bad seed entry");
        out.push_back(static_cast<std::uint64_t>(v));
    }
    return out;
}

std::string Config::canonical() const
{
    std::ostringstream os;
    for (const auto& [k, v] : kv_) // std::map iterates sorted
        os << k << '=' << v << '\n';
    return os.str();
}

experiments::ExperimentConfig to_experiment_config(const Config& cfg)
{
    experiments::ExperimentConfig ec;
    ec.chanspec.n_users = cfg.get_int("channel.n_users");
    ec.chanspec.n_antennas = cfg.get_int("channel.n_antennas");
    ec.chanspec.n_taps = cfg.get_int("channel.n_taps");
    ec.chanspec.decay_taps = cfg.get_double("channel.decay_taps");
    const std::string pdp = cfg.get("channel.pdp");
    if (pdp == "exponential")
        ec.chanspec.pdp = channel::Pdp::Exponential;
    else if (pdp == "flat")
        ec.chanspec.pdp = channel::Pdp::Flat;
    else
        throw ParseError("channel.pdp must be exponential or flat");
    ec.tap_interval = cfg.get_double("channel.tap_interval");
    ec.carrier_wavelength = cfg.get_double("channel.carrier_wavelength");
    ec.coherence_multiplier = cfg.get_double("channel.coherence_multiplier");
    ec.seeds = cfg.get_u64_list("experiments.seeds");
    ec.iteration_counts = cfg.get_int_list("experiments.iteration_counts");
    ec.epsilon = cfg.get_double("experiments.epsilon");
    ec.snr_db_displacement = cfg.get_double("experiments.snr_db_displacement");
    ec.snr_db_speed = cfg.get_double_list("experiments.snr_db_speed");
    ec.displacement_grid = cfg.get_double_list("experiments.displacement_grid");
    ec.tau_s = cfg.get_double("experiments.tau_s");
    ec.speed_grid = cfg.get_double_list("experiments.speed_grid");
    ec.itrdma_small = cfg.get_int("precoder.itrdma_small");
    ec.itrdma_large = cfg.get_int("precoder.itrdma_large");
    ec.parallelism = cfg.get_int("experiments.parallelism");
    ec.config_echo = cfg.canonical();
    return ec;
}

} // namespace itr::config
