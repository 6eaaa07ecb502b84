// SPDX-License-Identifier: Apache-2.0
#include "itr/precoder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace itr::precoder {

ResidualGrid::ResidualGrid(int n_users, int n_taps)
    : n_users_(n_users), half_window_(n_taps - 1),
      delta_(static_cast<std::size_t>(n_users) * (2 * n_taps - 1),
             cplx{0.0, 0.0})
{
    if (n_users < 1 || n_taps < 1)
        throw std::invalid_argument("ResidualGrid: dimensions must be >= 1");
}

cplx ResidualGrid::at(int user, long lag) const
{
    if (user < 0 || user >= n_users_ || lag < -half_window_ || lag > half_window_)
        throw std::out_of_range("ResidualGrid::at");
    return delta_[static_cast<std::size_t>(user) * (2 * half_window_ + 1) +
                  (lag + half_window_)];
}

void ResidualGrid::set(int user, long lag, cplx v)
{
    delta_[static_cast<std::size_t>(user) * (2 * half_window_ + 1) +
           (lag + half_window_)] = v;
}

void ResidualGrid::add(int user, long lag, cplx v)
{
    delta_[static_cast<std::size_t>(user) * (2 * half_window_ + 1) +
           (lag + half_window_)] += v;
}

double ResidualGrid::max_abs() const
{
    double m = 0.0;
    for (const auto& v : delta_)
        m = std::max(m, std::abs(v));
    return m;
}

std::pair<int, long> ResidualGrid::argmax() const
{
    // smallest lag, then smallest user, wins ties
    int best_user = 0;
    long best_lag = -half_window_;
    double best = -1.0;
    for (long lag = -half_window_; lag <= half_window_; ++lag)
        for (int i = 0; i < n_users_; ++i) {
            const double m = std::abs(at(i, lag));
            if (m > best) {
                best = m;
                best_user = i;
                best_lag = lag;
            }
        }
    return {best_user, best_lag};
}

CorrelationBank normalized_correlation_bank(const CirSet& cirset)
{
    const int n = cirset.n_users();
    std::vector<std::vector<ComplexSequence>> norm;
    norm.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        norm.push_back(channel::normalize_user(cirset, i));

    CorrelationBank bank(static_cast<std::size_t>(n),
                         std::vector<ComplexSequence>(static_cast<std::size_t>(n)));
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            ComplexSequence r;
            for (int m = 0; m < cirset.n_antennas(); ++m)
                r = signals::accumulate_shifted(
                    r, 1.0, 0,
                    signals::crosscorr(norm[static_cast<std::size_t>(j)]
                                           [static_cast<std::size_t>(m)],
                                       norm[static_cast<std::size_t>(i)]
                                           [static_cast<std::size_t>(m)]));
            bank[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
                std::move(r);
        }
    return bank;
}

namespace {

void energy_normalize(std::vector<ComplexSequence>& s)
{
    double e = 0.0;
    for (const auto& seq : s)
        e += signals::energy(seq);
    if (e <= 0.0)
        throw std::domain_error("precoder has zero energy");
    const double inv = 1.0 / std::sqrt(e);
    for (auto& seq : s)
        seq = signals::scale(seq, inv);
}

} // namespace

std::vector<ComplexSequence> tr_precoder(const CirSet& cirset, int i0)
{
    const auto norm = channel::normalize_user(cirset, i0);
    const long pivot = cirset.n_taps() - 1;
    std::vector<ComplexSequence> s;
    s.reserve(norm.size());
    for (const auto& h : norm)
        s.push_back(signals::time_reverse_conj(h, pivot));
    // the same final normalization ITRDMA applies, so a zero-iteration ITRDMA
    // run is bit-identical to TR
    energy_normalize(s);
    return s;
}

namespace {

// One ITRDMA run; invokes snapshot(n, s_prenorm, grid) after iteration n
// completes (and once for n = 0 before the loop).
template <typename Snapshot>
ItrdmaResult itrdma_run(const CirSet& cirset, int i0, double epsilon, int n_max,
                        Snapshot&& snapshot)
{
    if (epsilon < 0.0)
        throw std::invalid_argument("itrdma: epsilon must be >= 0");
    if (n_max < 0)
        throw std::invalid_argument("itrdma: n_max must be >= 0");
    if (i0 < 0 || i0 >= cirset.n_users())
        throw std::out_of_range("itrdma: bad target user");

    const int n_users = cirset.n_users();
    const long pivot = cirset.n_taps() - 1;
    const auto bank = normalized_correlation_bank(cirset);

    // time-reversed normalized CIRs per (user, antenna), reused each iteration
    std::vector<std::vector<ComplexSequence>> trc(
        static_cast<std::size_t>(n_users));
    for (int i = 0; i < n_users; ++i) {
        const auto norm = channel::normalize_user(cirset, i);
        for (const auto& h : norm)
            trc[static_cast<std::size_t>(i)].push_back(
                signals::time_reverse_conj(h, pivot));
    }

    std::vector<ComplexSequence> s = trc[static_cast<std::size_t>(i0)];

    ResidualGrid grid(n_users, cirset.n_taps());
    for (int i = 0; i < n_users; ++i) {
        const auto& r = bank[static_cast<std::size_t>(i)]
                            [static_cast<std::size_t>(i0)];
        for (long lag = -grid.half_window(); lag <= grid.half_window(); ++lag)
            grid.set(i, lag, r.at(lag));
    }
    grid.add(i0, 0, cplx{-1.0, 0.0});

    snapshot(0, s, grid);

    int n = 0;
    while (n < n_max && grid.max_abs() > epsilon) {
        const auto [i_hat, tau_hat] = grid.argmax();
        const cplx c = grid.at(i_hat, tau_hat);

        for (std::size_t m = 0; m < s.size(); ++m)
            s[m] = signals::accumulate_shifted(
                s[m], -c, tau_hat, trc[static_cast<std::size_t>(i_hat)][m]);

        for (int i = 0; i < n_users; ++i) {
            const auto& r = bank[static_cast<std::size_t>(i)]
                                [static_cast<std::size_t>(i_hat)];
            for (long lag = -grid.half_window(); lag <= grid.half_window(); ++lag)
                grid.add(i, lag, -c * r.at(lag - tau_hat));
        }

        grid.trace.push_back({n, i_hat, tau_hat, c, grid.max_abs()});
        ++n;
        snapshot(n, s, grid);
    }

    ItrdmaResult out{std::move(s), std::move(grid), n};
    energy_normalize(out.s);
    return out;
}

} // namespace

ItrdmaResult itrdma_precoder(const CirSet& cirset, int i0, double epsilon,
                             int n_max)
{
    return itrdma_run(cirset, i0, epsilon, n_max,
                      [](int, const auto&, const auto&) {});
}

ItrdmaResult itrdma_precoder_observed(const CirSet& cirset, int i0,
                                      double epsilon, int n_max,
                                      const IterationObserver& observer)
{
    return itrdma_run(cirset, i0, epsilon, n_max, observer);
}

std::vector<std::vector<ComplexSequence>>
itrdma_checkpoints(const CirSet& cirset, int i0, double epsilon,
                   const std::vector<int>& checkpoints)
{
    if (checkpoints.empty())
        return {};
    if (!std::is_sorted(checkpoints.begin(), checkpoints.end()))
        throw std::invalid_argument("itrdma_checkpoints: not sorted");
    std::vector<std::vector<ComplexSequence>> out;
    out.reserve(checkpoints.size());
    std::size_t next = 0;
    auto take = [&](const std::vector<ComplexSequence>& s) {
        auto copy = s;
        energy_normalize(copy);
        out.push_back(std::move(copy));
    };
    auto result = itrdma_run(
        cirset, i0, epsilon, checkpoints.back(),
        [&](int n, const std::vector<ComplexSequence>& s, const ResidualGrid&) {
            while (next < checkpoints.size() &&
                   checkpoints[next] == n) {
                take(s);
                ++next;
            }
        });
    // loop may stop early (epsilon reached): remaining checkpoints see the
    // final precoder
    while (next < checkpoints.size()) {
        out.push_back(result.s);
        ++next;
    }
    return out;
}

PrecoderSet build_tr(const CirSet& cirset)
{
    PrecoderSet set;
    set.kind = PrecoderKind::TR;
    set.n_users = cirset.n_users();
    set.n_antennas = cirset.n_antennas();
    for (int i0 = 0; i0 < cirset.n_users(); ++i0) {
        set.s.push_back(tr_precoder(cirset, i0));
        set.iterations_used.push_back(0);
    }
    return set;
}

PrecoderSet build_itrdma(const CirSet& cirset, double epsilon, int n_max)
{
    PrecoderSet set;
    set.kind = PrecoderKind::ITRDMA;
    set.n_users = cirset.n_users();
    set.n_antennas = cirset.n_antennas();
    set.epsilon = epsilon;
    set.n_max = n_max;
    for (int i0 = 0; i0 < cirset.n_users(); ++i0) {
        auto r = itrdma_precoder(cirset, i0, epsilon, n_max);
        set.s.push_back(std::move(r.s));
        set.iterations_used.push_back(r.iterations_used);
    }
    return set;
}

double residual_consistency_check(const CirSet& cirset, int i0,
                                  const std::vector<ComplexSequence>& s_prenorm,
                                  const ResidualGrid& grid)
{
    const long pivot = cirset.n_taps() - 1;
    double worst = 0.0;
    for (int i = 0; i < cirset.n_users(); ++i) {
        const auto norm = channel::normalize_user(cirset, i);
        ComplexSequence field;
        for (std::size_t m = 0; m < s_prenorm.size(); ++m)
            field = signals::accumulate_shifted(
                field, 1.0, 0, signals::convolve(norm[m], s_prenorm[m]));
        for (long lag = -grid.half_window(); lag <= grid.half_window(); ++lag) {
            cplx expect = field.at(pivot + lag);
            if (i == i0 && lag == 0)
                expect -= 1.0;
            worst = std::max(worst, std::abs(grid.at(i, lag) - expect));
        }
    }
    return worst;
}

namespace {

nlohmann::json seq_to_json(const ComplexSequence& s)
{
    nlohmann::json j;
    j["start"] = s.start();
    auto& taps = j["taps"] = nlohmann::json::array();
    for (const auto& v : s.taps())
        taps.push_back({v.real(), v.imag()});
    return j;
}

ComplexSequence seq_from_json(const nlohmann::json& j)
{
    std::vector<cplx> taps;
    for (const auto& t : j.at("taps"))
        taps.emplace_back(t.at(0).get<double>(), t.at(1).get<double>());
    return {j.at("start").get<long>(), std::move(taps)};
}

} // namespace

void store_json(const PrecoderSet& set, const std::filesystem::path& path)
{
    nlohmann::json j;
    j["kind"] = set.kind == PrecoderKind::TR ? "TR" : "ITRDMA";
    j["n_users"] = set.n_users;
    j["n_antennas"] = set.n_antennas;
    j["epsilon"] = set.epsilon;
    j["n_max"] = set.n_max;
    j["iterations_used"] = set.iterations_used;
    auto& seqs = j["s"] = nlohmann::json::array();
    for (const auto& user : set.s) {
        nlohmann::json row = nlohmann::json::array();
        for (const auto& seq : user)
            row.push_back(seq_to_json(seq));
        seqs.push_back(std::move(row));
    }
    std::ofstream os(path, std::ios::trunc);
    if (!os)
        throw std::runtime_error("store_json: cannot open " + path.string());
    os << j.dump(1) << '\n';
}

PrecoderSet load_json(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("load_json: cannot open " + path.string());
    nlohmann::json j;
    is >> j;
    PrecoderSet set;
    const std::string kind = j.at("kind");
    if (kind == "TR")
        set.kind = PrecoderKind::TR;
    else if (kind == "ITRDMA")
        set.kind = PrecoderKind::ITRDMA;
    else
        throw std::runtime_error("load_json: unknown precoder kind " + kind);
    set.n_users = j.at("n_users");
    set.n_antennas = j.at("n_antennas");
    set.epsilon = j.at("epsilon");
    set.n_max = j.at("n_max");
    set.iterations_used = j.at("iterations_used").get<std::vector<int>>();
    for (const auto& row : j.at("s")) {
        std::vector<ComplexSequence> user;
        for (const auto& seq : row)
            user.push_back(seq_from_json(seq));
        set.s.push_back(std::move(user));
    }
    if (set.s.size() != static_cast<std::size_t>(set.n_users))
        throw std::runtime_error("load_json: user count mismatch");
    for (const auto& user : set.s)
        if (user.size() != static_cast<std::size_t>(set.n_antennas))
            throw std::runtime_error("load_json: antenna count mismatch");
    return set;
}

void store_trace_csv(const std::vector<TraceEntry>& trace,
                     const std::filesystem::path& path)
{
    std::ofstream os(path, std::ios::trunc);
    if (!os)
        throw std::runtime_error("store_trace_csv: cannot open " + path.string());
    os << "n,i_hat,tau_hat,re,im,max_abs_delta_after\n";
    os.precision(17);
    for (const auto& t : trace)
        os << t.iteration << ',' << t.user << ',' << t.lag << ','
           << t.residual.real() << ',' << t.residual.imag() << ','
           << t.max_abs_after << '\n';
}

} // namespace itr::precoder
