#pragma once

// Seeded, replicated Monte Carlo experiments.  Every replication derives its
// own seed from the master seed and replication index, so reports are
// bit-identical across worker counts and reruns.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "tailproc/asymptotics.hpp"
#include "tailproc/errors.hpp"
#include "tailproc/estimators.hpp"
#include "tailproc/models.hpp"
#include "tailproc/stats.hpp"
#include "tailproc/tailcore.hpp"

namespace tailproc {

enum class StatisticKind { hill, theta_hat, theta_tilde, cluster_index, cte, ted };

enum class NormalizationKind { sqrt_k, sqrt_n_fz };

// Seed streams: replications and the pilot path must never collide.
inline constexpr std::uint64_t kReplicationStream = 1;
inline constexpr std::uint64_t kPilotStream = 2;

struct ExperimentConfig {
    ModelSpec model;
    std::size_t n = 0;
    ThresholdSpec threshold = ThresholdSpec::OrderStat(1);
    std::size_t h = 0;
    StatisticKind statistic = StatisticKind::hill;
    std::vector<double> ted_v;  // argument point when statistic == ted
    std::size_t replications = 1;
    std::uint64_t master_seed = 0;
    NormalizationKind normalization = NormalizationKind::sqrt_k;
    double pilot_multiplier = 100.0;
    // Optional CI gate on the variance of the normalized deviations.
    std::optional<double> theory_target;
    double tolerance_rel = 0.25;
};

struct ReplicationRecord {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    double estimate = 0.0;
    double deviation = 0.0;
};

struct McReport {
    std::vector<ReplicationRecord> records;
    std::size_t replications = 0;
    std::size_t failures = 0;
    double center = 0.0;
    double norm_factor = 0.0;
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    double jb_statistic = 0.0;
    double jb_p_value = 0.0;
    std::optional<double> theory_target;
    double relative_error = 0.0;
    bool within_tolerance = true;
    double wall_seconds = 0.0;
    std::uint64_t master_seed = 0;
};

namespace detail {

inline double compute_statistic(const ExperimentConfig& cfg, std::span<const double> x,
                                const ThresholdSpec& threshold) {
    switch (cfg.statistic) {
        case StatisticKind::hill:
            if (threshold.kind != ThresholdSpec::Kind::order_stat)
                throw config_error("hill statistic requires an order-statistic threshold");
            return hill(x, threshold.k).value;
        case StatisticKind::theta_hat:
            return extremal_index_hat(x, cfg.h, threshold.k).value;
        case StatisticKind::theta_tilde:
            return extremal_index_tilde(x, cfg.h, threshold.k).value;
        case StatisticKind::cluster_index:
            return cluster_index_hat(x, cfg.h, threshold.k).value;
        case StatisticKind::cte:
            return cte_hat(x, cfg.h, threshold.k).value;
        case StatisticKind::ted: {
            if (cfg.ted_v.empty()) throw config_error("ted statistic requires an argument point");
            const TedValue tv = ted_multivariate(x, cfg.ted_v, threshold);
            if (tv.degenerate) throw estimator_error("degenerate threshold in ted replication");
            return tv.value;
        }
    }
    throw config_error("unknown statistic");
}

// Scale an order-statistic threshold with the path length so the pilot uses
// the same k/n ratio as the replications.
inline ThresholdSpec scaled_threshold(const ThresholdSpec& t, double factor) {
    if (t.kind == ThresholdSpec::Kind::order_stat)
        return ThresholdSpec::OrderStat(
            static_cast<std::size_t>(std::llround(static_cast<double>(t.k) * factor)));
    return t;
}

// Run fn(i) for i in [0, count) on the requested number of workers.
template <typename Fn>
inline void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace detail

inline std::uint64_t replication_seed(std::uint64_t master_seed, std::size_t index) {
    return mix_seed(master_seed, kReplicationStream, index);
}

inline std::uint64_t pilot_seed(std::uint64_t master_seed) {
    return mix_seed(master_seed, kPilotStream, 0);
}

// Aggregate statistics from per-replication records; a commutative fold, so
// the result does not depend on completion order.
inline McReport aggregate_report(std::vector<ReplicationRecord> records, double center,
                                 double norm_factor, std::optional<double> theory_target,
                                 double tolerance_rel, std::uint64_t master_seed) {
    McReport rep;
    rep.records = std::move(records);
    rep.replications = rep.records.size();
    rep.center = center;
    rep.norm_factor = norm_factor;
    rep.master_seed = master_seed;
    std::vector<double> devs;
    devs.reserve(rep.records.size());
    for (const auto& r : rep.records) {
        if (r.ok)
            devs.push_back(r.deviation);
        else
            ++rep.failures;
    }
    if (rep.failures * 20 > rep.replications)
        throw estimator_error("run_experiment: more than 5% of replications failed");
    if (devs.size() >= 2) {
        rep.mean = mean(devs);
        rep.variance = variance(devs);
        rep.skewness = skewness(devs);
        rep.excess_kurtosis = excess_kurtosis(devs);
        const JarqueBera jb = jarque_bera(devs);
        rep.jb_statistic = jb.statistic;
        rep.jb_p_value = jb.p_value;
    }
    rep.theory_target = theory_target;
    if (theory_target) {
        rep.relative_error = std::abs(rep.variance - *theory_target) / std::abs(*theory_target);
        rep.within_tolerance = rep.relative_error <= tolerance_rel;
    }
    return rep;
}

inline McReport run_experiment(const ExperimentConfig& cfg, unsigned workers = 1) {
    if (cfg.replications < 1) throw config_error("run_experiment: need at least one replication");
    const auto t0 = std::chrono::steady_clock::now();

    // Pilot-estimated centering from one long independent path.
    const std::size_t pilot_n =
        static_cast<std::size_t>(static_cast<double>(cfg.n) * cfg.pilot_multiplier);
    const PathSample pilot = simulate(cfg.model, pilot_n, pilot_seed(cfg.master_seed));
    const ThresholdSpec pilot_threshold =
        detail::scaled_threshold(cfg.threshold, cfg.pilot_multiplier);
    const double center = detail::compute_statistic(cfg, pilot.values, pilot_threshold);

    double norm_factor = 1.0;
    if (cfg.normalization == NormalizationKind::sqrt_k) {
        if (cfg.threshold.kind != ThresholdSpec::Kind::order_stat)
            throw config_error("sqrt_k normalization requires an order-statistic threshold");
        norm_factor = std::sqrt(static_cast<double>(cfg.threshold.k));
    } else {
        throw config_error("sqrt_n_fz normalization is only used by counterexample_experiment");
    }

    std::vector<ReplicationRecord> records(cfg.replications);
    detail::parallel_for(cfg.replications, workers, [&](std::size_t i) {
        ReplicationRecord& r = records[i];
        r.index = i;
        r.seed = replication_seed(cfg.master_seed, i);
        try {
            const PathSample path = simulate(cfg.model, cfg.n, r.seed);
            r.estimate = detail::compute_statistic(cfg, path.values, cfg.threshold);
            r.deviation = norm_factor * (r.estimate - center);
            r.ok = true;
        } catch (const std::exception& e) {
            r.ok = false;
            r.error = e.what();
        }
    });

    McReport rep = aggregate_report(std::move(records), center, norm_factor, cfg.theory_target,
                                    cfg.tolerance_rel, cfg.master_seed);
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

// One run_experiment per k, with per-cell master seeds mixed from the shared
// master seed and the k index so cells are independent but reproducible.
inline std::vector<McReport> sweep_k(ExperimentConfig cfg, std::span<const std::size_t> k_grid,
                                     unsigned workers = 1) {
    std::vector<McReport> out;
    out.reserve(k_grid.size());
    const std::uint64_t shared = cfg.master_seed;
    for (std::size_t i = 0; i < k_grid.size(); ++i) {
        cfg.threshold = ThresholdSpec::OrderStat(k_grid[i]);
        cfg.master_seed = k_grid.size() == 1 ? shared : mix_seed(shared, 3, i);
        out.push_back(run_experiment(cfg, workers));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Renewal-chain counterexample experiment
// ---------------------------------------------------------------------------

enum class CounterexampleRegime { degenerate, stable, gaussian };

struct CounterexampleReport {
    CounterexampleRegime regime = CounterexampleRegime::gaussian;
    double beta = 0.0;
    double u = 0.0;
    double u_exponent = 0.0;
    double n_fz = 0.0;          // n * P(Z > u)
    double n_fx_hat = 0.0;      // n * pilot exceedance fraction at u
    std::vector<double> s_grid;
    std::vector<std::uint64_t> seeds;
    // deviations[r][s]: normalized deviation of replication r at s_grid[s].
    std::vector<std::vector<double>> deviations;
    std::vector<double> variance_per_s;
    double covariance_01 = 0.0;  // between the first two grid points
    double exceedance_fraction = 0.0;  // fraction of replications with any X_j > u
    double tail_index_estimate = 0.0;  // Hill on |deviations| at s_grid[0] (stable regime)
    double jb_p_value = 1.0;
    double wall_seconds = 0.0;
    std::uint64_t master_seed = 0;

    const char* regime_name() const {
        switch (regime) {
            case CounterexampleRegime::degenerate: return "degenerate";
            case CounterexampleRegime::stable: return "stable";
            case CounterexampleRegime::gaussian: return "gaussian";
        }
        return "?";
    }
};

// Three-regime experiment for the descent/renewal chain with u = n^a.
// Normalized deviations use sqrt(n F_Z_bar(u)) in the Gaussian regime and
// n F_X_bar(u) / n^{1/beta} in the stable regime; the degenerate regime
// reports the fraction of replications seeing any exceedance.
inline CounterexampleReport counterexample_experiment(
    const RenewalChainSpec& spec, std::size_t n, double u_exponent,
    std::span<const double> s_grid, std::size_t replications, std::uint64_t master_seed,
    unsigned workers = 1, double pilot_multiplier = 100.0) {
    if (s_grid.empty()) throw config_error("counterexample_experiment: empty s grid");
    const auto t0 = std::chrono::steady_clock::now();
    CounterexampleReport rep;
    rep.beta = spec.beta;
    rep.u_exponent = u_exponent;
    rep.u = std::pow(static_cast<double>(n), u_exponent);
    rep.s_grid.assign(s_grid.begin(), s_grid.end());
    rep.master_seed = master_seed;

    const double fz = std::pow(std::floor(rep.u), -spec.beta);  // P(Z > u), exact
    rep.n_fz = static_cast<double>(n) * fz;
    if (rep.n_fz < 1.0)
        rep.regime = CounterexampleRegime::degenerate;
    else if (spec.beta > 2.0)
        rep.regime = CounterexampleRegime::gaussian;
    else
        rep.regime = CounterexampleRegime::stable;

    // Pilot path for the centering and the empirical marginal tail at u.
    const std::size_t pilot_n =
        static_cast<std::size_t>(static_cast<double>(n) * pilot_multiplier);
    const PathSample pilot = simulate_renewal_chain(spec, pilot_n, pilot_seed(master_seed));
    std::vector<std::size_t> pilot_counts(s_grid.size(), 0);
    std::size_t pilot_at_u = 0;
    for (double v : pilot.values) {
        if (v > rep.u) ++pilot_at_u;
        for (std::size_t s = 0; s < s_grid.size(); ++s)
            if (v > rep.u * s_grid[s]) ++pilot_counts[s];
    }
    const double fx_hat = static_cast<double>(pilot_at_u) / static_cast<double>(pilot_n);
    rep.n_fx_hat = static_cast<double>(n) * fx_hat;
    std::vector<double> center(s_grid.size());
    for (std::size_t s = 0; s < s_grid.size(); ++s)
        center[s] = static_cast<double>(pilot_counts[s]) /
                    (static_cast<double>(pilot_n) * fx_hat);

    double norm = 0.0;
    switch (rep.regime) {
        case CounterexampleRegime::gaussian:
            norm = std::sqrt(rep.n_fz);
            break;
        case CounterexampleRegime::stable:
            norm = static_cast<double>(n) * fx_hat /
                   std::pow(static_cast<double>(n), 1.0 / spec.beta);
            break;
        case CounterexampleRegime::degenerate:
            norm = 1.0;
            break;
    }

    rep.deviations.assign(replications, std::vector<double>(s_grid.size(), 0.0));
    rep.seeds.resize(replications);
    std::vector<char> any_exceed(replications, 0);
    detail::parallel_for(replications, workers, [&](std::size_t r) {
        const std::uint64_t seed = replication_seed(master_seed, r);
        rep.seeds[r] = seed;
        const PathSample path = simulate_renewal_chain(spec, n, seed);
        for (std::size_t s = 0; s < s_grid.size(); ++s) {
            std::size_t count = 0;
            const double level = rep.u * s_grid[s];
            for (double v : path.values)
                if (v > level) ++count;
            const double ted = static_cast<double>(count) /
                               (static_cast<double>(n) * fx_hat);
            rep.deviations[r][s] = norm * (ted - center[s]);
        }
        for (double v : path.values) {
            if (v > rep.u) {
                any_exceed[r] = 1;
                break;
            }
        }
    });

    std::size_t exceed_count = 0;
    for (char c : any_exceed) exceed_count += static_cast<std::size_t>(c);
    rep.exceedance_fraction =
        static_cast<double>(exceed_count) / static_cast<double>(replications);

    std::vector<double> first(replications);
    for (std::size_t r = 0; r < replications; ++r) first[r] = rep.deviations[r][0];
    rep.variance_per_s.resize(s_grid.size());
    for (std::size_t s = 0; s < s_grid.size(); ++s) {
        std::vector<double> col(replications);
        for (std::size_t r = 0; r < replications; ++r) col[r] = rep.deviations[r][s];
        rep.variance_per_s[s] = variance(col);
    }
    if (s_grid.size() >= 2) {
        std::vector<double> second(replications);
        for (std::size_t r = 0; r < replications; ++r) second[r] = rep.deviations[r][1];
        rep.covariance_01 = covariance(first, second);
    }
    rep.jb_p_value = jarque_bera(first).p_value;
    if (rep.regime == CounterexampleRegime::stable) {
        std::vector<double> abs_dev(replications);
        for (std::size_t r = 0; r < replications; ++r) abs_dev[r] = std::abs(first[r]);
        const std::size_t k_tail = std::max<std::size_t>(10, replications / 6);
        const double gamma = hill(abs_dev, k_tail).value;
        rep.tail_index_estimate = gamma > 0.0 ? 1.0 / gamma : 0.0;
    }
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

}  // namespace tailproc
