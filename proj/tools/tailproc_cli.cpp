// Command-line entry point: wires JSON configs to the library modules and
// emits CSV/JSON reports.  All randomness flows from the master seed in the
// config (or --seed); nothing is ever seeded from the clock.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tailproc/serialize.hpp"

namespace fs = std::filesystem;
using tailproc::json;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    unsigned workers = 1;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "JSON config file")->required();
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--seed", opts.seed, "override the master seed");
    cmd->add_option("--workers", opts.workers, "worker thread count (does not affect results)");
    cmd->add_option("--override", opts.overrides,
                    "dotted-path JSON override, e.g. model.phi=[0.5]");
}

// Apply key=value overrides along dotted paths; values parse as JSON when
// possible and fall back to strings.
void apply_overrides(json& cfg, const std::vector<std::string>& overrides) {
    for (const std::string& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw tailproc::config_error("override must be key=value: " + ov);
        const std::string path = ov.substr(0, eq);
        const std::string raw = ov.substr(eq + 1);
        json value;
        try {
            value = json::parse(raw);
        } catch (const json::parse_error&) {
            value = raw;
        }
        json* node = &cfg;
        std::size_t pos = 0;
        for (;;) {
            const auto dot = path.find('.', pos);
            const std::string key = path.substr(pos, dot - pos);
            if (dot == std::string::npos) {
                (*node)[key] = value;
                break;
            }
            node = &(*node)[key];
            pos = dot + 1;
        }
    }
}

json load_config(const CommonOpts& opts) {
    json cfg = tailproc::load_json_file(opts.config_path);
    apply_overrides(cfg, opts.overrides);
    if (opts.seed) {
        if (cfg.contains("master_seed"))
            cfg["master_seed"] = *opts.seed;
        else
            cfg["seed"] = *opts.seed;
    }
    return cfg;
}

std::string out_path(const CommonOpts& opts, const std::string& name) {
    fs::create_directories(opts.out_dir);
    return (fs::path(opts.out_dir) / name).string();
}

int run_validate(const CommonOpts& opts) {
    const json cfg = load_config(opts);
    const json& mj = cfg.contains("model") ? cfg.at("model") : cfg;
    const std::string model = mj.at("model").get<std::string>();
    json report;
    bool accepted = false;
    std::string reason;
    if (model == "ar") {
        const auto phi = mj.at("phi").get<std::vector<double>>();
        const double alpha = mj.at("alpha").get<double>();
        const tailproc::ArValidation v = tailproc::validate_ar(phi, alpha);
        accepted = v.accepted;
        reason = v.reason;
        report = {{"model", "ar"}, {"spectral_radius", v.spectral_radius},
                  {"q", v.q}, {"q_sum", v.q_sum}, {"accepted", v.accepted},
                  {"reason", v.reason}};
    } else if (model == "tarch") {
        const double b11 = mj.at("b11").get<double>();
        const double b21 = mj.at("b21").get<double>();
        const tailproc::InnovationDist innov =
            mj.contains("innovation") ? tailproc::innovation_from_json(mj.at("innovation"))
                                      : tailproc::InnovationDist::Gaussian();
        const tailproc::LyapunovResult lr = tailproc::tarch_lyapunov(b11, b21, innov);
        report = {{"model", "tarch"}, {"lyapunov_exponent", lr.gamma},
                  {"lyapunov_std_error", lr.std_error}};
        try {
            tailproc::model_from_json(mj);  // full constructor-level validation
            accepted = true;
            report["tail_index"] = tailproc::tarch_tail_index(b11, b21, innov);
        } catch (const tailproc::invalid_spec_error& e) {
            accepted = false;
            reason = e.what();
        }
        report["accepted"] = accepted;
        report["reason"] = reason;
    } else if (model == "renewal") {
        const double beta = mj.at("beta").get<double>();
        accepted = beta > 1.0;
        if (!accepted) reason = "renewal chain requires beta > 1 (finite E[Z])";
        report = {{"model", "renewal"}, {"beta", beta}, {"accepted", accepted},
                  {"reason", reason}};
        if (accepted)
            report["mean_z"] = tailproc::RenewalChainSpec(beta).mean_z();
    } else {
        throw tailproc::config_error("unknown model: " + model);
    }
    tailproc::write_file(out_path(opts, "validation.json"), report.dump(2) + "\n");
    std::cout << report.dump(2) << "\n";
    if (!accepted) {
        std::cerr << "error: spec rejected: " << reason << "\n";
        return 2;
    }
    return 0;
}

int run_simulate(const CommonOpts& opts) {
    const json cfg = load_config(opts);
    const tailproc::ModelSpec model = tailproc::model_from_json(cfg.at("model"));
    const std::size_t n = cfg.at("n").get<std::size_t>();
    const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
    tailproc::PathSample path;
    if (cfg.contains("burn_in")) {
        const std::uint64_t burn = cfg.at("burn_in").get<std::uint64_t>();
        if (const auto* ar = std::get_if<tailproc::ArSpec>(&model))
            path = tailproc::simulate_ar(*ar, n, seed, burn);
        else if (const auto* ta = std::get_if<tailproc::TarchSpec>(&model))
            path = tailproc::simulate_tarch(*ta, n, seed, burn);
        else
            path = tailproc::simulate(model, n, seed);
    } else {
        path = tailproc::simulate(model, n, seed);
    }
    tailproc::write_file(out_path(opts, "path.csv"), tailproc::path_csv(path));
    std::cout << "wrote " << out_path(opts, "path.csv") << " (" << n << " values)\n";
    return 0;
}

int run_estimate(const CommonOpts& opts) {
    const json cfg = load_config(opts);
    const tailproc::ModelSpec model = tailproc::model_from_json(cfg.at("model"));
    const tailproc::PathSample path = tailproc::simulate(
        model, cfg.at("n").get<std::size_t>(), cfg.at("seed").get<std::uint64_t>());
    const std::string estimator = cfg.at("estimator").get<std::string>();
    const std::size_t k = cfg.at("k").get<std::size_t>();
    const std::size_t h = cfg.value("h", std::size_t{0});
    tailproc::EstimateRecord rec;
    if (estimator == "hill")
        rec = tailproc::hill(path, k);
    else if (estimator == "theta_hat")
        rec = tailproc::extremal_index_hat(path, h, k);
    else if (estimator == "theta_tilde")
        rec = tailproc::extremal_index_tilde(path, h, k);
    else if (estimator == "cluster_index")
        rec = tailproc::cluster_index_hat(path, h, k);
    else if (estimator == "cte")
        rec = tailproc::cte_hat(path, h, k);
    else if (estimator == "extreme_quantile") {
        rec.name = "extreme_quantile";
        rec.value = tailproc::extreme_quantile(path.values, k, cfg.at("p").get<double>());
        rec.k = k;
        rec.n = path.size();
        rec.auxiliary["p"] = cfg.at("p").get<double>();
    } else if (estimator == "cte_extrapolated") {
        rec.name = "cte_extrapolated";
        rec.value =
            tailproc::cte_extrapolated(path.values, h, k, cfg.at("p").get<double>());
        rec.k = k;
        rec.h = h;
        rec.n = path.size();
        rec.auxiliary["p"] = cfg.at("p").get<double>();
    } else {
        throw tailproc::config_error("unknown estimator: " + estimator);
    }
    tailproc::write_file(out_path(opts, "estimate.json"),
                         tailproc::to_json(rec).dump(2) + "\n");
    tailproc::write_file(out_path(opts, "estimate.csv"), tailproc::estimate_csv(rec));
    std::cout << rec.name << " = " << rec.value << "\n";
    return 0;
}

int run_extremogram(const CommonOpts& opts) {
    const json cfg = load_config(opts);
    const tailproc::ModelSpec model = tailproc::model_from_json(cfg.at("model"));
    const tailproc::PathSample path = tailproc::simulate(
        model, cfg.at("n").get<std::size_t>(), cfg.at("seed").get<std::uint64_t>());
    const tailproc::Extremogram e = tailproc::extremogram(
        path, cfg.value("v", 1.0), cfg.value("w", 1.0), cfg.at("k").get<std::size_t>(),
        cfg.value("L", std::size_t{50}));
    tailproc::write_file(out_path(opts, "extremogram.csv"), tailproc::extremogram_csv(e));
    tailproc::write_file(out_path(opts, "extremogram.json"),
                         tailproc::to_json(e).dump(2) + "\n");
    std::cout << "wrote " << out_path(opts, "extremogram.csv") << "\n";
    return 0;
}

int run_variance(const CommonOpts& opts) {
    const json cfg = load_config(opts);
    const tailproc::ModelSpec model = tailproc::model_from_json(cfg.at("model"));
    const tailproc::PathSample path = tailproc::simulate(
        model, cfg.at("n").get<std::size_t>(), cfg.at("seed").get<std::uint64_t>());
    const std::size_t L = cfg.value("L", std::size_t{50});
    const double alpha = cfg.at("alpha").get<double>();
    const tailproc::SpectralTailEstimate st = tailproc::spectral_tail_mc(
        path, tailproc::ThresholdSpec::OrderStat(cfg.at("k").get<std::size_t>()), L);
    const std::vector<double> rho = tailproc::spectral_moments(st, alpha);
    const tailproc::SeriesValue var = tailproc::hill_limit_variance(rho, alpha);
    const json report = {{"hill_limit_variance", var.value},
                         {"truncation_tail", var.truncation_tail},
                         {"alpha", alpha},
                         {"L", L},
                         {"anchors", st.anchors},
                         {"rho", rho}};
    tailproc::write_file(out_path(opts, "variance.json"), report.dump(2) + "\n");
    std::cout << report.dump(2) << "\n";
    return 0;
}

int run_mc(const CommonOpts& opts) {
    const json cfg = load_config(opts);
    const tailproc::ExperimentConfig ec = tailproc::experiment_from_json(cfg);
    const tailproc::McReport rep = tailproc::run_experiment(ec, opts.workers);
    tailproc::write_file(out_path(opts, "mc_report.json"),
                         tailproc::to_json(rep).dump(2) + "\n");
    tailproc::write_file(out_path(opts, "replications.csv"), tailproc::mc_report_csv(rep));
    std::cout << "variance=" << rep.variance << " mean=" << rep.mean
              << " jb_p=" << rep.jb_p_value << " failures=" << rep.failures << "\n";
    if (!rep.within_tolerance) {
        std::cerr << "error: tolerance violation: variance " << rep.variance
                  << " vs theory target " << *rep.theory_target << "\n";
        return 1;
    }
    return 0;
}

int run_counterexample(const CommonOpts& opts) {
    const json cfg = load_config(opts);
    const json& mj = cfg.at("model");
    const tailproc::ModelSpec model = tailproc::model_from_json(mj);
    const auto* spec = std::get_if<tailproc::RenewalChainSpec>(&model);
    if (!spec)
        throw tailproc::config_error("counterexample requires the renewal model");
    const auto s_grid = cfg.value("s_grid", std::vector<double>{1.0});
    const tailproc::CounterexampleReport rep = tailproc::counterexample_experiment(
        *spec, cfg.at("n").get<std::size_t>(), cfg.at("u_exponent").get<double>(), s_grid,
        cfg.at("replications").get<std::size_t>(), cfg.at("master_seed").get<std::uint64_t>(),
        opts.workers, cfg.value("pilot_multiplier", 100.0));
    tailproc::write_file(out_path(opts, "counterexample.json"),
                         tailproc::to_json(rep).dump(2) + "\n");
    std::cout << "regime=" << rep.regime_name() << " n_fz=" << rep.n_fz
              << " var(s0)=" << rep.variance_per_s.front() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heavy-tailed time series toolkit: simulation, tail empirical "
                 "processes, extreme-value estimators, Monte Carlo verification"};
    app.require_subcommand(1);

    CommonOpts opts;
    int (*handler)(const CommonOpts&) = nullptr;

    auto* validate = app.add_subcommand(
        "validate", "check model admissibility (spectral radius, Lyapunov, tail index)");
    add_common(validate, opts);
    validate->callback([&] { handler = run_validate; });

    auto* simulate = app.add_subcommand("simulate", "simulate a model path to CSV");
    add_common(simulate, opts);
    simulate->callback([&] { handler = run_simulate; });

    auto* estimate = app.add_subcommand("estimate", "run one estimator on a simulated path");
    add_common(estimate, opts);
    estimate->callback([&] { handler = run_estimate; });

    auto* extremo = app.add_subcommand("extremogram", "empirical extremogram to CSV/JSON");
    add_common(extremo, opts);
    extremo->callback([&] { handler = run_extremogram; });

    auto* variance = app.add_subcommand(
        "variance", "Hill limiting variance from the empirical spectral tail process");
    add_common(variance, opts);
    variance->callback([&] { handler = run_variance; });

    auto* mc = app.add_subcommand("mc", "replicated Monte Carlo experiment");
    add_common(mc, opts);
    mc->callback([&] { handler = run_mc; });

    auto* counter = app.add_subcommand(
        "counterexample", "three-regime renewal-chain experiment");
    add_common(counter, opts);
    counter->callback([&] { handler = run_counterexample; });

    CLI11_PARSE(app, argc, argv);

    try {
        return handler(opts);
    } catch (const tailproc::config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const tailproc::invalid_spec_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: config: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
