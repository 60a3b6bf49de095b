#pragma once

// JSON (configs, reports) and CSV (tabular series) interchange.  Field names
// are fixed by the schema files under schemas/.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "tailproc/asymptotics.hpp"
#include "tailproc/errors.hpp"
#include "tailproc/estimators.hpp"
#include "tailproc/harness.hpp"
#include "tailproc/models.hpp"
#include "tailproc/tailcore.hpp"

namespace tailproc {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Model specs
// ---------------------------------------------------------------------------

inline json to_json(const InnovationDist& d) {
    switch (d.kind) {
        case InnovationKind::pareto:
            return {{"dist", "pareto"}, {"alpha", d.alpha}, {"scale", d.scale},
                    {"two_sided", d.two_sided}};
        case InnovationKind::standard_gaussian:
            return {{"dist", "gaussian"}};
        case InnovationKind::integer_pareto:
            return {{"dist", "integer_pareto"}, {"beta", d.beta}};
    }
    return {};
}

inline InnovationDist innovation_from_json(const json& j) {
    const std::string dist = j.at("dist").get<std::string>();
    if (dist == "pareto")
        return InnovationDist::Pareto(j.at("alpha").get<double>(),
                                      j.value("scale", 1.0), j.value("two_sided", false));
    if (dist == "gaussian") return InnovationDist::Gaussian();
    if (dist == "integer_pareto") return InnovationDist::IntegerPareto(j.at("beta").get<double>());
    throw config_error("unknown innovation dist: " + dist);
}

inline json to_json(const ModelSpec& model) {
    return std::visit(
        [](const auto& spec) -> json {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, ArSpec>) {
                return {{"model", "ar"}, {"phi", spec.phi}, {"alpha", spec.alpha},
                        {"innovation", to_json(spec.innovation)}};
            } else if constexpr (std::is_same_v<T, TarchSpec>) {
                return {{"model", "tarch"}, {"b10", spec.b10}, {"b11", spec.b11},
                        {"b20", spec.b20}, {"b21", spec.b21}, {"xi", spec.xi},
                        {"innovation", to_json(spec.innovation)},
                        {"moment_order", spec.moment_order}};
            } else {
                json j = {{"model", "renewal"}, {"beta", spec.beta}};
                if (spec.stationary_start)
                    j["start"] = "stationary";
                else
                    j["start"] = spec.fixed_start;
                return j;
            }
        },
        model);
}

inline ModelSpec model_from_json(const json& j) {
    const std::string model = j.at("model").get<std::string>();
    if (model == "ar") {
        const InnovationDist innov = j.contains("innovation")
                                         ? innovation_from_json(j.at("innovation"))
                                         : InnovationDist::Gaussian();
        return ArSpec(j.at("phi").get<std::vector<double>>(), innov, j.at("alpha").get<double>());
    }
    if (model == "tarch") {
        const InnovationDist innov = j.contains("innovation")
                                         ? innovation_from_json(j.at("innovation"))
                                         : InnovationDist::Gaussian();
        return TarchSpec(j.at("b10").get<double>(), j.at("b11").get<double>(),
                         j.at("b20").get<double>(), j.at("b21").get<double>(),
                         j.value("xi", 0.0), innov, j.value("moment_order", 1.0));
    }
    if (model == "renewal") {
        const json start = j.value("start", json("stationary"));
        if (start.is_string())
            return RenewalChainSpec(j.at("beta").get<double>(), true);
        return RenewalChainSpec(j.at("beta").get<double>(), false,
                                start.get<std::uint64_t>());
    }
    throw config_error("unknown model: " + model);
}

// ---------------------------------------------------------------------------
// Experiment configs
// ---------------------------------------------------------------------------

inline StatisticKind statistic_from_string(const std::string& s) {
    if (s == "hill") return StatisticKind::hill;
    if (s == "theta_hat") return StatisticKind::theta_hat;
    if (s == "theta_tilde") return StatisticKind::theta_tilde;
    if (s == "cluster_index") return StatisticKind::cluster_index;
    if (s == "cte") return StatisticKind::cte;
    if (s == "ted") return StatisticKind::ted;
    throw config_error("unknown statistic: " + s);
}

inline const char* statistic_to_string(StatisticKind s) {
    switch (s) {
        case StatisticKind::hill: return "hill";
        case StatisticKind::theta_hat: return "theta_hat";
        case StatisticKind::theta_tilde: return "theta_tilde";
        case StatisticKind::cluster_index: return "cluster_index";
        case StatisticKind::cte: return "cte";
        case StatisticKind::ted: return "ted";
    }
    return "?";
}

inline ExperimentConfig experiment_from_json(const json& j) {
    ExperimentConfig cfg{model_from_json(j.at("model"))};
    cfg.n = j.at("n").get<std::size_t>();
    if (j.contains("k"))
        cfg.threshold = ThresholdSpec::OrderStat(j.at("k").get<std::size_t>());
    else if (j.contains("level"))
        cfg.threshold = ThresholdSpec::Level(j.at("level").get<double>());
    else
        throw config_error("experiment config needs \"k\" or \"level\"");
    cfg.h = j.value("h", std::size_t{0});
    cfg.statistic = statistic_from_string(j.value("statistic", std::string("hill")));
    if (j.contains("ted_v")) cfg.ted_v = j.at("ted_v").get<std::vector<double>>();
    cfg.replications = j.at("replications").get<std::size_t>();
    cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
    const std::string norm = j.value("normalization", std::string("sqrt_k"));
    if (norm == "sqrt_k")
        cfg.normalization = NormalizationKind::sqrt_k;
    else if (norm == "sqrt_n_fz")
        cfg.normalization = NormalizationKind::sqrt_n_fz;
    else
        throw config_error("unknown normalization: " + norm);
    cfg.pilot_multiplier = j.value("pilot_multiplier", 100.0);
    if (j.contains("theory_target")) cfg.theory_target = j.at("theory_target").get<double>();
    cfg.tolerance_rel = j.value("tolerance_rel", 0.25);
    return cfg;
}

// ---------------------------------------------------------------------------
// Reports and tabular outputs
// ---------------------------------------------------------------------------

inline json to_json(const EstimateRecord& rec) {
    return {{"name", rec.name},  {"value", rec.value}, {"k", rec.k},
            {"h", rec.h},        {"n", rec.n},         {"auxiliary", rec.auxiliary}};
}

inline std::string estimate_csv(const EstimateRecord& rec) {
    std::ostringstream os;
    os.precision(17);
    os << "name,n,k,h,value";
    for (const auto& [key, _] : rec.auxiliary) os << "," << key;
    os << "\n" << rec.name << "," << rec.n << "," << rec.k << "," << rec.h << "," << rec.value;
    for (const auto& [_, val] : rec.auxiliary) os << "," << val;
    os << "\n";
    return os.str();
}

inline std::string path_csv(const PathSample& s) {
    std::ostringstream os;
    os.precision(17);
    os << "index,value\n";
    for (std::size_t i = 0; i < s.values.size(); ++i) os << i << "," << s.values[i] << "\n";
    return os.str();
}

inline std::string extremogram_csv(const Extremogram& e) {
    std::ostringstream os;
    os.precision(17);
    os << "lag,value\n";
    for (std::size_t j = 0; j < e.c.size(); ++j) os << j << "," << e.c[j] << "\n";
    return os.str();
}

inline json to_json(const Extremogram& e) {
    return {{"v", e.v}, {"w", e.w}, {"u", e.u}, {"k", e.k}, {"c", e.c}};
}

inline std::string tail_function_csv(const TailFunctionEval& t) {
    std::ostringstream os;
    os.precision(17);
    const std::size_t dim = t.grid.empty() ? 1 : t.grid.front().size();
    for (std::size_t i = 0; i < dim; ++i) os << "v_" << i << ",";
    os << "value\n";
    for (std::size_t g = 0; g < t.grid.size(); ++g) {
        for (double v : t.grid[g]) os << v << ",";
        os << t.values[g] << "\n";
    }
    return os.str();
}

inline json tail_function_sidecar(const TailFunctionEval& t) {
    const char* kind = "ted";
    switch (t.kind) {
        case TailFunctionKind::ted: kind = "ted"; break;
        case TailFunctionKind::tep: kind = "tep"; break;
        case TailFunctionKind::weighted_ted: kind = "weighted_ted"; break;
        case TailFunctionKind::weighted_tep: kind = "weighted_tep"; break;
    }
    return {{"n", t.n}, {"u", t.u}, {"normalizer", t.normalizer}, {"kind", kind}};
}

inline json to_json(const McReport& rep) {
    json recs = json::array();
    for (const auto& r : rep.records) {
        recs.push_back({{"index", r.index}, {"seed", r.seed}, {"ok", r.ok},
                        {"error", r.error}, {"estimate", r.estimate},
                        {"deviation", r.deviation}});
    }
    json j = {{"replications", rep.replications},
              {"failures", rep.failures},
              {"center", rep.center},
              {"norm_factor", rep.norm_factor},
              {"mean", rep.mean},
              {"variance", rep.variance},
              {"skewness", rep.skewness},
              {"excess_kurtosis", rep.excess_kurtosis},
              {"jarque_bera", {{"statistic", rep.jb_statistic}, {"p_value", rep.jb_p_value}}},
              {"within_tolerance", rep.within_tolerance},
              {"relative_error", rep.relative_error},
              {"wall_seconds", rep.wall_seconds},
              {"master_seed", rep.master_seed},
              {"records", recs}};
    if (rep.theory_target) j["theory_target"] = *rep.theory_target;
    return j;
}

inline std::string mc_report_csv(const McReport& rep) {
    std::ostringstream os;
    os.precision(17);
    os << "index,seed,ok,estimate,deviation\n";
    for (const auto& r : rep.records)
        os << r.index << "," << r.seed << "," << (r.ok ? 1 : 0) << "," << r.estimate << ","
           << r.deviation << "\n";
    return os.str();
}

inline json to_json(const CounterexampleReport& rep) {
    return {{"regime", rep.regime_name()},
            {"beta", rep.beta},
            {"u", rep.u},
            {"u_exponent", rep.u_exponent},
            {"n_fz", rep.n_fz},
            {"n_fx_hat", rep.n_fx_hat},
            {"s_grid", rep.s_grid},
            {"seeds", rep.seeds},
            {"variance_per_s", rep.variance_per_s},
            {"covariance_01", rep.covariance_01},
            {"exceedance_fraction", rep.exceedance_fraction},
            {"tail_index_estimate", rep.tail_index_estimate},
            {"jb_p_value", rep.jb_p_value},
            {"wall_seconds", rep.wall_seconds},
            {"master_seed", rep.master_seed}};
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw config_error("config parse error in " + path + ": " + e.what());
    }
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot write file: " + path);
    out << content;
}

}  // namespace tailproc
