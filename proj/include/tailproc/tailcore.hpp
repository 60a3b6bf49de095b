#pragma once

// Order statistics, threshold resolution, and the multivariate (weighted)
// tail empirical distribution and process.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tailproc/errors.hpp"
#include "tailproc/models.hpp"

namespace tailproc {

// The (k+1)-largest observation X_{n:n-k}, by partial selection.
inline double order_statistic(std::span<const double> values, std::size_t k) {
    const std::size_t n = values.size();
    if (k < 1 || k > n - 1 || n < 2)
        throw estimator_error("order_statistic: require 1 <= k <= n-1");
    std::vector<double> work(values.begin(), values.end());
    auto nth = work.begin() + static_cast<std::ptrdiff_t>(n - k - 1);
    std::nth_element(work.begin(), nth, work.end());
    return *nth;
}

inline double order_statistic(const PathSample& sample, std::size_t k) {
    return order_statistic(std::span<const double>(sample.values), k);
}

// Either an explicit level u or an intermediate order-statistic index k.
struct ThresholdSpec {
    enum class Kind { level, order_stat };
    Kind kind;
    double u = 0.0;
    std::size_t k = 0;

    static ThresholdSpec Level(double u) {
        if (!(u > 0.0)) throw invalid_spec_error("threshold level must be positive");
        return {Kind::level, u, 0};
    }
    static ThresholdSpec OrderStat(std::size_t k) {
        if (k < 1) throw invalid_spec_error("order-statistic index must be >= 1");
        return {Kind::order_stat, 0.0, k};
    }
};

// A resolved threshold: the level u and the normalizer D (k for order-stat
// thresholds, the empirical exceedance count for explicit levels).
struct ResolvedThreshold {
    double u = 0.0;
    double normalizer = 0.0;
    bool degenerate = false;  // u at or above the sample maximum
};

inline ResolvedThreshold resolve_threshold(std::span<const double> values,
                                           const ThresholdSpec& spec) {
    ResolvedThreshold out;
    if (spec.kind == ThresholdSpec::Kind::order_stat) {
        out.u = order_statistic(values, spec.k);
        out.normalizer = static_cast<double>(spec.k);
    } else {
        out.u = spec.u;
        std::size_t count = 0;
        for (double v : values)
            if (v > out.u) ++count;
        out.normalizer = static_cast<double>(count);
    }
    const double mx = *std::max_element(values.begin(), values.end());
    out.degenerate = !(out.u < mx);
    return out;
}

// Weight function catalogue: psi == 1, a single coordinate, or a product of
// coordinate powers.  Declared growth exponents feed the validity warning.
struct WeightFn {
    enum class Kind { indicator, coordinate, product_power };
    Kind kind = Kind::indicator;
    std::size_t coordinate_index = 0;
    std::vector<double> exponents;  // declared growth q_0..q_h

    static WeightFn Indicator() { return {}; }

    static WeightFn Coordinate(std::size_t i) {
        WeightFn w;
        w.kind = Kind::coordinate;
        w.coordinate_index = i;
        return w;
    }

    static WeightFn ProductPower(std::vector<double> exps) {
        for (double q : exps)
            if (!(q >= 0.0))
                throw invalid_spec_error("weight exponents must be nonnegative");
        WeightFn w;
        w.kind = Kind::product_power;
        w.exponents = std::move(exps);
        return w;
    }

    double operator()(std::span<const double> scaled_window) const {
        switch (kind) {
            case Kind::indicator:
                return 1.0;
            case Kind::coordinate:
                return scaled_window[coordinate_index];
            case Kind::product_power: {
                double v = 1.0;
                for (std::size_t i = 0; i < exponents.size() && i < scaled_window.size(); ++i)
                    v *= std::pow(std::max(std::abs(scaled_window[i]), 1.0), exponents[i]);
                return v;
            }
        }
        return 1.0;
    }

    // Pairwise-sum growth check against alpha/2; advisory only.
    std::optional<std::string> growth_warning(double alpha) const {
        std::vector<double> qs = exponents;
        if (kind == Kind::coordinate) qs.assign(1, 1.0);
        if (kind == Kind::indicator) qs.assign(1, 0.0);
        double worst = 0.0;
        for (double a : qs)
            for (double b : qs) worst = std::max(worst, a + b);
        if (worst >= alpha)
            return "declared weight growth q_i + q_j = " + std::to_string(worst) +
                   " is not below alpha = " + std::to_string(alpha) +
                   " (limit theory needs pairwise sums <= q < alpha/2)";
        return std::nullopt;
    }
};

struct TedValue {
    double value = 0.0;
    double u = 0.0;
    double normalizer = 0.0;
    bool degenerate = false;
};

// Weighted TED: (1/D) sum_j psi(X_{j..j+h}/u) 1{exists i: X_{j+i} > u v_i},
// windows running over j = 1..n-h.
inline TedValue weighted_ted(std::span<const double> x, std::span<const double> v,
                             const ThresholdSpec& threshold, const WeightFn& psi) {
    if (v.empty()) throw invalid_spec_error("weighted_ted: empty argument vector");
    for (double vi : v)
        if (!(vi > 0.0)) throw invalid_spec_error("weighted_ted: v must be strictly positive");
    const std::size_t h = v.size() - 1;
    if (x.size() <= h) throw invalid_spec_error("weighted_ted: need n > h");

    const ResolvedThreshold rt = resolve_threshold(x, threshold);
    TedValue out;
    out.u = rt.u;
    out.normalizer = rt.normalizer;
    out.degenerate = rt.degenerate;
    if (rt.degenerate || rt.normalizer <= 0.0) {
        out.value = 0.0;
        return out;
    }

    std::vector<double> scaled(h + 1);
    double acc = 0.0;
    for (std::size_t j = 0; j + h < x.size(); ++j) {
        bool exceeds = false;
        for (std::size_t i = 0; i <= h; ++i) {
            if (x[j + i] > rt.u * v[i]) {
                exceeds = true;
                break;
            }
        }
        if (!exceeds) continue;
        for (std::size_t i = 0; i <= h; ++i) scaled[i] = x[j + i] / rt.u;
        acc += psi(scaled);
    }
    out.value = acc / rt.normalizer;
    return out;
}

inline TedValue ted_multivariate(std::span<const double> x, std::span<const double> v,
                                 const ThresholdSpec& threshold) {
    return weighted_ted(x, v, threshold, WeightFn::Indicator());
}

inline TedValue ted_multivariate(const PathSample& sample, std::span<const double> v,
                                 const ThresholdSpec& threshold) {
    return ted_multivariate(std::span<const double>(sample.values), v, threshold);
}

inline TedValue weighted_ted(const PathSample& sample, std::span<const double> v,
                             const ThresholdSpec& threshold, const WeightFn& psi) {
    return weighted_ted(std::span<const double>(sample.values), v, threshold, psi);
}

enum class TailFunctionKind { ted, tep, weighted_ted, weighted_tep };

struct TailFunctionEval {
    std::vector<std::vector<double>> grid;
    std::vector<double> values;
    std::size_t n = 0;
    double u = 0.0;
    double normalizer = 0.0;
    TailFunctionKind kind = TailFunctionKind::ted;
};

// Tail empirical process over a grid: sqrt(D) {T~(v) - center(v)}.  When no
// centering is supplied the sample's own weighted TED is used (identically
// zero; useful as a self-check).  Monte Carlo mode supplies a pilot-estimated
// centering.
inline TailFunctionEval tep(std::span<const double> x,
                            const std::vector<std::vector<double>>& grid,
                            const ThresholdSpec& threshold, const WeightFn& psi,
                            const std::optional<std::vector<double>>& centering = std::nullopt) {
    if (centering && centering->size() != grid.size())
        throw invalid_spec_error("tep: centering length does not match grid");
    TailFunctionEval out;
    out.grid = grid;
    out.n = x.size();
    out.values.reserve(grid.size());
    const bool weighted = psi.kind != WeightFn::Kind::indicator;
    out.kind = weighted ? TailFunctionKind::weighted_tep : TailFunctionKind::tep;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const TedValue tv = weighted_ted(x, grid[g], threshold, psi);
        out.u = tv.u;
        out.normalizer = tv.normalizer;
        const double center = centering ? (*centering)[g] : tv.value;
        out.values.push_back(std::sqrt(tv.normalizer) * (tv.value - center));
    }
    return out;
}

}  // namespace tailproc
