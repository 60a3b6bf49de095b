#pragma once

// Extreme-value estimators: Hill, the two extremal-index estimators, the
// cluster index, the conditional tail expectation and its extrapolated form,
// and extreme quantile extrapolation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>

#include "tailproc/errors.hpp"
#include "tailproc/tailcore.hpp"

namespace tailproc {

struct EstimateRecord {
    std::string name;
    double value = 0.0;
    std::size_t k = 0;
    std::size_t h = 0;
    std::size_t n = 0;
    std::map<std::string, double> auxiliary;
};

namespace detail {

inline double positive_order_stat_threshold(std::span<const double> x, std::size_t k,
                                            const char* who) {
    const double u = order_statistic(x, k);
    if (!(u > 0.0))
        throw estimator_error(std::string(who) + ": threshold order statistic is not positive");
    return u;
}

}  // namespace detail

// Hill estimator of gamma = 1/alpha:
//   (1/k) sum_{j=1}^{k} log_+ (X_{n:n-j+1} / X_{n:n-k}).
inline EstimateRecord hill(std::span<const double> x, std::size_t k) {
    const std::size_t n = x.size();
    const double u = detail::positive_order_stat_threshold(x, k, "hill");
    // Top k values: partition, then clamp with log_+ (ties contribute 0).
    std::vector<double> work(x.begin(), x.end());
    auto nth = work.begin() + static_cast<std::ptrdiff_t>(n - k);
    std::nth_element(work.begin(), nth, work.end());
    double acc = 0.0;
    for (auto it = nth; it != work.end(); ++it)
        acc += std::max(std::log(*it / u), 0.0);
    EstimateRecord rec;
    rec.name = "hill";
    rec.value = acc / static_cast<double>(k);
    rec.k = k;
    rec.h = 0;
    rec.n = n;
    rec.auxiliary["threshold"] = u;
    return rec;
}

// theta_hat(h) = (1/hk) sum_{j=1}^{n-h} 1{max(X_j..X_{j+h}) > X_{n:n-k}}.
inline EstimateRecord extremal_index_hat(std::span<const double> x, std::size_t h, std::size_t k) {
    const std::size_t n = x.size();
    if (h < 1 || n <= h) throw estimator_error("extremal_index_hat: require 1 <= h < n");
    const double u = detail::positive_order_stat_threshold(x, k, "extremal_index_hat");
    std::size_t count = 0;
    for (std::size_t j = 0; j + h < n; ++j) {
        for (std::size_t i = 0; i <= h; ++i) {
            if (x[j + i] > u) {
                ++count;
                break;
            }
        }
    }
    EstimateRecord rec;
    rec.name = "extremal_index_hat";
    rec.value = static_cast<double>(count) / (static_cast<double>(h) * static_cast<double>(k));
    rec.k = k;
    rec.h = h;
    rec.n = n;
    rec.auxiliary["threshold"] = u;
    rec.auxiliary["window_count"] = static_cast<double>(count);
    return rec;
}

// theta_tilde(h) = (1/k) sum_i 1{max(X_i..X_{i+h-1}) <= X_{n:n-k}, X_{i+h} > X_{n:n-k}}.
inline EstimateRecord extremal_index_tilde(std::span<const double> x, std::size_t h,
                                           std::size_t k) {
    const std::size_t n = x.size();
    if (h < 1 || n <= h) throw estimator_error("extremal_index_tilde: require 1 <= h < n");
    const double u = detail::positive_order_stat_threshold(x, k, "extremal_index_tilde");
    std::size_t count = 0;
    for (std::size_t i = 0; i + h < n; ++i) {
        if (!(x[i + h] > u)) continue;
        bool quiet = true;
        for (std::size_t j = 0; j < h; ++j) {
            if (x[i + j] > u) {
                quiet = false;
                break;
            }
        }
        if (quiet) ++count;
    }
    EstimateRecord rec;
    rec.name = "extremal_index_tilde";
    rec.value = static_cast<double>(count) / static_cast<double>(k);
    rec.k = k;
    rec.h = h;
    rec.n = n;
    rec.auxiliary["threshold"] = u;
    rec.auxiliary["window_count"] = static_cast<double>(count);
    return rec;
}

// b_hat_+(h) = (1/kh) sum_{j=1}^{n-h} 1{X_j + ... + X_{j+h} > X_{n:n-k}}.
inline EstimateRecord cluster_index_hat(std::span<const double> x, std::size_t h, std::size_t k) {
    const std::size_t n = x.size();
    if (h < 1 || n <= h) throw estimator_error("cluster_index_hat: require 1 <= h < n");
    const double u = detail::positive_order_stat_threshold(x, k, "cluster_index_hat");
    std::size_t count = 0;
    double window_sum = 0.0;
    for (std::size_t i = 0; i <= h; ++i) window_sum += x[i];
    for (std::size_t j = 0;; ++j) {
        if (window_sum > u) ++count;
        if (j + h + 1 >= n) break;
        window_sum += x[j + h + 1] - x[j];
    }
    EstimateRecord rec;
    rec.name = "cluster_index_hat";
    rec.value = static_cast<double>(count) / (static_cast<double>(k) * static_cast<double>(h));
    rec.k = k;
    rec.h = h;
    rec.n = n;
    rec.auxiliary["threshold"] = u;
    rec.auxiliary["window_count"] = static_cast<double>(count);
    return rec;
}

// C_hat_n(h) = (1/(k X_{n:n-k})) sum_{j=1}^{n-h} X_{j+h} 1{X_j > X_{n:n-k}}.
inline EstimateRecord cte_hat(std::span<const double> x, std::size_t h, std::size_t k) {
    const std::size_t n = x.size();
    if (n <= h || k > n - 1 - h) throw estimator_error("cte_hat: require k <= n-1-h");
    const double u = detail::positive_order_stat_threshold(x, k, "cte_hat");
    double acc = 0.0;
    for (std::size_t j = 0; j + h < n; ++j)
        if (x[j] > u) acc += x[j + h];
    EstimateRecord rec;
    rec.name = "cte_hat";
    rec.value = acc / (static_cast<double>(k) * u);
    rec.k = k;
    rec.h = h;
    rec.n = n;
    rec.auxiliary["threshold"] = u;
    return rec;
}

// Extrapolated quantile X_{n:n-k} (k/(np))^{1/alpha_hat}, alpha_hat = 1/hill.
inline double extreme_quantile(std::span<const double> x, std::size_t k, double p) {
    const std::size_t n = x.size();
    if (!(p > 0.0) || p * static_cast<double>(n) > static_cast<double>(k))
        throw estimator_error("extreme_quantile: require 0 < p <= k/n (extrapolation direction)");
    const EstimateRecord gamma = hill(x, k);
    if (!(gamma.value > 0.0))
        throw estimator_error("extreme_quantile: Hill estimate is zero");
    const double u = gamma.auxiliary.at("threshold");
    return u * std::pow(static_cast<double>(k) / (static_cast<double>(n) * p), gamma.value);
}

// E_hat_n = (k/(np))^{1/alpha_hat} (1/k) sum X_{j+h} 1{X_j > X_{n:n-k}}.
inline double cte_extrapolated(std::span<const double> x, std::size_t h, std::size_t k, double p) {
    const EstimateRecord cte = cte_hat(x, h, k);
    const std::size_t n = x.size();
    if (!(p > 0.0) || p * static_cast<double>(n) > static_cast<double>(k))
        throw estimator_error("cte_extrapolated: require 0 < p <= k/n");
    const EstimateRecord gamma = hill(x, k);
    if (!(gamma.value > 0.0))
        throw estimator_error("cte_extrapolated: Hill estimate is zero");
    const double u = cte.auxiliary.at("threshold");
    return std::pow(static_cast<double>(k) / (static_cast<double>(n) * p), gamma.value) * u *
           cte.value;
}

// PathSample conveniences.
inline EstimateRecord hill(const PathSample& s, std::size_t k) {
    return hill(std::span<const double>(s.values), k);
}
inline EstimateRecord extremal_index_hat(const PathSample& s, std::size_t h, std::size_t k) {
    return extremal_index_hat(std::span<const double>(s.values), h, k);
}
inline EstimateRecord extremal_index_tilde(const PathSample& s, std::size_t h, std::size_t k) {
    return extremal_index_tilde(std::span<const double>(s.values), h, k);
}
inline EstimateRecord cluster_index_hat(const PathSample& s, std::size_t h, std::size_t k) {
    return cluster_index_hat(std::span<const double>(s.values), h, k);
}
inline EstimateRecord cte_hat(const PathSample& s, std::size_t h, std::size_t k) {
    return cte_hat(std::span<const double>(s.values), h, k);
}

}  // namespace tailproc
