#pragma once

// Small descriptive-statistics helpers shared by the estimators and the
// Monte Carlo harness.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace tailproc {

inline double mean(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("mean: empty input");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

// Unbiased sample variance.
inline double variance(std::span<const double> x) {
    if (x.size() < 2) throw std::invalid_argument("variance: need at least 2 values");
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

inline double covariance(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("covariance: mismatched or short inputs");
    const double mx = mean(x), my = mean(y);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - mx) * (y[i] - my);
    return s / static_cast<double>(x.size() - 1);
}

inline double skewness(std::span<const double> x) {
    const double m = mean(x);
    double s2 = 0.0, s3 = 0.0;
    for (double v : x) {
        const double d = v - m;
        s2 += d * d;
        s3 += d * d * d;
    }
    const double n = static_cast<double>(x.size());
    const double sd = std::sqrt(s2 / n);
    return (s3 / n) / (sd * sd * sd);
}

inline double excess_kurtosis(std::span<const double> x) {
    const double m = mean(x);
    double s2 = 0.0, s4 = 0.0;
    for (double v : x) {
        const double d = v - m;
        s2 += d * d;
        s4 += d * d * d * d;
    }
    const double n = static_cast<double>(x.size());
    const double v2 = s2 / n;
    return (s4 / n) / (v2 * v2) - 3.0;
}

struct JarqueBera {
    double statistic;
    double p_value;
};

// Jarque-Bera normality test; the statistic is asymptotically chi^2 with two
// degrees of freedom, whose survival function is exp(-x/2).
inline JarqueBera jarque_bera(std::span<const double> x) {
    const double n = static_cast<double>(x.size());
    const double s = skewness(x);
    const double k = excess_kurtosis(x);
    const double jb = n / 6.0 * (s * s + k * k / 4.0);
    return {jb, std::exp(-jb / 2.0)};
}

// Empirical quantile by linear interpolation of order statistics.
inline double quantile(std::vector<double> x, double q) {
    if (x.empty() || q < 0.0 || q > 1.0)
        throw std::invalid_argument("quantile: bad input");
    std::sort(x.begin(), x.end());
    const double pos = q * static_cast<double>(x.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= x.size()) return x.back();
    const double frac = pos - static_cast<double>(lo);
    return x[lo] * (1.0 - frac) + x[lo + 1] * frac;
}

}  // namespace tailproc
