#pragma once

// Empirical extremogram and spectral tail process, truncated limit
// covariance series, the Hill limiting variance, the renewal-chain explicit
// limit covariance, and the anticlustering diagnostic.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "tailproc/errors.hpp"
#include "tailproc/tailcore.hpp"

namespace tailproc {

struct Extremogram {
    double v = 1.0, w = 1.0;
    double u = 0.0;          // resolved threshold
    std::size_t k = 0;
    std::vector<double> c;   // c[j] = c_hat_j(v,w), j = 0..L
};

// c_hat_j(v,w) = #{t: X_t > u v, X_{t+j} > u w} / k with u = X_{n:n-k}.
inline Extremogram extremogram(std::span<const double> x, double v, double w, std::size_t k,
                               std::size_t L) {
    const std::size_t n = x.size();
    if (L >= n / 2) throw invalid_spec_error("extremogram: require L < n/2");
    if (!(v > 0.0) || !(w > 0.0))
        throw invalid_spec_error("extremogram: v, w must be positive");
    Extremogram out;
    out.v = v;
    out.w = w;
    out.k = k;
    out.u = order_statistic(x, k);
    out.c.resize(L + 1, 0.0);
    const double uv = out.u * v, uw = out.u * w;
    for (std::size_t j = 0; j <= L; ++j) {
        std::size_t count = 0;
        for (std::size_t t = 0; t + j < n; ++t)
            if (x[t] > uv && x[t + j] > uw) ++count;
        out.c[j] = static_cast<double>(count) / static_cast<double>(k);
    }
    return out;
}

inline Extremogram extremogram(const PathSample& s, double v, double w, std::size_t k,
                               std::size_t L) {
    return extremogram(std::span<const double>(s.values), v, w, k, L);
}

struct SpectralTailEstimate {
    double u = 0.0;
    std::size_t anchors = 0;
    // theta[j-1] holds the samples of Theta_j = X_{t+j}/X_t over anchors,
    // j = 1..L; Theta_0 == 1 for every anchor by construction.
    std::vector<std::vector<double>> theta;
    std::vector<std::size_t> anchor_indices;
};

// Empirical spectral tail process: ratios forward of each exceedance anchor.
inline SpectralTailEstimate spectral_tail_mc(std::span<const double> x,
                                             const ThresholdSpec& threshold, std::size_t L) {
    const ResolvedThreshold rt = resolve_threshold(x, threshold);
    SpectralTailEstimate out;
    out.u = rt.u;
    out.theta.resize(L);
    for (std::size_t t = 0; t + L < x.size(); ++t) {
        if (!(x[t] > rt.u)) continue;
        out.anchor_indices.push_back(t);
        for (std::size_t j = 1; j <= L; ++j) out.theta[j - 1].push_back(x[t + j] / x[t]);
    }
    out.anchors = out.anchor_indices.size();
    if (out.anchors < 50)
        throw insufficient_exceedances_error(
            "spectral_tail_mc: fewer than 50 exceedance anchors");
    return out;
}

inline SpectralTailEstimate spectral_tail_mc(const PathSample& s, const ThresholdSpec& threshold,
                                             std::size_t L) {
    return spectral_tail_mc(std::span<const double>(s.values), threshold, L);
}

struct SeriesValue {
    double value = 0.0;
    double truncation_tail = 0.0;  // magnitude of the last included term
};

// Hill limiting variance alpha^{-2} {1 + 2 sum_j rho_j} from per-lag means
// rho_j of (Theta_j)_+^alpha ^ 1.
inline SeriesValue hill_limit_variance(std::span<const double> rho, double alpha) {
    if (!(alpha > 0.0)) throw invalid_spec_error("hill_limit_variance: alpha must be positive");
    double s = 0.0;
    double last = 0.0;
    for (double r : rho) {
        s += r;
        last = r;
    }
    return {(1.0 + 2.0 * s) / (alpha * alpha), 2.0 * std::abs(last) / (alpha * alpha)};
}

// Per-lag means of (Theta_j)_+^alpha ^ 1 from an empirical spectral tail
// process estimate.
inline std::vector<double> spectral_moments(const SpectralTailEstimate& st, double alpha) {
    std::vector<double> rho;
    rho.reserve(st.theta.size());
    for (const auto& lag : st.theta) {
        double s = 0.0;
        for (double th : lag)
            if (th > 0.0) s += std::min(std::pow(th, alpha), 1.0);
        rho.push_back(lag.empty() ? 0.0 : s / static_cast<double>(lag.size()));
    }
    return rho;
}

inline SeriesValue hill_limit_variance(const SpectralTailEstimate& st, double alpha) {
    const std::vector<double> rho = spectral_moments(st, alpha);
    return hill_limit_variance(rho, alpha);
}

// Closed form for AR(1) with positive coefficient and positive innovations:
// Theta_j = phi^j, so the variance is alpha^{-2} (1 + 2 phi^alpha / (1 - phi^alpha)).
inline double hill_limit_variance_ar1(double phi, double alpha) {
    if (!(phi >= 0.0) || !(phi < 1.0))
        throw invalid_spec_error("hill_limit_variance_ar1: require 0 <= phi < 1");
    const double r = std::pow(phi, alpha);
    return (1.0 + 2.0 * r / (1.0 - r)) / (alpha * alpha);
}

// Truncated covariance series C(v,w) = c_0(v,w) + sum_j {c_j(v,w) + c_j(w,v)}.
inline SeriesValue covariance_series(std::span<const double> c_vw, std::span<const double> c_wv) {
    if (c_vw.empty() || c_vw.size() != c_wv.size())
        throw invalid_spec_error("covariance_series: need matching nonempty lag sequences");
    double s = c_vw[0];
    double last = 0.0;
    for (std::size_t j = 1; j < c_vw.size(); ++j) {
        last = c_vw[j] + c_wv[j];
        s += last;
    }
    return {s, std::abs(last)};
}

inline SeriesValue covariance_series(const Extremogram& evw, const Extremogram& ewv) {
    return covariance_series(evw.c, ewv.c);
}

// Explicit limit covariance of the renewal-chain TEP in the Gaussian regime:
// C(s,t) = (beta+1) t^{1-beta} / (beta (beta-1)) - s t^{-beta} / beta, s <= t.
inline double counterexample_cov(double beta, double s, double t) {
    if (!(beta > 2.0)) throw invalid_spec_error("counterexample_cov: requires beta > 2");
    if (!(s > 0.0) || !(t > 0.0))
        throw invalid_spec_error("counterexample_cov: s, t must be positive");
    if (s > t) std::swap(s, t);  // formula stated for s < t; covariance is symmetric
    return (beta + 1.0) * std::pow(t, 1.0 - beta) / (beta * (beta - 1.0)) -
           s * std::pow(t, -beta) / beta;
}

namespace detail {

// Truncated sums for the integer Pareto law P(Z > m) = m^{-beta}, with the
// continuous-Pareto integral picking up the tail beyond the cutoff.
inline double int_pareto_e1(double beta, long long m) {
    // E[(Z - m)_+] = sum_{i >= m} i^{-beta}
    const long long cutoff = 2000000;
    double s = 0.0;
    for (long long i = m; i < cutoff; ++i) s += std::pow(static_cast<double>(i), -beta);
    const double z0 = static_cast<double>(cutoff);
    s += std::pow(z0, 1.0 - beta) / (beta - 1.0) + 0.5 * std::pow(z0, -beta);
    return s;
}

inline double int_pareto_e2(double beta, long long m1, long long m2) {
    // E[(Z - m1)_+ (Z - m2)_+] for m1 <= m2
    const long long cutoff = 2000000;
    double s = 0.0;
    for (long long z = m2 + 1; z < cutoff; ++z) {
        const double p = std::pow(static_cast<double>(z - 1), -beta) -
                         std::pow(static_cast<double>(z), -beta);
        s += static_cast<double>(z - m1) * static_cast<double>(z - m2) * p;
    }
    const double z0 = static_cast<double>(cutoff);
    const double a = static_cast<double>(m1), b = static_cast<double>(m2);
    s += beta * (std::pow(z0, 2.0 - beta) / (beta - 2.0) -
                 (a + b) * std::pow(z0, 1.0 - beta) / (beta - 1.0) +
                 a * b * std::pow(z0, -beta) / beta);
    return s;
}

}  // namespace detail

// Finite-threshold covariance of sqrt(n F_Z_bar(u)) {T_tilde(s) - T(s)} for
// the descent chain, from the compound-sum decomposition of the exceedance
// count: exceedances of u s arrive in runs of length (Z - [us])_+, one run
// per renewal cycle, and cycles occur at rate 1/E[Z].  The n's cancel:
//   Cov(s,t) = F_Z_bar(u) E[Z] E[(Z-[us])_+ (Z-[ut])_+] / E[(Z-[u])_+]^2.
inline double renewal_ted_cov(double beta, double u, double s, double t) {
    if (!(beta > 2.0)) throw invalid_spec_error("renewal_ted_cov: requires beta > 2");
    if (!(u > 1.0) || !(s > 0.0) || !(t > 0.0))
        throw invalid_spec_error("renewal_ted_cov: require u > 1 and positive s, t");
    const long long ms = static_cast<long long>(std::floor(u * std::min(s, t)));
    const long long mt = static_cast<long long>(std::floor(u * std::max(s, t)));
    if (ms < 1) throw invalid_spec_error("renewal_ted_cov: u min(s,t) must be >= 1");
    const double fz = std::pow(std::floor(u), -beta);
    const double ez = 1.0 + std::riemann_zeta(beta);
    const double e1 = detail::int_pareto_e1(beta, static_cast<long long>(std::floor(u)));
    return fz * ez * detail::int_pareto_e2(beta, ms, mt) / (e1 * e1);
}

// Empirical plug-in of the anticlustering partial sums
//   sum_{j=m}^{r} P(X_0 > u, X_j > u) / P(X_0 > u)
// for each m in m_grid.  Diagnostic only; no pass/fail verdict.
inline std::vector<std::pair<std::size_t, double>> anticlustering_diagnostic(
    std::span<const double> x, double u, std::size_t r, std::span<const std::size_t> m_grid) {
    const std::size_t n = x.size();
    if (r >= n / 2) throw invalid_spec_error("anticlustering_diagnostic: require r < n/2");
    std::size_t exceed = 0;
    for (double v : x)
        if (v > u) ++exceed;
    if (exceed == 0)
        throw insufficient_exceedances_error("anticlustering_diagnostic: no exceedances of u");
    std::vector<double> joint(r + 1, 0.0);  // joint[j] = c_hat_j(1,1) at level u
    for (std::size_t j = 1; j <= r; ++j) {
        std::size_t count = 0;
        for (std::size_t t = 0; t + j < n; ++t)
            if (x[t] > u && x[t + j] > u) ++count;
        joint[j] = static_cast<double>(count) / static_cast<double>(exceed);
    }
    std::vector<std::pair<std::size_t, double>> out;
    out.reserve(m_grid.size());
    for (std::size_t m : m_grid) {
        double s = 0.0;
        for (std::size_t j = std::max<std::size_t>(m, 1); j <= r; ++j) s += joint[j];
        if (m == 0) s += 1.0;  // lag-0 term is identically 1
        out.emplace_back(m, s);
    }
    return out;
}

}  // namespace tailproc
