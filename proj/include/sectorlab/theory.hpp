#pragma once

// Analytic side of the focusing result: the mean-degree parameter mu, Poisson
// tails xi(j) = P(Poi(mu) >= j), the focusing index k_n and the predicted
// two-point law of the maximum degree.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "sectorlab/degree_set.hpp"
#include "sectorlab/errors.hpp"
#include "sectorlab/model.hpp"

namespace sectorlab {

/// mu = (alpha/2) n r^2 (1-v)(1-q).
inline double mu(double n, double alpha, double r, double v, double q) {
    return 0.5 * alpha * n * r * r * (1.0 - v) * (1.0 - q);
}

inline double mu(const ModelParams& p) {
    return mu(static_cast<double>(p.n), p.alpha, p.r, p.v, p.q);
}

/// Inverse of mu() in r. Throws RadiusOutOfRange when the radius would reach 0.5.
inline double radius_for_mu(double n, double alpha, double v, double q, double mu_target) {
    if (!(mu_target > 0.0)) throw ConfigError("mu_target", "must be positive");
    const double r = std::sqrt(2.0 * mu_target / (alpha * n * (1.0 - v) * (1.0 - q)));
    if (!(r < 0.5))
        throw RadiusOutOfRange("radius " + std::to_string(r) + " for mu_target " +
                               std::to_string(mu_target) + " is not below 0.5");
    return r;
}

inline double log_poisson_pmf(double mean, std::uint64_t k) {
    if (mean <= 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    const double kd = static_cast<double>(k);
    return -mean + kd * std::log(mean) - std::lgamma(kd + 1.0);
}

inline double poisson_pmf(double mean, std::uint64_t k) {
    return std::exp(log_poisson_pmf(mean, k));
}

namespace detail {

/// Stop a series once a term drops below this fraction of the partial sum.
inline constexpr double kSeriesCutoff = 1e-17;

}  // namespace detail

/// log P(Poi(mean) >= j).
///
/// When j <= mean the lower sum P(X <= j-1) is accumulated from k = j-1 down
/// and complemented with log1p; otherwise the upper sum is accumulated from
/// k = j up. Either way the series starts at its largest term next to the mode
/// and runs outward, in scaled form (leading log-pmf plus log of the ratio
/// sum), until a term falls below 1e-17 of the partial sum.
inline double log_poisson_tail(double mean, std::uint64_t j) {
    if (j == 0) return 0.0;
    if (mean <= 0.0) return -std::numeric_limits<double>::infinity();
    const bool lower = static_cast<double>(j) <= mean;
    const double lead = log_poisson_pmf(mean, lower ? j - 1 : j);
    double term = 1.0;
    double sum = 1.0;
    if (lower) {
        for (std::uint64_t k = j - 1; k > 0; --k) {
            term *= static_cast<double>(k) / mean;
            sum += term;
            if (term < detail::kSeriesCutoff * sum) break;
        }
        return std::log1p(-std::exp(lead + std::log(sum)));
    }
    for (std::uint64_t k = j + 1;; ++k) {
        term *= mean / static_cast<double>(k);
        sum += term;
        if (term < detail::kSeriesCutoff * sum) break;
    }
    return lead + std::log(sum);
}

/// xi(j) = P(Poi(mean) >= j). Underflows to 0 for extreme tails; use
/// log_poisson_tail there.
inline double poisson_tail(double mean, std::uint64_t j) {
    return std::exp(log_poisson_tail(mean, j));
}

/// P(Poi(mean) + shift ∈ A), with mean >= 0.
inline double poisson_probability(double mean, const DegreeSet& a, std::uint64_t shift = 0) {
    if (a.is_tail()) {
        const std::uint64_t t = a.threshold();
        return t <= shift ? 1.0 : poisson_tail(mean, t - shift);
    }
    double p = 0.0;
    for (std::uint32_t value : a.values())
        if (value >= shift) p += poisson_pmf(mean, value - shift);
    return p;
}

struct FocusingIndex {
    std::uint32_t j = 0;
    std::uint32_t k = 0;
};

/// j_n is the smallest j with n xi(j) <= 1/(1-v) (so n xi(j-1) > 1/(1-v));
/// k_n = j_n - 1 when (1-v) n xi(j_n) <= sqrt(xi(j_n) / xi(j_n - 1)), else j_n.
/// Comparisons are carried out in log space.
inline FocusingIndex select_kn(double n, double v, double mean) {
    if (!(n * (1.0 - v) > 1.0))
        throw NoFocusingIndex("n(1-v) = " + std::to_string(n * (1.0 - v)) + " is not above 1");
    if (!(mean > 0.0)) throw ConfigError("mu", "must be positive");
    const double log_n = std::log(n);
    const double log_keep = std::log1p(-v);
    const double threshold = -log_keep;
    constexpr std::uint32_t kMaxIndex = 1u << 20;
    double prev = 0.0;  // log xi(0)
    for (std::uint32_t j = 1; j < kMaxIndex; ++j) {
        const double cur = log_poisson_tail(mean, j);
        if (log_n + cur <= threshold) {
            const bool step_down = log_keep + log_n + cur <= 0.5 * (cur - prev);
            return {j, step_down ? j - 1 : j};
        }
        prev = cur;
    }
    throw NoFocusingIndex("focusing index search exceeded its limit");
}

/// Predicted law of the maximum degree: P(D = k-1) -> exp(-a),
/// P(D = k) -> 1 - exp(-a), with a = n(1-v) xi(k). Applies to out- and
/// in-degree in both point-process modes.
struct FocusingPrediction {
    double mu = 0.0;
    std::uint32_t j_n = 0;
    std::uint32_t k_n = 0;
    double xi_at_k = 0.0;
    double a = 0.0;
    double p_km1 = 0.0;
    double p_k = 0.0;
};

inline FocusingPrediction predict(double n, double v, double mean) {
    const FocusingIndex idx = select_kn(n, v, mean);
    FocusingPrediction pr;
    pr.mu = mean;
    pr.j_n = idx.j;
    pr.k_n = idx.k;
    pr.xi_at_k = poisson_tail(mean, idx.k);
    pr.a = n * (1.0 - v) * pr.xi_at_k;
    pr.p_km1 = std::exp(-pr.a);
    pr.p_k = 1.0 - pr.p_km1;
    return pr;
}

inline FocusingPrediction predict(const ModelParams& p) {
    validate(p);
    return predict(static_cast<double>(p.n), p.v, mu(p));
}

/// Finite-n diagnostics of the asymptotic hypotheses. Thresholds are heuristics.
struct RegimeReport {
    double mu = 0.0;
    double mu_over_pow = 0.0;     // mu / n^(1/6)
    double focusing_ratio = 0.0;  // mu^(1+eps) / ln n
    double epsilon = 0.0;
    std::vector<std::string> warnings;
};

inline RegimeReport check_regime(const ModelParams& p, double epsilon) {
    if (!(epsilon > 0.0)) throw ConfigError("epsilon", "must be positive");
    RegimeReport rep;
    const double n = static_cast<double>(p.n);
    rep.mu = mu(p);
    rep.epsilon = epsilon;
    rep.mu_over_pow = rep.mu / std::cbrt(std::sqrt(n));
    rep.focusing_ratio = std::pow(rep.mu, 1.0 + epsilon) / std::log(n);
    if (!(rep.focusing_ratio <= 1.0))
        rep.warnings.push_back("mu^(1+eps)/ln n = " + std::to_string(rep.focusing_ratio) +
                               " exceeds 1: degree growth may be too fast for focusing");
    if (!(rep.mu_over_pow <= 1.0))
        rep.warnings.push_back("mu/n^(1/6) = " + std::to_string(rep.mu_over_pow) +
                               " exceeds 1: binomial/Poisson agreement may be slow");
    if (rep.mu < 0.01)
        rep.warnings.push_back("mu = " + std::to_string(rep.mu) +
                               " is below 0.01: mean degree is nearly degenerate");
    return rep;
}

}  // namespace sectorlab
