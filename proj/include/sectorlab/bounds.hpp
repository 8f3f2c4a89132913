#pragma once

// Numerical evaluation of the Poisson-approximation total-variation bound for W_A, the
// number of alive vertices whose out- or in-degree lies in A, in the Poisson
// version of the model with uniform density on Q:
//
//   d_TV(W_A, Poi(E W_A)) <= min(1, 1/E W_A) (I1 + I2).
//
// E W_A, I1 and I2 are integrals over Q (and over B(x1, 3r) ∩ Q for the
// second point) of Poisson probabilities whose means are areas of sectors or
// disks clipped to Q. All integrals are Monte Carlo estimates with standard
// errors. Outer samples are processed in fixed blocks with per-block streams
// and the block sums are combined in block order, so results do not depend
// on the worker count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sectorlab/degree_set.hpp"
#include "sectorlab/errors.hpp"
#include "sectorlab/geometry.hpp"
#include "sectorlab/model.hpp"
#include "sectorlab/parallel.hpp"
#include "sectorlab/random.hpp"
#include "sectorlab/theory.hpp"

namespace sectorlab {

struct Estimate {
    double value = 0.0;
    double standard_error = 0.0;
};

struct BoundsBudget {
    std::uint64_t outer_samples = 10000;
    /// Samples per single-region clipped area (only regions touching the boundary).
    std::uint64_t area_samples = 100000;
    /// Samples per two-region decomposition.
    std::uint64_t pair_area_samples = 100000;
    double truncation_cap = 1e-8;
    std::uint32_t max_terms = 100000;
    unsigned parallelism = 1;
    std::uint64_t block_size = 256;
    std::uint64_t seed = 0;
};

namespace detail {

struct Moments {
    double sum = 0.0;
    double sum_sq = 0.0;
    double max = 0.0;

    void add(double x) {
        sum += x;
        sum_sq += x * x;
        max = std::max(max, x);
    }
    void merge(const Moments& o) {
        sum += o.sum;
        sum_sq += o.sum_sq;
        max = std::max(max, o.max);
    }
    Estimate mean(std::uint64_t n) const {
        if (n == 0) return {};
        const double nd = static_cast<double>(n);
        const double m = sum / nd;
        const double var = n > 1 ? std::max(0.0, (sum_sq - sum * m) / (nd - 1.0)) : 0.0;
        return {m, std::sqrt(var / nd)};
    }
};

/// Run `per_sample(engine, moments)` over `n` samples in fixed blocks. Each block
/// owns an engine keyed by (seed, block) and `channels` moment accumulators.
template <class PerSample>
std::vector<Moments> blocked_monte_carlo(std::uint64_t n, std::size_t channels,
                                         const BoundsBudget& budget, std::uint64_t seed,
                                         PerSample&& per_sample) {
    const std::uint64_t bs = std::max<std::uint64_t>(1, budget.block_size);
    const std::uint64_t blocks = (n + bs - 1) / bs;
    std::vector<std::vector<Moments>> partial(blocks, std::vector<Moments>(channels));
    parallel_for(blocks, budget.parallelism, [&](std::uint64_t b) {
        Engine eng = make_engine(derive_seed(seed, b));
        const std::uint64_t end = std::min(n, (b + 1) * bs);
        for (std::uint64_t i = b * bs; i < end; ++i) per_sample(eng, partial[b]);
    });
    std::vector<Moments> total(channels);
    for (const auto& blk : partial)
        for (std::size_t c = 0; c < channels; ++c) total[c].merge(blk[c]);
    return total;
}

inline Point2 uniform_point(Engine& eng) {
    const double x = uniform01(eng);
    return {x, uniform01(eng)};
}

inline double uniform_angle(Engine& eng) {
    return wrap_angle(kTwoPi * uniform01(eng));
}

}  // namespace detail

/// Poisson mean of the side-specific degree at a vertex located at x with
/// orientation y is lambda_eff * |R(x, y) ∩ Q|, where R is the sector S(x, y, r)
/// for out-degree and the disk B(x, r) for in-degree.
inline double effective_intensity(const ModelParams& p, Side side) {
    const double base = static_cast<double>(p.n) * (1.0 - p.q) * (1.0 - p.v);
    return side == Side::out ? base : base * p.alpha / kTwoPi;
}

inline Sector degree_region(const ModelParams& p, Side side, Point2 x, double y) {
    if (side == Side::out) return {x, y, p.alpha, p.r};
    return {x, 0.0, kTwoPi, p.r};
}

/// E W_A by Palm theory: (1-v) lambda ∫_Q E_y P[Poi(lambda_eff m(x, y)) ∈ A] dx.
inline Estimate expected_W(const ModelParams& p, const DegreeSet& a, Side side,
                           const BoundsBudget& budget = {}) {
    validate(p);
    const double lambda = static_cast<double>(p.n);
    const double scale = (1.0 - p.v) * lambda;
    if (a.is_empty()) return {};
    if (a.is_tail() && a.threshold() == 0) return {scale, 0.0};
    const double lam_eff = effective_intensity(p, side);
    const auto m = detail::blocked_monte_carlo(
        budget.outer_samples, 1, budget, tagged_seed(budget.seed, StreamTag::expected_w),
        [&](Engine& eng, std::vector<detail::Moments>& acc) {
            const Point2 x = detail::uniform_point(eng);
            const double y = detail::uniform_angle(eng);
            const AreaOptions ao{budget.area_samples, eng(), true};
            const double area = clipped_area(degree_region(p, side, x, y), ao).area;
            acc[0].add(scale * poisson_probability(lam_eff * area, a));
        });
    return m[0].mean(budget.outer_samples);
}

/// Areas of R1 ∩ R2 ∩ Q, (R1 \ R2) ∩ Q and (R2 \ R1) ∩ Q.
struct JointRegionDecomposition {
    double area_common = 0.0;
    double area_only1 = 0.0;
    double area_only2 = 0.0;
    double se_common = 0.0;
    double se_only1 = 0.0;
    double se_only2 = 0.0;
};

/// Monte Carlo decomposition over the bounding box of both disks clipped to Q.
/// With exact_interior, two equal full disks inside Q use the closed-form lens
/// area, and otherwise a region whose disk lies inside Q gets its exact total
/// area and its private piece is that total minus the common estimate.
inline JointRegionDecomposition decompose_regions(const Sector& r1, const Sector& r2,
                                                  const AreaOptions& opt = {}) {
    JointRegionDecomposition d;
    if (opt.exact_interior && is_full_disk(r1) && is_full_disk(r2) && r1.radius == r2.radius &&
        disk_inside_unit_square(r1.apex, r1.radius) && disk_inside_unit_square(r2.apex, r2.radius)) {
        const double r = r1.radius;
        const double dist = distance(r1.apex, r2.apex);
        const double lens = dist >= 2.0 * r ? 0.0
                                            : 2.0 * r * r * std::acos(dist / (2.0 * r)) -
                                                  0.5 * dist * std::sqrt(4.0 * r * r - dist * dist);
        d.area_common = lens;
        d.area_only1 = d.area_only2 = kPi * r * r - lens;
        return d;
    }
    const Rect b1 = clipped_disk_box(r1.apex, r1.radius);
    const Rect b2 = clipped_disk_box(r2.apex, r2.radius);
    const Rect box{std::min(b1.x0, b2.x0), std::min(b1.y0, b2.y0), std::max(b1.x1, b2.x1),
                   std::max(b1.y1, b2.y1)};
    if (box.empty() || opt.samples == 0) return d;
    const SectorShape s1(r1), s2(r2);
    SplitMix64 eng(opt.seed);
    std::uint64_t both = 0, only1 = 0, only2 = 0;
    for (std::uint64_t k = 0; k < opt.samples; ++k) {
        const Point2 z = sample_in(box, eng);
        const bool in1 = s1.contains(z);
        const bool in2 = s2.contains(z);
        both += in1 & in2;
        only1 += in1 & !in2;
        only2 += in2 & !in1;
    }
    const double n = static_cast<double>(opt.samples);
    const double area = box.area();
    auto est = [&](std::uint64_t hits) -> Estimate {
        const double p = static_cast<double>(hits) / n;
        return {area * p, area * std::sqrt(p * (1.0 - p) / n)};
    };
    const Estimate c = est(both), o1 = est(only1), o2 = est(only2);
    d.area_common = c.value;
    d.se_common = c.standard_error;
    d.area_only1 = o1.value;
    d.se_only1 = o1.standard_error;
    d.area_only2 = o2.value;
    d.se_only2 = o2.standard_error;
    if (opt.exact_interior) {
        if (disk_inside_unit_square(r1.apex, r1.radius)) {
            d.area_only1 = std::max(0.0, 0.5 * r1.central_angle * r1.radius * r1.radius - c.value);
            d.se_only1 = c.standard_error;
        }
        if (disk_inside_unit_square(r2.apex, r2.radius)) {
            d.area_only2 = std::max(0.0, 0.5 * r2.central_angle * r2.radius * r2.radius - c.value);
            d.se_only2 = c.standard_error;
        }
    }
    return d;
}

/// Extra unit added to one vertex's count: present when the other vertex lies
/// in the relevant sector (geometric) and the arc survives (probability survive).
struct IndicatorSpec {
    bool geometric = false;
    double survive = 1.0;

    double probability() const { return geometric ? survive : 0.0; }
};

struct JointProbability {
    double probability = 0.0;
    /// Upper bound on the omitted mass of the common-count summation.
    double truncation_error = 0.0;
};

struct TruncationPolicy {
    double cap = 1e-8;
    std::uint32_t max_terms = 100000;
};

/// P[{Nc + N1 + B1 ∈ A} ∩ {Nc + N2 + B2 ∈ A}] for independent Poisson counts Nc,
/// N1, N2 with means lambda_eff times the three decomposition areas and
/// independent Bernoulli indicators B1, B2. The sum over Nc stops once its
/// remaining mass P(Nc > K) is below the cap (or, for finite A, once Nc
/// exceeds max A).
inline JointProbability joint_count_prob(const JointRegionDecomposition& dec,
                                         double lambda_eff, const DegreeSet& a,
                                         const IndicatorSpec& b1, const IndicatorSpec& b2,
                                         const TruncationPolicy& policy = {}) {
    JointProbability out;
    if (a.is_empty()) return out;
    const double mc = lambda_eff * dec.area_common;
    const double m1 = lambda_eff * dec.area_only1;
    const double m2 = lambda_eff * dec.area_only2;
    const double pb1 = b1.probability();
    const double pb2 = b2.probability();
    const std::optional<std::uint64_t> finite_max =
        a.is_tail() || a.values().empty() ? std::nullopt
                                          : std::optional<std::uint64_t>(a.values().back());
    double total = 0.0;
    for (std::uint64_t k = 0;; ++k) {
        if (finite_max && k > *finite_max) break;
        const double w = poisson_pmf(mc, k);
        if (w > 0.0) {
            auto side_prob = [&](double m, double pb) {
                const double p0 = poisson_probability(m, a, k);
                return pb > 0.0 ? (1.0 - pb) * p0 + pb * poisson_probability(m, a, k + 1) : p0;
            };
            total += w * side_prob(m1, pb1) * side_prob(m2, pb2);
        }
        const double remaining = poisson_tail(mc, k + 1);
        if (remaining < policy.cap) {
            out.truncation_error = remaining;
            break;
        }
        if (k + 1 >= policy.max_terms)
            throw TruncationBudgetExceeded("joint count summation needs more than " +
                                           std::to_string(policy.max_terms) + " terms");
    }
    out.probability = std::min(1.0, total);
    return out;
}

struct TVBoundReport {
    Side side = Side::out;
    DegreeSet a;
    Estimate expected_w;
    Estimate i1;
    Estimate i2;
    /// Bound on the effect of common-count truncation on I2.
    double truncation_error = 0.0;
    /// Largest truncation mass of any single integrand evaluation.
    double max_truncation_per_eval = 0.0;
    /// min(1, 1/EW)(I1 + I2) before capping at 1.
    Estimate raw_bound;
    /// min(1, raw_bound); total variation never exceeds 1.
    Estimate bound;
    /// lambda^2 xi^2 |B(0, 3r)| for upper-tail A, xi the unclipped tail probability.
    std::optional<double> crude_i1;
};

/// Evaluate I1, I2 and the bound for W_A in the Poisson version with intensity n.
///
/// Each outer sample draws x1 uniform on Q, x2 uniform on the square of side 6r
/// centred at x1, and orientations y1, y2. Samples with x2 outside
/// B(x1, 3r) ∩ Q contribute zero; the square's area is the integral weight.
inline TVBoundReport tv_bound(const ModelParams& p, const DegreeSet& a, Side side,
                              const BoundsBudget& budget = {}) {
    validate(p);
    TVBoundReport rep;
    rep.side = side;
    rep.a = a;
    const double lambda = static_cast<double>(p.n);
    const double r = p.r;
    if (a.is_tail()) {
        const double unclipped_mu = effective_intensity(p, Side::out) * 0.5 * p.alpha * r * r;
        const double xi = poisson_tail(unclipped_mu, a.threshold());
        rep.crude_i1 = lambda * lambda * xi * xi * kUnitDiskArea * 9.0 * r * r;
    }
    if (a.is_empty()) return rep;

    rep.expected_w = expected_W(p, a, side, budget);
    const double lam_eff = effective_intensity(p, side);
    const double weight = 36.0 * r * r * (1.0 - p.v) * (1.0 - p.v) * lambda * lambda;
    const TruncationPolicy policy{budget.truncation_cap, budget.max_terms};

    // Channels: I1, I2, I1 + I2, weighted truncation mass, raw truncation mass.
    const auto m = detail::blocked_monte_carlo(
        budget.outer_samples, 5, budget, tagged_seed(budget.seed, StreamTag::tv_bound),
        [&](Engine& eng, std::vector<detail::Moments>& acc) {
            const Point2 x1 = detail::uniform_point(eng);
            const Point2 off{uniform01(eng), uniform01(eng)};
            const double y1 = detail::uniform_angle(eng);
            const double y2 = detail::uniform_angle(eng);
            const std::uint64_t area_seed = eng();
            const Point2 x2{x1.x + (2.0 * off.x - 1.0) * 3.0 * r,
                            x1.y + (2.0 * off.y - 1.0) * 3.0 * r};
            const double d2 = squared_distance(x1, x2);
            if (!in_unit_square(x2) || d2 > 9.0 * r * r) {
                for (auto& ch : acc) ch.add(0.0);
                return;
            }
            const Sector reg1 = degree_region(p, side, x1, y1);
            const Sector reg2 = degree_region(p, side, x2, y2);
            double v1 = 0.0, v2 = 0.0, trunc = 0.0;
            if (d2 > 4.0 * r * r) {
                // Regions are disjoint and neither point can reach the other.
                const double area1 = clipped_area(reg1, {budget.area_samples, area_seed, true}).area;
                const double area2 =
                    clipped_area(reg2, {budget.area_samples, mix64(area_seed), true}).area;
                v1 = poisson_probability(lam_eff * area1, a) *
                     poisson_probability(lam_eff * area2, a);
                v2 = v1;
            } else {
                const auto dec =
                    decompose_regions(reg1, reg2, {budget.pair_area_samples, area_seed, true});
                const double area1 = dec.area_common + dec.area_only1;
                const double area2 = dec.area_common + dec.area_only2;
                v1 = poisson_probability(lam_eff * area1, a) *
                     poisson_probability(lam_eff * area2, a);
                const Sector s1{x1, y1, p.alpha, r};
                const Sector s2{x2, y2, p.alpha, r};
                // Out side: x1's count gains the arc x1 -> x2. In side: x1's count
                // gains the arc x2 -> x1.
                const bool extra1 = side == Side::out ? sector_contains(s1, x2)
                                                      : sector_contains(s2, x1);
                const bool extra2 = side == Side::out ? sector_contains(s2, x1)
                                                      : sector_contains(s1, x2);
                const auto jp = joint_count_prob(dec, lam_eff, a, {extra1, 1.0 - p.q},
                                                 {extra2, 1.0 - p.q}, policy);
                v2 = jp.probability;
                trunc = jp.truncation_error;
            }
            acc[0].add(weight * v1);
            acc[1].add(weight * v2);
            acc[2].add(weight * (v1 + v2));
            acc[3].add(weight * trunc);
            acc[4].add(trunc);
        });
    const std::uint64_t n = budget.outer_samples;
    rep.i1 = m[0].mean(n);
    rep.i2 = m[1].mean(n);
    const Estimate sum = m[2].mean(n);
    rep.truncation_error = m[3].mean(n).value;
    rep.max_truncation_per_eval = m[4].max;

    const double ew = rep.expected_w.value;
    if (ew > 1.0) {
        const double val = sum.value / ew;
        const double rel_ew = rep.expected_w.standard_error / ew;
        rep.raw_bound = {val, std::sqrt(std::pow(sum.standard_error / ew, 2) +
                                        std::pow(val * rel_ew, 2))};
    } else {
        rep.raw_bound = sum;
    }
    rep.bound = {std::min(1.0, rep.raw_bound.value), rep.raw_bound.standard_error};
    return rep;
}

/// Half the L1 distance between the empirical law of `samples` and Poi(mean),
/// with the Poisson mass beyond the sample maximum counted in full.
inline double empirical_tv(std::span<const std::uint64_t> samples, double mean) {
    if (samples.empty()) throw std::invalid_argument("empirical_tv needs samples");
    const std::uint64_t top = *std::max_element(samples.begin(), samples.end());
    std::vector<double> hist(top + 1, 0.0);
    for (auto s : samples) hist[s] += 1.0;
    const double n = static_cast<double>(samples.size());
    double l1 = 0.0;
    for (std::uint64_t k = 0; k <= top; ++k) l1 += std::abs(hist[k] / n - poisson_pmf(mean, k));
    l1 += poisson_tail(mean, top + 1);
    return 0.5 * l1;
}

/// Bootstrap standard error of empirical_tv.
inline double empirical_tv_standard_error(std::span<const std::uint64_t> samples, double mean,
                                          std::uint32_t reps, std::uint64_t seed) {
    if (samples.empty() || reps < 2) return 0.0;
    Engine eng = make_engine(tagged_seed(seed, StreamTag::bootstrap));
    std::vector<std::uint64_t> resample(samples.size());
    detail::Moments mom;
    for (std::uint32_t b = 0; b < reps; ++b) {
        for (auto& s : resample) s = samples[eng() % samples.size()];
        mom.add(empirical_tv(resample, mean));
    }
    const double rd = reps;
    const double m = mom.sum / rd;
    return std::sqrt(std::max(0.0, (mom.sum_sq - mom.sum * m) / (rd - 1.0)));
}

}  // namespace sectorlab
