#pragma once

// Seeded Monte Carlo experiments over the faulty sector graph and their
// comparison with the focusing prediction.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <boost/math/distributions/beta.hpp>

#include "sectorlab/bounds.hpp"
#include "sectorlab/degree_set.hpp"
#include "sectorlab/model.hpp"
#include "sectorlab/parallel.hpp"
#include "sectorlab/random.hpp"
#include "sectorlab/theory.hpp"

namespace sectorlab {

struct TrialOptions {
    /// Keep the per-vertex degree histograms (indexed by degree).
    bool keep_histogram = false;
    /// Record W_A for each set, on both sides.
    std::vector<DegreeSet> w_sets;
};

/// Outcome of one trial; a pure function of (params, trial_index).
struct TrialRecord {
    std::uint64_t trial_index = 0;
    std::uint64_t seed = 0;
    std::uint64_t realized_count = 0;
    std::uint64_t alive_count = 0;
    std::uint32_t max_out = 0;
    std::uint32_t max_in = 0;
    bool empty = true;
    std::optional<std::vector<std::uint64_t>> out_histogram;
    std::optional<std::vector<std::uint64_t>> in_histogram;
    std::vector<std::uint64_t> w_out;
    std::vector<std::uint64_t> w_in;

    std::uint32_t max_degree(Side s) const { return s == Side::out ? max_out : max_in; }

    friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

inline TrialRecord run_trial(const ModelParams& p, std::uint64_t trial_index,
                             const TrialOptions& opt = {}) {
    const TrialStream stream = trial_stream(p.master_seed, trial_index);
    const FaultySectorGraph g = sample_graph(p, stream);
    const DegreeSummary d = degree_summary(g);
    TrialRecord rec;
    rec.trial_index = trial_index;
    rec.seed = stream.key;
    rec.realized_count = g.realized_count;
    rec.alive_count = d.alive_count;
    rec.max_out = d.max_out;
    rec.max_in = d.max_in;
    rec.empty = d.empty;
    if (opt.keep_histogram) {
        auto hist = [&](Side s) {
            std::vector<std::uint64_t> h(d.max_degree(s) + 1, 0);
            for (const auto& deg : d.degrees(s))
                if (deg) ++h[*deg];
            return h;
        };
        rec.out_histogram = hist(Side::out);
        rec.in_histogram = hist(Side::in);
    }
    for (const auto& a : opt.w_sets) {
        rec.w_out.push_back(degree_count(d, a, Side::out));
        rec.w_in.push_back(degree_count(d, a, Side::in));
    }
    return rec;
}

/// T trials with indices 0..T-1; the result is independent of `parallelism`.
inline std::vector<TrialRecord> run_trials(const ModelParams& p, std::uint64_t trials,
                                           unsigned parallelism, const TrialOptions& opt = {}) {
    validate(p);
    if (trials < 1) throw ConfigError("trials", "must be >= 1");
    std::vector<TrialRecord> out(trials);
    parallel_for(trials, parallelism,
                 [&](std::uint64_t t) { out[t] = run_trial(p, t, opt); });
    return out;
}

/// Per-trial CSV: trial,seed,N,alive,max_out,max_in,empty.
inline void write_trials_csv(std::ostream& os, std::span<const TrialRecord> records) {
    os << "trial,seed,N,alive,max_out,max_in,empty\n";
    for (const auto& r : records)
        os << r.trial_index << ',' << r.seed << ',' << r.realized_count << ',' << r.alive_count
           << ',' << r.max_out << ',' << r.max_in << ',' << (r.empty ? 1 : 0) << '\n';
}

/// Binomial proportion with an exact (Clopper-Pearson) confidence interval.
struct Proportion {
    std::uint64_t count = 0;
    std::uint64_t trials = 0;
    double estimate = 0.0;
    double lower = 0.0;
    double upper = 1.0;

    double half_width() const { return 0.5 * (upper - lower); }
};

inline Proportion clopper_pearson(std::uint64_t count, std::uint64_t trials, double confidence) {
    Proportion p;
    p.count = count;
    p.trials = trials;
    if (trials == 0) return p;
    const double x = static_cast<double>(count);
    const double n = static_cast<double>(trials);
    const double tail = 0.5 * (1.0 - confidence);
    p.estimate = x / n;
    namespace bm = boost::math;
    p.lower = count == 0 ? 0.0 : bm::quantile(bm::beta_distribution<>(x, n - x + 1.0), tail);
    p.upper = count == trials ? 1.0
                              : bm::quantile(bm::beta_distribution<>(x + 1.0, n - x), 1.0 - tail);
    return p;
}

/// Empirical law of the maximum degree on one side versus the two-point prediction.
struct SideComparison {
    Side side = Side::out;
    /// histogram[d] = number of trials with maximum degree d.
    std::vector<std::uint64_t> histogram;
    Proportion at_km1;
    Proportion at_k;
    Proportion two_point;
    double elsewhere = 0.0;
    double predicted_km1 = 0.0;
    double deviation = 0.0;       // |P(D = k-1) - exp(-a)|
    double deviation_limit = 0.0; // slack + CI half-width
    double two_point_limit = 0.0; // 1 - 2 slack
    bool pass = false;
};

struct ExperimentReport {
    ModelParams params;
    FocusingPrediction prediction;
    std::uint64_t trials = 0;
    std::uint64_t empty_trials = 0;
    double slack = 0.08;
    double confidence = 0.95;
    std::vector<SideComparison> sides;
    std::vector<TVBoundReport> bound_checks;
    bool pass = false;
    double wall_seconds = 0.0;
};

inline SideComparison compare_side(std::span<const TrialRecord> records,
                                   const FocusingPrediction& pred, Side side, double slack,
                                   double confidence) {
    SideComparison c;
    c.side = side;
    for (const auto& r : records) {
        const std::uint32_t d = r.max_degree(side);
        if (c.histogram.size() <= d) c.histogram.resize(d + 1, 0);
        ++c.histogram[d];
    }
    const std::uint64_t t = records.size();
    auto count_at = [&](std::int64_t d) -> std::uint64_t {
        return d >= 0 && static_cast<std::size_t>(d) < c.histogram.size() ? c.histogram[d] : 0;
    };
    const std::int64_t k = pred.k_n;
    c.at_km1 = clopper_pearson(count_at(k - 1), t, confidence);
    c.at_k = clopper_pearson(count_at(k), t, confidence);
    c.two_point = clopper_pearson(count_at(k - 1) + count_at(k), t, confidence);
    c.elsewhere = 1.0 - c.two_point.estimate;
    c.predicted_km1 = pred.p_km1;
    c.deviation = std::abs(c.at_km1.estimate - pred.p_km1);
    c.deviation_limit = slack + c.at_km1.half_width();
    c.two_point_limit = 1.0 - 2.0 * slack;
    c.pass = c.deviation <= c.deviation_limit && c.two_point.estimate >= c.two_point_limit;
    return c;
}

/// PASS iff on every requested side |P(D = k-1) - exp(-a)| <= slack + CI
/// half-width and P(D ∈ {k-1, k}) >= 1 - 2 slack.
inline ExperimentReport compare(std::span<const TrialRecord> records,
                                const FocusingPrediction& pred, double slack,
                                std::vector<Side> sides = {Side::out, Side::in},
                                double confidence = 0.95) {
    if (records.empty()) throw std::invalid_argument("compare needs at least one record");
    ExperimentReport rep;
    rep.prediction = pred;
    rep.trials = records.size();
    rep.slack = slack;
    rep.confidence = confidence;
    for (const auto& r : records) rep.empty_trials += r.empty ? 1 : 0;
    rep.pass = true;
    for (Side s : sides) {
        rep.sides.push_back(compare_side(records, pred, s, slack, confidence));
        rep.pass = rep.pass && rep.sides.back().pass;
    }
    return rep;
}

/// predict + run_trials + compare.
inline ExperimentReport verify(const ModelParams& p, std::uint64_t trials, unsigned parallelism,
                               double slack, std::vector<Side> sides = {Side::out, Side::in},
                               std::optional<std::uint32_t> k_override = std::nullopt) {
    const auto start = std::chrono::steady_clock::now();
    FocusingPrediction pred = predict(p);
    if (k_override) {
        pred.k_n = *k_override;
        pred.xi_at_k = poisson_tail(pred.mu, pred.k_n);
        pred.a = static_cast<double>(p.n) * (1.0 - p.v) * pred.xi_at_k;
        pred.p_km1 = std::exp(-pred.a);
        pred.p_k = 1.0 - pred.p_km1;
    }
    const auto records = run_trials(p, trials, parallelism);
    ExperimentReport rep = compare(records, pred, slack, std::move(sides));
    rep.params = p;
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

/// Radius per grid point: fixed mu (r from radius_for_mu) or an explicit list.
struct FixedMu {
    double mu = 1.0;
};
using RadiusSchedule = std::variant<FixedMu, std::vector<double>>;

struct SweepPoint {
    std::uint64_t n = 0;
    double r = 0.0;
    std::optional<ExperimentReport> report;
    std::string error;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    /// k_n nondecreasing in n over the successful points.
    bool k_monotone = true;
    /// Out-side two-point mass nondecreasing in n up to overlapping CIs.
    bool two_point_trend = true;

    std::size_t failures() const {
        return static_cast<std::size_t>(std::count_if(points.begin(), points.end(), [](const auto& pt) {
            return !pt.report || !pt.report->pass;
        }));
    }
};

inline SweepResult sweep(const ModelParams& base, std::span<const std::uint64_t> n_grid,
                         const RadiusSchedule& schedule, std::uint64_t trials,
                         unsigned parallelism, double slack,
                         std::vector<Side> sides = {Side::out, Side::in}) {
    if (n_grid.empty()) throw ConfigError("n_grid", "must not be empty");
    if (const auto* radii = std::get_if<std::vector<double>>(&schedule);
        radii && radii->size() != n_grid.size())
        throw ConfigError("r_list", "must have one radius per grid point");
    SweepResult res;
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        SweepPoint pt;
        pt.n = n_grid[i];
        try {
            ModelParams p = base;
            p.n = n_grid[i];
            if (const auto* fm = std::get_if<FixedMu>(&schedule))
                p.r = radius_for_mu(static_cast<double>(p.n), p.alpha, p.v, p.q, fm->mu);
            else
                p.r = std::get<std::vector<double>>(schedule)[i];
            pt.r = p.r;
            pt.report = verify(p, trials, parallelism, slack, sides);
        } catch (const std::exception& e) {
            pt.error = e.what();
        }
        res.points.push_back(std::move(pt));
    }
    const SweepPoint* prev = nullptr;
    for (const auto& pt : res.points) {
        if (!pt.report) continue;
        if (prev) {
            res.k_monotone =
                res.k_monotone && pt.report->prediction.k_n >= prev->report->prediction.k_n;
            res.two_point_trend = res.two_point_trend &&
                                  pt.report->sides.front().two_point.upper >=
                                      prev->report->sides.front().two_point.lower;
        }
        prev = &pt;
    }
    return res;
}

/// Half the L1 distance between the empirical laws of two integer samples.
inline double empirical_law_distance(std::span<const std::uint32_t> a,
                                     std::span<const std::uint32_t> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("empty sample");
    std::uint32_t top = 0;
    for (auto x : a) top = std::max(top, x);
    for (auto x : b) top = std::max(top, x);
    std::vector<double> ha(top + 1, 0.0), hb(top + 1, 0.0);
    for (auto x : a) ha[x] += 1.0 / static_cast<double>(a.size());
    for (auto x : b) hb[x] += 1.0 / static_cast<double>(b.size());
    double l1 = 0.0;
    for (std::uint32_t k = 0; k <= top; ++k) l1 += std::abs(ha[k] - hb[k]);
    return 0.5 * l1;
}

/// Distance with a bootstrap standard error (both samples resampled).
inline Estimate bootstrap_law_distance(std::span<const std::uint32_t> a,
                                       std::span<const std::uint32_t> b, std::uint32_t reps,
                                       std::uint64_t seed) {
    Estimate e{empirical_law_distance(a, b), 0.0};
    if (reps < 2) return e;
    Engine eng = make_engine(tagged_seed(seed, StreamTag::bootstrap));
    std::vector<std::uint32_t> ra(a.size()), rb(b.size());
    detail::Moments mom;
    for (std::uint32_t i = 0; i < reps; ++i) {
        for (auto& x : ra) x = a[eng() % a.size()];
        for (auto& x : rb) x = b[eng() % b.size()];
        mom.add(empirical_law_distance(ra, rb));
    }
    const double m = mom.sum / reps;
    e.standard_error = std::sqrt(std::max(0.0, (mom.sum_sq - mom.sum * m) / (reps - 1.0)));
    return e;
}

inline std::vector<std::uint32_t> max_degrees(std::span<const TrialRecord> records, Side s) {
    std::vector<std::uint32_t> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.max_degree(s));
    return out;
}

struct ModeAgreement {
    Estimate out;
    Estimate in;
};

/// Distance between the binomial-mode and Poisson-mode laws of the maximum
/// degree, each estimated from T trials with the same master seed.
inline ModeAgreement mode_agreement(const ModelParams& p, std::uint64_t trials,
                                    unsigned parallelism, std::uint32_t bootstrap_reps = 200) {
    ModelParams pb = p, pp = p;
    pb.mode = Mode::binomial;
    pp.mode = Mode::poisson;
    const auto rb = run_trials(pb, trials, parallelism);
    const auto rp = run_trials(pp, trials, parallelism);
    ModeAgreement m;
    m.out = bootstrap_law_distance(max_degrees(rb, Side::out), max_degrees(rp, Side::out),
                                   bootstrap_reps, p.master_seed);
    m.in = bootstrap_law_distance(max_degrees(rb, Side::in), max_degrees(rp, Side::in),
                                  bootstrap_reps, p.master_seed + 1);
    return m;
}

}  // namespace sectorlab
