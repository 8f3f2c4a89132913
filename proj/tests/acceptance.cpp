// Acceptance checks: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "oracles.hpp"
#include "sectorlab/sectorlab.hpp"

using namespace sectorlab;

namespace {

// Tolerances.
constexpr double kTailRelTol = 1e-10;
constexpr double kSlack = 0.08;
constexpr double kModeDistanceTol = 0.1;
constexpr double kSigmas = 3.0;
constexpr double kMeanSigmas = 4.0;
constexpr double kGofQuantile = 0.999;

struct Outcome {
    bool pass = false;
    std::string detail;
};

ModelParams make(std::uint64_t n, double alpha, double v, double q, double mu_target, Mode m,
                 std::uint64_t seed) {
    ModelParams p;
    p.n = n;
    p.alpha = alpha;
    p.v = v;
    p.q = q;
    p.mode = m;
    p.master_seed = seed;
    p.r = radius_for_mu(static_cast<double>(n), alpha, v, q, mu_target);
    return p;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Outcome oracle_equivalence() {
    std::uint64_t instances = 0, mismatches = 0;
    for (std::uint64_t n : {50u, 200u, 500u})
        for (std::uint64_t t = 0; t < 100; ++t) {
            const Mode m = t % 2 ? Mode::poisson : Mode::binomial;
            const double alpha = 0.5 + 5.7 * counter_uniform(n, t, 0);
            const double v = t % 3 == 0 ? 0.0 : 0.2;
            const double q = t % 5 == 0 ? 0.0 : 0.3;
            ModelParams p;
            p.n = n;
            p.alpha = alpha;
            p.v = v;
            p.q = q;
            p.mode = m;
            p.master_seed = 100 + n;
            p.r = 0.02 + 0.25 * counter_uniform(n, t, 1);
            const auto s = trial_stream(p.master_seed, t);
            const auto g = sample_graph(p, s);
            const auto d = degree_summary(g);
            const auto want = oracle::brute_force(p, s);
            bool same = g.arcs == want.arcs;
            std::uint32_t mo = 0, mi = 0;
            for (std::size_t i = 0; i < g.realized_count; ++i) {
                if (!g.alive[i]) continue;
                same = same && *d.out_degrees[i] == want.out[i] && *d.in_degrees[i] == want.in[i];
                mo = std::max(mo, want.out[i]);
                mi = std::max(mi, want.in[i]);
            }
            same = same && d.max_out == mo && d.max_in == mi;
            ++instances;
            mismatches += same ? 0 : 1;
        }
    return {mismatches == 0, fmt("%llu instances, %llu mismatches", (unsigned long long)instances,
                                 (unsigned long long)mismatches)};
}

Outcome poisson_tail_numerics() {
    double worst = 0.0;
    std::uint64_t evaluated = 0;
    for (int i = 0; i <= 40; ++i) {
        const double m = 0.1 * std::pow(500.0, i / 40.0);  // 0.1 .. 50, log spaced
        for (std::uint64_t j = 0; j <= 200; ++j) {
            const double want_log = oracle::log_poisson_tail(m, j);
            const double got_log = log_poisson_tail(m, j);
            // Relative error of the value; computed through logs where the value
            // is below the normal double range.
            const double want = std::exp(want_log);
            const double rel = want > std::numeric_limits<double>::min()
                                   ? std::abs(poisson_tail(m, j) - want) / want
                                   : std::abs(std::expm1(got_log - want_log));
            worst = std::max(worst, rel);
            ++evaluated;
        }
    }
    return {worst <= kTailRelTol,
            fmt("%llu evaluations, worst relative error %.3g (tol %.0e)",
                (unsigned long long)evaluated, worst, kTailRelTol)};
}

Outcome kn_construction() {
    std::uint64_t checked = 0, bad = 0;
    for (double n : {1e2, 1e3, 1e4, 1e5, 1e6})
        for (double m : {0.5, 1.0, 2.0, 5.0})
            for (double v : {0.0, 0.3, 0.6}) {
                const auto idx = select_kn(n, v, m);
                const oracle::Big big_n = n, keep = 1.0 - v;
                const auto xi_j = oracle::poisson_tail(m, idx.j);
                const auto xi_jm1 = oracle::poisson_tail(m, idx.j - 1);
                bool ok = big_n * xi_j <= 1 / keep && big_n * xi_jm1 > 1 / keep;
                const bool down = keep * big_n * xi_j <= boost::multiprecision::sqrt(xi_j / xi_jm1);
                ok = ok && idx.k == (down ? idx.j - 1 : idx.j);
                const auto want = oracle::select_kn(n, v, m);
                ok = ok && want.j == idx.j && want.k == idx.k;
                ++checked;
                bad += ok ? 0 : 1;
            }
    const auto w1 = select_kn(1e4, 0.0, 1.0);
    const auto w2 = select_kn(3000, 0.0, 1.0);
    const auto o1 = oracle::select_kn(1e4, 0.0, 1.0);
    const auto o2 = oracle::select_kn(3000, 0.0, 1.0);
    const bool worked = w1.j == 7 && w1.k == 7 && w2.k == 6 && o1.j == 7 && o1.k == 7 && o2.k == 6;
    return {bad == 0 && worked,
            fmt("%llu grid points, %llu violations; n=1e4: j=%u k=%u; n=3000: k=%u",
                (unsigned long long)checked, (unsigned long long)bad, w1.j, w1.k, w2.k)};
}

Outcome focusing_verification() {
    bool pass = true;
    std::ostringstream os;
    for (Mode m : {Mode::poisson, Mode::binomial}) {
        const auto p = make(10000, kPi, 0.1, 0.2, 1.0, m, 2024);
        const auto rep = verify(p, 2000, 1, kSlack);
        pass = pass && rep.pass;
        os << to_string(m) << "[k=" << rep.prediction.k_n << " e^-a="
           << fmt("%.4f", rep.prediction.p_km1);
        for (const auto& s : rep.sides)
            os << fmt(" %s: P(k-1)=%.4f dev=%.4f<=%.4f two-point=%.4f>=%.2f %s",
                      std::string(to_string(s.side)).c_str(), s.at_km1.estimate, s.deviation,
                      s.deviation_limit, s.two_point.estimate, s.two_point_limit,
                      s.pass ? "ok" : "FAIL");
        os << "] ";
    }
    return {pass, os.str()};
}

Outcome deposissonization() {
    const auto p = make(10000, kPi, 0.1, 0.2, 1.0, Mode::binomial, 77);
    const auto agree = mode_agreement(p, 2000, 1, 200);
    const bool pass = agree.out.value <= kModeDistanceTol + agree.out.standard_error &&
                      agree.in.value <= kModeDistanceTol + agree.in.standard_error;
    return {pass, fmt("out distance %.4f (se %.4f), in distance %.4f (se %.4f), tol %.2f + se",
                      agree.out.value, agree.out.standard_error, agree.in.value,
                      agree.in.standard_error, kModeDistanceTol)};
}

Outcome bound_dominance() {
    std::uint64_t configs = 0, fails = 0;
    double worst_margin = -1e9;
    std::ostringstream failures;
    BoundsBudget budget;  // defaults: 1e4 outer samples, 1e5 area samples, cap 1e-8
    for (std::uint64_t n : {500u, 2000u})
        for (double m : {0.5, 1.0})
            for (double v : {0.0, 0.2})
                for (double q : {0.0, 0.2}) {
                    const auto p = make(n, kPi, v, q, m, Mode::poisson, 5000 + configs);
                    const DegreeSet a = DegreeSet::tail(predict(p).k_n);
                    TrialOptions opt;
                    opt.w_sets = {a};
                    const auto recs = run_trials(p, 2000, 1, opt);
                    for (Side side : {Side::out, Side::in}) {
                        budget.seed = 17 + configs;
                        const auto b = tv_bound(p, a, side, budget);
                        std::vector<std::uint64_t> w;
                        for (const auto& r : recs) w.push_back(side == Side::out ? r.w_out[0] : r.w_in[0]);
                        const double ew = b.expected_w.value;
                        const double tv = empirical_tv(w, ew);
                        const double se = empirical_tv_standard_error(w, ew, 200, 3 + configs);
                        const double combined = std::hypot(se, b.bound.standard_error);
                        const bool dominated = tv <= b.bound.value + kSigmas * combined;
                        const bool crude = b.i1.value <= *b.crude_i1 + kSigmas * b.i1.standard_error;
                        const bool trunc = b.max_truncation_per_eval < budget.truncation_cap;
                        worst_margin = std::max(worst_margin, tv - b.bound.value - kSigmas * combined);
                        if (!(dominated && crude && trunc)) {
                            ++fails;
                            failures << fmt(" [n=%llu mu=%.1f v=%.1f q=%.1f %s: tv=%.4f bound=%.4f "
                                            "I1=%.4g crude=%.4g]",
                                            (unsigned long long)n, m, v, q,
                                            std::string(to_string(side)).c_str(), tv, b.bound.value,
                                            b.i1.value, *b.crude_i1);
                        }
                        ++configs;
                    }
                }
    return {fails == 0, fmt("%llu configurations, %llu failures, worst (tv - bound - 3se) = %.4f",
                            (unsigned long long)configs, (unsigned long long)fails, worst_margin) +
                            failures.str()};
}

Outcome model_means() {
    const auto p = make(10000, kPi, 0.1, 0.2, 1.0, Mode::poisson, 31337);
    // Mean out-degree of interior alive vertices, one sample mean per trial.
    double s = 0.0, s2 = 0.0;
    const std::uint64_t trials = 500;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const auto g = sample_graph(p, t);
        const auto d = degree_summary(g);
        double sum = 0.0;
        std::uint64_t cnt = 0;
        for (std::size_t i = 0; i < g.realized_count; ++i) {
            if (!g.alive[i]) continue;
            const Point2 x = g.positions[i];
            if (!disk_inside_unit_square(x, p.r)) continue;
            sum += *d.out_degrees[i];
            ++cnt;
        }
        const double mean = sum / static_cast<double>(cnt);
        s += mean;
        s2 += mean * mean;
    }
    const double tm = static_cast<double>(trials);
    const double grand = s / tm;
    const double se = std::sqrt((s2 / tm - grand * grand) / (tm - 1.0));
    const double mu_p = mu(p);
    const bool mean_ok = std::abs(grand - mu_p) <= kMeanSigmas * se;

    // alive_count ~ Poisson(n(1-v)): chi-square over bins with expected count >= 5.
    const auto recs = run_trials(p, 2000, 1);
    const double lam = 10000 * 0.9;
    const std::int64_t lo = static_cast<std::int64_t>(lam - 5 * std::sqrt(lam));
    const std::int64_t hi = static_cast<std::int64_t>(lam + 5 * std::sqrt(lam));
    const double T = static_cast<double>(recs.size());
    // Bins of width w; the two ends are open tails.
    const std::int64_t w = 10;
    std::vector<double> observed, expected;
    std::vector<std::int64_t> edges;
    for (std::int64_t e = lo; e <= hi; e += w) edges.push_back(e);
    const std::size_t nb = edges.size() + 1;
    observed.assign(nb, 0.0);
    for (const auto& r : recs) {
        const auto x = static_cast<std::int64_t>(r.alive_count);
        const auto it = std::upper_bound(edges.begin(), edges.end(), x);
        observed[static_cast<std::size_t>(it - edges.begin())] += 1.0;
    }
    auto cdf_below = [&](std::int64_t e) { return 1.0 - poisson_tail(lam, static_cast<std::uint64_t>(e)); };
    expected.assign(nb, 0.0);
    expected[0] = T * cdf_below(edges.front());
    for (std::size_t b = 1; b + 1 < nb; ++b)
        expected[b] = T * (cdf_below(edges[b]) - cdf_below(edges[b - 1]));
    expected[nb - 1] = T * poisson_tail(lam, static_cast<std::uint64_t>(edges.back()));
    // Merge sparse bins into their neighbours.
    std::vector<double> eo, ee;
    double acc_o = 0.0, acc_e = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
        acc_o += observed[b];
        acc_e += expected[b];
        if (acc_e >= 5.0) {
            eo.push_back(acc_o);
            ee.push_back(acc_e);
            acc_o = acc_e = 0.0;
        }
    }
    eo.back() += acc_o;
    ee.back() += acc_e;
    double chi2 = 0.0;
    for (std::size_t b = 0; b < eo.size(); ++b) chi2 += (eo[b] - ee[b]) * (eo[b] - ee[b]) / ee[b];
    const double df = static_cast<double>(eo.size() - 1);
    const double crit = boost::math::quantile(boost::math::chi_squared(df), kGofQuantile);
    const bool gof_ok = chi2 <= crit;
    return {mean_ok && gof_ok,
            fmt("interior mean out-degree %.5f vs mu %.5f (se %.5f, |z| = %.2f <= %.0f); "
                "alive_count chi2 %.2f <= %.2f (df %.0f)",
                grand, mu_p, se, std::abs(grand - mu_p) / se, kMeanSigmas, chi2, crit, df)};
}

Outcome determinism() {
    const auto p = make(10000, kPi, 0.1, 0.2, 1.0, Mode::poisson, 99);
    std::ostringstream a, b;
    write_trials_csv(a, run_trials(p, 400, 1));
    write_trials_csv(b, run_trials(p, 400, 8));
    const bool same = a.str() == b.str();
    return {same, fmt("400 trials, %zu bytes, parallelism 1 vs 8 %s", a.str().size(),
                      same ? "byte-identical" : "DIFFER")};
}

Outcome structural_invariants() {
    std::uint64_t graphs = 0, violations = 0, arcs = 0;
    for (double alpha : {0.7, kPi, 4.0, kTwoPi})
        for (double v : {0.0, 0.25})
            for (double q : {0.0, 0.3})
                for (Mode m : {Mode::binomial, Mode::poisson})
                    for (std::uint64_t t = 0; t < 5; ++t) {
                        const auto p = make(3000, alpha, v, q, 2.0, m, 4242);
                        const auto g = sample_graph(p, t);
                        const auto d = degree_summary(g);
                        bool ok = true;
                        std::uint64_t so = 0, si = 0;
                        for (std::size_t i = 0; i < g.realized_count; ++i) {
                            if (d.out_degrees[i]) so += *d.out_degrees[i];
                            if (d.in_degrees[i]) si += *d.in_degrees[i];
                        }
                        ok = ok && so == g.arcs.size() && si == g.arcs.size();
                        for (const Arc& a : g.arcs)
                            ok = ok && g.alive[a.from] && g.alive[a.to] &&
                                 sector_contains(g.sector_of(a.from), g.positions[a.to]);
                        if (alpha == kTwoPi && q == 0.0)
                            for (std::size_t i = 0; i < g.realized_count; ++i)
                                ok = ok && d.out_degrees[i] == d.in_degrees[i];
                        if (v == 0.0) ok = ok && d.alive_count == g.realized_count;
                        arcs += g.arcs.size();
                        ++graphs;
                        violations += ok ? 0 : 1;
                    }
    return {violations == 0, fmt("%llu graphs, %llu arcs, %llu violations",
                                 (unsigned long long)graphs, (unsigned long long)arcs,
                                 (unsigned long long)violations)};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double time_limit_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "oracle equivalence", 60, oracle_equivalence},
        {2, "poisson tail numerics", 60, poisson_tail_numerics},
        {3, "k_n construction", 60, kn_construction},
        {4, "focusing verification", 600, focusing_verification},
        {5, "de-poissonization", 600, deposissonization},
        {6, "total-variation bound dominance", 600, bound_dominance},
        {7, "model means", 600, model_means},
        {8, "determinism", 600, determinism},
        {9, "structural invariants", 600, structural_invariants},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs <= c.time_limit_s;
        const bool pass = o.pass && in_time;
        std::printf("%s criterion %d (%s) [%.1fs, limit %.0fs%s]: %s\n", pass ? "PASS" : "FAIL",
                    c.id, c.name, secs, c.time_limit_s, in_time ? "" : " EXCEEDED",
                    o.detail.c_str());
        std::fflush(stdout);
        failed += pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
