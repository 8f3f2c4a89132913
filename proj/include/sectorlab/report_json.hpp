#pragma once

// Structured report records (JSON) for the command-line front end.

#include <nlohmann/json.hpp>

#include "sectorlab/bounds.hpp"
#include "sectorlab/config.hpp"
#include "sectorlab/harness.hpp"
#include "sectorlab/theory.hpp"

namespace sectorlab {

using Json = nlohmann::ordered_json;

inline Json to_json(const Estimate& e) {
    return {{"value", e.value}, {"standard_error", e.standard_error}};
}

inline Json to_json(const ModelParams& p) {
    return {{"n", p.n},       {"alpha", p.alpha},
            {"r", p.r},       {"v", p.v},
            {"q", p.q},       {"mode", std::string(to_string(p.mode))},
            {"master_seed", p.master_seed}};
}

inline Json to_json(const FocusingPrediction& p) {
    return {{"mu", p.mu},
            {"j_n", p.j_n},
            {"k_n", p.k_n},
            {"xi_at_k", p.xi_at_k},
            {"a", p.a},
            {"p_max_eq_k_minus_1", p.p_km1},
            {"p_max_eq_k", p.p_k},
            {"limit_form",
             "P(max = k-1) -> exp(-a), P(max = k) -> 1 - exp(-a), a = n(1-v) xi(k); "
             "derived from P(max < k) - exp(-a) -> 0 and P(max < k+1) -> 1"}};
}

inline Json to_json(const RegimeReport& r) {
    return {{"mu", r.mu},
            {"epsilon", r.epsilon},
            {"mu_pow_1_plus_eps_over_ln_n", r.focusing_ratio},
            {"mu_over_n_pow_1_6", r.mu_over_pow},
            {"warnings", r.warnings}};
}

inline Json to_json(const Proportion& p) {
    return {{"count", p.count}, {"estimate", p.estimate}, {"ci_lower", p.lower},
            {"ci_upper", p.upper}};
}

inline Json to_json(const SideComparison& c) {
    return {{"side", std::string(to_string(c.side))},
            {"histogram", c.histogram},
            {"p_max_eq_k_minus_1", to_json(c.at_km1)},
            {"p_max_eq_k", to_json(c.at_k)},
            {"p_two_point", to_json(c.two_point)},
            {"p_elsewhere", c.elsewhere},
            {"predicted_p_max_eq_k_minus_1", c.predicted_km1},
            {"deviation", c.deviation},
            {"deviation_threshold", c.deviation_limit},
            {"two_point_threshold", c.two_point_limit},
            {"verdict", c.pass ? "PASS" : "FAIL"}};
}

inline Json to_json(const TVBoundReport& r) {
    Json j = {{"side", std::string(to_string(r.side))},
              {"A", r.a.to_string()},
              {"expected_w", to_json(r.expected_w)},
              {"i1", to_json(r.i1)},
              {"i2", to_json(r.i2)},
              {"truncation_error", r.truncation_error},
              {"max_truncation_per_eval", r.max_truncation_per_eval},
              {"raw_bound", to_json(r.raw_bound)},
              {"bound", to_json(r.bound)}};
    j["crude_i1"] = r.crude_i1 ? Json(*r.crude_i1) : Json(nullptr);
    return j;
}

inline Json to_json(const ExperimentReport& r) {
    Json sides = Json::array();
    for (const auto& s : r.sides) sides.push_back(to_json(s));
    Json bounds = Json::array();
    for (const auto& b : r.bound_checks) bounds.push_back(to_json(b));
    return {{"params", to_json(r.params)},
            {"prediction", to_json(r.prediction)},
            {"trials", r.trials},
            {"empty_trials", r.empty_trials},
            {"slack", r.slack},
            {"confidence", r.confidence},
            {"sides", sides},
            {"bound_checks", bounds},
            {"verdict", r.pass ? "PASS" : "FAIL"},
            {"wall_seconds", r.wall_seconds}};
}

inline Json to_json(const SweepResult& s) {
    Json pts = Json::array();
    for (const auto& pt : s.points) {
        Json j = {{"n", pt.n}, {"r", pt.r}};
        if (pt.report) j["report"] = to_json(*pt.report);
        else j["error"] = pt.error;
        pts.push_back(std::move(j));
    }
    return {{"points", pts}, {"k_monotone", s.k_monotone}, {"two_point_trend", s.two_point_trend}};
}

inline Json to_json(const ModeAgreement& m) {
    return {{"out", to_json(m.out)}, {"in", to_json(m.in)}};
}

}  // namespace sectorlab
