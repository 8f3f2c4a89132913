#pragma once

// Run configuration for the command-line front end.
//
// File format: one `key = value` per line, `#` starts a comment, blank lines
// are ignored. Lists are comma separated; degree sets are separated by `;`.
// Angles accept plain numbers or the forms pi, 2pi, pi/2, 3pi/2.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sectorlab/bounds.hpp"
#include "sectorlab/degree_set.hpp"
#include "sectorlab/errors.hpp"
#include "sectorlab/model.hpp"
#include "sectorlab/theory.hpp"

namespace sectorlab {

enum class ModeSelection { binomial, poisson, both };
enum class SideSelection { out, in, both };

struct RunConfig {
    std::uint64_t n = 10000;
    double alpha = kPi;
    std::optional<double> r;
    std::optional<double> mu_target;
    double v = 0.0;
    double q = 0.0;
    ModeSelection mode = ModeSelection::poisson;
    std::uint64_t seed = 1;
    std::uint64_t trials = 2000;
    unsigned parallelism = 1;
    double epsilon = 1.0;
    double slack = 0.08;
    std::vector<DegreeSet> a_sets;
    SideSelection side = SideSelection::both;
    std::uint64_t outer_samples = 10000;
    std::uint64_t area_samples = 100000;
    std::uint64_t pair_area_samples = 100000;
    double truncation_cap = 1e-8;
    std::uint32_t max_terms = 100000;
    std::vector<std::uint64_t> n_grid;
    std::vector<double> r_list;
    std::optional<std::uint32_t> k_override;
    std::uint32_t bootstrap_reps = 200;
    std::string out;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace config_detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_integer(std::string_view key, std::string_view text) {
    T v{};
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size())
        throw ConfigError(std::string(key), "expected a nonnegative integer, got '" +
                                                std::string(text) + "'");
    return v;
}

inline double parse_real(std::string_view key, std::string_view text) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size() || !std::isfinite(v))
        throw ConfigError(std::string(key), "expected a number, got '" + std::string(text) + "'");
    return v;
}

/// Number, or [c]pi[/d].
inline double parse_angle(std::string_view key, std::string_view text) {
    const auto pos = text.find("pi");
    if (pos == std::string_view::npos) return parse_real(key, text);
    double coeff = 1.0, denom = 1.0;
    const auto head = text.substr(0, pos);
    if (!head.empty()) coeff = parse_real(key, trim(head.ends_with('*') ? head.substr(0, head.size() - 1) : head));
    auto tail = text.substr(pos + 2);
    if (!tail.empty()) {
        if (tail.front() != '/') throw ConfigError(std::string(key), "bad angle '" + std::string(text) + "'");
        denom = parse_real(key, tail.substr(1));
    }
    return coeff * kPi / denom;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    while (true) {
        const auto pos = s.find(sep);
        const auto tok = trim(s.substr(0, pos));
        if (!tok.empty()) out.push_back(tok);
        if (pos == std::string_view::npos) break;
        s.remove_prefix(pos + 1);
    }
    return out;
}

inline std::string format_real(double v) {
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

}  // namespace config_detail

inline std::string_view to_string(ModeSelection m) {
    switch (m) {
        case ModeSelection::binomial: return "binomial";
        case ModeSelection::poisson: return "poisson";
        case ModeSelection::both: return "both";
    }
    return "";
}

inline std::string_view to_string(SideSelection s) {
    switch (s) {
        case SideSelection::out: return "out";
        case SideSelection::in: return "in";
        case SideSelection::both: return "both";
    }
    return "";
}

inline ModeSelection parse_mode_selection(std::string_view s) {
    if (s == "both") return ModeSelection::both;
    return parse_mode(s) == Mode::binomial ? ModeSelection::binomial : ModeSelection::poisson;
}

inline SideSelection parse_side_selection(std::string_view s) {
    if (s == "both") return SideSelection::both;
    return parse_side(s) == Side::out ? SideSelection::out : SideSelection::in;
}

inline std::vector<Mode> modes(ModeSelection m) {
    if (m == ModeSelection::both) return {Mode::binomial, Mode::poisson};
    return {m == ModeSelection::binomial ? Mode::binomial : Mode::poisson};
}

inline std::vector<Side> sides(SideSelection s) {
    if (s == SideSelection::both) return {Side::out, Side::in};
    return {s == SideSelection::out ? Side::out : Side::in};
}

/// Apply one key/value pair. Unknown keys are errors.
inline void set_config_value(RunConfig& c, std::string_view key, std::string_view value) {
    using namespace config_detail;
    const std::string k(key);
    if (key == "n") c.n = parse_integer<std::uint64_t>(key, value);
    else if (key == "alpha") c.alpha = parse_angle(key, value);
    else if (key == "r") c.r = parse_real(key, value);
    else if (key == "mu_target") c.mu_target = parse_real(key, value);
    else if (key == "v") c.v = parse_real(key, value);
    else if (key == "q") c.q = parse_real(key, value);
    else if (key == "mode") c.mode = parse_mode_selection(value);
    else if (key == "seed") c.seed = parse_integer<std::uint64_t>(key, value);
    else if (key == "trials") c.trials = parse_integer<std::uint64_t>(key, value);
    else if (key == "parallelism") c.parallelism = parse_integer<unsigned>(key, value);
    else if (key == "epsilon") c.epsilon = parse_real(key, value);
    else if (key == "slack") c.slack = parse_real(key, value);
    else if (key == "a_sets") {
        c.a_sets.clear();
        for (auto tok : split(value, ';')) c.a_sets.push_back(DegreeSet::parse(tok));
    } else if (key == "side") c.side = parse_side_selection(value);
    else if (key == "outer_samples") c.outer_samples = parse_integer<std::uint64_t>(key, value);
    else if (key == "area_samples") c.area_samples = parse_integer<std::uint64_t>(key, value);
    else if (key == "pair_area_samples")
        c.pair_area_samples = parse_integer<std::uint64_t>(key, value);
    else if (key == "truncation_cap") c.truncation_cap = parse_real(key, value);
    else if (key == "max_terms") c.max_terms = parse_integer<std::uint32_t>(key, value);
    else if (key == "n_grid") {
        c.n_grid.clear();
        for (auto tok : split(value, ',')) c.n_grid.push_back(parse_integer<std::uint64_t>(key, tok));
    } else if (key == "r_list") {
        c.r_list.clear();
        for (auto tok : split(value, ',')) c.r_list.push_back(parse_real(key, tok));
    } else if (key == "k_override") c.k_override = parse_integer<std::uint32_t>(key, value);
    else if (key == "bootstrap_reps") c.bootstrap_reps = parse_integer<std::uint32_t>(key, value);
    else if (key == "out") c.out = std::string(value);
    else throw ConfigError(k, "unknown configuration key");
}

inline RunConfig parse_config(std::istream& in, RunConfig c = {}) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view s(line);
        if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
        s = config_detail::trim(s);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(lineno), "expected key = value");
        set_config_value(c, config_detail::trim(s.substr(0, eq)),
                         config_detail::trim(s.substr(eq + 1)));
    }
    return c;
}

inline RunConfig parse_config(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_config(in);
}

/// Inverse of parse_config: every set field, fixed key order, shortest round-trip reals.
inline std::string serialize_config(const RunConfig& c) {
    using config_detail::format_real;
    std::ostringstream os;
    os << "n = " << c.n << '\n' << "alpha = " << format_real(c.alpha) << '\n';
    if (c.r) os << "r = " << format_real(*c.r) << '\n';
    if (c.mu_target) os << "mu_target = " << format_real(*c.mu_target) << '\n';
    os << "v = " << format_real(c.v) << '\n'
       << "q = " << format_real(c.q) << '\n'
       << "mode = " << to_string(c.mode) << '\n'
       << "seed = " << c.seed << '\n'
       << "trials = " << c.trials << '\n'
       << "parallelism = " << c.parallelism << '\n'
       << "epsilon = " << format_real(c.epsilon) << '\n'
       << "slack = " << format_real(c.slack) << '\n';
    if (!c.a_sets.empty()) {
        os << "a_sets = ";
        for (std::size_t i = 0; i < c.a_sets.size(); ++i)
            os << (i ? ";" : "") << c.a_sets[i].to_string();
        os << '\n';
    }
    os << "side = " << to_string(c.side) << '\n'
       << "outer_samples = " << c.outer_samples << '\n'
       << "area_samples = " << c.area_samples << '\n'
       << "pair_area_samples = " << c.pair_area_samples << '\n'
       << "truncation_cap = " << format_real(c.truncation_cap) << '\n'
       << "max_terms = " << c.max_terms << '\n';
    if (!c.n_grid.empty()) {
        os << "n_grid = ";
        for (std::size_t i = 0; i < c.n_grid.size(); ++i) os << (i ? "," : "") << c.n_grid[i];
        os << '\n';
    }
    if (!c.r_list.empty()) {
        os << "r_list = ";
        for (std::size_t i = 0; i < c.r_list.size(); ++i)
            os << (i ? "," : "") << format_real(c.r_list[i]);
        os << '\n';
    }
    if (c.k_override) os << "k_override = " << *c.k_override << '\n';
    os << "bootstrap_reps = " << c.bootstrap_reps << '\n';
    if (!c.out.empty()) os << "out = " << c.out << '\n';
    return os.str();
}

/// Field checks shared by every command. `sweep` allows an r_list in place of r/mu_target.
inline void validate(const RunConfig& c, bool sweep = false) {
    if (c.n < 1) throw ConfigError("n", "must be >= 1");
    if (!(c.alpha > 0.0 && c.alpha <= kTwoPi)) throw ConfigError("alpha", "must lie in (0, 2pi]");
    if (!(c.v >= 0.0 && c.v < 1.0)) throw ConfigError("v", "must lie in [0, 1)");
    if (!(c.q >= 0.0 && c.q < 1.0)) throw ConfigError("q", "must lie in [0, 1)");
    const bool list = sweep && !c.r_list.empty();
    const int given = (c.r ? 1 : 0) + (c.mu_target ? 1 : 0) + (list ? 1 : 0);
    if (given != 1)
        throw ConfigError("r", sweep ? "provide exactly one of r, mu_target or r_list"
                                     : "provide exactly one of r or mu_target");
    if (c.r && !(*c.r > 0.0 && *c.r < 0.5)) throw ConfigError("r", "must lie in (0, 0.5)");
    if (c.mu_target && !(*c.mu_target > 0.0)) throw ConfigError("mu_target", "must be positive");
    for (double r : c.r_list)
        if (!(r > 0.0 && r < 0.5)) throw ConfigError("r_list", "radii must lie in (0, 0.5)");
    if (c.trials < 1) throw ConfigError("trials", "must be >= 1");
    if (c.parallelism < 1) throw ConfigError("parallelism", "must be >= 1");
    if (!(c.epsilon > 0.0)) throw ConfigError("epsilon", "must be positive");
    if (!(c.slack >= 0.0 && c.slack < 0.5)) throw ConfigError("slack", "must lie in [0, 0.5)");
    if (!(c.truncation_cap > 0.0 && c.truncation_cap < 1.0))
        throw ConfigError("truncation_cap", "must lie in (0, 1)");
    if (c.max_terms < 1) throw ConfigError("max_terms", "must be >= 1");
    if (c.outer_samples < 2) throw ConfigError("outer_samples", "must be >= 2");
    if (sweep && c.n_grid.empty()) throw ConfigError("n_grid", "must not be empty");
    if (sweep && list && c.r_list.size() != c.n_grid.size())
        throw ConfigError("r_list", "must have one radius per n_grid entry");
}

/// Model parameters for one mode; r comes from r or from mu_target.
inline ModelParams model_params(const RunConfig& c, Mode mode, std::uint64_t n) {
    ModelParams p;
    p.n = n;
    p.alpha = c.alpha;
    p.v = c.v;
    p.q = c.q;
    p.mode = mode;
    p.master_seed = c.seed;
    p.r = c.r ? *c.r
              : radius_for_mu(static_cast<double>(n), c.alpha, c.v, c.q, c.mu_target.value_or(1.0));
    validate(p);
    return p;
}

inline ModelParams model_params(const RunConfig& c, Mode mode) {
    return model_params(c, mode, c.n);
}

inline BoundsBudget bounds_budget(const RunConfig& c) {
    BoundsBudget b;
    b.outer_samples = c.outer_samples;
    b.area_samples = c.area_samples;
    b.pair_area_samples = c.pair_area_samples;
    b.truncation_cap = c.truncation_cap;
    b.max_terms = c.max_terms;
    b.parallelism = c.parallelism;
    b.seed = c.seed;
    return b;
}

}  // namespace sectorlab
