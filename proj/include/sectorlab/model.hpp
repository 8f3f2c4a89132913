#pragma once

// The random faulty scaled sector graph G_alpha(X, Y, v, q, r), binomial and
// Poisson versions, and its degree statistics.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/random/poisson_distribution.hpp>

#include "sectorlab/degree_set.hpp"
#include "sectorlab/errors.hpp"
#include "sectorlab/geometry.hpp"
#include "sectorlab/random.hpp"

namespace sectorlab {

enum class Mode { binomial, poisson };
enum class Side { out, in };

inline std::string_view to_string(Mode m) {
    return m == Mode::binomial ? "binomial" : "poisson";
}
inline std::string_view to_string(Side s) {
    return s == Side::out ? "out" : "in";
}

inline Mode parse_mode(std::string_view s) {
    if (s == "binomial") return Mode::binomial;
    if (s == "poisson") return Mode::poisson;
    throw ConfigError("mode", "expected binomial or poisson, got '" + std::string(s) + "'");
}

inline Side parse_side(std::string_view s) {
    if (s == "out") return Side::out;
    if (s == "in") return Side::in;
    throw ConfigError("side", "expected out or in, got '" + std::string(s) + "'");
}

/// Model inputs. In Poisson mode n is the intensity of the point process.
struct ModelParams {
    std::uint64_t n = 1;
    double alpha = kTwoPi;
    double r = 0.1;
    double v = 0.0;
    double q = 0.0;
    Mode mode = Mode::binomial;
    std::uint64_t master_seed = 0;
};

inline void validate(const ModelParams& p) {
    if (p.n < 1) throw ConfigError("n", "must be >= 1");
    if (!(p.alpha > 0.0 && p.alpha <= kTwoPi)) throw ConfigError("alpha", "must lie in (0, 2pi]");
    if (!(p.r > 0.0 && p.r < 0.5)) throw ConfigError("r", "must lie in (0, 0.5)");
    if (!(p.v >= 0.0 && p.v < 1.0)) throw ConfigError("v", "must lie in [0, 1)");
    if (!(p.q >= 0.0 && p.q < 1.0)) throw ConfigError("q", "must lie in [0, 1)");
}

struct Arc {
    std::uint32_t from = 0;
    std::uint32_t to = 0;

    friend constexpr auto operator<=>(const Arc&, const Arc&) = default;
};

/// One realization. Arcs are sorted by (from, to).
struct FaultySectorGraph {
    std::uint64_t realized_count = 0;
    double alpha = kTwoPi;
    double radius = 0.0;
    std::vector<Point2> positions;
    std::vector<double> orientations;
    std::vector<bool> alive;
    std::vector<Arc> arcs;

    Sector sector_of(std::size_t i) const {
        return {positions[i], orientations[i], alpha, radius};
    }
};

/// Random stream of one trial: (master_seed, trial_index) mixed to a 64-bit key.
struct TrialStream {
    std::uint64_t key = 0;
};

inline TrialStream trial_stream(std::uint64_t master_seed, std::uint64_t trial_index) {
    return {derive_seed(tagged_seed(master_seed, StreamTag::trial), trial_index)};
}

/// Survival draw of the ordered pair (i, j); a pure function of the trial key,
/// so arcs (i, j) and (j, i) fail independently and lazily.
inline bool edge_survives(TrialStream s, std::uint32_t i, std::uint32_t j, double q) {
    return counter_uniform(tagged_seed(s.key, StreamTag::edge_fault), i, j) >= q;
}

/// Vertex layer of a realization, in the fixed draw order: Poisson count (Poisson
/// mode only), then x,y of every vertex, then every orientation, then every
/// alive flag, all from one mt19937_64 seeded with the trial key.
inline FaultySectorGraph sample_vertices(const ModelParams& p, TrialStream s) {
    Engine eng = make_engine(s.key);
    FaultySectorGraph g;
    g.alpha = p.alpha;
    g.radius = p.r;
    if (p.mode == Mode::poisson) {
        boost::random::poisson_distribution<std::int64_t, double> count(static_cast<double>(p.n));
        g.realized_count = static_cast<std::uint64_t>(count(eng));
    } else {
        g.realized_count = p.n;
    }
    const std::size_t n = g.realized_count;
    g.positions.resize(n);
    g.orientations.resize(n);
    g.alive.resize(n);
    for (auto& pt : g.positions) {
        pt.x = uniform01(eng);
        pt.y = uniform01(eng);
    }
    for (auto& th : g.orientations) th = wrap_angle(kTwoPi * uniform01(eng));
    for (std::size_t i = 0; i < n; ++i) g.alive[i] = uniform01(eng) >= p.v;
    return g;
}

inline FaultySectorGraph sample_graph(const ModelParams& p, TrialStream s) {
    FaultySectorGraph g = sample_vertices(p, s);
    const std::size_t n = g.realized_count;
    if (n < 2) return g;
    const GridIndex index(g.positions, p.r);
    std::vector<std::uint32_t> targets;
    for (std::uint32_t i = 0; i < n; ++i) {
        if (!g.alive[i]) continue;
        const SectorShape shape(g.sector_of(i));
        targets.clear();
        index.for_each_within(g.positions, g.positions[i], p.r, [&](std::uint32_t j) {
            if (j != i && g.alive[j] && shape.contains(g.positions[j])) targets.push_back(j);
        });
        std::sort(targets.begin(), targets.end());
        for (std::uint32_t j : targets)
            if (edge_survives(s, i, j, p.q)) g.arcs.push_back({i, j});
    }
    return g;
}

inline FaultySectorGraph sample_graph(const ModelParams& p, std::uint64_t trial_index) {
    return sample_graph(p, trial_stream(p.master_seed, trial_index));
}

/// Degrees of alive vertices; dead vertices are absent (nullopt).
struct DegreeSummary {
    std::vector<std::optional<std::uint32_t>> out_degrees;
    std::vector<std::optional<std::uint32_t>> in_degrees;
    std::uint32_t max_out = 0;
    std::uint32_t max_in = 0;
    std::uint64_t alive_count = 0;
    /// No alive vertex; maxima are reported as 0.
    bool empty = true;

    const std::vector<std::optional<std::uint32_t>>& degrees(Side s) const {
        return s == Side::out ? out_degrees : in_degrees;
    }
    std::uint32_t max_degree(Side s) const { return s == Side::out ? max_out : max_in; }
};

inline DegreeSummary degree_summary(const FaultySectorGraph& g) {
    DegreeSummary d;
    const std::size_t n = g.realized_count;
    std::vector<std::uint32_t> out(n, 0), in(n, 0);
    for (const Arc& a : g.arcs) {
        ++out[a.from];
        ++in[a.to];
    }
    d.out_degrees.resize(n);
    d.in_degrees.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!g.alive[i]) continue;
        d.out_degrees[i] = out[i];
        d.in_degrees[i] = in[i];
        d.max_out = std::max(d.max_out, out[i]);
        d.max_in = std::max(d.max_in, in[i]);
        ++d.alive_count;
    }
    d.empty = d.alive_count == 0;
    return d;
}

/// W_A: number of alive vertices whose `side` degree lies in A.
inline std::uint64_t degree_count(const DegreeSummary& d, const DegreeSet& a, Side side) {
    std::uint64_t w = 0;
    for (const auto& deg : d.degrees(side))
        if (deg && a.contains(*deg)) ++w;
    return w;
}

inline std::uint64_t degree_count(const FaultySectorGraph& g, const DegreeSet& a, Side side) {
    return degree_count(degree_summary(g), a, side);
}

/// Edge list: header "N alive_count", then one "i j" line per arc.
inline void write_edge_list(std::ostream& os, const FaultySectorGraph& g) {
    const auto alive = std::count(g.alive.begin(), g.alive.end(), true);
    os << g.realized_count << ' ' << alive << '\n';
    for (const Arc& a : g.arcs) os << a.from << ' ' << a.to << '\n';
}

/// Vertex table: index,x,y,theta,alive.
inline void write_vertex_csv(std::ostream& os, const FaultySectorGraph& g) {
    const auto old_precision = os.precision(17);
    os << "index,x,y,theta,alive\n";
    for (std::size_t i = 0; i < g.realized_count; ++i)
        os << i << ',' << g.positions[i].x << ',' << g.positions[i].y << ','
           << g.orientations[i] << ',' << (g.alive[i] ? 1 : 0) << '\n';
    os.precision(old_precision);
}

}  // namespace sectorlab
