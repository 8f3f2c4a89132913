#pragma once

// Planar primitives on the unit square Q = [0,1]^2: sectors, containment,
// Monte Carlo clipped areas and a fixed-radius grid index.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "sectorlab/random.hpp"

namespace sectorlab {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
/// Area of the unit disk.
inline constexpr double kUnitDiskArea = std::numbers::pi;

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr bool operator==(const Point2&, const Point2&) = default;
};

inline double squared_distance(Point2 a, Point2 b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

inline double distance(Point2 a, Point2 b) {
    return std::sqrt(squared_distance(a, b));
}

inline bool in_unit_square(Point2 p) {
    return p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0;
}

/// Reduce an angle to [0, 2pi).
inline double wrap_angle(double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    if (t >= kTwoPi) t = 0.0;
    return t;
}

/// Sector S(apex, elevation, radius) spanning the half-open arc
/// [elevation, elevation + central_angle) mod 2pi, closed in radius.
/// A central angle of 2pi is the full disk B(apex, radius).
struct Sector {
    Point2 apex;
    double elevation = 0.0;
    double central_angle = kTwoPi;
    double radius = 0.0;
};

inline bool is_valid(const Sector& s) {
    return s.elevation >= 0.0 && s.elevation < kTwoPi && s.central_angle > 0.0 &&
           s.central_angle <= kTwoPi && s.radius > 0.0;
}

inline bool is_full_disk(const Sector& s) {
    return s.central_angle >= kTwoPi;
}

/// True when the disk B(apex, radius) lies inside Q, so no clipping occurs.
inline bool disk_inside_unit_square(Point2 apex, double radius) {
    return apex.x - radius >= 0.0 && apex.x + radius <= 1.0 && apex.y - radius >= 0.0 &&
           apex.y + radius <= 1.0;
}

/// Sector with its boundary directions precomputed, for repeated membership tests.
///
/// The angular test uses cross products against the two boundary rays
/// instead of atan2. Both conventions agree everywhere except within rounding
/// distance of a boundary ray.
class SectorShape {
  public:
    explicit SectorShape(const Sector& s)
        : apex_(s.apex), radius_sq_(s.radius * s.radius) {
        if (is_full_disk(s)) {
            kind_ = Kind::full;
            return;
        }
        start_ = {std::cos(s.elevation), std::sin(s.elevation)};
        const double end = s.elevation + s.central_angle;
        end_ = {std::cos(end), std::sin(end)};
        if (s.central_angle == kPi)
            kind_ = Kind::half;
        else
            kind_ = s.central_angle < kPi ? Kind::narrow : Kind::wide;
    }

    bool contains(Point2 p) const {
        const double dx = p.x - apex_.x;
        const double dy = p.y - apex_.y;
        const double d2 = dx * dx + dy * dy;
        // Non-short-circuit operators: hit/miss is unpredictable in sampling loops.
        return (d2 != 0.0) & (d2 <= radius_sq_) & in_arc(dx, dy);
    }

    /// Angular part of contains(), for a displacement already known to be in range.
    bool in_arc(double dx, double dy) const {
        switch (kind_) {
            case Kind::full:
                return true;
            case Kind::narrow:
                return (cross(start_.x, start_.y, dx, dy) >= 0.0) &
                       (cross(dx, dy, end_.x, end_.y) > 0.0);
            case Kind::half: {
                const double c = cross(start_.x, start_.y, dx, dy);
                return (c > 0.0) | ((c == 0.0) & (start_.x * dx + start_.y * dy > 0.0));
            }
            case Kind::wide:
                // Complement arc [end, start) is narrower than pi.
                return !((cross(end_.x, end_.y, dx, dy) >= 0.0) &
                         (cross(dx, dy, start_.x, start_.y) > 0.0));
        }
        return false;
    }

    Point2 apex() const { return apex_; }
    double radius_squared() const { return radius_sq_; }

  private:
    enum class Kind { full, narrow, half, wide };

    static double cross(double ax, double ay, double bx, double by) {
        return ax * by - ay * bx;
    }

    Point2 apex_;
    double radius_sq_;
    Kind kind_ = Kind::full;
    Point2 start_{};
    Point2 end_{};
};

inline bool sector_contains(const Sector& s, Point2 p) {
    return SectorShape(s).contains(p);
}

/// Axis-aligned rectangle; used for sampling domains.
struct Rect {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

    double area() const { return std::max(0.0, x1 - x0) * std::max(0.0, y1 - y0); }
    bool empty() const { return !(x1 > x0 && y1 > y0); }
};

/// Bounding box of B(apex, radius) clipped to Q.
inline Rect clipped_disk_box(Point2 apex, double radius) {
    return {std::max(0.0, apex.x - radius), std::max(0.0, apex.y - radius),
            std::min(1.0, apex.x + radius), std::min(1.0, apex.y + radius)};
}

template <class Gen>
inline Point2 sample_in(const Rect& r, Gen& eng) {
    const double u = uniform01(eng);
    const double v = uniform01(eng);
    return {r.x0 + (r.x1 - r.x0) * u, r.y0 + (r.y1 - r.y0) * v};
}

/// Monte Carlo estimate with its standard error.
struct AreaEstimate {
    double area = 0.0;
    double standard_error = 0.0;
};

struct AreaOptions {
    std::uint64_t samples = 100000;
    std::uint64_t seed = 0;
    /// Return the exact area with zero error when the sector's disk lies inside Q.
    bool exact_interior = true;
};

/// Estimate |S ∩ Q|.
///
/// Points are drawn uniformly from the bounding box of B(apex, radius)
/// clipped to Q; the hit fraction times the box area is unbiased, and the
/// standard error is the binomial one, box_area * sqrt(p(1-p)/N).
inline AreaEstimate clipped_area(const Sector& s, const AreaOptions& opt = {}) {
    if (opt.exact_interior && disk_inside_unit_square(s.apex, s.radius))
        return {0.5 * s.central_angle * s.radius * s.radius, 0.0};
    const Rect box = clipped_disk_box(s.apex, s.radius);
    if (box.empty() || opt.samples == 0) return {};
    const SectorShape shape(s);
    SplitMix64 eng(opt.seed);
    std::uint64_t hits = 0;
    for (std::uint64_t k = 0; k < opt.samples; ++k)
        hits += shape.contains(sample_in(box, eng)) ? 1 : 0;
    const double n = static_cast<double>(opt.samples);
    const double p = static_cast<double>(hits) / n;
    return {box.area() * p, box.area() * std::sqrt(p * (1.0 - p) / n)};
}

/// Integer cell coordinates of the grid index.
struct Cell {
    std::int64_t x = 0;
    std::int64_t y = 0;

    friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

/// Uniform-grid bucket index over a point list.
///
/// Buckets are stored flat: sorted unique cell keys, CSR offsets, and the
/// point indices of each bucket in ascending order. Immutable after build.
class GridIndex {
  public:
    GridIndex() = default;

    GridIndex(std::span<const Point2> points, double cell_size) : cell_size_(cell_size) {
        if (!(cell_size > 0.0)) throw std::invalid_argument("cell_size must be positive");
        count_ = points.size();
        std::vector<std::pair<Cell, std::uint32_t>> tagged;
        tagged.reserve(points.size());
        for (std::size_t i = 0; i < points.size(); ++i)
            tagged.emplace_back(cell_of(points[i]), static_cast<std::uint32_t>(i));
        std::sort(tagged.begin(), tagged.end());
        items_.reserve(tagged.size());
        for (const auto& [cell, idx] : tagged) {
            if (keys_.empty() || keys_.back() != cell) {
                keys_.push_back(cell);
                offsets_.push_back(static_cast<std::uint32_t>(items_.size()));
            }
            items_.push_back(idx);
        }
        offsets_.push_back(static_cast<std::uint32_t>(items_.size()));
    }

    double cell_size() const { return cell_size_; }
    std::size_t point_count() const { return count_; }
    std::size_t bucket_count() const { return keys_.size(); }

    Cell cell_of(Point2 p) const {
        return {static_cast<std::int64_t>(std::floor(p.x / cell_size_)),
                static_cast<std::int64_t>(std::floor(p.y / cell_size_))};
    }

    /// Point indices in cell c; empty when the cell holds none.
    std::span<const std::uint32_t> bucket(Cell c) const {
        const auto it = std::lower_bound(keys_.begin(), keys_.end(), c);
        if (it == keys_.end() || *it != c) return {};
        const auto k = static_cast<std::size_t>(it - keys_.begin());
        return {items_.data() + offsets_[k], items_.data() + offsets_[k + 1]};
    }

    std::span<const Cell> cells() const { return keys_; }
    std::span<const std::uint32_t> bucket_at(std::size_t k) const {
        return {items_.data() + offsets_[k], items_.data() + offsets_[k + 1]};
    }

    /// Visit every indexed point j with |points[j] - center| <= radius.
    /// Requires radius <= cell_size, so only the 3x3 neighborhood is scanned.
    template <class Visitor>
    void for_each_within(std::span<const Point2> points, Point2 center, double radius,
                         Visitor&& visit) const {
        if (radius > cell_size_)
            throw std::invalid_argument("query radius exceeds grid cell size");
        const double r2 = radius * radius;
        const Cell c = cell_of(center);
        for (std::int64_t dy = -1; dy <= 1; ++dy)
            for (std::int64_t dx = -1; dx <= 1; ++dx)
                for (std::uint32_t j : bucket({c.x + dx, c.y + dy}))
                    if (squared_distance(points[j], center) <= r2) visit(j);
    }

  private:
    double cell_size_ = 1.0;
    std::size_t count_ = 0;
    std::vector<Cell> keys_;
    std::vector<std::uint32_t> offsets_;
    std::vector<std::uint32_t> items_;
};

inline GridIndex build_index(std::span<const Point2> points, double cell_size) {
    return GridIndex(points, cell_size);
}

/// Indices j with |points[j] - center| <= radius, ascending. A point equal
/// to center is included; callers exclude self by index.
inline std::vector<std::uint32_t> neighbors_within(const GridIndex& idx,
                                                   std::span<const Point2> points,
                                                   Point2 center, double radius) {
    std::vector<std::uint32_t> out;
    idx.for_each_within(points, center, radius, [&](std::uint32_t j) { out.push_back(j); });
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace sectorlab
