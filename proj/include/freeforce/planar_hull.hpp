// Planar convex hulls and polygon queries.
#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace freeforce::geometry {

using Point2 = Eigen::Vector2d;

/// z-component of (a - o) x (b - o); positive for a left turn o -> a -> b.
inline double cross(const Point2& o, const Point2& a, const Point2& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

inline bool lex_less(const Point2& a, const Point2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
}

/// Andrew's monotone chain. Returns the hull counterclockwise, starting at
/// the lexicographically smallest vertex. Points closer than `tol` are merged
/// and a middle point within `tol` of the chord through its neighbours is
/// dropped, so collinear points never appear as vertices. Degenerate inputs
/// give a segment (two points) or a single point.
inline std::vector<Point2> convex_hull(std::vector<Point2> points, double tol) {
    std::sort(points.begin(), points.end(), lex_less);
    std::vector<Point2> unique;
    unique.reserve(points.size());
    for (const auto& p : points) {
        // Sorting is by x first, so near-duplicates may be separated by points
        // with similar x; scan back over that window.
        bool duplicate = false;
        for (auto it = unique.rbegin(); it != unique.rend() && p.x() - it->x() <= tol; ++it) {
            if ((p - *it).norm() <= tol) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) unique.push_back(p);
    }
    if (unique.size() < 3) return unique;

    // Pop while the last point is not strictly left of the chord to p.
    auto turns_left = [tol](const Point2& o, const Point2& a, const Point2& p) {
        const double chord = (p - o).norm();
        return cross(o, a, p) > tol * chord;
    };

    std::vector<Point2> hull(2 * unique.size());
    std::size_t k = 0;
    for (const auto& p : unique) {
        while (k >= 2 && !turns_left(hull[k - 2], hull[k - 1], p)) --k;
        hull[k++] = p;
    }
    const std::size_t lower = k + 1;
    for (auto it = unique.rbegin() + 1; it != unique.rend(); ++it) {
        while (k >= lower && !turns_left(hull[k - 2], hull[k - 1], *it)) --k;
        hull[k++] = *it;
    }
    hull.resize(k - 1);  // last point repeats the first
    if (hull.size() == 2 && (hull[0] - hull[1]).norm() <= tol) hull.resize(1);
    return hull;
}

/// Shoelace area of a counterclockwise polygon; zero for fewer than 3 points.
inline double polygon_area(const std::vector<Point2>& poly) {
    if (poly.size() < 3) return 0.0;
    double twice = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const auto& a = poly[i];
        const auto& b = poly[(i + 1) % poly.size()];
        twice += a.x() * b.y() - a.y() * b.x();
    }
    return 0.5 * twice;
}

inline double distance_to_segment(const Point2& a, const Point2& b, const Point2& q) {
    const Point2 ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 == 0.0) return (q - a).norm();
    const double t = std::clamp((q - a).dot(ab) / len2, 0.0, 1.0);
    return (q - (a + t * ab)).norm();
}

/// Euclidean distance from q to a convex counterclockwise polygon (also
/// accepts a segment or point); zero when q is inside.
inline double distance_to_polygon(const std::vector<Point2>& poly, const Point2& q) {
    if (poly.empty()) return std::numeric_limits<double>::infinity();
    if (poly.size() == 1) return (q - poly[0]).norm();
    if (poly.size() == 2) return distance_to_segment(poly[0], poly[1], q);
    bool inside = true;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const auto& a = poly[i];
        const auto& b = poly[(i + 1) % poly.size()];
        if (cross(a, b, q) < 0.0) inside = false;
        best = std::min(best, distance_to_segment(a, b, q));
    }
    return inside ? 0.0 : best;
}

/// Smallest signed distance from q to the edge lines of a counterclockwise
/// polygon; positive when q is strictly inside.
inline double inner_margin(const std::vector<Point2>& poly, const Point2& q) {
    if (poly.size() < 3) return -std::numeric_limits<double>::infinity();
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const auto& a = poly[i];
        const auto& b = poly[(i + 1) % poly.size()];
        margin = std::min(margin, cross(a, b, q) / (b - a).norm());
    }
    return margin;
}

} // namespace freeforce::geometry
