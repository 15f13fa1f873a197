#pragma once

#include <algorithm>
#include <cmath>

namespace morphogen {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(Point a, Point b) noexcept
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

struct SegmentProjection {
    double t = 0.0;       // clamped parameter along a->b
    Point foot;           // a + t (b - a)
    double distance = 0.0;
};

// Closest point of segment [a, b] to p.
inline SegmentProjection project_onto_segment(Point p, Point a, Point b) noexcept
{
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0) {
        t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
    }
    const Point foot{a.x + t * dx, a.y + t * dy};
    return {t, foot, distance(p, foot)};
}

} // namespace morphogen
