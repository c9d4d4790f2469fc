#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace rclab {

// Lattice point / integer vector. All primitive predicates on lattice data
// use exact integer arithmetic; angles go through atan2 on exact coordinates.
struct Point {
    int64_t x = 0;
    int64_t y = 0;

    friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
    friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
    friend Point operator*(int64_t s, Point a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Point a, Point b) { return a.x == b.x && a.y == b.y; }
    friend bool operator!=(Point a, Point b) { return !(a == b); }
    // lexicographic on (x, y); used for deterministic tie-breaks
    friend bool operator<(Point a, Point b) { return a.x != b.x ? a.x < b.x : a.y < b.y; }
};

using I128 = __int128;

inline I128 cross(Point a, Point b) { return (I128)a.x * b.y - (I128)a.y * b.x; }
inline I128 dot(Point a, Point b) { return (I128)a.x * b.x + (I128)a.y * b.y; }
inline I128 norm2(Point a) { return dot(a, a); }
inline int sgn(I128 v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

struct Vec2 {
    double x = 0;
    double y = 0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
};

inline Vec2 to_vec(Point p) { return {(double)p.x, (double)p.y}; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 normalized(Vec2 a) { double n = norm(a); return {a.x / n, a.y / n}; }
// counterclockwise rotation by pi/2
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }
inline Vec2 rotated(Vec2 a, double theta) {
    double c = std::cos(theta), s = std::sin(theta);
    return {c * a.x - s * a.y, s * a.x + c * a.y};
}

inline double arg_of(Point p) { return std::atan2((double)p.y, (double)p.x); }
inline double arg_of(Vec2 p) { return std::atan2(p.y, p.x); }

// angle between two vectors, in [0, pi]
inline double angle_between(Vec2 a, Vec2 b) {
    double v = std::atan2(std::fabs(cross(a, b)), dot(a, b));
    return v;
}
inline double angle_between(Point a, Point b) { return angle_between(to_vec(a), to_vec(b)); }

inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }

// Euclidean distance from p to the closed segment [a, b].
inline double dist_point_segment(Vec2 p, Vec2 a, Vec2 b) {
    Vec2 ab = b - a;
    double len2 = dot(ab, ab);
    if (len2 == 0.0) return dist(p, a);
    double t = dot(p - a, ab) / len2;
    if (t < 0) t = 0;
    if (t > 1) t = 1;
    return dist(p, a + t * ab);
}

// Twice the signed area of the closed polygon (counterclockwise positive).
inline I128 shoelace2(const std::vector<Point>& poly) {
    I128 s = 0;
    for (size_t i = 0; i < poly.size(); ++i) {
        Point a = poly[i], b = poly[(i + 1) % poly.size()];
        s += cross(a, b);
    }
    return s;
}

inline double shoelace_area(const std::vector<Vec2>& poly) {
    double s = 0;
    for (size_t i = 0; i < poly.size(); ++i) {
        Vec2 a = poly[i], b = poly[(i + 1) % poly.size()];
        s += cross(a, b);
    }
    return 0.5 * s;
}

// true iff q lies on the closed segment [a, b]
inline bool point_on_segment(Point q, Point a, Point b) {
    if (cross(b - a, q - a) != 0) return false;
    return dot(q - a, q - b) <= 0;
}

} // namespace rclab
