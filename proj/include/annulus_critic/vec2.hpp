#pragma once

#include <cmath>

namespace annulus_critic {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline Vec2 normalized(Vec2 v) { return v / norm(v); }

/// Mirror image of p across the line through `anchor` with unit `direction`.
inline Vec2 reflect_across_line(Vec2 p, Vec2 anchor, Vec2 direction) {
    const Vec2 d = p - anchor;
    const Vec2 along = direction * dot(d, direction);
    return anchor + along * 2.0 - d;
}

/// Distance from p to the full line through `anchor` with unit `direction`.
inline double distance_to_line(Vec2 p, Vec2 anchor, Vec2 direction) {
    return std::abs(cross(direction, p - anchor));
}

}  // namespace annulus_critic
