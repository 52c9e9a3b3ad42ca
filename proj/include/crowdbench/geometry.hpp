#pragma once

/**
 * @file geometry.hpp
 * @brief 2D vectors, velocity rectangles and the predicates the metrics need.
 *
 * Everything here is a pure function over value types. Public operations
 * reject NaN/Inf with InvalidInput.
 */

#include <array>
#include <cmath>
#include <span>

namespace crowdbench {

struct Vec2 {
  double x{0.0};
  double y{0.0};

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  friend constexpr Vec2 operator*(double s, const Vec2& v) { return {v.x * s, v.y * s}; }

  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

  constexpr bool operator==(const Vec2&) const = default;

  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
/// z-component of the 3D cross product; positive when b is counter-clockwise of a.
constexpr double det(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
constexpr double abs_sq(const Vec2& v) { return dot(v, v); }
inline double norm(const Vec2& v) { return std::sqrt(abs_sq(v)); }
/// Counter-clockwise perpendicular.
constexpr Vec2 perp(const Vec2& v) { return {-v.y, v.x}; }

inline Vec2 normalized(const Vec2& v) {
  const double n = norm(v);
  return n > 0.0 ? v / n : Vec2{};
}

/// Throws InvalidInput naming `what` if v has a non-finite component.
void require_finite(const Vec2& v, const char* what);
void require_finite(double v, const char* what);

/// Speeds below this are treated as standing still.
inline constexpr double kStationarySpeed = 1e-6;

/**
 * Rectangle swept ahead of an agent. The rear edge is centered on `anchor`
 * and the body extends `length` along `direction`. A zero-length rectangle
 * is degenerate and intersects nothing.
 */
struct OrientedRect {
  Vec2 anchor;
  Vec2 direction;  ///< unit when length > 0
  double length{0.0};
  double width{0.0};

  bool degenerate() const { return !(length > 0.0); }
  /// Corner order: rear-right, front-right, front-left, rear-left.
  std::array<Vec2, 4> corners() const;
  Vec2 center() const { return anchor + direction * (0.5 * length); }
};

/// Velocity rectangle of an agent: length = horizon * speed, width as given.
OrientedRect rect_from_agent(const Vec2& position, const Vec2& velocity, double width,
                             double horizon);

/// Closed-set intersection via separating axes (two per rectangle).
bool rects_intersect(const OrientedRect& a, const OrientedRect& b);

/// Minimum Euclidean distance from p to any of `others`. Throws DomainError if empty.
double min_center_distance(const Vec2& p, std::span<const Vec2> others);

}  // namespace crowdbench
