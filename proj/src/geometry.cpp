#include "crowdbench/geometry.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "crowdbench/errors.hpp"

namespace crowdbench {

void require_finite(const Vec2& v, const char* what) {
  if (!v.finite()) {
    throw InvalidInput(std::string("non-finite ") + what);
  }
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw InvalidInput(std::string("non-finite ") + what);
  }
}

std::array<Vec2, 4> OrientedRect::corners() const {
  const Vec2 half_side = perp(direction) * (0.5 * width);
  const Vec2 front = anchor + direction * length;
  return {anchor - half_side, front - half_side, front + half_side, anchor + half_side};
}

OrientedRect rect_from_agent(const Vec2& position, const Vec2& velocity, double width,
                             double horizon) {
  require_finite(position, "position");
  require_finite(velocity, "velocity");
  require_finite(width, "width");
  require_finite(horizon, "horizon");
  if (!(width > 0.0)) throw InvalidInput("rectangle width must be positive");
  if (!(horizon > 0.0)) throw InvalidInput("projection horizon must be positive");

  OrientedRect rect;
  rect.anchor = position;
  rect.width = width;
  const double speed = norm(velocity);
  if (speed < kStationarySpeed) {
    return rect;
  }
  rect.direction = velocity / speed;
  rect.length = horizon * speed;
  return rect;
}

namespace {

struct Interval {
  double lo;
  double hi;
};

Interval project(const std::array<Vec2, 4>& corners, const Vec2& axis) {
  Interval out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const Vec2& c : corners) {
    const double d = dot(c, axis);
    out.lo = std::min(out.lo, d);
    out.hi = std::max(out.hi, d);
  }
  return out;
}

void require_valid(const OrientedRect& r) {
  require_finite(r.anchor, "rectangle anchor");
  require_finite(r.direction, "rectangle direction");
  require_finite(r.length, "rectangle length");
  require_finite(r.width, "rectangle width");
  if (r.length < 0.0 || !(r.width > 0.0)) throw InvalidInput("invalid rectangle extents");
  if (r.length > 0.0 && std::abs(norm(r.direction) - 1.0) > 1e-9) {
    throw InvalidInput("rectangle direction must be a unit vector");
  }
}

}  // namespace

bool rects_intersect(const OrientedRect& a, const OrientedRect& b) {
  require_valid(a);
  require_valid(b);
  if (a.degenerate() || b.degenerate()) return false;

  const auto ca = a.corners();
  const auto cb = b.corners();
  const std::array<Vec2, 4> axes{a.direction, perp(a.direction), b.direction, perp(b.direction)};
  for (const Vec2& axis : axes) {
    const Interval ia = project(ca, axis);
    const Interval ib = project(cb, axis);
    if (ia.hi < ib.lo || ib.hi < ia.lo) return false;
  }
  return true;
}

double min_center_distance(const Vec2& p, std::span<const Vec2> others) {
  require_finite(p, "position");
  if (others.empty()) throw DomainError("min_center_distance over an empty set");
  double best_sq = std::numeric_limits<double>::infinity();
  for (const Vec2& o : others) {
    require_finite(o, "position");
    best_sq = std::min(best_sq, abs_sq(o - p));
  }
  return std::sqrt(best_sq);
}

}  // namespace crowdbench
