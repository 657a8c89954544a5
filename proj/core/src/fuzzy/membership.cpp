#include "forestfire/fuzzy/membership.hpp"

#include <cmath>
#include <string>

#include "forestfire/error.hpp"

namespace forestfire::fuzzy {

MembershipFunction::MembershipFunction(ShapeKind kind, std::array<double, 4> points, std::size_t count)
    : kind_(kind), points_(points), declared_{}, declared_count_(count) {
  for (std::size_t i = 0; i < 4; ++i) {
    if (!std::isfinite(points_[i])) throw ConfigError("membership breakpoints must be finite");
    if (i > 0 && points_[i] < points_[i - 1]) {
      throw ConfigError("membership breakpoints must be non-decreasing");
    }
  }
  if (kind == ShapeKind::triangle) {
    declared_ = {points_[0], points_[1], points_[3], 0.0};
  } else {
    declared_ = points_;
  }
}

MembershipFunction MembershipFunction::triangle(double left, double apex, double right) {
  return MembershipFunction(ShapeKind::triangle, {left, apex, apex, right}, 3);
}

MembershipFunction MembershipFunction::trapezoid(double left, double plateau_begin, double plateau_end,
                                                 double right) {
  return MembershipFunction(ShapeKind::trapezoid, {left, plateau_begin, plateau_end, right}, 4);
}

std::span<const double> MembershipFunction::breakpoints() const {
  return {declared_.data(), declared_count_};
}

double MembershipFunction::operator()(double x) const {
  const auto [a, b, c, d] = points_;
  if (x < a || x > d) return 0.0;
  if (x >= b && x <= c) return 1.0;
  if (x < b) return (x - a) / (b - a);
  return (d - x) / (d - c);
}

}  // namespace forestfire::fuzzy
