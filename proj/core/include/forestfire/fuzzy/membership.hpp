#pragma once

#include <array>
#include <span>

namespace forestfire::fuzzy {

enum class ShapeKind { triangle, trapezoid };

// Piecewise-linear membership function. A triangle (a, b, c) is stored as the
// degenerate trapezoid (a, b, b, c). Shoulders at a universe bound are written
// with coinciding outer breakpoints, e.g. trapezoid(0, 0, 15, 25).
class MembershipFunction {
 public:
  static MembershipFunction triangle(double left, double apex, double right);
  static MembershipFunction trapezoid(double left, double plateau_begin, double plateau_end,
                                      double right);

  ShapeKind kind() const { return kind_; }

  // 3 values for a triangle, 4 for a trapezoid.
  std::span<const double> breakpoints() const;

  double support_begin() const { return points_[0]; }
  double plateau_begin() const { return points_[1]; }
  double plateau_end() const { return points_[2]; }
  double support_end() const { return points_[3]; }

  double operator()(double x) const;

  friend bool operator==(const MembershipFunction&, const MembershipFunction&) = default;

 private:
  MembershipFunction(ShapeKind kind, std::array<double, 4> points, std::size_t count);

  ShapeKind kind_;
  std::array<double, 4> points_;
  std::array<double, 4> declared_;
  std::size_t declared_count_;
};

// Degree of x in mf; 0 outside the support, 1 on the plateau.
inline double membership(const MembershipFunction& mf, double x) { return mf(x); }

}  // namespace forestfire::fuzzy
