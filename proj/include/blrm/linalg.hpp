#pragma once

#include <cmath>
#include <stdexcept>

namespace blrm {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double sup_norm() const { return std::max(std::abs(x), std::abs(y)); }
};

/// Symmetric 2x2 matrix stored as (a, b; b, c).
struct Mat2 {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  Mat2() = default;
  Mat2(double a_, double b_, double c_) : a(a_), b(b_), c(c_) {}

  double det() const { return a * c - b * b; }
  bool positive_definite() const { return a > 0.0 && det() > 0.0; }

  Mat2 inverse() const {
    const double d = det();
    if (d == 0.0) throw std::domain_error("Mat2::inverse: singular matrix");
    return {c / d, -b / d, a / d};
  }

  Vec2 solve(const Vec2& r) const {
    const double d = det();
    if (d == 0.0) throw std::domain_error("Mat2::solve: singular matrix");
    return {(c * r.x - b * r.y) / d, (a * r.y - b * r.x) / d};
  }

  Vec2 mul(const Vec2& v) const { return {a * v.x + b * v.y, b * v.x + c * v.y}; }

  /// x' M x for symmetric M.
  double quad_form(const Vec2& v) const {
    return a * v.x * v.x + 2.0 * b * v.x * v.y + c * v.y * v.y;
  }

  /// Lower Cholesky factor L with L L' = M. Requires positive definiteness.
  void cholesky(double& l00, double& l10, double& l11) const {
    if (!positive_definite()) throw std::domain_error("Mat2::cholesky: matrix not positive definite");
    l00 = std::sqrt(a);
    l10 = b / l00;
    l11 = std::sqrt(c - l10 * l10);
  }

  Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c}; }
};

}  // namespace blrm
