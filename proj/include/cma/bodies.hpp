#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cma/matrix.hpp"

// Strictly convex bodies in R^4 represented by support functions: closed
// forms for balls, ellipsoids and the cone-hull sharpness domain, sampled
// support values on a fixed direction set for Minkowski interpolants.

namespace cma::bodies {

/// Deterministic direction set on S^3: a double-spiral construction with
/// irrational rotation constants, structure-of-arrays for the margin kernel.
struct DirectionGrid {
  std::vector<double> x, y, z, w;

  int size() const { return static_cast<int>(x.size()); }
  Vec4 dir(int i) const { return {x[i], y[i], z[i], w[i]}; }

  static std::shared_ptr<const DirectionGrid> canonical(int n = 4096);
};

enum class BodyKind { ball, ellipsoid, cone_hull, sampled };

const char* to_string(BodyKind k);

struct StripSpec {
  double epsilon = 0.0;
};

class ConvexBody {
 public:
  static ConvexBody make_ball(const Vec4& center, double radius);
  static ConvexBody make_ellipsoid(const Vec4& center, const Vec4& radii);
  static ConvexBody make_sampled(std::shared_ptr<const DirectionGrid> grid,
                                 std::vector<double> support,
                                 const Vec4& box_lo, const Vec4& box_hi);

  BodyKind kind() const { return kind_; }
  const Vec4& center() const { return center_; }
  double ball_radius() const { return radius_; }
  const Vec4& radii() const { return radii_; }
  double cone_slope() const { return cone_a_; }
  double cone_height() const { return cone_h_; }
  double cone_ball_radius() const { return cone_r_; }
  const std::shared_ptr<const DirectionGrid>& grid() const { return grid_; }
  const std::vector<double>& sampled_support() const { return support_; }

  /// h(theta) = sup_{x in body} x.theta; requires |theta| = 1 within 1e-12.
  double support(const Vec4& theta) const;

  /// Signed margin: > 0 strictly inside, < 0 outside. Exact sign for the
  /// analytic kinds; for sampled bodies it is the exact distance to the
  /// boundary of the support polytope.
  double membership(const Vec4& x) const;

  /// Distance to the boundary for inside points: exact for balls and
  /// ellipsoids, support-margin bound otherwise.
  double boundary_distance(const Vec4& x) const;

  /// True iff 0 < d(x, boundary) <= eps (boundary-inclusive at eps).
  /// Throws std::domain_error if x is outside.
  bool in_strip(const Vec4& x, const StripSpec& strip) const;

  /// Crossing parameter t in (0, tmax] with x inside and x + tmax*dir
  /// outside; dir need not be unit. Closed form where the kind allows,
  /// bisection on the membership sign otherwise (resolution 1e-12 * tmax).
  double boundary_crossing(const Vec4& x, const Vec4& dir, double tmax) const;

  void bounding_box(Vec4& lo, Vec4& hi) const;

  std::string to_json() const;
  static ConvexBody from_json(const std::string& text);
  std::uint64_t content_hash() const;

 private:
  ConvexBody() = default;

  BodyKind kind_ = BodyKind::ball;
  Vec4 center_{};
  double radius_ = 0.0;
  Vec4 radii_{};
  double cone_a_ = 0.0, cone_h_ = 0.0, cone_r_ = 0.0;
  std::shared_ptr<const DirectionGrid> grid_;
  std::vector<double> support_;
  Vec4 box_lo_{}, box_hi_{};

  friend ConvexBody cone_hull_body(double a, double center_height, double radius);
};

/// Convex hull of the origin and the ball B((0,0,0,center_height), radius),
/// sitting inside the cone { |(x1,x2,x3)| < a x4 }. Requires
/// radius < center_height * a / sqrt(1 + a^2); throws std::invalid_argument
/// (cone containment) otherwise.
ConvexBody cone_hull_body(double a, double center_height, double radius);

/// Support-function interpolation (1-t) b1 + t omega on the canonical grid;
/// the endpoints return the inputs unchanged.
ConvexBody minkowski_interpolate(const ConvexBody& b1, const ConvexBody& omega, double t);

// Free-function synonyms for the class queries.
double support_eval(const ConvexBody& body, const Vec4& theta);
double membership(const ConvexBody& body, const Vec4& x);
bool in_strip(const ConvexBody& body, const Vec4& x, const StripSpec& strip);

} // namespace cma::bodies
