#include "cma/bodies.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "cma/kernels.hpp"

namespace cma::bodies {

namespace {

using nlohmann::json;

double dot4(const Vec4& a, const Vec4& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

double norm4(const Vec4& a) { return std::sqrt(dot4(a, a)); }

Vec4 sub4(const Vec4& a, const Vec4& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]};
}

// Exact signed distance to an origin-centered ellipsoid with semi-axes r:
// positive inside. Secular-equation projection with the focal-branch fallback
// for interior points on a symmetry plane of the smallest axis.
double ellipsoid_signed_distance(const Vec4& p, const Vec4& r) {
  double pn = norm4(p);
  const double rmin = std::min(std::min(r[0], r[1]), std::min(r[2], r[3]));
  if (pn < 1e-14) return rmin;

  double q = 0.0;
  for (int i = 0; i < 4; ++i) q += (p[i] / r[i]) * (p[i] / r[i]);
  const bool inside = q < 1.0;

  auto f = [&](double t) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) {
      const double d = r[i] * r[i] + t;
      s += r[i] * r[i] * p[i] * p[i] / (d * d);
    }
    return s;
  };

  // f is monotone decreasing on (-rmin^2, inf); the root gives the
  // projection multiplier.
  double lo, hi;
  if (inside) {
    lo = -rmin * rmin;
    hi = 0.0;
    // Focal branch: no secular root above the pole; the nearest point leaves
    // the symmetry plane of the smallest axis.
    const double eps = 1e-12 * rmin * rmin;
    if (f(lo + eps) < 1.0) {
      double sum = 0.0, d2 = 0.0;
      Vec4 x{};
      for (int i = 0; i < 4; ++i) {
        const double gap = r[i] * r[i] - rmin * rmin;
        x[i] = (gap > 1e-12 * rmin * rmin) ? r[i] * r[i] * p[i] / gap : 0.0;
        sum += (x[i] / r[i]) * (x[i] / r[i]);
        d2 += (x[i] - p[i]) * (x[i] - p[i]);
      }
      // remaining coordinate budget goes to the min axis
      const double xk2 = rmin * rmin * std::max(0.0, 1.0 - sum);
      return std::sqrt(d2 + xk2);
    }
  } else {
    lo = 0.0;
    const double rmax = std::max(std::max(r[0], r[1]), std::max(r[2], r[3]));
    hi = rmax * pn + rmax * rmax;
    while (f(hi) > 1.0) hi *= 2.0;
  }

  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 1.0) lo = mid; else hi = mid;
  }
  const double t = 0.5 * (lo + hi);
  double d2 = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double x = r[i] * r[i] * p[i] / (r[i] * r[i] + t);
    d2 += (x - p[i]) * (x - p[i]);
  }
  const double d = std::sqrt(d2);
  return inside ? d : -d;
}

std::map<int, std::shared_ptr<const DirectionGrid>>& grid_cache() {
  static std::map<int, std::shared_ptr<const DirectionGrid>> cache;
  return cache;
}

std::mutex& grid_mutex() {
  static std::mutex m;
  return m;
}

} // namespace

std::shared_ptr<const DirectionGrid> DirectionGrid::canonical(int n) {
  if (n < 16) throw std::invalid_argument("DirectionGrid: need at least 16 directions");
  std::lock_guard<std::mutex> lock(grid_mutex());
  auto& cache = grid_cache();
  if (auto it = cache.find(n); it != cache.end()) return it->second;

  auto g = std::make_shared<DirectionGrid>();
  g->x.resize(n);
  g->y.resize(n);
  g->z.resize(n);
  g->w.resize(n);
  const double phi = std::numbers::sqrt2;
  const double psi = 1.533751168755204288118041;
  for (int i = 0; i < n; ++i) {
    const double s = (i + 0.5) / n;
    const double rr = std::sqrt(s);
    const double RR = std::sqrt(1.0 - s);
    const double alpha = 2.0 * std::numbers::pi * (i / phi);
    const double beta = 2.0 * std::numbers::pi * (i / psi);
    g->x[i] = rr * std::sin(alpha);
    g->y[i] = rr * std::cos(alpha);
    g->z[i] = RR * std::sin(beta);
    g->w[i] = RR * std::cos(beta);
  }
  cache[n] = g;
  return g;
}

const char* to_string(BodyKind k) {
  switch (k) {
    case BodyKind::ball: return "ball";
    case BodyKind::ellipsoid: return "ellipsoid";
    case BodyKind::cone_hull: return "cone_hull";
    case BodyKind::sampled: return "sampled";
  }
  return "unknown";
}

ConvexBody ConvexBody::make_ball(const Vec4& center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
  ConvexBody b;
  b.kind_ = BodyKind::ball;
  b.center_ = center;
  b.radius_ = radius;
  for (int i = 0; i < 4; ++i) {
    b.box_lo_[i] = center[i] - radius;
    b.box_hi_[i] = center[i] + radius;
  }
  return b;
}

ConvexBody ConvexBody::make_ellipsoid(const Vec4& center, const Vec4& radii) {
  for (double r : radii)
    if (!(r > 0.0)) throw std::invalid_argument("ellipsoid radii must be positive");
  ConvexBody b;
  b.kind_ = BodyKind::ellipsoid;
  b.center_ = center;
  b.radii_ = radii;
  for (int i = 0; i < 4; ++i) {
    b.box_lo_[i] = center[i] - radii[i];
    b.box_hi_[i] = center[i] + radii[i];
  }
  return b;
}

ConvexBody ConvexBody::make_sampled(std::shared_ptr<const DirectionGrid> grid,
                                    std::vector<double> support, const Vec4& box_lo,
                                    const Vec4& box_hi) {
  if (!grid || static_cast<int>(support.size()) != grid->size()) {
    throw std::invalid_argument("sampled body: support size must match the grid");
  }
  ConvexBody b;
  b.kind_ = BodyKind::sampled;
  b.grid_ = std::move(grid);
  b.support_ = std::move(support);
  b.box_lo_ = box_lo;
  b.box_hi_ = box_hi;
  return b;
}

ConvexBody cone_hull_body(double a, double center_height, double radius) {
  if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("cone_hull: a must be in (0,1)");
  if (!(center_height > 0.0) || !(radius > 0.0)) {
    throw std::invalid_argument("cone_hull: height and radius must be positive");
  }
  if (!(radius < center_height * a / std::sqrt(1.0 + a * a))) {
    throw std::invalid_argument(
        "cone_hull: ball is not strictly inside the cone (containment violated)");
  }
  ConvexBody b;
  b.kind_ = BodyKind::cone_hull;
  b.cone_a_ = a;
  b.cone_h_ = center_height;
  b.cone_r_ = radius;
  b.grid_ = DirectionGrid::canonical();
  b.support_.resize(b.grid_->size());
  for (int i = 0; i < b.grid_->size(); ++i) {
    b.support_[i] = std::max(0.0, center_height * b.grid_->w[i] + radius);
  }
  b.box_lo_ = {-radius, -radius, -radius, 0.0};
  b.box_hi_ = {radius, radius, radius, center_height + radius};
  return b;
}

double ConvexBody::support(const Vec4& theta) const {
  const double n = norm4(theta);
  if (std::fabs(n - 1.0) > 1e-12) {
    throw std::invalid_argument("support: direction must be a unit vector");
  }
  switch (kind_) {
    case BodyKind::ball:
      return radius_ + dot4(center_, theta);
    case BodyKind::ellipsoid: {
      double s = 0.0;
      for (int i = 0; i < 4; ++i) s += radii_[i] * radii_[i] * theta[i] * theta[i];
      return std::sqrt(s) + dot4(center_, theta);
    }
    case BodyKind::cone_hull:
      return std::max(0.0, cone_h_ * theta[3] + cone_r_);
    case BodyKind::sampled: {
      // nearest sampled direction; callers that need exact values use the
      // grid directions themselves
      int best = 0;
      double bestdot = -2.0;
      for (int i = 0; i < grid_->size(); ++i) {
        const double d = theta[0] * grid_->x[i] + theta[1] * grid_->y[i] +
                         theta[2] * grid_->z[i] + theta[3] * grid_->w[i];
        if (d > bestdot) {
          bestdot = d;
          best = i;
        }
      }
      return support_[best];
    }
  }
  return 0.0;
}

double ConvexBody::membership(const Vec4& x) const {
  switch (kind_) {
    case BodyKind::ball:
      return radius_ - norm4(sub4(x, center_));
    case BodyKind::ellipsoid:
      return ellipsoid_signed_distance(sub4(x, center_), radii_);
    case BodyKind::cone_hull: {
      // x in hull{0, B(c,r)} iff |x - s c| <= s r for some s in [0,1]
      const double A = cone_h_ * cone_h_ - cone_r_ * cone_r_;
      const double xc = cone_h_ * x[3];
      const double disc = xc * xc - A * dot4(x, x);
      bool inside_closed = false;
      if (disc >= 0.0) {
        const double root = std::sqrt(disc);
        const double s_lo = (xc - root) / A;
        const double s_hi = (xc + root) / A;
        inside_closed = (s_lo <= 1.0) && (s_hi >= 0.0);
      }
      const double m = kernels::support_margin(x.data(), grid_->x, grid_->y, grid_->z,
                                               grid_->w, support_);
      const double mag = std::max(std::fabs(m), 1e-15);
      return inside_closed ? mag : -mag;
    }
    case BodyKind::sampled:
      return kernels::support_margin(x.data(), grid_->x, grid_->y, grid_->z, grid_->w,
                                     support_);
  }
  return 0.0;
}

double ConvexBody::boundary_distance(const Vec4& x) const {
  switch (kind_) {
    case BodyKind::ball:
    case BodyKind::ellipsoid:
      return membership(x);
    case BodyKind::cone_hull:
    case BodyKind::sampled:
      return kernels::support_margin(x.data(), grid_->x, grid_->y, grid_->z, grid_->w,
                                     support_);
  }
  return 0.0;
}

bool ConvexBody::in_strip(const Vec4& x, const StripSpec& strip) const {
  if (membership(x) <= 0.0) {
    throw std::domain_error("in_strip: point is not inside the body");
  }
  const double d = boundary_distance(x);
  return d <= strip.epsilon;
}

double ConvexBody::boundary_crossing(const Vec4& x, const Vec4& dir, double tmax) const {
  switch (kind_) {
    case BodyKind::ball: {
      const Vec4 rel = sub4(x, center_);
      const double aq = dot4(dir, dir);
      const double bq = dot4(dir, rel);
      const double cq = dot4(rel, rel) - radius_ * radius_;
      const double disc = bq * bq - aq * cq;
      if (disc < 0.0) return tmax;
      const double t = (-bq + std::sqrt(disc)) / aq;
      return std::clamp(t, 0.0, tmax);
    }
    case BodyKind::ellipsoid: {
      double aq = 0.0, bq = 0.0, cq = -1.0;
      for (int i = 0; i < 4; ++i) {
        const double ri2 = radii_[i] * radii_[i];
        const double rel = x[i] - center_[i];
        aq += dir[i] * dir[i] / ri2;
        bq += dir[i] * rel / ri2;
        cq += rel * rel / ri2;
      }
      const double disc = bq * bq - aq * cq;
      if (disc < 0.0) return tmax;
      const double t = (-bq + std::sqrt(disc)) / aq;
      return std::clamp(t, 0.0, tmax);
    }
    case BodyKind::cone_hull: {
      double lo = 0.0, hi = tmax;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const Vec4 p = {x[0] + mid * dir[0], x[1] + mid * dir[1], x[2] + mid * dir[2],
                        x[3] + mid * dir[3]};
        if (membership(p) > 0.0) lo = mid; else hi = mid;
      }
      return 0.5 * (lo + hi);
    }
    case BodyKind::sampled: {
      // exact crossing of the support polytope along the ray
      double best = tmax;
      const int n = grid_->size();
      for (int i = 0; i < n; ++i) {
        const double g = dir[0] * grid_->x[i] + dir[1] * grid_->y[i] +
                         dir[2] * grid_->z[i] + dir[3] * grid_->w[i];
        if (g <= 1e-14) continue;
        const double c = support_[i] - (x[0] * grid_->x[i] + x[1] * grid_->y[i] +
                                        x[2] * grid_->z[i] + x[3] * grid_->w[i]);
        const double t = c / g;
        if (t < best) best = t;
      }
      return std::clamp(best, 0.0, tmax);
    }
  }
  return tmax;
}

void ConvexBody::bounding_box(Vec4& lo, Vec4& hi) const {
  lo = box_lo_;
  hi = box_hi_;
}

ConvexBody minkowski_interpolate(const ConvexBody& b1, const ConvexBody& omega, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::invalid_argument("minkowski_interpolate: t must lie in [0,1]");
  }
  if (t == 0.0) return b1;
  if (t == 1.0) return omega;

  std::shared_ptr<const DirectionGrid> grid;
  if (b1.kind() == BodyKind::sampled) grid = b1.grid();
  if (omega.kind() == BodyKind::sampled) {
    if (grid && grid->size() != omega.grid()->size()) {
      throw std::invalid_argument("minkowski_interpolate: sampled bodies on different grids");
    }
    if (!grid) grid = omega.grid();
  }
  if (!grid) grid = DirectionGrid::canonical();

  const int n = grid->size();
  std::vector<double> h(n);
  for (int i = 0; i < n; ++i) {
    const Vec4 theta = grid->dir(i);
    h[i] = (1.0 - t) * b1.support(theta) + t * omega.support(theta);
  }

  Vec4 lo1, hi1, lo2, hi2, lo, hi;
  b1.bounding_box(lo1, hi1);
  omega.bounding_box(lo2, hi2);
  for (int i = 0; i < 4; ++i) {
    lo[i] = (1.0 - t) * lo1[i] + t * lo2[i];
    hi[i] = (1.0 - t) * hi1[i] + t * hi2[i];
    // the support polytope can overshoot the ideal body by O(kappa^2)
    const double pad = 0.01 * (hi[i] - lo[i]);
    lo[i] -= pad;
    hi[i] += pad;
  }
  return ConvexBody::make_sampled(grid, std::move(h), lo, hi);
}

double support_eval(const ConvexBody& body, const Vec4& theta) { return body.support(theta); }
double membership(const ConvexBody& body, const Vec4& x) { return body.membership(x); }
bool in_strip(const ConvexBody& body, const Vec4& x, const StripSpec& strip) {
  return body.in_strip(x, strip);
}

std::string ConvexBody::to_json() const {
  json j;
  j["kind"] = bodies::to_string(kind_);
  json p;
  switch (kind_) {
    case BodyKind::ball:
      p["center"] = center_;
      p["radius"] = radius_;
      break;
    case BodyKind::ellipsoid:
      p["center"] = center_;
      p["radii"] = radii_;
      break;
    case BodyKind::cone_hull:
      p["a"] = cone_a_;
      p["height"] = cone_h_;
      p["radius"] = cone_r_;
      break;
    case BodyKind::sampled:
      p["support"] = support_;
      p["box_lo"] = box_lo_;
      p["box_hi"] = box_hi_;
      break;
  }
  j["params"] = p;
  j["grid_size"] = grid_ ? grid_->size() : 0;
  return j.dump();
}

ConvexBody ConvexBody::from_json(const std::string& text) {
  const json j = json::parse(text);
  const std::string kind = j.at("kind").get<std::string>();
  const json& p = j.at("params");
  auto vec4 = [](const json& a) {
    if (!a.is_array() || a.size() != 4) {
      throw std::invalid_argument("body json: expected a 4-vector");
    }
    return Vec4{a[0].get<double>(), a[1].get<double>(), a[2].get<double>(),
                a[3].get<double>()};
  };
  if (kind == "ball") {
    return make_ball(vec4(p.at("center")), p.at("radius").get<double>());
  }
  if (kind == "ellipsoid") {
    return make_ellipsoid(vec4(p.at("center")), vec4(p.at("radii")));
  }
  if (kind == "cone_hull") {
    return cone_hull_body(p.at("a").get<double>(), p.at("height").get<double>(),
                          p.at("radius").get<double>());
  }
  if (kind == "sampled") {
    const int n = j.at("grid_size").get<int>();
    auto grid = DirectionGrid::canonical(n);
    auto support = p.at("support").get<std::vector<double>>();
    return make_sampled(grid, std::move(support), vec4(p.at("box_lo")),
                        vec4(p.at("box_hi")));
  }
  throw std::invalid_argument("body json: unknown kind '" + kind + "'");
}

std::uint64_t ConvexBody::content_hash() const {
  const std::string s = to_json();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

} // namespace cma::bodies
