#include "carnot/splitting.hpp"

#include <cmath>

namespace carnot {

Point Splitting::to_rotated(const Point& p) const {
  Point q;
  q.x = M * p.x;
  q.t = p.t;
  return q;
}

Point Splitting::from_rotated(const Point& p) const {
  Point q;
  q.x = M.transpose() * p.x;
  q.t = p.t;
  return q;
}

Vec Splitting::w_coords(const Point& p_rotated) const {
  Vec w(wdim());
  w.head(spec.m1 - 1) = p_rotated.x.tail(spec.m1 - 1);
  w.tail(spec.m2) = p_rotated.t;
  return w;
}

Point Splitting::w_point_rotated(const Vec& w) const {
  Point p;
  p.x = Vec::Zero(spec.m1);
  p.x.tail(spec.m1 - 1) = w.head(spec.m1 - 1);
  p.t = w.tail(spec.m2);
  return p;
}

Point Splitting::w_point(const Vec& w) const {
  return from_rotated(w_point_rotated(w));
}

Splitting make_splitting(const GroupSpec& spec, const Vec& nu) {
  if (nu.size() != spec.m1)
    throw ValidationError("make_splitting: nu must have dimension m1");
  if (std::abs(nu.norm() - 1.0) > 1e-12)
    throw ValidationError("make_splitting: nu must be a unit vector");

  Splitting split;
  split.spec = spec;
  split.nu = nu;

  // Householder reflection sending nu to e1; I when nu = e1 already.
  Mat M = Mat::Identity(spec.m1, spec.m1);
  Vec w = nu - Vec::Unit(spec.m1, 0);
  const double wn2 = w.squaredNorm();
  if (wn2 > 1e-28) {
    M -= (2.0 / wn2) * (w * w.transpose());
    // flip one complementary row to restore det = +1; (M nu)_last = 0, so
    // M nu = e1 is untouched
    M.row(spec.m1 - 1) *= -1.0;
  }
  split.M = M;
  split.rotated_spec = rotate_basis(spec, M);
  split.rotated_spec.name = spec.name.empty() ? "" : spec.name + "|rot";
  return split;
}

double height(const Splitting& split, const Point& p) {
  return split.nu.dot(p.x);
}

Point project_V(const Splitting& split, const Point& p) {
  Point q;
  q.x = height(split, p) * split.nu;
  q.t = Vec::Zero(split.spec.m2);
  return q;
}

Point project_W(const Splitting& split, const Point& p) {
  // pi_W(p) = (x_perp, t - 1/2 <B x_perp, x_par>)
  const double h = height(split, p);
  Vec x_par = h * split.nu;
  Vec x_perp = p.x - x_par;
  Point q;
  q.x = x_perp;
  q.t = p.t - 0.5 * bracket(split.spec, x_perp, x_par);
  return q;
}

double cyl_norm(const Splitting& split, const Point& p) {
  return std::max(inf_norm(split.spec, project_W(split, p)),
                  std::abs(height(split, p)));
}

bool in_cylinder(const Splitting& split, const Point& center, double r,
                 const Point& p) {
  if (!(r > 0.0)) throw ValidationError("in_cylinder: r must be positive");
  return cyl_norm(split, multiply(split.spec, inverse(center), p)) < r;
}

bool in_cone(const Splitting& split, const Cone& cone, const Point& p) {
  if (!(cone.alpha > 0.0)) throw ValidationError("in_cone: alpha must be > 0");
  Point u = multiply(split.spec, inverse(cone.vertex), p);
  const double h = height(split, u);
  switch (cone.sign) {
    case ConeSign::Plus:
      if (!(h > 0.0)) return false;
      break;
    case ConeSign::Minus:
      if (!(h < 0.0)) return false;
      break;
    case ConeSign::Both:
      if (h == 0.0) return false;
      break;
  }
  if (std::isinf(cone.alpha)) return true;
  return inf_norm(split.spec, project_W(split, u)) < cone.alpha * std::abs(h);
}

double cone_gamma(double alpha, double beta, const GroupSpec& spec) {
  if (alpha < 0.0 || beta < 0.0)
    throw ValidationError("cone_gamma: apertures must be >= 0");
  const double mixed =
      0.5 * spec.eps2 * std::sqrt((alpha * beta + 2.0 * beta) * spec.bound_C);
  return std::max({alpha, beta, mixed});
}

double cone_inversion_aperture(double alpha, const GroupSpec& spec) {
  if (!(alpha > 0.0))
    throw ValidationError("cone_inversion_aperture: alpha must be > 0");
  return alpha + spec.eps2 * std::sqrt(alpha * spec.bound_C);
}

}  // namespace carnot
