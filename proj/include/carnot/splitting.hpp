#pragma once

#include <limits>

#include "carnot/group.hpp"

namespace carnot {

// Vertical splitting W * V for a unit horizontal direction nu.  M is an
// orthogonal change of horizontal basis with M nu = e1; all cone, cylinder
// and projection formulas are evaluated in the rotated coordinates, where
// V = exp(span{X_1}) and W = {x_1 = 0}.
struct Splitting {
  GroupSpec spec;          // original coordinates
  Vec nu;                  // unit horizontal direction
  Mat M;                   // orthogonal, M nu = e1, det M = +1
  GroupSpec rotated_spec;  // B~^j = M B^j M^T

  int wdim() const { return spec.m1 - 1 + spec.m2; }

  Point to_rotated(const Point& p) const;
  Point from_rotated(const Point& p) const;

  // W-coordinates (x'_2..x'_m1, t) of a point on W <-> group element
  Vec w_coords(const Point& p_rotated) const;
  Point w_point_rotated(const Vec& w) const;
  Point w_point(const Vec& w) const;  // original coordinates
};

Splitting make_splitting(const GroupSpec& spec, const Vec& nu);

// <nu, x>; a group homomorphism G -> R.
double height(const Splitting& split, const Point& p);

// pi_V(p) = (h(p) nu, 0); pi_W via p = pi_W(p) * pi_V(p).
Point project_V(const Splitting& split, const Point& p);
Point project_W(const Splitting& split, const Point& p);

// ||p||_C = max{ ||pi_W(p)||_inf, |h(p)| }
double cyl_norm(const Splitting& split, const Point& p);

bool in_cylinder(const Splitting& split, const Point& center, double r,
                 const Point& p);

enum class ConeSign { Plus, Minus, Both };

struct Cone {
  Point vertex;
  double alpha = 1.0;  // aperture in (0, +inf]
  ConeSign sign = ConeSign::Both;
};

// Strict membership in the open cone: ||pi_W(u)||_inf < alpha |h(u)| with
// u = vertex^{-1} * p and the sign constraint on x_1(u).
bool in_cone(const Splitting& split, const Cone& cone, const Point& p);

// gamma = max{alpha, beta, (eps2/2) sqrt((alpha beta + 2 beta) C)}:
// aperture after composing cones of apertures alpha and beta.
double cone_gamma(double alpha, double beta, const GroupSpec& spec);

// alpha + eps2 sqrt(alpha C): aperture containing the inverted cone.
double cone_inversion_aperture(double alpha, const GroupSpec& spec);

inline constexpr double kInfiniteAperture =
    std::numeric_limits<double>::infinity();

}  // namespace carnot
