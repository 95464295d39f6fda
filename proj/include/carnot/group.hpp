#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "carnot/errors.hpp"
#include "carnot/rng.hpp"

namespace carnot {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Group element in exponential coordinates: horizontal part x in R^m1,
// vertical part t in R^m2.
struct Point {
  Vec x;
  Vec t;

  static Point zero(int m1, int m2) {
    Point p;
    p.x = Vec::Zero(m1);
    p.t = Vec::Zero(m2);
    return p;
  }
};

// A step-2 Carnot group in exponential coordinates.  The group law is
//   (x,t) * (xi,tau) = (x+xi, t+tau+1/2 <Bx,xi>)
// with <Bx,xi>_j = <B^j x, xi> and B an m2-tuple of linearly independent
// skew-symmetric m1 x m1 matrices.
struct GroupSpec {
  std::string name;
  int m1 = 0;
  int m2 = 0;
  std::vector<Mat> B;
  double eps2 = 0.9;     // vertical constant of the d_inf quasi-norm
  double bound_C = 0.0;  // |<Bx,xi>| <= bound_C |x||xi|
  int Q = 0;             // homogeneous dimension m1 + 2*m2

  int n() const { return m1 + m2; }
};

struct CalibrationReport {
  double eps2 = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t violations = 0;
  double worst_margin = 0.0;  // max of ||p*q|| - ||p|| - ||q|| (relative)
  std::uint64_t seed = 0;
};

// Validating constructor.  eps2 defaults to min{0.9, 2/sqrt(C)}; a supplied
// value must pass a seeded triangle-inequality spot check.
GroupSpec make_group_spec(int m1, int m2, std::vector<Mat> B,
                          std::optional<double> eps2 = std::nullopt,
                          const std::string& name = "",
                          std::uint64_t seed = 0);

Point multiply(const GroupSpec& spec, const Point& p, const Point& q);
Point inverse(const Point& p);
Point dilate(double lambda, const Point& p);

// <Bx,xi> as a vector in R^m2; bilinear and antisymmetric.
Vec bracket(const GroupSpec& spec, const Vec& x, const Vec& xi);

// ||p||_inf = max{|x|, eps2 sqrt(|t|)}
double inf_norm(const GroupSpec& spec, const Point& p);
double distance(const GroupSpec& spec, const Point& p, const Point& q);

// Smallest C with |<Bx,xi>| <= C|x||xi|: sup over unit x of the top
// singular value of [B^1 x ... B^m2 x], by alternating maximization with
// seeded random restarts.
double bound_constant(const std::vector<Mat>& B, int restarts = 24,
                      std::uint64_t seed = 0);

// Certifies the triangle inequality of ||.||_inf for a candidate eps2 over
// seeded random triples.  Returns min{0.9, 2/sqrt(C)} (or the override) and
// the violation report; throws InvariantViolation when violations occur.
CalibrationReport calibrate_epsilon2(const GroupSpec& spec,
                                     std::uint64_t trials, std::uint64_t seed,
                                     std::optional<double> eps2_override =
                                         std::nullopt);

// Stratified change of coordinates B~^j = M B^j M^T for orthogonal M.
GroupSpec rotate_basis(const GroupSpec& spec, const Mat& M);

double default_epsilon2(double bound_C);

// Random point with coordinates of the given scale (t entries scale^2).
Point random_point(const GroupSpec& spec, Rng& rng, double scale = 1.0);

}  // namespace carnot
