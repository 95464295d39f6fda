#include "carnot/group.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "carnot/parallel.hpp"

namespace carnot {

namespace {

void require_dims(const GroupSpec& spec, const Point& p, const char* who) {
  if (p.x.size() != spec.m1 || p.t.size() != spec.m2) {
    std::ostringstream os;
    os << who << ": point dimensions (" << p.x.size() << "," << p.t.size()
       << ") do not match group (" << spec.m1 << "," << spec.m2 << ")";
    throw ValidationError(os.str());
  }
}

// Columns B^1 x, ..., B^m2 x.
Mat horizontal_pencil(const std::vector<Mat>& B, const Vec& x) {
  Mat G(x.size(), Eigen::Index(B.size()));
  for (std::size_t j = 0; j < B.size(); ++j) G.col(Eigen::Index(j)) = B[j] * x;
  return G;
}

}  // namespace

double default_epsilon2(double bound_C) {
  // eps2 <= 2/sqrt(C) makes the triangle inequality of ||.||_inf hold;
  // capped at 0.9 to stay inside the open interval (0,1).
  if (bound_C <= 0.0) return 0.9;
  return std::min(0.9, 2.0 / std::sqrt(bound_C));
}

Vec bracket(const GroupSpec& spec, const Vec& x, const Vec& xi) {
  if (x.size() != spec.m1 || xi.size() != spec.m1)
    throw ValidationError("bracket: vector dimension does not match m1");
  Vec out(spec.m2);
  for (int j = 0; j < spec.m2; ++j) out[j] = (spec.B[std::size_t(j)] * x).dot(xi);
  return out;
}

Point multiply(const GroupSpec& spec, const Point& p, const Point& q) {
  require_dims(spec, p, "multiply");
  require_dims(spec, q, "multiply");
  Point r;
  r.x = p.x + q.x;
  r.t = p.t + q.t + 0.5 * bracket(spec, p.x, q.x);
  return r;
}

Point inverse(const Point& p) {
  Point r;
  r.x = -p.x;
  r.t = -p.t;
  return r;
}

Point dilate(double lambda, const Point& p) {
  if (lambda < 0.0) throw ValidationError("dilate: lambda must be >= 0");
  Point r;
  r.x = lambda * p.x;
  r.t = (lambda * lambda) * p.t;
  return r;
}

double inf_norm(const GroupSpec& spec, const Point& p) {
  require_dims(spec, p, "inf_norm");
  return std::max(p.x.norm(), spec.eps2 * std::sqrt(p.t.norm()));
}

double distance(const GroupSpec& spec, const Point& p, const Point& q) {
  return inf_norm(spec, multiply(spec, inverse(q), p));
}

double bound_constant(const std::vector<Mat>& B, int restarts,
                      std::uint64_t seed) {
  const int m1 = int(B[0].rows());
  const int m2 = int(B.size());
  double best = 0.0;
  for (int r = 0; r < restarts; ++r) {
    Rng rng(Rng::mix(seed, 0x626f756e64ULL + std::uint64_t(r)));
    Vec x = rng.unit_vector(m1);
    double value = 0.0;
    for (int it = 0; it < 200; ++it) {
      // best xi for fixed x: top left-singular direction of G(x)
      Mat G = horizontal_pencil(B, x);
      Eigen::JacobiSVD<Mat> svd(G, Eigen::ComputeThinU);
      double sv = svd.singularValues()[0];
      Vec xi = svd.matrixU().col(0);
      // best x for fixed xi: top eigenvector of sum_j (B^j^T xi)(B^j^T xi)^T
      Mat K = Mat::Zero(m1, m1);
      for (int j = 0; j < m2; ++j) {
        Vec bj = B[std::size_t(j)].transpose() * xi;
        K += bj * bj.transpose();
      }
      Eigen::SelfAdjointEigenSolver<Mat> es(K);
      Vec xnew = es.eigenvectors().col(m1 - 1);
      double vnew = std::sqrt(std::max(0.0, es.eigenvalues()[m1 - 1]));
      x = xnew;
      if (vnew <= value * (1.0 + 1e-15) && it > 2) {
        value = std::max(value, std::max(vnew, sv));
        break;
      }
      value = std::max(vnew, sv);
    }
    best = std::max(best, value);
  }
  return best;
}

Point random_point(const GroupSpec& spec, Rng& rng, double scale) {
  Point p;
  p.x = Vec(spec.m1);
  p.t = Vec(spec.m2);
  for (int i = 0; i < spec.m1; ++i) p.x[i] = rng.uniform(-scale, scale);
  for (int j = 0; j < spec.m2; ++j)
    p.t[j] = rng.uniform(-scale * scale, scale * scale);
  return p;
}

CalibrationReport calibrate_epsilon2(const GroupSpec& spec,
                                     std::uint64_t trials, std::uint64_t seed,
                                     std::optional<double> eps2_override) {
  GroupSpec s = spec;
  s.eps2 = eps2_override.value_or(default_epsilon2(spec.bound_C));

  ScanResult scan = margin_scan(std::int64_t(trials), [&](std::int64_t i) {
    Rng rng(Rng::mix(seed, std::uint64_t(i)));
    const double scale = std::exp(rng.uniform(-2.0, 2.0));
    Point p = random_point(s, rng, scale);
    Point q = random_point(s, rng, scale);
    Point g = random_point(s, rng, scale);
    // left-translate the pair by g to get a generic triple p', q', g
    Point gp = multiply(s, g, p);
    Point gq = multiply(s, g, q);
    double lhs = distance(s, gp, gq);
    double rhs = distance(s, gp, g) + distance(s, g, gq);
    return (lhs - rhs) / (1.0 + std::abs(rhs));
  }, 1e-12);

  CalibrationReport report;
  report.eps2 = s.eps2;
  report.trials = trials;
  report.seed = seed;
  report.worst_margin = scan.worst_margin;
  report.violations = scan.violations;
  if (scan.violations > 0) {
    std::ostringstream os;
    os << "calibrate_epsilon2: triangle inequality violated for eps2=" << s.eps2
       << " (" << scan.violations << " of " << trials
       << " triples, first index " << scan.first_index << ", seed " << seed
       << ")";
    throw InvariantViolation(os.str());
  }
  return report;
}

GroupSpec make_group_spec(int m1, int m2, std::vector<Mat> B,
                          std::optional<double> eps2, const std::string& name,
                          std::uint64_t seed) {
  if (m1 < 2) throw ValidationError("make_group_spec: m1 must be >= 2");
  if (m2 < 1) throw ValidationError("make_group_spec: m2 must be >= 1");
  if (int(B.size()) != m2)
    throw ValidationError("make_group_spec: expected m2 matrices");

  for (int j = 0; j < m2; ++j) {
    const Mat& Bj = B[std::size_t(j)];
    if (Bj.rows() != m1 || Bj.cols() != m1) {
      std::ostringstream os;
      os << "make_group_spec: B^" << (j + 1) << " is " << Bj.rows() << "x"
         << Bj.cols() << ", expected " << m1 << "x" << m1;
      throw ValidationError(os.str());
    }
    for (int r = 0; r < m1; ++r)
      for (int c = 0; c < m1; ++c)
        if (Bj(r, c) + Bj(c, r) != 0.0) {
          std::ostringstream os;
          os << "make_group_spec: B^" << (j + 1) << " is not skew-symmetric at ("
             << (r + 1) << "," << (c + 1) << "): " << Bj(r, c) << " vs "
             << Bj(c, r);
          throw ValidationError(os.str());
        }
  }

  // linear independence of the tuple as vectors in R^{m1*m1}
  Mat V(m1 * m1, m2);
  for (int j = 0; j < m2; ++j)
    V.col(j) = Eigen::Map<const Vec>(B[std::size_t(j)].data(), m1 * m1);
  Eigen::JacobiSVD<Mat> svd(V);
  if (svd.singularValues()[m2 - 1] <= 1e-10 * svd.singularValues()[0])
    throw ValidationError("make_group_spec: B matrices are linearly dependent");

  GroupSpec spec;
  spec.name = name;
  spec.m1 = m1;
  spec.m2 = m2;
  spec.B = std::move(B);
  spec.Q = m1 + 2 * m2;
  spec.bound_C = bound_constant(spec.B, 24, seed);
  spec.eps2 = eps2.value_or(default_epsilon2(spec.bound_C));
  if (!(spec.eps2 > 0.0 && spec.eps2 <= 1.0))
    throw ValidationError("make_group_spec: eps2 must lie in (0,1]");

  if (eps2.has_value()) {
    // spot-check a supplied eps2; the full certification is calibrate_epsilon2
    try {
      calibrate_epsilon2(spec, 50000, seed, spec.eps2);
    } catch (const InvariantViolation& e) {
      throw ValidationError(std::string("make_group_spec: supplied eps2 "
                                        "rejected: ") +
                            e.what());
    }
  }
  return spec;
}

GroupSpec rotate_basis(const GroupSpec& spec, const Mat& M) {
  if (M.rows() != spec.m1 || M.cols() != spec.m1)
    throw ValidationError("rotate_basis: M must be m1 x m1");
  if ((M * M.transpose() - Mat::Identity(spec.m1, spec.m1)).cwiseAbs().maxCoeff() >
      1e-12)
    throw ValidationError("rotate_basis: M is not orthogonal");
  GroupSpec out = spec;
  for (int j = 0; j < spec.m2; ++j)
    out.B[std::size_t(j)] = M * spec.B[std::size_t(j)] * M.transpose();
  // bound_C and eps2 are invariant under stratified changes of coordinates
  return out;
}

}  // namespace carnot
