#include "carnot/ilip.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "carnot/parallel.hpp"

namespace carnot {

SampleSet make_sample_set(const Splitting& split, std::vector<Vec> w,
                          std::vector<double> phi) {
  if (w.size() != phi.size())
    throw ValidationError("make_sample_set: coordinate/value count mismatch");
  if (w.empty()) throw ValidationError("make_sample_set: empty sample set");
  const int d = split.wdim();
  for (const Vec& wi : w)
    if (wi.size() != d)
      throw ValidationError("make_sample_set: W-coordinate dimension mismatch");
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t k = i + 1; k < w.size(); ++k)
      if ((w[i] - w[k]).lpNorm<Eigen::Infinity>() == 0.0 && phi[i] != phi[k]) {
        std::ostringstream os;
        os << "make_sample_set: duplicate w with conflicting values at samples "
           << i << " and " << k;
        throw ValidationError(os.str());
      }
  SampleSet s{split, std::move(w), std::move(phi)};
  return s;
}

Point graph_map(const Splitting& split, const Vec& w, double s) {
  Point base = split.w_point(w);
  Point v;
  v.x = s * split.nu;
  v.t = Vec::Zero(split.spec.m2);
  return multiply(split.spec, base, v);
}

namespace {

// quotient of one ordered pair of graph points
double pair_quotient(const Splitting& split, const Point& p, const Point& q,
                     double phi_p, double phi_q) {
  const double num = std::abs(phi_p - phi_q);
  const double den = inf_norm(
      split.spec, project_W(split, multiply(split.spec, inverse(q), p)));
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

}  // namespace

double lip_constant_estimate(const SampleSet& samples) {
  if (samples.w.size() < 2)
    throw ValidationError("lip_constant_estimate: need at least 2 samples");
  const std::size_t k = samples.w.size();
  std::vector<Point> pts(k);
  for (std::size_t i = 0; i < k; ++i)
    pts[i] = graph_map(samples.split, samples.w[i], samples.phi[i]);
  double best = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      best = std::max(best, pair_quotient(samples.split, pts[i], pts[j],
                                          samples.phi[i], samples.phi[j]));
    }
  return best;
}

bool is_intrinsic_lipschitz(const SampleSet& samples, double L) {
  if (!(L > 0.0))
    throw ValidationError("is_intrinsic_lipschitz: L must be positive");
  const std::size_t k = samples.w.size();
  std::vector<Point> pts(k);
  for (std::size_t i = 0; i < k; ++i)
    pts[i] = graph_map(samples.split, samples.w[i], samples.phi[i]);
  Cone cone;
  cone.alpha = 1.0 / L;
  cone.sign = ConeSign::Both;
  for (std::size_t j = 0; j < k; ++j) {
    cone.vertex = pts[j];
    for (std::size_t i = 0; i < k; ++i) {
      if (i == j) continue;
      if (in_cone(samples.split, cone, pts[i])) return false;
    }
  }
  return true;
}

double min_cone_entry(const Splitting& split, const Point& vertex, double alpha,
                      const Vec& w) {
  if (!(alpha > 0.0))
    throw ValidationError("min_cone_entry: alpha must be positive");
  Point v = multiply(split.spec, inverse(vertex), split.w_point(w));
  const double wall = inf_norm(split.spec, project_W(split, v));
  const double h = height(split, v);
  if (std::isinf(alpha)) return -h;
  return wall / alpha - h;
}

ExtensionConstants extension_constants(double L, const GroupSpec& spec) {
  if (!(L > 0.0))
    throw ValidationError("extension_constants: L must be positive");
  ExtensionConstants c;
  c.alpha = 1.0 / L;
  const double C = spec.bound_C;
  const double e2 = spec.eps2;
  c.beta = (c.alpha * c.alpha / (c.alpha + 2.0)) * 4.0 / (4.0 + C * e2 * e2);
  const double root = std::sqrt(e2 * e2 * C + 4.0 * c.beta) - e2 * std::sqrt(C);
  c.gamma = 0.25 * root * root;
  c.lip_bound = 1.0 / c.gamma;
  c.c_bound = c.lip_bound / std::max(L, L * L * L * L);
  return c;
}

ExtensionField extend(const SampleSet& samples, double L, const GridBox& grid) {
  grid.validate();
  if (grid.d() != samples.split.wdim())
    throw ValidationError("extend: grid dimension does not match W");
  if (!(L > 0.0 && L < 1.0))
    throw ValidationError("extend: L must lie in (0,1)");
  if (!is_intrinsic_lipschitz(samples, L))
    throw ValidationError("extend: samples are not intrinsic Lipschitz at L");

  const std::size_t k = samples.w.size();
  ExtensionField field;
  field.split = samples.split;
  field.grid = grid;
  field.L_in = L;
  const ExtensionConstants c = extension_constants(L, samples.split.spec);
  field.alpha = c.alpha;
  field.beta = c.beta;
  field.gamma = c.gamma;
  field.lip_bound = c.lip_bound;

  double sup_phi = 0.0;
  for (double v : samples.phi) sup_phi = std::max(sup_phi, std::abs(v));
  field.sup_phi = sup_phi;

  // inverses of the sample graph points, fixed order
  std::vector<Point> inv_pts(k);
  for (std::size_t i = 0; i < k; ++i)
    inv_pts[i] =
        inverse(graph_map(samples.split, samples.w[i], samples.phi[i]));

  const std::int64_t n = grid.nodes();
  field.psi.assign(std::size_t(n), 0.0);
  std::vector<std::int64_t> clamps_hi(std::size_t(n), 0), clamps_lo(std::size_t(n), 0);
  const Splitting& split = samples.split;
  const double alpha = c.alpha;

  parallel_for(n, [&](std::int64_t node) {
    std::vector<int> idx;
    grid.node_unindex(node, idx);
    const Point wp = split.w_point(grid.node_coord(idx));
    double entry = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; ++i) {
      Point v = multiply(split.spec, inv_pts[i], wp);
      const double cand =
          inf_norm(split.spec, project_W(split, v)) / alpha - height(split, v);
      entry = std::min(entry, cand);
    }
    double psi = entry;
    if (psi > sup_phi) {
      psi = sup_phi;
      clamps_hi[std::size_t(node)] = 1;
    }
    if (psi < -sup_phi) {
      psi = -sup_phi;
      clamps_lo[std::size_t(node)] = 1;
    }
    field.psi[std::size_t(node)] = psi;
  });
  for (std::int64_t i = 0; i < n; ++i) {
    field.clamped_hi += clamps_hi[std::size_t(i)];
    field.clamped_lo += clamps_lo[std::size_t(i)];
  }
  return field;
}

double empirical_field_lip(const ExtensionField& field, std::int64_t subsample,
                           std::uint64_t seed) {
  const GridBox& grid = field.grid;
  const std::int64_t n = grid.nodes();
  const Splitting& split = field.split;

  std::vector<std::int64_t> chosen;
  if (n <= subsample) {
    chosen.resize(std::size_t(n));
    for (std::int64_t i = 0; i < n; ++i) chosen[std::size_t(i)] = i;
  } else {
    Rng rng(Rng::mix(seed, 0x6c6970ULL));
    chosen.resize(std::size_t(subsample));
    for (std::int64_t i = 0; i < subsample; ++i)
      chosen[std::size_t(i)] = std::int64_t(rng.next_u64() % std::uint64_t(n));
    std::sort(chosen.begin(), chosen.end());
    chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
  }

  auto node_point = [&](std::int64_t node) {
    std::vector<int> idx;
    grid.node_unindex(node, idx);
    return graph_map(split, grid.node_coord(idx), field.psi[std::size_t(node)]);
  };

  const std::int64_t m = std::int64_t(chosen.size());
  std::vector<Point> pts(std::size_t(m));
  parallel_for(m, [&](std::int64_t i) {
    pts[std::size_t(i)] = node_point(chosen[std::size_t(i)]);
  });

  // all ordered pairs within the subsample
  MaxLoc sub = deterministic_max(m * m, [&](std::int64_t pair) {
    const std::int64_t i = pair / m, j = pair % m;
    if (i == j) return 0.0;
    return pair_quotient(split, pts[std::size_t(i)], pts[std::size_t(j)],
                         field.psi[std::size_t(chosen[std::size_t(i)])],
                         field.psi[std::size_t(chosen[std::size_t(j)])]);
  }, 65536);

  // all axis-neighbor pairs (both orders)
  const int d = grid.d();
  MaxLoc nb = deterministic_max(n, [&](std::int64_t node) {
    std::vector<int> idx;
    grid.node_unindex(node, idx);
    Point p = node_point(node);
    double best = 0.0;
    for (int a = 0; a < d; ++a) {
      if (idx[std::size_t(a)] + 1 >= grid.dims[std::size_t(a)]) continue;
      std::vector<int> jdx = idx;
      ++jdx[std::size_t(a)];
      const std::int64_t other = grid.node_index(jdx);
      Point q = node_point(other);
      best = std::max(best,
                      pair_quotient(split, p, q, field.psi[std::size_t(node)],
                                    field.psi[std::size_t(other)]));
      best = std::max(best,
                      pair_quotient(split, q, p, field.psi[std::size_t(other)],
                                    field.psi[std::size_t(node)]));
    }
    return best;
  });

  return std::max(sub.value, nb.value);
}

}  // namespace carnot
