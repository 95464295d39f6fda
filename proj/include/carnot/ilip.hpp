#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "carnot/grid.hpp"
#include "carnot/splitting.hpp"

namespace carnot {

// Scattered samples (w, phi(w)) of a function on W.
struct SampleSet {
  Splitting split;
  std::vector<Vec> w;  // W-coordinates, dimension n-1
  std::vector<double> phi;
};

// Validates dimensions and rejects duplicate w with conflicting values.
SampleSet make_sample_set(const Splitting& split, std::vector<Vec> w,
                          std::vector<double> phi);

// Graph map Phi(w) = w * (s nu); height s over the base point w.
Point graph_map(const Splitting& split, const Vec& w, double s);

// Largest pairwise quotient |phi(p)-phi(q)| / ||pi_W(q^{-1} p)||_inf over
// ordered pairs of graph points; 0 for constant phi.
double lip_constant_estimate(const SampleSet& samples);

// Cone-disjointness form of the definition: no graph point lies in the open
// cone C(q, 1/L) of another.  Agrees with lip_constant_estimate <= L.
bool is_intrinsic_lipschitz(const SampleSet& samples, double L);

// Infimum of {s : w*(s e1) in C^+(vertex, alpha)}.  Since pi_W is constant
// along the V-fiber through w, the threshold is closed-form:
//   ||pi_W(vertex^{-1} w)||_inf / alpha - h(vertex^{-1} w).
double min_cone_entry(const Splitting& split, const Point& vertex, double alpha,
                      const Vec& w);

// Constants of the extension construction at input constant L:
//   alpha = 1/L
//   beta  = alpha^2/(alpha+2) * 4/(4 + C eps2^2)
//   gamma = 1/4 (sqrt(eps2^2 C + 4 beta) - eps2 sqrt(C))^2
//   c_bound = (1/gamma) / max{L, L^4}
struct ExtensionConstants {
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
  double lip_bound = 0.0;  // 1/gamma
  double c_bound = 0.0;
};

ExtensionConstants extension_constants(double L, const GroupSpec& spec);

// Extension of the samples to a grid over a W-box: per node the clamped
// minimum over all sample cones of the cone-entry height.
struct ExtensionField {
  Splitting split;
  GridBox grid;
  std::vector<double> psi;
  double L_in = 0.0;
  double alpha = 0.0, beta = 0.0, gamma = 0.0, lip_bound = 0.0;
  double sup_phi = 0.0;
  std::int64_t clamped_hi = 0;  // nodes where the upper clamp was active
  std::int64_t clamped_lo = 0;  // lower clamp (expected to stay 0)
};

ExtensionField extend(const SampleSet& samples, double L, const GridBox& grid);

// Empirical intrinsic Lipschitz constant of the field over grid nodes: all
// axis-neighbor pairs plus all pairs among a seeded subsample of nodes.
double empirical_field_lip(const ExtensionField& field,
                           std::int64_t subsample = 3000,
                           std::uint64_t seed = 0);

}  // namespace carnot
