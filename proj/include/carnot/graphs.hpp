#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "carnot/grid.hpp"
#include "carnot/ilip.hpp"
#include "carnot/splitting.hpp"

namespace carnot {

// Intrinsic graph sampled on a rectangular W-grid; multilinear interpolation
// between nodes.  W-axes are ordered horizontal first (x'_2..x'_m1), then
// vertical (t_1..t_m2).
struct SampledGraph {
  Splitting split;
  GridBox grid;
  std::vector<double> values;

  int horizontal_axes() const { return split.spec.m1 - 1; }
  int vertical_axes() const { return split.spec.m2; }

  double interp(const Vec& w) const {
    return grid_interpolate(grid, values, w);
  }

  // default finite-difference step: half the smallest horizontal spacing
  double fd_step() const;
};

SampledGraph make_graph(const Splitting& split, const GridBox& grid,
                        std::vector<double> values);
SampledGraph make_graph(const Splitting& split, const GridBox& grid,
                        const std::function<double(const Vec&)>& f);
SampledGraph graph_from_extension(const ExtensionField& field);

// Vertical drift of the X_{i+1} flow projected to W: the flow through the
// graph point over w moves in W along (e_{i+1}, sigma(w)) with
//   sigma_j = 1/2 (B~^j x_w)_{i+1} + phi (B~^j e_1)_{i+1}.
Vec flow_drift(const SampledGraph& graph, int i, const Vec& w, double phi);

// Central difference of phi along the X_{i+1} flow through Phi(w), computed
// with the exact group operations and the multilinear interpolant.
Vec phi_gradient_fd(const SampledGraph& graph, const Vec& w, double h);

// First-order form of the same operator: axis derivatives of the
// interpolant combined with the drift coefficients.  Agrees with
// phi_gradient_fd to O(h^2) on smooth phi.
Vec phi_gradient_closed(const SampledGraph& graph, const Vec& w);

// Inner horizontal unit normal (1, -grad) / sqrt(1+|grad|^2) in rotated
// coordinates, from the finite-difference gradient.
Vec normal(const SampledGraph& graph, const Vec& w);

// Midpoint-rule quadrature of sqrt(1+|grad|^2) over interior cells whose
// center lies in [region_lo, region_hi].
double area(const SampledGraph& graph, const Vec& region_lo,
            const Vec& region_hi);

enum class ExcessForm { HalfSquare, OneMinusSquare };

// Cylindrical excess of the graph at center p (original coordinates) and
// scale r: r^{1-Q} integral over {w : Phi(w) in C_r(p)} of
// g(nu_E) sqrt(1+|grad|^2), with g = 1-<nu_E,nu> (half-square) or
// 1-<nu_E,nu>^2.  Throws CoverageError when the cylinder shadow leaves the
// interior cells.
double excess_graph(const SampledGraph& graph, const Point& p, double r,
                    ExcessForm form);

// Both sides of the excess-measure identity over C_1:
//   lhs = area(shadow) - |shadow|,  rhs = excess(0, 1, half-square),
// with the two sides evaluated through the two independent gradient paths.
std::pair<double, double> excess_measure_check(const SampledGraph& graph);

// delta_lambda applied to the graph: scales the box (x by lambda, t by
// lambda^2) and the values by lambda on the same node lattice.
SampledGraph dilate_graph(const SampledGraph& graph, double lambda);

// Integral of |grad phi|^2 (fd path) over the C_r(p) shadow, unnormalized.
double dirichlet_energy_in_cylinder(const SampledGraph& graph, const Point& p,
                                    double r);

struct ExcessReport {
  Point center;
  std::vector<double> radii;
  std::vector<double> excess_half;
  std::vector<double> excess_sq;
};

}  // namespace carnot
