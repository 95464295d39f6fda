#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "carnot/graphs.hpp"

namespace carnot {

struct MinimizeOptions {
  int max_iters = 2000;
  double step0 = 1.0;
  double armijo_c = 1e-4;
  double armijo_shrink = 0.5;
  double grad_tol = 1e-8;        // sup-norm of the free-node gradient
  std::uint64_t seed = 0;

  void validate() const;
};

struct TraceRow {
  int iter = 0;
  double energy = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
};

struct MinimizeResult {
  SampledGraph graph;
  std::vector<TraceRow> trace;
  bool converged = false;
};

// Midpoint-rule energy: area of the graph over the interior cells.
double discrete_energy(const SampledGraph& graph);

// Tensor 2-point Gauss quadrature of the same cell-wise integrand.  The
// midpoint rule has hourglass null modes (node patterns the cell-centered
// stencil cannot see), so the descent loop minimizes this variant.
double discrete_energy_gauss(const SampledGraph& graph);

// Exact derivative of the energies with respect to node values, including
// the dependence of the evaluation point on phi through the group law.
// Entries at nodes outside every interior cell are zero.
std::vector<double> energy_gradient(const SampledGraph& graph);
std::vector<double> energy_gradient_gauss(const SampledGraph& graph);

// Projected gradient descent with Armijo backtracking; boundary-ring nodes
// are frozen to the supplied values (node-major order over ring nodes is
// irrelevant: the vector matches graph.values in size, only ring entries are
// read).  Energy is nonincreasing along accepted steps.
MinimizeResult minimize(const SampledGraph& graph0,
                        const std::vector<double>& boundary,
                        const MinimizeOptions& opts);

// Excess at several radii with the cross-scale bound
// e(r) <= (s/r)^{Q-1} e(s) checked row by row (1e-6 relative).
ExcessReport excess_decay_report(const SampledGraph& graph, const Point& p,
                                 const std::vector<double>& radii);

struct DiagnosticPoint {
  std::int64_t node = 0;
  Vec w;
  double swept_excess = 0.0;
  bool flagged = false;
};

struct DiagnosticReport {
  double epsilon = 0.0;
  std::vector<double> radii;
  std::vector<DiagnosticPoint> points;
  std::int64_t flagged = 0;
  double energy_lhs = 0.0;   // integral of |grad phi|^2 over the C_1 shadow
  double excess_rhs = 0.0;   // excess at the largest radius
  double ratio = 0.0;        // energy_lhs / excess_rhs when excess_rhs > 0
  double step3_lhs = 0.0;    // e(1), half-square form
  double step3_rhs = 0.0;    // 1/2 integral of (1 - <nu_E,nu>^2) over C_1
};

// Scale-swept small-excess flags (the M_0 analog at desk radii) plus the
// energy/excess quantitative check.  Candidate nodes are the grid nodes
// inside [candidate_lo, candidate_hi], thinned by `stride` per axis.
DiagnosticReport lipschitz_approx_diagnostic(const SampledGraph& graph,
                                             double epsilon,
                                             const std::vector<double>& radii,
                                             const Vec& candidate_lo,
                                             const Vec& candidate_hi,
                                             int stride = 1);

}  // namespace carnot
