#include "carnot/minlab.hpp"

#include <atomic>
#include <cmath>
#include <sstream>

#include "carnot/parallel.hpp"

namespace carnot {

void MinimizeOptions::validate() const {
  if (max_iters <= 0 || !(step0 > 0.0) || !(grad_tol > 0.0))
    throw ValidationError("MinimizeOptions: max_iters, step0, grad_tol must "
                          "be positive");
  if (!(armijo_c > 0.0 && armijo_c < 1.0) ||
      !(armijo_shrink > 0.0 && armijo_shrink < 1.0))
    throw ValidationError("MinimizeOptions: Armijo parameters must lie in "
                          "(0,1)");
}

namespace {

// Tensor-product quadrature over the unit cell with corner weights for the
// interpolant value and its local-axis derivatives.
struct QuadRule {
  struct Pt {
    double weight;
    Vec offset;                            // local coordinates in (0,1)^d
    std::vector<double> wval;              // 2^d corner value weights
    std::vector<std::vector<double>> wder; // d x 2^d derivative weights
  };
  std::vector<Pt> pts;
  int d = 0;

  static QuadRule tensor(int d, const std::vector<double>& nodes1d,
                         const std::vector<double>& weights1d) {
    QuadRule rule;
    rule.d = d;
    const int n1 = int(nodes1d.size());
    int npts = 1;
    for (int a = 0; a < d; ++a) npts *= n1;
    const int corners = 1 << d;
    std::vector<int> digit(std::size_t(d), 0);
    for (int q = 0; q < npts; ++q) {
      Pt pt;
      pt.offset = Vec(d);
      pt.weight = 1.0;
      for (int a = 0; a < d; ++a) {
        pt.offset[a] = nodes1d[std::size_t(digit[std::size_t(a)])];
        pt.weight *= weights1d[std::size_t(digit[std::size_t(a)])];
      }
      pt.wval.assign(std::size_t(corners), 0.0);
      pt.wder.assign(std::size_t(d), std::vector<double>(std::size_t(corners), 0.0));
      for (int c = 0; c < corners; ++c) {
        double v = 1.0;
        for (int a = 0; a < d; ++a) {
          const int bit = (c >> a) & 1;
          v *= bit ? pt.offset[a] : 1.0 - pt.offset[a];
        }
        pt.wval[std::size_t(c)] = v;
        for (int a = 0; a < d; ++a) {
          const int bit = (c >> a) & 1;
          double dv = bit ? 1.0 : -1.0;
          for (int b = 0; b < d; ++b) {
            if (b == a) continue;
            const int bb = (c >> b) & 1;
            dv *= bb ? pt.offset[b] : 1.0 - pt.offset[b];
          }
          pt.wder[std::size_t(a)][std::size_t(c)] = dv;
        }
      }
      rule.pts.push_back(std::move(pt));
      for (int a = d - 1; a >= 0; --a) {
        if (++digit[std::size_t(a)] < n1) break;
        digit[std::size_t(a)] = 0;
      }
    }
    return rule;
  }

  static const QuadRule& midpoint(int d);
  static const QuadRule& gauss2(int d);
};

const QuadRule& QuadRule::midpoint(int d) {
  static std::vector<QuadRule> cache(16);
  QuadRule& r = cache[std::size_t(d)];
  if (r.d != d) r = tensor(d, {0.5}, {1.0});
  return r;
}

const QuadRule& QuadRule::gauss2(int d) {
  static std::vector<QuadRule> cache(16);
  QuadRule& r = cache[std::size_t(d)];
  if (r.d != d) {
    const double a = 0.5 - 0.5 / std::sqrt(3.0);
    const double b = 0.5 + 0.5 / std::sqrt(3.0);
    r = tensor(d, {a, b}, {0.5, 0.5});
  }
  return r;
}

struct CellWork {
  std::vector<int> cell;
  std::vector<double> corners;
  std::vector<double> grad;  // dE/d(corner)
};

// Energy of one cell under the rule; optionally accumulates the exact
// derivative with respect to the corner values.
double cell_energy(const SampledGraph& graph, const QuadRule& rule,
                   const std::vector<int>& cell,
                   const std::vector<double>& corners,
                   std::vector<double>* dcorners) {
  const int d = graph.grid.d();
  const int dh = graph.horizontal_axes();
  const int m2 = graph.vertical_axes();
  const Vec s = graph.grid.spacing();
  const double vol = graph.grid.cell_volume();
  const int nc = 1 << d;
  const GroupSpec& rs = graph.split.rotated_spec;

  double energy = 0.0;
  if (dcorners) dcorners->assign(std::size_t(nc), 0.0);

  Vec w(d), D(d), g(dh), dEdD(d);
  Mat sigma(dh, m2);
  for (const QuadRule::Pt& pt : rule.pts) {
    for (int a = 0; a < d; ++a)
      w[a] = graph.grid.lo[a] + (cell[std::size_t(a)] + pt.offset[a]) * s[a];
    double val = 0.0;
    D.setZero();
    for (int c = 0; c < nc; ++c) {
      const double phi = corners[std::size_t(c)];
      val += pt.wval[std::size_t(c)] * phi;
      for (int a = 0; a < d; ++a)
        D[a] += pt.wder[std::size_t(a)][std::size_t(c)] * phi;
    }
    for (int a = 0; a < d; ++a) D[a] /= s[a];

    Vec xw = Vec::Zero(rs.m1);
    xw.tail(dh) = w.head(dh);
    for (int i = 0; i < dh; ++i)
      for (int j = 0; j < m2; ++j) {
        const Mat& Bj = rs.B[std::size_t(j)];
        sigma(i, j) = 0.5 * Bj.row(i + 1).dot(xw) + val * Bj(i + 1, 0);
      }

    for (int i = 0; i < dh; ++i) {
      double gi = D[i];
      for (int j = 0; j < m2; ++j) gi += sigma(i, j) * D[dh + j];
      g[i] = gi;
    }
    const double root = std::sqrt(1.0 + g.squaredNorm());
    energy += pt.weight * vol * root;

    if (dcorners) {
      const double scale = pt.weight * vol / root;
      dEdD.setZero();
      double dEdval = 0.0;
      for (int i = 0; i < dh; ++i) {
        const double dgi = scale * g[i];
        dEdD[i] += dgi;
        for (int j = 0; j < m2; ++j) {
          dEdD[dh + j] += dgi * sigma(i, j);
          dEdval += dgi * D[dh + j] * rs.B[std::size_t(j)](i + 1, 0);
        }
      }
      for (int c = 0; c < nc; ++c) {
        double acc = dEdval * pt.wval[std::size_t(c)];
        for (int a = 0; a < d; ++a)
          acc += dEdD[a] * pt.wder[std::size_t(a)][std::size_t(c)] / s[a];
        (*dcorners)[std::size_t(c)] += acc;
      }
    }
  }
  return energy;
}

double total_energy(const SampledGraph& graph, const QuadRule& rule) {
  const GridBox& grid = graph.grid;
  return deterministic_sum(grid.cells(), [&](std::int64_t c) {
    std::vector<int> cell;
    grid.cell_unindex(c, cell);
    if (!grid.cell_interior(cell)) return 0.0;
    std::vector<double> corners(std::size_t(1 << grid.d()));
    std::vector<int> idx(std::size_t(grid.d()));
    for (int k = 0; k < (1 << grid.d()); ++k) {
      for (int a = 0; a < grid.d(); ++a)
        idx[std::size_t(a)] = cell[std::size_t(a)] + ((k >> a) & 1);
      corners[std::size_t(k)] = graph.values[std::size_t(grid.node_index(idx))];
    }
    return cell_energy(graph, rule, cell, corners, nullptr);
  }, 256);
}

std::vector<double> total_gradient(const SampledGraph& graph,
                                   const QuadRule& rule) {
  const GridBox& grid = graph.grid;
  const int d = grid.d();
  const int nc = 1 << d;
  const std::int64_t ncells = grid.cells();
  std::vector<double> grad(std::size_t(grid.nodes()), 0.0);

  // cells are processed in slabs of the leading cell axis so that writes to
  // shared corner nodes never race; slab boundaries are deterministic
  const int lead = grid.dims[0] - 1;
  for (int parity = 0; parity < 2; ++parity) {
    const std::int64_t per_slab = ncells / lead;
    parallel_for((lead + 1) / 2, [&](std::int64_t half) {
      const std::int64_t slab = 2 * half + parity;
      if (slab >= lead) return;
      std::vector<int> cell;
      std::vector<double> corners(std::size_t(nc));
      std::vector<double> dcorners;
      std::vector<int> idx(std::size_t(d));
      for (std::int64_t k = 0; k < per_slab; ++k) {
        const std::int64_t c = slab * per_slab + k;
        grid.cell_unindex(c, cell);
        if (!grid.cell_interior(cell)) continue;
        for (int m = 0; m < nc; ++m) {
          for (int a = 0; a < d; ++a)
            idx[std::size_t(a)] = cell[std::size_t(a)] + ((m >> a) & 1);
          corners[std::size_t(m)] =
              graph.values[std::size_t(grid.node_index(idx))];
        }
        cell_energy(graph, rule, cell, corners, &dcorners);
        for (int m = 0; m < nc; ++m) {
          for (int a = 0; a < d; ++a)
            idx[std::size_t(a)] = cell[std::size_t(a)] + ((m >> a) & 1);
          grad[std::size_t(grid.node_index(idx))] += dcorners[std::size_t(m)];
        }
      }
    });
  }
  return grad;
}

}  // namespace

double discrete_energy(const SampledGraph& graph) {
  return total_energy(graph, QuadRule::midpoint(graph.grid.d()));
}

double discrete_energy_gauss(const SampledGraph& graph) {
  return total_energy(graph, QuadRule::gauss2(graph.grid.d()));
}

std::vector<double> energy_gradient(const SampledGraph& graph) {
  return total_gradient(graph, QuadRule::midpoint(graph.grid.d()));
}

std::vector<double> energy_gradient_gauss(const SampledGraph& graph) {
  return total_gradient(graph, QuadRule::gauss2(graph.grid.d()));
}

MinimizeResult minimize(const SampledGraph& graph0,
                        const std::vector<double>& boundary,
                        const MinimizeOptions& opts) {
  opts.validate();
  if (boundary.size() != graph0.values.size())
    throw ValidationError("minimize: boundary vector size mismatch");

  MinimizeResult out;
  out.graph = graph0;
  const GridBox& grid = out.graph.grid;
  const std::int64_t n = grid.nodes();

  std::vector<char> ring(std::size_t(n), 0);
  {
    std::vector<int> idx;
    for (std::int64_t i = 0; i < n; ++i) {
      grid.node_unindex(i, idx);
      if (grid.node_on_ring(idx)) {
        ring[std::size_t(i)] = 1;
        out.graph.values[std::size_t(i)] = boundary[std::size_t(i)];
      }
    }
    for (double v : out.graph.values)
      if (!std::isfinite(v))
        throw ValidationError("minimize: non-finite value");
  }

  const QuadRule& rule = QuadRule::gauss2(grid.d());
  double energy = total_energy(out.graph, rule);
  double step = opts.step0;

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    std::vector<double> grad = total_gradient(out.graph, rule);
    double gnorm = 0.0, gsq = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      if (ring[std::size_t(i)]) {
        grad[std::size_t(i)] = 0.0;
        continue;
      }
      gnorm = std::max(gnorm, std::abs(grad[std::size_t(i)]));
      gsq += grad[std::size_t(i)] * grad[std::size_t(i)];
    }
    out.trace.push_back({iter, energy, gnorm, step});
    if (gnorm <= opts.grad_tol) {
      out.converged = true;
      return out;
    }

    SampledGraph trial = out.graph;
    bool accepted = false;
    for (int shrink = 0; shrink < 60; ++shrink) {
      for (std::int64_t i = 0; i < n; ++i)
        trial.values[std::size_t(i)] =
            out.graph.values[std::size_t(i)] - step * grad[std::size_t(i)];
      const double trial_energy = total_energy(trial, rule);
      if (trial_energy <= energy - opts.armijo_c * step * gsq) {
        out.graph.values.swap(trial.values);
        energy = trial_energy;
        step = std::min(step * 1.5, 1e6);
        accepted = true;
        break;
      }
      step *= opts.armijo_shrink;
    }
    if (!accepted) {
      std::ostringstream os;
      os << "minimize: line search failed after 60 shrinks at iter " << iter
         << " (energy " << energy << ", grad " << gnorm << ", step " << step
         << ")";
      throw InvariantViolation(os.str());
    }
  }
  // record the final state
  std::vector<double> grad = total_gradient(out.graph, rule);
  double gnorm = 0.0;
  for (std::int64_t i = 0; i < n; ++i)
    if (!ring[std::size_t(i)]) gnorm = std::max(gnorm, std::abs(grad[std::size_t(i)]));
  out.trace.push_back({opts.max_iters, energy, gnorm, step});
  out.converged = gnorm <= opts.grad_tol;
  return out;
}

ExcessReport excess_decay_report(const SampledGraph& graph, const Point& p,
                                 const std::vector<double>& radii) {
  if (radii.empty())
    throw ValidationError("excess_decay_report: need at least one radius");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1]))
      throw ValidationError("excess_decay_report: radii must increase");

  ExcessReport report;
  report.center = p;
  report.radii = radii;
  for (double r : radii) {
    report.excess_half.push_back(excess_graph(graph, p, r, ExcessForm::HalfSquare));
    report.excess_sq.push_back(excess_graph(graph, p, r, ExcessForm::OneMinusSquare));
  }
  const double Qm1 = graph.split.spec.Q - 1;
  for (std::size_t i = 0; i + 1 < radii.size(); ++i) {
    const double factor = std::pow(radii[i + 1] / radii[i], Qm1);
    for (const std::vector<double>* col : {&report.excess_half, &report.excess_sq}) {
      const double er = (*col)[i], es = (*col)[i + 1];
      if (er > factor * es + 1e-6 * (1.0 + es)) {
        std::ostringstream os;
        os << "excess_decay_report: cross-scale bound violated between r="
           << radii[i] << " and s=" << radii[i + 1] << " (" << er << " > "
           << factor * es << ")";
        throw InvariantViolation(os.str());
      }
    }
  }
  return report;
}

DiagnosticReport lipschitz_approx_diagnostic(const SampledGraph& graph,
                                             double epsilon,
                                             const std::vector<double>& radii,
                                             const Vec& candidate_lo,
                                             const Vec& candidate_hi,
                                             int stride) {
  if (radii.empty())
    throw ValidationError("lipschitz_approx_diagnostic: need radii");
  if (epsilon < 0.0)
    throw ValidationError("lipschitz_approx_diagnostic: epsilon must be >= 0");
  if (stride < 1) stride = 1;

  DiagnosticReport report;
  report.epsilon = epsilon;
  report.radii = radii;

  const GridBox& grid = graph.grid;
  const int d = grid.d();
  std::vector<int> idx;
  std::vector<std::int64_t> candidates;
  for (std::int64_t node = 0; node < grid.nodes(); ++node) {
    grid.node_unindex(node, idx);
    bool keep = !grid.node_on_ring(idx);
    for (int a = 0; a < d && keep; ++a)
      if (idx[std::size_t(a)] % stride != 0) keep = false;
    if (!keep) continue;
    const Vec w = grid.node_coord(idx);
    for (int a = 0; a < d && keep; ++a)
      if (w[a] < candidate_lo[a] || w[a] > candidate_hi[a]) keep = false;
    if (keep) candidates.push_back(node);
  }

  report.points.resize(candidates.size());
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    grid.node_unindex(candidates[k], idx);
    const Vec w = grid.node_coord(idx);
    const Point q = graph_map(graph.split, w, graph.interp(w));
    double swept = 0.0;
    for (double r : radii)
      swept = std::max(swept, excess_graph(graph, q, r, ExcessForm::HalfSquare));
    DiagnosticPoint& pt = report.points[k];
    pt.node = candidates[k];
    pt.w = w;
    pt.swept_excess = swept;
    pt.flagged = swept <= epsilon;
    if (pt.flagged) ++report.flagged;
  }

  const Point origin = Point::zero(graph.split.spec.m1, graph.split.spec.m2);
  const double rmax = radii.back();
  report.energy_lhs = dirichlet_energy_in_cylinder(graph, origin, 1.0);
  report.excess_rhs = excess_graph(graph, origin, rmax, ExcessForm::HalfSquare);
  report.ratio = report.excess_rhs > 0.0 ? report.energy_lhs / report.excess_rhs
                                          : 0.0;
  report.step3_lhs = excess_graph(graph, origin, 1.0, ExcessForm::HalfSquare);
  report.step3_rhs =
      0.5 * excess_graph(graph, origin, 1.0, ExcessForm::OneMinusSquare);
  return report;
}

}  // namespace carnot
