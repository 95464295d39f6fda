#include "carnot/graphs.hpp"

#include <atomic>
#include <cmath>
#include <sstream>

#include "carnot/parallel.hpp"

namespace carnot {

double SampledGraph::fd_step() const {
  const Vec s = grid.spacing();
  double m = s[0];
  for (int a = 1; a < horizontal_axes(); ++a) m = std::min(m, s[a]);
  return 0.5 * m;
}

SampledGraph make_graph(const Splitting& split, const GridBox& grid,
                        std::vector<double> values) {
  grid.validate();
  if (grid.d() != split.wdim())
    throw ValidationError("make_graph: grid dimension does not match W");
  if (std::int64_t(values.size()) != grid.nodes())
    throw ValidationError("make_graph: value count does not match grid");
  for (double v : values)
    if (!std::isfinite(v))
      throw ValidationError("make_graph: non-finite node value");
  SampledGraph g{split, grid, std::move(values)};
  return g;
}

SampledGraph make_graph(const Splitting& split, const GridBox& grid,
                        const std::function<double(const Vec&)>& f) {
  std::vector<double> values(std::size_t(grid.nodes()));
  std::vector<int> idx;
  for (std::int64_t n = 0; n < grid.nodes(); ++n) {
    grid.node_unindex(n, idx);
    values[std::size_t(n)] = f(grid.node_coord(idx));
  }
  return make_graph(split, grid, std::move(values));
}

SampledGraph graph_from_extension(const ExtensionField& field) {
  return make_graph(field.split, field.grid, field.psi);
}

Vec flow_drift(const SampledGraph& graph, int i, const Vec& w, double phi) {
  const GroupSpec& rs = graph.split.rotated_spec;
  const int m1 = rs.m1;
  Vec xw = Vec::Zero(m1);
  xw.tail(m1 - 1) = w.head(m1 - 1);
  Vec sigma(rs.m2);
  for (int j = 0; j < rs.m2; ++j) {
    const Mat& Bj = rs.B[std::size_t(j)];
    sigma[j] = 0.5 * Bj.row(i + 1).dot(xw) + phi * Bj(i + 1, 0);
  }
  return sigma;
}

Vec phi_gradient_fd(const SampledGraph& graph, const Vec& w, double h) {
  if (!(h > 0.0)) throw ValidationError("phi_gradient_fd: h must be positive");
  const Splitting& split = graph.split;
  const int m1 = split.spec.m1;
  const double phi = graph.interp(w);
  const Point P = graph_map(split, w, phi);
  Vec g(m1 - 1);
  for (int i = 0; i < m1 - 1; ++i) {
    Point step;
    step.x = split.M.transpose() * (h * Vec::Unit(m1, i + 1));
    step.t = Vec::Zero(split.spec.m2);
    double side[2];
    for (int sgn = 0; sgn < 2; ++sgn) {
      const Point q = multiply(split.spec, P, sgn ? inverse(step) : step);
      const Vec wq = split.w_coords(split.to_rotated(project_W(split, q)));
      try {
        side[sgn] = graph.interp(wq);
      } catch (const CoverageError& e) {
        std::ostringstream os;
        os << "phi_gradient_fd: X_" << (i + 2) << " flow neighbor ("
           << (sgn ? "-" : "+") << "h) escapes the box: " << e.what();
        throw CoverageError(os.str());
      }
    }
    g[i] = (side[0] - side[1]) / (2.0 * h);
  }
  return g;
}

Vec phi_gradient_closed(const SampledGraph& graph, const Vec& w) {
  const int d = graph.grid.d();
  const int m1 = graph.split.spec.m1;
  const int m2 = graph.split.spec.m2;
  const Vec s = graph.grid.spacing();
  Vec D(d);
  for (int a = 0; a < d; ++a) {
    Vec wp = w, wm = w;
    wp[a] += 0.5 * s[a];
    wm[a] -= 0.5 * s[a];
    try {
      D[a] = (graph.interp(wp) - graph.interp(wm)) / s[a];
    } catch (const CoverageError& e) {
      std::ostringstream os;
      os << "phi_gradient_closed: axis " << a
         << " half-step neighbor escapes the box: " << e.what();
      throw CoverageError(os.str());
    }
  }
  const double phi = graph.interp(w);
  Vec g(m1 - 1);
  for (int i = 0; i < m1 - 1; ++i) {
    const Vec sigma = flow_drift(graph, i, w, phi);
    double gi = D[i];
    for (int j = 0; j < m2; ++j) gi += sigma[j] * D[m1 - 1 + j];
    g[i] = gi;
  }
  return g;
}

Vec normal(const SampledGraph& graph, const Vec& w) {
  const Vec g = phi_gradient_fd(graph, w, graph.fd_step());
  const double den = std::sqrt(1.0 + g.squaredNorm());
  Vec n(graph.split.spec.m1);
  n[0] = 1.0 / den;
  n.tail(graph.split.spec.m1 - 1) = -g / den;
  return n;
}

// ---------------------------------------------------------------------------
// Cell quadrature

namespace {

// corner values of a cell, bit c has axis-a offset (c >> a) & 1
void gather_corners(const SampledGraph& graph, const std::vector<int>& cell,
                    std::vector<double>& corners) {
  const int d = graph.grid.d();
  const int n = 1 << d;
  corners.resize(std::size_t(n));
  std::vector<int> idx(std::size_t(d));
  for (int c = 0; c < n; ++c) {
    for (int a = 0; a < d; ++a)
      idx[std::size_t(a)] = cell[std::size_t(a)] + ((c >> a) & 1);
    corners[std::size_t(c)] = graph.values[std::size_t(graph.grid.node_index(idx))];
  }
}

Vec cell_center(const SampledGraph& graph, const std::vector<int>& cell) {
  const int d = graph.grid.d();
  const Vec s = graph.grid.spacing();
  Vec w(d);
  for (int a = 0; a < d; ++a)
    w[a] = graph.grid.lo[a] + (cell[std::size_t(a)] + 0.5) * s[a];
  return w;
}

// gradient at the cell center from the corner stencil; identical to
// phi_gradient_closed evaluated at the center, but without re-locating cells
Vec center_gradient_closed(const SampledGraph& graph,
                           const std::vector<double>& corners, const Vec& w,
                           double* phi_out) {
  const int d = graph.grid.d();
  const int m1 = graph.split.spec.m1;
  const int m2 = graph.split.spec.m2;
  const Vec s = graph.grid.spacing();
  const int n = 1 << d;
  double mean = 0.0;
  for (double v : corners) mean += v;
  mean /= n;
  Vec D = Vec::Zero(d);
  for (int c = 0; c < n; ++c)
    for (int a = 0; a < d; ++a)
      D[a] += (((c >> a) & 1) ? 1.0 : -1.0) * corners[std::size_t(c)];
  for (int a = 0; a < d; ++a) D[a] /= (n / 2) * s[a];
  if (phi_out) *phi_out = mean;
  Vec g(m1 - 1);
  for (int i = 0; i < m1 - 1; ++i) {
    const Vec sigma = flow_drift(graph, i, w, mean);
    double gi = D[i];
    for (int j = 0; j < m2; ++j) gi += sigma[j] * D[m1 - 1 + j];
    g[i] = gi;
  }
  return g;
}

}  // namespace

double area(const SampledGraph& graph, const Vec& region_lo,
            const Vec& region_hi) {
  const GridBox& grid = graph.grid;
  const int d = grid.d();
  if (region_lo.size() != d || region_hi.size() != d)
    throw ValidationError("area: region dimension mismatch");
  for (int a = 0; a < d; ++a)
    if (region_lo[a] < grid.lo[a] - 1e-12 || region_hi[a] > grid.hi[a] + 1e-12)
      throw ValidationError("area: region escapes the graph box");

  const double vol = grid.cell_volume();
  return deterministic_sum(grid.cells(), [&](std::int64_t c) {
    std::vector<int> cell;
    grid.cell_unindex(c, cell);
    if (!grid.cell_interior(cell)) return 0.0;
    const Vec w = cell_center(graph, cell);
    for (int a = 0; a < d; ++a)
      if (w[a] < region_lo[a] || w[a] > region_hi[a]) return 0.0;
    std::vector<double> corners;
    gather_corners(graph, cell, corners);
    const Vec g = center_gradient_closed(graph, corners, w, nullptr);
    return vol * std::sqrt(1.0 + g.squaredNorm());
  });
}

namespace {

struct ExcessAccum {
  double half = 0.0;
  double sq = 0.0;
  double wsum = 0.0;       // Lebesgue measure of the member cells
  double area_cl = 0.0;    // closed-path area over the member cells
  double dirichlet = 0.0;  // integral of |grad|^2 over the member cells
  double max_abs_phi = 0.0;
};

// Cells whose center could possibly satisfy Phi(center) in C_r(p): the
// sandwich C_r(p) subset B_2r(p) bounds the rotated horizontal coordinates
// by |w_x - x'(p)| < 2r and the vertical ones through the bracket bound.
struct CellRange {
  std::vector<int> lo, hi;  // inclusive cell-index ranges per axis
  std::int64_t count = 1;
};

CellRange membership_cell_range(const SampledGraph& graph, const Point& p,
                                double r) {
  const GridBox& grid = graph.grid;
  const Splitting& split = graph.split;
  const GroupSpec& rs = split.rotated_spec;
  const int d = grid.d();
  const int dh = graph.horizontal_axes();
  const Vec s = grid.spacing();
  const Point prot = split.to_rotated(p);

  double phi_max = 0.0;
  for (double v : graph.values) phi_max = std::max(phi_max, std::abs(v));
  double x_max = 0.0;  // max |x_w| over the box
  {
    double acc = 0.0;
    for (int a = 0; a < dh; ++a) {
      const double m = std::max(std::abs(grid.lo[a]), std::abs(grid.hi[a]));
      acc += m * m;
    }
    x_max = std::sqrt(acc);
  }
  const double C = rs.bound_C;
  const double e2 = rs.eps2;
  const double rx = 2.0 * r;
  const double rt = (2.0 * r / e2) * (2.0 * r / e2) +
                    C * r * prot.x.norm() + 0.5 * C * phi_max * x_max;

  CellRange out;
  out.lo.resize(std::size_t(d));
  out.hi.resize(std::size_t(d));
  for (int a = 0; a < d; ++a) {
    const double center = a < dh ? prot.x[a + 1] : prot.t[a - dh];
    const double radius = a < dh ? rx : rt;
    // cell index of center coordinate c: ((c - lo)/s) - 0.5, widened by one
    double u_lo = (center - radius - grid.lo[a]) / s[a] - 0.5 - 1.0;
    double u_hi = (center + radius - grid.lo[a]) / s[a] - 0.5 + 1.0;
    int clo = int(std::floor(u_lo));
    int chi = int(std::ceil(u_hi));
    clo = std::max(0, std::min(clo, grid.dims[std::size_t(a)] - 2));
    chi = std::max(0, std::min(chi, grid.dims[std::size_t(a)] - 2));
    out.lo[std::size_t(a)] = clo;
    out.hi[std::size_t(a)] = chi;
    out.count *= (chi - clo + 1);
  }
  return out;
}

// Shared membership + integrand sweep for the excess quadratures.
ExcessAccum excess_sweep(const SampledGraph& graph, const Point& p, double r,
                         bool need_closed) {
  const GridBox& grid = graph.grid;
  const Splitting& split = graph.split;
  const double vol = grid.cell_volume();
  const double h = graph.fd_step();
  const Point pinv = inverse(p);
  const int d = grid.d();
  const CellRange range = membership_cell_range(graph, p, r);
  const std::int64_t ncells = range.count;

  auto range_cell = [&](std::int64_t lin, std::vector<int>& cell) {
    cell.resize(std::size_t(d));
    for (int a = d - 1; a >= 0; --a) {
      const int width = range.hi[std::size_t(a)] - range.lo[std::size_t(a)] + 1;
      cell[std::size_t(a)] = range.lo[std::size_t(a)] + int(lin % width);
      lin /= width;
    }
  };

  struct CellOut {
    double half = 0.0, sq = 0.0, w = 0.0, acl = 0.0, dir = 0.0, maxphi = 0.0;
    bool coverage_fail = false;
  };
  std::vector<CellOut> chunk_out;
  const std::int64_t chunk = 512;
  const std::int64_t nchunks = (ncells + chunk - 1) / chunk;
  chunk_out.assign(std::size_t(nchunks), CellOut{});

  std::atomic<bool> escaped{false};
  std::string escape_msg;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::int64_t ci = 0; ci < nchunks; ++ci) {
    CellOut acc;
    std::vector<int> cell;
    std::vector<double> corners;
    const std::int64_t lo = ci * chunk;
    const std::int64_t hi = std::min(ncells, lo + chunk);
    for (std::int64_t c = lo; c < hi; ++c) {
      range_cell(c, cell);
      const Vec w = cell_center(graph, cell);
      gather_corners(graph, cell, corners);
      double mean = 0.0;
      for (double v : corners) mean += v;
      mean /= double(corners.size());
      const Point phi_pt = graph_map(split, w, mean);
      const double cn = cyl_norm(split, multiply(split.spec, pinv, phi_pt));
      if (!(cn < r)) continue;
      if (!grid.cell_interior(cell)) {
        acc.coverage_fail = true;
        continue;
      }
      acc.w += vol;
      acc.maxphi = std::max(acc.maxphi, std::abs(mean));
      try {
        const Vec g = phi_gradient_fd(graph, w, h);
        const double len = std::sqrt(1.0 + g.squaredNorm());
        const double ne1 = 1.0 / len;
        acc.half += vol * (1.0 - ne1) * len;
        acc.sq += vol * (1.0 - ne1 * ne1) * len;
        acc.dir += vol * g.squaredNorm();
        if (need_closed) {
          const Vec gcl = center_gradient_closed(graph, corners, w, nullptr);
          acc.acl += vol * std::sqrt(1.0 + gcl.squaredNorm());
        }
      } catch (const CoverageError& e) {
        acc.coverage_fail = true;
        if (!escaped.exchange(true)) escape_msg = e.what();
      }
    }
    chunk_out[std::size_t(ci)] = acc;
  }

  ExcessAccum out;
  bool fail = false;
  for (const CellOut& acc : chunk_out) {
    out.half += acc.half;
    out.sq += acc.sq;
    out.wsum += acc.w;
    out.area_cl += acc.acl;
    out.dirichlet += acc.dir;
    out.max_abs_phi = std::max(out.max_abs_phi, acc.maxphi);
    fail = fail || acc.coverage_fail;
  }
  if (fail) {
    std::ostringstream os;
    os << "excess: graph does not cover the cylinder shadow (center offset, "
          "r=" << r << ")";
    if (!escape_msg.empty()) os << ": " << escape_msg;
    throw CoverageError(os.str());
  }
  return out;
}

}  // namespace

double excess_graph(const SampledGraph& graph, const Point& p, double r,
                    ExcessForm form) {
  if (!(r > 0.0)) throw ValidationError("excess_graph: r must be positive");
  const ExcessAccum acc = excess_sweep(graph, p, r, false);
  const double scale = std::pow(r, 1 - graph.split.spec.Q);
  return scale * (form == ExcessForm::HalfSquare ? acc.half : acc.sq);
}

std::pair<double, double> excess_measure_check(const SampledGraph& graph) {
  const Point origin = Point::zero(graph.split.spec.m1, graph.split.spec.m2);
  const ExcessAccum acc = excess_sweep(graph, origin, 1.0, true);
  if (!(acc.max_abs_phi < 1.0))
    throw CoverageError("excess_measure_check: sup|phi| must stay below 1 on "
                        "the C_1 shadow");
  const double lhs = acc.area_cl - acc.wsum;
  const double rhs = acc.half;
  return {lhs, rhs};
}

double dirichlet_energy_in_cylinder(const SampledGraph& graph, const Point& p,
                                    double r) {
  if (!(r > 0.0))
    throw ValidationError("dirichlet_energy_in_cylinder: r must be positive");
  return excess_sweep(graph, p, r, false).dirichlet;
}

SampledGraph dilate_graph(const SampledGraph& graph, double lambda) {
  if (!(lambda > 0.0))
    throw ValidationError("dilate_graph: lambda must be positive");
  SampledGraph out = graph;
  const int hx = graph.horizontal_axes();
  for (int a = 0; a < graph.grid.d(); ++a) {
    const double f = a < hx ? lambda : lambda * lambda;
    out.grid.lo[a] = graph.grid.lo[a] * f;
    out.grid.hi[a] = graph.grid.hi[a] * f;
  }
  for (double& v : out.values) v *= lambda;
  return out;
}

}  // namespace carnot
