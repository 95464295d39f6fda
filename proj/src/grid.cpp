#include "carnot/grid.hpp"

#include <cmath>
#include <sstream>

namespace carnot {

double grid_interpolate(const GridBox& box, const std::vector<double>& values,
                        const Vec& w) {
  const int d = box.d();
  const Vec s = box.spacing();
  std::vector<int> cell(std::size_t(d));
  std::vector<double> frac(std::size_t(d));
  for (int a = 0; a < d; ++a) {
    const double u = (w[a] - box.lo[a]) / s[a];
    if (u < -1e-12 || u > box.dims[std::size_t(a)] - 1 + 1e-12) {
      std::ostringstream os;
      os << "evaluation point escapes the box along axis " << a << " (coord "
         << w[a] << " not in [" << box.lo[a] << "," << box.hi[a] << "])";
      throw CoverageError(os.str());
    }
    int c = int(std::floor(u));
    c = std::max(0, std::min(c, box.dims[std::size_t(a)] - 2));
    cell[std::size_t(a)] = c;
    frac[std::size_t(a)] = u - c;
  }
  const int corners = 1 << d;
  double acc = 0.0;
  std::vector<int> idx(std::size_t(d));
  for (int m = 0; m < corners; ++m) {
    double wgt = 1.0;
    for (int a = 0; a < d; ++a) {
      const int bit = (m >> a) & 1;
      idx[std::size_t(a)] = cell[std::size_t(a)] + bit;
      wgt *= bit ? frac[std::size_t(a)] : 1.0 - frac[std::size_t(a)];
    }
    if (wgt != 0.0) acc += wgt * values[std::size_t(box.node_index(idx))];
  }
  return acc;
}

}  // namespace carnot
