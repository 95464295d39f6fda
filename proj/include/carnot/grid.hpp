#pragma once

#include <cstdint>
#include <vector>

#include "carnot/errors.hpp"
#include "carnot/group.hpp"

namespace carnot {

// Rectangular node lattice over an axis-aligned box; node-major storage with
// the last axis fastest.
struct GridBox {
  Vec lo, hi;
  std::vector<int> dims;  // nodes per axis, each >= 2

  int d() const { return int(dims.size()); }

  std::int64_t nodes() const {
    std::int64_t n = 1;
    for (int k : dims) n *= k;
    return n;
  }

  std::int64_t cells() const {
    std::int64_t n = 1;
    for (int k : dims) n *= (k - 1);
    return n;
  }

  Vec spacing() const {
    Vec s(d());
    for (int a = 0; a < d(); ++a) s[a] = (hi[a] - lo[a]) / (dims[a] - 1);
    return s;
  }

  std::int64_t node_index(const std::vector<int>& idx) const {
    std::int64_t lin = 0;
    for (int a = 0; a < d(); ++a) lin = lin * dims[a] + idx[std::size_t(a)];
    return lin;
  }

  void node_unindex(std::int64_t lin, std::vector<int>& idx) const {
    idx.resize(std::size_t(d()));
    for (int a = d() - 1; a >= 0; --a) {
      idx[std::size_t(a)] = int(lin % dims[a]);
      lin /= dims[a];
    }
  }

  std::int64_t cell_index(const std::vector<int>& idx) const {
    std::int64_t lin = 0;
    for (int a = 0; a < d(); ++a) lin = lin * (dims[a] - 1) + idx[std::size_t(a)];
    return lin;
  }

  void cell_unindex(std::int64_t lin, std::vector<int>& idx) const {
    idx.resize(std::size_t(d()));
    for (int a = d() - 1; a >= 0; --a) {
      idx[std::size_t(a)] = int(lin % (dims[a] - 1));
      lin /= (dims[a] - 1);
    }
  }

  Vec node_coord(const std::vector<int>& idx) const {
    Vec w(d());
    const Vec s = spacing();
    for (int a = 0; a < d(); ++a) w[a] = lo[a] + idx[std::size_t(a)] * s[a];
    return w;
  }

  bool node_on_ring(const std::vector<int>& idx) const {
    for (int a = 0; a < d(); ++a)
      if (idx[std::size_t(a)] == 0 || idx[std::size_t(a)] == dims[a] - 1)
        return true;
    return false;
  }

  // interior cells: all 2^d corner nodes off the boundary ring
  bool cell_interior(const std::vector<int>& idx) const {
    for (int a = 0; a < d(); ++a)
      if (idx[std::size_t(a)] < 1 || idx[std::size_t(a)] > dims[a] - 3)
        return false;
    return true;
  }

  double cell_volume() const {
    const Vec s = spacing();
    double v = 1.0;
    for (int a = 0; a < d(); ++a) v *= s[a];
    return v;
  }

  void validate() const {
    if (lo.size() != hi.size() || int(dims.size()) != lo.size())
      throw ValidationError("GridBox: inconsistent dimensions");
    for (int a = 0; a < d(); ++a) {
      if (!(hi[a] > lo[a])) throw ValidationError("GridBox: empty box axis");
      if (dims[std::size_t(a)] < 2)
        throw ValidationError("GridBox: need at least 2 nodes per axis");
    }
  }
};

// Multilinear interpolation of node values; throws CoverageError outside the
// box (with the offending axis).
double grid_interpolate(const GridBox& box, const std::vector<double>& values,
                        const Vec& w);

}  // namespace carnot
