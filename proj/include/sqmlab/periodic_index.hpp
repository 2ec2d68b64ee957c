#pragma once

#include <vector>

#include "sqmlab/grid.hpp"

namespace sqmlab::detail {

/// Reduced index set for periodic grids: the duplicated seam node of each
/// axis is dropped so wrap-around stencils become exactly symmetric.
struct PeriodicIndex {
  int dim = 1;
  int rn[3] = {1, 1, 1};      // reduced sizes per axis
  double inv_h2[3] = {};      // 1/h^2 per axis
  std::size_t count = 1;
  std::vector<std::size_t> to_full;  // reduced flat -> full flat

  explicit PeriodicIndex(const Grid& g) : dim(g.dim()) {
    for (int a = 0; a < dim; ++a) {
      rn[a] = g.n(a) - 1;
      inv_h2[a] = 1.0 / (g.spacing(a) * g.spacing(a));
    }
    count = 1;
    for (int a = 0; a < dim; ++a) count *= static_cast<std::size_t>(rn[a]);
    to_full.resize(count);
    for (std::size_t r = 0; r < count; ++r) {
      std::size_t rem = r;
      int idx[3] = {0, 0, 0};
      for (int a = dim - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(rem % rn[a]);
        rem /= rn[a];
      }
      to_full[r] = g.flat(idx[0], dim > 1 ? idx[1] : 0, dim > 2 ? idx[2] : 0);
    }
  }

  std::size_t reduced_stride(int axis) const {
    std::size_t s = 1;
    for (int a = dim - 1; a > axis; --a) s *= static_cast<std::size_t>(rn[a]);
    return s;
  }

  template <class T>
  void gather(const std::vector<T>& full, std::vector<T>& reduced) const {
    reduced.resize(count);
    for (std::size_t r = 0; r < count; ++r) reduced[r] = full[to_full[r]];
  }

  /// Writes back into the duplicated layout, wrapping seam nodes.
  template <class T>
  void scatter(const std::vector<T>& reduced, const Grid& g, std::vector<T>& full) const {
    full.resize(g.node_count());
    for (std::size_t k = 0; k < g.node_count(); ++k) {
      int idx[3];
      g.unflatten(k, idx);
      std::size_t r = 0;
      for (int a = 0; a < dim; ++a) r = r * rn[a] + (idx[a] % rn[a]);
      full[k] = reduced[r];
    }
  }

  /// Symmetric periodic laplacian on the reduced set.
  template <class T>
  void laplacian(const std::vector<T>& in, std::vector<T>& out) const {
    out.assign(count, T{});
    for (int a = 0; a < dim; ++a) {
      const std::size_t stride = reduced_stride(a);
      const int n = rn[a];
      for (std::size_t k = 0; k < count; ++k) {
        const int i = static_cast<int>((k / stride) % static_cast<std::size_t>(n));
        const std::size_t up = (i == n - 1) ? k - (n - 1) * stride : k + stride;
        const std::size_t dn = (i == 0) ? k + (n - 1) * stride : k - stride;
        out[k] += (in[up] - 2.0 * in[k] + in[dn]) * inv_h2[a];
      }
    }
  }
};

}  // namespace sqmlab::detail
