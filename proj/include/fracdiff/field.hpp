#pragma once

#include <cmath>
#include <vector>

#include "fracdiff/errors.hpp"
#include "fracdiff/grids.hpp"

namespace fracdiff {

/// Real samples on a time grid x periodic space grid.
/// Layout: values[t * sgrid.n_total() + s] with s = ix (dim 1) or ix*n + iy (dim 2).
struct Field {
  TimeGrid tgrid;
  SpaceGrid sgrid;
  std::vector<double> values;

  Field() = default;
  Field(TimeGrid tg, SpaceGrid sg)
      : tgrid(tg), sgrid(sg), values(static_cast<size_t>(tg.n_nodes()) * sg.n_total(), 0.0) {}
  Field(TimeGrid tg, SpaceGrid sg, std::vector<double> vals)
      : tgrid(tg), sgrid(sg), values(std::move(vals)) {
    if (values.size() != static_cast<size_t>(tg.n_nodes()) * sg.n_total())
      throw GridError("Field: value count does not match grids");
  }

  long n_space() const { return sgrid.n_total(); }
  int n_time() const { return tgrid.n_nodes(); }

  double& at(int t, long s) { return values[static_cast<size_t>(t) * n_space() + s]; }
  double at(int t, long s) const { return values[static_cast<size_t>(t) * n_space() + s]; }

  double* slab(int t) { return values.data() + static_cast<size_t>(t) * n_space(); }
  const double* slab(int t) const { return values.data() + static_cast<size_t>(t) * n_space(); }

  long spatial_index(int ix, int iy = 0) const {
    return sgrid.dim == 1 ? ix : static_cast<long>(ix) * sgrid.n_points + iy;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }
};

inline bool all_finite(const Field& f) {
  for (double v : f.values)
    if (!std::isfinite(v)) return false;
  return true;
}

inline void require_finite(const Field& f, const char* who) {
  if (!all_finite(f)) throw InputDomainError(std::string(who) + ": non-finite field values");
}

inline void require_same_grids(const Field& a, const Field& b, const char* who) {
  if (a.tgrid != b.tgrid || a.sgrid != b.sgrid)
    throw GridError(std::string(who) + ": fields live on different grids");
}

/// Samples fn(t, x) (dim 1) on the grids.
template <typename F>
Field sample_field_1d(const TimeGrid& tg, const SpaceGrid& sg, F&& fn) {
  if (sg.dim != 1) throw GridError("sample_field_1d: grid is not 1-d");
  Field out(tg, sg);
  for (int j = 0; j < tg.n_nodes(); ++j)
    for (int i = 0; i < sg.n_points; ++i) out.at(j, i) = fn(tg.node(j), sg.node(i));
  return out;
}

}  // namespace fracdiff
