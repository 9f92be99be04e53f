#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "fracdiff/errors.hpp"
#include "fracdiff/grids.hpp"

namespace fracdiff {

/// One value per time-grid node.
template <typename T>
struct BasicTimeSeries {
  TimeGrid grid;
  std::vector<T> values;

  BasicTimeSeries() = default;
  BasicTimeSeries(TimeGrid grid_, std::vector<T> values_)
      : grid(grid_), values(std::move(values_)) {
    if (static_cast<int>(values.size()) != grid.n_nodes())
      throw GridError("TimeSeries: expected " + std::to_string(grid.n_nodes()) +
                      " values, got " + std::to_string(values.size()));
  }
  explicit BasicTimeSeries(TimeGrid grid_) : grid(grid_), values(grid_.n_nodes(), T{}) {}

  int size() const { return static_cast<int>(values.size()); }
  T& operator[](int j) { return values[j]; }
  const T& operator[](int j) const { return values[j]; }
};

using TimeSeries = BasicTimeSeries<double>;
using ComplexTimeSeries = BasicTimeSeries<std::complex<double>>;

inline bool all_finite(const TimeSeries& s) {
  for (double v : s.values)
    if (!std::isfinite(v)) return false;
  return true;
}

inline bool all_finite(const ComplexTimeSeries& s) {
  for (const auto& v : s.values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

inline void require_finite(const TimeSeries& s, const char* who) {
  if (!all_finite(s)) throw InputDomainError(std::string(who) + ": non-finite input values");
}

inline void require_finite(const ComplexTimeSeries& s, const char* who) {
  if (!all_finite(s)) throw InputDomainError(std::string(who) + ": non-finite input values");
}

/// Samples fn(t_j) on the grid.
template <typename F>
TimeSeries sample_time_series(const TimeGrid& grid, F&& fn) {
  TimeSeries out(grid);
  for (int j = 0; j < grid.n_nodes(); ++j) out[j] = fn(grid.node(j));
  return out;
}

}  // namespace fracdiff
