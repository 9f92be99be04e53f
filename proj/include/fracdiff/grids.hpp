#pragma once

#include <cmath>
#include <string>

#include "fracdiff/errors.hpp"

namespace fracdiff {

/// Uniform time grid on [0, t_end] with nodes t_j = j * dt, j = 0..n_steps.
struct TimeGrid {
  double t_end = 1.0;
  int n_steps = 2;

  TimeGrid() = default;
  TimeGrid(double t_end_, int n_steps_) : t_end(t_end_), n_steps(n_steps_) {
    if (!(t_end > 0.0) || !std::isfinite(t_end))
      throw ParameterError("TimeGrid: t_end must be positive, got " + std::to_string(t_end));
    if (n_steps < 2)
      throw ParameterError("TimeGrid: n_steps must be >= 2, got " + std::to_string(n_steps));
  }

  double dt() const { return t_end / n_steps; }
  double node(int j) const { return j * dt(); }
  int n_nodes() const { return n_steps + 1; }

  bool operator==(const TimeGrid& o) const { return t_end == o.t_end && n_steps == o.n_steps; }
  bool operator!=(const TimeGrid& o) const { return !(*this == o); }
};

/// Periodic box [-L/2, L/2)^dim sampled with n_points nodes per axis.
/// Frequencies follow the standard DFT layout; freq(i) returns the signed
/// dual node 2*pi*k/L with k in [-n/2, n/2].
struct SpaceGrid {
  int dim = 1;
  double box_length = 1.0;
  int n_points = 8;

  SpaceGrid() = default;
  SpaceGrid(int dim_, double box_length_, int n_points_)
      : dim(dim_), box_length(box_length_), n_points(n_points_) {
    if (dim != 1 && dim != 2)
      throw ParameterError("SpaceGrid: dim must be 1 or 2, got " + std::to_string(dim));
    if (!(box_length > 0.0) || !std::isfinite(box_length))
      throw ParameterError("SpaceGrid: box_length must be positive");
    if (n_points < 8 || n_points % 2 != 0)
      throw ParameterError("SpaceGrid: n_points must be even and >= 8, got " +
                           std::to_string(n_points));
  }

  double dx() const { return box_length / n_points; }
  double node(int i) const { return -0.5 * box_length + i * dx(); }
  double freq(int i) const {
    const int k = (i <= n_points / 2) ? i : i - n_points;
    return 2.0 * M_PI * k / box_length;
  }
  long n_total() const {
    return dim == 1 ? n_points : static_cast<long>(n_points) * n_points;
  }
  double cell_volume() const { return dim == 1 ? dx() : dx() * dx(); }

  bool operator==(const SpaceGrid& o) const {
    return dim == o.dim && box_length == o.box_length && n_points == o.n_points;
  }
  bool operator!=(const SpaceGrid& o) const { return !(*this == o); }
};

}  // namespace fracdiff
