#pragma once

#include <cstdint>

#include "fracdiff/field.hpp"

namespace fracdiff {

/// Band-limited random source ensemble. Members are smooth in space (spectral
/// support within cutoff_index + 2 modes per axis after windowing) and vanish
/// at t = 0 together with their first time derivative.
struct EnsembleSpec {
  int count = 50;
  uint64_t seed = 2026;
  double cutoff_fraction = 0.25;  // fraction of the spatial Nyquist index
  int n_time_modes = 4;           // temporal envelope smoothness
  double amplitude = 1.0;         // target RMS
};

/// Spatial band edge of the raw noise (before the +2-mode window widening).
int cutoff_index(const EnsembleSpec& spec, const SpaceGrid& grid);

/// Deterministic in (spec.seed, member); bitwise reproducible.
Field random_field(const EnsembleSpec& spec, const TimeGrid& tgrid, const SpaceGrid& sgrid,
                   int member);

}  // namespace fracdiff
