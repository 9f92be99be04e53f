#include "fracdiff/random_field.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "fracdiff/errors.hpp"

namespace fracdiff {

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// sin^4 taper: vanishes at both ends, flat first derivative at t = 0,
// spectral footprint of two harmonics.
double window4(double s) {
  const double w = std::sin(M_PI * s);
  return w * w * w * w;
}

}  // namespace

int cutoff_index(const EnsembleSpec& spec, const SpaceGrid& grid) {
  const int nyquist = grid.n_points / 2;
  return std::max(1, std::min(nyquist - 3, static_cast<int>(spec.cutoff_fraction * nyquist)));
}

Field random_field(const EnsembleSpec& spec, const TimeGrid& tgrid, const SpaceGrid& sgrid,
                   int member) {
  if (member < 0) throw ParameterError("random_field: member must be nonnegative");
  std::mt19937_64 rng(splitmix64(spec.seed ^ (0x5bf03ull + static_cast<uint64_t>(member))));
  std::normal_distribution<double> gauss;
  const int k_cut = cutoff_index(spec, sgrid);
  const int m_modes = std::max(1, spec.n_time_modes);
  const int n_time = tgrid.n_nodes();
  const double t_end = tgrid.t_end;

  // temporal envelope coefficients per spatial mode pair
  auto draw_envelope = [&]() {
    std::vector<double> coeffs(2 * m_modes);
    for (auto& c : coeffs) c = gauss(rng) / std::sqrt(static_cast<double>(m_modes));
    return coeffs;
  };
  auto envelope_at = [&](const std::vector<double>& c, double t) {
    double acc = 0.0;
    for (int m = 0; m < m_modes; ++m) {
      const double phase = M_PI * m * t / t_end;
      acc += c[2 * m] * std::cos(phase) + c[2 * m + 1] * std::sin(phase);
    }
    return acc;
  };

  Field f(tgrid, sgrid);
  const int n = sgrid.n_points;
  if (sgrid.dim == 1) {
    for (int k = 0; k <= k_cut; ++k) {
      const auto ca = draw_envelope();
      const auto cb = draw_envelope();
      const double xi = 2.0 * M_PI * k / sgrid.box_length;
      for (int j = 0; j < n_time; ++j) {
        const double t = tgrid.node(j);
        const double ea = envelope_at(ca, t);
        const double eb = k == 0 ? 0.0 : envelope_at(cb, t);
        for (int i = 0; i < n; ++i) {
          const double x = sgrid.node(i);
          f.at(j, i) += ea * std::cos(xi * x) + eb * std::sin(xi * x);
        }
      }
    }
  } else {
    for (int kx = 0; kx <= k_cut; ++kx) {
      for (int ky = 0; ky <= k_cut; ++ky) {
        const double xix = 2.0 * M_PI * kx / sgrid.box_length;
        const double xiy = 2.0 * M_PI * ky / sgrid.box_length;
        const auto cc = draw_envelope();
        const auto cs = draw_envelope();
        const auto sc = draw_envelope();
        const auto ss = draw_envelope();
        for (int j = 0; j < n_time; ++j) {
          const double t = tgrid.node(j);
          const double ecc = envelope_at(cc, t);
          const double ecs = ky == 0 ? 0.0 : envelope_at(cs, t);
          const double esc = kx == 0 ? 0.0 : envelope_at(sc, t);
          const double ess = (kx == 0 || ky == 0) ? 0.0 : envelope_at(ss, t);
          for (int ix = 0; ix < n; ++ix) {
            const double cx = std::cos(xix * sgrid.node(ix));
            const double sx = std::sin(xix * sgrid.node(ix));
            for (int iy = 0; iy < n; ++iy) {
              const double cy = std::cos(xiy * sgrid.node(iy));
              const double sy = std::sin(xiy * sgrid.node(iy));
              f.at(j, f.spatial_index(ix, iy)) +=
                  ecc * cx * cy + ecs * cx * sy + esc * sx * cy + ess * sx * sy;
            }
          }
        }
      }
    }
  }

  // time and space tapers: compact interior support up to point zeros
  for (int j = 0; j < n_time; ++j) {
    const double wt = window4(tgrid.node(j) / t_end);
    for (long s = 0; s < f.n_space(); ++s) {
      double wx;
      if (sgrid.dim == 1) {
        wx = window4((sgrid.node(static_cast<int>(s)) + 0.5 * sgrid.box_length) /
                     sgrid.box_length);
      } else {
        const int ix = static_cast<int>(s / n);
        const int iy = static_cast<int>(s % n);
        wx = window4((sgrid.node(ix) + 0.5 * sgrid.box_length) / sgrid.box_length) *
             window4((sgrid.node(iy) + 0.5 * sgrid.box_length) / sgrid.box_length);
      }
      f.at(j, s) *= wt * wx;
    }
  }

  double rms = 0.0;
  for (double v : f.values) rms += v * v;
  rms = std::sqrt(rms / static_cast<double>(f.values.size()));
  if (rms > 0.0) {
    const double scale = spec.amplitude / rms;
    for (auto& v : f.values) v *= scale;
  }
  return f;
}

}  // namespace fracdiff
