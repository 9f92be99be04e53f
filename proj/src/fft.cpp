#include "fracdiff/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace fracdiff {

namespace {
// FFTW plan creation is not thread-safe; execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct Dft::Plans {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
  ~Plans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (inverse) fftw_destroy_plan(inverse);
  }
};

Dft::Dft(const SpaceGrid& grid) : plans_(std::make_unique<Plans>()), n_total_(grid.n_total()) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  std::vector<std::complex<double>> scratch(n_total_);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  if (grid.dim == 1) {
    plans_->forward = fftw_plan_dft_1d(grid.n_points, buf, buf, FFTW_FORWARD, flags);
    plans_->inverse = fftw_plan_dft_1d(grid.n_points, buf, buf, FFTW_BACKWARD, flags);
  } else {
    plans_->forward =
        fftw_plan_dft_2d(grid.n_points, grid.n_points, buf, buf, FFTW_FORWARD, flags);
    plans_->inverse =
        fftw_plan_dft_2d(grid.n_points, grid.n_points, buf, buf, FFTW_BACKWARD, flags);
  }
}

Dft::~Dft() = default;

void Dft::forward(std::complex<double>* data) const {
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plans_->forward, buf, buf);
}

void Dft::inverse(std::complex<double>* data) const {
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plans_->inverse, buf, buf);
}

void slab_to_modes(const Dft& dft, const SpaceGrid& grid, const double* slab,
                   std::complex<double>* modes) {
  const long n_total = grid.n_total();
  for (long s = 0; s < n_total; ++s) modes[s] = slab[s];
  dft.forward(modes);
  // Nodes start at -L/2, which shifts mode k by (-1)^k per axis.
  const double scale = grid.cell_volume();
  const int n = grid.n_points;
  if (grid.dim == 1) {
    for (int k = 0; k < n; ++k) modes[k] *= (k % 2 ? -scale : scale);
  } else {
    for (int kx = 0; kx < n; ++kx)
      for (int ky = 0; ky < n; ++ky)
        modes[static_cast<long>(kx) * n + ky] *= ((kx + ky) % 2 ? -scale : scale);
  }
}

double modes_to_slab(const Dft& dft, const SpaceGrid& grid, std::complex<double>* modes,
                     double* slab) {
  const int n = grid.n_points;
  const double scale = 1.0 / (grid.dim == 1 ? grid.box_length : grid.box_length * grid.box_length);
  if (grid.dim == 1) {
    for (int k = 0; k < n; ++k) modes[k] *= (k % 2 ? -scale : scale);
  } else {
    for (int kx = 0; kx < n; ++kx)
      for (int ky = 0; ky < n; ++ky)
        modes[static_cast<long>(kx) * n + ky] *= ((kx + ky) % 2 ? -scale : scale);
  }
  dft.inverse(modes);
  double residue = 0.0;
  const long n_total = grid.n_total();
  for (long s = 0; s < n_total; ++s) {
    slab[s] = modes[s].real();
    residue = std::max(residue, std::abs(modes[s].imag()));
  }
  return residue;
}

}  // namespace fracdiff
