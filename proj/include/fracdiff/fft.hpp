#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "fracdiff/grids.hpp"

namespace fracdiff {

/// Complex DFT on the nodes of a SpaceGrid (1-d or 2-d), unnormalized FFTW
/// conventions: forward applies e^{-2 pi i jk/n}, inverse e^{+2 pi i jk/n}.
/// Plans are created once at construction; execution on caller-provided
/// buffers is safe from multiple threads.
class Dft {
 public:
  explicit Dft(const SpaceGrid& grid);
  ~Dft();
  Dft(const Dft&) = delete;
  Dft& operator=(const Dft&) = delete;

  void forward(std::complex<double>* data) const;
  void inverse(std::complex<double>* data) const;
  long size() const { return n_total_; }

 private:
  struct Plans;
  std::unique_ptr<Plans> plans_;
  long n_total_;
};

/// Forward transform of a real slab into mode coefficients that approximate
/// the continuum transform: out_k = sum_j f(x_j) e^{-i xi_k x_j} dx^d.
void slab_to_modes(const Dft& dft, const SpaceGrid& grid, const double* slab,
                   std::complex<double>* modes);

/// Inverse of slab_to_modes; writes the real part into slab and returns the
/// largest |imaginary residue| encountered.
double modes_to_slab(const Dft& dft, const SpaceGrid& grid, std::complex<double>* modes,
                     double* slab);

}  // namespace fracdiff
