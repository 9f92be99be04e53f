#pragma once

#include <optional>

#include "fracdiff/field.hpp"
#include "fracdiff/time_series.hpp"

namespace fracdiff {

struct SolverOptions {
  /// Upgrade the product rule from midpoint to piecewise-linear density
  /// (one extra Mittag-Leffler moment per lag).
  bool piecewise_linear = false;
  int n_threads = 0;  // 0 = hardware concurrency
};

/// Per-mode record of a spectral solve.
struct ModeSolution {
  double lambda = 0.0;
  ComplexTimeSeries fhat;
  ComplexTimeSeries uhat;  // uhat[0] == 0 exactly
};

/// Duhamel convolution for a single mode: solves d^a u + lambda u = f with
/// zero initial data through the integrated kernel K(tau) = tau^a
/// E_{a,a+1}(-lambda tau^a); exact for piecewise-constant f.
ComplexTimeSeries solve_mode(double lambda, const ComplexTimeSeries& fhat, double alpha,
                             const SolverOptions& options = {});

/// Solves d^a_t u = Lap u + f with zero initial data on the periodic box.
/// u(0,.) is exactly zero; f(0,.) need not vanish.
Field solve(const Field& f, double alpha, const SolverOptions& options = {});

/// Convolution against the response kernel (k = 0), its gradient component i
/// (k = 1) or hessian component (i,j) (k = 2), with time lags truncated to
/// (0, lag_window). With lag_window = t_end, k = 2 coincides with the second
/// derivatives of solve(f).
Field apply_L(int k, const Field& f, double alpha, double lag_window,
              std::optional<std::pair<int, int>> indices = std::nullopt,
              const SolverOptions& options = {});

struct CheckReport {
  double equation_residual = 0.0;   // max |d^a u - Lap u - f| / max |f|
  double weak_form_residual = 0.0;  // max_t |(u,phi) - I^a (f,phi)| / max_t |(f,phi)|
};

/// Discrete strong-form and weak-form residuals of a candidate solution.
CheckReport residual_and_weakform_check(const Field& u, const Field& f, double alpha);

/// Spectral Laplacian, slab by slab.
Field laplacian(const Field& u);

/// Spectral first derivative along an axis (Nyquist mode dropped).
Field spectral_derivative(const Field& u, int axis);

/// Spectral second derivative along axes (i, j).
Field spectral_second_derivative(const Field& u, int i, int j);

}  // namespace fracdiff
