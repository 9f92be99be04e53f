#include "fracdiff/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "fracdiff/fft.hpp"
#include "fracdiff/frac_ops.hpp"
#include "fracdiff/mittag_leffler.hpp"
#include "fracdiff/parallel.hpp"

namespace fracdiff {

namespace {

void check_alpha_open(double alpha, const char* who) {
  if (!(alpha > 0.0) || !(alpha < 2.0) || !std::isfinite(alpha))
    throw ParameterError(std::string(who) + ": alpha must lie in (0,2), got " +
                         std::to_string(alpha));
}

// Integrated mode kernel K(tau) = tau^a E_{a,a+1}(-lambda tau^a), K(0) = 0.
double mode_kernel_K(double tau, double lambda, double alpha) {
  if (tau <= 0.0) return 0.0;
  const double ta = std::pow(tau, alpha);
  return ta * ml_eval(alpha, alpha + 1.0, -lambda * ta);
}

// Second moment K2(tau) = tau^{a+1} E_{a,a+2}(-lambda tau^a), K2' = K.
double mode_kernel_K2(double tau, double lambda, double alpha) {
  if (tau <= 0.0) return 0.0;
  const double ta = std::pow(tau, alpha);
  return ta * tau * ml_eval(alpha, alpha + 2.0, -lambda * ta);
}

struct ModeConvolution {
  double dt;
  double lag_window;
  bool piecewise_linear;
  std::vector<double> K;   // K at lags min(l*dt, window)
  std::vector<double> K2;

  ModeConvolution(double lambda, double alpha, const TimeGrid& grid, double window,
                  bool linear)
      : dt(grid.dt()), lag_window(window), piecewise_linear(linear) {
    const int n = grid.n_steps;
    K.resize(n + 1, 0.0);
    if (linear) K2.resize(n + 1, 0.0);
    for (int l = 1; l <= n; ++l) {
      const double tau = std::min(l * dt, window);
      K[l] = mode_kernel_K(tau, lambda, alpha);
      if (linear) K2[l] = mode_kernel_K2(tau, lambda, alpha);
    }
  }

  // uhat(t_i) from the zero-extended source series.
  std::complex<double> step(const ComplexTimeSeries& fhat, int i) const {
    std::complex<double> acc{};
    for (int j = 0; j < i; ++j) {
      const int l = i - j;                // lag interval (t_i - t_{j+1}, t_i - t_j]
      const double lag_lo = (l - 1) * dt; // = t_i - t_{j+1}
      if (lag_lo >= lag_window) continue;
      const double k_hi = K[l];
      const double k_lo = K[l - 1];
      if (!piecewise_linear) {
        acc += 0.5 * (fhat[j] + fhat[j + 1]) * (k_hi - k_lo);
      } else {
        const double lag_hi = std::min(l * dt, lag_window);
        const double k2_hi = K2[l];
        const double k2_lo = K2[l - 1];
        const std::complex<double> df = fhat[j + 1] - fhat[j];
        const double a = l * dt;  // lag of the left node t_j
        acc += fhat[j] * (k_hi - k_lo) +
               df * ((a * (k_hi - k_lo) -
                      (lag_hi * k_hi - lag_lo * k_lo - (k2_hi - k2_lo))) / dt);
      }
    }
    return acc;
  }
};

// Multiplier applied to the source modes for the operator family:
// k = 0 -> 1, k = 1 -> i xi_i, k = 2 -> -xi_i xi_j (odd factors drop Nyquist).
std::complex<double> operator_symbol(int k, const SpaceGrid& g, long mode, int i, int j) {
  if (k == 0) return {1.0, 0.0};
  const int n = g.n_points;
  int idx[2] = {0, 0};
  if (g.dim == 1) {
    idx[0] = static_cast<int>(mode);
  } else {
    idx[0] = static_cast<int>(mode / n);
    idx[1] = static_cast<int>(mode % n);
  }
  auto signed_freq = [&](int axis) {
    return idx[axis] == n / 2 ? 0.0 : g.freq(idx[axis]);
  };
  if (k == 1) return {0.0, signed_freq(i)};
  if (i == j) {
    const double f = g.freq(idx[i]);
    return {-f * f, 0.0};
  }
  return {-signed_freq(i) * signed_freq(j), 0.0};
}

Field spectral_filter(const Field& u,
                      const std::function<std::complex<double>(long)>& factor) {
  const SpaceGrid& g = u.sgrid;
  const Dft dft(g);
  Field out(u.tgrid, u.sgrid);
  std::vector<std::complex<double>> modes(g.n_total());
  for (int t = 0; t < u.n_time(); ++t) {
    slab_to_modes(dft, g, u.slab(t), modes.data());
    for (long s = 0; s < g.n_total(); ++s) modes[s] *= factor(s);
    modes_to_slab(dft, g, modes.data(), out.slab(t));
  }
  return out;
}

Field convolve_with_kernel(int k, const Field& f, double alpha, double lag_window,
                           std::optional<std::pair<int, int>> indices,
                           const SolverOptions& options) {
  check_alpha_open(alpha, "apply_L");
  require_finite(f, "apply_L");
  if (!(lag_window > 0.0)) throw ParameterError("apply_L: lag window must be positive");
  if (k < 0 || k > 2) throw ParameterError("apply_L: k must be 0, 1 or 2");
  int di = 0, dj = 0;
  if (k >= 1) {
    if (!indices) throw ParameterError("apply_L: derivative indices required for k >= 1");
    di = indices->first;
    dj = indices->second;
    if (di < 0 || di >= f.sgrid.dim || (k == 2 && (dj < 0 || dj >= f.sgrid.dim)))
      throw ParameterError("apply_L: derivative index out of range");
  }

  const SpaceGrid& g = f.sgrid;
  const int n_time = f.n_time();
  const long n_space = g.n_total();
  const Dft dft(g);

  // transform every slab, then regroup mode-major
  std::vector<std::complex<double>> by_mode(static_cast<size_t>(n_space) * n_time);
  {
    std::vector<std::complex<double>> modes(n_space);
    for (int t = 0; t < n_time; ++t) {
      slab_to_modes(dft, g, f.slab(t), modes.data());
      for (long s = 0; s < n_space; ++s)
        by_mode[static_cast<size_t>(s) * n_time + t] = modes[s];
    }
  }

  parallel_for(
      n_space,
      [&](long s) {
        double lambda = 0.0;
        if (g.dim == 1) {
          const double xi = g.freq(static_cast<int>(s));
          lambda = xi * xi;
        } else {
          const double xi = g.freq(static_cast<int>(s / g.n_points));
          const double eta = g.freq(static_cast<int>(s % g.n_points));
          lambda = xi * xi + eta * eta;
        }
        const std::complex<double> sym = operator_symbol(k, g, s, di, dj);
        ComplexTimeSeries fhat(f.tgrid);
        for (int t = 0; t < n_time; ++t)
          fhat[t] = sym * by_mode[static_cast<size_t>(s) * n_time + t];
        const ModeConvolution conv(lambda, alpha, f.tgrid, lag_window,
                                   options.piecewise_linear);
        by_mode[static_cast<size_t>(s) * n_time] = 0.0;
        for (int t = 1; t < n_time; ++t)
          by_mode[static_cast<size_t>(s) * n_time + t] = conv.step(fhat, t);
      },
      options.n_threads);

  Field u(f.tgrid, f.sgrid);
  double residue = 0.0;
  {
    std::vector<std::complex<double>> modes(n_space);
    for (int t = 1; t < n_time; ++t) {
      for (long s = 0; s < n_space; ++s)
        modes[s] = by_mode[static_cast<size_t>(s) * n_time + t];
      residue = std::max(residue, modes_to_slab(dft, g, modes.data(), u.slab(t)));
    }
  }
  const double scale = u.max_abs();
  if (residue > 1e-8 * std::max(scale, 1e-300))
    throw QuadratureError("solve: imaginary residue " + std::to_string(residue) +
                          " exceeds 1e-8 of the solution scale");
  return u;
}

}  // namespace

ComplexTimeSeries solve_mode(double lambda, const ComplexTimeSeries& fhat, double alpha,
                             const SolverOptions& options) {
  if (!(lambda >= 0.0)) throw ParameterError("solve_mode: lambda must be nonnegative");
  check_alpha_open(alpha, "solve_mode");
  require_finite(fhat, "solve_mode");
  const ModeConvolution conv(lambda, alpha, fhat.grid, fhat.grid.t_end,
                             options.piecewise_linear);
  ComplexTimeSeries uhat(fhat.grid);
  uhat[0] = 0.0;
  for (int t = 1; t < fhat.size(); ++t) uhat[t] = conv.step(fhat, t);
  return uhat;
}

Field solve(const Field& f, double alpha, const SolverOptions& options) {
  require_finite(f, "solve");
  return convolve_with_kernel(0, f, alpha, f.tgrid.t_end, std::nullopt, options);
}

Field apply_L(int k, const Field& f, double alpha, double lag_window,
              std::optional<std::pair<int, int>> indices, const SolverOptions& options) {
  return convolve_with_kernel(k, f, alpha, lag_window, indices, options);
}

Field laplacian(const Field& u) {
  const SpaceGrid& g = u.sgrid;
  return spectral_filter(u, [&](long s) -> std::complex<double> {
    if (g.dim == 1) {
      const double xi = g.freq(static_cast<int>(s));
      return {-xi * xi, 0.0};
    }
    const double xi = g.freq(static_cast<int>(s / g.n_points));
    const double eta = g.freq(static_cast<int>(s % g.n_points));
    return {-(xi * xi + eta * eta), 0.0};
  });
}

Field spectral_derivative(const Field& u, int axis) {
  const SpaceGrid& g = u.sgrid;
  if (axis < 0 || axis >= g.dim) throw ParameterError("spectral_derivative: bad axis");
  return spectral_filter(u, [&g, axis](long s) -> std::complex<double> {
    return operator_symbol(1, g, s, axis, 0);
  });
}

Field spectral_second_derivative(const Field& u, int i, int j) {
  const SpaceGrid& g = u.sgrid;
  if (i < 0 || i >= g.dim || j < 0 || j >= g.dim)
    throw ParameterError("spectral_second_derivative: bad axis");
  return spectral_filter(u, [&g, i, j](long s) -> std::complex<double> {
    return operator_symbol(2, g, s, i, j);
  });
}

CheckReport residual_and_weakform_check(const Field& u, const Field& f, double alpha) {
  require_same_grids(u, f, "residual_and_weakform_check");
  check_alpha_open(alpha, "residual_and_weakform_check");
  CheckReport report;

  const Field lap = laplacian(u);
  const long n_space = u.n_space();
  const int n_time = u.n_time();

  double residual = 0.0;
  {
    TimeSeries column(u.tgrid);
    for (long s = 0; s < n_space; ++s) {
      for (int t = 0; t < n_time; ++t) column[t] = u.at(t, s);
      const TimeSeries dcol = caputo_derivative(column, alpha);
      for (int t = 0; t < n_time; ++t)
        residual = std::max(residual, std::abs(dcol[t] - lap.at(t, s) - f.at(t, s)));
    }
  }
  report.equation_residual = residual / std::max(f.max_abs(), 1e-300);

  // Smooth bump supported on |x| < L/4.
  const SpaceGrid& g = u.sgrid;
  std::vector<double> phi(n_space, 0.0);
  for (long s = 0; s < n_space; ++s) {
    double x, y = 0.0;
    if (g.dim == 1) {
      x = g.node(static_cast<int>(s));
    } else {
      x = g.node(static_cast<int>(s / g.n_points));
      y = g.node(static_cast<int>(s % g.n_points));
    }
    const double rho = std::sqrt(x * x + y * y) / (0.25 * g.box_length);
    if (rho < 1.0) phi[s] = std::exp(1.0 - 1.0 / (1.0 - rho * rho));
  }
  const double cell = g.cell_volume();
  TimeSeries u_phi(u.tgrid), f_phi(u.tgrid);
  for (int t = 0; t < n_time; ++t) {
    double au = 0.0, af = 0.0;
    for (long s = 0; s < n_space; ++s) {
      au += u.at(t, s) * phi[s];
      af += f.at(t, s) * phi[s];
    }
    u_phi[t] = au * cell;
    f_phi[t] = af * cell;
  }
  const TimeSeries integrated = rl_integral(f_phi, alpha);
  double weak = 0.0, scale = 0.0;
  for (int t = 0; t < n_time; ++t) {
    weak = std::max(weak, std::abs(u_phi[t] - integrated[t]));
    scale = std::max(scale, std::abs(f_phi[t]));
  }
  report.weak_form_residual = weak / std::max(scale, 1e-300);
  return report;
}

}  // namespace fracdiff
