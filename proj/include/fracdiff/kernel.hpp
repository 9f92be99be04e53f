#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "fracdiff/grids.hpp"

namespace fracdiff {

/// Tabulated source-response kernel q(t_ref, .) with spatial derivatives up to
/// order 2, plus the fundamental solution p(t_ref, .), on a periodic box.
/// The hessian is stored once per unordered index pair and shared, so it is
/// symmetric by construction.
struct KernelTable {
  double alpha = 1.0;
  double t_ref = 1.0;
  SpaceGrid grid;

  std::vector<double> q;                    // q(t_ref, x)
  std::vector<double> p;                    // p(t_ref, x)
  std::vector<std::vector<double>> grad;    // D_i q, i = 0..dim-1
  std::vector<std::vector<double>> hess;    // D_ij q, packed upper triangle

  int hess_slot(int i, int j) const {
    if (i > j) std::swap(i, j);
    return grid.dim == 1 ? 0 : (i == 0 ? j : 3);  // 1d: (0,0); 2d: (0,0),(0,1),(1,1)
  }
  const std::vector<double>& hess_at(int i, int j) const { return hess[hess_slot(i, j)]; }
  const std::vector<double>& deriv(int order, int i = 0, int j = 0) const {
    if (order == 0) return q;
    if (order == 1) return grad[i];
    return hess_at(i, j);
  }
};

/// Stretched-exponential envelope |D^m q(t_ref, x)| <= n_const * exp(-sigma u),
/// u = |x|^{2/(2-alpha)}, fitted over the sampled nodes with |x| >= t_ref^{a/2}.
struct KernelBoundFit {
  double n_const = 0.0;
  double sigma = 0.0;
  int order = 0;
  bool holds_at_all_nodes = false;
};

/// Near-field fits on the |x| <= t_ref^{a/2} nodes: the algebraic envelope and
/// the power-law family |D^m q| <= N(eps) |x|^{-d-eps}.
struct NearFieldBoundFit {
  double n_const = 0.0;                    // algebraic envelope constant
  std::vector<std::pair<double, double>> n_eps;  // (eps, fitted N(eps))
  int order = 0;
};

struct KernelBoundReport {
  KernelBoundFit far;
  NearFieldBoundFit near;
};

/// Mode response q^(t, |xi|^2) = t^{alpha-1} E_{alpha,alpha}(-|xi|^2 t^alpha).
double q_hat_symbol(double t, double xi_sq, double alpha);

/// Mode response of the fundamental solution: E_{alpha,1}(-|xi|^2 t^alpha).
double p_hat_symbol(double t, double xi_sq, double alpha);

/// Builds the table at time t_ref by inverting the mode responses on the grid.
/// 1-d grids use a direct quad-precision transform; 2-d grids use the FFT.
/// Throws DomainTooSmallError when the fitted tail predicts wrap-around above
/// 1e-10 of the kernel scale at the box edge.
KernelTable build_kernel_table(double alpha, const SpaceGrid& grid, double t_ref = 1.0);

/// D^gamma q(t, x) via the self-similar scaling of the table plus multilinear
/// interpolation. gamma is a spatial multi-index with |gamma| <= 2.
double eval_q(const KernelTable& table, double t, const std::array<double, 2>& x,
              const std::array<int, 2>& gamma);

/// Fits the far-field envelope and verifies the near-field bounds for the
/// m-th derivatives (maximum over i,j components).
KernelBoundReport fit_kernel_bounds(const KernelTable& table, int m);

}  // namespace fracdiff
