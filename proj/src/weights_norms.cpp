#include "fracdiff/weights_norms.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "fracdiff/errors.hpp"

namespace fracdiff {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// int_a^b |y|^g dy, exact; +inf when the singularity is non-integrable.
double power_integral_1d(double a, double b, double g) {
  if (a > b) std::swap(a, b);
  const bool contains_zero = a < 0.0 && b > 0.0;
  const bool touches_zero = a == 0.0 || b == 0.0;
  if (g <= -1.0 && (contains_zero || touches_zero)) return kInf;
  if (g == -1.0) return std::abs(std::log(std::abs(b / a)));  // same-sign interval
  auto G = [g](double y) {
    return (y >= 0.0 ? 1.0 : -1.0) * std::pow(std::abs(y), g + 1.0) / (g + 1.0);
  };
  return G(b) - G(a);
}

// average of |y - c|^g over the interval [a, b]
double interval_average(double a, double b, double c, double g) {
  const double mass = power_integral_1d(a - c, b - c, g);
  return mass / (b - a);
}

// average of |y|^g over the disk B_r(x0) with |x0| = delta, in 2-d
double disk_average(double r, double delta, double g) {
  if (g <= -2.0 && delta < r) return kInf;
  double mass = 0.0;
  if (delta < r) {
    const double rho0 = r - delta;  // fully covered core around the singularity
    mass += 2.0 * M_PI * std::pow(rho0, g + 2.0) / (g + 2.0);
  }
  const double lo = std::abs(r - delta);
  const double hi = r + delta;
  if (hi > lo && delta > 0.0) {
    boost::math::quadrature::tanh_sinh<double> quad;
    auto f = [&](double rho) {
      double arg = (rho * rho + delta * delta - r * r) / (2.0 * rho * delta);
      arg = std::clamp(arg, -1.0, 1.0);
      return std::pow(rho, g + 1.0) * 2.0 * std::acos(arg);
    };
    mass += quad.integrate(f, lo, hi, 1e-11);
  }
  return mass / (M_PI * r * r);
}

double ball_average(const PowerWeight& w, double p_gamma, const std::array<double, 2>& center,
                    double r) {
  if (w.domain_dim == 1) {
    return interval_average(center[0] - r, center[0] + r, w.center[0], p_gamma);
  }
  const double dx = center[0] - w.center[0];
  const double dy = center[1] - w.center[1];
  return disk_average(r, std::sqrt(dx * dx + dy * dy), p_gamma);
}

// Cell average of |x - c|^g over an axis-aligned box, tensor Gauss-Legendre
// with recursive subdivision around the singular point.
double box_average_2d(const std::array<double, 2>& lo, const std::array<double, 2>& hi,
                      const std::array<double, 2>& c, double g, int depth) {
  static const double nodes[4] = {-0.8611363115940526, -0.3399810435848563,
                                  0.3399810435848563, 0.8611363115940526};
  static const double weights[4] = {0.3478548451374538, 0.6521451548625461,
                                    0.6521451548625461, 0.3478548451374538};
  const bool contains = c[0] >= lo[0] && c[0] <= hi[0] && c[1] >= lo[1] && c[1] <= hi[1];
  // refine also next to the singular point, where the kink degrades Gauss rules
  const double reach = std::max(hi[0] - lo[0], hi[1] - lo[1]);
  const bool near = c[0] >= lo[0] - reach && c[0] <= hi[0] + reach && c[1] >= lo[1] - reach &&
                    c[1] <= hi[1] + reach;
  if (!near || g == 0.0 || (depth <= 0 && !contains)) {
    double acc = 0.0;
    for (int a = 0; a < 4; ++a) {
      const double x = 0.5 * (lo[0] + hi[0]) + 0.5 * (hi[0] - lo[0]) * nodes[a];
      for (int b = 0; b < 4; ++b) {
        const double y = 0.5 * (lo[1] + hi[1]) + 0.5 * (hi[1] - lo[1]) * nodes[b];
        const double dx = x - c[0], dy = y - c[1];
        acc += weights[a] * weights[b] * std::pow(std::sqrt(dx * dx + dy * dy), g);
      }
    }
    return acc / 4.0;  // Gauss weights sum to 2 per axis
  }
  if (depth <= 0) {
    // equal-area disk surrogate for the residual singular cell
    const double area = (hi[0] - lo[0]) * (hi[1] - lo[1]);
    const double rho = std::sqrt(area / M_PI);
    if (g <= -2.0) return kInf;
    return 2.0 * std::pow(rho, g) / (g + 2.0);
  }
  const double mx = 0.5 * (lo[0] + hi[0]);
  const double my = 0.5 * (lo[1] + hi[1]);
  double acc = 0.0;
  acc += box_average_2d(lo, {mx, my}, c, g, depth - 1);
  acc += box_average_2d({mx, lo[1]}, {hi[0], my}, c, g, depth - 1);
  acc += box_average_2d({lo[0], my}, {mx, hi[1]}, c, g, depth - 1);
  acc += box_average_2d({mx, my}, hi, c, g, depth - 1);
  return acc / 4.0;
}

}  // namespace

PowerWeight space_weight(double gamma, int dim, std::array<double, 2> center) {
  if (dim != 1 && dim != 2) throw ParameterError("space_weight: dim must be 1 or 2");
  PowerWeight w;
  w.exponent = gamma;
  w.center = center;
  w.domain_dim = dim;
  w.role = PowerWeight::Role::space;
  return w;
}

PowerWeight time_weight(double gamma) {
  PowerWeight w;
  w.exponent = gamma;
  w.center = {0.0, 0.0};
  w.domain_dim = 1;
  w.role = PowerWeight::Role::time;
  return w;
}

PowerWeight dual_weight(const PowerWeight& w, double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw ParameterError("dual_weight: p must lie in (1,inf)");
  PowerWeight out = w;
  out.exponent = -w.exponent / (p - 1.0);
  return out;
}

SamplingSpec default_sampling() {
  SamplingSpec spec;
  const int n_radii = 24;
  for (int i = 0; i < n_radii; ++i) {
    spec.radii.push_back(std::pow(10.0, -3.0 + 6.0 * i / (n_radii - 1)));
  }
  spec.off_center = {0.0, 0.7, 2.0, 5.0};
  return spec;
}

ApEstimate ap_characteristic(const PowerWeight& w, double p, const SamplingSpec& sampling) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw ParameterError("ap_characteristic: p must lie in (1,inf)");
  const double dual_gamma = -w.exponent / (p - 1.0);

  std::vector<double> radii = sampling.radii;
  if (sampling.refine_level > 0) {
    const double stretch = std::pow(10.0, sampling.refine_level);
    std::vector<double> extended;
    for (double r : radii) extended.push_back(r / stretch);
    for (double r : radii) extended.push_back(r);
    for (double r : radii) extended.push_back(r * stretch);
    radii = std::move(extended);
  }
  std::sort(radii.begin(), radii.end());

  ApEstimate estimate;
  for (double r : radii) {
    for (double off : sampling.off_center) {
      std::array<double, 2> center = w.center;
      center[0] += off * r;
      const double avg_w = ball_average(w, w.exponent, center, r);
      const double avg_dual = ball_average(w, dual_gamma, center, r);
      const double product = avg_w * std::pow(avg_dual, p - 1.0);
      if (!std::isfinite(product) || product > sampling.divergence_cap) {
        estimate.diverged = true;
        estimate.divergence_radius = r;
        return estimate;
      }
      if (product < 1.0 - 1e-9)
        throw QuadratureError("ap_characteristic: ball product " + std::to_string(product) +
                              " below 1 violates the mean inequality");
      estimate.value = std::max(estimate.value, product);
    }
  }
  return estimate;
}

double weighted_norm(const Field& f, const WeightedNormSpec& spec) {
  require_finite(f, "weighted_norm");
  if (!(spec.p > 1.0) || !(spec.q > 1.0))
    throw ParameterError("weighted_norm: p, q must lie in (1,inf)");
  if (!(spec.horizon > 0.0) || spec.horizon > f.tgrid.t_end + 1e-12 * f.tgrid.t_end)
    throw ParameterError("weighted_norm: horizon must lie in (0, t_end]");

  const SpaceGrid& g = f.sgrid;
  const double dx = g.dx();
  const double cell_vol = g.cell_volume();
  const int n = g.n_points;

  // cell-averaged space weight, with the periodic seam split at +-L/2
  std::vector<double> w1(g.n_total(), 1.0);
  if (spec.w1.exponent != 0.0) {
    const double gamma = spec.w1.exponent;
    if (g.dim == 1) {
      const double c = spec.w1.center[0];
      for (int i = 0; i < n; ++i) {
        const double a = g.node(i) - 0.5 * dx;
        const double b = g.node(i) + 0.5 * dx;
        double mass = 0.0;
        if (a < -0.5 * g.box_length) {
          mass += power_integral_1d(-0.5 * g.box_length - c, b - c, gamma);
          mass += power_integral_1d(a + g.box_length - c, 0.5 * g.box_length - c, gamma);
        } else {
          mass += power_integral_1d(a - c, b - c, gamma);
        }
        w1[i] = mass / dx;
      }
    } else {
      const double edge = 0.5 * g.box_length;
      // node cell split at the periodic seam: up to two intervals per axis
      auto axis_pieces = [&](int i) {
        std::vector<std::pair<double, double>> pieces;
        const double a = g.node(i) - 0.5 * dx;
        const double b = g.node(i) + 0.5 * dx;
        if (a < -edge) {
          pieces.emplace_back(-edge, b);
          pieces.emplace_back(a + g.box_length, edge);
        } else {
          pieces.emplace_back(a, b);
        }
        return pieces;
      };
      for (int i = 0; i < n; ++i) {
        const auto px = axis_pieces(i);
        for (int j = 0; j < n; ++j) {
          const auto py = axis_pieces(j);
          double mass = 0.0;
          for (const auto& [ax, bx] : px)
            for (const auto& [ay, by] : py)
              mass += box_average_2d({ax, ay}, {bx, by}, spec.w1.center, gamma, 12) *
                      (bx - ax) * (by - ay);
          w1[static_cast<long>(i) * n + j] = mass / (dx * dx);
        }
      }
    }
  }

  const double dt = f.tgrid.dt();
  double outer = 0.0;
  for (int j = 0; j < f.n_time(); ++j) {
    const double t = f.tgrid.node(j);
    const double cell_lo = std::max(0.0, t - 0.5 * dt);
    if (cell_lo >= spec.horizon) break;
    const double cell_hi = std::min(spec.horizon, t + 0.5 * dt);
    if (t > spec.horizon) break;
    const double measure = cell_hi - cell_lo;
    if (measure <= 0.0) continue;
    double w2 = 1.0;
    if (spec.w2.exponent != 0.0)
      w2 = power_integral_1d(cell_lo, cell_hi, spec.w2.exponent) / measure;

    double inner = 0.0;
    for (long s = 0; s < g.n_total(); ++s)
      inner += std::pow(std::abs(f.at(j, s)), spec.p) * w1[s] * cell_vol;
    outer += measure * w2 * std::pow(inner, spec.q / spec.p);
  }
  const double norm = std::pow(outer, 1.0 / spec.q);
  if (!std::isfinite(norm))
    throw OverflowError("weighted_norm: non-finite result for gamma1 = " +
                        std::to_string(spec.w1.exponent) + ", gamma2 = " +
                        std::to_string(spec.w2.exponent) + ", p = " + std::to_string(spec.p) +
                        ", q = " + std::to_string(spec.q));
  return norm;
}

double unweighted_norm(const Field& f, double p, double q, double horizon) {
  require_finite(f, "unweighted_norm");
  const double dt = f.tgrid.dt();
  const double cell_vol = f.sgrid.cell_volume();
  double outer = 0.0;
  for (int j = 0; j < f.n_time(); ++j) {
    const double t = f.tgrid.node(j);
    const double cell_lo = std::max(0.0, t - 0.5 * dt);
    if (cell_lo >= horizon || t > horizon) break;
    const double measure = std::min(horizon, t + 0.5 * dt) - cell_lo;
    if (measure <= 0.0) continue;
    double inner = 0.0;
    for (long s = 0; s < f.n_space(); ++s)
      inner += std::pow(std::abs(f.at(j, s)), p) * cell_vol;
    outer += measure * std::pow(inner, q / p);
  }
  return std::pow(outer, 1.0 / q);
}

}  // namespace fracdiff
