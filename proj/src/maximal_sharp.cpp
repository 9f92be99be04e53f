#include "fracdiff/maximal_sharp.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <vector>

#include "fracdiff/errors.hpp"
#include "fracdiff/solver.hpp"

namespace fracdiff {

namespace {

void check_metric(const ParabolicMetricSpec& spec, const char* who) {
  if (!(spec.alpha > 0.0) || !(spec.alpha < 2.0))
    throw ParameterError(std::string(who) + ": alpha must lie in (0,2)");
  if (spec.dim != 1 && spec.dim != 2)
    throw ParameterError(std::string(who) + ": dim must be 1 or 2");
}

std::vector<int> dyadic_sizes(int n) {
  std::vector<int> sizes;
  for (int w = 1; w <= n; w *= 2) sizes.push_back(w);
  return sizes;
}

int pow2_ceil(int v, int cap) {
  int w = 1;
  while (w < v && w < cap) w *= 2;
  return std::min(w, cap);
}

// 3-d view of a field: axis 0 = time, axis 1 = x, axis 2 = y (size 1 in 1-d).
struct GridView {
  int n0, n1, n2;
  long stride0, stride1;

  explicit GridView(const Field& f)
      : n0(f.n_time()),
        n1(f.sgrid.n_points),
        n2(f.sgrid.dim == 2 ? f.sgrid.n_points : 1) {
    stride1 = n2;
    stride0 = static_cast<long>(n1) * n2;
  }
  long index(int i, int j, int k) const { return i * stride0 + j * stride1 + k; }
  long total() const { return static_cast<long>(n0) * n1 * n2; }
};

// inclusive prefix sums with a zero border
struct PrefixSum {
  int n0, n1, n2;
  std::vector<double> data;

  PrefixSum(const GridView& view, const std::vector<double>& values)
      : n0(view.n0), n1(view.n1), n2(view.n2),
        data(static_cast<size_t>(n0 + 1) * (n1 + 1) * (n2 + 1), 0.0) {
    const long s0 = static_cast<long>(n1 + 1) * (n2 + 1);
    const long s1 = n2 + 1;
    for (int i = 0; i < n0; ++i)
      for (int j = 0; j < n1; ++j)
        for (int k = 0; k < n2; ++k) {
          data[(i + 1) * s0 + (j + 1) * s1 + (k + 1)] =
              values[view.index(i, j, k)] + data[i * s0 + (j + 1) * s1 + (k + 1)] +
              data[(i + 1) * s0 + j * s1 + (k + 1)] - data[i * s0 + j * s1 + (k + 1)] +
              data[(i + 1) * s0 + (j + 1) * s1 + k] - data[i * s0 + (j + 1) * s1 + k] -
              data[(i + 1) * s0 + j * s1 + k] + data[i * s0 + j * s1 + k];
        }
  }

  double box_sum(int i0, int j0, int k0, int w0, int w1, int w2) const {
    const long s0 = static_cast<long>(n1 + 1) * (n2 + 1);
    const long s1 = n2 + 1;
    auto at = [&](int a, int b, int c) { return data[a * s0 + b * s1 + c]; };
    const int i1 = i0 + w0, j1 = j0 + w1, k1 = k0 + w2;
    return at(i1, j1, k1) - at(i0, j1, k1) - at(i1, j0, k1) + at(i0, j0, k1) -
           at(i1, j1, k0) + at(i0, j1, k0) + at(i1, j0, k0) - at(i0, j0, k0);
  }
};

// C[p] = max over window origins o in [p-w+1, p] (clamped to [0, m-1]) of B[o],
// where m = n - w + 1 is the number of admissible origins.
void origin_max_filter(const double* B, int n, int w, double* C) {
  const int m = n - w + 1;
  std::deque<int> deq;
  for (int p = 0; p < n; ++p) {
    if (p < m) {
      while (!deq.empty() && B[deq.back()] <= B[p]) deq.pop_back();
      deq.push_back(p);
    }
    while (!deq.empty() && deq.front() < p - w + 1) deq.pop_front();
    C[p] = B[deq.front()];
  }
}

// expands per-origin scores to per-point maxima over covering boxes
void scatter_max(const GridView& view, const std::vector<double>& origin_scores, int w0,
                 int w1, int w2, std::vector<double>& out) {
  const int m0 = view.n0 - w0 + 1;
  const int m1 = view.n1 - w1 + 1;
  const int m2 = view.n2 - w2 + 1;

  // axis 2
  std::vector<double> tmp2(static_cast<size_t>(m0) * m1 * view.n2);
  {
    std::vector<double> line_in(m2), line_out(view.n2);
    for (int i = 0; i < m0; ++i)
      for (int j = 0; j < m1; ++j) {
        for (int k = 0; k < m2; ++k)
          line_in[k] = origin_scores[(static_cast<size_t>(i) * m1 + j) * m2 + k];
        origin_max_filter(line_in.data(), view.n2, w2, line_out.data());
        for (int k = 0; k < view.n2; ++k)
          tmp2[(static_cast<size_t>(i) * m1 + j) * view.n2 + k] = line_out[k];
      }
  }
  // axis 1
  std::vector<double> tmp1(static_cast<size_t>(m0) * view.n1 * view.n2);
  {
    std::vector<double> line_in(m1), line_out(view.n1);
    for (int i = 0; i < m0; ++i)
      for (int k = 0; k < view.n2; ++k) {
        for (int j = 0; j < m1; ++j)
          line_in[j] = tmp2[(static_cast<size_t>(i) * m1 + j) * view.n2 + k];
        origin_max_filter(line_in.data(), view.n1, w1, line_out.data());
        for (int j = 0; j < view.n1; ++j)
          tmp1[(static_cast<size_t>(i) * view.n1 + j) * view.n2 + k] = line_out[j];
      }
  }
  // axis 0 and accumulate
  {
    std::vector<double> line_in(m0), line_out(view.n0);
    for (int j = 0; j < view.n1; ++j)
      for (int k = 0; k < view.n2; ++k) {
        for (int i = 0; i < m0; ++i)
          line_in[i] = tmp1[(static_cast<size_t>(i) * view.n1 + j) * view.n2 + k];
        origin_max_filter(line_in.data(), view.n0, w0, line_out.data());
        for (int i = 0; i < view.n0; ++i) {
          double& slot = out[view.index(i, j, k)];
          slot = std::max(slot, line_out[i]);
        }
      }
  }
}

}  // namespace

double parabolic_distance(const ParabolicMetricSpec& spec, const SpaceTimePoint& a,
                          const SpaceTimePoint& b) {
  check_metric(spec, "parabolic_distance");
  double space = 0.0;
  for (int i = 0; i < spec.dim; ++i) {
    const double d = a.x[i] - b.x[i];
    space += d * d;
  }
  return std::pow(std::abs(a.t - b.t), 0.5 * spec.alpha) + std::sqrt(space);
}

double ball_measure(const ParabolicMetricSpec& spec, double r) {
  check_metric(spec, "ball_measure");
  if (!(r > 0.0)) throw ParameterError("ball_measure: r must be positive");
  const double p = 2.0 / spec.alpha;
  using boost::math::quadrature::gauss_kronrod;
  double shape;
  if (spec.dim == 1) {
    shape = 4.0 * gauss_kronrod<double, 31>::integrate(
                      [p](double x) { return std::pow(1.0 - x, p); }, 0.0, 1.0, 10, 1e-12);
  } else {
    shape = 4.0 * M_PI *
            gauss_kronrod<double, 31>::integrate(
                [p](double x) { return x * std::pow(1.0 - x, p); }, 0.0, 1.0, 10, 1e-12);
  }
  return shape * std::pow(r, p + spec.dim);
}

double ball_measure_monte_carlo(const ParabolicMetricSpec& spec, double r, long n_samples,
                                uint64_t seed) {
  check_metric(spec, "ball_measure_monte_carlo");
  if (!(r > 0.0)) throw ParameterError("ball_measure_monte_carlo: r must be positive");
  const double rt = std::pow(r, 2.0 / spec.alpha);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const SpaceTimePoint origin;
  long hits = 0;
  for (long i = 0; i < n_samples; ++i) {
    SpaceTimePoint p;
    p.t = rt * unit(rng);
    for (int a = 0; a < spec.dim; ++a) p.x[a] = r * unit(rng);
    if (parabolic_distance(spec, origin, p) < r) ++hits;
  }
  double box = 2.0 * rt;
  for (int a = 0; a < spec.dim; ++a) box *= 2.0 * r;
  return box * static_cast<double>(hits) / static_cast<double>(n_samples);
}

Field maximal_fn(const Field& h) {
  require_finite(h, "maximal_fn");
  const GridView view(h);
  std::vector<double> abs_h(view.total());
  for (long i = 0; i < view.total(); ++i) abs_h[i] = std::abs(h.values[i]);
  const PrefixSum prefix(view, abs_h);

  Field out(h.tgrid, h.sgrid);
  // the degenerate single-cell rectangle contributes |h| exactly
  out.values = abs_h;
  const auto sizes0 = dyadic_sizes(view.n0);
  const auto sizes1 = dyadic_sizes(view.n1);
  const auto sizes2 = dyadic_sizes(view.n2);
  for (int w0 : sizes0)
    for (int w1 : sizes1)
      for (int w2 : sizes2) {
        const int m0 = view.n0 - w0 + 1;
        const int m1 = view.n1 - w1 + 1;
        const int m2 = view.n2 - w2 + 1;
        const double inv_vol = 1.0 / (static_cast<double>(w0) * w1 * w2);
        std::vector<double> scores(static_cast<size_t>(m0) * m1 * m2);
        for (int i = 0; i < m0; ++i)
          for (int j = 0; j < m1; ++j)
            for (int k = 0; k < m2; ++k)
              scores[(static_cast<size_t>(i) * m1 + j) * m2 + k] =
                  prefix.box_sum(i, j, k, w0, w1, w2) * inv_vol;
        scatter_max(view, scores, w0, w1, w2, out.values);
      }
  return out;
}

Field sharp_fn(const Field& h, double alpha) {
  require_finite(h, "sharp_fn");
  if (!(alpha > 0.0) || !(alpha < 2.0)) throw ParameterError("sharp_fn: alpha must lie in (0,2)");
  const GridView view(h);
  const PrefixSum prefix(view, h.values);

  Field out(h.tgrid, h.sgrid);
  const double dx = h.sgrid.dx();
  const double dt = h.tgrid.dt();
  for (int w1 : dyadic_sizes(view.n1)) {
    const double delta = w1 * dx;
    const int w2 = view.n2 == 1 ? 1 : w1;
    const int w0 = pow2_ceil(
        static_cast<int>(std::ceil(std::pow(delta, 2.0 / alpha) / dt - 1e-12)), view.n0);
    const int m0 = view.n0 - w0 + 1;
    const int m1 = view.n1 - w1 + 1;
    const int m2 = view.n2 - w2 + 1;
    const double inv_vol = 1.0 / (static_cast<double>(w0) * w1 * w2);
    std::vector<double> scores(static_cast<size_t>(m0) * m1 * m2);
    for (int i = 0; i < m0; ++i)
      for (int j = 0; j < m1; ++j)
        for (int k = 0; k < m2; ++k) {
          const double mean = prefix.box_sum(i, j, k, w0, w1, w2) * inv_vol;
          double osc = 0.0;
          for (int a = i; a < i + w0; ++a)
            for (int b = j; b < j + w1; ++b)
              for (int c = k; c < k + w2; ++c)
                osc += std::abs(h.values[view.index(a, b, c)] - mean);
          scores[(static_cast<size_t>(i) * m1 + j) * m2 + k] = osc * inv_vol;
        }
    scatter_max(view, scores, w0, w1, w2, out.values);
  }
  return out;
}

SharpEstimate sharp_estimate_check(const Field& f, double alpha, double p0, int k,
                                   double lag_window,
                                   std::optional<std::pair<int, int>> indices) {
  require_finite(f, "sharp_estimate_check");
  if (!(p0 > 1.0)) throw ParameterError("sharp_estimate_check: p0 must lie in (1,inf)");
  if (k < 0 || k > 2) throw ParameterError("sharp_estimate_check: k must be 0, 1 or 2");
  if (k >= 1 && !indices) indices = std::make_pair(0, 0);

  Field f_pow(f.tgrid, f.sgrid);
  for (size_t i = 0; i < f.values.size(); ++i)
    f_pow.values[i] = std::pow(std::abs(f.values[i]), p0);
  const Field denom_raw = maximal_fn(f_pow);

  auto fitted = [&](double window, bool keep_ratio, Field* ratio_out) {
    const Field response = apply_L(k, f, alpha, window, indices);
    const Field sharp = sharp_fn(response, alpha);
    double best = 0.0;
    bool any = false;
    for (size_t i = 0; i < sharp.values.size(); ++i) {
      const double denom = std::pow(denom_raw.values[i], 1.0 / p0);
      if (denom_raw.values[i] > 1e-12) {
        any = true;
        const double r = sharp.values[i] / denom;
        if (keep_ratio) ratio_out->values[i] = r;
        best = std::max(best, r);
      } else if (keep_ratio) {
        ratio_out->values[i] = 0.0;
      }
    }
    if (!any)
      throw DegenerateInputError(
          "sharp_estimate_check: maximal function of |f|^p0 is below 1e-12 everywhere");
    return best;
  };

  SharpEstimate estimate;
  estimate.ratio = Field(f.tgrid, f.sgrid);
  estimate.fitted_constant = fitted(lag_window, true, &estimate.ratio);
  if (k == 2)
    estimate.fitted_constant_doubled_window = fitted(2.0 * lag_window, false, nullptr);
  return estimate;
}

}  // namespace fracdiff
