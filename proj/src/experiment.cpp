#include "fracdiff/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include "fracdiff/errors.hpp"
#include "fracdiff/frac_ops.hpp"
#include "fracdiff/kernel.hpp"
#include "fracdiff/maximal_sharp.hpp"
#include "fracdiff/parallel.hpp"
#include "fracdiff/serialize.hpp"
#include "fracdiff/solver.hpp"
#include "fracdiff/weights_norms.hpp"

namespace fracdiff {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

std::string format_double(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

double rel_l2(const Field& a, const Field& b) {
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i) {
    const double d = a.values[i] - b.values[i];
    num += d * d;
    den += b.values[i] * b.values[i];
  }
  return std::sqrt(num / std::max(den, 1e-300));
}

Field manufactured_source(const TimeGrid& tg, const SpaceGrid& sg, double alpha) {
  const double k = 2.0 * M_PI / sg.box_length;
  const double c = std::tgamma(3.0) / std::tgamma(3.0 - alpha);
  return sample_field_1d(tg, sg, [&](double t, double x) {
    return (c * std::pow(t, 2.0 - alpha) + k * k * t * t) * std::cos(k * x);
  });
}

Field manufactured_exact(const TimeGrid& tg, const SpaceGrid& sg) {
  const double k = 2.0 * M_PI / sg.box_length;
  return sample_field_1d(tg, sg, [&](double t, double x) { return t * t * std::cos(k * x); });
}

// pointwise Frobenius magnitude of the derivative components
Field gradient_magnitude(const Field& u) {
  Field out(u.tgrid, u.sgrid);
  for (int axis = 0; axis < u.sgrid.dim; ++axis) {
    const Field d = spectral_derivative(u, axis);
    for (size_t i = 0; i < out.values.size(); ++i) out.values[i] += d.values[i] * d.values[i];
  }
  for (auto& v : out.values) v = std::sqrt(v);
  return out;
}

Field hessian_magnitude(const Field& u) {
  Field out(u.tgrid, u.sgrid);
  for (int i = 0; i < u.sgrid.dim; ++i)
    for (int j = 0; j < u.sgrid.dim; ++j) {
      const Field d = spectral_second_derivative(u, i, j);
      for (size_t s = 0; s < out.values.size(); ++s) out.values[s] += d.values[s] * d.values[s];
    }
  for (auto& v : out.values) v = std::sqrt(v);
  return out;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

// ---------------------------------------------------------------------------
// identities

EstimateReport run_identities(const ExperimentConfig& config) {
  EstimateReport report;
  const auto phi_fn = [](double t) { return t * t * std::sin(t); };
  json summary_cases = json::array();
  for (double alpha : config.alphas) {
    for (double beta : config.betas) {
      if (alpha + beta > 2.0 || beta >= 2.0) continue;
      std::vector<IdentityReport> levels;
      for (int level = 0; level <= config.refine; ++level) {
        const int n = config.grid.n_steps >> (config.refine - level);
        const TimeGrid tg(config.grid.t_end, n);
        const auto idr = verify_calculus_identities(sample_time_series(tg, phi_fn), alpha, beta);
        levels.push_back(idr);
        Record rec;
        rec.add("alpha", alpha);
        rec.add("beta", beta);
        rec.add("level", level);
        rec.add("n_steps", n);
        rec.add("semigroup_error", idr.semigroup_error);
        rec.add("inversion_error", idr.inversion_error);
        rec.add("equivalence_error", idr.equivalence_error);
        rec.add("head_violation", idr.head_violation ? 1.0 : 0.0);
        report.records.push_back(std::move(rec));
      }
      json entry;
      entry["alpha"] = alpha;
      entry["beta"] = beta;
      entry["final_max_error"] = levels.back().max_error();
      if (levels.size() >= 2) {
        const auto& coarse = levels[levels.size() - 2];
        const auto& fine = levels.back();
        const double ratio = std::min(
            {coarse.semigroup_error / std::max(fine.semigroup_error, 1e-300),
             coarse.inversion_error / std::max(fine.inversion_error, 1e-300),
             coarse.equivalence_error / std::max(fine.equivalence_error, 1e-300)});
        entry["refinement_gain"] = ratio;
      }
      summary_cases.push_back(entry);
    }
  }
  report.summary["cases"] = summary_cases;
  return report;
}

// ---------------------------------------------------------------------------
// kernel

EstimateReport run_kernel(const ExperimentConfig& config) {
  EstimateReport report;
  const std::string cache_dir = config.out_dir + "/cache";
  std::filesystem::create_directories(cache_dir);
  json summary_cases = json::array();
  for (double alpha : config.alphas) {
    const SpaceGrid grid(config.grid.dim, config.grid.box_length, config.grid.n_points);
    std::ostringstream name;
    name << cache_dir << "/ktable_a" << alpha << "_d" << grid.dim << "_n" << grid.n_points
         << "_L" << grid.box_length;
    KernelTable table;
    bool cached = false;
    if (std::filesystem::exists(name.str() + ".json")) {
      try {
        table = load_kernel_table(name.str());
        cached = table.alpha == alpha && table.grid == grid && table.t_ref == 1.0;
      } catch (const SerializationError&) {
        cached = false;
      }
    }
    if (!cached) {
      table = build_kernel_table(alpha, grid, 1.0);
      save_kernel_table(table, name.str());
    }

    // second table at t_ref = 2 on the rescaled box: nodes map exactly
    const double factor = std::pow(2.0, 0.5 * alpha);
    const SpaceGrid grid2(grid.dim, grid.box_length * factor, grid.n_points);
    const KernelTable table2 = build_kernel_table(alpha, grid2, 2.0);

    double mass = 0.0;
    for (double v : table.p) mass += v;
    mass *= grid.cell_volume();

    json entry;
    entry["alpha"] = alpha;
    entry["p_mass_error"] = std::abs(mass - 1.0);
    json fits = json::array();
    for (int m = 0; m <= 2; ++m) {
      const auto bounds = fit_kernel_bounds(table, m);

      // scaling law against the independently built table
      const double power = std::pow(2.0, (-0.5 * grid.dim + 1.0 - 0.5 * m) * alpha - 1.0);
      const auto& data1 = table.deriv(m);
      const auto& data2 = table2.deriv(m);
      double vmax = 0.0;
      for (double v : data1) vmax = std::max(vmax, std::abs(v));
      double scale_err = 0.0;
      for (long s = 0; s < grid.n_total(); ++s) {
        double r;
        if (grid.dim == 1) {
          r = std::abs(grid.node(static_cast<int>(s)));
        } else {
          const double x = grid.node(static_cast<int>(s / grid.n_points));
          const double y = grid.node(static_cast<int>(s % grid.n_points));
          r = std::sqrt(x * x + y * y);
        }
        if (r > 0.25 * grid.box_length || std::abs(data1[s]) < 1e-9 * vmax) continue;
        scale_err = std::max(scale_err,
                             std::abs(data2[s] - power * data1[s]) / std::abs(data1[s]));
      }

      Record rec;
      rec.add("alpha", alpha);
      rec.add("order", m);
      rec.add("far_sigma", bounds.far.sigma);
      rec.add("far_n", bounds.far.n_const);
      rec.add("far_holds", bounds.far.holds_at_all_nodes ? 1.0 : 0.0);
      rec.add("near_n", bounds.near.n_const);
      for (const auto& [eps, n_eps] : bounds.near.n_eps)
        rec.add("near_n_eps_" + format_double(eps), n_eps);
      rec.add("scaling_law_max_rel_error", scale_err);
      rec.add("p_mass_error", std::abs(mass - 1.0));
      report.records.push_back(rec);

      json fit;
      fit["order"] = m;
      fit["far_sigma"] = bounds.far.sigma;
      fit["far_n"] = bounds.far.n_const;
      fit["scaling_law_max_rel_error"] = scale_err;
      fits.push_back(fit);
    }
    entry["fits"] = fits;
    summary_cases.push_back(entry);
  }
  report.summary["cases"] = summary_cases;
  return report;
}

// ---------------------------------------------------------------------------
// solve

EstimateReport run_solve(const ExperimentConfig& config) {
  EstimateReport report;
  SolverOptions options;
  options.n_threads = config.threads;
  json summary_cases = json::array();
  for (double alpha : config.alphas) {
    std::vector<double> errors;
    for (int level = 0; level <= config.refine; ++level) {
      const int n_steps = config.grid.n_steps >> (config.refine - level);
      const TimeGrid tg(config.grid.t_end, n_steps);
      const SpaceGrid sg(1, config.grid.box_length, config.grid.n_points);
      const Field f = manufactured_source(tg, sg, alpha);
      const Field u = solve(f, alpha, options);
      const Field exact = manufactured_exact(tg, sg);
      const double err = rel_l2(u, exact);
      const auto checks = residual_and_weakform_check(u, f, alpha);
      errors.push_back(err);

      Record rec;
      rec.add("alpha", alpha);
      rec.add("level", level);
      rec.add("n_steps", n_steps);
      rec.add("n_points", sg.n_points);
      rec.add("rel_l2_error", err);
      rec.add("equation_residual", checks.equation_residual);
      rec.add("weak_form_residual", checks.weak_form_residual);
      report.records.push_back(std::move(rec));
    }
    json entry;
    entry["alpha"] = alpha;
    entry["final_error"] = errors.back();
    bool decreasing = true;
    for (size_t i = 1; i < errors.size(); ++i) decreasing &= errors[i] < errors[i - 1];
    entry["strictly_decreasing"] = decreasing;
    summary_cases.push_back(entry);
  }
  report.summary["cases"] = summary_cases;
  return report;
}

// ---------------------------------------------------------------------------
// estimate-ratio

struct EstimateTuple {
  double alpha, p, q, gamma1, gamma2, horizon;
  size_t alpha_index;
};

EstimateReport run_estimate_ratio(const ExperimentConfig& config) {
  EstimateReport report;
  const GridSpec& gs = config.grid;
  const TimeGrid tgrid(gs.t_end, gs.n_steps);
  const SpaceGrid sgrid(gs.dim, gs.box_length, gs.n_points);
  const int members = config.ensemble.count;
  const int dim = sgrid.dim;

  std::vector<EstimateTuple> tuples;
  for (size_t ai = 0; ai < config.alphas.size(); ++ai)
    for (const auto& [p, q] : config.pq)
      for (double g1s : config.gamma1_scales)
        for (double g2s : config.gamma2_scales)
          for (double horizon : config.horizons)
            tuples.push_back({config.alphas[ai], p, q, g1s * dim * (p - 1.0),
                              g2s * (q - 1.0), horizon, ai});

  struct Cell {
    double ratio0 = std::numeric_limits<double>::quiet_NaN();
    double ratio1 = std::numeric_limits<double>::quiet_NaN();
    double norm_f = std::numeric_limits<double>::quiet_NaN();
    double unweighted_gap = 0.0;
    bool ok = false;
  };
  std::vector<Cell> cells(tuples.size() * members);
  std::vector<std::string> failures;
  std::mutex failures_mutex;

  parallel_for(
      static_cast<long>(config.alphas.size()) * members,
      [&](long task) {
        const size_t ai = static_cast<size_t>(task) / members;
        const int member = static_cast<int>(task % members);
        const double alpha = config.alphas[ai];
        const Field f = random_field(config.ensemble, tgrid, sgrid, member);
        SolverOptions options;
        options.n_threads = 1;
        const Field u = solve(f, alpha, options);
        const Field uxx = hessian_magnitude(u);
        const Field ux = gradient_magnitude(u);
        const Field lap = laplacian(u);
        Field dau(tgrid, sgrid);  // d^a u = Lap u + f along the solve
        for (size_t i = 0; i < dau.values.size(); ++i)
          dau.values[i] = lap.values[i] + f.values[i];

        for (size_t ti = 0; ti < tuples.size(); ++ti) {
          const EstimateTuple& tp = tuples[ti];
          if (tp.alpha_index != ai) continue;
          Cell& cell = cells[ti * members + member];
          try {
            WeightedNormSpec spec;
            spec.p = tp.p;
            spec.q = tp.q;
            spec.w1 = space_weight(tp.gamma1, dim);
            spec.w2 = time_weight(tp.gamma2);
            spec.horizon = tp.horizon;
            const double nf = weighted_norm(f, spec);
            const double nuxx = weighted_norm(uxx, spec);
            const double nu = weighted_norm(u, spec);
            const double nux = weighted_norm(ux, spec);
            const double ndau = weighted_norm(dau, spec);
            if (nf <= 0.0) throw OverflowError("zero source norm");
            cell.ratio0 = nuxx / nf;
            cell.ratio1 = (ndau + nu + nux + nuxx) / nf;
            cell.norm_f = nf;
            if (tp.gamma1 == 0.0 && tp.gamma2 == 0.0) {
              const double direct =
                  unweighted_norm(uxx, tp.p, tp.q, tp.horizon) /
                  unweighted_norm(f, tp.p, tp.q, tp.horizon);
              cell.unweighted_gap = std::abs(direct - cell.ratio0) /
                                    std::max(cell.ratio0, 1e-300);
            }
            cell.ok = std::isfinite(cell.ratio0) && std::isfinite(cell.ratio1);
          } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(failures_mutex);
            failures.push_back("tuple " + std::to_string(ti) + " member " +
                               std::to_string(member) + ": " + e.what());
          }
        }
      },
      config.threads);

  for (size_t ti = 0; ti < tuples.size(); ++ti) {
    const EstimateTuple& tp = tuples[ti];
    for (int member = 0; member < members; ++member) {
      const Cell& cell = cells[ti * members + member];
      if (!cell.ok) continue;
      Record rec;
      rec.add("alpha", tp.alpha);
      rec.add("p", tp.p);
      rec.add("q", tp.q);
      rec.add("gamma1", tp.gamma1);
      rec.add("gamma2", tp.gamma2);
      rec.add("horizon", tp.horizon);
      rec.add("member", member);
      rec.add("ratio0", cell.ratio0);
      rec.add("ratio1", cell.ratio1);
      rec.add("source_norm", cell.norm_f);
      report.records.push_back(std::move(rec));
    }
  }

  // fitted constants and their horizon stability
  json fitted = json::array();
  std::map<std::string, std::pair<double, double>> n0_range;  // group -> (min, max)
  std::map<std::string, std::pair<double, double>> n1_range;
  double worst_unweighted_gap = 0.0;
  json quantile_block = json::array();
  for (size_t ti = 0; ti < tuples.size(); ++ti) {
    const EstimateTuple& tp = tuples[ti];
    std::vector<double> r0s, r1s;
    for (int member = 0; member < members; ++member) {
      const Cell& cell = cells[ti * members + member];
      if (!cell.ok) continue;
      r0s.push_back(cell.ratio0);
      r1s.push_back(cell.ratio1);
      worst_unweighted_gap = std::max(worst_unweighted_gap, cell.unweighted_gap);
    }
    if (r0s.empty()) continue;
    std::sort(r0s.begin(), r0s.end());
    std::sort(r1s.begin(), r1s.end());
    const double n0 = r0s.back();
    const double n1 = r1s.back();
    json entry;
    entry["alpha"] = tp.alpha;
    entry["p"] = tp.p;
    entry["q"] = tp.q;
    entry["gamma1"] = tp.gamma1;
    entry["gamma2"] = tp.gamma2;
    entry["horizon"] = tp.horizon;
    entry["n0"] = n0;
    entry["n1"] = n1;
    entry["n0_median"] = r0s[r0s.size() / 2];
    entry["n0_q90"] = r0s[static_cast<size_t>(0.9 * (r0s.size() - 1))];
    entry["members_used"] = r0s.size();
    fitted.push_back(entry);

    std::ostringstream group;
    group << tp.alpha << "|" << tp.p << "|" << tp.q << "|" << tp.gamma1 << "|" << tp.gamma2;
    auto& rng0 = n0_range.try_emplace(group.str(), n0, n0).first->second;
    rng0.first = std::min(rng0.first, n0);
    rng0.second = std::max(rng0.second, n0);
    auto& rng1 = n1_range.try_emplace(group.str(), n1, n1).first->second;
    rng1.first = std::min(rng1.first, n1);
    rng1.second = std::max(rng1.second, n1);
  }
  json stability = json::array();
  double worst_n0_stability = 0.0;
  for (const auto& [group, range] : n0_range) {
    json entry;
    entry["group"] = group;
    entry["n0_min"] = range.first;
    entry["n0_max"] = range.second;
    entry["n0_spread"] = range.second / std::max(range.first, 1e-300);
    const auto& r1 = n1_range.at(group);
    entry["n1_spread"] = r1.second / std::max(r1.first, 1e-300);
    stability.push_back(entry);
    worst_n0_stability = std::max(worst_n0_stability, range.second / range.first);
  }

  // empirical characteristics of the probed weights
  json characteristics = json::array();
  std::set<std::pair<double, double>> seen;
  for (const auto& tp : tuples) {
    if (!seen.insert({tp.gamma1, tp.p}).second) continue;
    const auto est = ap_characteristic(space_weight(tp.gamma1, dim), tp.p);
    json entry;
    entry["gamma1"] = tp.gamma1;
    entry["p"] = tp.p;
    entry["characteristic"] = est.diverged ? -1.0 : est.value;
    characteristics.push_back(entry);
  }

  report.summary["fitted"] = fitted;
  report.summary["stability"] = stability;
  report.summary["worst_n0_stability"] = worst_n0_stability;
  report.summary["characteristics"] = characteristics;
  report.summary["unit_weight_max_discrepancy"] = worst_unweighted_gap;
  report.summary["failures"] = failures;
  return report;
}

// ---------------------------------------------------------------------------
// sharp-check

EstimateReport run_sharp_check(const ExperimentConfig& config) {
  EstimateReport report;
  const GridSpec& gs = config.grid;
  const TimeGrid tgrid(gs.t_end, gs.n_steps);
  const SpaceGrid sgrid(gs.dim, gs.box_length, gs.n_points);
  const int members = config.ensemble.count;
  const double window = 0.5 * gs.t_end;

  struct Cell {
    double ratio = 0.0, ratio_doubled = 0.0;
    bool ok = false;
  };
  const size_t n_alpha = config.alphas.size();
  std::vector<Cell> cells(n_alpha * 3 * members);

  parallel_for(
      static_cast<long>(cells.size()),
      [&](long task) {
        const size_t ai = static_cast<size_t>(task) / (3 * members);
        const int k = static_cast<int>((task / members) % 3);
        const int member = static_cast<int>(task % members);
        const double alpha = config.alphas[ai];
        const Field f = random_field(config.ensemble, tgrid, sgrid, member);
        const auto est = sharp_estimate_check(f, alpha, config.p0, k, window);
        Cell& cell = cells[task];
        cell.ratio = est.fitted_constant;
        if (k == 2) {
          cell.ratio_doubled = est.fitted_constant_doubled_window;
        } else {
          const auto doubled = sharp_estimate_check(f, alpha, config.p0, k, 2.0 * window);
          cell.ratio_doubled = doubled.fitted_constant;
        }
        cell.ok = std::isfinite(cell.ratio) && std::isfinite(cell.ratio_doubled);
      },
      config.threads);

  json fitted = json::array();
  for (size_t ai = 0; ai < n_alpha; ++ai) {
    for (int k = 0; k < 3; ++k) {
      double nk = 0.0, nk2 = 0.0;
      bool all_ok = true;
      for (int member = 0; member < members; ++member) {
        const Cell& cell = cells[(ai * 3 + k) * members + member];
        all_ok &= cell.ok;
        nk = std::max(nk, cell.ratio);
        nk2 = std::max(nk2, cell.ratio_doubled);
        Record rec;
        rec.add("alpha", config.alphas[ai]);
        rec.add("k", k);
        rec.add("p0", config.p0);
        rec.add("member", member);
        rec.add("ratio", cell.ratio);
        rec.add("ratio_doubled_window", cell.ratio_doubled);
        report.records.push_back(std::move(rec));
      }
      json entry;
      entry["alpha"] = config.alphas[ai];
      entry["k"] = k;
      entry["n_k"] = nk;
      entry["n_k_doubled_window"] = nk2;
      entry["window_spread"] = std::max(nk, nk2) / std::max(std::min(nk, nk2), 1e-300);
      entry["all_finite"] = all_ok;
      fitted.push_back(entry);
    }
  }

  // homogeneity spot check: scaling the source leaves ratios unchanged
  {
    const Field f = random_field(config.ensemble, tgrid, sgrid, 0);
    Field f10 = f;
    for (auto& v : f10.values) v *= 10.0;
    const double alpha = config.alphas.front();
    const auto a = sharp_estimate_check(f, alpha, config.p0, 0, window);
    const auto b = sharp_estimate_check(f10, alpha, config.p0, 0, window);
    report.summary["scale_invariance_discrepancy"] =
        std::abs(a.fitted_constant - b.fitted_constant) /
        std::max(a.fitted_constant, 1e-300);
  }
  report.summary["fitted"] = fitted;
  return report;
}

// ---------------------------------------------------------------------------
// ap-weights

EstimateReport run_ap_weights(const ExperimentConfig& config) {
  EstimateReport report;
  const int dim = config.grid.dim;
  bool all_agree = true;
  double unit_error = 0.0;
  for (double gamma : config.ap_gammas) {
    const auto w = space_weight(gamma, dim);
    const auto base = ap_characteristic(w, config.ap_p);
    SamplingSpec refined = default_sampling();
    refined.refine_level = 1;
    const auto fine = ap_characteristic(w, config.ap_p, refined);
    const bool stable = !base.diverged && !fine.diverged &&
                        std::abs(fine.value - base.value) <= 0.01 * base.value;
    const bool predicted = w.in_class(config.ap_p);
    all_agree &= stable == predicted;
    if (gamma == 0.0) unit_error = std::abs(base.value - 1.0);

    Record rec;
    rec.add("gamma", gamma);
    rec.add("p", config.ap_p);
    rec.add("dim", dim);
    rec.add("estimate", base.diverged ? -1.0 : base.value);
    rec.add("estimate_refined", fine.diverged ? -1.0 : fine.value);
    rec.add("diverged", base.diverged || fine.diverged ? 1.0 : 0.0);
    rec.add("divergence_radius", base.diverged ? base.divergence_radius : 0.0);
    rec.add("predicted_in_class", predicted ? 1.0 : 0.0);
    rec.add("classified_in_class", stable ? 1.0 : 0.0);
    report.records.push_back(std::move(rec));
  }
  report.summary["all_agree"] = all_agree;
  report.summary["unit_weight_error"] = unit_error;
  return report;
}

}  // namespace

std::string kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::identities: return "verify-identities";
    case ExperimentKind::kernel: return "kernel-table";
    case ExperimentKind::solve: return "solve";
    case ExperimentKind::estimate_ratio: return "estimate-ratio";
    case ExperimentKind::sharp_check: return "sharp-check";
    case ExperimentKind::ap_weights: return "ap-weights";
  }
  throw ParameterError("unknown experiment kind");
}

ExperimentKind kind_from_name(const std::string& name) {
  if (name == "verify-identities" || name == "identities") return ExperimentKind::identities;
  if (name == "kernel-table" || name == "kernel") return ExperimentKind::kernel;
  if (name == "solve") return ExperimentKind::solve;
  if (name == "estimate-ratio") return ExperimentKind::estimate_ratio;
  if (name == "sharp-check") return ExperimentKind::sharp_check;
  if (name == "ap-weights") return ExperimentKind::ap_weights;
  throw ParameterError("unknown experiment kind: " + name);
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig config;
  config.kind = kind;
  switch (kind) {
    case ExperimentKind::identities:
      config.alphas = {0.3, 0.7, 1.2};
      config.betas = {0.3, 0.7};
      config.grid.t_end = 2.0;
      config.grid.n_steps = 4096;
      config.refine = 1;
      break;
    case ExperimentKind::kernel:
      config.alphas = {0.5, 1.0, 1.5};
      config.grid.dim = 1;
      config.grid.box_length = 40.0;
      config.grid.n_points = 1024;
      break;
    case ExperimentKind::solve:
      config.alphas = {0.5, 1.0, 1.5};
      config.grid.box_length = 40.0;
      config.grid.n_points = 128;
      config.grid.n_steps = 512;
      config.grid.t_end = 1.0;
      config.refine = 2;
      break;
    case ExperimentKind::estimate_ratio:
      config.grid.box_length = 40.0;
      config.grid.n_points = 512;
      config.grid.n_steps = 512;
      config.grid.t_end = 8.0;
      config.horizons = {1.0, 2.0, 4.0, 8.0};
      config.ensemble.count = 50;
      break;
    case ExperimentKind::sharp_check:
      config.grid.box_length = 20.0;
      config.grid.n_points = 64;
      config.grid.n_steps = 64;
      config.grid.t_end = 1.0;
      config.ensemble.count = 8;
      break;
    case ExperimentKind::ap_weights:
      break;
  }
  return config;
}

ExperimentConfig config_from_json(const json& j) {
  const ExperimentKind kind = kind_from_name(j.at("kind").get<std::string>());
  ExperimentConfig config = default_config(kind);
  if (j.contains("alphas")) config.alphas = j.at("alphas").get<std::vector<double>>();
  if (j.contains("betas")) config.betas = j.at("betas").get<std::vector<double>>();
  if (j.contains("pq")) {
    config.pq.clear();
    for (const auto& pair : j.at("pq"))
      config.pq.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
  }
  if (j.contains("gamma1_scales"))
    config.gamma1_scales = j.at("gamma1_scales").get<std::vector<double>>();
  if (j.contains("gamma2_scales"))
    config.gamma2_scales = j.at("gamma2_scales").get<std::vector<double>>();
  if (j.contains("horizons")) config.horizons = j.at("horizons").get<std::vector<double>>();
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    if (g.contains("dim")) config.grid.dim = g.at("dim").get<int>();
    if (g.contains("box_length")) config.grid.box_length = g.at("box_length").get<double>();
    if (g.contains("n_points")) config.grid.n_points = g.at("n_points").get<int>();
    if (g.contains("n_steps")) config.grid.n_steps = g.at("n_steps").get<int>();
    if (g.contains("t_end")) config.grid.t_end = g.at("t_end").get<double>();
  }
  if (j.contains("ensemble")) {
    const auto& e = j.at("ensemble");
    if (e.contains("count")) config.ensemble.count = e.at("count").get<int>();
    if (e.contains("seed")) config.ensemble.seed = e.at("seed").get<uint64_t>();
    if (e.contains("cutoff_fraction"))
      config.ensemble.cutoff_fraction = e.at("cutoff_fraction").get<double>();
    if (e.contains("n_time_modes"))
      config.ensemble.n_time_modes = e.at("n_time_modes").get<int>();
    if (e.contains("amplitude")) config.ensemble.amplitude = e.at("amplitude").get<double>();
  }
  if (j.contains("p0")) config.p0 = j.at("p0").get<double>();
  if (j.contains("ap_gammas")) config.ap_gammas = j.at("ap_gammas").get<std::vector<double>>();
  if (j.contains("ap_p")) config.ap_p = j.at("ap_p").get<double>();
  if (j.contains("refine")) config.refine = j.at("refine").get<int>();
  if (j.contains("threads")) config.threads = j.at("threads").get<int>();
  if (j.contains("out_dir")) config.out_dir = j.at("out_dir").get<std::string>();
  return config;
}

json config_to_json(const ExperimentConfig& config) {
  json j;
  j["kind"] = kind_name(config.kind);
  j["alphas"] = config.alphas;
  j["betas"] = config.betas;
  json pq = json::array();
  for (const auto& [p, q] : config.pq) pq.push_back({p, q});
  j["pq"] = pq;
  j["gamma1_scales"] = config.gamma1_scales;
  j["gamma2_scales"] = config.gamma2_scales;
  j["horizons"] = config.horizons;
  j["grid"] = {{"dim", config.grid.dim},
               {"box_length", config.grid.box_length},
               {"n_points", config.grid.n_points},
               {"n_steps", config.grid.n_steps},
               {"t_end", config.grid.t_end}};
  j["ensemble"] = {{"count", config.ensemble.count},
                   {"seed", config.ensemble.seed},
                   {"cutoff_fraction", config.ensemble.cutoff_fraction},
                   {"n_time_modes", config.ensemble.n_time_modes},
                   {"amplitude", config.ensemble.amplitude}};
  j["p0"] = config.p0;
  j["ap_gammas"] = config.ap_gammas;
  j["ap_p"] = config.ap_p;
  j["refine"] = config.refine;
  j["threads"] = config.threads;
  j["out_dir"] = config.out_dir;
  return j;
}

double Record::get(const std::string& name) const {
  for (const auto& [key, value] : fields)
    if (key == name) return value;
  throw ParameterError("Record: no field named " + name);
}

EstimateReport run_experiment(const ExperimentConfig& config) {
  Timer timer;
  EstimateReport report;
  switch (config.kind) {
    case ExperimentKind::identities: report = run_identities(config); break;
    case ExperimentKind::kernel: report = run_kernel(config); break;
    case ExperimentKind::solve: report = run_solve(config); break;
    case ExperimentKind::estimate_ratio: report = run_estimate_ratio(config); break;
    case ExperimentKind::sharp_check: report = run_sharp_check(config); break;
    case ExperimentKind::ap_weights: report = run_ap_weights(config); break;
  }
  report.kind = kind_name(config.kind);
  report.config_echo = config_to_json(config);
  report.version = kVersion;
  report.runtime_seconds = timer.seconds();
  return report;
}

void emit_report(const EstimateReport& report, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);

  json doc;
  doc["format"] = "fracdiff-report";
  doc["version"] = report.version;
  doc["kind"] = report.kind;
  const std::string config_dump = report.config_echo.dump();
  std::ostringstream checksum;
  checksum << std::hex << fnv1a(config_dump.data(), config_dump.size());
  doc["config_checksum"] = checksum.str();
  doc["config"] = report.config_echo;
  json records = json::array();
  for (const auto& rec : report.records) {
    json row;
    for (const auto& [key, value] : rec.fields) row[key] = value;
    records.push_back(row);
  }
  doc["records"] = records;
  doc["summary"] = report.summary;
  doc["timing"] = {{"runtime_seconds", report.runtime_seconds}};

  std::ofstream json_out(out_dir + "/report.json");
  if (!json_out) throw SerializationError("cannot write " + out_dir + "/report.json");
  json_out << doc.dump(2) << "\n";

  std::ofstream csv(out_dir + "/records.csv");
  if (!csv) throw SerializationError("cannot write " + out_dir + "/records.csv");
  if (!report.records.empty()) {
    const auto& first = report.records.front();
    for (size_t i = 0; i < first.fields.size(); ++i)
      csv << (i ? "," : "") << first.fields[i].first;
    csv << "\n";
    for (const auto& rec : report.records) {
      for (size_t i = 0; i < rec.fields.size(); ++i)
        csv << (i ? "," : "") << format_double(rec.fields[i].second);
      csv << "\n";
    }
  }

  std::ofstream txt(out_dir + "/summary.txt");
  if (!txt) throw SerializationError("cannot write " + out_dir + "/summary.txt");
  txt << "experiment: " << report.kind << "\n";
  txt << "records:    " << report.records.size() << "\n";
  txt << "runtime:    " << report.runtime_seconds << " s\n\n";
  txt << report.summary.dump(2) << "\n";
}

EstimateReport parse_report(const std::string& out_dir) {
  std::ifstream in(out_dir + "/report.json");
  if (!in) throw SerializationError("cannot open " + out_dir + "/report.json");
  json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw SerializationError(std::string("malformed report.json: ") + e.what());
  }
  if (doc.value("format", "") != "fracdiff-report")
    throw SerializationError("not a fracdiff report: " + out_dir);
  EstimateReport report;
  report.kind = doc.at("kind").get<std::string>();
  report.version = doc.at("version").get<std::string>();
  report.config_echo = doc.at("config");
  report.summary = doc.at("summary");
  for (const auto& row : doc.at("records")) {
    Record rec;
    for (auto it = row.begin(); it != row.end(); ++it)
      rec.add(it.key(), it.value().get<double>());
    report.records.push_back(std::move(rec));
  }
  return report;
}

}  // namespace fracdiff
