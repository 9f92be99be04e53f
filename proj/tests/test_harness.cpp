#include "doctest.h"

#include "fracdiff/experiment.hpp"
#include "fracdiff/fft.hpp"
#include "fracdiff/random_field.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace fracdiff;

namespace {
std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

TEST_CASE("random fields are deterministic and windowed") {
  EnsembleSpec spec;
  spec.seed = 99;
  const TimeGrid tg(2.0, 48);
  const SpaceGrid sg(1, 20.0, 64);
  const Field a = random_field(spec, tg, sg, 3);
  const Field b = random_field(spec, tg, sg, 3);
  CHECK(a.values == b.values);

  const Field c = random_field(spec, tg, sg, 4);
  CHECK(a.values != c.values);

  for (long s = 0; s < a.n_space(); ++s) CHECK(a.at(0, s) == 0.0);
}

TEST_CASE("random fields are band-limited") {
  EnsembleSpec spec;
  spec.cutoff_fraction = 0.25;
  const TimeGrid tg(1.0, 16);
  const SpaceGrid sg(1, 20.0, 128);
  const Field f = random_field(spec, tg, sg, 0);
  const int k_max = cutoff_index(spec, sg) + 2;  // window widens by two modes

  const Dft dft(sg);
  std::vector<std::complex<double>> modes(sg.n_total());
  double inside = 0.0, outside = 0.0;
  for (int t = 0; t < tg.n_nodes(); ++t) {
    slab_to_modes(dft, sg, f.slab(t), modes.data());
    for (int k = 0; k < sg.n_points; ++k) {
      const int signed_k = k <= sg.n_points / 2 ? k : k - sg.n_points;
      const double mass = std::norm(modes[k]);
      if (std::abs(signed_k) <= k_max)
        inside += mass;
      else
        outside += mass;
    }
  }
  CHECK(outside <= 1e-10 * inside);
}

TEST_CASE("config round-trips through json with defaults") {
  const auto config = default_config(ExperimentKind::estimate_ratio);
  const auto j = config_to_json(config);
  const auto back = config_from_json(j);
  CHECK(config_to_json(back) == j);

  // partial configs inherit kind defaults
  nlohmann::ordered_json partial;
  partial["kind"] = "sharp-check";
  partial["ensemble"] = {{"count", 3}, {"seed", 7}};
  const auto parsed = config_from_json(partial);
  CHECK(parsed.kind == ExperimentKind::sharp_check);
  CHECK(parsed.ensemble.count == 3);
  CHECK(parsed.ensemble.seed == 7);
  CHECK(parsed.grid.n_points == 64);
}

TEST_CASE("ap-weights experiment classifies the probe exponents") {
  auto config = default_config(ExperimentKind::ap_weights);
  const auto report = run_experiment(config);
  CHECK(report.summary.at("all_agree").get<bool>());
  CHECK(report.summary.at("unit_weight_error").get<double>() <= 1e-12);
  CHECK(report.records.size() == config.ap_gammas.size());
}

TEST_CASE("identities experiment on a reduced grid") {
  auto config = default_config(ExperimentKind::identities);
  config.alphas = {0.5};
  config.betas = {0.5};
  config.grid.n_steps = 1024;
  config.refine = 1;
  const auto report = run_experiment(config);
  CHECK(report.records.size() == 2);
  for (const auto& entry : report.summary.at("cases")) {
    CHECK(entry.at("final_max_error").get<double>() < 5e-3);
    CHECK(entry.at("refinement_gain").get<double>() >= 1.5);
  }
}

TEST_CASE("emit and parse round-trip, bit-exact reruns") {
  auto config = default_config(ExperimentKind::sharp_check);
  config.alphas = {0.7};
  config.ensemble.count = 2;
  config.grid.n_points = 16;
  config.grid.n_steps = 16;
  config.grid.box_length = 10.0;
  const std::string dir_a = "/tmp/fracdiff_harness_a";
  const std::string dir_b = "/tmp/fracdiff_harness_b";
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);

  const auto report_a = run_experiment(config);
  emit_report(report_a, dir_a);
  const auto report_b = run_experiment(config);
  emit_report(report_b, dir_b);

  CHECK(slurp(dir_a + "/records.csv") == slurp(dir_b + "/records.csv"));

  const auto parsed = parse_report(dir_a);
  CHECK(parsed.kind == report_a.kind);
  CHECK(parsed.config_echo == report_a.config_echo);
  CHECK(parsed.summary == report_a.summary);
  REQUIRE(parsed.records.size() == report_a.records.size());
  for (size_t i = 0; i < parsed.records.size(); ++i) {
    REQUIRE(parsed.records[i].fields.size() == report_a.records[i].fields.size());
    for (size_t f = 0; f < parsed.records[i].fields.size(); ++f) {
      CHECK(parsed.records[i].fields[f].first == report_a.records[i].fields[f].first);
      CHECK(parsed.records[i].fields[f].second == report_a.records[i].fields[f].second);
    }
  }
  // empty report still emits valid artifacts
  EstimateReport empty;
  empty.kind = "estimate-ratio";
  empty.config_echo = config_to_json(config);
  empty.summary = nlohmann::ordered_json::object();
  emit_report(empty, dir_a);
  const auto parsed_empty = parse_report(dir_a);
  CHECK(parsed_empty.records.empty());
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);
}

TEST_CASE("small estimate-ratio run produces finite stable constants") {
  auto config = default_config(ExperimentKind::estimate_ratio);
  config.alphas = {0.5};
  config.pq = {{2.0, 2.0}};
  config.gamma1_scales = {0.0, 0.4};
  config.gamma2_scales = {0.0};
  config.horizons = {0.5, 1.0};
  config.grid.n_points = 32;
  config.grid.n_steps = 64;
  config.grid.t_end = 1.0;
  config.grid.box_length = 20.0;
  config.ensemble.count = 4;
  const auto report = run_experiment(config);
  // 2 gamma1 x 2 horizons x 4 members
  CHECK(report.records.size() == 16);
  for (const auto& rec : report.records) {
    CHECK(std::isfinite(rec.get("ratio0")));
    CHECK(std::isfinite(rec.get("ratio1")));
    CHECK(rec.get("ratio0") >= 0.0);
    CHECK(rec.get("ratio1") >= rec.get("ratio0"));
  }
  CHECK(report.summary.at("unit_weight_max_discrepancy").get<double>() <= 1e-12);
  CHECK(report.summary.at("failures").empty());
  for (const auto& entry : report.summary.at("stability")) {
    CHECK(entry.at("n0_spread").get<double>() >= 1.0);
  }
}
