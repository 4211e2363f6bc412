/*******************************************************************************
 * Copyright (c) 2026 The qecdecay Authors.                                    *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#include "qecdecay/cli/runner.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <fstream>

using namespace qecdecay;
using namespace qecdecay::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string &name) {
  const fs::path p = fs::temp_directory_path() / "qecdecay_test_cli" / name;
  fs::remove_all(p);
  return p;
}

ConfigError parse_error(const std::string &text) {
  try {
    (void)parse_scenario(text);
  } catch (const ConfigError &e) {
    return e;
  }
  ADD_FAILURE() << "no ConfigError for:\n" << text;
  return ConfigError(0, "", "");
}

Series one_series() {
  return {"E", {{1e-3, 1e-12}, {1e-2, 1e-8}, {1e-1, 1e-4}}};
}

} // namespace

TEST(Scenario, MinimalBoundsTableGetsDefaults) {
  const auto s = parse_scenario("[scenario]\nkind = bounds_table\n");
  EXPECT_EQ(s.kind, ScenarioKind::bounds_table);
  EXPECT_EQ(s.name, "bounds_table");
  EXPECT_EQ(s.bounds.n_min, 1u);
  EXPECT_EQ(s.bounds.n_max, 20u);
  EXPECT_EQ(s.environment.seed, 42u);
  EXPECT_EQ(s.run_seeds(), std::vector<std::uint64_t>{42});
}

TEST(Scenario, CommentsListsAndWhitespace) {
  const auto s = parse_scenario(R"(
# leading comment
[scenario]
kind = scaling_sweep   # trailing comment
name = demo
[code]
id = repetition3
[interaction]
kind = contact
terms = 0.5 XXI, 0.25 ZIZ
[environment]
seeds = 3, 1 ,2
[time]
start = 0.001
end = 0.01
points = 9
spacing = linear
)");
  EXPECT_EQ(s.name, "demo");
  EXPECT_EQ(s.code_id, "repetition3");
  ASSERT_EQ(s.interaction.terms.size(), 2u);
  EXPECT_EQ(s.interaction.terms[1].word, "ZIZ");
  EXPECT_DOUBLE_EQ(s.interaction.terms[1].omega, 0.25);
  EXPECT_EQ(s.run_seeds(), (std::vector<std::uint64_t>{3, 1, 2}));
  EXPECT_EQ(s.time.spacing, Spacing::linear);
}

TEST(Scenario, UnknownEnumNamesTheKey) {
  const auto e = parse_error("[scenario]\nkind = sweep_everything\n");
  EXPECT_EQ(e.key(), "scenario.kind");
  EXPECT_EQ(e.line(), 2u);
  EXPECT_NE(std::string(e.what()).find("sweep_everything"), std::string::npos);
  EXPECT_EQ(parse_error("[scenario]\nkind = scaling_sweep\n[code]\nid = five_qubit\n"
                        "[time]\nspacing = cubic\n")
                .key(),
            "time.spacing");
}

TEST(Scenario, UnknownKeyAndSection) {
  const auto e = parse_error("[scenario]\nkind = bounds_table\ncolour = blue\n");
  EXPECT_EQ(e.line(), 3u);
  EXPECT_EQ(e.key(), "scenario.colour");
  EXPECT_EQ(parse_error("[scenario]\nkind = bounds_table\n[plots]\n").key(), "plots");
  EXPECT_EQ(parse_error("kind = bounds_table\n").key(), "kind");
  EXPECT_EQ(parse_error("[scenario]\nkind bounds_table\n").line(), 2u);
}

TEST(Scenario, MissingSections) {
  EXPECT_EQ(parse_error("[code]\nid = five_qubit\n").key(), "scenario");
  EXPECT_EQ(parse_error("[scenario]\nkind = scaling_sweep\n[time]\npoints = 3\n").key(), "code");
  EXPECT_EQ(parse_error("[scenario]\nkind = periodic_correction\n[code]\nid = five_qubit\n").key(),
            "periodic");
  EXPECT_EQ(parse_error("[scenario]\nname = x\n").key(), "scenario.kind");
}

TEST(Scenario, InvalidValues) {
  const std::string head = "[scenario]\nkind = scaling_sweep\n[code]\nid = five_qubit\n[time]\n";
  EXPECT_EQ(parse_error(head + "points = -3\n").key(), "time.points");
  EXPECT_EQ(parse_error(head + "points = 0\n").key(), "time.points");
  EXPECT_EQ(parse_error(head + "start = abc\n").key(), "time.start");
  EXPECT_EQ(parse_error(head + "start = 0.5\nend = 0.1\n").key(), "time.end");
  EXPECT_EQ(parse_error(head + "start = 0\n").key(), "time.start");
  EXPECT_EQ(parse_error("[scenario]\nkind = scaling_sweep\n[code]\nid = steane\n[time]\n").key(),
            "code.id");
  EXPECT_EQ(parse_error(head + "[interaction]\nkind = contact\n").key(), "interaction.terms");
  EXPECT_EQ(parse_error(head + "[interaction]\nterms = 1.0 XQ\n").key(), "interaction.terms");
  EXPECT_EQ(parse_error(head + "[output]\nsvg = maybe\n").key(), "output.svg");
  EXPECT_EQ(parse_error(head + "[states]\nn_theta = 4\n").key(), "states.n_theta");
  EXPECT_EQ(parse_error(head + "start = 1\nstart = 2\n").key(), "time.start");
}

TEST(Scenario, RoundTrip) {
  Scenario s;
  s.kind = ScenarioKind::periodic_correction;
  s.name = "round_trip";
  s.code_id = "repetition5";
  s.interaction.kind = InteractionKind::contact;
  s.interaction.terms = {{0.1 + 0.2, "XXIII"}, {-1e-7, "IIZZZ"}};
  s.interaction.omegas = {1.0 / 3.0, 2.0 / 7.0};
  s.environment.seeds = {5, 6};
  s.environment.beta = 0.123456789012345678;
  s.time.start = 1.0 / 3.0;
  s.time.end = 7.5;
  s.time.spacing = Spacing::linear;
  s.periodic.dt_factors = {1.0, 1.0 / 3.0};
  s.periodic.reset_environment = true;
  s.output.svg = false;
  const auto text = serialize(s);
  const auto back = parse_scenario(text);
  EXPECT_EQ(back, s);
  EXPECT_EQ(serialize(back), text);
  const auto defaults = parse_scenario("[scenario]\nkind = bounds_table\n");
  EXPECT_EQ(parse_scenario(serialize(defaults)), defaults);
}

TEST(Scenario, ShippedScenarioFilesParse) {
  int count = 0;
  for (const auto &entry : fs::directory_iterator(QECDECAY_SCENARIO_DIR)) {
    if (entry.path().extension() != ".ini")
      continue;
    const auto s = parse_scenario(read_file(entry.path()));
    EXPECT_EQ(parse_scenario(serialize(s)), s) << entry.path();
    EXPECT_LE(joint_dimension(s), tol::dimension_cap);
    ++count;
  }
  EXPECT_GE(count, 5);
}

TEST(Svg, OneSeriesOnePolyline) {
  const auto r = emit_svg({one_series()}, {"demo", "t", "E", true, true});
  std::size_t count = 0;
  for (auto pos = r.text.find("<polyline"); pos != std::string::npos;
       pos = r.text.find("<polyline", pos + 1))
    ++count;
  EXPECT_EQ(count, 1u);
  EXPECT_EQ(r.dropped, 0u);
  EXPECT_EQ(r.text.rfind("<svg", 0), 0u);
  EXPECT_NE(r.text.find("</svg>"), std::string::npos);
  EXPECT_EQ(r.text.find("href"), std::string::npos);
}

TEST(Svg, LogAxesDropNonpositive) {
  Series s = one_series();
  s.points.push_back({0.5, 0.0});
  s.points.push_back({-1.0, 1.0});
  const auto r = emit_svg({s}, {"demo", "t", "E", true, true});
  EXPECT_EQ(r.dropped, 2u);
  const auto lin = emit_svg({s}, {"demo", "t", "E", false, false});
  EXPECT_EQ(lin.dropped, 0u);
}

TEST(Svg, Errors) {
  EXPECT_THROW(emit_svg({}, {}), ValidationError);
  EXPECT_THROW(emit_svg({Series{"z", {{1.0, 0.0}}}}, {"", "", "", true, true}), ValidationError);
}

TEST(Svg, EscapesLabels) {
  const auto r = emit_svg({Series{"a<b & c", {{1.0, 2.0}, {2.0, 3.0}}}}, {"x\"y", "t", "E"});
  EXPECT_NE(r.text.find("a&lt;b &amp; c"), std::string::npos);
  EXPECT_NE(r.text.find("x&quot;y"), std::string::npos);
}

TEST(Svg, MatchesGoldenFile) {
  const auto a = emit_svg({one_series(), Series{"bound", {{1e-3, 1e-11}, {1e-1, 1e-3}}}},
                          {"golden", "t", "E(t)", true, true});
  const auto b = emit_svg({one_series(), Series{"bound", {{1e-3, 1e-11}, {1e-1, 1e-3}}}},
                          {"golden", "t", "E(t)", true, true});
  EXPECT_EQ(a.text, b.text);
  EXPECT_EQ(a.text, read_file(fs::path(QECDECAY_GOLDEN_DIR) / "two_series.svg"));
}

TEST(Runner, TimeGrid) {
  Scenario::Time g;
  g.start = 1e-3;
  g.end = 1e-1;
  g.points = 3;
  const auto t = time_grid(g);
  EXPECT_NEAR(t[1], 1e-2, 1e-16);
  g.spacing = Spacing::linear;
  EXPECT_NEAR(time_grid(g)[1], 0.0505, 1e-16);
  g.points = 1;
  EXPECT_EQ(time_grid(g), std::vector<double>{1e-3});
}

TEST(Runner, BoundsTableRun) {
  auto s = parse_scenario(
      "[scenario]\nkind = bounds_table\n[bounds]\nk_min = 1\nk_max = 2\nn_max = 12\n");
  const auto dir = scratch("bounds");
  const auto m = run(s, {.out_dir = dir.string()});
  ASSERT_EQ(m.files.size(), 1u);
  const auto csv = read_file(dir / m.files[0].path);
  EXPECT_NE(csv.find("\n5,1,true,"), std::string::npos);
  EXPECT_NE(csv.find("\n10,2,true,"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "bounds_table_manifest.json"));
}

TEST(Runner, ScalingSweepFitSummary) {
  auto s = parse_scenario(read_file(fs::path(QECDECAY_SCENARIO_DIR) / "five_qubit_sweep.ini"));
  const auto dir = scratch("sweep");
  const auto m = run(s, {.out_dir = dir.string(), .seed = 42, .workers = 2});
  ASSERT_EQ(m.fits.size(), 1u);
  EXPECT_NEAR(m.fits[0].fit.exponent, 4.0, 0.1);
  EXPECT_EQ(m.seeds, std::vector<std::uint64_t>{42});
  const auto csv = read_file(dir / "five_qubit_sweep_seed42.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,E,bound_eq14,argmax_theta,argmax_phi");
  const auto fits = read_file(dir / "five_qubit_sweep_fits.csv");
  EXPECT_EQ(fits.substr(0, fits.find('\n')),
            "scenario,exponent,log_coefficient,window_min,window_max,residual");
  EXPECT_NE(fits.find("five_qubit_sweep_seed42,"), std::string::npos);
}

TEST(Runner, IntroExampleExponents) {
  auto s = parse_scenario(read_file(fs::path(QECDECAY_SCENARIO_DIR) / "intro_example.ini"));
  const auto m = run(s, {.out_dir = scratch("intro").string(), .svg = false});
  ASSERT_EQ(m.fits.size(), 2u);
  EXPECT_NEAR(m.fits[0].fit.exponent, 6.0, 0.2);
  EXPECT_NEAR(m.fits[1].fit.exponent, 4.0, 0.2);
  for (const auto &f : m.files)
    EXPECT_NE(fs::path(f.path).extension(), ".svg");
}

TEST(Runner, PeriodicOutputs) {
  auto s = parse_scenario("[scenario]\nkind = periodic_correction\nname = p\n[code]\nid = "
                          "repetition3\n[periodic]\ncycles = 10\ndt_factors = 1, 0.5\n");
  const auto dir = scratch("periodic");
  const auto m = run(s, {.out_dir = dir.string()});
  const auto csv = read_file(dir / "p_dt0_recovered.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "cycle,total_t,fidelity");
  const auto rates = read_file(dir / "p_rates.csv");
  EXPECT_EQ(std::count(rates.begin(), rates.end(), '\n'), 5);
  EXPECT_EQ(m.files.size(), 4u + 1u + 1u);
}

TEST(Runner, SizingGuardTriggersUpfront) {
  auto s = parse_scenario("[scenario]\nkind = scaling_sweep\n[code]\nid = five_qubit\n"
                          "[environment]\nd_e = 9\n[time]\n");
  EXPECT_THROW(run(s, {.out_dir = scratch("sizing").string()}), SizingError);
  EXPECT_FALSE(fs::exists(scratch("sizing")));
  s.environment.d_e = 8;
  EXPECT_EQ(joint_dimension(s), 4096u);

  // Would need a 2^25-dimensional space; must fail instantly.
  s.code_id = "repetition13";
  s.environment.d_e = 1;
  const auto t0 = std::chrono::steady_clock::now();
  EXPECT_THROW(check_sizing(s, tol::dimension_cap), SizingError);
  EXPECT_THROW(run(s, {.out_dir = scratch("sizing").string()}), SizingError);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 0.5);
}

TEST(Runner, DeterministicAcrossRunsAndWorkerCounts) {
  auto s = parse_scenario(read_file(fs::path(QECDECAY_SCENARIO_DIR) / "watchdog.ini"));
  const auto a = run(s, {.out_dir = scratch("det_a").string(), .workers = 1});
  const auto b = run(s, {.out_dir = scratch("det_b").string(), .workers = 3});
  ASSERT_EQ(a.files.size(), b.files.size());
  for (std::size_t i = 0; i < a.files.size(); ++i) {
    EXPECT_EQ(a.files[i].path, b.files[i].path);
    EXPECT_EQ(a.files[i].sha256, b.files[i].sha256) << a.files[i].path;
  }
}

TEST(Runner, ManifestDetectsDrift) {
  auto s = parse_scenario(read_file(fs::path(QECDECAY_SCENARIO_DIR) / "watchdog.ini"));
  const auto dir = scratch("drift");
  const auto m = run(s, {.out_dir = dir.string()});
  EXPECT_TRUE(verify_manifest(m).empty());
  EXPECT_EQ(m.version, kVersion);
  EXPECT_EQ(parse_scenario(m.scenario), [&] {
    auto e = s;
    e.output.dir = dir.string();
    return e;
  }());
  for (const auto &f : m.files)
    EXPECT_EQ(f.sha256, sha256_hex(read_file(dir / f.path)));
  {
    std::ofstream os(dir / m.files[0].path, std::ios::app);
    os << "tampered\n";
  }
  fs::remove(dir / m.files[1].path);
  const auto drift = verify_manifest(m);
  ASSERT_EQ(drift.size(), 2u);
  EXPECT_EQ(drift[0], m.files[0].path);
  const auto json = nlohmann::json::parse(read_file(dir / "watchdog_manifest.json"));
  EXPECT_EQ(json["seeds"][0], 42);
  EXPECT_EQ(json["files"].size(), m.files.size());
}

TEST(Runner, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
