/*******************************************************************************
 * Copyright (c) 2026 The qecdecay Authors.                                    *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#include "qecdecay/cli/runner.hpp"
#include "qecdecay/codes.hpp"
#include "qecdecay/version.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kSizing = 3, kNumerical = 4 };

int run_command(const std::string &file, const qecdecay::cli::RunOptions &opt) {
  const auto scenario = qecdecay::cli::parse_scenario(qecdecay::cli::read_file(file));
  const auto manifest = qecdecay::cli::run(scenario, opt);
  std::cout << "wrote " << manifest.files.size() << " files to " << manifest.output_dir
            << " in " << manifest.duration_seconds << " s\n";
  for (const auto &f : manifest.fits)
    std::printf("  %-32s exponent %.4f  coefficient %.6g  window [%.3g, %.3g]\n",
                f.label.c_str(), f.fit.exponent, f.fit.coefficient(), f.fit.t_min,
                f.fit.t_max);
  if (manifest.svg_dropped_points)
    std::cerr << "warning: " << manifest.svg_dropped_points
              << " nonpositive points dropped from log-scale plots\n";
  return kOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Short-time decoherence of error-corrected qubit registers"};
  app.set_version_flag("--version", qecdecay::kVersion);
  app.require_subcommand(1);

  std::string file;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::size_t workers = 0;
  bool no_svg = false;
  auto *run = app.add_subcommand("run", "Execute a scenario file");
  run->add_option("scenario", file, "Scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (overrides [output] dir)");
  run->add_option("--seed", seed, "Seed (replaces [environment] seed and seeds)");
  run->add_option("--workers", workers, "Worker threads (0 = all cores)");
  run->add_flag("--no-svg", no_svg, "Skip SVG plots");

  std::size_t k_max = 3, n_max = 20;
  auto *bounds = app.add_subcommand("bounds", "Print the Hamming / GV table as CSV");
  bounds->add_option("--k-max", k_max, "Largest correctable rank")->check(CLI::Range(1, 61));
  bounds->add_option("--n-max", n_max, "Largest code length")->check(CLI::Range(1, 62));

  auto *x0 = app.add_subcommand("x0", "Print the asymptotic lower rate x0");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      qecdecay::cli::RunOptions opt;
      opt.out_dir = out_dir;
      opt.seed = seed;
      opt.workers = workers;
      if (no_svg)
        opt.svg = false;
      return run_command(file, opt);
    }
    if (*bounds) {
      std::cout << qecdecay::codes::bounds_table(1, k_max, 1, n_max).str();
      return kOk;
    }
    if (*x0) {
      const double x = qecdecay::codes::asymptotic_x0();
      std::printf("x0 = %.10f\nresidual = %.3e\n", x,
                  qecdecay::codes::hamming_exponent(2.0 * x) - std::log(2.0));
      return kOk;
    }
  } catch (const qecdecay::ConfigError &e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const qecdecay::SizingError &e) {
    std::cerr << "sizing error: " << e.what() << '\n';
    return kSizing;
  } catch (const qecdecay::ValidationError &e) {
    std::cerr << "numerical validation failed: " << e.what() << '\n';
    return kNumerical;
  } catch (const qecdecay::FitError &e) {
    std::cerr << "numerical validation failed: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}
