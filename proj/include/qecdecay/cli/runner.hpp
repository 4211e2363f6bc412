/*******************************************************************************
 * Copyright (c) 2026 The qecdecay Authors.                                    *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#pragma once

#include "qecdecay/cli/manifest.hpp"
#include "qecdecay/cli/scenario.hpp"
#include "qecdecay/cli/svg.hpp"
#include "qecdecay/codes.hpp"
#include "qecdecay/csv.hpp"
#include "qecdecay/dynamics.hpp"
#include "qecdecay/metrics.hpp"
#include "qecdecay/parallel.hpp"
#include "qecdecay/random.hpp"
#include "qecdecay/tolerances.hpp"
#include "qecdecay/version.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace qecdecay::cli {

struct RunOptions {
  std::optional<std::string> out_dir; // overrides [output] dir
  std::optional<std::uint64_t> seed;  // replaces seed and seeds
  std::size_t workers = 0;            // 0: hardware concurrency
  std::optional<bool> svg;            // overrides [output] svg
  std::size_t dimension_cap = tol::dimension_cap;
};

/// Sample times of a scenario's grid, strictly increasing.
inline std::vector<double> time_grid(const Scenario::Time &g) {
  std::vector<double> t(g.points);
  for (std::size_t i = 0; i < g.points; ++i) {
    const double f = g.points == 1 ? 0.0
                                   : static_cast<double>(i) / static_cast<double>(g.points - 1);
    t[i] = g.spacing == Spacing::log ? g.start * std::pow(g.end / g.start, f)
                                     : g.start + (g.end - g.start) * f;
  }
  return t;
}

/// d_e * 2^n * 2^ancilla for the scenario, checked against the cap before
/// anything is allocated.
inline std::size_t joint_dimension(const Scenario &s) {
  if (s.kind == ScenarioKind::bounds_table)
    return 1;
  const auto shape = codes::code_shape(s.code_id);
  if (!shape)
    throw ConfigError(0, "code.id", "unknown code '" + s.code_id + "'");
  const std::size_t de = s.kind == ScenarioKind::intro_example ? 1 : s.environment.d_e;
  const std::size_t bits = shape->n + shape->ancillas;
  if (bits >= 40)
    return std::numeric_limits<std::size_t>::max();
  const std::size_t reg = std::size_t{1} << bits;
  if (de > std::numeric_limits<std::size_t>::max() / reg)
    return std::numeric_limits<std::size_t>::max();
  return de * reg;
}

inline void check_sizing(const Scenario &s, std::size_t cap) {
  const std::size_t dim = joint_dimension(s);
  if (dim > cap)
    throw SizingError("joint space d_e * 2^n * 2^ancilla = " +
                      (dim == std::numeric_limits<std::size_t>::max() ? std::string("overflow")
                                                                      : std::to_string(dim)) +
                      " exceeds the cap of " + std::to_string(cap) + " for code '" +
                      s.code_id + "' with d_e = " + std::to_string(s.environment.d_e));
}

namespace detail {

struct Output {
  std::string name;
  std::string content;
};

struct SweepRow {
  double t = 0.0;
  metrics::SupResult sup;
  double fixed = 0.0; // E_psi at the scenario's fixed logical state
};

inline std::vector<SweepRow> sweep(const metrics::ChannelModel &model,
                                   const std::vector<double> &times,
                                   const Scenario::States &states, std::size_t workers) {
  const metrics::StateGrid grid{states.n_theta, states.n_phi};
  const auto psi = metrics::LogicalState::bloch(states.theta, states.phi);
  return parallel_map(times.size(), workers, [&](std::size_t i) {
    const auto slice = model.at(times[i]);
    return SweepRow{times[i], metrics::code_error(slice, grid), slice.error(psi)};
  });
}

inline std::vector<metrics::Sample> sup_samples(const std::vector<SweepRow> &rows) {
  std::vector<metrics::Sample> out;
  for (const auto &r : rows)
    out.push_back({r.t, r.sup.value});
  return out;
}

inline std::vector<metrics::Sample> fixed_samples(const std::vector<SweepRow> &rows) {
  std::vector<metrics::Sample> out;
  for (const auto &r : rows)
    out.push_back({r.t, r.fixed});
  return out;
}

inline csv::Table sweep_table(const std::vector<SweepRow> &rows, std::size_t k, double v_norm) {
  csv::Table t({"t", "E", "bound_eq14", "argmax_theta", "argmax_phi"});
  for (const auto &r : rows)
    t.add_row({csv::real(r.t), csv::real(r.sup.value),
               csv::real(metrics::error_bound(r.t, k, v_norm)), csv::real(r.sup.theta),
               csv::real(r.sup.phi)});
  return t;
}

inline csv::Table fit_table() {
  return csv::Table(
      {"scenario", "exponent", "log_coefficient", "window_min", "window_max", "residual"});
}

inline void add_fit(csv::Table &t, const FitRecord &r) {
  t.add_row({r.label, csv::real(r.fit.exponent), csv::real(r.fit.log_coefficient),
             csv::real(r.fit.t_min), csv::real(r.fit.t_max), csv::real(r.fit.max_residual)});
}

/// Frequencies for the single-qubit and pair examples: configured values,
/// or uniform in [0.5, 1.5] from the seed.
inline std::vector<double> intro_omegas(const Scenario &s, std::size_t n, std::uint64_t seed) {
  if (!s.interaction.omegas.empty()) {
    if (s.interaction.omegas.size() != n)
      throw ConfigError(0, "interaction.omegas",
                        "expected " + std::to_string(n) + " values for the code length");
    return s.interaction.omegas;
  }
  Rng rng(seed, 1);
  std::vector<double> w(n);
  for (auto &x : w)
    x = rng.uniform(0.5, 1.5);
  return w;
}

inline dynamics::PairTable intro_pairs(const Scenario &s, std::size_t n, std::uint64_t seed) {
  const std::size_t count = n * (n - 1) / 2;
  std::vector<double> flat = s.interaction.pair_omegas;
  if (flat.empty()) {
    Rng rng(seed, 2);
    flat.resize(count);
    for (auto &x : flat)
      x = rng.uniform(0.5, 1.5);
  } else if (flat.size() != count) {
    throw ConfigError(0, "interaction.pair_omegas",
                      "expected " + std::to_string(count) + " values (pairs k < l)");
  }
  dynamics::PairTable w(n, std::vector<double>(n, 0.0));
  std::size_t idx = 0;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = k + 1; l < n; ++l)
      w[k][l] = flat[idx++];
  return w;
}

/// Environment with no degrees of freedom: d_e = 1, zero couplings.
inline dynamics::EnvironmentModel trivial_environment(std::size_t n) {
  const Matrix zero = Matrix::Zero(1, 1);
  return dynamics::EnvironmentModel(DensityMatrix(Matrix::Identity(1, 1)), zero,
                                    dynamics::CouplingTable(n, {zero, zero, zero}));
}

struct Model {
  codes::CodeSpec code;
  dynamics::EnvironmentModel env;
  dynamics::FreeHamiltonian h0;
  Matrix v;
  bool non_contact = true;
};

inline Model build_model(const Scenario &s, std::uint64_t seed) {
  codes::CodeSpec code = codes::build_code(s.code_id);
  const std::size_t n = code.n();
  dynamics::RandomEnvironmentOptions opt;
  opt.d_e = s.environment.d_e;
  opt.qubits = n;
  opt.seed = seed;
  opt.coupling_bound = s.environment.coupling_bound;
  opt.beta = s.environment.beta;
  opt.h_env_scale = s.environment.h_env_scale;
  dynamics::EnvironmentModel env = dynamics::random_environment(opt);
  dynamics::FreeHamiltonian h0 = dynamics::FreeHamiltonian::environment_only(env.h_env(), n);
  const Index de = static_cast<Index>(env.d_e());
  Matrix v;
  bool non_contact = false;
  switch (s.interaction.kind) {
  case InteractionKind::non_contact:
    v = dynamics::build_noncontact(env, n);
    non_contact = true;
    break;
  case InteractionKind::contact: {
    dynamics::Contact c;
    for (const auto &term : s.interaction.terms) {
      auto word = pauli::PauliIndexVector::from_word(term.word);
      if (word.size() != n)
        throw ConfigError(0, "interaction.terms",
                          "term '" + term.word + "' does not match code length " +
                              std::to_string(n));
      c.terms.push_back({term.omega, std::move(word), std::nullopt});
    }
    v = dynamics::build_interaction(c, env, n);
    break;
  }
  case InteractionKind::intro_h1:
    v = kron(Matrix(Matrix::Identity(de, de)),
             dynamics::build_intro_h1(intro_omegas(s, n, seed)));
    break;
  case InteractionKind::intro_h2:
    if (n < 2)
      throw ConfigError(0, "interaction.kind", "intro_h2 needs at least two qubits");
    v = kron(Matrix(Matrix::Identity(de, de)),
             dynamics::build_intro_h2(intro_pairs(s, n, seed)));
    break;
  }
  return {std::move(code), std::move(env), std::move(h0), std::move(v), non_contact};
}

struct Collector {
  std::vector<Output> files;
  std::size_t dropped = 0;
  std::vector<FitRecord> fits;
  bool svg = true;

  void add(std::string name, std::string content) {
    files.push_back({std::move(name), std::move(content)});
  }

  void add_svg(std::string name, const std::vector<Series> &series, const Axes &axes) {
    if (!svg)
      return;
    auto r = emit_svg(series, axes);
    dropped += r.dropped;
    add(std::move(name), std::move(r.text));
  }
};

inline std::string seed_label(const std::string &name, std::uint64_t seed) {
  return name + "_seed" + std::to_string(seed);
}

inline void run_sweep(const Scenario &s, const std::vector<std::uint64_t> &seeds,
                      std::size_t workers, Collector &out) {
  const auto times = time_grid(s.time);
  csv::Table fits = fit_table();
  csv::Table coeffs({"scenario", "theta", "phi", "exponent", "coefficient_fit",
                     "coefficient_leading", "relative_difference"});
  bool any_coeff = false;
  for (const auto seed : seeds) {
    Model m = build_model(s, seed);
    const std::size_t k = m.code.k_corr();
    const double v_norm = operator_norm(m.v);
    const metrics::ChannelModel model(m.code, m.env, m.h0, m.v);
    const auto rows = sweep(model, times, s.states, workers);
    const std::string label = seed_label(s.name, seed);
    out.add(label + ".csv", sweep_table(rows, k, v_norm).str());

    const FitRecord rec{label, metrics::fit_power_law(sup_samples(rows))};
    add_fit(fits, rec);
    out.fits.push_back(rec);

    if (m.non_contact) {
      const auto psi = metrics::LogicalState::bloch(s.states.theta, s.states.phi);
      const auto fixed = metrics::fit_power_law(fixed_samples(rows));
      const double lead = metrics::leading_coefficient(m.code, m.env, dynamics::NonContact{}, psi, k);
      const double rel = lead > 0.0 ? std::abs(fixed.coefficient() - lead) / lead
                                    : std::numeric_limits<double>::infinity();
      coeffs.add_row({label, csv::real(s.states.theta), csv::real(s.states.phi),
                      csv::real(fixed.exponent), csv::real(fixed.coefficient()),
                      csv::real(lead), csv::real(rel)});
      any_coeff = true;
    }

    Series e{"sup E(t)", {}}, b{"bound", {}};
    for (const auto &r : rows) {
      e.points.emplace_back(r.t, r.sup.value);
      b.points.emplace_back(r.t, metrics::error_bound(r.t, k, v_norm));
    }
    out.add_svg(label + ".svg", {e, b},
                {s.name + " (" + s.code_id + ", seed " + std::to_string(seed) + ")", "t",
                 "E(t)", true, true});
  }
  out.add(s.name + "_fits.csv", fits.str());
  if (any_coeff)
    out.add(s.name + "_coefficients.csv", coeffs.str());
}

inline void run_bound_check(const Scenario &s, const std::vector<std::uint64_t> &seeds,
                            std::size_t workers, Collector &out) {
  const auto times = time_grid(s.time);
  const double x0 = codes::asymptotic_x0();
  csv::Table summary({"scenario", "threshold_time", "prefactor", "x0", "coupling_bound",
                      "violations"});
  for (const auto seed : seeds) {
    Model m = build_model(s, seed);
    const double v_norm = operator_norm(m.v);
    const metrics::ChannelModel model(m.code, m.env, m.h0, m.v);
    const auto rows = sweep(model, times, s.states, workers);
    const auto rep = metrics::bound_report(sup_samples(rows), m.code.k_corr(), v_norm,
                                           m.env.coupling_bound(), m.code.n(), x0);
    const std::string label = seed_label(s.name, seed);
    csv::Table t({"t", "measured_E", "bound_eq14", "stab_bound_eq15"});
    Series e{"sup E(t)", {}}, b{"bound", {}}, st{"stabilization", {}};
    for (const auto &r : rep.rows) {
      t.add_row({csv::real(r.t), csv::real(r.measured_e), csv::real(r.bound_eq14),
                 csv::real(r.stab_bound_eq15)});
      e.points.emplace_back(r.t, r.measured_e);
      b.points.emplace_back(r.t, r.bound_eq14);
      st.points.emplace_back(r.t, r.stab_bound_eq15);
    }
    out.add(label + "_bounds.csv", t.str());
    summary.add_row({label, csv::real(rep.threshold_time), csv::real(rep.prefactor),
                     csv::real(x0), csv::real(m.env.coupling_bound()),
                     std::to_string(rep.violations(1e-12).size())});
    out.add_svg(label + ".svg", {e, b, st},
                {s.name + " (" + s.code_id + ", seed " + std::to_string(seed) + ")", "t",
                 "E(t)", true, true});
  }
  out.add(s.name + "_summary.csv", summary.str());
}

inline void run_intro(const Scenario &s, std::uint64_t seed, std::size_t workers,
                      Collector &out) {
  const auto times = time_grid(s.time);
  const codes::CodeSpec code = codes::build_code(s.code_id);
  const std::size_t n = code.n();
  if (n < 2)
    throw ConfigError(0, "code.id", "intro_example needs a code with at least two qubits");
  const auto env = trivial_environment(n);
  const auto h0 = dynamics::FreeHamiltonian::zero(1, n);
  const Matrix h1 = dynamics::build_intro_h1(intro_omegas(s, n, seed));
  const Matrix h2 = dynamics::build_intro_h2(intro_pairs(s, n, seed));

  csv::Table fits = fit_table();
  std::vector<Series> series;
  for (const auto &[tag, v] : {std::pair{"h1", h1}, std::pair{"h2", h2}}) {
    const metrics::ChannelModel model(code, env, h0, v);
    const auto rows = sweep(model, times, s.states, workers);
    const std::string label = s.name + "_" + tag;
    out.add(label + ".csv", sweep_table(rows, code.k_corr(), operator_norm(v)).str());
    const FitRecord rec{label, metrics::fit_power_law(sup_samples(rows))};
    add_fit(fits, rec);
    out.fits.push_back(rec);
    Series e{std::string("sup E, ") + tag, {}};
    for (const auto &r : rows)
      e.points.emplace_back(r.t, r.sup.value);
    series.push_back(std::move(e));
  }
  out.add(s.name + "_fits.csv", fits.str());
  out.add_svg(s.name + ".svg", series,
              {s.name + " (" + s.code_id + ")", "t", "E(t)", true, true});
}

inline void run_bounds_table(const Scenario &s, Collector &out) {
  out.add(s.name + ".csv",
          codes::bounds_table(s.bounds.k_min, s.bounds.k_max, s.bounds.n_min, s.bounds.n_max)
              .str());
}

inline void run_periodic(const Scenario &s, std::uint64_t seed, Collector &out) {
  const Model m = build_model(s, seed);
  const auto psi = metrics::LogicalState::bloch(s.states.theta, s.states.phi);
  csv::Table rates({"dt", "recover", "rate"});
  std::vector<Series> series;
  for (std::size_t i = 0; i < s.periodic.dt_factors.size(); ++i) {
    const double dt = s.periodic.dt * s.periodic.dt_factors[i];
    for (const bool recover : {true, false}) {
      const auto res = metrics::periodic_correction_decay(
          m.code, m.env, m.h0, m.v, dt, s.periodic.cycles, psi,
          {recover, s.periodic.reset_environment});
      csv::Table t({"cycle", "total_t", "fidelity"});
      Series f{"dt=" + csv::real(dt).substr(0, 6) + (recover ? " recovered" : " bare"), {}};
      for (const auto &p : res.trace) {
        t.add_row({std::to_string(p.cycle), csv::real(p.total_t), csv::real(p.fidelity)});
        f.points.emplace_back(p.total_t, p.fidelity);
      }
      out.add(s.name + "_dt" + std::to_string(i) + (recover ? "_recovered" : "_bare") + ".csv",
              t.str());
      rates.add_row({csv::real(dt), csv::boolean(recover), csv::real(res.rate)});
      series.push_back(std::move(f));
    }
  }
  out.add(s.name + "_rates.csv", rates.str());
  out.add_svg(s.name + ".svg", series,
              {s.name + " (" + s.code_id + ")", "total time", "fidelity", false, false});
}

} // namespace detail

/// Executes a scenario, writes its CSV/SVG outputs and a manifest
/// (`<name>_manifest.json`) into the output directory, and returns the
/// manifest. All files are written after every computation has finished.
inline RunManifest run(Scenario scenario, const RunOptions &opt = {}) {
  const auto started = std::chrono::steady_clock::now();
  if (opt.seed) {
    scenario.environment.seed = *opt.seed;
    scenario.environment.seeds.clear();
  }
  if (opt.out_dir)
    scenario.output.dir = *opt.out_dir;
  if (opt.svg)
    scenario.output.svg = *opt.svg;
  check_sizing(scenario, opt.dimension_cap);

  const std::size_t workers =
      opt.workers ? opt.workers : std::max(1u, std::thread::hardware_concurrency());
  const auto seeds = scenario.run_seeds();
  detail::Collector out;
  out.svg = scenario.output.svg;
  switch (scenario.kind) {
  case ScenarioKind::scaling_sweep:
    detail::run_sweep(scenario, seeds, workers, out);
    break;
  case ScenarioKind::bound_check:
    detail::run_bound_check(scenario, seeds, workers, out);
    break;
  case ScenarioKind::intro_example:
    detail::run_intro(scenario, seeds.front(), workers, out);
    break;
  case ScenarioKind::bounds_table:
    detail::run_bounds_table(scenario, out);
    break;
  case ScenarioKind::periodic_correction:
    detail::run_periodic(scenario, seeds.front(), out);
    break;
  }

  RunManifest m;
  m.scenario = serialize(scenario);
  m.seeds = seeds;
  m.version = kVersion;
  m.output_dir = scenario.output.dir;
  m.svg_dropped_points = out.dropped;
  m.fits = out.fits;

  const std::filesystem::path dir(scenario.output.dir);
  std::filesystem::create_directories(dir);
  for (const auto &f : out.files) {
    std::ofstream os(dir / f.name, std::ios::binary | std::ios::trunc);
    os.write(f.content.data(), static_cast<std::streamsize>(f.content.size()));
    if (!os)
      throw std::runtime_error("failed to write " + (dir / f.name).string());
    m.files.push_back({f.name, sha256_hex(f.content), f.content.size()});
  }
  m.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  std::ofstream js(dir / (scenario.name + "_manifest.json"), std::ios::trunc);
  js << m.to_json().dump(2) << '\n';
  if (!js)
    throw std::runtime_error("failed to write manifest");
  return m;
}

} // namespace qecdecay::cli
