/*******************************************************************************
 * Copyright (c) 2026 The qecdecay Authors.                                    *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#pragma once

#include "qecdecay/codes.hpp"
#include "qecdecay/errors.hpp"
#include "qecdecay/pauli.hpp"

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

/// Scenario documents: `[section]` headers, `key = value` lines, `#`
/// comments, comma-separated lists.
///
///   [scenario]    kind, name
///   [code]        id
///   [interaction] kind, omegas, pair_omegas, terms
///   [environment] d_e, seed, seeds, coupling_bound, beta, h_env_scale
///   [time]        start, end, points, spacing
///   [states]      n_theta, n_phi, theta, phi
///   [bounds]      k_min, k_max, n_min, n_max
///   [periodic]    dt, cycles, dt_factors, reset_environment
///   [output]      dir, svg
namespace qecdecay::cli {

enum class ScenarioKind {
  scaling_sweep,
  intro_example,
  bounds_table,
  periodic_correction,
  bound_check
};

enum class InteractionKind { non_contact, contact, intro_h1, intro_h2 };

enum class Spacing { linear, log };

struct ContactTermSpec {
  double omega = 0.0;
  std::string word;

  bool operator==(const ContactTermSpec &) const = default;
};

struct Scenario {
  ScenarioKind kind = ScenarioKind::scaling_sweep;
  std::string name;

  std::string code_id = "five_qubit";

  struct Interaction {
    InteractionKind kind = InteractionKind::non_contact;
    std::vector<double> omegas;      // intro_h1; drawn from the seed if empty
    std::vector<double> pair_omegas; // intro_h2, pairs (k<l) in order
    std::vector<ContactTermSpec> terms;
    bool operator==(const Interaction &) const = default;
  } interaction;

  struct Environment {
    std::size_t d_e = 2;
    std::uint64_t seed = 42;
    std::vector<std::uint64_t> seeds; // empty: just `seed`
    double coupling_bound = 1.0;
    double beta = 0.0;
    double h_env_scale = 1.0;
    bool operator==(const Environment &) const = default;
  } environment;

  struct Time {
    double start = 1e-3;
    double end = 0.1;
    std::size_t points = 40;
    Spacing spacing = Spacing::log;
    bool operator==(const Time &) const = default;
  } time;

  struct States {
    std::size_t n_theta = 8;
    std::size_t n_phi = 8;
    double theta = 1.0; // fixed logical state for per-state fits
    double phi = 0.7;
    bool operator==(const States &) const = default;
  } states;

  struct Bounds {
    std::size_t k_min = 1;
    std::size_t k_max = 3;
    std::size_t n_min = 1;
    std::size_t n_max = 20;
    bool operator==(const Bounds &) const = default;
  } bounds;

  struct Periodic {
    double dt = 0.1;
    std::size_t cycles = 20;
    std::vector<double> dt_factors{1.0, 0.5, 0.25};
    bool reset_environment = false;
    bool operator==(const Periodic &) const = default;
  } periodic;

  struct Output {
    std::string dir = "out";
    bool svg = true;
    bool operator==(const Output &) const = default;
  } output;

  std::vector<std::uint64_t> run_seeds() const {
    return environment.seeds.empty() ? std::vector<std::uint64_t>{environment.seed}
                                     : environment.seeds;
  }

  bool operator==(const Scenario &) const = default;
};

inline std::string to_string(ScenarioKind k) {
  switch (k) {
  case ScenarioKind::scaling_sweep: return "scaling_sweep";
  case ScenarioKind::intro_example: return "intro_example";
  case ScenarioKind::bounds_table: return "bounds_table";
  case ScenarioKind::periodic_correction: return "periodic_correction";
  case ScenarioKind::bound_check: return "bound_check";
  }
  return "?";
}

inline std::string to_string(InteractionKind k) {
  switch (k) {
  case InteractionKind::non_contact: return "non_contact";
  case InteractionKind::contact: return "contact";
  case InteractionKind::intro_h1: return "intro_h1";
  case InteractionKind::intro_h2: return "intro_h2";
  }
  return "?";
}

inline std::string to_string(Spacing s) {
  return s == Spacing::log ? "log" : "linear";
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(const std::string &v) {
  std::vector<std::string> out;
  if (trim(v).empty())
    return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = v.find(',', start);
    out.push_back(trim(std::string_view(v).substr(
        start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos)
      break;
    start = comma + 1;
  }
  return out;
}

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Entry {
  std::string value;
  std::size_t line;
};

class Reader {
public:
  using Section = std::map<std::string, Entry>;

  Reader(std::map<std::string, Section> sections,
         std::map<std::string, std::size_t> section_lines, std::size_t last_line)
      : sections_(std::move(sections)), section_lines_(std::move(section_lines)),
        last_line_(last_line) {}

  bool has(const std::string &section) const { return sections_.count(section) > 0; }

  void require(const std::string &section) const {
    if (!has(section))
      throw ConfigError(last_line_, section,
                        "missing required section [" + section + "]");
  }

  std::optional<Entry> get(const std::string &section, const std::string &key) const {
    auto s = sections_.find(section);
    if (s == sections_.end())
      return std::nullopt;
    auto e = s->second.find(key);
    if (e == s->second.end())
      return std::nullopt;
    return e->second;
  }

  template <typename T> void read(const std::string &section, const std::string &key, T &out) const {
    if (auto e = get(section, key))
      out = parse<T>(*e, section + "." + key);
  }

  template <typename T> T parse(const Entry &e, const std::string &key) const {
    static_assert(std::is_unsigned_v<T>, "no parser for this type");
    T v = 0;
    const auto *end = e.value.data() + e.value.size();
    const auto res = std::from_chars(e.value.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end)
      throw ConfigError(e.line, key, "expected a non-negative integer, got '" + e.value + "'");
    return v;
  }

private:
  std::map<std::string, Section> sections_;
  std::map<std::string, std::size_t> section_lines_;
  std::size_t last_line_;
};

template <> inline std::string Reader::parse<std::string>(const Entry &e, const std::string &key) const {
  if (e.value.empty())
    throw ConfigError(e.line, key, "value must not be empty");
  return e.value;
}

template <> inline double Reader::parse<double>(const Entry &e, const std::string &key) const {
  try {
    std::size_t pos = 0;
    const double v = std::stod(e.value, &pos);
    if (pos != e.value.size())
      throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception &) {
    throw ConfigError(e.line, key, "expected a real number, got '" + e.value + "'");
  }
}

template <> inline bool Reader::parse<bool>(const Entry &e, const std::string &key) const {
  if (e.value == "true")
    return true;
  if (e.value == "false")
    return false;
  throw ConfigError(e.line, key, "expected true or false, got '" + e.value + "'");
}

template <> inline std::vector<double> Reader::parse<std::vector<double>>(const Entry &e, const std::string &key) const {
  std::vector<double> out;
  for (const auto &item : split_list(e.value))
    out.push_back(parse<double>(Entry{item, e.line}, key));
  return out;
}

template <> inline std::vector<std::uint64_t> Reader::parse<std::vector<std::uint64_t>>(const Entry &e, const std::string &key) const {
  std::vector<std::uint64_t> out;
  for (const auto &item : split_list(e.value))
    out.push_back(parse<std::uint64_t>(Entry{item, e.line}, key));
  return out;
}

template <typename Enum>
Enum parse_enum(const Entry &e, const std::string &key,
                std::initializer_list<std::pair<const char *, Enum>> options) {
  std::string allowed;
  for (const auto &[name, value] : options) {
    if (e.value == name)
      return value;
    allowed += (allowed.empty() ? "" : ", ") + std::string(name);
  }
  throw ConfigError(e.line, key,
                    "invalid value '" + e.value + "' (expected one of " + allowed + ")");
}

inline const std::map<std::string, std::set<std::string>> &schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"scenario", {"kind", "name"}},
      {"code", {"id"}},
      {"interaction", {"kind", "omegas", "pair_omegas", "terms"}},
      {"environment", {"d_e", "seed", "seeds", "coupling_bound", "beta", "h_env_scale"}},
      {"time", {"start", "end", "points", "spacing"}},
      {"states", {"n_theta", "n_phi", "theta", "phi"}},
      {"bounds", {"k_min", "k_max", "n_min", "n_max"}},
      {"periodic", {"dt", "cycles", "dt_factors", "reset_environment"}},
      {"output", {"dir", "svg"}},
  };
  return s;
}

} // namespace detail

/// Parses and validates a scenario document. Defaults are materialized for
/// every field not given.
inline Scenario parse_scenario(std::string_view text) {
  using detail::Entry;
  std::map<std::string, detail::Reader::Section> sections;
  std::map<std::string, std::size_t> section_lines;
  std::string current;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = detail::trim(
        hash == std::string::npos ? std::string_view(raw) : std::string_view(raw).substr(0, hash));
    if (line.empty())
      continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(line_no, "", "malformed section header '" + line + "'");
      current = detail::trim(std::string_view(line).substr(1, line.size() - 2));
      if (!detail::schema().count(current))
        throw ConfigError(line_no, current, "unknown section [" + current + "]");
      if (sections.count(current))
        throw ConfigError(line_no, current, "duplicate section [" + current + "]");
      sections[current];
      section_lines[current] = line_no;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(line_no, "", "expected 'key = value', got '" + line + "'");
    const std::string key = detail::trim(std::string_view(line).substr(0, eq));
    const std::string value = detail::trim(std::string_view(line).substr(eq + 1));
    if (current.empty())
      throw ConfigError(line_no, key, "key outside of any section");
    if (!detail::schema().at(current).count(key))
      throw ConfigError(line_no, current + "." + key, "unknown key '" + key +
                                                          "' in [" + current + "]");
    if (sections[current].count(key))
      throw ConfigError(line_no, current + "." + key, "duplicate key");
    sections[current][key] = Entry{value, line_no};
  }

  const detail::Reader r(std::move(sections), std::move(section_lines), line_no);
  Scenario s;
  r.require("scenario");
  const auto kind = r.get("scenario", "kind");
  if (!kind)
    throw ConfigError(line_no, "scenario.kind", "missing required key");
  s.kind = detail::parse_enum<ScenarioKind>(
      *kind, "scenario.kind",
      {{"scaling_sweep", ScenarioKind::scaling_sweep},
       {"intro_example", ScenarioKind::intro_example},
       {"bounds_table", ScenarioKind::bounds_table},
       {"periodic_correction", ScenarioKind::periodic_correction},
       {"bound_check", ScenarioKind::bound_check}});
  s.name = to_string(s.kind);
  r.read("scenario", "name", s.name);

  switch (s.kind) {
  case ScenarioKind::scaling_sweep:
  case ScenarioKind::bound_check:
    r.require("code");
    r.require("time");
    break;
  case ScenarioKind::intro_example:
    r.require("time");
    s.code_id = "repetition5";
    break;
  case ScenarioKind::periodic_correction:
    r.require("code");
    r.require("periodic");
    break;
  case ScenarioKind::bounds_table:
    break;
  }

  if (auto e = r.get("code", "id")) {
    s.code_id = r.parse<std::string>(*e, "code.id");
    if (!codes::is_known_code(s.code_id))
      throw ConfigError(e->line, "code.id", "unknown code '" + s.code_id +
                                                "' (expected identity, repetition<odd n>, five_qubit)");
  }

  if (auto e = r.get("interaction", "kind"))
    s.interaction.kind = detail::parse_enum<InteractionKind>(
        *e, "interaction.kind",
        {{"non_contact", InteractionKind::non_contact},
         {"contact", InteractionKind::contact},
         {"intro_h1", InteractionKind::intro_h1},
         {"intro_h2", InteractionKind::intro_h2}});
  r.read("interaction", "omegas", s.interaction.omegas);
  r.read("interaction", "pair_omegas", s.interaction.pair_omegas);
  if (auto e = r.get("interaction", "terms")) {
    for (const auto &item : detail::split_list(e->value)) {
      std::istringstream ts(item);
      ContactTermSpec term;
      std::string omega;
      if (!(ts >> omega >> term.word))
        throw ConfigError(e->line, "interaction.terms",
                          "expected '<omega> <PAULI WORD>', got '" + item + "'");
      term.omega = r.parse<double>(Entry{omega, e->line}, "interaction.terms");
      try {
        (void)pauli::PauliIndexVector::from_word(term.word);
      } catch (const std::exception &ex) {
        throw ConfigError(e->line, "interaction.terms", ex.what());
      }
      s.interaction.terms.push_back(std::move(term));
    }
  }
  if (s.interaction.kind == InteractionKind::contact && s.interaction.terms.empty())
    throw ConfigError(line_no, "interaction.terms", "contact interaction needs terms");

  r.read("environment", "d_e", s.environment.d_e);
  r.read("environment", "seed", s.environment.seed);
  r.read("environment", "seeds", s.environment.seeds);
  r.read("environment", "coupling_bound", s.environment.coupling_bound);
  r.read("environment", "beta", s.environment.beta);
  r.read("environment", "h_env_scale", s.environment.h_env_scale);
  if (s.environment.d_e == 0)
    throw ConfigError(r.get("environment", "d_e")->line, "environment.d_e", "must be positive");
  if (!(s.environment.coupling_bound > 0.0))
    throw ConfigError(r.get("environment", "coupling_bound")->line,
                      "environment.coupling_bound", "must be positive");

  r.read("time", "start", s.time.start);
  r.read("time", "end", s.time.end);
  r.read("time", "points", s.time.points);
  if (auto e = r.get("time", "spacing"))
    s.time.spacing = detail::parse_enum<Spacing>(
        *e, "time.spacing", {{"linear", Spacing::linear}, {"log", Spacing::log}});
  if (s.time.points == 0)
    throw ConfigError(line_no, "time.points", "time grid must be nonempty");
  if (s.time.points > 1 && !(s.time.end > s.time.start))
    throw ConfigError(line_no, "time.end", "time grid must be increasing (end > start)");
  if (s.time.start < 0.0 || (s.time.spacing == Spacing::log && !(s.time.start > 0.0)))
    throw ConfigError(line_no, "time.start",
                      "start must be positive for log spacing and non-negative otherwise");

  r.read("states", "n_theta", s.states.n_theta);
  r.read("states", "n_phi", s.states.n_phi);
  r.read("states", "theta", s.states.theta);
  r.read("states", "phi", s.states.phi);
  if (s.states.n_theta < 8 || s.states.n_phi < 8)
    throw ConfigError(line_no, "states.n_theta", "state grid must be at least 8 x 8");

  r.read("bounds", "k_min", s.bounds.k_min);
  r.read("bounds", "k_max", s.bounds.k_max);
  r.read("bounds", "n_min", s.bounds.n_min);
  r.read("bounds", "n_max", s.bounds.n_max);
  if (s.bounds.k_min > s.bounds.k_max || s.bounds.n_min > s.bounds.n_max ||
      s.bounds.n_min < 1 || s.bounds.n_max > 62)
    throw ConfigError(line_no, "bounds", "need k_min <= k_max and 1 <= n_min <= n_max <= 62");

  r.read("periodic", "dt", s.periodic.dt);
  r.read("periodic", "cycles", s.periodic.cycles);
  r.read("periodic", "dt_factors", s.periodic.dt_factors);
  r.read("periodic", "reset_environment", s.periodic.reset_environment);
  if (!(s.periodic.dt > 0.0))
    throw ConfigError(line_no, "periodic.dt", "cycle period must be positive");
  if (s.periodic.cycles < 10)
    throw ConfigError(line_no, "periodic.cycles", "need at least 10 cycles");
  if (s.periodic.dt_factors.empty())
    throw ConfigError(line_no, "periodic.dt_factors", "need at least one factor");

  r.read("output", "dir", s.output.dir);
  r.read("output", "svg", s.output.svg);
  return s;
}

/// Writes every field, defaults included. parse_scenario(serialize(s)) == s.
inline std::string serialize(const Scenario &s) {
  using detail::format_real;
  auto join_real = [](const std::vector<double> &v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i)
      out += (i ? ", " : "") + format_real(v[i]);
    return out;
  };
  std::string out;
  auto kv = [&](const std::string &k, const std::string &v) {
    if (!v.empty())
      out += k + " = " + v + "\n";
  };
  out += "[scenario]\n";
  kv("kind", to_string(s.kind));
  kv("name", s.name);
  out += "\n[code]\n";
  kv("id", s.code_id);
  out += "\n[interaction]\n";
  kv("kind", to_string(s.interaction.kind));
  kv("omegas", join_real(s.interaction.omegas));
  kv("pair_omegas", join_real(s.interaction.pair_omegas));
  std::string terms;
  for (std::size_t i = 0; i < s.interaction.terms.size(); ++i)
    terms += (i ? ", " : "") + format_real(s.interaction.terms[i].omega) + " " +
             s.interaction.terms[i].word;
  kv("terms", terms);
  out += "\n[environment]\n";
  kv("d_e", std::to_string(s.environment.d_e));
  kv("seed", std::to_string(s.environment.seed));
  std::string seeds;
  for (std::size_t i = 0; i < s.environment.seeds.size(); ++i)
    seeds += (i ? ", " : "") + std::to_string(s.environment.seeds[i]);
  kv("seeds", seeds);
  kv("coupling_bound", format_real(s.environment.coupling_bound));
  kv("beta", format_real(s.environment.beta));
  kv("h_env_scale", format_real(s.environment.h_env_scale));
  out += "\n[time]\n";
  kv("start", format_real(s.time.start));
  kv("end", format_real(s.time.end));
  kv("points", std::to_string(s.time.points));
  kv("spacing", to_string(s.time.spacing));
  out += "\n[states]\n";
  kv("n_theta", std::to_string(s.states.n_theta));
  kv("n_phi", std::to_string(s.states.n_phi));
  kv("theta", format_real(s.states.theta));
  kv("phi", format_real(s.states.phi));
  out += "\n[bounds]\n";
  kv("k_min", std::to_string(s.bounds.k_min));
  kv("k_max", std::to_string(s.bounds.k_max));
  kv("n_min", std::to_string(s.bounds.n_min));
  kv("n_max", std::to_string(s.bounds.n_max));
  out += "\n[periodic]\n";
  kv("dt", format_real(s.periodic.dt));
  kv("cycles", std::to_string(s.periodic.cycles));
  kv("dt_factors", join_real(s.periodic.dt_factors));
  kv("reset_environment", s.periodic.reset_environment ? "true" : "false");
  out += "\n[output]\n";
  kv("dir", s.output.dir);
  kv("svg", s.output.svg ? "true" : "false");
  return out;
}

} // namespace qecdecay::cli
