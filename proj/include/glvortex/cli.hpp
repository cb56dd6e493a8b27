#pragma once

// Run configuration, dispatch and result files for the command-line tool.
// Every run writes config.json into its output directory; failures add
// error.json and a nonzero exit status (2 configuration, 3 solver).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "glvortex/error.hpp"
#include "glvortex/escaping.hpp"
#include "glvortex/field_oracle.hpp"
#include "glvortex/harmonic.hpp"
#include "glvortex/nonescaping.hpp"
#include "glvortex/potential.hpp"
#include "glvortex/radial_grid.hpp"
#include "glvortex/spectral.hpp"

namespace glv {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;

struct RunConfig {
  std::string subcommand;
  int N = 2;
  int J = 512;
  std::optional<double> epsilon;
  std::optional<double> epsilon_factor;  // epsilon = factor * epsilon_N
  std::vector<double> epsilons;
  int eps_grid = 12;
  std::optional<double> eps_min, eps_max;
  std::vector<int> dimensions;  // sweep
  std::string potential = "quadratic";  // or a path to a t,W,Wp table
  bool strictly_convex = true;
  double tolerance = 1e-10;
  int max_iterations = 100;
  double threshold_tol = 1e-6;
  double oracle_tolerance = 1e-6;
  int K = 64;
  int L = 16;
  std::string init;
  std::string output_dir = ".";
  std::uint64_t seed = 20240611;
  bool dump_field = false;

  bool operator==(const RunConfig&) const = default;
};

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"profile",   "spectrum", "epsilon-n", "escape",
                                              "dichotomy", "harmonic", "oracle",    "sweep"};
  return names;
}

template <class T>
void put_optional(nlohmann::ordered_json& j, const char* key, const std::optional<T>& v) {
  j[key] = v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

template <class T>
void get_optional(const nlohmann::json& j, const char* key, std::optional<T>& v) {
  if (j.contains(key) && !j.at(key).is_null())
    v = j.at(key).get<T>();
  else
    v.reset();
}

inline nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["subcommand"] = c.subcommand;
  j["N"] = c.N;
  j["J"] = c.J;
  put_optional(j, "epsilon", c.epsilon);
  put_optional(j, "epsilon_factor", c.epsilon_factor);
  j["epsilons"] = c.epsilons;
  j["eps_grid"] = c.eps_grid;
  put_optional(j, "eps_min", c.eps_min);
  put_optional(j, "eps_max", c.eps_max);
  j["dimensions"] = c.dimensions;
  j["potential"] = c.potential;
  j["strictly_convex"] = c.strictly_convex;
  j["tolerance"] = c.tolerance;
  j["max_iterations"] = c.max_iterations;
  j["threshold_tol"] = c.threshold_tol;
  j["oracle_tolerance"] = c.oracle_tolerance;
  j["K"] = c.K;
  j["L"] = c.L;
  j["init"] = c.init;
  j["output_dir"] = c.output_dir;
  j["seed"] = c.seed;
  j["dump_field"] = c.dump_field;
  return j;
}

inline RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  try {
    c.subcommand = j.at("subcommand").get<std::string>();
    auto opt = [&](const char* k, auto& field) {
      if (j.contains(k)) field = j.at(k).get<std::decay_t<decltype(field)>>();
    };
    opt("N", c.N);
    opt("J", c.J);
    get_optional(j, "epsilon", c.epsilon);
    get_optional(j, "epsilon_factor", c.epsilon_factor);
    opt("epsilons", c.epsilons);
    opt("eps_grid", c.eps_grid);
    get_optional(j, "eps_min", c.eps_min);
    get_optional(j, "eps_max", c.eps_max);
    opt("dimensions", c.dimensions);
    opt("potential", c.potential);
    opt("strictly_convex", c.strictly_convex);
    opt("tolerance", c.tolerance);
    opt("max_iterations", c.max_iterations);
    opt("threshold_tol", c.threshold_tol);
    opt("oracle_tolerance", c.oracle_tolerance);
    opt("K", c.K);
    opt("L", c.L);
    opt("init", c.init);
    opt("output_dir", c.output_dir);
    opt("seed", c.seed);
    opt("dump_field", c.dump_field);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad configuration JSON: ") + e.what());
  }
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration " + path);
  try {
    return config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse " + path + ": " + e.what());
  }
}

/// Checks every field against the preconditions of the module it feeds.
inline void validate_config(const RunConfig& c) {
  const auto& names = subcommands();
  if (std::find(names.begin(), names.end(), c.subcommand) == names.end())
    throw ConfigError("unknown subcommand '" + c.subcommand + "'");
  if (c.N < 2) throw ConfigError("N must be >= 2");
  if (c.J < RadialGrid::kMinIntervals) throw ConfigError("J must be >= 16");
  auto positive = [](std::optional<double> v, const char* what) {
    if (v && !(*v > 0.0 && std::isfinite(*v)))
      throw ConfigError(std::string(what) + " must be positive and finite");
  };
  positive(c.epsilon, "epsilon");
  positive(c.epsilon_factor, "epsilon_factor");
  positive(c.eps_min, "eps_min");
  positive(c.eps_max, "eps_max");
  for (double e : c.epsilons) positive(e, "epsilons entries");
  if (c.eps_min && c.eps_max && !(*c.eps_min < *c.eps_max))
    throw ConfigError("eps_min must be below eps_max");
  if (c.eps_grid < 1) throw ConfigError("eps_grid must be >= 1");
  if (!(c.tolerance > 0.0)) throw ConfigError("tolerance must be positive");
  if (c.max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
  if (!(c.threshold_tol > 0.0)) throw ConfigError("threshold_tol must be positive");
  if (!(c.oracle_tolerance > 0.0)) throw ConfigError("oracle_tolerance must be positive");
  const std::string& s = c.subcommand;
  const bool needs_eps = s == "profile" || s == "escape" || s == "oracle";
  if (needs_eps && !c.epsilon && !c.epsilon_factor)
    throw ConfigError(s + " needs --epsilon or --eps-factor");
  if (c.epsilon_factor && (s == "profile" || s == "escape") && c.N > 6)
    throw ConfigError("--eps-factor needs a threshold, which exists only for N <= 6");
  if ((s == "epsilon-n" || s == "dichotomy") && c.N > 6)
    throw ConfigError(s + " needs 2 <= N <= 6; no threshold exists for N >= 7");
  if (s == "escape" && !c.init.empty() && c.init != "eigenfunction" && c.init != "linear" &&
      c.init != "random")
    throw ConfigError("escape --init must be eigenfunction, linear or random");
  if (s == "harmonic" && !c.init.empty() && c.init != "escaping" && c.init != "equator")
    throw ConfigError("harmonic --init must be escaping or equator");
  if (s == "oracle") {
    if (c.N != 2) throw ConfigError("oracle runs only for N = 2");
    if (c.K < 32 || c.K % 2 != 0) throw ConfigError("K must be even and >= 32");
    if (c.L < 8) throw ConfigError("L must be >= 8");
    if (!c.init.empty() && c.init != "random" && c.init != "embed")
      throw ConfigError("oracle --init must be random or embed");
  }
  if (s == "sweep") {
    if (c.epsilons.empty()) throw ConfigError("sweep needs --epsilons");
    for (int n : c.dimensions)
      if (n < 2) throw ConfigError("sweep dimensions must be >= 2");
  }
}

inline Potential make_potential(const RunConfig& c) {
  if (c.potential == "quadratic") return Potential::quadratic();
  return Potential::load_csv(c.potential, c.strictly_convex);
}

inline SolverOptions solver_options(const RunConfig& c) {
  SolverOptions o;
  o.tolerance = c.tolerance;
  o.max_iterations = c.max_iterations;
  o.seed = c.seed;
  return o;
}

/// Writes a CSV with a header row, 17 significant digits and LF endings.
inline std::string export_curve(const std::string& path,
                                const std::vector<std::pair<std::string, std::vector<double>>>& columns) {
  const std::size_t rows = columns.empty() ? 0 : columns.front().second.size();
  for (const auto& [name, col] : columns)
    if (col.size() != rows) throw LengthMismatch(rows, col.size());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (std::size_t k = 0; k < columns.size(); ++k) out << (k ? "," : "") << columns[k].first;
  out << '\n';
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < columns.size(); ++k)
      out << (k ? "," : "") << detail::format_double(columns[k].second[i]);
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
  return path;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

inline int worker_count() {
  if (const char* v = std::getenv("GLV_WORKERS")) {
    const int n = std::atoi(v);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

/// Applies fn to every index in [0, n) with at most `workers` concurrent tasks.
template <class Fn>
auto parallel_map(std::size_t n, int workers, Fn fn) {
  using R = decltype(fn(std::size_t{0}));
  std::vector<R> out(n);
  for (std::size_t start = 0; start < n; start += workers) {
    std::vector<std::future<R>> batch;
    for (std::size_t i = start; i < std::min(n, start + workers); ++i)
      batch.push_back(std::async(std::launch::async, fn, i));
    for (std::size_t k = 0; k < batch.size(); ++k) out[start + k] = batch[k].get();
  }
  return out;
}

namespace detail {

inline nlohmann::ordered_json energy_json(const EnergyBreakdown& e) {
  return {{"gradient_f", e.gradient_f}, {"gradient_g", e.gradient_g}, {"angular", e.angular},
          {"potential", e.potential},   {"total", e.total}};
}

inline double resolve_epsilon(const RunConfig& c, const Potential& W, const RadialGrid& grid) {
  if (c.epsilon) return *c.epsilon;
  return *c.epsilon_factor * find_epsilon_N(W, grid.dimension(), grid, c.threshold_tol);
}

inline EscapeInit escape_init(const std::string& s) {
  if (s == "linear") return EscapeInit::linear_bump;
  if (s == "random") return EscapeInit::random_bump;
  return EscapeInit::eigenfunction_bump;
}

inline void run_profile(const RunConfig& c, const std::filesystem::path& dir) {
  const Potential W = make_potential(c);
  const RadialGrid grid(c.N, c.J);
  const double eps = resolve_epsilon(c, W, grid);
  const ProfilePair p = solve_nonescaping_profile(W, grid, eps, solver_options(c));
  write_profile_csv(p, (dir / "profile.csv").string());
  nlohmann::ordered_json j{{"N", c.N},
                           {"J", c.J},
                           {"epsilon", eps},
                           {"residual", profile_residual(W, p)},
                           {"energy", energy_json(energy_I(W, p))}};
  write_json(dir / "profile.json", j);
}

inline void run_spectrum(const RunConfig& c, const std::filesystem::path& dir) {
  const Potential W = make_potential(c);
  const RadialGrid grid(c.N, c.J);
  std::vector<double> eps = c.epsilons;
  if (eps.empty()) eps = log_spaced(c.eps_min.value_or(0.01), c.eps_max.value_or(10.0), c.eps_grid);
  const SolverOptions opts = solver_options(c);
  const auto ell = parallel_map(eps.size(), worker_count(),
                                [&](std::size_t i) { return ell_of_epsilon(W, grid, eps[i], opts); });
  export_curve((dir / "spectrum.csv").string(), {{"epsilon", eps}, {"ell", ell}});
}

inline void run_epsilon_n(const RunConfig& c, const std::filesystem::path& dir) {
  const Potential W = make_potential(c);
  const RadialGrid grid(c.N, c.J);
  const ThresholdResult t = threshold_search(W, c.N, grid, c.threshold_tol, solver_options(c));
  write_json(dir / "epsilon_n.json", {{"N", t.N},
                                      {"epsilon_N", t.epsilon_N},
                                      {"lambda1", t.lambda1},
                                      {"upper_bound", t.upper_bound}});
}

inline nlohmann::ordered_json escape_json(const RunConfig& c, const Potential& W, double eps,
                                          const EscapeResult& r) {
  return {{"N", r.pair.grid.dimension()},
          {"J", c.J},
          {"epsilon", eps},
          {"escaped", r.escaped},
          {"g0", r.pair.g.front()},
          {"energy", energy_json(r.energy)},
          {"iterations", r.iterations},
          {"residual", escaping_residual(W, r)},
          {"projection_events", r.projection_events}};
}

inline void run_escape(const RunConfig& c, const std::filesystem::path& dir) {
  const Potential W = make_potential(c);
  const RadialGrid grid(c.N, c.J);
  const double eps = resolve_epsilon(c, W, grid);
  const EscapeResult r =
      solve_escaping_profile(W, grid, eps, solver_options(c), escape_init(c.init));
  write_profile_csv(r.pair, (dir / "profile.csv").string());
  write_json(dir / "escape.json", escape_json(c, W, eps, r));
}

inline nlohmann::ordered_json dichotomy_json(const DichotomyReport& rep) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : rep.rows) {
    nlohmann::ordered_json row{{"epsilon", r.epsilon}, {"escaped", r.escaped}};
    put_optional(row, "I_escaping", r.I_escaping);
    row["I_nonescaping"] = r.I_nonescaping;
    row["energy_gap"] = r.energy_gap;
    row["classification"] = r.classification;
    if (r.error) row["error"] = *r.error;
    rows.push_back(std::move(row));
  }
  return {{"N", rep.N}, {"epsilon_N", rep.epsilon_N}, {"rows", rows}};
}

inline void run_dichotomy(const RunConfig& c, const std::filesystem::path& dir) {
  const Potential W = make_potential(c);
  const RadialGrid grid(c.N, c.J);
  std::vector<double> eps = c.epsilons;
  if (eps.empty()) {
    const double eN = find_epsilon_N(W, c.N, grid, c.threshold_tol, solver_options(c));
    eps = log_spaced(c.eps_min.value_or(eN / 8), c.eps_max.value_or(4 * eN), c.eps_grid);
  }
  const DichotomyReport rep =
      classify_dichotomy(W, c.N, grid, eps, solver_options(c), c.threshold_tol);
  write_json(dir / "dichotomy.json", dichotomy_json(rep));
  for (const auto& r : rep.rows)
    if (r.error) throw Error("dichotomy row at epsilon " + detail::format_double(r.epsilon) +
                             " failed: " + *r.error);
}

inline void run_harmonic(const RunConfig& c, const std::filesystem::path& dir) {
  const RadialGrid grid(c.N, c.J);
  const HarmonicSeed seed =
      c.init == "equator" ? HarmonicSeed::equator_seed : HarmonicSeed::escaping_seed;
  const ThetaProfile t = solve_harmonic_theta(c.N, grid, seed, solver_options(c));
  const ProfilePair p = t.to_pair();
  std::vector<double> r(grid.nodes().begin(), grid.nodes().end());
  export_curve((dir / "harmonic.csv").string(),
               {{"r", r}, {"theta", t.theta}, {"f", p.f}, {"g", p.g}});
  write_json(dir / "harmonic.json", {{"N", c.N},
                                     {"energy", harmonic_energy(t)},
                                     {"escaped", t.escaping_flag},
                                     {"residual", harmonic_residual(c.N, t)}});
}

inline void run_oracle(const RunConfig& c, const std::filesystem::path& dir) {
  const Potential W = make_potential(c);
  const RadialGrid grid(2, c.J);
  const double eps = resolve_epsilon(c, W, grid);
  const CylinderGrid cyl(c.K, c.L);
  FieldState start = c.init == "embed"
                         ? z_invariant_embed(cyl, solve_escaping_profile(W, grid, eps,
                                                                         solver_options(c)).pair,
                                             eps)
                         : random_field(cyl, eps, c.seed);
  start.seed = c.seed;
  OracleOptions oo;
  oo.tolerance = c.oracle_tolerance;
  const FieldState s = minimize_full_energy(W, std::move(start), oo);
  const ThirdComponentRange u3 = third_component_range(s);
  write_json(dir / "oracle.json", {{"epsilon", eps},
                                   {"energy", s.energy},
                                   {"z_dev", z_invariance_deviation(s)},
                                   {"radial_dev", radial_symmetry_deviation(s)},
                                   {"third_comp_min", u3.min},
                                   {"third_comp_max", u3.max},
                                   {"seed", c.seed}});
  if (c.dump_field) write_field_binary(s, (dir / "field.glf").string());
}

inline void run_sweep(const RunConfig& c, const std::filesystem::path& dir) {
  const Potential W = make_potential(c);
  std::vector<int> dims = c.dimensions.empty() ? std::vector<int>{c.N} : c.dimensions;
  std::vector<std::pair<int, std::size_t>> jobs;
  for (int n : dims)
    for (std::size_t k = 0; k < c.epsilons.size(); ++k) jobs.emplace_back(n, k);
  const SolverOptions opts = solver_options(c);
  const auto errors = parallel_map(jobs.size(), worker_count(), [&](std::size_t i) {
    const auto [n, k] = jobs[i];
    const double eps = c.epsilons[k];
    const auto sub = dir / ("N" + std::to_string(n) + "_eps" + std::to_string(k));
    try {
      std::filesystem::create_directories(sub);
      const RadialGrid grid(n, c.J);
      const EscapeResult r = solve_escaping_profile(W, grid, eps, opts);
      write_profile_csv(r.pair, (sub / "profile.csv").string());
      auto j = escape_json(c, W, eps, r);
      j["ell"] = ell_of_epsilon(W, grid, eps, opts);
      write_json(sub / "escape.json", j);
      return std::string();
    } catch (const std::exception& e) {
      return std::string(e.what());
    }
  });
  nlohmann::ordered_json index = nlohmann::ordered_json::array();
  std::string first_error;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    nlohmann::ordered_json e{{"N", jobs[i].first},
                             {"epsilon", c.epsilons[jobs[i].second]},
                             {"directory", "N" + std::to_string(jobs[i].first) + "_eps" +
                                               std::to_string(jobs[i].second)}};
    if (!errors[i].empty()) {
      e["error"] = errors[i];
      if (first_error.empty()) first_error = errors[i];
    }
    index.push_back(std::move(e));
  }
  write_json(dir / "sweep.json", {{"jobs", index}});
  if (!first_error.empty()) throw Error("sweep job failed: " + first_error);
}

}  // namespace detail

/// Executes one configured run; returns the process exit status.
inline int run(const RunConfig& config) {
  namespace fs = std::filesystem;
  const fs::path dir(config.output_dir);
  auto fail = [&](int code, const std::string& kind, const std::string& msg) {
    try {
      write_json(dir / "error.json", {{"error", kind}, {"message", msg}, {"exit_code", code}});
    } catch (const Error&) {
    }
    return code;
  };
  try {
    fs::create_directories(dir);
    write_json(dir / "config.json", to_json(config));
  } catch (const std::exception& e) {
    return kExitConfig;  // output directory unusable: nothing can be recorded
  }
  try {
    validate_config(config);
  } catch (const ConfigError& e) {
    return fail(kExitConfig, "ConfigError", e.what());
  }
  try {
    const std::string& s = config.subcommand;
    if (s == "profile") detail::run_profile(config, dir);
    else if (s == "spectrum") detail::run_spectrum(config, dir);
    else if (s == "epsilon-n") detail::run_epsilon_n(config, dir);
    else if (s == "escape") detail::run_escape(config, dir);
    else if (s == "dichotomy") detail::run_dichotomy(config, dir);
    else if (s == "harmonic") detail::run_harmonic(config, dir);
    else if (s == "oracle") detail::run_oracle(config, dir);
    else detail::run_sweep(config, dir);
  } catch (const ConfigError& e) {
    return fail(kExitConfig, "ConfigError", e.what());
  } catch (const IoError& e) {
    return fail(kExitConfig, "IoError", e.what());
  } catch (const std::exception& e) {
    return fail(kExitSolver, "SolverError", e.what());
  }
  return kExitOk;
}

}  // namespace glv
