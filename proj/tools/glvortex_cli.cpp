// glvortex: radial vortex profiles, thresholds, dichotomy sweeps and the
// full-field oracle from the command line.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "glvortex/cli.hpp"

namespace {

template <class T>
void optional_flag(CLI::App* sub, const std::string& name, std::optional<T>& target,
                   const std::string& help) {
  sub->add_option_function<T>(name, [&target](const T& v) { target = v; }, help);
}

void add_common(CLI::App* sub, glv::RunConfig& c) {
  sub->add_option("--N", c.N, "ball dimension")->capture_default_str();
  sub->add_option("--J", c.J, "radial intervals")->capture_default_str();
  sub->add_option("--potential", c.potential, "'quadratic' or a CSV table t,W,Wp")
      ->capture_default_str();
  sub->add_flag("!--not-convex", c.strictly_convex, "skip the strict convexity check on a table");
  sub->add_option("--tol", c.tolerance, "radial solver tolerance")->capture_default_str();
  sub->add_option("--max-iter", c.max_iterations, "Newton iteration cap")->capture_default_str();
  sub->add_option("--threshold-tol", c.threshold_tol, "bisection tolerance on epsilon_N")
      ->capture_default_str();
  sub->add_option("--seed", c.seed, "random seed")->capture_default_str();
  sub->add_option("--out,-o", c.output_dir, "output directory")->capture_default_str();
}

void add_epsilon(CLI::App* sub, glv::RunConfig& c) {
  optional_flag(sub, "--epsilon", c.epsilon, "penalization length");
  optional_flag(sub, "--eps-factor", c.epsilon_factor, "epsilon as a multiple of epsilon_N");
}

void add_range(CLI::App* sub, glv::RunConfig& c) {
  sub->add_option("--epsilons", c.epsilons, "explicit epsilon list");
  sub->add_option("--eps-grid", c.eps_grid, "number of log-spaced points")->capture_default_str();
  optional_flag(sub, "--eps-min", c.eps_min, "lower end of the epsilon range");
  optional_flag(sub, "--eps-max", c.eps_max, "upper end of the epsilon range");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radial Ginzburg-Landau vortex profiles and escape thresholds"};
  app.require_subcommand(0, 1);
  glv::RunConfig c;
  std::string config_path;
  app.add_option("--config", config_path, "run a saved config.json instead of flags")
      ->check(CLI::ExistingFile);

  auto* profile = app.add_subcommand("profile", "non-escaping profile (f, 0)");
  add_common(profile, c);
  add_epsilon(profile, c);

  auto* spectrum = app.add_subcommand("spectrum", "principal eigenvalue over epsilon");
  add_common(spectrum, c);
  add_range(spectrum, c);

  auto* epsn = app.add_subcommand("epsilon-n", "threshold where the eigenvalue changes sign");
  add_common(epsn, c);

  auto* escape = app.add_subcommand("escape", "escaping profile minimizer");
  add_common(escape, c);
  add_epsilon(escape, c);
  escape->add_option("--init", c.init, "eigenfunction | linear | random");

  auto* dicho = app.add_subcommand("dichotomy", "escaped/non-escaped classification sweep");
  add_common(dicho, c);
  add_range(dicho, c);

  auto* harm = app.add_subcommand("harmonic", "sphere-valued harmonic profile");
  add_common(harm, c);
  harm->add_option("--init", c.init, "escaping | equator");

  auto* oracle = app.add_subcommand("oracle", "full-field minimization on the cylinder");
  add_common(oracle, c);
  add_epsilon(oracle, c);
  oracle->add_option("--K", c.K, "Cartesian resolution")->capture_default_str();
  oracle->add_option("--L", c.L, "z layers")->capture_default_str();
  oracle->add_option("--oracle-tol", c.oracle_tolerance, "gradient tolerance")
      ->capture_default_str();
  oracle->add_option("--init", c.init, "random | embed");
  oracle->add_flag("--dump-field", c.dump_field, "write field.glf");

  auto* sweep = app.add_subcommand("sweep", "escape jobs over dimensions and epsilons");
  add_common(sweep, c);
  sweep->add_option("--dims", c.dimensions, "dimensions (default: --N)");
  sweep->add_option("--epsilons", c.epsilons, "epsilon list")->required();

  CLI11_PARSE(app, argc, argv);

  if (!config_path.empty()) {
    try {
      c = glv::load_config(config_path);
    } catch (const glv::Error& e) {
      std::cerr << "error: " << e.what() << '\n';
      return glv::kExitConfig;
    }
  } else if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return glv::kExitConfig;
  } else {
    c.subcommand = app.get_subcommands().front()->get_name();
  }

  const int status = glv::run(c);
  if (status != glv::kExitOk) {
    const auto err = std::filesystem::path(c.output_dir) / "error.json";
    std::cerr << "run failed (exit " << status << ")";
    if (std::filesystem::exists(err)) std::cerr << "; see " << err.string();
    std::cerr << '\n';
  }
  return status;
}
