// prandtl-lab: command-line front end.
//
//   prandtl-lab run --config cfg.json --out dir
//   prandtl-lab toy --config toy.json --out dir
//   prandtl-lab suite <kind> --out dir
//   prandtl-lab compare-damping --config cfg.json --out dir

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "prandtl/bootstrap.hpp"
#include "prandtl/config.hpp"
#include "prandtl/errors.hpp"
#include "prandtl/harness.hpp"

namespace {

using namespace prandtl;

int cmd_run(const std::string& config, const std::string& out) {
  const RunConfig cfg = config.empty() ? decay_config()
                                       : run_config_from_json(read_json_file(config));
  const RunResult r = run_to_directory(cfg, out);
  if (r.diverged) {
    std::cerr << "run failed at t = " << r.divergence_time << ": " << r.error << '\n';
    return 1;
  }
  const auto reports = r.reports();
  const DecaySummary d = decay_report(reports, cfg.gevrey);
  const MonitorResult m = monitor(reports, cfg.gevrey);
  std::cout << "samples " << r.rows.size() << ", max e^{t/4}|a|_X = " << d.max_scaled_x
            << " (bound " << d.bound << "), C holds throughout: "
            << (m.C_holds_throughout() ? "yes" : "no") << '\n';
  return 0;
}

int cmd_toy(const std::string& config, const std::string& out) {
  const ToyConfig cfg = config.empty() ? toy_oracle_config()
                                       : toy_config_from_json(read_json_file(config));
  const ToyResult r = toy_to_directory(cfg, out);
  std::cout << "samples " << r.rows.size() << ", final energy " << r.rows.back().energy << '\n';
  return 0;
}

int cmd_compare(const std::string& config, const std::string& out) {
  const RunConfig cfg = config.empty() ? compare_nonlinear_config()
                                       : run_config_from_json(read_json_file(config));
  std::filesystem::create_directories(out);
  const CompareSummary s = compare_damping(cfg);
  write_compare_csv(std::filesystem::path(out) / "compare.csv", s);
  write_json_file(std::filesystem::path(out) / "compare.json",
                  {{"config", to_json(cfg)},
                   {"final_l2_ratio", s.final_l2_ratio},
                   {"final_x_ratio", s.final_x_ratio},
                   {"undamped_diverged", s.undamped_diverged},
                   {"undamped_error", s.undamped_error}});
  std::cout << "final L2 ratio " << s.final_l2_ratio << ", final X ratio " << s.final_x_ratio
            << (s.undamped_diverged ? " (undamped run diverged)" : "") << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Damped boundary-layer solver, Gevrey norm monitoring and test suites"};
  app.require_subcommand(1);

  std::string config, out = "out", kind;
  auto* run = app.add_subcommand("run", "Integrate one configuration");
  run->add_option("--config", config, "JSON run configuration")->check(CLI::ExistingFile);
  run->add_option("--out", out, "Output directory");

  auto* toy = app.add_subcommand("toy", "Integrate the hyperbolic toy model");
  toy->add_option("--config", config, "JSON toy configuration")->check(CLI::ExistingFile);
  toy->add_option("--out", out, "Output directory");

  auto* suite = app.add_subcommand("suite", "Run a pinned acceptance suite");
  suite->add_option("kind", kind, "oracle-linear | mms | refine-residuals | decay | toy | compare")
      ->required();
  suite->add_option("--config", config, "Unused; suites run pinned configurations");
  suite->add_option("--out", out, "Output directory");

  auto* cmp = app.add_subcommand("compare-damping", "Paired runs with damping on and off");
  cmp->add_option("--config", config, "JSON run configuration")->check(CLI::ExistingFile);
  cmp->add_option("--out", out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(config, out);
    if (*toy) return cmd_toy(config, out);
    if (*cmp) return cmd_compare(config, out);
    if (*suite) {
      const auto& kinds = prandtl::suite_kinds();
      if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) {
        std::cerr << "unknown suite kind '" << kind << "'\n" << suite->help();
        return 2;
      }
      return prandtl::run_suite(kind, out, std::cout);
    }
  } catch (const prandtl::ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
