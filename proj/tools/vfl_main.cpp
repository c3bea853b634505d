#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vfl/checks.hpp"
#include "vfl/cli.hpp"

namespace {

using namespace vfl::cli;

int report(const RunManifest& m, bool quiet) {
  if (m.exit_status != 0) {
    std::cerr << "vfl: " << m.name << ": " << m.error << "\n";
  }
  if (!quiet) {
    std::cout << m.name << ": exit " << m.exit_status;
    if (!m.path.empty()) std::cout << ", manifest " << m.path.string();
    std::cout << "\n" << m.report.dump(2) << "\n";
  }
  return m.exit_status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Laboratory for vacuum-field relativistic electrodynamics"};
  app.require_subcommand(1);
  app.fallthrough();

  Overrides ov;
  std::string out;
  long steps = 0;
  double step = 0.0, tol = 0.0;
  bool quiet = false;
  app.add_option("--out", out, "output directory");
  app.add_option("--steps", steps, "override n_steps");
  app.add_option("--step", step, "override the step size");
  app.add_option("--tol", tol, "override the tolerance");
  app.add_flag("--quiet", quiet, "suppress the summary on stdout");
  app.set_version_flag("--version", std::string(kToolVersion));

  std::string run_path, audit_path, align = "by_t";
  std::vector<std::string> compare_paths;
  CLI::App* run = app.add_subcommand("run", "run a scenario");
  run->add_option("config", run_path, "scenario file")->required();
  CLI::App* cmp = app.add_subcommand("compare", "compare particle models along aligned trajectories");
  cmp->add_option("configs", compare_paths, "scenario files")->required()->expected(2, -1);
  cmp->add_option("--align", align, "by_t or by_tau")->check(CLI::IsMember({"by_t", "by_tau"}));
  CLI::App* aud = app.add_subcommand("audit", "variational residual pass over a particle scenario");
  aud->add_option("config", audit_path, "scenario file")->required();
  CLI::App* chk = app.add_subcommand("check", "run the acceptance criteria");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  if (!out.empty()) ov.out = out;
  if (app.count("--steps")) ov.steps = steps;
  if (app.count("--step")) ov.step = step;
  if (app.count("--tol")) ov.tol = tol;

  try {
    if (*chk) {
      bool all = true;
      for (const auto& r : vfl::checks::run_all()) {
        all = all && r.passed;
        if (!quiet || !r.passed) std::cout << vfl::checks::format_line(r) << "\n";
      }
      return all ? 0 : 2;
    }
    if (*run || *aud) {
      ScenarioConfig c = parse_config(*run ? run_path : audit_path);
      apply_overrides(c, ov);
      return report(*run ? run_scenario(c) : audit_scenario(c), quiet);
    }
    std::vector<ScenarioConfig> configs;
    for (const std::string& p : compare_paths) {
      configs.push_back(parse_config(p));
      apply_overrides(configs.back(), ov);
    }
    const Alignment a = align == "by_tau" ? Alignment::ByTau : Alignment::ByT;
    return report(compare_models(configs, a, out.empty() ? "out/compare" : out), quiet);
  } catch (const std::exception& e) {
    std::cerr << "vfl: " << e.what() << "\n";
    return exit_code_for(e);
  }
}
