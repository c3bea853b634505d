#include <cstdio>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "checks_internal.hpp"
#include "vfl/cli.hpp"

namespace vfl::checks {

namespace {

const char* kParticleScenario = R"({
  "name": "determinism_probe",
  "kind": "particle",
  "model": {"kind": "vacuum-free"},
  "source": {"kind": "coulomb-static", "strength": 12.566370614359172, "softening": 1e-3},
  "initial": {"r": [1, 0, 0], "u": [0, 0.5, 0]},
  "integration": {"step": 1e-4, "n_steps": 2000, "audit_every": 10}
})";

const char* kStringScenario = R"({
  "name": "determinism_string",
  "kind": "string",
  "source": {"kind": "uniform", "strength": -1},
  "string": {"nodes": 32, "pluck": {"amplitude": 1e-3}},
  "integration": {"step": 1e-4, "n_steps": 100, "audit_every": 50}
})";

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

CriterionResult determinism_and_format(double suite_seconds) {
  Timer timer;
  CriterionResult r = start(11, "determinism of reruns and check-suite runtime");
  return guarded(r, timer, [&] {
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / ("vfl_check_" + std::to_string(::getpid()));
    bool same = true;
    std::ostringstream d;
    for (const auto& [text, csv] : {std::pair{kParticleScenario, "trajectory.csv"},
                                    std::pair{kStringScenario, "string.csv"}}) {
      cli::ScenarioConfig c = cli::parse_config_text(text);
      c.out_dir = (base / "a").string();
      const cli::RunManifest m1 = cli::run_scenario(c);
      c.out_dir = (base / "b").string();
      const cli::RunManifest m2 = cli::run_scenario(c);
      const std::string f1 = slurp(base / "a" / csv), f2 = slurp(base / "b" / csv);
      const std::string header = f1.substr(0, f1.find('\n'));
      const bool ok = m1.exit_status == 0 && m2.exit_status == 0 && !f1.empty() && f1 == f2 &&
                      m1.config_hash == m2.config_hash && m1.outputs_hash == m2.outputs_hash;
      same = same && ok;
      d << c.name << (ok ? " identical" : " DIFFERS") << " (" << header << "); ";
    }
    std::error_code ec;
    fs::remove_all(base, ec);
    const double total = suite_seconds + timer.seconds();
    r.passed = same && total < 60.0;
    d << "suite runtime " << total << " s (limit 60 s)";
    r.detail = d.str();
  });
}

std::vector<CriterionResult> run_all() {
  Timer timer;
  std::vector<CriterionResult> out;
  out.push_back(rest_mass_recovery());
  out.push_back(hamiltonian_conservation());
  out.push_back(classical_limit());
  out.push_back(contact_force_oracle());
  out.push_back(constrained_multiplier());
  out.push_back(variational_cross_check());
  out.push_back(gyro_orbit());
  out.push_back(string_conservation());
  out.push_back(conformal_solver());
  out.push_back(hamiltonian_functional_gap());
  out.push_back(determinism_and_format(timer.seconds()));
  return out;
}

std::string format_line(const CriterionResult& r) {
  char head[64];
  std::snprintf(head, sizeof head, "[%s] %2d  ", r.passed ? "PASS" : "FAIL", r.id);
  char tail[32];
  std::snprintf(tail, sizeof tail, " [%.2f s]", r.seconds);
  return head + r.title + ": " + r.detail + tail;
}

}  // namespace vfl::checks
