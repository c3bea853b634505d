#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "vfl/integrate.hpp"
#include "vfl/particle.hpp"
#include "vfl/potentials.hpp"
#include "vfl/string_model.hpp"

namespace vfl::cli {

inline constexpr std::string_view kToolVersion = "0.3.0";

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Schema or physics violation in a config; key() names the offending entry.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string key, const std::string& what)
      : std::runtime_error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

enum class ScenarioKind { Particle, String, Conformal, Audit };

std::string_view to_string(ScenarioKind kind);

struct StringSetup {
  StringGrid grid;
  double length = 1.0;
  // Transverse Gaussian momentum profile, zero at both ends.
  double pluck_amplitude = 0.0;
  double pluck_center = 0.5;
  double pluck_width = 0.1;
};

struct ConformalSetup {
  int n_sigma = 33;
  int n_s = 33;
  double sigma0 = 0.0;
  double sigma1 = 1.0;
  double s0 = 0.0;
  double s1 = 1.0;
  std::string boundary = "exp";  // exp | quadratic
  double tol = 1e-10;
  long max_iters = 100000;
};

struct ScenarioConfig {
  std::string name;
  ScenarioKind kind = ScenarioKind::Particle;
  ModelKind model = ModelKind::VacuumFree;
  Formulation formulation = Formulation::ForceLaw;
  double charge = 1.0;
  double rest_mass = 1.0;
  double field_charge = 1.0;  // charge used to build W from the source
  SourceSpec source;
  Vec3 r0;
  Vec3 u0;
  double t0 = 0.0;
  double tau0 = 0.0;
  IntegrationParams integration;
  StringSetup string;
  ConformalSetup conformal;
  std::string out_dir = "out";
  bool long_format = true;

  // Fully defaulted configuration as JSON; its canonical dump is hashed.
  nlohmann::json effective() const;
  ForceModel force_model() const;
  PotentialField field() const;
};

ScenarioConfig parse_config_text(std::string_view text, const std::string& origin = "<config>");
ScenarioConfig parse_config(const std::filesystem::path& path);

struct Overrides {
  std::optional<std::string> out;
  std::optional<long> steps;
  std::optional<double> step;
  std::optional<double> tol;
};

void apply_overrides(ScenarioConfig& config, const Overrides& o);

struct OutputFile {
  std::string path;
  std::string hash;
};

struct RunManifest {
  std::string name;
  std::string config_hash;
  std::string tool_version{kToolVersion};
  std::string timestamp;
  std::vector<OutputFile> outputs;
  std::string outputs_hash;
  nlohmann::json report = nlohmann::json::object();
  nlohmann::json defaults = nlohmann::json::object();
  int exit_status = 0;
  std::string error;
  std::filesystem::path path;

  nlohmann::json to_json() const;
};

// Never throws for physics failures: they are recorded in the manifest's
// exit status and error text. The manifest is always written.
RunManifest run_scenario(const ScenarioConfig& config);
// Integrates a particle scenario and runs the variational residual pass.
RunManifest audit_scenario(const ScenarioConfig& config);

enum class Alignment { ByT, ByTau };

RunManifest compare_models(const std::vector<ScenarioConfig>& configs, Alignment alignment,
                           const std::string& out_dir);

std::string fnv1a64_hex(std::string_view bytes);
std::string config_hash(const ScenarioConfig& config);
// 17 significant digits.
std::string format_double(double v);
// 0 success, 1 usage/validation, 2 physics abort, 3 no convergence.
int exit_code_for(const std::exception& e);

// Matching Lagrangian kind of a particle model.
std::string_view lagrangian_name_for(ModelKind kind);

}  // namespace vfl::cli
