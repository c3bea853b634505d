#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>

#include "cli_internal.hpp"
#include "vfl/errors.hpp"

namespace vfl::cli {

using nlohmann::json;

std::string fnv1a64_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const ScenarioConfig& config) {
  json j = config.effective();
  // Output placement does not change what is computed.
  j.erase("output");
  return fnv1a64_hex(j.dump());
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const ValidationError*>(&e)) return 1;
  if (const auto* pe = dynamic_cast<const PhysicsError*>(&e)) {
    switch (pe->code()) {
      case ErrorCode::NoConvergence: return 3;
      case ErrorCode::InvalidInput:
      case ErrorCode::MisalignedScenarios: return 1;
      default: return 2;
    }
  }
  return 1;
}

json RunManifest::to_json() const {
  json files = json::array();
  for (const OutputFile& f : outputs) files.push_back({{"path", f.path}, {"fnv1a64", f.hash}});
  return {{"name", name},
          {"config_hash", config_hash},
          {"tool_version", tool_version},
          {"timestamp", timestamp},
          {"outputs", files},
          {"outputs_hash", outputs_hash},
          {"report", report},
          {"defaults", defaults},
          {"exit_status", exit_status},
          {"error", error}};
}

namespace detail {

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("output.dir", "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ValidationError("output.dir", "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string timestamp_now() {
  std::time_t t = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) t = std::strtoll(epoch, nullptr, 10);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void Csv::row(std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) text += ',';
    text += format_double(v);
    first = false;
  }
  text += '\n';
}

void Csv::cells(const std::vector<std::string>& values) {
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) text += ',';
    text += values[i];
  }
  text += '\n';
}

void add_output(RunManifest& m, const std::filesystem::path& dir, const std::string& name,
                const std::string& content) {
  write_atomic(dir / name, content);
  m.outputs.push_back({name, fnv1a64_hex(content)});
}

json report_json(const ConservationReport& r) {
  json inv = json::object();
  for (const InvariantStats& s : r.invariants) {
    inv[s.name] = {{"initial", s.initial},
                   {"max_abs_drift", s.max_abs_drift},
                   {"relative_drift", s.relative_drift},
                   {"samples", s.samples}};
  }
  return {{"invariants", inv}, {"softening", r.softening}};
}

std::string report_csv(const ConservationReport& r) {
  Csv csv("invariant,initial,max_abs_drift,relative_drift,samples");
  for (const InvariantStats& s : r.invariants) {
    csv.cells({s.name, format_double(s.initial), format_double(s.max_abs_drift),
               format_double(s.relative_drift), std::to_string(s.samples)});
  }
  return csv.text;
}

json defaults_json(const ScenarioConfig& c) {
  return {{"softening", c.source.softening},
          {"step", c.integration.step},
          {"n_steps", c.integration.n_steps},
          {"rel_tol", c.integration.rel_tol},
          {"abs_tol", c.integration.abs_tol},
          {"audit_every", c.integration.audit_every},
          {"conformal_tol", c.conformal.tol},
          {"conformal_max_iters", c.conformal.max_iters},
          {"string_domain_margin", kStringDomainMargin}};
}

void finish(RunManifest& m, const std::filesystem::path& dir) {
  std::string all;
  for (const OutputFile& f : m.outputs) all += f.path + ':' + f.hash + '\n';
  m.outputs_hash = fnv1a64_hex(all);
  m.path = dir / "manifest.json";
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  try {
    write_atomic(m.path, m.to_json().dump(2) + "\n");
  } catch (const std::exception& e) {
    if (m.exit_status == 0) m.exit_status = 1;
    if (m.error.empty()) m.error = e.what();
    m.path.clear();
  }
}

}  // namespace detail
}  // namespace vfl::cli
