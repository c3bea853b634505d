#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

#include "vfl/cli.hpp"

namespace vfl::cli::detail {

struct Csv {
  explicit Csv(const std::string& header) : text(header + "\n") {}
  void row(std::initializer_list<double> values);
  void cells(const std::vector<std::string>& values);
  std::string text;
};

void write_atomic(const std::filesystem::path& path, std::string_view content);
std::string timestamp_now();
void add_output(RunManifest& m, const std::filesystem::path& dir, const std::string& name,
                const std::string& content);
nlohmann::json report_json(const ConservationReport& r);
std::string report_csv(const ConservationReport& r);
nlohmann::json defaults_json(const ScenarioConfig& c);
// Hashes the output list and writes manifest.json atomically.
void finish(RunManifest& m, const std::filesystem::path& dir);

}  // namespace vfl::cli::detail
