#pragma once

#include "skrp/models.hpp"
#include "skrp/profiles.hpp"
#include "skrp/verify.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace skrp::cli {

using json = nlohmann::ordered_json;

enum ExitCode { kPass = 0, kNumericFail = 1, kConfigError = 2 };

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  double tol_scale = 1.0;
  std::optional<int> threads;
};

struct PlanItem {
  std::string check;
  double tolerance = 0.0;
  json params = json::object();
};

struct RunConfig {
  json raw;
  json profile;  // null when the model implies it
  json model;
  std::vector<PlanItem> plan;
  FDConfig fd;
  int points = 100;
  std::uint64_t seed = 1;
  int threads = 1;
  double tol_scale = 1.0;
  std::optional<std::string> report_path;
  std::optional<std::string> grid_path;
  json sweep;

  json resolved() const;
};

// Throws Error(ConfigError) on schema violations and unknown keys.
RunConfig parse_config(const json& config, const Overrides& ov = {});
json load_json(const std::string& path);

Profile build_profile(const json& profile);
ModelSpec build_model_spec(const json& model, const std::optional<Profile>& profile);

struct CheckInfo {
  std::string name;
  std::string identity;
  double default_tolerance;
};
const std::vector<CheckInfo>& check_catalog();

struct Outcome {
  json report;
  bool pass = false;
};
Outcome verify(const RunConfig& cfg);
Outcome build(const RunConfig& cfg, std::string* grid_csv);
Outcome classify(const RunConfig& cfg);
std::string sweep_csv(const RunConfig& cfg);
std::string render_summary(const json& report);

// Pretty-printed report with the timestamp alone on the second line.
std::string dump_report(json report);
std::string csv_field(const std::string& s);
std::string csv_number(double v);

// Full command line entry point; returns the process exit code.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace skrp::cli
