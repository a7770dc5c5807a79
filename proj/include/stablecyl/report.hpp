#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace stablecyl {

enum class CheckStatus { Pass, Fail, NotApplicable };
std::string to_string(CheckStatus status);
CheckStatus check_status_from_string(const std::string& name);

struct CheckRecord {
  std::string name;
  CheckStatus status = CheckStatus::NotApplicable;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string anchor;  // the result being exercised, or "plumbing"
  double seconds = 0.0;
  nlohmann::json details = nlohmann::json::object();
};

struct RunReport {
  std::string experiment;
  std::vector<CheckRecord> checks;
  nlohmann::json data = nlohmann::json::object();

  // True iff no applicable check failed.
  bool passed() const;
  CheckRecord& add(CheckRecord record);
};

void to_json(nlohmann::json& j, const CheckRecord& r);
void from_json(const nlohmann::json& j, CheckRecord& r);
void to_json(nlohmann::json& j, const RunReport& r);
void from_json(const nlohmann::json& j, RunReport& r);

// `include_timing = false` drops the wall-clock fields, leaving output that is
// reproducible byte for byte.
std::string dump_report(const RunReport& report, bool include_timing = true);
void write_report(const std::string& path, const RunReport& report);

}  // namespace stablecyl
