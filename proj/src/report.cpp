#include "stablecyl/report.hpp"

#include "stablecyl/errors.hpp"

#include <cmath>
#include <limits>
#include <fstream>

namespace stablecyl {

std::string to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::NotApplicable: return "not-applicable";
  }
  return "fail";
}

CheckStatus check_status_from_string(const std::string& name) {
  if (name == "pass") return CheckStatus::Pass;
  if (name == "fail") return CheckStatus::Fail;
  if (name == "not-applicable") return CheckStatus::NotApplicable;
  throw ArgumentError("unknown check status '" + name + "'");
}

bool RunReport::passed() const {
  for (const auto& c : checks)
    if (c.status == CheckStatus::Fail) return false;
  return true;
}

CheckRecord& RunReport::add(CheckRecord record) {
  if (record.anchor.empty()) record.anchor = "plumbing";
  checks.push_back(std::move(record));
  return checks.back();
}

namespace {

// JSON has no representation for inf/nan; keep them as strings.
nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

double number_from(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

void to_json(nlohmann::json& j, const CheckRecord& r) {
  j = nlohmann::json{{"name", r.name},
                     {"status", to_string(r.status)},
                     {"measured", number(r.measured)},
                     {"tolerance", number(r.tolerance)},
                     {"anchor", r.anchor.empty() ? "plumbing" : r.anchor},
                     {"seconds", r.seconds},
                     {"details", r.details}};
}

void from_json(const nlohmann::json& j, CheckRecord& r) {
  r.name = j.at("name").get<std::string>();
  r.status = check_status_from_string(j.at("status").get<std::string>());
  r.measured = number_from(j.at("measured"));
  r.tolerance = number_from(j.at("tolerance"));
  r.anchor = j.at("anchor").get<std::string>();
  r.seconds = j.value("seconds", 0.0);
  r.details = j.value("details", nlohmann::json::object());
}

void to_json(nlohmann::json& j, const RunReport& r) {
  j = nlohmann::json{{"experiment", r.experiment},
                     {"status", r.passed() ? "pass" : "fail"},
                     {"checks", r.checks},
                     {"data", r.data}};
}

void from_json(const nlohmann::json& j, RunReport& r) {
  r.experiment = j.at("experiment").get<std::string>();
  r.checks = j.at("checks").get<std::vector<CheckRecord>>();
  r.data = j.value("data", nlohmann::json::object());
}

std::string dump_report(const RunReport& report, bool include_timing) {
  nlohmann::json j = report;
  if (!include_timing)
    for (auto& c : j["checks"]) c.erase("seconds");
  return j.dump(2);
}

void write_report(const std::string& path, const RunReport& report) {
  std::ofstream os(path);
  if (!os) throw ArgumentError("cannot write report to " + path);
  os << dump_report(report) << '\n';
}

}  // namespace stablecyl
