#include "dilation/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace dilation {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// JSON has no NaN/Inf; encode them as strings so reports stay loadable.
nlohmann::json number_or_tag(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double tag_to_number(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  return std::nan("");
}

}  // namespace

Check& Report::add_upper(std::string name, std::string invariant, double value,
                         double threshold) {
  checks.push_back({std::move(name), std::move(invariant), value, threshold,
                    value <= threshold});
  return checks.back();
}

Check& Report::add_lower(std::string name, std::string invariant, double value,
                         double threshold) {
  checks.push_back({std::move(name), std::move(invariant), value, threshold,
                    value >= threshold});
  return checks.back();
}

Check& Report::add_flag(std::string name, std::string invariant, bool pass, double value) {
  checks.push_back({std::move(name), std::move(invariant), value, 0.0, pass});
  return checks.back();
}

void Report::merge(const Report& other, const std::string& prefix) {
  for (auto c : other.checks) {
    if (!prefix.empty()) c.name = prefix + "." + c.name;
    checks.push_back(std::move(c));
  }
  if (!other.details.empty()) {
    details[prefix.empty() ? other.scenario : prefix] = other.details;
  }
}

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const Check* Report::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

nlohmann::json to_json(const Report& report) {
  nlohmann::json j;
  j["scenario"] = report.scenario;
  j["passed"] = report.passed();
  j["checks"] = nlohmann::json::array();
  for (const auto& c : report.checks) {
    j["checks"].push_back({{"name", c.name},
                           {"invariant", c.invariant},
                           {"value", number_or_tag(c.value)},
                           {"threshold", number_or_tag(c.threshold)},
                           {"pass", c.pass}});
  }
  j["details"] = report.details;
  return j;
}

Report report_from_json(const nlohmann::json& j) {
  Report r;
  r.scenario = j.at("scenario").get<std::string>();
  for (const auto& c : j.at("checks")) {
    r.checks.push_back({c.at("name").get<std::string>(), c.at("invariant").get<std::string>(),
                        tag_to_number(c.at("value")), tag_to_number(c.at("threshold")),
                        c.at("pass").get<bool>()});
  }
  if (j.contains("details")) r.details = j.at("details");
  return r;
}

std::string to_csv(const Report& report) {
  std::ostringstream os;
  os << "name,invariant,value,threshold,pass\n";
  for (const auto& c : report.checks) {
    os << c.name << ',' << c.invariant << ',' << format_double(c.value) << ','
       << format_double(c.threshold) << ',' << (c.pass ? "true" : "false") << '\n';
  }
  return os.str();
}

}  // namespace dilation
