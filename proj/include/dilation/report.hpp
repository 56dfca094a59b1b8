#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace dilation {

// One named residual compared against a threshold. `invariant` ties the
// check back to the module property it witnesses.
struct Check {
  std::string name;
  std::string invariant;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct Report {
  std::string scenario;
  std::vector<Check> checks;
  nlohmann::json details = nlohmann::json::object();

  // value <= threshold
  Check& add_upper(std::string name, std::string invariant, double value, double threshold);
  // value >= threshold
  Check& add_lower(std::string name, std::string invariant, double value, double threshold);
  Check& add_flag(std::string name, std::string invariant, bool pass, double value = 0.0);

  void merge(const Report& other, const std::string& prefix = {});
  bool passed() const;
  const Check* find(const std::string& name) const;
};

nlohmann::json to_json(const Report& report);
Report report_from_json(const nlohmann::json& j);
// name,invariant,value,threshold,pass
std::string to_csv(const Report& report);

}  // namespace dilation
