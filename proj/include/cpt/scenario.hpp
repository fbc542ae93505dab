#pragma once

// Scenario files: a partition, a labelled family and named protocols in one
// JSON document. Complex numbers are [re, im] pairs and matrices are stored
// row-major as {"rows": r, "cols": c, "data": [...]}.

#include "cpt/locc.hpp"
#include "cpt/states.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace cpt {

inline constexpr int kScenarioFormatVersion = 1;

/// Malformed file, with the line or JSON field at fault.
class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(const std::string& message) : std::runtime_error(message) {}
};

struct NamedProtocol {
  std::string name;
  LoccProtocol protocol;
};

struct Scenario {
  std::string id;
  OrthonormalFamily family;
  std::vector<NamedProtocol> protocols;
  std::map<std::string, std::string> metadata;

  const PartyPartition& partition() const { return family.partition; }
  /// nullptr when absent.
  const LoccProtocol* find(const std::string& name) const;
};

enum class Validation {
  /// Reject incomplete or non-orthonormal families and ill-typed protocols.
  Strict,
  /// Only parse; used by check-family so violations can be reported.
  Lenient,
};

Scenario parse_scenario(const nlohmann::json& doc, Validation validation = Validation::Strict,
                        Real tol = kDefaultTolerance);
Scenario load_scenario(const std::filesystem::path& path,
                       Validation validation = Validation::Strict, Real tol = kDefaultTolerance);

nlohmann::json to_json(const Scenario& scenario);
nlohmann::json to_json(const LoccProtocol& protocol);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

}  // namespace cpt
