#pragma once

// The command layer behind the cpt-locc tool. Each command returns a Report
// that renders as text or JSON and carries the process exit code.

#include "cpt/scenario.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cpt {

enum class ReportVerdict {
  Pass,
  Fail,
  ConsistentDistinguishes,
  Contradiction,
  Inconclusive,
  NotApplicable,
  ContradictionHypothesis,
};

std::string to_string(ReportVerdict verdict);

/// Bad arguments: unknown protocol, missing output path. Exit code 2.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& message) : std::runtime_error(message) {}
};

struct Report {
  std::string command;
  std::string scenario_id;
  std::string protocol;
  std::vector<std::pair<std::string, Real>> deviations;
  ReportVerdict verdict = ReportVerdict::Fail;
  Real tolerance = kDefaultTolerance;
  double wall_time_s = 0;
  nlohmann::json details = nlohmann::json::object();
  int exit_code = 0;

  std::string to_text() const;
  /// Every field except wall time is a pure function of the inputs.
  nlohmann::json to_json() const;
};

/// Distinguishing check, or preparation check when the protocol takes the
/// label as input and returns the parties' systems.
Report cmd_verify(const Scenario& scenario, const std::string& protocol, Real tol);

/// Writes the reversed protocol to `out` under the same name.
Report cmd_reverse(const Scenario& scenario, const std::string& protocol,
                   const std::filesystem::path& out, Real tol);

/// Tests hand-crafted, scenario and `suite` seeded random candidates against
/// a family with entangled members.
Report cmd_refute(const Scenario& scenario, Index suite, std::uint64_t seed, Real tol);

/// Builds and verifies the product distinguisher; with `out`, also writes it.
Report cmd_distinguish(const Scenario& scenario, Real tol,
                       const std::optional<std::filesystem::path>& out = std::nullopt);

Report cmd_check_family(const Scenario& scenario, Real tol);

}  // namespace cpt
