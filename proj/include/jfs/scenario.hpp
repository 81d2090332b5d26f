#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "jfs/comparison.hpp"
#include "jfs/reduction.hpp"
#include "jfs/splitting.hpp"

namespace jfs {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kReportSchema = "jfs-report/1";
inline constexpr const char* kScenarioSchema = "jfs-scenario/1";

enum class CheckKind { Splitting, Rigidity, Comparison, Hce, ReducedBoundary, DualLeaf };

std::string to_string(CheckKind kind);
CheckKind check_kind_from_string(const std::string& name);

/// One check of a scenario and the verdict it is expected to produce. Without
/// an expectation any verdict other than `falsified` matches.
/// Which parameters are read depends on the kind:
///   splitting         theorem, alpha (B, E), k (C, E), dims
///   rigidity          alpha
///   comparison        anchors (times; empty = anchor_count evenly spaced)
///   hce               psi, tol, rhat
///   reduced_boundary  psi, alpha
///   dual_leaf         k
struct CheckSpec {
  CheckKind kind = CheckKind::Splitting;
  std::optional<Verdict> expect = Verdict::Verified;
  std::optional<Theorem> theorem;
  std::optional<double> alpha;
  std::optional<int> k;
  std::optional<std::pair<Index, Index>> dims;  // expected (dim Z, dim P)
  Matrixd psi;                                   // columns span Psi
  std::vector<double> anchors;
  int anchor_count = 20;
  double tol = 1e-4;            // HCE residual tolerance
  std::optional<double> rhat;   // expected PH R PH + 3AA^* = rhat id on H
};

struct Scenario {
  std::string name;
  std::string description;
  FamilySpec family;
  double step = kDefaultStep;
  Tolerances tol;
  std::vector<CheckSpec> checks;
};

/// Names of the built-in scenarios, in registry order.
std::vector<std::string> list_scenarios();
/// Throws Error for unknown names.
Scenario builtin_scenario(const std::string& name);

nlohmann::json scenario_to_json(const Scenario& scenario);
/// Keys starting with '_' are ignored, so configs can carry annotations.
Scenario scenario_from_json(const nlohmann::json& doc);
Scenario load_scenario(const std::filesystem::path& path);

struct CheckOutcome {
  CheckKind kind = CheckKind::Splitting;
  std::optional<Verdict> expect;
  Verdict verdict = Verdict::Verified;
  bool match = true;
  nlohmann::json params;
  nlohmann::json details;
};

struct RunReport {
  std::string scenario;
  std::string tool_version = kToolVersion;
  double step = 0.0;  // effective grid step
  std::uint64_t seed = 0;
  double wronskian_drift = 0.0;
  ResidualSummary riccati;
  std::vector<CheckOutcome> checks;
  std::optional<double> wall_time;  // only with timing enabled

  bool ok() const;
};

nlohmann::json report_to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& doc);

struct RunOptions {
  std::optional<double> step;
  std::optional<double> tol_zero;
  std::optional<double> tol_eig;
  std::uint64_t seed = 1;
  bool timing = false;
  /// When set, CSV traces are written into this directory.
  std::optional<std::filesystem::path> trace_dir;
};

/// Integrates the family and runs every check. Numerical failures propagate
/// as jfs::Error.
RunReport run_scenario(const Scenario& scenario, const RunOptions& options = {});

/// A random self-adjoint family over diag(eigs) with eigenvalues in [lo, hi],
/// dimension n in [3, 5] and alpha in [0, 1.2], together with splitting
/// (B, E), rigidity and comparison checks that carry no expectation.
Scenario random_scenario(std::uint64_t seed, double lo = 1.0, double hi = 2.5);

/// Summary lines: scenario,check,expect,verdict,match.
std::string report_to_csv(const RunReport& report);

}  // namespace jfs
