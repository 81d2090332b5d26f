#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "jfs/scenario.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitMismatch = 1;
constexpr int kExitError = 2;

struct Job {
  std::string label;
  std::optional<std::string> name;
  std::optional<fs::path> config;
};

using Result = std::variant<jfs::RunReport, std::string>;

Result run_job(const Job& job, const jfs::RunOptions& options) {
  try {
    const auto scenario = job.config ? jfs::load_scenario(*job.config) : jfs::builtin_scenario(*job.name);
    return jfs::run_scenario(scenario, options);
  } catch (const std::exception& e) {
    return std::string(e.what());
  }
}

std::string render(const jfs::RunReport& report, const std::string& format) {
  if (format == "csv") return jfs::report_to_csv(report);
  return jfs::report_to_json(report).dump(2) + "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Jacobi field splitting checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", jfs::kToolVersion);

  auto* list = app.add_subcommand("list", "List the built-in scenarios");

  std::string show_name;
  auto* show = app.add_subcommand("show", "Print a built-in scenario as a JSON config");
  show->add_option("name", show_name, "Scenario name")->required();

  std::vector<std::string> names;
  std::vector<std::string> configs;
  bool all = false;
  bool traces = false;
  bool timing = false;
  std::string format = "json";
  std::optional<std::string> out_dir;
  jfs::RunOptions options;
  auto* run = app.add_subcommand("run", "Run scenarios and report verdicts");
  run->add_option("names", names, "Built-in scenario names");
  run->add_option("--config", configs, "Scenario config file (JSON)")->check(CLI::ExistingFile);
  run->add_flag("--all", all, "Run every built-in scenario");
  run->add_option("--step", options.step, "Grid step")->check(CLI::PositiveNumber);
  run->add_option("--tol-zero", options.tol_zero, "Kernel threshold for vanishing fields")
      ->check(CLI::PositiveNumber);
  run->add_option("--tol-eig", options.tol_eig, "Slack in boundary eigenvalue gates")
      ->check(CLI::PositiveNumber);
  run->add_flag("--traces", traces, "Write CSV traces (into --out or the working directory)");
  run->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  run->add_option("--out", out_dir, "Directory for reports and traces");
  run->add_option("--seed", options.seed, "Seed for the sampled curvature cross-checks");
  run->add_flag("--timing", timing, "Include wall time in reports");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  if (*list) {
    for (const auto& name : jfs::list_scenarios()) {
      std::cout << name << "  " << jfs::builtin_scenario(name).description << "\n";
    }
    return 0;
  }
  if (*show) {
    try {
      std::cout << jfs::scenario_to_json(jfs::builtin_scenario(show_name)).dump(2) << "\n";
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitError;
    }
    return 0;
  }

  options.timing = timing;
  std::vector<Job> jobs;
  if (all) {
    for (const auto& name : jfs::list_scenarios()) jobs.push_back({name, name, std::nullopt});
  }
  for (const auto& name : names) jobs.push_back({name, name, std::nullopt});
  for (const auto& path : configs) jobs.push_back({path, std::nullopt, fs::path(path)});
  if (jobs.empty()) {
    std::cerr << "error: nothing to run (give scenario names, --config or --all)\n";
    return kExitError;
  }
  if (traces) options.trace_dir = fs::path(out_dir.value_or("."));

  // Scenarios are independent; each pipeline is single-threaded.
  std::vector<std::future<Result>> futures;
  for (const auto& job : jobs) {
    futures.push_back(std::async(std::launch::async, run_job, job, options));
  }

  int code = 0;
  std::vector<jfs::RunReport> reports;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    Result result = futures[i].get();
    if (auto* err = std::get_if<std::string>(&result)) {
      std::cerr << "error: " << jobs[i].label << ": " << *err << "\n";
      code = kExitError;
      continue;
    }
    auto& report = std::get<jfs::RunReport>(result);
    std::size_t matched = 0;
    for (const auto& c : report.checks) matched += c.match ? 1 : 0;
    std::cerr << report.scenario << ": " << matched << "/" << report.checks.size()
              << " checks match\n";
    for (std::size_t k = 0; k < report.checks.size(); ++k) {
      const auto& c = report.checks[k];
      if (c.match) continue;
      std::cerr << "  check " << k << " (" << jfs::to_string(c.kind) << "): expected "
                << (c.expect ? jfs::to_string(*c.expect) : std::string("any")) << ", got "
                << jfs::to_string(c.verdict) << "\n";
    }
    if (!report.ok() && code == 0) code = kExitMismatch;
    reports.push_back(std::move(report));
  }

  try {
    if (reports.empty()) {
      // nothing to print
    } else if (out_dir) {
      fs::create_directories(*out_dir);
      for (const auto& r : reports) {
        std::ofstream os(fs::path(*out_dir) / (r.scenario + "." + format));
        os << render(r, format);
      }
    } else if (format == "csv") {
      bool first = true;
      for (const auto& r : reports) {
        std::string text = jfs::report_to_csv(r);
        if (!first) text = text.substr(text.find('\n') + 1);
        std::cout << text;
        first = false;
      }
    } else if (reports.size() == 1) {
      std::cout << render(reports.front(), format);
    } else {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& r : reports) arr.push_back(jfs::report_to_json(r));
      std::cout << arr.dump(2) << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return code;
}
