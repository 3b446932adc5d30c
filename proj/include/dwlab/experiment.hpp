#pragma once

#include <filesystem>

#include "dwlab/config.hpp"
#include "dwlab/scaling.hpp"

namespace dwlab {

struct SuiteItem {
  std::string name;
  double predicted = 0.0;
  double measured = 0.0;
  Verdict verdict = Verdict::INCONCLUSIVE;
  std::string note;
};

struct RunRecord {
  std::string experiment_id;
  std::string timestamp;
  std::string suite;
  std::vector<std::string> artifacts;
  int violations = 0;
  int inconclusive = 0;
  int consistent = 0;
};

struct SuiteResult {
  std::string suite;
  std::string experiment_id;
  std::vector<SuiteItem> items;
  std::vector<std::string> artifacts;
  bool had_errors = false;

  bool any_violation() const {
    for (const auto& it : items)
      if (it.verdict == Verdict::VIOLATION) return true;
    return false;
  }
};

// executes the selected suite, writing resolved config, CSVs, JSON summary
// and optional gnuplot scripts under out_dir/<suite>-<id>/
SuiteResult run_suite(const ExperimentConfig& cfg,
                      const std::filesystem::path& out_dir, bool plots);

// CLI entry points; return process exit codes
int run_command(const std::string& config_path, const std::string& out_override,
                bool plots, int jobs);
int report_command(const std::string& dir);

// deterministic parallel map; jobs <= 1 runs inline
void parallel_for(int count, int jobs, const std::function<void(int)>& fn);

// smooth compactly supported radial bump of unit height and support radius R0
std::vector<double> compact_bump(const SectorGrid& grid, double R0, double amp);

} // namespace dwlab
