#include <CLI11.hpp>

#include "dwlab/experiment.hpp"
#include "dwlab/kernels.hpp"

int main(int argc, char** argv) {
  CLI::App app{"dwlab - numerical laboratory for damped wave resolvents"};
  app.require_subcommand(1);

  std::string config_path, out_dir, report_dir;
  bool plots = false;
  int jobs = 0;

  auto* run = app.add_subcommand("run", "execute an experiment suite");
  run->add_option("config", config_path, "TOML experiment config")->required();
  run->add_option("--out", out_dir, "output directory (overrides [run].out_dir)");
  run->add_flag("--plots", plots, "emit gnuplot scripts next to the CSVs");
  run->add_option("--jobs", jobs, "worker count (DWLAB_JOBS overrides)");

  auto* report = app.add_subcommand("report", "summarize finished runs");
  report->add_option("dir", report_dir, "directory holding run outputs")->required();

  auto* simd = app.add_subcommand("simd", "print the active kernel ISA");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return dwlab::run_command(config_path, out_dir, plots, jobs);
  if (report->parsed()) return dwlab::report_command(report_dir);
  if (simd->parsed()) {
    std::printf("%s\n", dwlab::kern::isa_name());
    return 0;
  }
  return 0;
}
