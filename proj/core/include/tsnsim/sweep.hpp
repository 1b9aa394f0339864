#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tsnsim/metrics.hpp"
#include "tsnsim/scenario.hpp"

namespace tsnsim {

struct RunOutput {
  std::string scenario;
  std::string mode;
  std::string sweep_variable;
  std::optional<double> sweep_value;
  std::uint64_t seed = 0;
  std::uint64_t scenario_hash = 0;
  SimTime duration = 0;
  SimTime warmup_cutoff = 0;

  Summary be;
  Summary hp;
  std::vector<SimTime> be_delays;  // post-warmup, emission order

  std::uint64_t emitted = 0;
  std::uint64_t delivered = 0;
  std::uint64_t in_system_at_end = 0;
  SimTime max_hp_wait = 0;
  SimTime max_be_wait = 0;
  std::uint64_t wc_violations = 0;
  std::uint64_t idle_backlog_intervals = 0;
  SimTime idle_backlog_time = 0;
  std::uint64_t window_overlaps = 0;

  std::string out_dir;  // empty when no CSVs were written
};

struct RunOptions {
  std::optional<SimTime> duration_override;
  std::string out_dir;  // write delays/backlog/resolved_config there if set
};

/// Resolves and executes one run; writes per-run CSVs when requested.
RunOutput execute_run(const Scenario& scenario, const std::string& mode,
                      std::optional<double> sweep_value, std::uint64_t seed,
                      const RunOptions& options = {});

struct SweepOptions {
  std::optional<SimTime> duration_override;
  std::string out_dir;  // root; per-run directories are created below it
  int jobs = 1;
  bool write_run_csvs = true;
  bool render_svg = false;  // simple line charts next to the figure csv files
};

/// Cartesian product of modes x sweep values x seeds, executed independently
/// (optionally in parallel); results come back in deterministic order.
std::vector<RunOutput> execute_sweep(const Scenario& scenario,
                                     const std::vector<std::string>& modes,
                                     const std::vector<std::uint64_t>& seeds,
                                     const SweepOptions& options);

/// One row per run: the long-format summary described in the README.
void write_summary_csv(std::ostream& out, const std::vector<RunOutput>& runs);

/// Per-figure data files: mean delay / backlog per (sweep value, mode) with
/// columns relative to SP, and the moving-average series when the scenario
/// configures a window.
void write_figure_files(const std::string& dir, const Scenario& scenario,
                        const std::vector<RunOutput>& runs);

/// Optional rendering layer over the figure data: one line chart per figure
/// file, one polyline per mode.
void render_figure_svgs(const std::string& dir, const Scenario& scenario,
                        const std::vector<RunOutput>& runs);

}  // namespace tsnsim
