#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tsnsim/scenario.hpp"
#include "tsnsim/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(csv);
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int cmd_run(const std::string& scenario_path, const std::string& mode,
            std::uint64_t seed, std::optional<double> sweep_value,
            std::optional<std::int64_t> duration, std::string out_dir) {
  const tsnsim::Scenario scenario = tsnsim::Scenario::load(scenario_path);
  if (!scenario.sweep_variable().empty() && !sweep_value) {
    sweep_value = scenario.sweep_values().front();
    std::cerr << "note: scenario sweeps " << scenario.sweep_variable()
              << "; using first value " << *sweep_value << "\n";
  }
  if (out_dir.empty()) {
    out_dir = "out/" + scenario.name() + "_" + mode + "_s" + std::to_string(seed);
  }
  tsnsim::RunOptions options;
  options.duration_override = duration;
  options.out_dir = out_dir;
  const tsnsim::RunOutput run =
      tsnsim::execute_run(scenario, mode, sweep_value, seed, options);
  std::printf("run %s mode=%s seed=%llu: be_mean_delay=%.1f us (n=%lld), "
              "hp_mean_delay=%.1f us (n=%lld) -> %s\n",
              run.scenario.c_str(), run.mode.c_str(),
              static_cast<unsigned long long>(run.seed),
              run.be.mean_delay / 1e3, static_cast<long long>(run.be.count),
              run.hp.mean_delay / 1e3, static_cast<long long>(run.hp.count),
              run.out_dir.c_str());
  return kExitOk;
}

int cmd_sweep(const std::string& scenario_path, const std::string& modes_csv,
              const std::string& seeds_csv, int jobs,
              std::optional<std::int64_t> duration, std::string out_dir,
              bool render_svg) {
  const tsnsim::Scenario scenario = tsnsim::Scenario::load(scenario_path);
  std::vector<std::string> modes = split_list(modes_csv);
  if (modes.empty()) modes = scenario.modes();
  std::vector<std::uint64_t> seeds;
  for (const std::string& s : split_list(seeds_csv)) {
    seeds.push_back(std::stoull(s));
  }
  if (seeds.empty()) seeds = scenario.seeds();
  if (out_dir.empty()) out_dir = "out";

  tsnsim::SweepOptions options;
  options.duration_override = duration;
  options.out_dir = out_dir;
  options.jobs = jobs;
  options.render_svg = render_svg;
  const auto runs = tsnsim::execute_sweep(scenario, modes, seeds, options);
  std::printf("sweep %s: %zu runs -> %s/%s/summary.csv\n",
              scenario.name().c_str(), runs.size(), out_dir.c_str(),
              scenario.name().c_str());
  return kExitOk;
}

int cmd_validate(const std::string& scenario_path) {
  const tsnsim::Scenario scenario = tsnsim::Scenario::load(scenario_path);
  // load() already resolved every mode at the first sweep point; echo the
  // fully resolved configuration of the first mode for inspection.
  const auto modes = scenario.modes();
  const auto values = scenario.sweep_values();
  const auto resolved = scenario.resolve(
      modes.front(),
      values.empty() ? std::nullopt : std::optional<double>(values.front()),
      scenario.seeds().front());
  for (const std::string& w : resolved.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  std::cout << resolved.resolved_json << "\n";
  std::fprintf(stderr, "scenario %s: ok (%zu modes", scenario.name().c_str(),
               modes.size());
  if (!values.empty()) {
    std::fprintf(stderr, ", sweep %s over %zu values",
                 scenario.sweep_variable().c_str(), values.size());
  }
  std::fprintf(stderr, ")\n");
  return kExitOk;
}

int cmd_gcl_synth(const std::string& scenario_path, const std::string& out_path,
                  std::optional<double> sweep_value) {
  const tsnsim::Scenario scenario = tsnsim::Scenario::load(scenario_path);
  if (!scenario.sweep_variable().empty() && !sweep_value) {
    sweep_value = scenario.sweep_values().front();
  }
  tsnsim::ResolvedRun run =
      scenario.resolve("tas", sweep_value, scenario.seeds().front());
  TSNSIM_CHECK(run.tas.has_value(), "tas mode resolved without a schedule");
  const std::string text =
      tsnsim::gcl_file_text(*run.tas, run.sim.topo, run.sim.flows);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << text;
  std::printf("wrote %s (hyperperiod %lld ns, %zu ports)\n", out_path.c_str(),
              static_cast<long long>(run.tas->hyperperiod),
              run.tas->gcls.size());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tsnsim: TSN egress-port forwarding simulator"};
  app.require_subcommand(1);

  std::string scenario_path, mode = "sp", out_dir, modes_csv, seeds_csv, gcl_out;
  std::uint64_t seed = 1;
  int jobs = 1;
  double sweep_value_raw = 0;
  std::int64_t duration_raw = -1;
  bool have_sweep_value = false;

  auto* run = app.add_subcommand("run", "execute one deterministic run");
  run->add_option("--scenario", scenario_path, "scenario file")->required();
  run->add_option("--mode", mode, "sp|fifo|cbs|ats|drr|tas")->required();
  run->add_option("--seed", seed, "rng seed");
  run->add_option("--duration", duration_raw, "override duration (ns)");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--sweep-value", sweep_value_raw, "sweep point to resolve")
      ->each([&](const std::string&) { have_sweep_value = true; });

  auto* sweep = app.add_subcommand("sweep", "run the scenario's sweep matrix");
  sweep->add_option("--scenario", scenario_path, "scenario file")->required();
  sweep->add_option("--modes", modes_csv, "comma-separated modes (default: all)");
  sweep->add_option("--seeds", seeds_csv, "comma-separated seeds (default: file)");
  sweep->add_option("--jobs", jobs, "parallel runs");
  sweep->add_option("--duration", duration_raw, "override duration (ns)");
  sweep->add_option("--out", out_dir, "output root (default: out)");
  bool render_svg = false;
  sweep->add_flag("--render-svg", render_svg, "also render simple svg charts");

  auto* validate = app.add_subcommand("validate", "check a scenario file");
  validate->add_option("--scenario", scenario_path, "scenario file")->required();

  auto* synth = app.add_subcommand("gcl-synth", "synthesize a no-wait schedule");
  synth->add_option("--scenario", scenario_path, "scenario file")->required();
  synth->add_option("--out", gcl_out, "output gcl file")->required();
  synth->add_option("--sweep-value", sweep_value_raw, "sweep point to resolve")
      ->each([&](const std::string&) { have_sweep_value = true; });

  CLI11_PARSE(app, argc, argv);

  const std::optional<double> sweep_value =
      have_sweep_value ? std::optional<double>(sweep_value_raw) : std::nullopt;
  const std::optional<std::int64_t> duration =
      duration_raw >= 0 ? std::optional<std::int64_t>(duration_raw) : std::nullopt;

  try {
    if (run->parsed()) {
      return cmd_run(scenario_path, mode, seed, sweep_value, duration, out_dir);
    }
    if (sweep->parsed()) {
      return cmd_sweep(scenario_path, modes_csv, seeds_csv, jobs, duration, out_dir,
                       render_svg);
    }
    if (validate->parsed()) {
      return cmd_validate(scenario_path);
    }
    if (synth->parsed()) {
      return cmd_gcl_synth(scenario_path, gcl_out, sweep_value);
    }
  } catch (const tsnsim::ScenarioError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
