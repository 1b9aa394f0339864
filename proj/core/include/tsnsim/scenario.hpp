#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsnsim/simulation.hpp"
#include "tsnsim/tas_synth.hpp"

namespace tsnsim {

/// Configuration problem (schema violation, inconsistent parameters).
/// The CLI maps this to exit code 2; runtime failures map to 3.
class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

/// One fully-resolved simulation point: every expression evaluated, ports
/// configured for the mode, gate schedules attached. The resolved dump plus
/// the seed determines every output byte.
struct ResolvedRun {
  std::string scenario;
  std::string mode;
  std::string sweep_variable;  // empty when the scenario has no sweep
  std::optional<double> sweep_value;
  std::uint64_t seed = 1;
  int be_priority = 0;
  SimConfig sim;
  std::optional<SynthResult> tas;
  std::string resolved_json;  // canonical dump; scenario_hash = fnv1a(dump)
  std::vector<std::string> warnings;
};

/// A declarative experiment description. Numeric fields may be expressions
/// over the sweep variable (and F, the per-port flow count, for per-queue
/// parameters); they are evaluated when a run is resolved.
class Scenario {
 public:
  static Scenario load(const std::string& path);
  static Scenario parse(const std::string& json_text,
                        const std::string& name_hint);

  const std::string& name() const;
  SimTime duration() const;
  std::vector<std::uint64_t> seeds() const;
  std::vector<std::string> modes() const;
  std::string sweep_variable() const;       // empty if no sweep
  std::vector<double> sweep_values() const;  // empty if no sweep
  std::optional<std::size_t> moving_average_window() const;

  ResolvedRun resolve(const std::string& mode,
                      std::optional<double> sweep_value, std::uint64_t seed,
                      std::optional<SimTime> duration_override = {}) const;

 private:
  static Scenario make(const std::string& text, const std::string& name_hint,
                       const std::string& dir);

  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

/// Serialized form of a synthesized schedule ("gcl-synth" output, also
/// loadable through the scenario's tas mode section).
std::string gcl_file_text(const SynthResult& synth, const Topology& topo,
                          const std::vector<FlowSpec>& flows);

}  // namespace tsnsim
