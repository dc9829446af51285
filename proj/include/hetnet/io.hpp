#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hetnet/analytic.hpp"
#include "hetnet/scenario.hpp"
#include "hetnet/sim.hpp"

namespace hetnet::io {

inline constexpr const char* kToolVersion = "hetnet 1.0.0";

// Thrown on malformed scenario files, unknown keys, bad sweep specs.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Scenario JSON mirrors ScenarioConfig field names 1:1; unknown keys are
// rejected. mix_ratio is a two-element array [nonadaptive, adaptive].
ScenarioConfig scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const ScenarioConfig& cfg);

// Built-in presets "table1" and "desk".
ScenarioConfig preset(const std::string& name);

// Resolves a preset name or reads a scenario file from disk.
ScenarioConfig load_scenario(const std::string& path_or_preset);

struct SweepSpec {
    int start = 0;
    int stop = 0;
    int step = 1;
    std::vector<int> points() const;
};

// Parses "n=start:stop:step".
SweepSpec parse_sweep(const std::string& spec);

// Reproducibility record embedded in every output. Deliberately free of
// wall-clock data so identical inputs give identical bytes.
nlohmann::json make_manifest(const std::string& command, const ScenarioConfig& cfg,
                             const std::vector<std::uint64_t>& seeds,
                             const std::string& mode, double tol);

nlohmann::json solution_to_json(const FixedPointSolution& sol,
                                const HandoverProbabilities& hp,
                                double forced_term_f, double forced_term_m);

nlohmann::json metrics_to_json(const SimMetrics& m);

// Fixed sweep CSV header (17 columns), exposed so tests can pin it.
extern const char* kSweepCsvHeader;

std::string sweep_csv_row(int n, const HandoverProbabilities& hp,
                          const FixedPointSolution& sol, double d_f, double d_m);

} // namespace hetnet::io
