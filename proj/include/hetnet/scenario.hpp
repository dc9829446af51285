#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hetnet {

// Arrival mix between fixed-bandwidth and bandwidth-adaptive calls,
// expressed as a ratio of non-negative integers (e.g. 1:1); at least one
// component must be positive.
struct MixRatio {
    int nonadaptive = 1;
    int adaptive = 1;
};

// Every model input. Rates are per second, radii in meters, bandwidths in kbps.
struct ScenarioConfig {
    int n = 0;                  // deployed femtocells inside the macrocell
    double r_f = 10.0;          // femtocell radius
    double r_m = 400.0;         // macrocell radius
    double mu = 1.0 / 120.0;    // call completion rate (1 / mean call duration)
    double eta_m = 1.0 / 240.0; // macrocell boundary-crossing rate
    double eta_f = 1.0 / 360.0; // femtocell boundary-crossing rate
    double lambda_o_m = 0.0;    // new-call rate in macrocell-only coverage
    double lambda_o_f = 0.0;    // new-call rate over all femtocell coverage
    int K = 0;                  // femtocell capacity in calls; must be set explicitly
    double C = 6000.0;          // macrocell bandwidth capacity
    double bw_nonadaptive = 64.0;
    double bw_adaptive_max = 56.0;
    double bw_adaptive_min = 28.0;
    MixRatio mix_ratio{};
    std::optional<int> N_override; // explicit chain size N
    std::optional<int> S_override; // explicit handover-only states S
};

struct Violation {
    std::string field;
    std::string message;
};

// Empty report = valid config. Violations are data, not exceptions.
using ValidationReport = std::vector<Violation>;

struct DerivedCapacities {
    double q;    // coverage ratio (r_f / r_m)^2
    int N;       // macrocell call states without QoS adaptation
    int S;       // additional handover-only states
    double mu_m; // macrocell channel release rate
    double mu_f; // femtocell channel release rate
};

double coverage_ratio(const ScenarioConfig& cfg);

ValidationReport validate(const ScenarioConfig& cfg);

// Throws std::invalid_argument if validate(cfg) is non-empty.
DerivedCapacities derive_capacities(const ScenarioConfig& cfg);

// Apportions a total offered rate between femto and macro coverage by area
// share weighted by the femto:macro arrival-density ratio d.
// Returns (lambda_o_f, lambda_o_m); the two always sum to lambda_total.
std::pair<double, double> split_arrivals(double lambda_total, double density_ratio,
                                         int n, double q);

// Stable content hash of every config field (FNV-1a over a canonical text
// rendering). Used to tie simulation outputs and manifests to their inputs.
std::uint64_t scenario_digest(const ScenarioConfig& cfg);

} // namespace hetnet
