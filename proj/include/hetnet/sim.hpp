#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hetnet/analytic.hpp"
#include "hetnet/scenario.hpp"

namespace hetnet {

enum class SimMode {
    chain_validation, // isolated tiers fed by fixed-point rates, unit-slot calls
    closed_loop       // full CAC with bandwidth accounting and routed mobility
};

struct SimOptions {
    SimMode mode = SimMode::chain_validation;
    std::uint64_t seed = 1;
    std::uint64_t horizon_events = 1'000'000;
    std::optional<std::uint64_t> warmup_events; // default: 20% of horizon
    bool macro_tier_enabled = true; // false models femtocells with no overlay
    bool check_invariants = true;   // per-event state audits
};

struct StreamCounters {
    std::uint64_t arrivals = 0;
    std::uint64_t admits = 0;
    std::uint64_t blocks = 0;
    std::uint64_t drops = 0;
    std::uint64_t stays = 0; // mf handovers that kept the call on the macrocell
};

struct Estimate {
    double value = 0.0;
    double half_width = 0.0; // 95% normal half-width, aggregates only
    bool present = false;    // false when the underlying count is zero
};

struct SimMetrics {
    SimMode mode = SimMode::chain_validation;
    std::uint64_t scenario_digest = 0;
    std::uint64_t seed = 0;
    std::uint64_t horizon_events = 0;
    std::uint64_t warmup_events = 0;
    std::uint64_t events = 0;       // events processed after warmup
    double measured_time = 0.0;     // simulated seconds after warmup
    int replications = 1;
    std::uint64_t invariant_violations = 0;

    StreamCounters new_femto, new_macro, ho_mm, ho_mf, ho_ff, ho_fm;

    Estimate p_B_f, p_D_f, p_B_m, p_D_m;
    Estimate ft_femto, ft_macro;      // forced-termination fraction by first serving tier
    Estimate ft_overall;              // forced-termination fraction over all admitted calls
    Estimate rate_h_mm, rate_h_mf, rate_h_ff, rate_h_fm; // attempts per second
    Estimate femto_user_drop;         // drops per handover attempt of femto-served calls
};

// One deterministic replication. In chain_validation mode the driving rates
// come from `supplied`; when null, solve_fixed_point(cfg) provides them.
SimMetrics run_replication(const ScenarioConfig& cfg, const SimOptions& opt,
                           const FixedPointSolution* supplied = nullptr);

// Mean and 95% confidence half-width per estimate across >= 2 replications of
// the same scenario, mode and horizon; counters are summed.
SimMetrics aggregate(const std::vector<SimMetrics>& replications);

} // namespace hetnet
