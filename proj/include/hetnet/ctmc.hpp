#pragma once

#include <utility>
#include <vector>

namespace hetnet {

// Birth-death chain over states 0..M where M = birth.size() = death.size().
// birth[i] is the rate out of state i upward; death[i] the rate from state
// i+1 downward.
struct BirthDeathChain {
    std::vector<double> birth;
    std::vector<double> death;
};

// Steady-state distribution by detailed-balance product form. For chains with
// at most 100 states the result is cross-checked against a dense global
// balance solve; disagreement throws.
std::vector<double> steady_state(const BirthDeathChain& chain);

// Dense global-balance solve, exposed for equivalence tests.
std::vector<double> steady_state_linear(const BirthDeathChain& chain);

// Guard-channel chain: new + handover traffic below N, handover-only traffic
// from N to N+S, state-dependent service i*mu_m.
// Returns (p_block, p_drop).
std::pair<double, double> guard_channel_oracle(double lambda_o, double lambda_h,
                                               double mu_m, int N, int S);

} // namespace hetnet
