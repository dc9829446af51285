#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "hetnet/scenario.hpp"

namespace hetnet {

// Per-sojourn routing probabilities for the four handover kinds.
// Load-independent; functions of geometry and dwell/completion rates only.
struct HandoverProbabilities {
    double p_mm = 0.0; // macro -> macro
    double p_mf = 0.0; // macro -> femto
    double p_ff = 0.0; // femto -> femto
    double p_fm = 0.0; // femto -> macro
};

// Steady state of the macrocell guard chain.
struct MacroChainDistribution {
    std::vector<double> probs; // state i -> P(i), length N+S+1
    double p_block = 0.0;      // new-call blocking, sum over states N..N+S
    double p_drop = 0.0;       // handover dropping, P(N+S)
};

struct Flows {
    double mm = 0.0;
    double mf = 0.0;
    double ff = 0.0;
    double fm = 0.0;
};

struct FixedPointSolution {
    double lambda_h_mm = 0.0;
    double lambda_h_mf = 0.0;
    double lambda_h_ff = 0.0;
    double lambda_h_fm = 0.0;
    double lambda_h_m = 0.0;  // total handover stream into the macro chain
    double lambda_T_f = 0.0;  // total femto-tier arrival rate
    double lambda_o_m_eff = 0.0; // macro new-call stream incl. femto-blocked overflow
    double p_B_f = 0.0;
    double p_D_f = 0.0;
    double p_B_m = 0.0;
    double p_D_m = 0.0;
    int iterations = 0;
    double residual = 0.0;
};

struct FixedPointOptions {
    double omega = 0.5;    // damping weight on the fresh iterate
    double tol = 1e-10;    // max relative change across flows and probabilities
    int max_iter = 10000;
    double initial_flow = 0.0; // starting value for every handover flow
};

class NonConvergence : public std::runtime_error {
public:
    NonConvergence(FixedPointSolution last_iterate, std::string what_arg)
        : std::runtime_error(std::move(what_arg)), last(last_iterate) {}
    FixedPointSolution last;
};

// Eq.-level evaluation of the four handover probabilities. Requires n*q <= 1.
// At n = 0 the femto-side formulas are kept verbatim so the algebraic
// identity p_ff + p_fm = (1-q)*eta_f/(eta_f+mu) holds for every n.
HandoverProbabilities handover_probabilities(const ScenarioConfig& cfg,
                                             const DerivedCapacities& derived);

// Erlang-B via the stable recurrence B_k = a*B_{k-1} / (k + a*B_{k-1}).
double erlang_b(double offered, int servers);

// Per-femtocell blocking of an n-FAP tier carrying lambda_T_f in aggregate.
double femto_blocking(double lambda_T_f, int n, int K, double mu_f);

// Guard chain over N+S+1 states, ratio-recurrence evaluation (no factorials).
MacroChainDistribution macro_chain(double lambda_o_m_eff, double lambda_h_m,
                                   double mu_m, int N, int S);

// One pass of the flow equations. The macro-side equations consume the
// previous iterate's femto flows; the femto-side equations consume the
// freshly computed macro-to-femto flow.
Flows handover_flows(const ScenarioConfig& cfg, const HandoverProbabilities& hp,
                     const Flows& prev, double p_B_f, double p_D_f,
                     double p_B_m, double p_D_m);

// Damped successive substitution over flows and probabilities.
// Throws NonConvergence (carrying the last iterate) past max_iter.
FixedPointSolution solve_fixed_point(const ScenarioConfig& cfg,
                                     const FixedPointOptions& opt = {});

// Probability that a call currently served by a femtocell (first) or
// macrocell (second) is eventually dropped at some handover. Failed
// femto->femto handovers retry the macrocell; failed macro->femto handovers
// keep the call on the macrocell.
std::pair<double, double> forced_termination(const HandoverProbabilities& hp,
                                             double p_D_f, double p_D_m);

} // namespace hetnet
