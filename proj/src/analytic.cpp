#include "hetnet/analytic.hpp"

#include <algorithm>
#include <cmath>

namespace hetnet {

HandoverProbabilities handover_probabilities(const ScenarioConfig& cfg,
                                             const DerivedCapacities& derived) {
    const double q = derived.q;
    const double nq = cfg.n * q;
    if (nq > 1.0) throw std::invalid_argument("handover_probabilities: n*q > 1");

    const double femto_move = cfg.eta_f / (cfg.eta_f + cfg.mu);
    const double sqrt_n = std::sqrt(static_cast<double>(cfg.n));

    HandoverProbabilities hp;
    hp.p_mm = cfg.eta_m / (cfg.eta_m + cfg.mu);
    hp.p_fm = (1.0 - nq) * femto_move;
    hp.p_ff = (cfg.n - 1) * q * femto_move;
    hp.p_mf = cfg.n > 0
                  ? nq * (cfg.eta_m * sqrt_n) / (cfg.eta_m * sqrt_n + cfg.mu)
                  : 0.0;
    return hp;
}

double erlang_b(double offered, int servers) {
    if (offered < 0.0) throw std::invalid_argument("erlang_b: negative load");
    if (servers < 1) throw std::invalid_argument("erlang_b: servers must be >= 1");
    double b = 1.0;
    for (int k = 1; k <= servers; ++k)
        b = offered * b / (k + offered * b);
    return b;
}

double femto_blocking(double lambda_T_f, int n, int K, double mu_f) {
    if (n < 1) throw std::invalid_argument("femto_blocking: needs n >= 1");
    if (!(mu_f > 0.0)) throw std::invalid_argument("femto_blocking: mu_f must be > 0");
    if (lambda_T_f < 0.0) throw std::invalid_argument("femto_blocking: negative rate");
    const double per_cell_load = lambda_T_f / (n * mu_f);
    return erlang_b(per_cell_load, K);
}

MacroChainDistribution macro_chain(double lambda_o_m_eff, double lambda_h_m,
                                   double mu_m, int N, int S) {
    if (N < 1 || S < 0) throw std::invalid_argument("macro_chain: N >= 1, S >= 0 required");
    if (!(mu_m > 0.0)) throw std::invalid_argument("macro_chain: mu_m must be > 0");
    if (lambda_o_m_eff < 0.0 || lambda_h_m < 0.0)
        throw std::invalid_argument("macro_chain: negative arrival rate");

    const int states = N + S + 1;
    MacroChainDistribution dist;
    dist.probs.assign(static_cast<std::size_t>(states), 0.0);

    // Unnormalized weights via term ratios; rescale before anything overflows.
    dist.probs[0] = 1.0;
    double sum = 1.0;
    for (int i = 1; i < states; ++i) {
        const double arrival = i <= N ? lambda_o_m_eff + lambda_h_m : lambda_h_m;
        const auto idx = static_cast<std::size_t>(i);
        dist.probs[idx] = dist.probs[idx - 1] * arrival / (i * mu_m);
        sum += dist.probs[idx];
        if (sum > 1e250) {
            for (int k = 0; k <= i; ++k) dist.probs[static_cast<std::size_t>(k)] /= sum;
            sum = 1.0;
        }
    }
    sum = 0.0;
    for (double p : dist.probs) sum += p;
    for (double& p : dist.probs) p /= sum;

    for (int i = N; i <= N + S; ++i) dist.p_block += dist.probs[static_cast<std::size_t>(i)];
    dist.p_drop = dist.probs.back();
    return dist;
}

Flows handover_flows(const ScenarioConfig& cfg, const HandoverProbabilities& hp,
                     const Flows& prev, double p_B_f, double p_D_f,
                     double p_B_m, double p_D_m) {
    const double macro_denom = 1.0 - hp.p_mm * (1.0 - p_D_m);
    if (!(macro_denom > 0.0))
        throw std::runtime_error("handover_flows: divergent macro flow (p_mm = 1, p_D_m = 0)");

    const double macro_numer = (1.0 - p_B_m) * (cfg.lambda_o_m + cfg.lambda_o_f * p_B_f) +
                               (1.0 - p_D_m) * (prev.fm + prev.ff * p_D_f);
    Flows flows;
    flows.mm = hp.p_mm * macro_numer / macro_denom;
    flows.mf = hp.p_mf * macro_numer / macro_denom;

    const double femto_denom = 1.0 - hp.p_ff * (1.0 - p_D_f);
    if (!(femto_denom > 0.0))
        throw std::runtime_error("handover_flows: divergent femto flow (p_ff = 1, p_D_f = 0)");
    const double femto_numer =
        cfg.lambda_o_f * (1.0 - p_B_f) + flows.mf * (1.0 - p_D_f);
    flows.ff = hp.p_ff * femto_numer / femto_denom;
    flows.fm = hp.p_fm * femto_numer / femto_denom;

    flows.mm = std::max(flows.mm, 0.0);
    flows.mf = std::max(flows.mf, 0.0);
    flows.ff = std::max(flows.ff, 0.0);
    flows.fm = std::max(flows.fm, 0.0);
    return flows;
}

namespace {

double relative_change(double fresh, double old) {
    const double scale = std::max(std::fabs(fresh), std::fabs(old));
    if (scale < 1e-300) return 0.0;
    return std::fabs(fresh - old) / scale;
}

} // namespace

FixedPointSolution solve_fixed_point(const ScenarioConfig& cfg,
                                     const FixedPointOptions& opt) {
    const auto derived = derive_capacities(cfg);
    const auto hp = handover_probabilities(cfg, derived);

    Flows flows{opt.initial_flow, opt.initial_flow, opt.initial_flow, opt.initial_flow};
    double p_B_f = 0.0, p_D_f = 0.0, p_B_m = 0.0, p_D_m = 0.0;

    FixedPointSolution sol;
    for (int iter = 1; iter <= opt.max_iter; ++iter) {
        const Flows fresh = handover_flows(cfg, hp, flows, p_B_f, p_D_f, p_B_m, p_D_m);

        Flows damped;
        damped.mm = (1.0 - opt.omega) * flows.mm + opt.omega * fresh.mm;
        damped.mf = (1.0 - opt.omega) * flows.mf + opt.omega * fresh.mf;
        damped.ff = (1.0 - opt.omega) * flows.ff + opt.omega * fresh.ff;
        damped.fm = (1.0 - opt.omega) * flows.fm + opt.omega * fresh.fm;

        const double lambda_T_f = cfg.lambda_o_f + damped.mf + damped.ff;
        const double fresh_p_f =
            cfg.n > 0 ? femto_blocking(lambda_T_f, cfg.n, cfg.K, derived.mu_f) : 0.0;
        const double next_p_B_f = (1.0 - opt.omega) * p_B_f + opt.omega * fresh_p_f;
        const double next_p_D_f = next_p_B_f;

        const double lambda_h_m = damped.mm + damped.fm + next_p_D_f * damped.ff;
        // Femto-blocked new calls overflow to the macrocell new-call stream.
        const double lambda_o_m_eff = cfg.lambda_o_m + next_p_B_f * cfg.lambda_o_f;
        const auto chain = macro_chain(lambda_o_m_eff, lambda_h_m, derived.mu_m,
                                       derived.N, derived.S);
        const double next_p_B_m = (1.0 - opt.omega) * p_B_m + opt.omega * chain.p_block;
        const double next_p_D_m = (1.0 - opt.omega) * p_D_m + opt.omega * chain.p_drop;

        double residual = 0.0;
        residual = std::max(residual, relative_change(damped.mm, flows.mm));
        residual = std::max(residual, relative_change(damped.mf, flows.mf));
        residual = std::max(residual, relative_change(damped.ff, flows.ff));
        residual = std::max(residual, relative_change(damped.fm, flows.fm));
        residual = std::max(residual, relative_change(next_p_B_f, p_B_f));
        residual = std::max(residual, relative_change(next_p_B_m, p_B_m));
        residual = std::max(residual, relative_change(next_p_D_m, p_D_m));

        flows = damped;
        p_B_f = next_p_B_f;
        p_D_f = next_p_D_f;
        p_B_m = next_p_B_m;
        p_D_m = next_p_D_m;

        sol.lambda_h_mm = flows.mm;
        sol.lambda_h_mf = flows.mf;
        sol.lambda_h_ff = flows.ff;
        sol.lambda_h_fm = flows.fm;
        sol.lambda_h_m = lambda_h_m;
        sol.lambda_T_f = lambda_T_f;
        sol.lambda_o_m_eff = lambda_o_m_eff;
        sol.p_B_f = p_B_f;
        sol.p_D_f = p_D_f;
        sol.p_B_m = p_B_m;
        sol.p_D_m = p_D_m;
        sol.iterations = iter;
        sol.residual = residual;

        if (residual < opt.tol) return sol;
    }
    throw NonConvergence(sol, "fixed point not converged after " +
                                  std::to_string(opt.max_iter) + " iterations");
}

std::pair<double, double> forced_termination(const HandoverProbabilities& hp,
                                             double p_D_f, double p_D_m) {
    for (double p : {p_D_f, p_D_m})
        if (p < 0.0 || p > 1.0) throw std::invalid_argument("forced_termination: probability out of range");

    // Linear system in (D_f, D_m): each sojourn either completes, hands over
    // successfully, drops, or (for mf failures) stays on the macrocell.
    const double a11 = 1.0 - hp.p_ff * (1.0 - p_D_f);
    const double a12 = -(hp.p_ff * p_D_f * (1.0 - p_D_m) + hp.p_fm * (1.0 - p_D_m));
    const double b1 = hp.p_ff * p_D_f * p_D_m + hp.p_fm * p_D_m;

    const double a21 = -hp.p_mf * (1.0 - p_D_f);
    const double a22 = 1.0 - hp.p_mm * (1.0 - p_D_m) - hp.p_mf * p_D_f;
    const double b2 = hp.p_mm * p_D_m;

    const double det = a11 * a22 - a12 * a21;
    if (std::fabs(det) < 1e-300)
        throw std::runtime_error("forced_termination: singular system");

    double d_f = (b1 * a22 - a12 * b2) / det;
    double d_m = (a11 * b2 - a21 * b1) / det;
    d_f = std::clamp(d_f, 0.0, 1.0);
    d_m = std::clamp(d_m, 0.0, 1.0);
    return {d_f, d_m};
}

} // namespace hetnet
