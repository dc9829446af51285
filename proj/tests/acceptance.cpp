// Acceptance suite: one pass/fail line per criterion, exit code = #failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <random>
#include <string>
#include <vector>

#include "hetnet/analytic.hpp"
#include "hetnet/ctmc.hpp"
#include "hetnet/io.hpp"
#include "hetnet/scenario.hpp"
#include "hetnet/sim.hpp"

using namespace hetnet;

namespace {

struct Harness {
    int failures = 0;
    void criterion(int num, const std::string& name, bool pass, const std::string& detail) {
        std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", num,
                    name.c_str(), detail.c_str());
        if (!pass) ++failures;
    }
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

std::vector<SimMetrics> run_replications(const ScenarioConfig& cfg, SimOptions opt,
                                         int count, const FixedPointSolution* supplied) {
    std::vector<std::future<SimMetrics>> futures;
    for (int i = 0; i < count; ++i) {
        opt.seed = static_cast<std::uint64_t>(i + 1);
        futures.push_back(std::async(std::launch::async, [cfg, opt, supplied] {
            return run_replication(cfg, opt, supplied);
        }));
    }
    std::vector<SimMetrics> reps;
    for (auto& f : futures) reps.push_back(f.get());
    return reps;
}

// |sim - analytic| within 3 standard errors AND within rel_tol relative.
bool close_enough(const Estimate& sim, double analytic, double rel_tol, double& worst_rel) {
    if (!sim.present) return false;
    const double se = sim.half_width / 1.96;
    const double delta = std::fabs(sim.value - analytic);
    const double rel = analytic > 0.0 ? delta / analytic : delta;
    worst_rel = std::max(worst_rel, rel);
    return delta <= 3.0 * se + 1e-15 && rel <= rel_tol;
}

double total_violations(const std::vector<SimMetrics>& reps) {
    double v = 0.0;
    for (const auto& r : reps) v += static_cast<double>(r.invariant_violations);
    return v;
}

} // namespace

int main() {
    using clock = std::chrono::steady_clock;
    Harness h;
    std::uint64_t all_violations = 0;

    // ---- 1: closed form vs birth-death oracle -----------------------------
    {
        const auto start = clock::now();
        std::mt19937_64 rng(101);
        std::uniform_real_distribution<double> unif(0.05, 8.0);
        double worst = 0.0;
        for (int i = 0; i < 200; ++i) {
            const int n_states = 1 + static_cast<int>(rng() % 25);
            const int s_states = static_cast<int>(rng() % (31 - n_states));
            const double lo = unif(rng), lh = unif(rng), mu = unif(rng);
            const auto dist = macro_chain(lo, lh, mu, n_states, s_states);
            const auto [pb, pd] = guard_channel_oracle(lo, lh, mu, n_states, s_states);
            worst = std::max({worst, std::fabs(dist.p_block - pb), std::fabs(dist.p_drop - pd)});
        }
        const double secs = std::chrono::duration<double>(clock::now() - start).count();
        h.criterion(1, "macro chain matches CTMC oracle", worst < 1e-10 && secs < 5.0,
                    fmt("max |delta| = %.2e, %.2f s", worst, secs));
    }

    // ---- 2: Erlang consistency --------------------------------------------
    {
        const auto start = clock::now();
        std::mt19937_64 rng(202);
        std::uniform_real_distribution<double> unif(0.01, 15.0);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const int k = 1 + static_cast<int>(rng() % 20);
            const double load = unif(rng);
            // recurrence route
            const double rec = femto_blocking(load, 1, k, 1.0);
            // guard chain with S = 0 route
            const double chain = macro_chain(load, 0.0, 1.0, k, 0).p_block;
            // direct factorial route
            double term = 1.0, denom = 1.0;
            for (int j = 1; j <= k; ++j) {
                term *= load / j;
                denom += term;
            }
            const double direct = term / denom;
            worst = std::max({worst, std::fabs(rec - chain), std::fabs(rec - direct)});
        }
        const double secs = std::chrono::duration<double>(clock::now() - start).count();
        h.criterion(2, "femto blocking equals Erlang-B routes", worst < 1e-12 && secs < 1.0,
                    fmt("max |delta| = %.2e, %.2f s", worst, secs));
    }

    // ---- 3: hand-checked anchors ------------------------------------------
    {
        const auto cfg = io::preset("table1");
        const auto derived = derive_capacities(cfg);
        const auto hp = handover_probabilities(cfg, derived);
        const auto dist = macro_chain(1.0, 1.0, 1.0, 1, 1);
        double worst = std::fabs(hp.p_mm - 1.0 / 3.0);
        worst = std::max(worst, std::fabs(derived.mu_f - 1.0 / 90.0));
        worst = std::max(worst,
                         std::fabs(derived.mu_m - ((std::sqrt(1000.0) + 1.0) / 240.0 + 1.0 / 120.0)));
        worst = std::max(worst, std::fabs(dist.p_block - 0.75));
        worst = std::max(worst, std::fabs(dist.p_drop - 0.25));
        h.criterion(3, "hand-checked anchor values", worst < 1e-9,
                    fmt("max |delta| = %.2e", worst));
    }

    // ---- 4: handover probability shape over n -----------------------------
    {
        const auto start = clock::now();
        auto cfg = io::preset("table1");
        bool monotone = true;
        double worst_identity = 0.0;
        double prev_ff = -1e9, prev_mf = -1e9, prev_fm = 1e9;
        for (int n = 0; n <= 1000; n += 25) {
            cfg.n = n;
            if (n == 0) cfg.lambda_o_f = 0.0;
            const auto derived = derive_capacities(cfg);
            const auto hp = handover_probabilities(cfg, derived);
            monotone = monotone && hp.p_ff > prev_ff && hp.p_mf > prev_mf && hp.p_fm < prev_fm;
            prev_ff = hp.p_ff;
            prev_mf = hp.p_mf;
            prev_fm = hp.p_fm;
            const double identity = (1.0 - derived.q) * cfg.eta_f / (cfg.eta_f + cfg.mu);
            worst_identity = std::max(worst_identity, std::fabs(hp.p_ff + hp.p_fm - identity));
        }
        const double secs = std::chrono::duration<double>(clock::now() - start).count();
        h.criterion(4, "handover probability growth and identity",
                    monotone && worst_identity < 1e-12 && secs < 1.0,
                    fmt("identity |delta| = %.2e, %.2f s", worst_identity, secs));
    }

    // ---- 5: fixed-point health --------------------------------------------
    {
        bool ok = true;
        double worst = 0.0;
        for (const char* name : {"table1", "desk"}) {
            const auto cfg = io::preset(name);
            const auto a = solve_fixed_point(cfg);
            ok = ok && a.residual < 1e-10 && a.iterations <= 10000;
            FixedPointOptions opt;
            opt.initial_flow = 100.0; // distant start
            const auto b = solve_fixed_point(cfg, opt);
            auto rel = [](double x, double y) {
                const double scale = std::max({std::fabs(x), std::fabs(y), 1e-12});
                return std::fabs(x - y) / scale;
            };
            worst = std::max({worst, rel(a.lambda_h_mm, b.lambda_h_mm),
                              rel(a.lambda_h_mf, b.lambda_h_mf), rel(a.lambda_h_ff, b.lambda_h_ff),
                              rel(a.lambda_h_fm, b.lambda_h_fm), rel(a.p_B_f, b.p_B_f),
                              rel(a.p_B_m, b.p_B_m), rel(a.p_D_m, b.p_D_m)});
        }
        h.criterion(5, "fixed point converges and is start-insensitive",
                    ok && worst < 1e-8, fmt("restart max rel delta = %.2e", worst));
    }

    // ---- 6: simulation vs analysis, chain validation mode ------------------
    const auto desk = io::preset("desk");
    const auto desk_solution = solve_fixed_point(desk);
    {
        const auto start = clock::now();
        SimOptions opt;
        opt.mode = SimMode::chain_validation;
        opt.horizon_events = 1'000'000;
        const auto reps = run_replications(desk, opt, 10, &desk_solution);
        const auto agg = aggregate(reps);
        all_violations += agg.invariant_violations;
        double worst_rel = 0.0;
        bool ok = close_enough(agg.p_B_m, desk_solution.p_B_m, 0.05, worst_rel);
        ok = close_enough(agg.p_D_m, desk_solution.p_D_m, 0.05, worst_rel) && ok;
        ok = close_enough(agg.p_B_f, desk_solution.p_B_f, 0.05, worst_rel) && ok;
        ok = close_enough(agg.p_D_f, desk_solution.p_D_f, 0.05, worst_rel) && ok;
        const double secs = std::chrono::duration<double>(clock::now() - start).count();
        h.criterion(6, "chain-mode simulation matches closed form",
                    ok && secs < 60.0, fmt("worst rel = %.3f%%, %.1f s", 100 * worst_rel, secs));
    }

    // ---- 7: simulation vs analysis, closed loop ----------------------------
    {
        const auto start = clock::now();
        SimOptions opt;
        opt.mode = SimMode::closed_loop;
        opt.horizon_events = 5'000'000;
        const auto reps = run_replications(desk, opt, 10, nullptr);
        const auto agg = aggregate(reps);
        all_violations += agg.invariant_violations;

        double worst_rel = 0.0;
        auto rate_ok = [&](const Estimate& est, double analytic) {
            if (!est.present || analytic <= 0.0) return false;
            const double rel = std::fabs(est.value - analytic) / analytic;
            worst_rel = std::max(worst_rel, rel);
            return rel <= 0.05;
        };
        bool ok = rate_ok(agg.rate_h_mm, desk_solution.lambda_h_mm);
        ok = rate_ok(agg.rate_h_mf, desk_solution.lambda_h_mf) && ok;
        ok = rate_ok(agg.rate_h_ff, desk_solution.lambda_h_ff) && ok;
        ok = rate_ok(agg.rate_h_fm, desk_solution.lambda_h_fm) && ok;

        const auto hp = handover_probabilities(desk, derive_capacities(desk));
        const auto [d_f, d_m] =
            forced_termination(hp, desk_solution.p_D_f, desk_solution.p_D_m);
        auto within_3se = [](const Estimate& est, double analytic) {
            return est.present &&
                   std::fabs(est.value - analytic) <= 3.0 * est.half_width / 1.96 + 1e-15;
        };
        ok = within_3se(agg.ft_femto, d_f) && ok;
        ok = within_3se(agg.ft_macro, d_m) && ok;
        const double secs = std::chrono::duration<double>(clock::now() - start).count();
        h.criterion(7, "closed-loop flows and forced termination match",
                    ok && secs < 120.0,
                    fmt("worst rate rel = %.3f%%, %.1f s", 100 * worst_rel, secs));
    }

    // ---- 8: integration benefits (qualitative figure claims) ---------------
    {
        // n = 0 comparison point at the same total offered load.
        auto single = desk;
        single.n = 0;
        single.lambda_o_m = desk.lambda_o_m + desk.lambda_o_f;
        single.lambda_o_f = 0.0;
        const auto sol0 = solve_fixed_point(single);
        const auto hp0 = handover_probabilities(single, derive_capacities(single));
        const auto [d_f0, d_m0] = forced_termination(hp0, sol0.p_D_f, sol0.p_D_m);

        const auto hp = handover_probabilities(desk, derive_capacities(desk));
        const auto [d_f, d_m] =
            forced_termination(hp, desk_solution.p_D_f, desk_solution.p_D_m);
        // Overall forced termination weighted over admitted new calls.
        const auto& s = desk_solution;
        const double femto_admits = desk.lambda_o_f * (1.0 - s.p_B_f);
        const double macro_admits = s.lambda_o_m_eff * (1.0 - s.p_B_m);
        const double ft_desk =
            (femto_admits * d_f + macro_admits * d_m) / (femto_admits + macro_admits);
        const bool analytic_ft_ok = ft_desk < d_m0;

        // Femto-user per-attempt drop probability, with vs without the
        // macrocell overlay.
        const double with_macro =
            (hp.p_ff * s.p_D_f * s.p_D_m + hp.p_fm * s.p_D_m) / (hp.p_ff + hp.p_fm);
        // No overlay: femto-only fixed point, fm handovers always drop.
        const auto derived = derive_capacities(desk);
        double lambda_ff = 0.0, p_f = 0.0;
        for (int i = 0; i < 500; ++i) {
            lambda_ff = hp.p_ff * desk.lambda_o_f * (1.0 - p_f) /
                        (1.0 - hp.p_ff * (1.0 - p_f));
            p_f = femto_blocking(desk.lambda_o_f + lambda_ff, desk.n, desk.K, derived.mu_f);
        }
        const double without_macro =
            (hp.p_ff * p_f + hp.p_fm * 1.0) / (hp.p_ff + hp.p_fm);
        const bool analytic_drop_ok = with_macro < without_macro;

        // Simulated counterparts.
        SimOptions opt;
        opt.mode = SimMode::closed_loop;
        opt.horizon_events = 1'000'000;
        const auto reps_desk = run_replications(desk, opt, 4, nullptr);
        const auto reps_single = run_replications(single, opt, 4, nullptr);
        SimOptions isolated = opt;
        isolated.macro_tier_enabled = false;
        const auto reps_isolated = run_replications(desk, isolated, 4, nullptr);
        const auto agg_desk = aggregate(reps_desk);
        const auto agg_single = aggregate(reps_single);
        const auto agg_isolated = aggregate(reps_isolated);
        all_violations += agg_desk.invariant_violations +
                          agg_single.invariant_violations +
                          agg_isolated.invariant_violations;
        const bool sim_ft_ok = agg_desk.ft_overall.present && agg_single.ft_overall.present &&
                               agg_desk.ft_overall.value < agg_single.ft_overall.value;
        const bool sim_drop_ok = agg_desk.femto_user_drop.present &&
                                 agg_isolated.femto_user_drop.present &&
                                 agg_desk.femto_user_drop.value <
                                     agg_isolated.femto_user_drop.value;

        h.criterion(8, "integration lowers termination and femto drops",
                    analytic_ft_ok && analytic_drop_ok && sim_ft_ok && sim_drop_ok,
                    fmt("FT %.4f < %.4f", ft_desk, d_m0) +
                        fmt(", sim drop %.4f < %.4f", agg_desk.femto_user_drop.value,
                            agg_isolated.femto_user_drop.value));
    }

    // ---- 9: engineering invariants and determinism --------------------------
    {
        SimOptions opt;
        opt.mode = SimMode::closed_loop;
        opt.seed = 4242;
        opt.horizon_events = 200'000;
        const auto a = run_replication(desk, opt);
        const auto b = run_replication(desk, opt);
        const bool deterministic =
            a.measured_time == b.measured_time && a.events == b.events &&
            a.new_femto.arrivals == b.new_femto.arrivals &&
            a.ho_mm.drops == b.ho_mm.drops && a.p_B_m.value == b.p_B_m.value &&
            a.ft_overall.value == b.ft_overall.value;
        all_violations += a.invariant_violations;
        h.criterion(9, "zero invariant violations, reproducible runs",
                    all_violations == 0 && deterministic,
                    fmt("violations = %.0f, deterministic = %.0f",
                        static_cast<double>(all_violations), deterministic ? 1.0 : 0.0));
    }

    std::printf("%s: %d criterion(s) failed\n", h.failures == 0 ? "OK" : "FAILED",
                h.failures);
    return h.failures;
}
