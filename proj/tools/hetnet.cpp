// Batch front end: solve | sweep | simulate | validate.
// Exit codes: 0 ok, 1 validation-suite failure, 2 input error, 3 numeric error.

#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hetnet/analytic.hpp"
#include "hetnet/ctmc.hpp"
#include "hetnet/io.hpp"
#include "hetnet/scenario.hpp"
#include "hetnet/sim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

void write_text(const std::string& out_path, const std::string& text) {
    if (out_path.empty() || out_path == "-") {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw hetnet::io::InputError("cannot write output file: " + out_path);
    f << text;
}

// Loads and validates; prints violations and throws InputError if invalid.
hetnet::ScenarioConfig load_valid_scenario(const std::string& config) {
    auto cfg = hetnet::io::load_scenario(config);
    const auto report = hetnet::validate(cfg);
    if (!report.empty()) {
        for (const auto& v : report)
            std::cerr << "scenario invalid: " << v.field << ": " << v.message << "\n";
        throw hetnet::io::InputError("scenario failed validation");
    }
    return cfg;
}

// Density ratio implied by the scenario's own arrival split; used to hold the
// total offered load constant while sweeping n. Falls back to the 20:1
// density when the base split is degenerate.
double implied_density_ratio(const hetnet::ScenarioConfig& cfg) {
    const double nq = cfg.n * hetnet::coverage_ratio(cfg);
    if (cfg.n == 0 || nq <= 0.0 || nq >= 1.0 || cfg.lambda_o_m <= 0.0 ||
        cfg.lambda_o_f <= 0.0)
        return 20.0;
    return (cfg.lambda_o_f * (1.0 - nq)) / (cfg.lambda_o_m * nq);
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t next = text.find(',', pos);
        const std::string token =
            text.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
        if (token.empty()) throw hetnet::io::InputError("empty seed in seed list");
        seeds.push_back(std::stoull(token));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    if (seeds.empty()) throw hetnet::io::InputError("at least one seed required");
    return seeds;
}

int cmd_solve(const std::string& config, const std::string& out) {
    const auto cfg = load_valid_scenario(config);
    const auto derived = hetnet::derive_capacities(cfg);
    const auto hp = hetnet::handover_probabilities(cfg, derived);
    const auto sol = hetnet::solve_fixed_point(cfg);
    const auto [d_f, d_m] = hetnet::forced_termination(hp, sol.p_D_f, sol.p_D_m);

    nlohmann::json record{
        {"manifest", hetnet::io::make_manifest("solve", cfg, {}, "", 1e-10)},
        {"scenario", hetnet::io::scenario_to_json(cfg)},
        {"derived", {{"q", derived.q}, {"N", derived.N}, {"S", derived.S},
                     {"mu_m", derived.mu_m}, {"mu_f", derived.mu_f}}},
        {"result", hetnet::io::solution_to_json(sol, hp, d_f, d_m)}};
    write_text(out, record.dump(2) + "\n");
    return kExitOk;
}

int cmd_sweep(const std::string& config, const std::string& sweep, const std::string& out) {
    auto base = load_valid_scenario(config);
    const auto spec = hetnet::io::parse_sweep(sweep);
    const double lambda_total = base.lambda_o_f + base.lambda_o_m;
    const double density = implied_density_ratio(base);
    const double q = hetnet::coverage_ratio(base);

    for (int n : spec.points())
        if (n * q > 1.0)
            throw hetnet::io::InputError("sweep point n=" + std::to_string(n) +
                                         " exceeds geometry bound n*q <= 1");

    std::string csv = "# " +
                      hetnet::io::make_manifest("sweep " + sweep, base, {}, "", 1e-10).dump() +
                      "\n";
    csv += hetnet::io::kSweepCsvHeader;
    csv += '\n';
    for (int n : spec.points()) {
        hetnet::ScenarioConfig cfg = base;
        cfg.n = n;
        std::tie(cfg.lambda_o_f, cfg.lambda_o_m) =
            hetnet::split_arrivals(lambda_total, density, n, q);
        const auto derived = hetnet::derive_capacities(cfg);
        const auto hp = hetnet::handover_probabilities(cfg, derived);
        const auto sol = hetnet::solve_fixed_point(cfg);
        const auto [d_f, d_m] = hetnet::forced_termination(hp, sol.p_D_f, sol.p_D_m);
        csv += hetnet::io::sweep_csv_row(n, hp, sol, d_f, d_m);
        csv += '\n';
    }
    write_text(out, csv);
    return kExitOk;
}

int cmd_simulate(const std::string& config, const std::string& mode_name,
                 const std::string& seeds_text, std::uint64_t horizon,
                 std::int64_t warmup, const std::string& out) {
    const auto cfg = load_valid_scenario(config);
    const auto seeds = parse_seeds(seeds_text);
    const auto mode = [&] {
        if (mode_name == "chain") return hetnet::SimMode::chain_validation;
        if (mode_name == "closed") return hetnet::SimMode::closed_loop;
        throw hetnet::io::InputError("mode must be 'chain' or 'closed'");
    }();

    hetnet::FixedPointSolution shared;
    const hetnet::FixedPointSolution* supplied = nullptr;
    if (mode == hetnet::SimMode::chain_validation) {
        shared = hetnet::solve_fixed_point(cfg);
        supplied = &shared;
    }

    std::vector<std::future<hetnet::SimMetrics>> futures;
    for (const auto seed : seeds) {
        hetnet::SimOptions opt;
        opt.mode = mode;
        opt.seed = seed;
        opt.horizon_events = horizon;
        if (warmup >= 0) opt.warmup_events = static_cast<std::uint64_t>(warmup);
        futures.push_back(std::async(std::launch::async, [cfg, opt, supplied] {
            return hetnet::run_replication(cfg, opt, supplied);
        }));
    }
    std::vector<hetnet::SimMetrics> reps;
    for (auto& f : futures) reps.push_back(f.get());

    nlohmann::json record{
        {"manifest", hetnet::io::make_manifest("simulate", cfg, seeds, mode_name, 0.0)},
        {"replications", nlohmann::json::array()}};
    for (const auto& r : reps) record["replications"].push_back(hetnet::io::metrics_to_json(r));
    if (reps.size() >= 2)
        record["aggregate"] = hetnet::io::metrics_to_json(hetnet::aggregate(reps));
    write_text(out, record.dump(2) + "\n");
    return kExitOk;
}

struct CheckReporter {
    bool all_passed = true;
    void report(const std::string& name, bool pass, double delta, double tol) {
        std::printf("[%s] %-42s delta=%.3e tol=%.3e\n", pass ? "PASS" : "FAIL",
                    name.c_str(), delta, tol);
        all_passed = all_passed && pass;
    }
};

int cmd_validate(const std::string& config, double tol_alg, double tol_rel) {
    const auto cfg = load_valid_scenario(config);
    const auto derived = hetnet::derive_capacities(cfg);
    CheckReporter rep;

    // Oracle equivalence on randomized small chains.
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(0.1, 8.0);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const int n_states = 1 + static_cast<int>(rng() % 20);
        const int s_states = static_cast<int>(rng() % (30 - n_states + 1));
        const double lo = unif(rng), lh = unif(rng), mu = unif(rng);
        const auto chain = hetnet::macro_chain(lo, lh, mu, n_states, s_states);
        const auto [pb, pd] = hetnet::guard_channel_oracle(lo, lh, mu, n_states, s_states);
        worst = std::max({worst, std::fabs(chain.p_block - pb), std::fabs(chain.p_drop - pd)});
    }
    rep.report("macro_chain vs ctmc oracle", worst <= tol_alg, worst, tol_alg);

    // Erlang consistency of the femto formula.
    worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const int servers = 1 + static_cast<int>(rng() % 20);
        const double load = unif(rng);
        const auto chain = hetnet::macro_chain(load, 0.0, 1.0, servers, 0);
        worst = std::max(worst, std::fabs(chain.p_block - hetnet::erlang_b(load, servers)));
    }
    rep.report("femto blocking vs Erlang-B chain", worst <= tol_alg, worst, tol_alg);

    // Handover probability identity.
    const auto hp = hetnet::handover_probabilities(cfg, derived);
    const double identity = (1.0 - derived.q) * cfg.eta_f / (cfg.eta_f + cfg.mu);
    const double id_delta = std::fabs(hp.p_ff + hp.p_fm - identity);
    rep.report("p_ff + p_fm identity", id_delta <= tol_alg, id_delta, tol_alg);

    // Sim-vs-analytic on the scenario itself (chain validation mode).
    const auto sol = hetnet::solve_fixed_point(cfg);
    std::vector<hetnet::SimMetrics> reps;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        hetnet::SimOptions opt;
        opt.mode = hetnet::SimMode::chain_validation;
        opt.seed = seed;
        opt.horizon_events = 2'000'000;
        reps.push_back(hetnet::run_replication(cfg, opt, &sol));
    }
    const auto agg = hetnet::aggregate(reps);
    // A rare-event estimate may sit further than tol_rel from the closed form
    // purely by chance, so a delta inside three standard errors also passes.
    auto rel_check = [&](const char* name, const hetnet::Estimate& est, double analytic) {
        if (!est.present || analytic <= 0.0) return; // nothing to compare
        const double delta = std::fabs(est.value - analytic) / analytic;
        const bool pass = delta <= tol_rel || std::fabs(est.value - analytic) <= 3.0 * est.half_width;
        rep.report(name, pass, delta, tol_rel);
    };
    rel_check("sim p_B_m vs analytic", agg.p_B_m, sol.p_B_m);
    rel_check("sim p_D_m vs analytic", agg.p_D_m, sol.p_D_m);
    rel_check("sim p_B_f vs analytic", agg.p_B_f, sol.p_B_f);
    const bool clean = agg.invariant_violations == 0;
    rep.report("simulation invariants", clean, static_cast<double>(agg.invariant_violations), 0.0);

    return rep.all_passed ? kExitOk : kExitCheckFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-tier macrocell/femtocell teletraffic toolkit"};
    app.require_subcommand(1);

    std::string config, out, sweep_spec, mode = "chain", seeds = "1";
    std::uint64_t horizon = 1'000'000;
    std::int64_t warmup = -1;
    double tol = -1.0;

    auto* solve = app.add_subcommand("solve", "fixed-point solution of the traffic model");
    solve->add_option("--config", config, "scenario file or preset (table1|desk)")->required();
    solve->add_option("--out", out, "output path (default stdout)");

    auto* sweep = app.add_subcommand("sweep", "CSV sweep over the femtocell count n");
    sweep->add_option("--config", config)->required();
    sweep->add_option("--sweep", sweep_spec, "n=start:stop:step")->required();
    sweep->add_option("--out", out);

    auto* simulate = app.add_subcommand("simulate", "discrete-event CAC simulation");
    simulate->add_option("--config", config)->required();
    simulate->add_option("--mode", mode, "chain|closed");
    simulate->add_option("--seeds", seeds, "comma-separated replication seeds");
    simulate->add_option("--horizon", horizon, "events per replication");
    simulate->add_option("--warmup", warmup, "warmup events (default 20% of horizon)");
    simulate->add_option("--out", out);

    auto* validate = app.add_subcommand("validate", "oracle and simulation cross-checks");
    validate->add_option("--config", config)->required();
    validate->add_option("--tol", tol, "tolerance for every check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (solve->parsed()) return cmd_solve(config, out);
        if (sweep->parsed()) return cmd_sweep(config, sweep_spec, out);
        if (simulate->parsed()) return cmd_simulate(config, mode, seeds, horizon, warmup, out);
        if (validate->parsed()) {
            const double tol_alg = tol >= 0.0 ? tol : 1e-10;
            const double tol_rel = tol >= 0.0 ? tol : 0.10;
            return cmd_validate(config, tol_alg, tol_rel);
        }
    } catch (const hetnet::io::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const hetnet::NonConvergence& e) {
        std::cerr << "numeric error: " << e.what() << " (residual " << e.last.residual
                  << ")\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitInput;
}
