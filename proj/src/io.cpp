#include "hetnet/io.hpp"

#include <charconv>
#include <cstdio>
#include <set>

namespace hetnet::io {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

const std::set<std::string> kKnownKeys = {
    "n",   "r_f", "r_m", "mu",  "eta_m", "eta_f", "lambda_o_m", "lambda_o_f",
    "K",   "C",   "bw_nonadaptive", "bw_adaptive_max", "bw_adaptive_min",
    "mix_ratio", "N_override", "S_override"};

} // namespace

ScenarioConfig scenario_from_json(const json& j) {
    if (!j.is_object()) throw InputError("scenario must be a JSON object");
    for (const auto& [key, value] : j.items())
        if (!kKnownKeys.count(key)) throw InputError("unknown scenario key: " + key);

    ScenarioConfig cfg;
    auto require = [&](const char* key) -> const json& {
        auto it = j.find(key);
        if (it == j.end()) throw InputError(std::string("missing scenario key: ") + key);
        return *it;
    };
    try {
        cfg.n = require("n").get<int>();
        cfg.r_f = require("r_f").get<double>();
        cfg.r_m = require("r_m").get<double>();
        cfg.mu = require("mu").get<double>();
        cfg.eta_m = require("eta_m").get<double>();
        cfg.eta_f = require("eta_f").get<double>();
        cfg.lambda_o_m = require("lambda_o_m").get<double>();
        cfg.lambda_o_f = require("lambda_o_f").get<double>();
        cfg.K = require("K").get<int>();
        cfg.C = require("C").get<double>();
        cfg.bw_nonadaptive = require("bw_nonadaptive").get<double>();
        cfg.bw_adaptive_max = require("bw_adaptive_max").get<double>();
        cfg.bw_adaptive_min = require("bw_adaptive_min").get<double>();
        const auto& mix = require("mix_ratio");
        if (!mix.is_array() || mix.size() != 2)
            throw InputError("mix_ratio must be a two-element array");
        cfg.mix_ratio.nonadaptive = mix[0].get<int>();
        cfg.mix_ratio.adaptive = mix[1].get<int>();
        if (j.contains("N_override")) cfg.N_override = j["N_override"].get<int>();
        if (j.contains("S_override")) cfg.S_override = j["S_override"].get<int>();
    } catch (const json::exception& e) {
        throw InputError(std::string("scenario field type error: ") + e.what());
    }
    return cfg;
}

json scenario_to_json(const ScenarioConfig& cfg) {
    json j{{"n", cfg.n},
           {"r_f", cfg.r_f},
           {"r_m", cfg.r_m},
           {"mu", cfg.mu},
           {"eta_m", cfg.eta_m},
           {"eta_f", cfg.eta_f},
           {"lambda_o_m", cfg.lambda_o_m},
           {"lambda_o_f", cfg.lambda_o_f},
           {"K", cfg.K},
           {"C", cfg.C},
           {"bw_nonadaptive", cfg.bw_nonadaptive},
           {"bw_adaptive_max", cfg.bw_adaptive_max},
           {"bw_adaptive_min", cfg.bw_adaptive_min},
           {"mix_ratio", {cfg.mix_ratio.nonadaptive, cfg.mix_ratio.adaptive}}};
    if (cfg.N_override) j["N_override"] = *cfg.N_override;
    if (cfg.S_override) j["S_override"] = *cfg.S_override;
    return j;
}

ScenarioConfig preset(const std::string& name) {
    ScenarioConfig cfg;
    cfg.r_f = 10.0;
    cfg.r_m = 400.0;
    cfg.mu = 1.0 / 120.0;
    cfg.eta_m = 1.0 / 240.0;
    cfg.eta_f = 1.0 / 360.0;
    cfg.K = 4;
    cfg.C = 6000.0;
    cfg.bw_nonadaptive = 64.0;
    cfg.bw_adaptive_max = 56.0;
    cfg.bw_adaptive_min = 28.0;
    cfg.mix_ratio = {1, 1};

    double lambda_total = 0.0;
    if (name == "table1") {
        cfg.n = 1000;
        lambda_total = 5.0;
    } else if (name == "desk") {
        // Homogeneous adaptive traffic with C = 20 full-rate = 25 reduced-rate
        // calls: the bandwidth pool then realizes the N=20, S=5 guard chain
        // exactly, so simulation and closed form are directly comparable.
        cfg.n = 10;
        cfg.C = 1120.0;
        cfg.bw_nonadaptive = 56.0;
        cfg.bw_adaptive_max = 56.0;
        cfg.bw_adaptive_min = 44.8;
        cfg.mix_ratio = {0, 1};
        cfg.N_override = 20;
        cfg.S_override = 5;
        lambda_total = 0.5;
    } else {
        throw InputError("unknown preset: " + name);
    }
    const double q = coverage_ratio(cfg);
    std::tie(cfg.lambda_o_f, cfg.lambda_o_m) = split_arrivals(lambda_total, 20.0, cfg.n, q);
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path_or_preset) {
    if (path_or_preset == "table1" || path_or_preset == "desk")
        return preset(path_or_preset);
    std::FILE* f = std::fopen(path_or_preset.c_str(), "rb");
    if (!f) throw InputError("cannot open scenario file: " + path_or_preset);
    std::string text;
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) text.append(buf, got);
    std::fclose(f);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(path_or_preset + ": " + e.what());
    }
    return scenario_from_json(j);
}

std::vector<int> SweepSpec::points() const {
    std::vector<int> out;
    for (int v = start; v <= stop; v += step) out.push_back(v);
    return out;
}

SweepSpec parse_sweep(const std::string& spec) {
    // n=start:stop:step
    if (spec.rfind("n=", 0) != 0) throw InputError("sweep spec must start with 'n='");
    const std::string body = spec.substr(2);
    SweepSpec s;
    int* fields[3] = {&s.start, &s.stop, &s.step};
    std::size_t pos = 0;
    for (int i = 0; i < 3; ++i) {
        const std::size_t next = i < 2 ? body.find(':', pos) : body.size();
        if (next == std::string::npos) throw InputError("sweep spec needs start:stop:step");
        const char* begin = body.data() + pos;
        const char* end = body.data() + next;
        auto [ptr, ec] = std::from_chars(begin, end, *fields[i]);
        if (ec != std::errc{} || ptr != end) throw InputError("bad sweep number: " + body);
        pos = next + 1;
    }
    if (s.step <= 0) throw InputError("sweep step must be positive");
    if (s.start < 0 || s.stop < s.start) throw InputError("sweep bounds must satisfy 0 <= start <= stop");
    return s;
}

json make_manifest(const std::string& command, const ScenarioConfig& cfg,
                   const std::vector<std::uint64_t>& seeds, const std::string& mode,
                   double tol) {
    char digest[20];
    std::snprintf(digest, sizeof digest, "%016llx",
                  static_cast<unsigned long long>(scenario_digest(cfg)));
    return json{{"command", command},
                {"scenario_digest", digest},
                {"seeds", seeds},
                {"tool_version", kToolVersion},
                {"mode", mode},
                {"tolerance", tol}};
}

json solution_to_json(const FixedPointSolution& sol, const HandoverProbabilities& hp,
                      double forced_term_f, double forced_term_m) {
    return json{{"handover_probabilities",
                 {{"p_mm", hp.p_mm}, {"p_mf", hp.p_mf}, {"p_ff", hp.p_ff}, {"p_fm", hp.p_fm}}},
                {"flows",
                 {{"lambda_h_mm", sol.lambda_h_mm},
                  {"lambda_h_mf", sol.lambda_h_mf},
                  {"lambda_h_ff", sol.lambda_h_ff},
                  {"lambda_h_fm", sol.lambda_h_fm},
                  {"lambda_h_m", sol.lambda_h_m},
                  {"lambda_T_f", sol.lambda_T_f},
                  {"lambda_o_m_eff", sol.lambda_o_m_eff}}},
                {"probabilities",
                 {{"p_B_f", sol.p_B_f},
                  {"p_D_f", sol.p_D_f},
                  {"p_B_m", sol.p_B_m},
                  {"p_D_m", sol.p_D_m}}},
                {"forced_termination", {{"D_f", forced_term_f}, {"D_m", forced_term_m}}},
                {"iterations", sol.iterations},
                {"residual", sol.residual}};
}

namespace {

json counters_to_json(const StreamCounters& s) {
    return json{{"arrivals", s.arrivals},
                {"admits", s.admits},
                {"blocks", s.blocks},
                {"drops", s.drops},
                {"stays", s.stays}};
}

json estimate_to_json(const Estimate& e, bool with_ci) {
    if (!e.present) return json{{"present", false}};
    json j{{"present", true}, {"value", e.value}};
    if (with_ci) j["half_width_95"] = e.half_width;
    return j;
}

} // namespace

json metrics_to_json(const SimMetrics& m) {
    const bool ci = m.replications >= 2;
    return json{{"mode", m.mode == SimMode::chain_validation ? "chain" : "closed"},
                {"seed", m.seed},
                {"replications", m.replications},
                {"horizon_events", m.horizon_events},
                {"warmup_events", m.warmup_events},
                {"events", m.events},
                {"measured_time", m.measured_time},
                {"ci_present", ci},
                {"invariant_violations", m.invariant_violations},
                {"counters",
                 {{"new_femto", counters_to_json(m.new_femto)},
                  {"new_macro", counters_to_json(m.new_macro)},
                  {"ho_mm", counters_to_json(m.ho_mm)},
                  {"ho_mf", counters_to_json(m.ho_mf)},
                  {"ho_ff", counters_to_json(m.ho_ff)},
                  {"ho_fm", counters_to_json(m.ho_fm)}}},
                {"estimates",
                 {{"p_B_f", estimate_to_json(m.p_B_f, ci)},
                  {"p_D_f", estimate_to_json(m.p_D_f, ci)},
                  {"p_B_m", estimate_to_json(m.p_B_m, ci)},
                  {"p_D_m", estimate_to_json(m.p_D_m, ci)},
                  {"ft_femto", estimate_to_json(m.ft_femto, ci)},
                  {"ft_macro", estimate_to_json(m.ft_macro, ci)},
                  {"ft_overall", estimate_to_json(m.ft_overall, ci)},
                  {"rate_h_mm", estimate_to_json(m.rate_h_mm, ci)},
                  {"rate_h_mf", estimate_to_json(m.rate_h_mf, ci)},
                  {"rate_h_ff", estimate_to_json(m.rate_h_ff, ci)},
                  {"rate_h_fm", estimate_to_json(m.rate_h_fm, ci)},
                  {"femto_user_drop", estimate_to_json(m.femto_user_drop, ci)}}}};
}

const char* kSweepCsvHeader =
    "n,p_mm,p_mf,p_ff,p_fm,p_B_f,p_D_f,p_B_m,p_D_m,"
    "lambda_h_mm,lambda_h_mf,lambda_h_ff,lambda_h_fm,D_f,D_m,iterations,residual";

std::string sweep_csv_row(int n, const HandoverProbabilities& hp,
                          const FixedPointSolution& sol, double d_f, double d_m) {
    std::string row = std::to_string(n);
    for (double v : {hp.p_mm, hp.p_mf, hp.p_ff, hp.p_fm, sol.p_B_f, sol.p_D_f, sol.p_B_m,
                     sol.p_D_m, sol.lambda_h_mm, sol.lambda_h_mf, sol.lambda_h_ff,
                     sol.lambda_h_fm, d_f, d_m}) {
        row += ',';
        row += fmt(v);
    }
    row += ',' + std::to_string(sol.iterations);
    row += ',' + fmt(sol.residual);
    return row;
}

} // namespace hetnet::io
