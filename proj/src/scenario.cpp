#include "hetnet/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace hetnet {

double coverage_ratio(const ScenarioConfig& cfg) {
    const double ratio = cfg.r_f / cfg.r_m;
    return ratio * ratio;
}

ValidationReport validate(const ScenarioConfig& cfg) {
    ValidationReport report;
    auto bad = [&](const char* field, std::string msg) {
        report.push_back({field, std::move(msg)});
    };

    if (cfg.n < 0) bad("n", "femtocell count must be >= 0");
    if (!(cfg.r_f > 0.0) || !std::isfinite(cfg.r_f)) bad("r_f", "femtocell radius must be finite and > 0");
    if (!(cfg.r_m > 0.0) || !std::isfinite(cfg.r_m)) bad("r_m", "macrocell radius must be finite and > 0");
    if (!(cfg.mu > 0.0) || !std::isfinite(cfg.mu)) bad("mu", "call completion rate must be finite and > 0");
    if (cfg.eta_m < 0.0 || !std::isfinite(cfg.eta_m)) bad("eta_m", "macrocell crossing rate must be finite and >= 0");
    if (cfg.eta_f < 0.0 || !std::isfinite(cfg.eta_f)) bad("eta_f", "femtocell crossing rate must be finite and >= 0");
    if (cfg.lambda_o_m < 0.0 || !std::isfinite(cfg.lambda_o_m)) bad("lambda_o_m", "arrival rate must be finite and >= 0");
    if (cfg.lambda_o_f < 0.0 || !std::isfinite(cfg.lambda_o_f)) bad("lambda_o_f", "arrival rate must be finite and >= 0");
    if (cfg.K < 1) bad("K", "femtocell capacity must be >= 1");
    if (!(cfg.C > 0.0) || !std::isfinite(cfg.C)) bad("C", "macrocell capacity must be finite and > 0");
    if (!(cfg.bw_nonadaptive > 0.0)) bad("bw_nonadaptive", "bandwidth must be > 0");
    if (!(cfg.bw_adaptive_max > 0.0)) bad("bw_adaptive_max", "bandwidth must be > 0");
    if (!(cfg.bw_adaptive_min > 0.0)) bad("bw_adaptive_min", "bandwidth must be > 0");
    if (cfg.bw_adaptive_min > cfg.bw_adaptive_max)
        bad("bw_adaptive_min", "adaptive minimum exceeds adaptive maximum");
    if (cfg.bw_adaptive_max > cfg.C) bad("bw_adaptive_max", "adaptive bandwidth exceeds capacity C");
    if (cfg.bw_nonadaptive > cfg.C) bad("bw_nonadaptive", "non-adaptive bandwidth exceeds capacity C");
    if (cfg.mix_ratio.nonadaptive < 0 || cfg.mix_ratio.adaptive < 0 ||
        cfg.mix_ratio.nonadaptive + cfg.mix_ratio.adaptive <= 0)
        bad("mix_ratio", "mix components must be >= 0 with a positive sum");
    if (cfg.N_override && *cfg.N_override < 1) bad("N_override", "N must be >= 1");
    if (cfg.S_override && *cfg.S_override < 0) bad("S_override", "S must be >= 0");

    if (cfg.n == 0 && cfg.lambda_o_f > 0.0)
        bad("lambda_o_f", "femto-area arrivals require n >= 1");
    if (cfg.r_f > 0.0 && cfg.r_m > 0.0 && cfg.n > 0) {
        const double nq = cfg.n * coverage_ratio(cfg);
        if (nq > 1.0) bad("n", "n*q > 1: femtocell coverage exceeds macrocell area");
    }
    return report;
}

DerivedCapacities derive_capacities(const ScenarioConfig& cfg) {
    const auto report = validate(cfg);
    if (!report.empty())
        throw std::invalid_argument("invalid scenario: " + report.front().field + ": " +
                                    report.front().message);

    DerivedCapacities d{};
    d.q = coverage_ratio(cfg);
    d.mu_m = cfg.eta_m * (std::sqrt(static_cast<double>(cfg.n)) + 1.0) + cfg.mu;
    d.mu_f = cfg.eta_f + cfg.mu;

    // Default chain sizing: homogenize the two call classes by their mix
    // fractions. N carries full-rate calls; S states are backed by the
    // bandwidth the adaptive calls can release, measured in reduced-rate
    // call widths.
    const double total = cfg.mix_ratio.nonadaptive + cfg.mix_ratio.adaptive;
    const double w_na = cfg.mix_ratio.nonadaptive / total;
    const double w_a = cfg.mix_ratio.adaptive / total;
    const double bw_full = w_na * cfg.bw_nonadaptive + w_a * cfg.bw_adaptive_max;
    const double bw_reduced = w_na * cfg.bw_nonadaptive + w_a * cfg.bw_adaptive_min;

    d.N = cfg.N_override ? *cfg.N_override : static_cast<int>(std::floor(cfg.C / bw_full));
    if (d.N < 1)
        throw std::invalid_argument("invalid scenario: C too small for a single full-rate call");
    const double releasable = d.N * w_a * (cfg.bw_adaptive_max - cfg.bw_adaptive_min);
    d.S = cfg.S_override ? *cfg.S_override
                         : static_cast<int>(std::floor(releasable / bw_reduced));
    return d;
}

std::pair<double, double> split_arrivals(double lambda_total, double density_ratio,
                                         int n, double q) {
    if (!(density_ratio > 0.0))
        throw std::invalid_argument("split_arrivals: density ratio must be > 0");
    if (lambda_total < 0.0)
        throw std::invalid_argument("split_arrivals: negative total rate");
    const double nq = n * q;
    if (nq > 1.0)
        throw std::invalid_argument("split_arrivals: n*q > 1");
    if (n == 0) return {0.0, lambda_total};

    const double femto_weight = density_ratio * nq;
    const double share = femto_weight / (femto_weight + (1.0 - nq));
    const double lambda_o_f = lambda_total * share;
    return {lambda_o_f, lambda_total - lambda_o_f};
}

std::uint64_t scenario_digest(const ScenarioConfig& cfg) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "%d|%.17g|%.17g|%.17g|%.17g|%.17g|%.17g|%.17g|%d|%.17g|%.17g|%.17g|%.17g|%d:%d|%d|%d",
                  cfg.n, cfg.r_f, cfg.r_m, cfg.mu, cfg.eta_m, cfg.eta_f,
                  cfg.lambda_o_m, cfg.lambda_o_f, cfg.K, cfg.C, cfg.bw_nonadaptive,
                  cfg.bw_adaptive_max, cfg.bw_adaptive_min, cfg.mix_ratio.nonadaptive,
                  cfg.mix_ratio.adaptive, cfg.N_override.value_or(-1),
                  cfg.S_override.value_or(-1));
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char* p = buf; *p; ++p) {
        h ^= static_cast<unsigned char>(*p);
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace hetnet
