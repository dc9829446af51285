#include "hetnet/sim.hpp"

#include "hetnet/macro_pool.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <queue>
#include <random>
#include <stdexcept>

namespace hetnet {

namespace {

constexpr double kBwEps = 1e-9;

std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// One independently seeded stream per stochastic purpose.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : rng_(seed) {}
    double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }
    int uniform_int(int bound) { // [0, bound)
        return std::min(bound - 1, static_cast<int>(uniform() * bound));
    }

private:
    std::mt19937_64 rng_;
};

struct Event {
    double time;
    std::uint64_t seq; // deterministic tiebreak
    int type;          // engine-specific
    int payload;       // call id / FAP index
};

struct EventLater {
    bool operator()(const Event& a, const Event& b) const {
        if (a.time != b.time) return a.time > b.time;
        return a.seq > b.seq;
    }
};

using EventQueue = std::priority_queue<Event, std::vector<Event>, EventLater>;

struct Ratio {
    std::uint64_t num = 0;
    std::uint64_t den = 0;
    Estimate estimate() const {
        Estimate e;
        if (den > 0) {
            e.value = static_cast<double>(num) / static_cast<double>(den);
            e.present = true;
        }
        return e;
    }
};

Estimate rate_estimate(std::uint64_t count, double time) {
    Estimate e;
    if (time > 0.0) {
        e.value = static_cast<double>(count) / time;
        e.present = true;
    }
    return e;
}

void check_stream_accounting(const StreamCounters& s, std::uint64_t& violations) {
    if (s.arrivals != s.admits + s.blocks + s.drops + s.stays) ++violations;
}

// ---------------------------------------------------------------------------
// chain_validation: the femto tier is n independent K-server loss systems and
// the macro tier is the N+S guard chain, each fed by open-loop Poisson
// streams taken from a fixed-point solution. Calls occupy unit slots.
// ---------------------------------------------------------------------------
SimMetrics run_chain_validation(const ScenarioConfig& cfg, const DerivedCapacities& derived,
                                const FixedPointSolution& rates, const SimOptions& opt) {
    enum { kNewMacro = 0, kHoMacro = 1, kFemto = 2, kReleaseMacro = 3, kReleaseFemto = 4 };

    std::uint64_t seed_state = opt.seed;
    RandomStream arrivals(splitmix64(seed_state));
    RandomStream durations(splitmix64(seed_state));
    RandomStream targets(splitmix64(seed_state));

    const double lam_new_m = rates.lambda_o_m_eff;
    const double lam_ho_m = rates.lambda_h_m;
    const double lam_femto = rates.lambda_T_f;

    SimMetrics m;
    m.mode = SimMode::chain_validation;
    m.scenario_digest = scenario_digest(cfg);
    m.seed = opt.seed;
    m.horizon_events = opt.horizon_events;
    m.warmup_events = std::min(opt.warmup_events.value_or(opt.horizon_events / 5),
                               opt.horizon_events);

    EventQueue queue;
    std::uint64_t seq = 0;
    auto push = [&](double time, int type, int payload) {
        queue.push({time, seq++, type, payload});
    };
    if (lam_new_m > 0.0) push(arrivals.exponential(lam_new_m), kNewMacro, 0);
    if (lam_ho_m > 0.0) push(arrivals.exponential(lam_ho_m), kHoMacro, 0);
    if (lam_femto > 0.0 && cfg.n > 0) push(arrivals.exponential(lam_femto), kFemto, 0);

    long macro_count = 0;
    std::vector<int> fap(static_cast<std::size_t>(cfg.n), 0);
    const long cap_new = derived.N;
    const long cap_ho = derived.N + derived.S;

    // Counter mapping in this mode: new_macro = macro new-call stream,
    // ho_mm = aggregate macro handover stream, new_femto = femto-tier stream.
    bool recording = m.warmup_events == 0;
    std::uint64_t processed = 0;
    double now = 0.0, t0 = 0.0;

    while (!queue.empty() && processed < opt.horizon_events) {
        const Event ev = queue.top();
        queue.pop();
        now = ev.time;
        switch (ev.type) {
        case kNewMacro:
            push(now + arrivals.exponential(lam_new_m), kNewMacro, 0);
            if (recording) ++m.new_macro.arrivals;
            if (macro_count < cap_new) {
                ++macro_count;
                push(now + durations.exponential(derived.mu_m), kReleaseMacro, 0);
                if (recording) ++m.new_macro.admits;
            } else if (recording) {
                ++m.new_macro.blocks;
            }
            break;
        case kHoMacro:
            push(now + arrivals.exponential(lam_ho_m), kHoMacro, 0);
            if (recording) ++m.ho_mm.arrivals;
            if (macro_count < cap_ho) {
                ++macro_count;
                push(now + durations.exponential(derived.mu_m), kReleaseMacro, 0);
                if (recording) ++m.ho_mm.admits;
            } else if (recording) {
                ++m.ho_mm.drops;
            }
            break;
        case kFemto: {
            push(now + arrivals.exponential(lam_femto), kFemto, 0);
            const int f = targets.uniform_int(cfg.n);
            if (recording) ++m.new_femto.arrivals;
            if (fap[static_cast<std::size_t>(f)] < cfg.K) {
                ++fap[static_cast<std::size_t>(f)];
                push(now + durations.exponential(derived.mu_f), kReleaseFemto, f);
                if (recording) ++m.new_femto.admits;
            } else if (recording) {
                ++m.new_femto.blocks;
            }
            break;
        }
        case kReleaseMacro:
            --macro_count;
            break;
        case kReleaseFemto:
            --fap[static_cast<std::size_t>(ev.payload)];
            break;
        }

        if (opt.check_invariants) {
            if (macro_count < 0 || macro_count > cap_ho) ++m.invariant_violations;
            for (int c : fap)
                if (c < 0 || c > cfg.K) ++m.invariant_violations;
        }

        ++processed;
        if (!recording && processed >= m.warmup_events) {
            recording = true;
            t0 = now;
            m = [&] { // reset counters, keep metadata
                SimMetrics fresh;
                fresh.mode = m.mode;
                fresh.scenario_digest = m.scenario_digest;
                fresh.seed = m.seed;
                fresh.horizon_events = m.horizon_events;
                fresh.warmup_events = m.warmup_events;
                fresh.invariant_violations = m.invariant_violations;
                return fresh;
            }();
        }
    }

    m.events = processed > m.warmup_events ? processed - m.warmup_events : 0;
    m.measured_time = now - t0;

    Ratio blocking{m.new_macro.blocks, m.new_macro.arrivals};
    Ratio dropping{m.ho_mm.drops, m.ho_mm.arrivals};
    Ratio femto{m.new_femto.blocks, m.new_femto.arrivals};
    m.p_B_m = blocking.estimate();
    m.p_D_m = dropping.estimate();
    m.p_B_f = femto.estimate();
    m.p_D_f = femto.estimate();
    m.rate_h_mm = rate_estimate(m.ho_mm.arrivals, m.measured_time);

    if (opt.check_invariants) {
        check_stream_accounting(m.new_macro, m.invariant_violations);
        check_stream_accounting(m.ho_mm, m.invariant_violations);
        check_stream_accounting(m.new_femto, m.invariant_violations);
    }
    return m;
}

// ---------------------------------------------------------------------------
// closed_loop: full CAC of the admission policy with per-call bandwidth
// accounting on the macrocell and routed mobility. A pool of statistically
// identical cells is simulated, each a macrocell with its own femtocell
// layer, and every handover draws its target in a uniformly chosen cell.
// This emulates an infinite homogeneous network where successively visited
// cells are independent: a same-cell wrap-around would let an mm handover
// free its own bandwidth before the admission test, and with few cells an
// unusually full cell has drawn its excess from the others, biasing the
// state its own handovers encounter.
// ---------------------------------------------------------------------------
class ClosedLoopEngine {
public:
    static constexpr int kCells = 100;

    ClosedLoopEngine(const ScenarioConfig& cfg, const DerivedCapacities& derived,
                     const HandoverProbabilities& hp, const SimOptions& opt)
        : cfg_(cfg), derived_(derived), hp_(hp), opt_(opt), pools_(kCells, MacroPool(cfg.C)) {
        if (hp_.p_mm + hp_.p_mf > 1.0)
            throw std::invalid_argument("closed_loop mode requires p_mm + p_mf <= 1");
        std::uint64_t seed_state = opt.seed;
        arrivals_ = std::make_unique<RandomStream>(splitmix64(seed_state));
        durations_ = std::make_unique<RandomStream>(splitmix64(seed_state));
        routing_ = std::make_unique<RandomStream>(splitmix64(seed_state));
        targets_ = std::make_unique<RandomStream>(splitmix64(seed_state));
        classes_ = std::make_unique<RandomStream>(splitmix64(seed_state));
        fap_.assign(static_cast<std::size_t>(kCells * cfg.n), 0);
        const double total = cfg.mix_ratio.nonadaptive + cfg.mix_ratio.adaptive;
        adaptive_share_ = cfg.mix_ratio.adaptive / total;
    }

    SimMetrics run() {
        m_.mode = SimMode::closed_loop;
        m_.scenario_digest = scenario_digest(cfg_);
        m_.seed = opt_.seed;
        m_.horizon_events = opt_.horizon_events;
        m_.warmup_events = std::min(opt_.warmup_events.value_or(opt_.horizon_events / 5),
                                    opt_.horizon_events);
        recording_ = m_.warmup_events == 0;

        // One aggregate Poisson stream per arrival type across the cells;
        // each arrival picks its cell uniformly (equivalent to independent
        // per-cell streams at the configured rates).
        if (cfg_.lambda_o_f > 0.0 && cfg_.n > 0)
            push(arrivals_->exponential(kCells * cfg_.lambda_o_f), kNewFemto, 0);
        if (cfg_.lambda_o_m > 0.0)
            push(arrivals_->exponential(kCells * cfg_.lambda_o_m), kNewMacro, 0);

        std::uint64_t processed = 0;
        while (!queue_.empty() && processed < opt_.horizon_events) {
            const Event ev = queue_.top();
            queue_.pop();
            now_ = ev.time;
            dispatch(ev);
            if (opt_.check_invariants)
                audit();
            else
                n_touched_ = 0;
            ++processed;
            if (!recording_ && processed >= m_.warmup_events) {
                recording_ = true;
                t0_ = now_;
                reset_counters();
            }
        }
        m_.events = processed > m_.warmup_events ? processed - m_.warmup_events : 0;
        m_.measured_time = now_ - t0_;
        finalize();
        return m_;
    }

private:
    enum { kNewFemto = 0, kNewMacro = 1, kRelease = 2 };

    struct Call {
        double bw_full = 0.0, bw_min = 0.0;
        int tier = kFree; // -1 macro, >= 0 FAP index within the cell
        int cell = 0;
        bool adaptive = false;
        bool origin_femto = false;
        bool counted = false;
    };
    static constexpr int kFree = -2;
    static constexpr int kMacro = -1;

    void push(double time, int type, int payload) {
        queue_.push({time, seq_++, type, payload});
    }

    int alloc_call() {
        if (!free_ids_.empty()) {
            const int id = free_ids_.back();
            free_ids_.pop_back();
            calls_[static_cast<std::size_t>(id)] = Call{};
            return id;
        }
        calls_.emplace_back();
        return static_cast<int>(calls_.size()) - 1;
    }

    Call& call(int id) { return calls_[static_cast<std::size_t>(id)]; }

    void draw_class(Call& c) {
        c.adaptive = classes_->uniform() < adaptive_share_;
        c.bw_full = c.adaptive ? cfg_.bw_adaptive_max : cfg_.bw_nonadaptive;
        c.bw_min = c.adaptive ? cfg_.bw_adaptive_min : c.bw_full;
    }

    int& fap_slot(int cell, int fap) {
        return fap_[static_cast<std::size_t>(cell * cfg_.n + fap)];
    }

    // Cells whose state changed during the current event; only these need
    // auditing, which keeps the per-event check O(cell) not O(network).
    void touch(int cell) {
        if (n_touched_ < 2 && (n_touched_ == 0 || touched_[0] != cell))
            touched_[n_touched_++] = cell;
    }

    bool admit_macro_new(int id) {
        if (!opt_.macro_tier_enabled) return false;
        Call& c = call(id);
        if (!pools_[static_cast<std::size_t>(c.cell)].admit_new(id, c.bw_full, c.bw_min,
                                                                c.adaptive))
            return false;
        touch(c.cell);
        c.tier = kMacro;
        push(now_ + durations_->exponential(derived_.mu_m), kRelease, id);
        return true;
    }

    bool admit_macro_handover(int id) {
        if (!opt_.macro_tier_enabled) return false;
        Call& c = call(id);
        if (!pools_[static_cast<std::size_t>(c.cell)].admit_handover(id, c.bw_full, c.bw_min,
                                                                     c.adaptive))
            return false;
        touch(c.cell);
        c.tier = kMacro;
        push(now_ + durations_->exponential(derived_.mu_m), kRelease, id);
        return true;
    }

    void remove_from_macro(int id) {
        Call& c = call(id);
        pools_[static_cast<std::size_t>(c.cell)].remove(id);
        touch(c.cell);
        c.tier = kFree;
    }

    bool admit_femto(int id, int cell, int fap) {
        if (fap_slot(cell, fap) >= cfg_.K) return false;
        ++fap_slot(cell, fap);
        touch(cell);
        Call& c = call(id);
        c.cell = cell;
        c.tier = fap;
        push(now_ + durations_->exponential(derived_.mu_f), kRelease, id);
        return true;
    }

    void leave_femto(int id) {
        Call& c = call(id);
        --fap_slot(c.cell, c.tier);
        touch(c.cell);
        c.tier = kFree;
    }

    void mark_admitted(int id, bool femto_first) {
        Call& c = call(id);
        c.origin_femto = femto_first;
        c.counted = recording_;
    }

    void resolve(int id, bool dropped) {
        Call& c = call(id);
        if (c.counted) {
            if (c.origin_femto) {
                ++fo_ended_;
                if (dropped) ++fo_terminated_;
            } else {
                ++mo_ended_;
                if (dropped) ++mo_terminated_;
            }
        }
        c.tier = kFree;
        free_ids_.push_back(id);
    }

    void dispatch(const Event& ev) {
        switch (ev.type) {
        case kNewFemto:
            push(now_ + arrivals_->exponential(kCells * cfg_.lambda_o_f), kNewFemto, 0);
            handle_new_femto();
            break;
        case kNewMacro:
            push(now_ + arrivals_->exponential(kCells * cfg_.lambda_o_m), kNewMacro, 0);
            handle_new_macro();
            break;
        case kRelease:
            handle_release(ev.payload);
            break;
        }
    }

    void handle_new_femto() {
        if (recording_) ++m_.new_femto.arrivals;
        const int id = alloc_call();
        draw_class(call(id));
        const int cell = targets_->uniform_int(kCells);
        call(id).cell = cell;
        const int fap = targets_->uniform_int(cfg_.n);
        if (recording_) ++femto_new_.den;
        if (admit_femto(id, cell, fap)) {
            mark_admitted(id, true);
            if (recording_) ++m_.new_femto.admits;
            return;
        }
        if (recording_) ++femto_new_.num;
        // FAP full: retry on the overlaid macrocell at full rate.
        if (opt_.macro_tier_enabled) {
            if (recording_) ++macro_new_.den;
            if (admit_macro_new(id)) {
                mark_admitted(id, false);
                if (recording_) ++m_.new_femto.admits;
                return;
            }
            if (recording_) ++macro_new_.num;
        }
        if (recording_) ++m_.new_femto.blocks;
        resolve_blocked(id);
    }

    void handle_new_macro() {
        if (recording_) ++m_.new_macro.arrivals;
        const int id = alloc_call();
        draw_class(call(id));
        call(id).cell = targets_->uniform_int(kCells);
        if (opt_.macro_tier_enabled && recording_) ++macro_new_.den;
        if (admit_macro_new(id)) {
            mark_admitted(id, false);
            if (recording_) ++m_.new_macro.admits;
            return;
        }
        if (opt_.macro_tier_enabled && recording_) ++macro_new_.num;
        if (recording_) ++m_.new_macro.blocks;
        resolve_blocked(id);
    }

    void resolve_blocked(int id) {
        // Blocked new calls never entered service; they do not count toward
        // forced termination.
        call(id).tier = kFree;
        free_ids_.push_back(id);
    }

    void handle_release(int id) {
        Call& c = call(id);
        if (c.tier >= 0)
            femto_sojourn_end(id);
        else
            macro_sojourn_end(id);
    }

    void femto_sojourn_end(int id) {
        const double u = routing_->uniform();
        const double p_ff = std::max(hp_.p_ff, 0.0);
        if (u < p_ff)
            attempt_ff(id);
        else if (u < p_ff + hp_.p_fm)
            attempt_fm(id);
        else {
            leave_femto(id);
            resolve(id, false);
        }
    }

    void macro_sojourn_end(int id) {
        const double u = routing_->uniform();
        if (u < hp_.p_mm)
            attempt_mm(id);
        else if (u < hp_.p_mm + hp_.p_mf)
            attempt_mf(id);
        else {
            remove_from_macro(id);
            resolve(id, false);
        }
    }

    void attempt_ff(int id) {
        if (recording_) ++m_.ho_ff.arrivals;
        // Any femtocell in the network except the source.
        const int src_global = call(id).cell * cfg_.n + call(id).tier;
        leave_femto(id);
        int pick = targets_->uniform_int(kCells * cfg_.n - 1);
        if (pick >= src_global) ++pick;
        if (recording_) ++femto_ho_.den;
        if (admit_femto(id, pick / cfg_.n, pick % cfg_.n)) {
            if (recording_) ++m_.ho_ff.admits;
            return;
        }
        if (recording_) ++femto_ho_.num;
        // Target FAP full: overflow to the macrocell covering the target.
        call(id).cell = pick / cfg_.n;
        if (opt_.macro_tier_enabled) {
            if (recording_) ++macro_ho_.den;
            if (admit_macro_handover(id)) {
                if (recording_) ++m_.ho_ff.admits;
                return;
            }
            if (recording_) ++macro_ho_.num;
        }
        if (recording_) ++m_.ho_ff.drops;
        resolve(id, true);
    }

    void attempt_fm(int id) {
        if (recording_) ++m_.ho_fm.arrivals;
        leave_femto(id);
        // The covering macrocell of an arbitrary network location: drawing it
        // uniformly keeps the admission test independent of the femto-layer
        // history that triggered the attempt.
        call(id).cell = targets_->uniform_int(kCells);
        if (opt_.macro_tier_enabled) {
            if (recording_) ++macro_ho_.den;
            if (admit_macro_handover(id)) {
                if (recording_) ++m_.ho_fm.admits;
                return;
            }
            if (recording_) ++macro_ho_.num;
        }
        if (recording_) ++m_.ho_fm.drops;
        resolve(id, true);
    }

    void attempt_mm(int id) {
        if (recording_) ++m_.ho_mm.arrivals;
        Call& c = call(id);
        const int src = c.cell;
        // The neighbor's admission test runs while the source cell still
        // holds the call, exactly as a fresh handover arrival would see it.
        c.cell = (src + 1 + targets_->uniform_int(kCells - 1)) % kCells;
        if (recording_) ++macro_ho_.den;
        if (admit_macro_handover(id)) {
            pools_[static_cast<std::size_t>(src)].remove(id);
            touch(src);
            if (recording_) ++m_.ho_mm.admits;
            return;
        }
        c.cell = src;
        remove_from_macro(id);
        if (recording_) ++macro_ho_.num;
        if (recording_) ++m_.ho_mm.drops;
        resolve(id, true);
    }

    void attempt_mf(int id) {
        if (recording_) ++m_.ho_mf.arrivals;
        const int tcell = targets_->uniform_int(kCells);
        const int target = targets_->uniform_int(cfg_.n);
        if (recording_) ++femto_ho_.den;
        if (fap_slot(tcell, target) < cfg_.K) {
            remove_from_macro(id);
            admit_femto(id, tcell, target);
            if (recording_) ++m_.ho_mf.admits;
            return;
        }
        if (recording_) ++femto_ho_.num;
        // A failed macro-to-femto handover keeps the call on the macrocell.
        if (recording_) ++m_.ho_mf.stays;
        push(now_ + durations_->exponential(derived_.mu_m), kRelease, id);
    }

    void audit() {
        for (int t = 0; t < n_touched_; ++t) {
            const int cell = touched_[t];
            const auto& pool = pools_[static_cast<std::size_t>(cell)];
            double sum = 0.0;
            for (const auto& s : pool.slots()) {
                sum += s.bw;
                if (s.bw < s.bw_min - kBwEps || s.bw > s.bw_full + kBwEps)
                    ++m_.invariant_violations;
                if (!s.adaptive && std::fabs(s.bw - s.bw_full) > kBwEps)
                    ++m_.invariant_violations;
            }
            if (std::fabs(sum - pool.occupied()) > 1e-6) ++m_.invariant_violations;
            if (pool.occupied() > cfg_.C + 1e-6) ++m_.invariant_violations;
            for (int f = 0; f < cfg_.n; ++f)
                if (fap_slot(cell, f) < 0 || fap_slot(cell, f) > cfg_.K)
                    ++m_.invariant_violations;
        }
        n_touched_ = 0;
    }

    void reset_counters() {
        const auto violations = m_.invariant_violations;
        const SimMetrics meta = m_;
        m_ = SimMetrics{};
        m_.mode = meta.mode;
        m_.scenario_digest = meta.scenario_digest;
        m_.seed = meta.seed;
        m_.horizon_events = meta.horizon_events;
        m_.warmup_events = meta.warmup_events;
        m_.invariant_violations = violations;
        femto_new_ = femto_ho_ = macro_new_ = macro_ho_ = Ratio{};
        fo_ended_ = fo_terminated_ = mo_ended_ = mo_terminated_ = 0;
        for (auto& c : calls_)
            c.counted = false; // calls admitted during warmup stay uncounted
    }

    void finalize() {
        m_.p_B_f = femto_new_.estimate();
        m_.p_D_f = femto_ho_.estimate();
        m_.p_B_m = macro_new_.estimate();
        m_.p_D_m = macro_ho_.estimate();
        m_.ft_femto = Ratio{fo_terminated_, fo_ended_}.estimate();
        m_.ft_macro = Ratio{mo_terminated_, mo_ended_}.estimate();
        m_.ft_overall =
            Ratio{fo_terminated_ + mo_terminated_, fo_ended_ + mo_ended_}.estimate();
        // Attempt rates are reported per cell to match the per-cell flow rates.
        const double cell_time = kCells * m_.measured_time;
        m_.rate_h_mm = rate_estimate(m_.ho_mm.arrivals, cell_time);
        m_.rate_h_mf = rate_estimate(m_.ho_mf.arrivals, cell_time);
        m_.rate_h_ff = rate_estimate(m_.ho_ff.arrivals, cell_time);
        m_.rate_h_fm = rate_estimate(m_.ho_fm.arrivals, cell_time);
        m_.femto_user_drop =
            Ratio{m_.ho_ff.drops + m_.ho_fm.drops, m_.ho_ff.arrivals + m_.ho_fm.arrivals}
                .estimate();
        if (opt_.check_invariants) {
            check_stream_accounting(m_.new_femto, m_.invariant_violations);
            check_stream_accounting(m_.new_macro, m_.invariant_violations);
            check_stream_accounting(m_.ho_mm, m_.invariant_violations);
            check_stream_accounting(m_.ho_mf, m_.invariant_violations);
            check_stream_accounting(m_.ho_ff, m_.invariant_violations);
            check_stream_accounting(m_.ho_fm, m_.invariant_violations);
        }
    }

    const ScenarioConfig& cfg_;
    const DerivedCapacities derived_;
    const HandoverProbabilities hp_;
    const SimOptions opt_;

    std::unique_ptr<RandomStream> arrivals_, durations_, routing_, targets_, classes_;
    EventQueue queue_;
    std::uint64_t seq_ = 0;
    double now_ = 0.0, t0_ = 0.0;
    bool recording_ = false;

    std::vector<Call> calls_;
    std::vector<int> free_ids_;
    std::vector<int> fap_; // kCells blocks of n occupancies
    std::vector<MacroPool> pools_;
    double adaptive_share_ = 0.5;

    SimMetrics m_;
    int touched_[2] = {0, 0};
    int n_touched_ = 0;
    Ratio femto_new_, femto_ho_, macro_new_, macro_ho_;
    std::uint64_t fo_ended_ = 0, fo_terminated_ = 0;
    std::uint64_t mo_ended_ = 0, mo_terminated_ = 0;
};

} // namespace

SimMetrics run_replication(const ScenarioConfig& cfg, const SimOptions& opt,
                           const FixedPointSolution* supplied) {
    const auto derived = derive_capacities(cfg);
    if (opt.mode == SimMode::chain_validation) {
        FixedPointSolution rates;
        if (supplied)
            rates = *supplied;
        else
            rates = solve_fixed_point(cfg);
        return run_chain_validation(cfg, derived, rates, opt);
    }
    const auto hp = handover_probabilities(cfg, derived);
    return ClosedLoopEngine(cfg, derived, hp, opt).run();
}

SimMetrics aggregate(const std::vector<SimMetrics>& replications) {
    if (replications.size() < 2)
        throw std::invalid_argument("aggregate: needs at least 2 replications");
    const auto& first = replications.front();
    for (const auto& r : replications)
        if (r.scenario_digest != first.scenario_digest || r.mode != first.mode ||
            r.horizon_events != first.horizon_events)
            throw std::invalid_argument("aggregate: replications from mismatched runs");

    SimMetrics out;
    out.mode = first.mode;
    out.scenario_digest = first.scenario_digest;
    out.horizon_events = first.horizon_events;
    out.warmup_events = first.warmup_events;
    out.replications = static_cast<int>(replications.size());

    auto sum_counters = [&](auto member) {
        StreamCounters total;
        for (const auto& r : replications) {
            const StreamCounters& s = r.*member;
            total.arrivals += s.arrivals;
            total.admits += s.admits;
            total.blocks += s.blocks;
            total.drops += s.drops;
            total.stays += s.stays;
        }
        return total;
    };
    out.new_femto = sum_counters(&SimMetrics::new_femto);
    out.new_macro = sum_counters(&SimMetrics::new_macro);
    out.ho_mm = sum_counters(&SimMetrics::ho_mm);
    out.ho_mf = sum_counters(&SimMetrics::ho_mf);
    out.ho_ff = sum_counters(&SimMetrics::ho_ff);
    out.ho_fm = sum_counters(&SimMetrics::ho_fm);
    for (const auto& r : replications) {
        out.events += r.events;
        out.measured_time += r.measured_time;
        out.invariant_violations += r.invariant_violations;
    }

    auto combine = [&](auto member) {
        Estimate e;
        double sum = 0.0;
        for (const auto& r : replications) {
            const Estimate& est = r.*member;
            if (!est.present) return e; // absent in any replication -> absent
            sum += est.value;
        }
        const double n = static_cast<double>(replications.size());
        const double mean = sum / n;
        double ss = 0.0;
        for (const auto& r : replications) {
            const double d = (r.*member).value - mean;
            ss += d * d;
        }
        const double sd = std::sqrt(ss / (n - 1.0));
        e.value = mean;
        e.half_width = 1.96 * sd / std::sqrt(n);
        e.present = true;
        return e;
    };
    out.p_B_f = combine(&SimMetrics::p_B_f);
    out.p_D_f = combine(&SimMetrics::p_D_f);
    out.p_B_m = combine(&SimMetrics::p_B_m);
    out.p_D_m = combine(&SimMetrics::p_D_m);
    out.ft_femto = combine(&SimMetrics::ft_femto);
    out.ft_macro = combine(&SimMetrics::ft_macro);
    out.ft_overall = combine(&SimMetrics::ft_overall);
    out.rate_h_mm = combine(&SimMetrics::rate_h_mm);
    out.rate_h_mf = combine(&SimMetrics::rate_h_mf);
    out.rate_h_ff = combine(&SimMetrics::rate_h_ff);
    out.rate_h_fm = combine(&SimMetrics::rate_h_fm);
    out.femto_user_drop = combine(&SimMetrics::femto_user_drop);
    return out;
}

} // namespace hetnet
