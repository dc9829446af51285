#include "hetnet/macro_pool.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hetnet {

namespace {
constexpr double kEps = 1e-9;
}

double MacroPool::releasable() const {
    double total = 0.0;
    for (const Slot& s : slots_)
        if (s.adaptive) total += s.bw - s.bw_min;
    return total;
}

MacroPool::Slot* MacroPool::find(int id) {
    const auto it =
        std::find_if(slots_.begin(), slots_.end(), [&](const Slot& s) { return s.id == id; });
    return it == slots_.end() ? nullptr : &*it;
}

double MacroPool::bandwidth_of(int id) const {
    for (const Slot& s : slots_)
        if (s.id == id) return s.bw;
    throw std::invalid_argument("MacroPool: unknown call id");
}

bool MacroPool::admit_new(int id, double bw_full, double bw_min, bool adaptive) {
    if (available() < bw_full - kEps) return false;
    slots_.push_back({id, bw_full, bw_full, adaptive ? bw_min : bw_full, adaptive, false});
    occupied_ += bw_full;
    return true;
}

bool MacroPool::admit_handover(int id, double bw_full, double bw_min, bool adaptive) {
    if (!adaptive) bw_min = bw_full;
    const double achievable = available() + releasable();
    if (achievable < bw_min - kEps) return false;
    const double target = std::min(bw_full, achievable);
    const double deficit = target - available();
    if (deficit > kEps) degrade_pool(deficit);
    slots_.push_back({id, target, bw_full, bw_min, adaptive, false});
    occupied_ += target;
    if (adaptive && target < bw_full - kEps) {
        slots_.back().degraded = true;
        degraded_ids_.push_back(id);
    }
    return true;
}

void MacroPool::remove(int id) {
    const auto it =
        std::find_if(slots_.begin(), slots_.end(), [&](const Slot& s) { return s.id == id; });
    if (it == slots_.end()) throw std::invalid_argument("MacroPool: unknown call id");
    occupied_ -= it->bw;
    if (it->degraded)
        degraded_ids_.erase(std::find(degraded_ids_.begin(), degraded_ids_.end(), id));
    slots_.erase(it);
    restore_pool();
}

double MacroPool::degrade_pool(double deficit) {
    double freed = 0.0;
    for (Slot& s : slots_) {
        if (deficit <= kEps) break;
        if (!s.adaptive || s.bw <= s.bw_min + kEps) continue;
        const double take = std::min(s.bw - s.bw_min, deficit);
        s.bw -= take;
        occupied_ -= take;
        deficit -= take;
        freed += take;
        if (!s.degraded) {
            s.degraded = true;
            degraded_ids_.push_back(s.id);
        }
    }
    return freed;
}

void MacroPool::restore_pool() {
    double avail = available();
    std::size_t keep = 0;
    for (std::size_t i = 0; i < degraded_ids_.size(); ++i) {
        Slot* s = find(degraded_ids_[i]);
        if (avail > kEps && s->bw < s->bw_full) {
            const double give = std::min(s->bw_full - s->bw, avail);
            s->bw += give;
            occupied_ += give;
            avail -= give;
        }
        if (s->bw >= s->bw_full - kEps) {
            occupied_ += s->bw_full - s->bw;
            s->bw = s->bw_full;
            s->degraded = false;
        } else {
            degraded_ids_[keep++] = degraded_ids_[i];
        }
    }
    degraded_ids_.resize(keep);
}

} // namespace hetnet
