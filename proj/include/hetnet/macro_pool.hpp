#pragma once

#include <vector>

namespace hetnet {

// Bandwidth bookkeeping of the macrocell under the admission policy:
// new calls need their full rate, handover calls may trigger QoS degradation
// of resident adaptive calls and may themselves be admitted at a reduced
// rate down to their minimum.
class MacroPool {
public:
    struct Slot {
        int id;
        double bw;      // currently allocated
        double bw_full; // requested rate
        double bw_min;  // floor under degradation (== bw_full for non-adaptive)
        bool adaptive;
        bool degraded;
    };

    explicit MacroPool(double capacity) : capacity_(capacity) {}

    double capacity() const { return capacity_; }
    double occupied() const { return occupied_; }
    double available() const { return capacity_ - occupied_; }
    // Total bandwidth the resident adaptive calls could still release.
    double releasable() const;
    const std::vector<Slot>& slots() const { return slots_; }

    // New originating call: full rate or nothing, no degradation.
    bool admit_new(int id, double bw_full, double bw_min, bool adaptive);

    // Handover call: degrade residents and/or reduce the incoming rate, down
    // to bw_min. Returns false (drop) only when even bw_min cannot be found.
    bool admit_handover(int id, double bw_full, double bw_min, bool adaptive);

    // Departure or handover-out: frees the slot and redistributes the idle
    // bandwidth to degraded calls.
    void remove(int id);

    // Frees up to `deficit` by degrading adaptive calls in admission order;
    // returns the amount actually freed.
    double degrade_pool(double deficit);

    // Returns idle bandwidth to degraded calls, earliest degraded first.
    void restore_pool();

    double bandwidth_of(int id) const;

private:
    Slot* find(int id);

    double capacity_;
    double occupied_ = 0.0;
    std::vector<Slot> slots_;        // admission order
    std::vector<int> degraded_ids_;  // first-degradation order
};

} // namespace hetnet
