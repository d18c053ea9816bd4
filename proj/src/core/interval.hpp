#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ivdl {

// Discrete time carrier: points 0 .. horizon-1.  When open_ended is set,
// intervals touching the last point stand for unbounded continuations and
// classify as infinite.
struct Carrier {
    int horizon = 1;
    bool open_ended = false;

    bool operator==(const Carrier&) const = default;
};

// Contiguous set of carrier points.  Either the (positionless) empty
// interval or a closed range [lo, hi].  The empty interval has the single
// canonical encoding lo=0, hi=-1.
struct Interval {
    int lo = 0;
    int hi = -1;

    static Interval empty() { return Interval{0, -1}; }
    static Interval range(int lo, int hi) { return Interval{lo, hi}; }

    bool is_empty() const { return hi < lo; }
    int size() const { return is_empty() ? 0 : hi - lo + 1; }
    bool contains(int t) const { return !is_empty() && lo <= t && t <= hi; }

    bool operator==(const Interval&) const = default;
};

enum class IntervalClass { Empty, Finite, Infinite };

// Empty / finite / infinite split; infinite only exists on open carriers.
IntervalClass classify(const Interval& iv, const Carrier& c);

// True when every point of a precedes every point of b and their union is
// still contiguous.  The empty interval adjoins everything, on both sides.
bool adjoins(const Interval& a, const Interval& b);

// All ways to cut iv into an adjoining pair whose union is iv, ordered by
// the size of the first part.  The empty interval splits only as (∅, ∅).
std::vector<std::pair<Interval, Interval>> splits_of(const Interval& iv);

// All intervals within the carrier that adjoin iv from the left, in
// all_intervals order.  Every interval precedes the empty interval.
std::vector<Interval> preceders(const Interval& iv, const Carrier& c);

// Every interval of the carrier: the empty interval first, then ranges in
// (lo, hi) lexicographic order.  Size is 1 + horizon*(horizon+1)/2.
std::vector<Interval> all_intervals(const Carrier& c);

std::string to_string(const Interval& iv);

// Precomputed per-carrier structure shared by the evaluators: interval
// indexing plus split and preceder lists in index form.
class CarrierTables {
public:
    explicit CarrierTables(const Carrier& c);

    const Carrier& carrier() const { return carrier_; }
    const std::vector<Interval>& intervals() const { return intervals_; }
    int count() const { return static_cast<int>(intervals_.size()); }

    // Index into intervals(); the interval must lie within the carrier.
    int index_of(const Interval& iv) const;

    const std::vector<std::pair<int, int>>& splits(int idx) const { return splits_[idx]; }
    const std::vector<int>& preceders(int idx) const { return preceders_[idx]; }
    IntervalClass classify(int idx) const { return classes_[idx]; }

private:
    Carrier carrier_;
    std::vector<Interval> intervals_;
    std::vector<std::vector<std::pair<int, int>>> splits_;
    std::vector<std::vector<int>> preceders_;
    std::vector<IntervalClass> classes_;
};

} // namespace ivdl
