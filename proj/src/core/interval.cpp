#include "core/interval.hpp"

#include <stdexcept>

namespace ivdl {

IntervalClass classify(const Interval& iv, const Carrier& c) {
    if (iv.is_empty()) return IntervalClass::Empty;
    if (iv.lo < 0 || iv.hi >= c.horizon)
        throw std::invalid_argument("interval outside carrier");
    if (c.open_ended && iv.hi == c.horizon - 1) return IntervalClass::Infinite;
    return IntervalClass::Finite;
}

bool adjoins(const Interval& a, const Interval& b) {
    if (a.is_empty() || b.is_empty()) return true;
    return a.hi + 1 == b.lo;
}

std::vector<std::pair<Interval, Interval>> splits_of(const Interval& iv) {
    std::vector<std::pair<Interval, Interval>> out;
    if (iv.is_empty()) {
        out.emplace_back(Interval::empty(), Interval::empty());
        return out;
    }
    out.emplace_back(Interval::empty(), iv);
    for (int cut = iv.lo; cut < iv.hi; ++cut)
        out.emplace_back(Interval::range(iv.lo, cut), Interval::range(cut + 1, iv.hi));
    out.emplace_back(iv, Interval::empty());
    return out;
}

std::vector<Interval> preceders(const Interval& iv, const Carrier& c) {
    std::vector<Interval> out;
    if (iv.is_empty()) return all_intervals(c);
    out.push_back(Interval::empty());
    for (int lo = 0; lo < iv.lo; ++lo)
        out.push_back(Interval::range(lo, iv.lo - 1));
    return out;
}

std::vector<Interval> all_intervals(const Carrier& c) {
    std::vector<Interval> out;
    out.push_back(Interval::empty());
    for (int lo = 0; lo < c.horizon; ++lo)
        for (int hi = lo; hi < c.horizon; ++hi)
            out.push_back(Interval::range(lo, hi));
    return out;
}

std::string to_string(const Interval& iv) {
    if (iv.is_empty()) return "empty";
    return "[" + std::to_string(iv.lo) + "," + std::to_string(iv.hi) + "]";
}

CarrierTables::CarrierTables(const Carrier& c) : carrier_(c) {
    if (c.horizon < 1) throw std::invalid_argument("carrier horizon must be at least 1");
    intervals_ = all_intervals(c);
    const int n = count();
    splits_.resize(n);
    preceders_.resize(n);
    classes_.resize(n);
    for (int i = 0; i < n; ++i) {
        classes_[i] = ivdl::classify(intervals_[i], c);
        for (const auto& [a, b] : ivdl::splits_of(intervals_[i]))
            splits_[i].emplace_back(index_of(a), index_of(b));
        for (const auto& p : ivdl::preceders(intervals_[i], c))
            preceders_[i].push_back(index_of(p));
    }
}

int CarrierTables::index_of(const Interval& iv) const {
    if (iv.is_empty()) return 0;
    const int h = carrier_.horizon;
    if (iv.lo < 0 || iv.hi >= h)
        throw std::invalid_argument("interval outside carrier");
    // Ranges are laid out lo-major after the empty interval.
    int base = 1;
    base += iv.lo * h - iv.lo * (iv.lo - 1) / 2;
    return base + (iv.hi - iv.lo);
}

} // namespace ivdl
