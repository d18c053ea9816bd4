#include "support/naive.hpp"

#include <algorithm>
#include <stdexcept>

namespace naive {

using ivdl::BoolExpr;
using ivdl::Carrier;
using ivdl::CmpOperand;
using ivdl::Interval;
using ivdl::PredPtr;
using ivdl::PredTerm;
using ivdl::RelPtr;
using ivdl::RelTerm;
using ivdl::State;
using ivdl::Stream;
using ivdl::SystemSpec;
using ivdl::UniversePtr;

namespace {

bool infinite_iv(const Interval& iv, const Carrier& c) {
    return c.open_ended && !iv.is_empty() && iv.hi == c.horizon - 1;
}

// The empty interval adjoins everything, on both sides.
bool adj(const Interval& a, const Interval& b) {
    if (a.is_empty() || b.is_empty()) return true;
    return a.hi + 1 == b.lo;
}

// All adjoining pairs whose union is iv.
std::vector<std::pair<Interval, Interval>> cuts(const Interval& iv) {
    if (iv.is_empty()) return {{Interval::empty(), Interval::empty()}};
    std::vector<std::pair<Interval, Interval>> out;
    for (int len = 0; len <= iv.size(); ++len) {
        Interval d1 = len == 0 ? Interval::empty() : Interval::range(iv.lo, iv.lo + len - 1);
        Interval d2 = len == iv.size() ? Interval::empty() : Interval::range(iv.lo + len, iv.hi);
        out.emplace_back(d1, d2);
    }
    return out;
}

int operand_pos(const CmpOperand& o, const State& l, const State* r) {
    if (o.is_const) return o.pos;
    return (o.side == 0 ? l : *r).pos[o.var];
}

bool cmp(BoolExpr::CmpOp op, int a, int b) {
    switch (op) {
    case BoolExpr::CmpOp::Eq: return a == b;
    case BoolExpr::CmpOp::Ne: return a != b;
    case BoolExpr::CmpOp::Lt: return a < b;
    case BoolExpr::CmpOp::Le: return a <= b;
    }
    return false;
}

bool bexpr(const BoolExpr& e, const State& l, const State* r) {
    switch (e.kind) {
    case BoolExpr::Kind::Lit: return e.lit;
    case BoolExpr::Kind::Cmp: return cmp(e.op, operand_pos(e.lhs, l, r), operand_pos(e.rhs, l, r));
    case BoolExpr::Kind::And: return bexpr(*e.a, l, r) && bexpr(*e.b, l, r);
    case BoolExpr::Kind::Or: return bexpr(*e.a, l, r) || bexpr(*e.b, l, r);
    case BoolExpr::Kind::Not: return !bexpr(*e.a, l, r);
    case BoolExpr::Kind::Iff: return bexpr(*e.a, l, r) == bexpr(*e.b, l, r);
    }
    return false;
}

// exists k: k held throughout some nonempty left-adjoining interval and at
// every point of iv.
bool stable_one(int var, const Interval& iv, const Stream& s, const Carrier& c) {
    for (int k = 0; k < s.uni->domain_size(var); ++k) {
        bool before = false;
        for (const Interval& d0 : intervals(c)) {
            if (d0.is_empty() || !adj(d0, iv)) continue;
            bool all = true;
            for (int t = d0.lo; t <= d0.hi && all; ++t) all = s.at(t, var) == k;
            if (all) {
                before = true;
                break;
            }
        }
        if (!before) continue;
        bool now = true;
        for (int t = iv.lo; t <= iv.hi && now; ++t) now = s.at(t, var) == k;
        if (now) return true;
    }
    return false;
}

// Greatest solution of z = (a ; z) or empty, by synchronous iteration down
// from all-true; the lattice is finite so this terminates.
bool omega(const PredPtr& a, const Interval& iv, const Stream& s, const Carrier& c) {
    std::vector<Interval> ivs = intervals(c);
    auto index = [&](const Interval& x) -> size_t {
        for (size_t i = 0; i < ivs.size(); ++i)
            if (ivs[i] == x) return i;
        throw std::logic_error("interval outside the carrier");
    };
    std::vector<char> z(ivs.size(), 1);
    for (;;) {
        std::vector<char> nz(ivs.size(), 0);
        for (size_t i = 0; i < ivs.size(); ++i) {
            bool v = ivs[i].is_empty();
            if (!v)
                for (const auto& [d1, d2] : cuts(ivs[i]))
                    if (z[index(d2)] && eval_pred(a, d1, s, c)) {
                        v = true;
                        break;
                    }
            if (!v && infinite_iv(ivs[i], c)) v = eval_pred(a, ivs[i], s, c);
            nz[i] = v ? 1 : 0;
        }
        if (nz == z) break;
        z = std::move(nz);
    }
    return z[index(iv)] != 0;
}

bool agree(const Interval& d, const Stream& a, const Stream& b) {
    for (int t = d.lo; t <= d.hi; ++t)
        for (int v = 0; v < a.uni->size(); ++v)
            if (a.at(t, v) != b.at(t, v)) return false;
    return true;
}

// The stream extended to the system's joint universe, observables pinned to
// rho at every point.
Stream with_obs(const Stream& z, const UniversePtr& joint, const State& rho) {
    Stream j;
    j.uni = joint;
    j.horizon = z.horizon;
    const int zn = z.uni->size();
    const int on = static_cast<int>(rho.pos.size());
    j.cells.assign(static_cast<size_t>(z.horizon) * (zn + on), 0);
    for (int t = 0; t < z.horizon; ++t) {
        for (int v = 0; v < zn; ++v) j.at(t, v) = z.at(t, v);
        for (int o = 0; o < on; ++o) j.at(t, zn + o) = rho.pos[o];
    }
    return j;
}

PredPtr conj_ops(const SystemSpec& s) {
    PredPtr g;
    for (const auto& [name, op] : s.ops) g = g ? ivdl::p_and(g, op) : op;
    return g ? g : ivdl::p_lit(s.vars, true);
}

bool sim_impl(const RelPtr& ref, const PredPtr* g, const PredPtr& h, const Carrier& c) {
    auto ivs = intervals(c);
    auto zs = streams(ref->right, c.horizon);
    auto ys = streams(ref->left, c.horizon);
    for (const Stream& z : zs)
        for (const Interval& dv : ivs) {
            if (!eval_pred(h, dv, z, c)) continue;
            for (const Interval& d0 : ivs) {
                if (!adj(d0, dv)) continue;
                for (const Stream& y0 : ys) {
                    if (!eval_rel(ref, d0, y0, z, c)) continue;
                    bool ok = false;
                    for (const Stream& y : ys) {
                        if (!agree(d0, y0, y)) continue;
                        if (!eval_rel(ref, dv, y, z, c)) continue;
                        if (g && !eval_pred(*g, dv, y, c)) continue;
                        ok = true;
                        break;
                    }
                    if (!ok) return false;
                }
            }
        }
    return true;
}

} // namespace

std::vector<Interval> intervals(const Carrier& c) {
    std::vector<Interval> out{Interval::empty()};
    for (int lo = 0; lo < c.horizon; ++lo)
        for (int hi = lo; hi < c.horizon; ++hi) out.push_back(Interval::range(lo, hi));
    return out;
}

std::vector<Stream> streams(const UniversePtr& u, int horizon) {
    const int n = u->size();
    Stream s;
    s.uni = u;
    s.horizon = horizon;
    s.cells.assign(static_cast<size_t>(horizon) * n, 0);
    std::vector<Stream> out;
    for (;;) {
        out.push_back(s);
        int d = n * horizon - 1;
        for (; d >= 0; --d) {
            int v = d / horizon;
            int t = d % horizon;
            if (++s.at(t, v) < u->domain_size(v)) break;
            s.at(t, v) = 0;
        }
        if (d < 0) break;
    }
    return out;
}

std::vector<State> apparent(const Interval& iv, const Stream& s) {
    std::vector<State> out;
    if (iv.is_empty()) return out;
    const int n = s.uni->size();
    std::vector<std::vector<uint8_t>> seen(n);
    for (int v = 0; v < n; ++v) {
        for (int t = iv.lo; t <= iv.hi; ++t) {
            uint8_t p = s.at(t, v);
            if (std::find(seen[v].begin(), seen[v].end(), p) == seen[v].end()) seen[v].push_back(p);
        }
        std::sort(seen[v].begin(), seen[v].end());
    }
    State cur;
    cur.pos.assign(n, 0);
    std::vector<size_t> digit(n, 0);
    for (;;) {
        for (int v = 0; v < n; ++v) cur.pos[v] = seen[v][digit[v]];
        out.push_back(cur);
        int v = n - 1;
        while (v >= 0 && ++digit[v] == seen[v].size()) {
            digit[v] = 0;
            --v;
        }
        if (v < 0) break;
    }
    return out;
}

bool eval_pred(const PredPtr& t, const Interval& iv, const Stream& s, const Carrier& c) {
    using K = PredTerm::Kind;
    switch (t->kind) {
    case K::Lit: return t->lit;
    case K::Always:
        for (int p = iv.lo; p <= iv.hi; ++p)
            if (!bexpr(*t->sp, s.state_at(p), nullptr)) return false;
        return true;
    case K::Sometime:
        for (int p = iv.lo; p <= iv.hi; ++p)
            if (bexpr(*t->sp, s.state_at(p), nullptr)) return true;
        return false;
    case K::Definitely:
        for (const State& a : naive::apparent(iv, s))
            if (!bexpr(*t->sp, a, nullptr)) return false;
        return true;
    case K::Possibly:
        for (const State& a : naive::apparent(iv, s))
            if (bexpr(*t->sp, a, nullptr)) return true;
        return false;
    case K::Empty: return iv.is_empty();
    case K::Finite: return !infinite_iv(iv, c);
    case K::Infinite: return infinite_iv(iv, c);
    case K::NonEmpty: return !iv.is_empty() && eval_pred(t->a, iv, s, c);
    case K::And: return eval_pred(t->a, iv, s, c) && eval_pred(t->b, iv, s, c);
    case K::Or: return eval_pred(t->a, iv, s, c) || eval_pred(t->b, iv, s, c);
    case K::Not: return !eval_pred(t->a, iv, s, c);
    case K::Chop:
        for (const auto& [d1, d2] : cuts(iv))
            if (eval_pred(t->a, d1, s, c) && eval_pred(t->b, d2, s, c)) return true;
        return infinite_iv(iv, c) && eval_pred(t->a, iv, s, c);
    case K::Omega: return omega(t->a, iv, s, c);
    case K::Prev:
        for (const Interval& d0 : intervals(c))
            if (adj(d0, iv) && eval_pred(t->a, d0, s, c)) return true;
        return false;
    case K::PrevHolds:
        for (const Interval& d0 : intervals(c)) {
            if (d0.is_empty() || !adj(d0, iv)) continue;
            bool all = true;
            for (int p = d0.lo; p <= d0.hi && all; ++p) all = bexpr(*t->sp, s.state_at(p), nullptr);
            if (all) return true;
        }
        return false;
    case K::StableVar: return stable_one(t->var, iv, s, c);
    case K::StableSet:
        for (int v : t->vars)
            if (!stable_one(v, iv, s, c)) return false;
        return true;
    }
    return false;
}

bool eval_rel(const RelPtr& t, const Interval& iv, const Stream& left, const Stream& right,
              const Carrier& c) {
    using K = RelTerm::Kind;
    switch (t->kind) {
    case K::Lit: return t->lit;
    case K::AlwaysRel:
        for (int p = iv.lo; p <= iv.hi; ++p) {
            State rs = right.state_at(p);
            if (!bexpr(*t->sr, left.state_at(p), &rs)) return false;
        }
        return true;
    case K::NonEmptyRel: return !iv.is_empty() && eval_rel(t->a, iv, left, right, c);
    case K::And:
        return eval_rel(t->a, iv, left, right, c) && eval_rel(t->b, iv, left, right, c);
    case K::Or: return eval_rel(t->a, iv, left, right, c) || eval_rel(t->b, iv, left, right, c);
    case K::Not: return !eval_rel(t->a, iv, left, right, c);
    case K::Chop:
        for (const auto& [d1, d2] : cuts(iv))
            if (eval_rel(t->a, d1, left, right, c) && eval_rel(t->b, d2, left, right, c))
                return true;
        return infinite_iv(iv, c) && eval_rel(t->a, iv, left, right, c);
    case K::Compose:
        for (const Stream& m : streams(t->mid, left.horizon))
            if (eval_rel(t->a, iv, left, m, c) && eval_rel(t->b, iv, m, right, c)) return true;
        return false;
    case K::Proj1: return eval_pred(t->pred, iv, left, c);
    case K::Proj2: return eval_pred(t->pred, iv, right, c);
    }
    return false;
}

bool simulates(const RelPtr& ref, const PredPtr& g, const PredPtr& h, const Carrier& c) {
    return sim_impl(ref, &g, h, c);
}

bool vdash(const PredPtr& h, const RelPtr& ref, const Carrier& c) {
    return sim_impl(ref, nullptr, h, c);
}

bool ref2(const PredPtr& g, const PredPtr& h, const RelPtr& ref, const Carrier& c) {
    for (const Stream& z : streams(ref->right, c.horizon))
        for (const Interval& dv : intervals(c)) {
            if (!eval_pred(h, dv, z, c)) continue;
            for (const Stream& y : streams(ref->left, c.horizon))
                if (eval_rel(ref, dv, y, z, c) && !eval_pred(g, dv, y, c)) return false;
        }
    return true;
}

bool forward_sim(const SystemSpec& abs_sys, const SystemSpec& conc_sys, const RelPtr& ref,
                 const Carrier& c) {
    auto ivs = intervals(c);
    auto zs = streams(conc_sys.vars, c.horizon);
    auto ys = streams(abs_sys.vars, c.horizon);
    auto sigmas = ivdl::all_states(*conc_sys.obs);

    // start: every concrete start extends to a related abstract one
    for (const State& sg : sigmas)
        for (const Stream& z : zs) {
            Stream jz = with_obs(z, conc_sys.joint, sg);
            for (const Interval& dv : ivs) {
                if (!eval_pred(conc_sys.init, dv, jz, c)) continue;
                bool ok = false;
                for (const Stream& y : ys) {
                    if (!eval_rel(ref, dv, y, z, c)) continue;
                    Stream jy = with_obs(y, abs_sys.joint, sg);
                    if (eval_pred(abs_sys.init, dv, jy, c)) {
                        ok = true;
                        break;
                    }
                }
                if (!ok) return false;
            }
        }

    PredPtr g = conj_ops(abs_sys);
    PredPtr h = conj_ops(conc_sys);
    if (!sim_impl(ref, &g, h, c)) return false;

    // finish: related runs read the same observation at every inner point
    for (const Stream& z : zs)
        for (const Interval& dv : ivs) {
            if (dv.is_empty()) continue;
            for (const Stream& y : ys) {
                if (!eval_rel(ref, dv, y, z, c)) continue;
                for (int p = dv.lo; p <= dv.hi; ++p) {
                    State zs2 = z.state_at(p);
                    State ys2 = y.state_at(p);
                    for (const State& sg : sigmas)
                        if (bexpr(*conc_sys.final_rel, zs2, &sg) &&
                            !bexpr(*abs_sys.final_rel, ys2, &sg))
                            return false;
                }
            }
        }
    return true;
}

std::set<std::pair<int, int>> observations(const SystemSpec& s, const Carrier& c) {
    std::set<std::pair<int, int>> out;
    auto ivs = intervals(c);
    auto sigmas = ivdl::all_states(*s.obs);
    PredPtr conj = conj_ops(s);
    for (int b = 0; b < static_cast<int>(sigmas.size()); ++b)
        for (const Stream& z : streams(s.vars, c.horizon)) {
            Stream jz = with_obs(z, s.joint, sigmas[b]);
            for (const Interval& dv : ivs) {
                if (dv.is_empty()) continue;
                bool started = false;
                for (const Interval& d0 : ivs)
                    if (adj(d0, dv) && eval_pred(s.init, d0, jz, c)) {
                        started = true;
                        break;
                    }
                if (!started || !eval_pred(conj, dv, z, c)) continue;
                for (int p = dv.lo; p <= dv.hi; ++p) {
                    State zst = z.state_at(p);
                    for (int a = 0; a < static_cast<int>(sigmas.size()); ++a)
                        if (bexpr(*s.final_rel, zst, &sigmas[a])) out.insert({b, a});
                }
            }
        }
    return out;
}

bool refinement(const SystemSpec& abs_sys, const SystemSpec& conc_sys, const Carrier& c) {
    auto oa = observations(abs_sys, c);
    for (const auto& p : observations(conc_sys, c))
        if (!oa.count(p)) return false;
    return true;
}

} // namespace naive
