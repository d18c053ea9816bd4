#include "core/laws.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <functional>
#include <initializer_list>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "core/interval.hpp"
#include "core/state.hpp"

namespace ivdl {
namespace {

using Clock = std::chrono::steady_clock;
using CmpOp = BoolExpr::CmpOp;

std::vector<Value> int_domain(int n) {
    std::vector<Value> d;
    d.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) d.push_back(Value::integer(i));
    return d;
}

UniversePtr make_uni(std::initializer_list<std::pair<const char*, int>> vars) {
    auto u = std::make_shared<VarUniverse>();
    for (const auto& [name, n] : vars) u->add(name, int_domain(n));
    return u;
}

CmpOperand var_op(int side, int var) { return CmpOperand{false, side, var, -1, {}}; }
CmpOperand const_op(const Value& v) { return CmpOperand{true, 0, -1, -1, v}; }

// Positional comparison of the first variable pair with identical domains.
BoolExprPtr cross_cmp0(const UniversePtr& l, const UniversePtr& r, CmpOp op) {
    int n = std::min(l->size(), r->size());
    for (int i = 0; i < n; ++i) {
        if (l->domain(i) == r->domain(i))
            return rel_cmp(*l, *r, op, var_op(0, i), var_op(1, i));
    }
    return sp_lit(op == CmpOp::Eq || op == CmpOp::Le);
}

// Pointwise equality of all positionally matching variable pairs.
RelPtr cross_eq(const UniversePtr& l, const UniversePtr& r) {
    int n = std::min(l->size(), r->size());
    BoolExprPtr e;
    for (int i = 0; i < n; ++i) {
        if (l->domain(i) != r->domain(i)) continue;
        BoolExprPtr c = rel_cmp(*l, *r, CmpOp::Eq, var_op(0, i), var_op(1, i));
        e = e ? sp_and(std::move(e), std::move(c)) : std::move(c);
    }
    if (!e) e = sp_lit(true);
    return r_always(l, r, std::move(e));
}

struct Gen {
    std::mt19937_64 rng; // the engine's bit stream is pinned by the standard
    explicit Gen(uint64_t seed) : rng(seed) {}
    size_t pick(size_t n) {
        if (n <= 1) return 0;
        // multiply-shift reduction; avoids unspecified distribution algorithms
        // so instances replay identically on any toolchain
        return static_cast<size_t>(
            (static_cast<unsigned __int128>(rng()) * n) >> 64);
    }
    bool coin() { return pick(2) == 1; }
};

BoolExprPtr gen_sp(Gen& g, const UniversePtr& u, int depth, int& neg) {
    if (depth <= 0 || g.pick(3) == 0) {
        if (u->size() == 0 || g.pick(8) == 0) return sp_lit(g.coin());
        int v = static_cast<int>(g.pick(static_cast<size_t>(u->size())));
        CmpOp op = static_cast<CmpOp>(g.pick(4));
        if (g.pick(4) == 0) {
            for (int w = 0; w < u->size(); ++w)
                if (w != v && u->same_domain(v, w)) return sp_cmp_vars(*u, op, v, w);
        }
        const auto& dom = u->domain(v);
        return sp_cmp(*u, op, v, dom[g.pick(dom.size())]);
    }
    switch (g.pick(neg > 0 ? 4 : 3)) {
    case 0: return sp_and(gen_sp(g, u, depth - 1, neg), gen_sp(g, u, depth - 1, neg));
    case 1: return sp_or(gen_sp(g, u, depth - 1, neg), gen_sp(g, u, depth - 1, neg));
    case 2: return sp_iff(gen_sp(g, u, depth - 1, neg), gen_sp(g, u, depth - 1, neg));
    default: --neg; return sp_not(gen_sp(g, u, depth - 1, neg));
    }
}

PredPtr gen_pred(Gen& g, const UniversePtr& u, int depth, int& neg, bool lookback) {
    if (depth <= 0 || g.pick(3) == 0) {
        switch (g.pick(lookback ? 10 : 8)) {
        case 0: return p_lit(u, g.coin());
        case 1: return p_empty(u);
        case 2: return p_finite(u);
        case 3: return p_infinite(u);
        case 4: return p_always(u, gen_sp(g, u, 1, neg));
        case 5: return p_sometime(u, gen_sp(g, u, 1, neg));
        case 6: return p_definitely(u, gen_sp(g, u, 1, neg));
        case 7: return p_possibly(u, gen_sp(g, u, 1, neg));
        case 8: return p_prev_holds(u, gen_sp(g, u, 1, neg));
        default:
            if (u->size() == 0) return p_lit(u, g.coin());
            return p_stable_var(u, static_cast<int>(g.pick(static_cast<size_t>(u->size()))));
        }
    }
    switch (g.pick(6)) {
    case 0:
        return p_and(gen_pred(g, u, depth - 1, neg, lookback),
                     gen_pred(g, u, depth - 1, neg, lookback));
    case 1:
        return p_or(gen_pred(g, u, depth - 1, neg, lookback),
                    gen_pred(g, u, depth - 1, neg, lookback));
    case 2:
        return p_chop(gen_pred(g, u, depth - 1, neg, lookback),
                      gen_pred(g, u, depth - 1, neg, lookback));
    case 3: return p_nonempty(gen_pred(g, u, depth - 1, neg, lookback));
    case 4: return p_omega(gen_pred(g, u, depth - 1, neg, lookback));
    default:
        if (lookback && g.coin()) return p_prev(gen_pred(g, u, depth - 1, neg, lookback));
        if (neg > 0) {
            --neg;
            return p_not(gen_pred(g, u, depth - 1, neg, lookback));
        }
        return p_or(gen_pred(g, u, depth - 1, neg, lookback),
                    gen_pred(g, u, depth - 1, neg, lookback));
    }
}

BoolExprPtr gen_rexpr(Gen& g, const UniversePtr& l, const UniversePtr& r, int depth, int& neg) {
    if (depth <= 0 || g.pick(3) == 0) {
        if (g.pick(8) == 0) return sp_lit(g.coin());
        bool left_side = g.coin();
        const UniversePtr& u = left_side ? l : r;
        const UniversePtr& o = left_side ? r : l;
        if (u->size() == 0) return sp_lit(g.coin());
        int v = static_cast<int>(g.pick(static_cast<size_t>(u->size())));
        CmpOp op = static_cast<CmpOp>(g.pick(4));
        if (g.coin()) {
            for (int w = 0; w < o->size(); ++w) {
                int lv = left_side ? v : w;
                int rv = left_side ? w : v;
                if (l->domain(lv) == r->domain(rv))
                    return rel_cmp(*l, *r, op, var_op(0, lv), var_op(1, rv));
            }
        }
        const auto& dom = u->domain(v);
        CmpOperand a = var_op(left_side ? 0 : 1, v);
        CmpOperand b = const_op(dom[g.pick(dom.size())]);
        if (g.coin()) return rel_cmp(*l, *r, op, a, b);
        return rel_cmp(*l, *r, op, b, a);
    }
    switch (g.pick(neg > 0 ? 4 : 3)) {
    case 0: return sp_and(gen_rexpr(g, l, r, depth - 1, neg), gen_rexpr(g, l, r, depth - 1, neg));
    case 1: return sp_or(gen_rexpr(g, l, r, depth - 1, neg), gen_rexpr(g, l, r, depth - 1, neg));
    case 2: return sp_iff(gen_rexpr(g, l, r, depth - 1, neg), gen_rexpr(g, l, r, depth - 1, neg));
    default: --neg; return sp_not(gen_rexpr(g, l, r, depth - 1, neg));
    }
}

RelPtr gen_rel(Gen& g, const UniversePtr& l, const UniversePtr& r, int depth, int& neg,
               bool lookback) {
    if (depth <= 0 || g.pick(3) == 0) {
        switch (g.pick(lookback ? 6 : 5)) {
        case 0: return r_lit(l, r, g.coin());
        case 1: return r_always(l, r, gen_rexpr(g, l, r, 1, neg));
        case 2: return r_nonempty(r_always(l, r, gen_rexpr(g, l, r, 1, neg)));
        case 3: return r_proj1(gen_pred(g, l, 1, neg, false), r);
        case 4: return r_proj2(l, gen_pred(g, r, 1, neg, false));
        default: return r_proj2(l, gen_pred(g, r, 1, neg, true));
        }
    }
    switch (g.pick(4)) {
    case 0:
        return r_and(gen_rel(g, l, r, depth - 1, neg, lookback),
                     gen_rel(g, l, r, depth - 1, neg, lookback));
    case 1:
        return r_or(gen_rel(g, l, r, depth - 1, neg, lookback),
                    gen_rel(g, l, r, depth - 1, neg, lookback));
    case 2:
        return r_chop(gen_rel(g, l, r, depth - 1, neg, lookback),
                      gen_rel(g, l, r, depth - 1, neg, lookback));
    default:
        if (neg > 0) {
            --neg;
            return r_not(gen_rel(g, l, r, depth - 1, neg, lookback));
        }
        return r_and(gen_rel(g, l, r, depth - 1, neg, lookback),
                     gen_rel(g, l, r, depth - 1, neg, lookback));
    }
}

// Grammar closed under truth on the empty interval and freedom from lookback.
RelPtr gen_rel_empty_true(Gen& g, const UniversePtr& l, const UniversePtr& r, int depth) {
    if (depth <= 0 || g.pick(3) == 0) {
        if (g.coin()) return r_lit(l, r, true);
        int neg = 1;
        return r_always(l, r, gen_rexpr(g, l, r, 1, neg));
    }
    switch (g.pick(3)) {
    case 0:
        return r_and(gen_rel_empty_true(g, l, r, depth - 1), gen_rel_empty_true(g, l, r, depth - 1));
    case 1:
        return r_or(gen_rel_empty_true(g, l, r, depth - 1), gen_rel_empty_true(g, l, r, depth - 1));
    default:
        return r_chop(gen_rel_empty_true(g, l, r, depth - 1),
                      gen_rel_empty_true(g, l, r, depth - 1));
    }
}

std::vector<PredPtr> pred_pool(const UniversePtr& u, bool lookback) {
    BoolExprPtr e0 = u->size() ? sp_cmp(*u, CmpOp::Eq, 0, u->domain(0)[0]) : sp_lit(true);
    BoolExprPtr e1 = u->size() ? sp_cmp(*u, CmpOp::Ne, 0, u->domain(0)[0]) : sp_lit(false);
    PredPtr ne = p_nonempty(p_lit(u, true));
    std::vector<PredPtr> out = {
        p_lit(u, true),
        p_lit(u, false),
        p_empty(u),
        p_finite(u),
        p_infinite(u),
        ne,
        p_always(u, e0),
        p_sometime(u, e1),
        p_definitely(u, e0),
        p_possibly(u, e1),
        p_chop(ne, ne),
        p_not(p_chop(ne, ne)),
        p_omega(p_nonempty(p_always(u, e0))),
        p_or(p_empty(u), p_nonempty(p_always(u, e1))),
    };
    if (lookback && u->size()) {
        out.push_back(p_prev_holds(u, e0));
        out.push_back(p_prev(p_always(u, e0)));
        out.push_back(p_stable_var(u, 0));
    }
    return out;
}

std::vector<RelPtr> rel_pool(const UniversePtr& l, const UniversePtr& r, bool lookback) {
    RelPtr eq = cross_eq(l, r);
    RelPtr ne = r_nonempty(r_always(l, r, cross_cmp0(l, r, CmpOp::Ne)));
    std::vector<RelPtr> out = {
        r_lit(l, r, true),
        r_lit(l, r, false),
        eq,
        r_nonempty(eq),
        ne,
        r_and(eq, r_lit(l, r, true)),
        r_or(r_lit(l, r, false), eq),
        r_chop(eq, eq),
        r_not(ne),
        r_proj1(p_nonempty(p_lit(l, true)), r),
        r_proj2(l, p_finite(r)),
    };
    if (lookback && r->size()) {
        out.push_back(r_proj2(l, p_prev_holds(r, sp_cmp(*r, CmpOp::Eq, 0, r->domain(0)[0]))));
    }
    return out;
}

// Every member is true on the empty interval and lookback-free.
std::vector<RelPtr> rel_pool_empty_true(const UniversePtr& l, const UniversePtr& r) {
    RelPtr eq = cross_eq(l, r);
    return {
        r_lit(l, r, true),
        eq,
        r_always(l, r, cross_cmp0(l, r, CmpOp::Le)),
        r_and(eq, r_lit(l, r, true)),
        r_or(r_lit(l, r, false), eq),
        r_chop(eq, eq),
    };
}

enum class Outcome { Vacuous, Held, Broke };

struct LawCtx {
    const LawOptions& opt;
    Carrier car;
    CarrierTables tables;
    CheckLimits lim;
    EvalStats stats;
    Gen gen;
    std::string witness;

    LawCtx(const LawOptions& o, uint64_t seed)
        : opt(o), car{o.horizon, o.open_ended}, tables(car), gen(seed) {
        lim.budget = o.eval_budget;
        lim.jobs = 1;
        lim.minimize = true;
    }

    Verdict vd(const PredPtr& h, const RelPtr& ref) {
        return check_vdash(h, ref, car, lim, &stats);
    }
    Verdict sim(const RelPtr& ref, const PredPtr& g, const PredPtr& h) {
        return check_simulates(ref, g, h, car, lim, &stats);
    }
    Verdict ref2(const PredPtr& g, const PredPtr& h, const RelPtr& ref) {
        return check_ref2(g, h, ref, car, lim, &stats);
    }
    Verdict valid(const PredPtr& a, const PredPtr& b) {
        return check_valid_implication(a, b, car, lim.budget, &stats);
    }
    Verdict splits(const PredPtr& g) { return check_splits(g, car, lim.budget, &stats); }
    Verdict joins(const PredPtr& g) { return check_joins(g, car, lim.budget, &stats); }
    Verdict rjoins(const RelPtr& ref) { return rel_joins(ref, car, lim.budget, &stats); }

    Outcome broke(std::string head, const Verdict& v) {
        if (v.cex) head += "\n" + to_string(*v.cex);
        witness = std::move(head);
        return Outcome::Broke;
    }
};

struct LawDef {
    std::string id;
    bool positive = true;
    std::string notes;
    uint64_t systematic = 0;
    std::function<Outcome(LawCtx&, uint64_t)> body;
};

LawDef law_refl() {
    auto U = make_uni({{"u", 2}, {"v", 2}});
    auto pool = pred_pool(U, true);
    LawDef d;
    d.id = "refl";
    d.notes = "the identity relation simulates any predicate against itself";
    d.systematic = pool.size();
    d.body = [U, pool](LawCtx& c, uint64_t i) {
        PredPtr g;
        if (i < pool.size()) {
            g = pool[i];
        } else {
            int neg = 1;
            g = gen_pred(c.gen, U, c.opt.depth, neg, true);
        }
        Verdict v = c.sim(r_identity(U), g, g);
        if (v.pass) return Outcome::Held;
        return c.broke("g = " + to_string(*g), v);
    };
    return d;
}

LawDef law_trans() {
    auto Ua = make_uni({{"a", 2}});
    auto Ub = make_uni({{"b", 2}});
    auto Uc = make_uni({{"c", 2}});
    auto pool1 = rel_pool(Ua, Ub, false);
    auto pool2 = rel_pool(Ub, Uc, true);
    LawDef d;
    d.id = "trans";
    d.notes = "composed relations simulate whenever both factors do; "
              "the first factor ranges over lookback-free relations";
    d.systematic = pool1.size() * pool2.size();
    d.body = [=](LawCtx& c, uint64_t i) {
        RelPtr R1, R2;
        PredPtr g1, g2, g3;
        if (i < d.systematic) {
            R1 = pool1[i % pool1.size()];
            R2 = pool2[i / pool1.size()];
            g1 = p_lit(Ua, true);
            g2 = p_lit(Ub, true);
            g3 = p_lit(Uc, true);
        } else {
            int n1 = 1, n2 = 1, n3 = 1, n4 = 1, n5 = 1;
            R1 = gen_rel(c.gen, Ua, Ub, 2, n1, false);
            R2 = gen_rel(c.gen, Ub, Uc, 2, n2, true);
            g1 = gen_pred(c.gen, Ua, 2, n3, true);
            g2 = gen_pred(c.gen, Ub, 2, n4, true);
            g3 = gen_pred(c.gen, Uc, 2, n5, true);
        }
        if (!past_free(*R1)) return Outcome::Vacuous;
        if (!c.sim(R1, g1, g2).pass) return Outcome::Vacuous;
        if (!c.sim(R2, g2, g3).pass) return Outcome::Vacuous;
        Verdict v = c.sim(r_compose(R1, R2), g1, g3);
        if (v.pass) return Outcome::Held;
        return c.broke("R1 = " + to_string(*R1) + "\nR2 = " + to_string(*R2) +
                           "\ng1 = " + to_string(*g1) + "\ng2 = " + to_string(*g2) +
                           "\ng3 = " + to_string(*g3),
                       v);
    };
    return d;
}

LawDef law_decomp() {
    auto Y = make_uni({{"a", 2}});
    auto Z = make_uni({{"u", 2}});
    auto poolR = rel_pool(Y, Z, true);
    auto poolH = pred_pool(Z, true);
    LawDef d;
    d.id = "decomp";
    d.notes = "extendability plus forcing of the left predicate yields simulation";
    d.systematic = poolR.size() * poolH.size();
    d.body = [=](LawCtx& c, uint64_t i) {
        RelPtr R;
        PredPtr g, h;
        if (i < d.systematic) {
            R = poolR[i % poolR.size()];
            h = poolH[i / poolR.size()];
            g = p_lit(Y, true);
        } else {
            int n1 = 1, n2 = 1, n3 = 1;
            R = gen_rel(c.gen, Y, Z, 2, n1, true);
            g = gen_pred(c.gen, Y, 2, n2, true);
            h = gen_pred(c.gen, Z, 2, n3, true);
        }
        if (!c.vd(h, R).pass) return Outcome::Vacuous;
        if (!c.ref2(g, h, R).pass) return Outcome::Vacuous;
        Verdict v = c.sim(R, g, h);
        if (v.pass) return Outcome::Held;
        return c.broke("R = " + to_string(*R) + "\ng = " + to_string(*g) +
                           "\nh = " + to_string(*h),
                       v);
    };
    return d;
}

LawDef law_seq_comp() {
    auto Y = make_uni({{"a", 2}});
    auto Z = make_uni({{"u", 2}});
    auto poolR = rel_pool(Y, Z, false);
    auto poolG = pred_pool(Z, true);
    LawDef d;
    d.id = "seq-comp";
    d.notes = "extendability survives sequential composition when the relation joins; "
              "left and right variable sets are disjoint by construction and the "
              "relation ranges over lookback-free terms";
    d.systematic = poolR.size() * poolG.size() * poolG.size();
    d.body = [=](LawCtx& c, uint64_t i) {
        RelPtr R;
        PredPtr g1, g2;
        if (i < d.systematic) {
            R = poolR[i % poolR.size()];
            uint64_t j = i / poolR.size();
            g1 = poolG[j % poolG.size()];
            g2 = poolG[j / poolG.size()];
        } else {
            int n1 = 1, n2 = 1, n3 = 1;
            R = gen_rel(c.gen, Y, Z, 2, n1, false);
            g1 = gen_pred(c.gen, Z, 2, n2, true);
            g2 = gen_pred(c.gen, Z, 2, n3, true);
        }
        if (!past_free(*R)) return Outcome::Vacuous;
        if (!c.rjoins(R).pass) return Outcome::Vacuous;
        if (!c.vd(g1, R).pass) return Outcome::Vacuous;
        if (!c.vd(g2, R).pass) return Outcome::Vacuous;
        Verdict v = c.vd(p_chop(g1, g2), R);
        if (v.pass) return Outcome::Held;
        return c.broke("R = " + to_string(*R) + "\ng1 = " + to_string(*g1) +
                           "\ng2 = " + to_string(*g2),
                       v);
    };
    return d;
}

LawDef law_iteration() {
    auto Y = make_uni({{"a", 2}});
    auto Z = make_uni({{"u", 2}});
    auto poolR = rel_pool_empty_true(Y, Z);
    auto poolG = pred_pool(Z, true);
    LawDef d;
    d.id = "iteration";
    d.notes = "extendability survives finite iteration; beyond joining, the relation "
              "must be lookback-free and extendable over the empty interval, and the "
              "body must reject the empty interval";
    d.systematic = poolR.size() * poolG.size();
    d.body = [=](LawCtx& c, uint64_t i) {
        RelPtr R;
        PredPtr g;
        if (i < d.systematic) {
            R = poolR[i % poolR.size()];
            g = poolG[i / poolR.size()];
        } else {
            int n = 1;
            R = gen_rel_empty_true(c.gen, Y, Z, 2);
            g = gen_pred(c.gen, Z, 2, n, true);
        }
        if (!past_free(*R)) return Outcome::Vacuous;
        if (!c.rjoins(R).pass) return Outcome::Vacuous;
        if (!c.vd(p_empty(Z), R).pass) return Outcome::Vacuous;
        StreamSpace zs(Z, c.car.horizon);
        zs.check_budget(c.lim.budget, "iteration body scan");
        int empty_idx = c.tables.index_of(Interval::empty());
        for (uint64_t k = 0; k < zs.count(); ++k) {
            Stream z = zs.decode(k);
            if (eval_pred_once(g, empty_idx, z, c.tables, &c.stats)) return Outcome::Vacuous;
        }
        if (!c.vd(g, R).pass) return Outcome::Vacuous;
        Verdict v = c.vd(p_omega(g), R);
        if (v.pass) return Outcome::Held;
        return c.broke("R = " + to_string(*R) + "\ng = " + to_string(*g), v);
    };
    return d;
}

LawDef law_weaken() {
    auto Y = make_uni({{"a", 2}});
    auto Z = make_uni({{"u", 2}});
    auto poolR = rel_pool(Y, Z, true);
    auto poolG = pred_pool(Z, true);
    LawDef d;
    d.id = "weaken";
    d.notes = "extendability transfers down implication on the predicate side";
    d.systematic = poolR.size() * poolG.size();
    d.body = [=](LawCtx& c, uint64_t i) {
        RelPtr R;
        PredPtr g1, g2;
        if (i < d.systematic) {
            R = poolR[i % poolR.size()];
            g2 = poolG[i / poolR.size()];
            g1 = p_and(g2, p_finite(Z));
        } else {
            int n1 = 1, n2 = 1, n3 = 1;
            R = gen_rel(c.gen, Y, Z, 2, n1, true);
            g2 = gen_pred(c.gen, Z, 2, n2, true);
            g1 = (i % 2) ? p_and(g2, gen_pred(c.gen, Z, 2, n3, true))
                         : gen_pred(c.gen, Z, 2, n3, true);
        }
        if (!c.valid(g1, g2).pass) return Outcome::Vacuous;
        if (!c.vd(g2, R).pass) return Outcome::Vacuous;
        Verdict v = c.vd(g1, R);
        if (v.pass) return Outcome::Held;
        return c.broke("R = " + to_string(*R) + "\ng1 = " + to_string(*g1) +
                           "\ng2 = " + to_string(*g2),
                       v);
    };
    return d;
}

LawDef law_disjunction() {
    auto Y = make_uni({{"a", 2}});
    auto Z = make_uni({{"u", 2}});
    auto poolR = rel_pool(Y, Z, true);
    LawDef d;
    d.id = "disjunction";
    d.notes = "extendability for both relations gives extendability for their "
              "disjunction; both hypotheses are required (see disjunction-one-sided)";
    d.systematic = poolR.size() * poolR.size();
    d.body = [=](LawCtx& c, uint64_t i) {
        RelPtr R1, R2;
        PredPtr g;
        if (i < d.systematic) {
            R1 = poolR[i % poolR.size()];
            R2 = poolR[i / poolR.size()];
            g = p_lit(Z, true);
        } else {
            int n1 = 1, n2 = 1, n3 = 1;
            R1 = gen_rel(c.gen, Y, Z, 2, n1, true);
            R2 = gen_rel(c.gen, Y, Z, 2, n2, true);
            g = gen_pred(c.gen, Z, 2, n3, true);
        }
        if (!c.vd(g, R1).pass) return Outcome::Vacuous;
        if (!c.vd(g, R2).pass) return Outcome::Vacuous;
        Verdict v = c.vd(g, r_or(R1, R2));
        if (v.pass) return Outcome::Held;
        return c.broke("R1 = " + to_string(*R1) + "\nR2 = " + to_string(*R2) +
                           "\ng = " + to_string(*g),
                       v);
    };
    return d;
}

LawDef law_disjointness(bool conj) {
    auto W = make_uni({{"a", 2}});
    auto X = make_uni({{"b", 2}});
    auto Z = make_uni({{"u", 2}});
    auto Yj = make_joint(W, X);
    auto poolW = rel_pool(W, Z, true);
    auto poolX = rel_pool(X, Z, true);
    LawDef d;
    d.id = conj ? "disjointness-and" : "disjointness-or";
    d.notes = std::string("predicates over a shared right stream combine across "
                          "relations on disjoint left variable sets (") +
              (conj ? "conjunction" : "disjunction") + " of relations)";
    d.systematic = poolW.size() * poolX.size();
    d.body = [=](LawCtx& c, uint64_t i) {
        RelPtr RW, RX;
        PredPtr g1, g2;
        if (i < d.systematic) {
            RW = poolW[i % poolW.size()];
            RX = poolX[i / poolW.size()];
            g1 = p_lit(Z, true);
            g2 = p_lit(Z, true);
        } else {
            int n1 = 1, n2 = 1, n3 = 1, n4 = 1;
            RW = gen_rel(c.gen, W, Z, 2, n1, true);
            RX = gen_rel(c.gen, X, Z, 2, n2, true);
            g1 = gen_pred(c.gen, Z, 2, n3, true);
            g2 = gen_pred(c.gen, Z, 2, n4, true);
        }
        if (!c.vd(g1, RW).pass) return Outcome::Vacuous;
        if (!c.vd(g2, RX).pass) return Outcome::Vacuous;
        RelPtr RWj = rebase_rel_left(RW, Yj, {0});
        RelPtr RXj = rebase_rel_left(RX, Yj, {1});
        RelPtr R = conj ? r_and(RWj, RXj) : r_or(RWj, RXj);
        Verdict v = c.vd(p_and(g1, g2), R);
        if (v.pass) return Outcome::Held;
        return c.broke("RW = " + to_string(*RW) + "\nRX = " + to_string(*RX) +
                           "\ng1 = " + to_string(*g1) + "\ng2 = " + to_string(*g2),
                       v);
    };
    return d;
}

LawDef law_splits_chop() {
    auto U = make_uni({{"u", 2}, {"v", 2}});
    auto pool = pred_pool(U, true);
    LawDef d;
    d.id = "splits-chop";
    d.notes = "a splitting predicate implies the chop of any two weakenings of itself";
    d.systematic = pool.size();
    d.body = [=](LawCtx& c, uint64_t i) {
        PredPtr g, g1, g2;
        if (i < d.systematic) {
            g = pool[i];
            g1 = g;
            g2 = g;
        } else {
            int n1 = 1, n2 = 1, n3 = 1;
            g = gen_pred(c.gen, U, c.opt.depth, n1, true);
            g1 = p_or(g, gen_pred(c.gen, U, 2, n2, true));
            g2 = p_or(g, gen_pred(c.gen, U, 2, n3, true));
        }
        if (!c.splits(g).pass) return Outcome::Vacuous;
        if (!c.valid(g, g1).pass) return Outcome::Vacuous;
        if (!c.valid(g, g2).pass) return Outcome::Vacuous;
        Verdict v = c.valid(g, p_chop(g1, g2));
        if (v.pass) return Outcome::Held;
        return c.broke("g = " + to_string(*g) + "\ng1 = " + to_string(*g1) +
                           "\ng2 = " + to_string(*g2),
                       v);
    };
    return d;
}

LawDef law_joins_chop() {
    auto U = make_uni({{"u", 2}, {"v", 2}});
    auto pool = pred_pool(U, true);
    LawDef d;
    d.id = "joins-chop";
    d.notes = "a joining predicate distributes out of a chop of conjunctions";
    d.systematic = pool.size();
    d.body = [=](LawCtx& c, uint64_t i) {
        PredPtr g, g1, g2;
        if (i < d.systematic) {
            g = pool[i];
            g1 = p_lit(U, true);
            g2 = p_lit(U, true);
        } else {
            int n1 = 1, n2 = 1, n3 = 1;
            g = gen_pred(c.gen, U, c.opt.depth, n1, true);
            g1 = gen_pred(c.gen, U, 2, n2, true);
            g2 = gen_pred(c.gen, U, 2, n3, true);
        }
        if (!c.joins(g).pass) return Outcome::Vacuous;
        Verdict v = c.valid(p_chop(p_and(g, g1), p_and(g, g2)), p_and(g, p_chop(g1, g2)));
        if (v.pass) return Outcome::Held;
        return c.broke("g = " + to_string(*g) + "\ng1 = " + to_string(*g1) +
                           "\ng2 = " + to_string(*g2),
                       v);
    };
    return d;
}

LawDef law_splits_omega() {
    auto U = make_uni({{"u", 2}, {"v", 2}});
    auto pool = pred_pool(U, true);
    LawDef d;
    d.id = "splits-omega";
    d.notes = "a splitting predicate implies its own iteration";
    d.systematic = pool.size();
    d.body = [=](LawCtx& c, uint64_t i) {
        PredPtr g;
        if (i < d.systematic) {
            g = pool[i];
        } else {
            int n = 1;
            g = gen_pred(c.gen, U, c.opt.depth, n, true);
        }
        if (!c.splits(g).pass) return Outcome::Vacuous;
        Verdict v = c.valid(g, p_omega(g));
        if (v.pass) return Outcome::Held;
        return c.broke("g = " + to_string(*g), v);
    };
    return d;
}

LawDef law_chop_units() {
    auto U = make_uni({{"u", 2}, {"v", 2}});
    auto pool = pred_pool(U, true);
    LawDef d;
    d.id = "chop-units";
    d.notes = "the empty predicate is a two-sided unit for chop";
    d.systematic = pool.size();
    d.body = [=](LawCtx& c, uint64_t i) {
        PredPtr g;
        if (i < d.systematic) {
            g = pool[i];
        } else {
            int n = 1;
            g = gen_pred(c.gen, U, c.opt.depth, n, true);
        }
        PredPtr lu = p_chop(p_empty(U), g);
        PredPtr ru = p_chop(g, p_empty(U));
        const char* names[4] = {"(empty;g) ==> g", "g ==> (empty;g)", "(g;empty) ==> g",
                                "g ==> (g;empty)"};
        PredPtr lhs[4] = {lu, g, ru, g};
        PredPtr rhs[4] = {g, lu, g, ru};
        for (int k = 0; k < 4; ++k) {
            Verdict v = c.valid(lhs[k], rhs[k]);
            if (!v.pass)
                return c.broke("g = " + to_string(*g) + "\ndirection: " + names[k], v);
        }
        return Outcome::Held;
    };
    return d;
}

LawDef law_stability() {
    auto U = make_uni({{"u", 2}, {"v", 3}});
    Value i0 = Value::integer(0), i1 = Value::integer(1), i2 = Value::integer(2);
    std::vector<BoolExprPtr> cs = {
        sp_cmp(*U, CmpOp::Eq, 0, i0),
        sp_cmp(*U, CmpOp::Eq, 1, i1),
        sp_and(sp_cmp(*U, CmpOp::Eq, 0, i0), sp_cmp(*U, CmpOp::Ne, 1, i1)),
        sp_or(sp_cmp(*U, CmpOp::Eq, 0, i1), sp_cmp(*U, CmpOp::Eq, 1, i2)),
        sp_not(sp_cmp(*U, CmpOp::Le, 1, i0)),
        sp_lit(true),
    };
    LawDef d;
    d.id = "stability";
    d.notes = "where all but one variable is stable, the apparent-state modalities "
              "agree with the pointwise ones";
    d.systematic = cs.size() * 2;
    d.body = [=](LawCtx& c, uint64_t i) {
        BoolExprPtr cc;
        int w;
        if (i < d.systematic) {
            cc = cs[i / 2];
            w = static_cast<int>(i % 2);
        } else {
            int n = 1;
            cc = gen_sp(c.gen, U, c.opt.depth, n);
            w = static_cast<int>(c.gen.pick(2));
        }
        PredPtr hyp = p_stable_var(U, 1 - w);
        PredPtr pd = p_definitely(U, cc);
        PredPtr pa = p_always(U, cc);
        PredPtr pp = p_possibly(U, cc);
        PredPtr ps = p_sometime(U, cc);
        StreamSpace zs(U, c.car.horizon);
        zs.check_budget(c.lim.budget, "stability scan");
        bool any = false;
        for (uint64_t k = 0; k < zs.count(); ++k) {
            Stream z = zs.decode(k);
            PredEval ev(c.tables, z);
            for (int idx = 0; idx < c.tables.count(); ++idx) {
                if (!ev.eval_idx(hyp, idx)) continue;
                any = true;
                bool bad = ev.eval_idx(pd, idx) != ev.eval_idx(pa, idx) ||
                           ev.eval_idx(pp, idx) != ev.eval_idx(ps, idx);
                if (bad) {
                    c.stats.merge(ev.stats());
                    c.witness = "c = " + to_string(*cc, *U) + "\nvarying " + U->name(w) +
                                ", stable " + U->name(1 - w) + "\nstream " + to_string(z) +
                                "\ninterval " + to_string(c.tables.intervals()[idx]);
                    return Outcome::Broke;
                }
            }
            c.stats.merge(ev.stats());
        }
        return any ? Outcome::Held : Outcome::Vacuous;
    };
    return d;
}

// Shared scan: first stream/interval where probe holds (nonempty intervals only).
bool probe_holds(LawCtx& c, const UniversePtr& U, const PredPtr& probe) {
    StreamSpace zs(U, c.car.horizon);
    zs.check_budget(c.lim.budget, "law probe scan");
    for (uint64_t k = 0; k < zs.count(); ++k) {
        Stream z = zs.decode(k);
        PredEval ev(c.tables, z);
        for (int idx = 0; idx < c.tables.count(); ++idx) {
            if (c.tables.intervals()[idx].is_empty()) continue;
            if (ev.eval_idx(probe, idx)) {
                c.stats.merge(ev.stats());
                return true;
            }
        }
        c.stats.merge(ev.stats());
    }
    return false;
}

LawDef law_definitely_always() {
    auto U = make_uni({{"u", 2}, {"v", 3}});
    std::vector<BoolExprPtr> cs = {
        sp_lit(true),
        sp_cmp(*U, CmpOp::Eq, 0, Value::integer(0)),
        sp_cmp(*U, CmpOp::Ne, 1, Value::integer(2)),
        sp_or(sp_cmp(*U, CmpOp::Eq, 0, Value::integer(1)),
              sp_cmp(*U, CmpOp::Le, 1, Value::integer(1))),
    };
    LawDef d;
    d.id = "definitely-always";
    d.notes = "holding over every apparent state implies holding at every point";
    d.systematic = cs.size();
    d.body = [=](LawCtx& c, uint64_t i) {
        BoolExprPtr cc;
        if (i < d.systematic) {
            cc = cs[i];
        } else {
            int n = 1;
            cc = gen_sp(c.gen, U, c.opt.depth, n);
        }
        Verdict v = c.valid(p_definitely(U, cc), p_always(U, cc));
        if (!v.pass) return c.broke("c = " + to_string(*cc, *U), v);
        return probe_holds(c, U, p_definitely(U, cc)) ? Outcome::Held : Outcome::Vacuous;
    };
    return d;
}

LawDef law_sometime_possibly() {
    auto U = make_uni({{"u", 2}, {"v", 3}});
    std::vector<BoolExprPtr> cs = {
        sp_lit(true),
        sp_cmp(*U, CmpOp::Eq, 0, Value::integer(1)),
        sp_cmp(*U, CmpOp::Eq, 1, Value::integer(2)),
        sp_and(sp_cmp(*U, CmpOp::Eq, 0, Value::integer(0)),
               sp_cmp(*U, CmpOp::Ne, 1, Value::integer(0))),
    };
    LawDef d;
    d.id = "sometime-possibly";
    d.notes = "holding at some point implies holding in some apparent state";
    d.systematic = cs.size();
    d.body = [=](LawCtx& c, uint64_t i) {
        BoolExprPtr cc;
        if (i < d.systematic) {
            cc = cs[i];
        } else {
            int n = 1;
            cc = gen_sp(c.gen, U, c.opt.depth, n);
        }
        Verdict v = c.valid(p_sometime(U, cc), p_possibly(U, cc));
        if (!v.pass) return c.broke("c = " + to_string(*cc, *U), v);
        return probe_holds(c, U, p_sometime(U, cc)) ? Outcome::Held : Outcome::Vacuous;
    };
    return d;
}

LawDef law_soundness() {
    LawDef d;
    d.id = "soundness";
    d.notes = "forward simulation implies observation containment";
    d.systematic = 0;
    d.body = [](LawCtx& c, uint64_t i) {
        int mode = static_cast<int>(i % 3);
        int k = 2 + static_cast<int>(c.gen.pick(2));
        int nv = 1 + static_cast<int>(c.gen.pick(2));
        auto O = make_uni({{"m", k}});
        auto CV = nv == 1 ? make_uni({{"x", 2}}) : make_uni({{"x", 2}, {"y", 2}});
        auto AV = nv == 1 ? make_uni({{"p", 2}}) : make_uni({{"p", 2}, {"q", 2}});
        SystemSpec C, A;
        C.name = "c";
        C.obs = O;
        C.vars = CV;
        C.joint = make_joint(CV, O);
        A.name = "a";
        A.obs = O;
        A.vars = AV;
        A.joint = make_joint(AV, O);
        int n = 1;
        C.init = p_nonempty(p_always(C.joint, gen_sp(c.gen, C.joint, 2, n)));
        std::vector<int> jmap, vmap;
        for (int j = 0; j < C.joint->size(); ++j) jmap.push_back(j);
        for (int j = 0; j < CV->size(); ++j) vmap.push_back(j);
        int nops = 1 + static_cast<int>(c.gen.pick(2));
        for (int j = 0; j < nops; ++j) {
            int n2 = 1;
            C.ops.emplace_back("op" + std::to_string(j), gen_pred(c.gen, CV, 2, n2, true));
        }
        int n3 = 1;
        C.final_rel = gen_rexpr(c.gen, CV, O, 2, n3);
        RelPtr R;
        if (mode == 1) {
            // independent abstract side: forward simulation rarely passes, but
            // when it does, containment must still follow
            int n4 = 1, n5 = 1;
            A.init = p_nonempty(p_always(A.joint, gen_sp(c.gen, A.joint, 2, n4)));
            for (int j = 0; j < nops; ++j) {
                int n6 = 1;
                A.ops.emplace_back(C.ops[static_cast<size_t>(j)].first,
                                   gen_pred(c.gen, AV, 2, n6, true));
            }
            A.final_rel = gen_rexpr(c.gen, AV, O, 2, n5);
            R = gen_rel(c.gen, AV, CV, 2, n4, true);
        } else {
            // mirrored abstract side, optionally weakened
            bool weaken = mode == 0;
            int n4 = 1;
            PredPtr ai = rebase_pred(C.init, A.joint, jmap);
            A.init = weaken
                         ? p_or(ai, p_nonempty(p_always(A.joint, gen_sp(c.gen, A.joint, 1, n4))))
                         : ai;
            for (int j = 0; j < nops; ++j) {
                int n6 = 1;
                PredPtr ao = rebase_pred(C.ops[static_cast<size_t>(j)].second, AV, vmap);
                A.ops.emplace_back(C.ops[static_cast<size_t>(j)].first,
                                   weaken ? p_or(ao, gen_pred(c.gen, AV, 1, n6, false)) : ao);
            }
            int n5 = 1;
            A.final_rel = weaken ? sp_or(C.final_rel, gen_rexpr(c.gen, AV, O, 1, n5))
                                  : C.final_rel;
            R = cross_eq(AV, CV);
        }
        Verdict fs = check_forward_simulation(A, C, R, c.car, c.lim, &c.stats);
        if (!fs.pass) return Outcome::Vacuous;
        Verdict dr = check_data_refinement(A, C, c.car, c.lim, &c.stats);
        if (dr.pass) return Outcome::Held;
        return c.broke("R = " + to_string(*R) + "\nabstract init = " + to_string(*A.init) +
                           "\nconcrete init = " + to_string(*C.init),
                       dr);
    };
    return d;
}

LawDef law_seq_comp_no_joins() {
    auto Y = make_uni({{"a", 2}});
    auto Z = make_uni({{"u", 2}});
    RelPtr hardR =
        r_not(r_chop(r_nonempty(r_lit(Y, Z, true)), r_nonempty(r_lit(Y, Z, true))));
    PredPtr hardG =
        p_not(p_chop(p_nonempty(p_lit(Z, true)), p_nonempty(p_lit(Z, true))));
    LawDef d;
    d.id = "seq-comp-no-joins";
    d.positive = false;
    d.notes = "dropping the joining side condition breaks sequential composition";
    d.systematic = 1;
    d.body = [=](LawCtx& c, uint64_t i) {
        RelPtr R;
        PredPtr g1, g2;
        if (i == 0) {
            R = hardR;
            g1 = hardG;
            g2 = hardG;
        } else {
            int n1 = 1, n2 = 1, n3 = 1;
            R = gen_rel(c.gen, Y, Z, 2, n1, false);
            g1 = gen_pred(c.gen, Z, 2, n2, true);
            g2 = gen_pred(c.gen, Z, 2, n3, true);
        }
        if (!past_free(*R)) return Outcome::Vacuous;
        if (!c.vd(g1, R).pass || !c.vd(g2, R).pass) return Outcome::Vacuous;
        if (c.rjoins(R).pass) return Outcome::Vacuous;
        Verdict v = c.vd(p_chop(g1, g2), R);
        if (v.pass) return Outcome::Held;
        return c.broke("R = " + to_string(*R) + " (does not join)\ng1 = " + to_string(*g1) +
                           "\ng2 = " + to_string(*g2),
                       v);
    };
    return d;
}

LawDef law_always_definitely() {
    auto U = make_uni({{"u", 2}, {"v", 2}});
    BoolExprPtr hard = sp_cmp_vars(*U, CmpOp::Eq, 0, 1);
    LawDef d;
    d.id = "always-definitely";
    d.positive = false;
    d.notes = "holding at every point does not extend to every apparent state";
    d.systematic = 1;
    d.body = [=](LawCtx& c, uint64_t i) {
        BoolExprPtr cc;
        if (i == 0) {
            cc = hard;
        } else {
            int n = 1;
            cc = gen_sp(c.gen, U, c.opt.depth, n);
        }
        Verdict v = c.valid(p_always(U, cc), p_definitely(U, cc));
        if (v.pass) return Outcome::Held;
        return c.broke("c = " + to_string(*cc, *U), v);
    };
    return d;
}

LawDef law_possibly_sometime() {
    auto U = make_uni({{"u", 2}, {"v", 2}});
    BoolExprPtr hard = sp_cmp_vars(*U, CmpOp::Lt, 0, 1);
    LawDef d;
    d.id = "possibly-sometime";
    d.positive = false;
    d.notes = "an apparent state can satisfy a predicate that no point satisfies";
    d.systematic = 1;
    d.body = [=](LawCtx& c, uint64_t i) {
        BoolExprPtr cc;
        if (i == 0) {
            cc = hard;
        } else {
            int n = 1;
            cc = gen_sp(c.gen, U, c.opt.depth, n);
        }
        Verdict v = c.valid(p_possibly(U, cc), p_sometime(U, cc));
        if (v.pass) return Outcome::Held;
        return c.broke("c = " + to_string(*cc, *U), v);
    };
    return d;
}

LawDef law_ref_weaken() {
    auto Y = make_uni({{"a", 2}});
    auto Z = make_uni({{"u", 2}});
    RelPtr hardR = cross_eq(Y, Z);
    RelPtr hardR2 = r_nonempty(r_always(Y, Z, cross_cmp0(Y, Z, CmpOp::Ne)));
    PredPtr hardG = p_prev_holds(Y, sp_cmp(*Y, CmpOp::Eq, 0, Value::integer(0)));
    PredPtr hardH = p_prev_holds(Z, sp_cmp(*Z, CmpOp::Eq, 0, Value::integer(0)));
    LawDef d;
    d.id = "ref-weaken";
    d.positive = false;
    d.notes = "weakening the relation does not preserve simulation";
    d.systematic = 1;
    d.body = [=](LawCtx& c, uint64_t i) {
        RelPtr R, R2;
        PredPtr g, h;
        if (i == 0) {
            R = hardR;
            R2 = hardR2;
            g = hardG;
            h = hardH;
        } else {
            int n1 = 1, n2 = 1, n3 = 1, n4 = 1;
            R = gen_rel(c.gen, Y, Z, 2, n1, true);
            R2 = gen_rel(c.gen, Y, Z, 2, n2, true);
            g = gen_pred(c.gen, Y, 2, n3, true);
            h = gen_pred(c.gen, Z, 2, n4, true);
        }
        if (!c.sim(R, g, h).pass) return Outcome::Vacuous;
        Verdict v = c.sim(r_or(R, R2), g, h);
        if (v.pass) return Outcome::Held;
        return c.broke("R = " + to_string(*R) + "\nweakened to R \\/ R' with R' = " +
                           to_string(*R2) + "\ng = " + to_string(*g) + "\nh = " + to_string(*h),
                       v);
    };
    return d;
}

LawDef law_disjunction_one_sided() {
    auto Y = make_uni({{"a", 2}});
    auto Z = make_uni({{"u", 2}});
    RelPtr hardR1 = r_lit(Y, Z, false);
    RelPtr hardR2 = r_nonempty(r_always(Y, Z, cross_cmp0(Y, Z, CmpOp::Ne)));
    LawDef d;
    d.id = "disjunction-one-sided";
    d.positive = false;
    d.notes = "one hypothesis alone does not give extendability for a disjunction";
    d.systematic = 1;
    d.body = [=](LawCtx& c, uint64_t i) {
        RelPtr R1, R2;
        PredPtr g;
        if (i == 0) {
            R1 = hardR1;
            R2 = hardR2;
            g = p_lit(Z, true);
        } else {
            int n1 = 1, n2 = 1, n3 = 1;
            R1 = gen_rel(c.gen, Y, Z, 2, n1, true);
            R2 = gen_rel(c.gen, Y, Z, 2, n2, true);
            g = gen_pred(c.gen, Z, 2, n3, true);
        }
        bool one_sided = c.vd(g, R1).pass || c.vd(g, R2).pass;
        if (!one_sided) return Outcome::Vacuous;
        Verdict v = c.vd(g, r_or(R1, R2));
        if (v.pass) return Outcome::Held;
        return c.broke("R1 = " + to_string(*R1) + "\nR2 = " + to_string(*R2) +
                           "\ng = " + to_string(*g),
                       v);
    };
    return d;
}

std::vector<LawDef> build_catalog() {
    std::vector<LawDef> out;
    out.push_back(law_refl());
    out.push_back(law_trans());
    out.push_back(law_decomp());
    out.push_back(law_seq_comp());
    out.push_back(law_iteration());
    out.push_back(law_weaken());
    out.push_back(law_disjunction());
    out.push_back(law_disjointness(true));
    out.push_back(law_disjointness(false));
    out.push_back(law_splits_chop());
    out.push_back(law_joins_chop());
    out.push_back(law_splits_omega());
    out.push_back(law_chop_units());
    out.push_back(law_stability());
    out.push_back(law_definitely_always());
    out.push_back(law_sometime_possibly());
    out.push_back(law_soundness());
    out.push_back(law_seq_comp_no_joins());
    out.push_back(law_always_definitely());
    out.push_back(law_possibly_sometime());
    out.push_back(law_ref_weaken());
    out.push_back(law_disjunction_one_sided());
    return out;
}

LawResult run_law_def(const LawDef& d, const LawOptions& opt) {
    LawResult r;
    r.law = d.id;
    r.polarity = d.positive ? "holds" : "fails";
    r.notes = d.notes;
    auto t0 = Clock::now();
    uint64_t idh = 1469598103934665603ULL; // FNV-1a, stable across toolchains
    for (unsigned char ch : d.id) idh = (idh ^ ch) * 1099511628211ULL;
    LawCtx ctx(opt, opt.seed ^ idh);
    uint64_t planned = d.systematic + opt.random_instances;
    bool complete = true;
    for (uint64_t i = 0; i < planned; ++i) {
        if (r.instances >= opt.instance_budget) {
            complete = false;
            break;
        }
        Outcome o;
        try {
            o = d.body(ctx, i);
        } catch (const Error& e) {
            if (e.kind == Error::Kind::Budget) {
                complete = false;
                break;
            }
            throw;
        }
        ++r.instances;
        if (o != Outcome::Vacuous) ++r.non_vacuous;
        if (o == Outcome::Broke) {
            ++r.failures;
            r.witness = ctx.witness;
            break;
        }
    }
    if (r.failures > 0) {
        r.status = d.positive ? "fail" : "pass";
    } else if (!complete) {
        r.status = "inconclusive";
    } else {
        r.status = d.positive ? (r.non_vacuous > 0 ? "pass" : "inconclusive") : "fail";
    }
    if (ctx.stats.prev_on_empty > 0) {
        if (!r.notes.empty()) r.notes += "; ";
        r.notes += "lookback was evaluated on the empty interval " +
                   std::to_string(ctx.stats.prev_on_empty) +
                   " times (every interval counts as preceding it)";
    }
    r.runtime_ms =
        std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(Clock::now() - t0)
            .count();
    return r;
}

} // namespace

std::vector<std::string> law_ids() {
    std::vector<std::string> out;
    for (const auto& d : build_catalog()) out.push_back(d.id);
    return out;
}

bool is_law_id(const std::string& id) {
    for (const auto& d : build_catalog())
        if (d.id == id) return true;
    return false;
}

LawResult run_law(const std::string& id, const LawOptions& opt) {
    for (const auto& d : build_catalog())
        if (d.id == id) return run_law_def(d, opt);
    throw Error(Error::Kind::Resolve, "unknown law: " + id);
}

std::vector<LawResult> run_laws(const LawOptions& opt) {
    auto defs = build_catalog();
    std::vector<LawResult> out(defs.size());
    int jobs = std::max(1, opt.jobs);
    if (jobs < 2) {
        for (size_t i = 0; i < defs.size(); ++i) out[i] = run_law_def(defs[i], opt);
        return out;
    }
    std::atomic<size_t> next{0};
    std::mutex mu;
    std::exception_ptr error;
    auto worker = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= defs.size()) return;
            try {
                out[i] = run_law_def(defs[i], opt);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!error) error = std::current_exception();
                next.store(defs.size());
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min<int>(jobs, static_cast<int>(defs.size())); ++t)
        pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return out;
}

} // namespace ivdl
