#include "core/pred.hpp"

#include <algorithm>

namespace ivdl {

namespace {

PredPtr mk(PredTerm t) { return std::make_shared<PredTerm>(std::move(t)); }

UniversePtr require_same(const PredPtr& a, const PredPtr& b) {
    if (!(a->uni == b->uni || *a->uni == *b->uni))
        throw Error(Error::Kind::Resolve, "subterms built over different universes");
    return a->uni;
}

void require_vars(const UniversePtr& u, const BoolExprPtr& c) {
    for (int v : free_vars(*c))
        if (v < 0 || v >= u->size())
            throw Error(Error::Kind::Resolve, "state predicate references a variable outside the universe");
}

PredPtr state_term(PredTerm::Kind k, UniversePtr u, BoolExprPtr c) {
    require_vars(u, c);
    PredTerm t;
    t.kind = k;
    t.sp = std::move(c);
    t.uni = std::move(u);
    return mk(std::move(t));
}

PredPtr nullary(PredTerm::Kind k, UniversePtr u) {
    PredTerm t;
    t.kind = k;
    t.uni = std::move(u);
    return mk(std::move(t));
}

PredPtr unary(PredTerm::Kind k, PredPtr a) {
    PredTerm t;
    t.kind = k;
    t.uni = a->uni;
    t.a = std::move(a);
    return mk(std::move(t));
}

PredPtr binary(PredTerm::Kind k, PredPtr a, PredPtr b) {
    PredTerm t;
    t.kind = k;
    t.uni = require_same(a, b);
    t.a = std::move(a);
    t.b = std::move(b);
    return mk(std::move(t));
}

} // namespace

PredPtr p_lit(UniversePtr u, bool b) {
    PredTerm t;
    t.kind = PredTerm::Kind::Lit;
    t.lit = b;
    t.uni = std::move(u);
    return mk(std::move(t));
}

PredPtr p_always(UniversePtr u, BoolExprPtr c) { return state_term(PredTerm::Kind::Always, std::move(u), std::move(c)); }
PredPtr p_sometime(UniversePtr u, BoolExprPtr c) { return state_term(PredTerm::Kind::Sometime, std::move(u), std::move(c)); }
PredPtr p_definitely(UniversePtr u, BoolExprPtr c) { return state_term(PredTerm::Kind::Definitely, std::move(u), std::move(c)); }
PredPtr p_possibly(UniversePtr u, BoolExprPtr c) { return state_term(PredTerm::Kind::Possibly, std::move(u), std::move(c)); }
PredPtr p_empty(UniversePtr u) { return nullary(PredTerm::Kind::Empty, std::move(u)); }
PredPtr p_finite(UniversePtr u) { return nullary(PredTerm::Kind::Finite, std::move(u)); }
PredPtr p_infinite(UniversePtr u) { return nullary(PredTerm::Kind::Infinite, std::move(u)); }
PredPtr p_nonempty(PredPtr a) { return unary(PredTerm::Kind::NonEmpty, std::move(a)); }
PredPtr p_and(PredPtr a, PredPtr b) { return binary(PredTerm::Kind::And, std::move(a), std::move(b)); }
PredPtr p_or(PredPtr a, PredPtr b) { return binary(PredTerm::Kind::Or, std::move(a), std::move(b)); }
PredPtr p_not(PredPtr a) { return unary(PredTerm::Kind::Not, std::move(a)); }
PredPtr p_chop(PredPtr a, PredPtr b) { return binary(PredTerm::Kind::Chop, std::move(a), std::move(b)); }
PredPtr p_omega(PredPtr a) { return unary(PredTerm::Kind::Omega, std::move(a)); }
PredPtr p_prev(PredPtr a) { return unary(PredTerm::Kind::Prev, std::move(a)); }
PredPtr p_prev_holds(UniversePtr u, BoolExprPtr c) { return state_term(PredTerm::Kind::PrevHolds, std::move(u), std::move(c)); }

PredPtr p_stable_var(UniversePtr u, int var) {
    if (var < 0 || var >= u->size())
        throw Error(Error::Kind::Resolve, "stable: variable outside the universe");
    PredTerm t;
    t.kind = PredTerm::Kind::StableVar;
    t.var = var;
    t.uni = std::move(u);
    return mk(std::move(t));
}

PredPtr p_stable_set(UniversePtr u, std::vector<int> vars) {
    for (int v : vars)
        if (v < 0 || v >= u->size())
            throw Error(Error::Kind::Resolve, "stable: variable outside the universe");
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    PredTerm t;
    t.kind = PredTerm::Kind::StableSet;
    t.vars = std::move(vars);
    t.uni = std::move(u);
    return mk(std::move(t));
}

PredPtr normalize_guard(UniversePtr u, BoolExprPtr c) { return p_possibly(std::move(u), std::move(c)); }

namespace {
bool expr_equal(const BoolExprPtr& a, const BoolExprPtr& b) {
    if (!a || !b) return !a && !b;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
    case BoolExpr::Kind::Lit: return a->lit == b->lit;
    case BoolExpr::Kind::Cmp: {
        auto same = [](const CmpOperand& x, const CmpOperand& y) {
            if (x.is_const != y.is_const) return false;
            if (x.is_const) return x.pos == y.pos;
            return x.side == y.side && x.var == y.var;
        };
        return a->op == b->op && same(a->lhs, b->lhs) && same(a->rhs, b->rhs);
    }
    default: return expr_equal(a->a, b->a) && expr_equal(a->b, b->b);
    }
}
} // namespace

bool term_equal(const PredPtr& a, const PredPtr& b) {
    if (!a || !b) return !a && !b;
    if (a->kind != b->kind || a->lit != b->lit || a->var != b->var || a->vars != b->vars) return false;
    if (!expr_equal(a->sp, b->sp)) return false;
    return term_equal(a->a, b->a) && term_equal(a->b, b->b);
}

std::string to_string(const PredTerm& t) {
    const VarUniverse& u = *t.uni;
    switch (t.kind) {
    case PredTerm::Kind::Lit: return t.lit ? "true" : "false";
    case PredTerm::Kind::Always: return "always(" + to_string(*t.sp, u) + ")";
    case PredTerm::Kind::Sometime: return "sometime(" + to_string(*t.sp, u) + ")";
    case PredTerm::Kind::Definitely: return "definitely(" + to_string(*t.sp, u) + ")";
    case PredTerm::Kind::Possibly: return "possibly(" + to_string(*t.sp, u) + ")";
    case PredTerm::Kind::Empty: return "empty";
    case PredTerm::Kind::Finite: return "finite";
    case PredTerm::Kind::Infinite: return "infinite";
    case PredTerm::Kind::NonEmpty: return "nonempty(" + to_string(*t.a) + ")";
    case PredTerm::Kind::And: return "(" + to_string(*t.a) + " /\\ " + to_string(*t.b) + ")";
    case PredTerm::Kind::Or: return "(" + to_string(*t.a) + " \\/ " + to_string(*t.b) + ")";
    case PredTerm::Kind::Not: return "!(" + to_string(*t.a) + ")";
    case PredTerm::Kind::Chop: return "(" + to_string(*t.a) + " ; " + to_string(*t.b) + ")";
    case PredTerm::Kind::Omega: return "omega(" + to_string(*t.a) + ")";
    case PredTerm::Kind::Prev: return "prev(" + to_string(*t.a) + ")";
    case PredTerm::Kind::PrevHolds: return "prevholds(" + to_string(*t.sp, u) + ")";
    case PredTerm::Kind::StableVar: return "stable(" + u.name(t.var) + ")";
    case PredTerm::Kind::StableSet: {
        std::string out = "stable(";
        for (size_t i = 0; i < t.vars.size(); ++i) {
            if (i) out += ", ";
            out += u.name(t.vars[i]);
        }
        return out + ")";
    }
    }
    return "?";
}

bool past_free(const PredTerm& t) {
    switch (t.kind) {
    case PredTerm::Kind::Prev:
    case PredTerm::Kind::PrevHolds:
    case PredTerm::Kind::StableVar:
    case PredTerm::Kind::StableSet: return false;
    default:
        if (t.a && !past_free(*t.a)) return false;
        if (t.b && !past_free(*t.b)) return false;
        return true;
    }
}

PredEval::PredEval(const CarrierTables& tables, const Stream& s) : tables_(tables), s_(s) {
    if (s.horizon != tables.carrier().horizon)
        throw Error(Error::Kind::Resolve, "stream horizon does not match the carrier");
}

bool PredEval::eval_idx(const PredPtr& t, int idx) {
    auto& row = memo_[t.get()];
    if (row.empty()) row.assign(tables_.count(), -1);
    int8_t& cell = row[idx];
    if (cell < 0) {
        // Omega fills the whole row at once; recheck after computing.
        bool v = compute(*t, idx);
        if (row[idx] < 0) row[idx] = v ? 1 : 0;
        return row[idx] == 1;
    }
    return cell == 1;
}

bool PredEval::state_pred_forall(const BoolExpr& c, const Interval& iv) {
    for (int t = iv.lo; t <= iv.hi; ++t)
        if (!eval_pred_at(c, s_, t)) return false;
    return true;
}

bool PredEval::state_pred_exists(const BoolExpr& c, const Interval& iv) {
    for (int t = iv.lo; t <= iv.hi; ++t)
        if (eval_pred_at(c, s_, t)) return true;
    return false;
}

namespace {

// Observed domain positions per variable over iv, in domain order.
std::vector<std::vector<uint8_t>> observed_sets(const Stream& s, const Interval& iv) {
    const int n = s.uni->size();
    std::vector<std::vector<uint8_t>> seen(n);
    for (int v = 0; v < n; ++v) {
        std::vector<bool> mark(s.uni->domain_size(v), false);
        for (int t = iv.lo; t <= iv.hi; ++t) mark[s.at(t, v)] = true;
        for (size_t p = 0; p < mark.size(); ++p)
            if (mark[p]) seen[v].push_back(static_cast<uint8_t>(p));
    }
    return seen;
}

template <typename Fn>
bool for_each_apparent(const Stream& s, const Interval& iv, Fn&& fn) {
    // Returns fn's first true result; false when iv is empty (no apparent states).
    if (iv.is_empty()) return false;
    auto seen = observed_sets(s, iv);
    const int n = s.uni->size();
    State cur;
    cur.pos.resize(n);
    std::vector<int> idx(n, 0);
    while (true) {
        for (int v = 0; v < n; ++v) cur.pos[v] = seen[v][idx[v]];
        if (fn(cur)) return true;
        int v = n - 1;
        while (v >= 0) {
            if (++idx[v] < static_cast<int>(seen[v].size())) break;
            idx[v] = 0;
            --v;
        }
        if (v < 0) return false;
    }
}

} // namespace

bool PredEval::apparent_forall(const BoolExpr& c, const Interval& iv) {
    return !for_each_apparent(s_, iv, [&](const State& st) { return !eval_state_pred(c, st); });
}

bool PredEval::apparent_exists(const BoolExpr& c, const Interval& iv) {
    return for_each_apparent(s_, iv, [&](const State& st) { return eval_state_pred(c, st); });
}

namespace {

bool stable_var_on(const CarrierTables& tables, const Stream& s, int var, int idx,
                   EvalStats* stats) {
    const Interval& iv = tables.intervals()[idx];
    if (iv.is_empty() && stats) ++stats->prev_on_empty;
    // A nonempty interval pins the candidate value; the empty interval tries
    // every domain value.
    int k_lo = 0, k_hi = s.uni->domain_size(var) - 1;
    if (!iv.is_empty()) {
        for (int t = iv.lo; t <= iv.hi; ++t)
            if (s.at(t, var) != s.at(iv.lo, var)) return false;
        k_lo = k_hi = s.at(iv.lo, var);
    }
    for (int k = k_lo; k <= k_hi; ++k) {
        for (int p : tables.preceders(idx)) {
            const Interval& pv = tables.intervals()[p];
            if (pv.is_empty()) continue;
            bool all = true;
            for (int t = pv.lo; t <= pv.hi && all; ++t) all = s.at(t, var) == k;
            if (all) return true;
        }
    }
    return false;
}

} // namespace

bool PredEval::stable_var(int var, int idx) { return stable_var_on(tables_, s_, var, idx, &stats_); }

const std::vector<int8_t>& PredEval::omega_vector(const PredTerm& t) {
    std::vector<int8_t> vec(tables_.count(), 1);
    PredPtr body = t.a;
    int changing_sweeps = 0;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int i = 0; i < tables_.count(); ++i) {
            if (!vec[i]) continue;
            bool v = false;
            if (tables_.classify(i) == IntervalClass::Empty) {
                v = true;
            } else {
                for (const auto& [first, second] : tables_.splits(i)) {
                    if (vec[second] && eval_idx(body, first)) {
                        v = true;
                        break;
                    }
                }
                if (!v && tables_.classify(i) == IntervalClass::Infinite && eval_idx(body, i)) v = true;
            }
            if (!v) {
                vec[i] = 0;
                changed = true;
            }
        }
        if (changed) ++changing_sweeps;
    }
    if (changing_sweeps > stats_.max_omega_iters) stats_.max_omega_iters = changing_sweeps;
    auto& row = memo_[&t];
    row = std::move(vec);
    return row;
}

bool PredEval::compute(const PredTerm& t, int idx) {
    const Interval& iv = tables_.intervals()[idx];
    switch (t.kind) {
    case PredTerm::Kind::Lit: return t.lit;
    case PredTerm::Kind::Always: return state_pred_forall(*t.sp, iv);
    case PredTerm::Kind::Sometime: return state_pred_exists(*t.sp, iv);
    case PredTerm::Kind::Definitely: return apparent_forall(*t.sp, iv);
    case PredTerm::Kind::Possibly: return apparent_exists(*t.sp, iv);
    case PredTerm::Kind::Empty: return tables_.classify(idx) == IntervalClass::Empty;
    case PredTerm::Kind::Finite: return tables_.classify(idx) != IntervalClass::Infinite;
    case PredTerm::Kind::Infinite: return tables_.classify(idx) == IntervalClass::Infinite;
    case PredTerm::Kind::NonEmpty:
        return tables_.classify(idx) != IntervalClass::Empty && eval_idx(t.a, idx);
    case PredTerm::Kind::And: return eval_idx(t.a, idx) && eval_idx(t.b, idx);
    case PredTerm::Kind::Or: return eval_idx(t.a, idx) || eval_idx(t.b, idx);
    case PredTerm::Kind::Not: return !eval_idx(t.a, idx);
    case PredTerm::Kind::Chop: {
        for (const auto& [first, second] : tables_.splits(idx))
            if (eval_idx(t.a, first) && eval_idx(t.b, second)) return true;
        return tables_.classify(idx) == IntervalClass::Infinite && eval_idx(t.a, idx);
    }
    case PredTerm::Kind::Omega: return omega_vector(t)[idx] == 1;
    case PredTerm::Kind::Prev: {
        if (tables_.classify(idx) == IntervalClass::Empty) ++stats_.prev_on_empty;
        for (int p : tables_.preceders(idx))
            if (eval_idx(t.a, p)) return true;
        return false;
    }
    case PredTerm::Kind::PrevHolds: {
        if (tables_.classify(idx) == IntervalClass::Empty) ++stats_.prev_on_empty;
        for (int p : tables_.preceders(idx)) {
            const Interval& pv = tables_.intervals()[p];
            if (!pv.is_empty() && state_pred_forall(*t.sp, pv)) return true;
        }
        return false;
    }
    case PredTerm::Kind::StableVar: return stable_var(t.var, idx);
    case PredTerm::Kind::StableSet: {
        for (int v : t.vars)
            if (!stable_var(v, idx)) return false;
        return true;
    }
    }
    return false;
}

bool eval_pred_once(const PredPtr& t, int idx, const Stream& s, const CarrierTables& tables,
                    EvalStats* stats) {
    const Interval& iv = tables.intervals()[idx];
    switch (t->kind) {
    case PredTerm::Kind::Lit: return t->lit;
    case PredTerm::Kind::Always: {
        for (int p = iv.lo; p <= iv.hi; ++p)
            if (!eval_pred_at(*t->sp, s, p)) return false;
        return true;
    }
    case PredTerm::Kind::Sometime: {
        for (int p = iv.lo; p <= iv.hi; ++p)
            if (eval_pred_at(*t->sp, s, p)) return true;
        return false;
    }
    case PredTerm::Kind::Definitely:
        return !for_each_apparent(s, iv, [&](const State& st) { return !eval_state_pred(*t->sp, st); });
    case PredTerm::Kind::Possibly:
        return for_each_apparent(s, iv, [&](const State& st) { return eval_state_pred(*t->sp, st); });
    case PredTerm::Kind::Empty: return tables.classify(idx) == IntervalClass::Empty;
    case PredTerm::Kind::Finite: return tables.classify(idx) != IntervalClass::Infinite;
    case PredTerm::Kind::Infinite: return tables.classify(idx) == IntervalClass::Infinite;
    case PredTerm::Kind::NonEmpty:
        return tables.classify(idx) != IntervalClass::Empty && eval_pred_once(t->a, idx, s, tables, stats);
    case PredTerm::Kind::And:
        return eval_pred_once(t->a, idx, s, tables, stats) && eval_pred_once(t->b, idx, s, tables, stats);
    case PredTerm::Kind::Or:
        return eval_pred_once(t->a, idx, s, tables, stats) || eval_pred_once(t->b, idx, s, tables, stats);
    case PredTerm::Kind::Not: return !eval_pred_once(t->a, idx, s, tables, stats);
    case PredTerm::Kind::Chop: {
        for (const auto& [first, second] : tables.splits(idx))
            if (eval_pred_once(t->a, first, s, tables, stats) &&
                eval_pred_once(t->b, second, s, tables, stats))
                return true;
        return tables.classify(idx) == IntervalClass::Infinite &&
               eval_pred_once(t->a, idx, s, tables, stats);
    }
    case PredTerm::Kind::Omega: {
        // The fixpoint needs the whole-interval table; use a throwaway session.
        PredEval ev(tables, s);
        bool v = ev.eval_idx(t, idx);
        if (stats) stats->merge(ev.stats());
        return v;
    }
    case PredTerm::Kind::Prev: {
        if (tables.classify(idx) == IntervalClass::Empty && stats) ++stats->prev_on_empty;
        for (int p : tables.preceders(idx))
            if (eval_pred_once(t->a, p, s, tables, stats)) return true;
        return false;
    }
    case PredTerm::Kind::PrevHolds: {
        if (tables.classify(idx) == IntervalClass::Empty && stats) ++stats->prev_on_empty;
        for (int p : tables.preceders(idx)) {
            const Interval& pv = tables.intervals()[p];
            if (pv.is_empty()) continue;
            bool all = true;
            for (int q = pv.lo; q <= pv.hi && all; ++q) all = eval_pred_at(*t->sp, s, q);
            if (all) return true;
        }
        return false;
    }
    case PredTerm::Kind::StableVar: return stable_var_on(tables, s, t->var, idx, stats);
    case PredTerm::Kind::StableSet: {
        for (int v : t->vars)
            if (!stable_var_on(tables, s, v, idx, stats)) return false;
        return true;
    }
    }
    return false;
}

namespace {

Verdict valid_impl(const PredPtr& g1, const PredPtr& g2, const std::string& clause, const Carrier& c,
                   uint64_t budget, EvalStats* stats) {
    require_same(g1, g2);
    CarrierTables tables(c);
    StreamSpace space(g1->uni, c.horizon);
    space.check_budget(budget, "implication check over '" + to_string(*g1) + "'");
    for (uint64_t i = 0; i < space.count(); ++i) {
        Stream s = space.decode(i);
        PredEval ev(tables, s);
        for (int idx = 0; idx < tables.count(); ++idx) {
            if (ev.eval_idx(g1, idx) && !ev.eval_idx(g2, idx)) {
                if (stats) stats->merge(ev.stats());
                Counterexample cex;
                cex.clause = clause;
                cex.carrier = c;
                cex.streams.push_back({"s", std::move(s)});
                cex.intervals.push_back({"delta", tables.intervals()[idx]});
                return Verdict::fail(std::move(cex));
            }
        }
        if (stats) stats->merge(ev.stats());
    }
    return Verdict::ok();
}

} // namespace

Verdict check_valid_implication(const PredPtr& g1, const PredPtr& g2, const Carrier& c, uint64_t budget,
                                EvalStats* stats) {
    return valid_impl(g1, g2, "implication", c, budget, stats);
}

Verdict check_splits(const PredPtr& g, const Carrier& c, uint64_t budget, EvalStats* stats) {
    return valid_impl(g, p_chop(g, g), "splits", c, budget, stats);
}

Verdict check_joins(const PredPtr& g, const Carrier& c, uint64_t budget, EvalStats* stats) {
    return valid_impl(p_chop(g, p_omega(g)), g, "joins", c, budget, stats);
}

} // namespace ivdl
