#include "core/rel.hpp"

#include <utility>

namespace ivdl {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw Error(Error::Kind::Resolve, msg);
}

bool same_uni(const UniversePtr& x, const UniversePtr& y) {
    return x == y || (x && y && *x == *y);
}

RelPtr mk(RelTerm t) { return std::make_shared<const RelTerm>(std::move(t)); }

void require_pair(const RelPtr& a, const RelPtr& b, const char* what) {
    require(a && b, std::string(what) + " needs two sub-relations");
    require(same_uni(a->left, b->left) && same_uni(a->right, b->right),
            std::string(what) + " over mismatched universes");
}

} // namespace

RelPtr r_lit(UniversePtr left, UniversePtr right, bool b) {
    require(left && right, "relation literal needs both universes");
    RelTerm t;
    t.kind = RelTerm::Kind::Lit;
    t.lit = b;
    t.left = std::move(left);
    t.right = std::move(right);
    return mk(std::move(t));
}

RelPtr r_always(UniversePtr left, UniversePtr right, BoolExprPtr sr) {
    require(left && right && sr, "always needs a state relation");
    for (int v : free_vars(*sr, 0))
        require(v >= 0 && v < left->size(), "left variable out of range");
    for (int v : free_vars(*sr, 1))
        require(v >= 0 && v < right->size(), "right variable out of range");
    RelTerm t;
    t.kind = RelTerm::Kind::AlwaysRel;
    t.sr = std::move(sr);
    t.left = std::move(left);
    t.right = std::move(right);
    return mk(std::move(t));
}

RelPtr r_nonempty(RelPtr a) {
    require(static_cast<bool>(a), "nonempty needs a sub-relation");
    RelTerm t;
    t.kind = RelTerm::Kind::NonEmptyRel;
    t.left = a->left;
    t.right = a->right;
    t.a = std::move(a);
    return mk(std::move(t));
}

RelPtr r_and(RelPtr a, RelPtr b) {
    require_pair(a, b, "conjunction");
    RelTerm t;
    t.kind = RelTerm::Kind::And;
    t.left = a->left;
    t.right = a->right;
    t.a = std::move(a);
    t.b = std::move(b);
    return mk(std::move(t));
}

RelPtr r_or(RelPtr a, RelPtr b) {
    require_pair(a, b, "disjunction");
    RelTerm t;
    t.kind = RelTerm::Kind::Or;
    t.left = a->left;
    t.right = a->right;
    t.a = std::move(a);
    t.b = std::move(b);
    return mk(std::move(t));
}

RelPtr r_not(RelPtr a) {
    require(static_cast<bool>(a), "negation needs a sub-relation");
    RelTerm t;
    t.kind = RelTerm::Kind::Not;
    t.left = a->left;
    t.right = a->right;
    t.a = std::move(a);
    return mk(std::move(t));
}

RelPtr r_chop(RelPtr a, RelPtr b) {
    require_pair(a, b, "chop");
    RelTerm t;
    t.kind = RelTerm::Kind::Chop;
    t.left = a->left;
    t.right = a->right;
    t.a = std::move(a);
    t.b = std::move(b);
    return mk(std::move(t));
}

RelPtr r_compose(RelPtr a, RelPtr b) {
    require(a && b, "composition needs two sub-relations");
    require(same_uni(a->right, b->left), "composition universes do not meet");
    RelTerm t;
    t.kind = RelTerm::Kind::Compose;
    t.left = a->left;
    t.right = b->right;
    t.mid = a->right;
    t.a = std::move(a);
    t.b = std::move(b);
    return mk(std::move(t));
}

RelPtr r_proj1(PredPtr g, UniversePtr right) {
    require(g && g->uni && right, "left projection needs a predicate and a right universe");
    RelTerm t;
    t.kind = RelTerm::Kind::Proj1;
    t.left = g->uni;
    t.right = std::move(right);
    t.pred = std::move(g);
    return mk(std::move(t));
}

RelPtr r_proj2(UniversePtr left, PredPtr g) {
    require(g && g->uni && left, "right projection needs a predicate and a left universe");
    RelTerm t;
    t.kind = RelTerm::Kind::Proj2;
    t.left = std::move(left);
    t.right = g->uni;
    t.pred = std::move(g);
    return mk(std::move(t));
}

RelPtr r_identity(UniversePtr u) {
    require(static_cast<bool>(u), "identity needs a universe");
    BoolExprPtr e = sp_lit(true);
    for (int v = 0; v < u->size(); ++v) {
        CmpOperand l, r;
        l.side = 0;
        l.var = v;
        r.side = 1;
        r.var = v;
        BoolExprPtr eq = rel_cmp(*u, *u, BoolExpr::CmpOp::Eq, l, r);
        e = v == 0 ? eq : sp_and(std::move(e), std::move(eq));
    }
    return r_always(u, u, std::move(e));
}

std::string to_string(const RelTerm& t) {
    using K = RelTerm::Kind;
    switch (t.kind) {
    case K::Lit:
        return t.lit ? "true" : "false";
    case K::AlwaysRel:
        return "always(" + to_string(*t.sr, *t.left, t.right.get()) + ")";
    case K::NonEmptyRel:
        return "nonempty(" + to_string(*t.a) + ")";
    case K::And:
        return "(" + to_string(*t.a) + " /\\ " + to_string(*t.b) + ")";
    case K::Or:
        return "(" + to_string(*t.a) + " \\/ " + to_string(*t.b) + ")";
    case K::Not:
        return "!(" + to_string(*t.a) + ")";
    case K::Chop:
        return "(" + to_string(*t.a) + " ; " + to_string(*t.b) + ")";
    case K::Compose:
        return "compose(" + to_string(*t.a) + ", " + to_string(*t.b) + ")";
    case K::Proj1:
        return "left(" + to_string(*t.pred) + ")";
    case K::Proj2:
        return "right(" + to_string(*t.pred) + ")";
    }
    return "?";
}

bool past_free(const RelTerm& t) {
    using K = RelTerm::Kind;
    switch (t.kind) {
    case K::Lit:
    case K::AlwaysRel:
        return true;
    case K::NonEmptyRel:
    case K::Not:
        return past_free(*t.a);
    case K::And:
    case K::Or:
    case K::Chop:
    case K::Compose:
        return past_free(*t.a) && past_free(*t.b);
    case K::Proj1:
    case K::Proj2:
        return past_free(*t.pred);
    }
    return false;
}

namespace {

// Maps variable indices on one side of a boolean expression.
BoolExprPtr rebase_expr(const BoolExpr& e, const std::vector<int>& varmap, int side) {
    switch (e.kind) {
    case BoolExpr::Kind::Lit:
        return sp_lit(e.lit);
    case BoolExpr::Kind::Cmp: {
        BoolExpr out = e;
        if (!out.lhs.is_const && out.lhs.side == side) out.lhs.var = varmap.at(out.lhs.var);
        if (!out.rhs.is_const && out.rhs.side == side) out.rhs.var = varmap.at(out.rhs.var);
        return std::make_shared<const BoolExpr>(std::move(out));
    }
    case BoolExpr::Kind::And:
        return sp_and(rebase_expr(*e.a, varmap, side), rebase_expr(*e.b, varmap, side));
    case BoolExpr::Kind::Or:
        return sp_or(rebase_expr(*e.a, varmap, side), rebase_expr(*e.b, varmap, side));
    case BoolExpr::Kind::Not:
        return sp_not(rebase_expr(*e.a, varmap, side));
    case BoolExpr::Kind::Iff:
        return sp_iff(rebase_expr(*e.a, varmap, side), rebase_expr(*e.b, varmap, side));
    }
    throw Error(Error::Kind::Internal, "unhandled expression kind");
}

void validate_varmap(const VarUniverse& source, const VarUniverse& target,
                     const std::vector<int>& varmap) {
    require(static_cast<int>(varmap.size()) == source.size(),
            "variable map does not cover the source universe");
    for (int v = 0; v < source.size(); ++v) {
        int w = varmap[v];
        require(w >= 0 && w < target.size(), "variable map target out of range");
        require(source.domain(v) == target.domain(w),
                "variable map changes the domain of " + source.name(v));
    }
}

} // namespace

PredPtr rebase_pred(const PredPtr& t, UniversePtr target, const std::vector<int>& varmap) {
    require(t && t->uni && target, "rebase needs a predicate and a target universe");
    validate_varmap(*t->uni, *target, varmap);
    using K = PredTerm::Kind;
    switch (t->kind) {
    case K::Lit:
        return p_lit(target, t->lit);
    case K::Always:
        return p_always(target, rebase_expr(*t->sp, varmap, 0));
    case K::Sometime:
        return p_sometime(target, rebase_expr(*t->sp, varmap, 0));
    case K::Definitely:
        return p_definitely(target, rebase_expr(*t->sp, varmap, 0));
    case K::Possibly:
        return p_possibly(target, rebase_expr(*t->sp, varmap, 0));
    case K::Empty:
        return p_empty(target);
    case K::Finite:
        return p_finite(target);
    case K::Infinite:
        return p_infinite(target);
    case K::NonEmpty:
        return p_nonempty(rebase_pred(t->a, target, varmap));
    case K::And:
        return p_and(rebase_pred(t->a, target, varmap), rebase_pred(t->b, target, varmap));
    case K::Or:
        return p_or(rebase_pred(t->a, target, varmap), rebase_pred(t->b, target, varmap));
    case K::Not:
        return p_not(rebase_pred(t->a, target, varmap));
    case K::Chop:
        return p_chop(rebase_pred(t->a, target, varmap), rebase_pred(t->b, target, varmap));
    case K::Omega:
        return p_omega(rebase_pred(t->a, target, varmap));
    case K::Prev:
        return p_prev(rebase_pred(t->a, target, varmap));
    case K::PrevHolds:
        return p_prev_holds(target, rebase_expr(*t->sp, varmap, 0));
    case K::StableVar:
        return p_stable_var(target, varmap.at(t->var));
    case K::StableSet: {
        std::vector<int> mapped;
        mapped.reserve(t->vars.size());
        for (int v : t->vars) mapped.push_back(varmap.at(v));
        return p_stable_set(target, std::move(mapped));
    }
    }
    throw Error(Error::Kind::Internal, "unhandled predicate kind");
}

RelPtr rebase_rel_left(const RelPtr& t, UniversePtr target, const std::vector<int>& varmap) {
    require(t && t->left && target, "rebase needs a relation and a target universe");
    validate_varmap(*t->left, *target, varmap);
    using K = RelTerm::Kind;
    switch (t->kind) {
    case K::Lit:
        return r_lit(target, t->right, t->lit);
    case K::AlwaysRel:
        return r_always(target, t->right, rebase_expr(*t->sr, varmap, 0));
    case K::NonEmptyRel:
        return r_nonempty(rebase_rel_left(t->a, target, varmap));
    case K::And:
        return r_and(rebase_rel_left(t->a, target, varmap), rebase_rel_left(t->b, target, varmap));
    case K::Or:
        return r_or(rebase_rel_left(t->a, target, varmap), rebase_rel_left(t->b, target, varmap));
    case K::Not:
        return r_not(rebase_rel_left(t->a, target, varmap));
    case K::Chop:
        return r_chop(rebase_rel_left(t->a, target, varmap), rebase_rel_left(t->b, target, varmap));
    case K::Compose:
        return r_compose(rebase_rel_left(t->a, target, varmap), t->b);
    case K::Proj1:
        return r_proj1(rebase_pred(t->pred, target, varmap), t->right);
    case K::Proj2:
        return r_proj2(target, t->pred);
    }
    throw Error(Error::Kind::Internal, "unhandled relation kind");
}

RelEval::RelEval(const CarrierTables& tables, const Stream& left, const Stream& right,
                 uint64_t compose_budget)
    : tables_(tables), left_(left), right_(right), compose_budget_(compose_budget) {
    if (left.horizon != tables.carrier().horizon || right.horizon != tables.carrier().horizon)
        throw Error(Error::Kind::Internal, "stream horizon does not match the carrier");
}

bool RelEval::eval_idx(const RelPtr& t, int idx) {
    auto& row0 = memo_[t.get()];
    if (row0.empty()) row0.assign(tables_.count(), -1);
    if (row0[idx] >= 0) return row0[idx] != 0;
    bool v = compute(*t, idx);
    auto& row = memo_[t.get()];
    if (row[idx] < 0) row[idx] = v ? 1 : 0;
    return v;
}

bool RelEval::compute(const RelTerm& t, int idx) {
    using K = RelTerm::Kind;
    switch (t.kind) {
    case K::Lit:
        return t.lit;
    case K::AlwaysRel: {
        if (tables_.classify(idx) == IntervalClass::Empty) return true;
        const Interval& iv = tables_.intervals()[idx];
        for (int p = iv.lo; p <= iv.hi; ++p)
            if (!eval_rel_at(*t.sr, left_, right_, p)) return false;
        return true;
    }
    case K::NonEmptyRel:
        return tables_.classify(idx) != IntervalClass::Empty && eval_idx(t.a, idx);
    case K::And:
        return eval_idx(t.a, idx) && eval_idx(t.b, idx);
    case K::Or:
        return eval_idx(t.a, idx) || eval_idx(t.b, idx);
    case K::Not:
        return !eval_idx(t.a, idx);
    case K::Chop: {
        for (auto [i1, i2] : tables_.splits(idx))
            if (eval_idx(t.a, i1) && eval_idx(t.b, i2)) return true;
        return tables_.classify(idx) == IntervalClass::Infinite && eval_idx(t.a, idx);
    }
    case K::Compose: {
        StreamSpace mids(t.mid, tables_.carrier().horizon);
        mids.check_budget(compose_budget_, "composition intermediate streams");
        for (uint64_t i = 0; i < mids.count(); ++i) {
            Stream w = mids.decode(i);
            RelEval ea(tables_, left_, w, compose_budget_);
            RelEval eb(tables_, w, right_, compose_budget_);
            bool hit = ea.eval_idx(t.a, idx) && eb.eval_idx(t.b, idx);
            stats_.merge(ea.stats());
            stats_.merge(eb.stats());
            if (hit) return true;
        }
        return false;
    }
    case K::Proj1:
        if (!pleft_) pleft_ = std::make_unique<PredEval>(tables_, left_);
        return pleft_->eval_idx(t.pred, idx);
    case K::Proj2:
        if (!pright_) pright_ = std::make_unique<PredEval>(tables_, right_);
        return pright_->eval_idx(t.pred, idx);
    }
    throw Error(Error::Kind::Internal, "unhandled relation kind");
}

EvalStats RelEval::stats() const {
    EvalStats s = stats_;
    if (pleft_) s.merge(pleft_->stats());
    if (pright_) s.merge(pright_->stats());
    return s;
}

bool eval_rel_once(const RelPtr& t, int idx, const Stream& left, const Stream& right,
                   const CarrierTables& tables, uint64_t compose_budget, EvalStats* stats) {
    using K = RelTerm::Kind;
    switch (t->kind) {
    case K::Lit:
        return t->lit;
    case K::AlwaysRel: {
        if (tables.classify(idx) == IntervalClass::Empty) return true;
        const Interval& iv = tables.intervals()[idx];
        for (int p = iv.lo; p <= iv.hi; ++p)
            if (!eval_rel_at(*t->sr, left, right, p)) return false;
        return true;
    }
    case K::NonEmptyRel:
        return tables.classify(idx) != IntervalClass::Empty &&
               eval_rel_once(t->a, idx, left, right, tables, compose_budget, stats);
    case K::And:
        return eval_rel_once(t->a, idx, left, right, tables, compose_budget, stats) &&
               eval_rel_once(t->b, idx, left, right, tables, compose_budget, stats);
    case K::Or:
        return eval_rel_once(t->a, idx, left, right, tables, compose_budget, stats) ||
               eval_rel_once(t->b, idx, left, right, tables, compose_budget, stats);
    case K::Not:
        return !eval_rel_once(t->a, idx, left, right, tables, compose_budget, stats);
    case K::Chop: {
        for (auto [i1, i2] : tables.splits(idx))
            if (eval_rel_once(t->a, i1, left, right, tables, compose_budget, stats) &&
                eval_rel_once(t->b, i2, left, right, tables, compose_budget, stats))
                return true;
        return tables.classify(idx) == IntervalClass::Infinite &&
               eval_rel_once(t->a, idx, left, right, tables, compose_budget, stats);
    }
    case K::Compose: {
        StreamSpace mids(t->mid, tables.carrier().horizon);
        mids.check_budget(compose_budget, "composition intermediate streams");
        for (uint64_t i = 0; i < mids.count(); ++i) {
            Stream w = mids.decode(i);
            if (eval_rel_once(t->a, idx, left, w, tables, compose_budget, stats) &&
                eval_rel_once(t->b, idx, w, right, tables, compose_budget, stats))
                return true;
        }
        return false;
    }
    case K::Proj1:
        return eval_pred_once(t->pred, idx, left, tables, stats);
    case K::Proj2:
        return eval_pred_once(t->pred, idx, right, tables, stats);
    }
    throw Error(Error::Kind::Internal, "unhandled relation kind");
}

Verdict rel_joins(const RelPtr& t, const Carrier& c, uint64_t budget, EvalStats* stats) {
    require(static_cast<bool>(t), "joins check needs a relation");
    CarrierTables tables(c);
    StreamSpace ys(t->left, c.horizon);
    StreamSpace zs(t->right, c.horizon);
    ys.check_budget(budget, "left streams");
    zs.check_budget(budget, "right streams");
    if (zs.count() != 0 && ys.count() > budget / zs.count())
        throw Error(Error::Kind::Budget, "stream pair space exceeds the budget");

    const int n = tables.count();
    std::vector<int8_t> w(n), o(n);
    for (uint64_t yi = 0; yi < ys.count(); ++yi) {
        Stream y = ys.decode(yi);
        for (uint64_t zi = 0; zi < zs.count(); ++zi) {
            Stream z = zs.decode(zi);
            RelEval ev(tables, y, z, budget);
            for (int i = 0; i < n; ++i) w[i] = ev.eval_idx(t, i) ? 1 : 0;
            if (stats) stats->merge(ev.stats());

            // greatest fixpoint of o = (w ; o) \/ empty over this pair
            std::fill(o.begin(), o.end(), 1);
            bool changed = true;
            while (changed) {
                changed = false;
                for (int i = 0; i < n; ++i) {
                    if (!o[i] || tables.classify(i) == IntervalClass::Empty) continue;
                    bool v = false;
                    for (auto [i1, i2] : tables.splits(i))
                        if (w[i1] && o[i2]) { v = true; break; }
                    if (!v && tables.classify(i) == IntervalClass::Infinite && w[i]) v = true;
                    if (!v) {
                        o[i] = 0;
                        changed = true;
                    }
                }
            }

            // one chop step over the fixpoint must land back inside w
            for (int i = 0; i < n; ++i) {
                if (w[i]) continue;
                bool chop = false;
                for (auto [i1, i2] : tables.splits(i))
                    if (w[i1] && o[i2]) { chop = true; break; }
                if (!chop && tables.classify(i) == IntervalClass::Infinite && w[i]) chop = true;
                if (chop) {
                    Counterexample cex;
                    cex.clause = "rel-joins";
                    cex.carrier = c;
                    cex.streams = {{"y", y}, {"z", z}};
                    cex.intervals = {{"delta", tables.intervals()[i]}};
                    return Verdict::fail(std::move(cex));
                }
            }
        }
    }
    return Verdict::ok();
}

} // namespace ivdl
