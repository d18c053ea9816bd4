#pragma once

#include <memory>
#include <unordered_map>
#include <vector>

#include "core/interval.hpp"
#include "core/pred.hpp"
#include "core/state.hpp"
#include "core/verdict.hpp"

namespace ivdl {

// Interval relations: evaluated against an interval and a pair of streams
// (left, right) over two universes.  The chop shares one split between both
// streams; composition quantifies a full intermediate stream.
struct RelTerm;
using RelPtr = std::shared_ptr<const RelTerm>;

struct RelTerm {
    enum class Kind {
        Lit,
        AlwaysRel,   // state relation at every point; true on empty
        NonEmptyRel, // subterm holds and the interval is nonempty
        And,
        Or,
        Not,
        Chop,    // one shared split; an infinite interval may satisfy a whole
        Compose, // exists an intermediate stream over mid joining a and b
        Proj1,   // interval predicate on the left stream only
        Proj2,   // interval predicate on the right stream only
    };

    Kind kind;
    bool lit = false;
    BoolExprPtr sr; // AlwaysRel
    RelPtr a, b;
    PredPtr pred;     // Proj1 / Proj2
    UniversePtr left, right;
    UniversePtr mid; // Compose
};

RelPtr r_lit(UniversePtr left, UniversePtr right, bool b);
RelPtr r_always(UniversePtr left, UniversePtr right, BoolExprPtr sr);
RelPtr r_nonempty(RelPtr a);
RelPtr r_and(RelPtr a, RelPtr b);
RelPtr r_or(RelPtr a, RelPtr b);
RelPtr r_not(RelPtr a);
RelPtr r_chop(RelPtr a, RelPtr b);
RelPtr r_compose(RelPtr a, RelPtr b); // a.right must equal b.left; that universe becomes mid
RelPtr r_proj1(PredPtr g, UniversePtr right);
RelPtr r_proj2(UniversePtr left, PredPtr g);

// Pointwise identity: every shared variable equal at every point.  The
// universes must be identical.
RelPtr r_identity(UniversePtr u);

std::string to_string(const RelTerm& t);

bool past_free(const RelTerm& t);

// Rewrites a term onto a larger universe; varmap sends old indices to new.
PredPtr rebase_pred(const PredPtr& t, UniversePtr target, const std::vector<int>& varmap);
// Same for the left universe of a relation term.
RelPtr rebase_rel_left(const RelPtr& t, UniversePtr target, const std::vector<int>& varmap);

// Memoizing evaluator for one (left, right) stream pair.
class RelEval {
public:
    RelEval(const CarrierTables& tables, const Stream& left, const Stream& right,
            uint64_t compose_budget = UINT64_MAX);

    bool eval(const RelPtr& t, const Interval& iv) { return eval_idx(t, tables_.index_of(iv)); }
    bool eval_idx(const RelPtr& t, int idx);

    EvalStats stats() const;

private:
    const CarrierTables& tables_;
    const Stream& left_;
    const Stream& right_;
    uint64_t compose_budget_;
    std::unordered_map<const RelTerm*, std::vector<int8_t>> memo_;
    std::unique_ptr<PredEval> pleft_, pright_;
    EvalStats stats_;

    bool compute(const RelTerm& t, int idx);
};

// One-shot recursive evaluation without a memo table; cheaper than a session
// when each (term, interval) pair is consulted once, as in candidate scans.
bool eval_rel_once(const RelPtr& t, int idx, const Stream& left, const Stream& right,
                   const CarrierTables& tables, uint64_t compose_budget = UINT64_MAX,
                   EvalStats* stats = nullptr);

// Closure under finite partitions: wherever the relation holds piecewise on
// an adjoining decomposition, it must hold on the union.  Checked for every
// stream pair within the budget.
Verdict rel_joins(const RelPtr& t, const Carrier& c, uint64_t budget, EvalStats* stats = nullptr);

} // namespace ivdl
