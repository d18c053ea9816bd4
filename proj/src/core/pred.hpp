#pragma once

#include <memory>
#include <unordered_map>
#include <vector>

#include "core/interval.hpp"
#include "core/state.hpp"
#include "core/verdict.hpp"

namespace ivdl {

// Interval predicate terms.  A term is evaluated against an interval and a
// stream over the term's universe; connectives lift pointwise, the modal
// operators quantify over points, apparent states, splits or preceding
// intervals of the interval.
struct PredTerm;
using PredPtr = std::shared_ptr<const PredTerm>;

struct PredTerm {
    enum class Kind {
        Lit,       // constant
        Always,    // state predicate at every point; true on empty
        Sometime,  // state predicate at some point; false on empty
        Definitely,// state predicate in every apparent state; true on empty
        Possibly,  // state predicate in some apparent state; false on empty
        Empty,     // the interval is empty
        Finite,    // the interval is empty or bounded
        Infinite,  // the interval is unbounded (open carriers only)
        NonEmpty,  // subterm holds and the interval is nonempty
        And,
        Or,
        Not,
        Chop,      // some adjoining split satisfies (a, b); an infinite
                   // interval may instead satisfy a whole
        Omega,     // greatest solution of  z = (a ; z) or empty
        Prev,      // subterm holds on some interval adjoining from the left
        PrevHolds, // state predicate held throughout some nonempty left-adjoining interval
        StableVar, // variable kept its PrevHolds value at every point
        StableSet, // StableVar for every member; true for the empty set
    };

    Kind kind;
    bool lit = false;
    BoolExprPtr sp;        // Always / Sometime / Definitely / Possibly / PrevHolds
    PredPtr a, b;          // subterms
    int var = -1;          // StableVar
    std::vector<int> vars; // StableSet
    UniversePtr uni;
};

PredPtr p_lit(UniversePtr u, bool b);
PredPtr p_always(UniversePtr u, BoolExprPtr c);
PredPtr p_sometime(UniversePtr u, BoolExprPtr c);
PredPtr p_definitely(UniversePtr u, BoolExprPtr c);
PredPtr p_possibly(UniversePtr u, BoolExprPtr c);
PredPtr p_empty(UniversePtr u);
PredPtr p_finite(UniversePtr u);
PredPtr p_infinite(UniversePtr u);
PredPtr p_nonempty(PredPtr a);
PredPtr p_and(PredPtr a, PredPtr b);
PredPtr p_or(PredPtr a, PredPtr b);
PredPtr p_not(PredPtr a);
PredPtr p_chop(PredPtr a, PredPtr b);
PredPtr p_omega(PredPtr a);
PredPtr p_prev(PredPtr a);
PredPtr p_prev_holds(UniversePtr u, BoolExprPtr c);
PredPtr p_stable_var(UniversePtr u, int var);
PredPtr p_stable_set(UniversePtr u, std::vector<int> vars);

// Guards of compiled programs: the guard may be read while other variables
// move, so it is checked against apparent states.
PredPtr normalize_guard(UniversePtr u, BoolExprPtr c);

bool term_equal(const PredPtr& a, const PredPtr& b);
std::string to_string(const PredTerm& t);

// True when evaluation on an interval never consults points outside it:
// the term contains no Prev, PrevHolds, StableVar or StableSet.
bool past_free(const PredTerm& t);

struct EvalStats {
    int max_omega_iters = 0;
    uint64_t prev_on_empty = 0; // lookback evaluated on the empty interval

    void merge(const EvalStats& o) {
        if (o.max_omega_iters > max_omega_iters) max_omega_iters = o.max_omega_iters;
        prev_on_empty += o.prev_on_empty;
    }
};

// Memoizing evaluator for one stream.  Results are cached per (term node,
// interval index); Omega terms cache their whole fixpoint vector.
class PredEval {
public:
    PredEval(const CarrierTables& tables, const Stream& s);

    bool eval(const PredPtr& t, const Interval& iv) { return eval_idx(t, tables_.index_of(iv)); }
    bool eval_idx(const PredPtr& t, int idx);

    const EvalStats& stats() const { return stats_; }

private:
    const CarrierTables& tables_;
    const Stream& s_;
    std::unordered_map<const PredTerm*, std::vector<int8_t>> memo_;
    EvalStats stats_;

    bool compute(const PredTerm& t, int idx);
    const std::vector<int8_t>& omega_vector(const PredTerm& t);
    bool state_pred_forall(const BoolExpr& c, const Interval& iv);
    bool state_pred_exists(const BoolExpr& c, const Interval& iv);
    bool apparent_forall(const BoolExpr& c, const Interval& iv);
    bool apparent_exists(const BoolExpr& c, const Interval& iv);
    bool stable_var(int var, int idx);
};

// One-shot recursive evaluation without a memo table; cheaper than a session
// when each (term, interval) pair is consulted once, as in candidate scans.
bool eval_pred_once(const PredPtr& t, int idx, const Stream& s, const CarrierTables& tables,
                    EvalStats* stats = nullptr);

// Exhaustive validity of g1 => g2 over every (stream, interval) of the
// universe within the carrier.  The witness is the first counterexample in
// (stream index, interval index) order.
Verdict check_valid_implication(const PredPtr& g1, const PredPtr& g2, const Carrier& c,
                                uint64_t budget, EvalStats* stats = nullptr);

// Whether g may always be cut: g => (g ; g) everywhere.
Verdict check_splits(const PredPtr& g, const Carrier& c, uint64_t budget, EvalStats* stats = nullptr);

// Whether adjoining g-pieces always merge: (g ; g^omega) => g everywhere.
Verdict check_joins(const PredPtr& g, const Carrier& c, uint64_t budget, EvalStats* stats = nullptr);

} // namespace ivdl
