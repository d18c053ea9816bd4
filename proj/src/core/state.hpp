#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "core/interval.hpp"

namespace ivdl {

// A domain value.  Domains are ordered finite lists; comparisons between
// variables use positions in the domain list, so Value itself only needs
// identity plus a printable form.
struct Value {
    enum class Kind : uint8_t { NegInf, Bool, Int, PosInf } kind = Kind::Int;
    int64_t num = 0; // Bool: 0/1, Int: the value, infinities: unused

    static Value neg_inf() { return {Kind::NegInf, 0}; }
    static Value pos_inf() { return {Kind::PosInf, 0}; }
    static Value boolean(bool b) { return {Kind::Bool, b ? 1 : 0}; }
    static Value integer(int64_t n) { return {Kind::Int, n}; }

    bool operator==(const Value&) const = default;
};

std::string to_string(const Value& v);

// Ordered set of named variables with their domains.  Variable order is the
// declaration order and fixes the layout of State and Stream cells.
class VarUniverse {
public:
    VarUniverse() = default;

    // Returns the new variable's index; domains must be nonempty, names unique.
    int add(std::string name, std::vector<Value> domain);

    int size() const { return static_cast<int>(vars_.size()); }
    const std::string& name(int v) const { return vars_[v].name; }
    const std::vector<Value>& domain(int v) const { return vars_[v].domain; }
    int domain_size(int v) const { return static_cast<int>(vars_[v].domain.size()); }

    // -1 when absent.
    int find(const std::string& name) const;
    // Position of val in v's domain, or nullopt.
    std::optional<int> value_pos(int v, const Value& val) const;

    bool same_domain(int a, int b) const { return vars_[a].domain == vars_[b].domain; }

    bool operator==(const VarUniverse& o) const;

private:
    struct Var {
        std::string name;
        std::vector<Value> domain;
        bool operator==(const Var&) const = default;
    };
    std::vector<Var> vars_;
};

using UniversePtr = std::shared_ptr<const VarUniverse>;

// One observation: a domain-position per variable of a universe.
struct State {
    std::vector<uint8_t> pos;

    bool operator==(const State&) const = default;
    auto operator<=>(const State&) const = default;
};

std::string to_string(const VarUniverse& u, const State& s);

// A stream assigns a state to every carrier point.  Cells are t-major.
struct Stream {
    UniversePtr uni;
    int horizon = 0;
    std::vector<uint8_t> cells; // horizon * uni->size()

    uint8_t at(int t, int v) const { return cells[static_cast<size_t>(t) * uni->size() + v]; }
    uint8_t& at(int t, int v) { return cells[static_cast<size_t>(t) * uni->size() + v]; }
    State state_at(int t) const;
};

std::string to_string(const Stream& s);

// True when the streams agree at every point of iv.  Requires equal
// universes and horizons; holds trivially on the empty interval.
bool matches(const Interval& iv, const Stream& a, const Stream& b);

// Combines streams over disjoint universes into one over the union,
// variables sorted by name.  Throws on overlapping names.
Stream join_streams(const Stream& a, const Stream& b);

// Projects s onto target; every target variable must exist in s's universe
// with an identical domain.
Stream restrict_stream(const Stream& s, const UniversePtr& target);

// States assembled per-variable from values observed anywhere in iv.
// Returns the empty set when iv is empty (even over an empty universe);
// otherwise the product of the per-variable observed value sets, in
// lexicographic order by variable.
std::vector<State> apparent(const Interval& iv, const Stream& s);

class Error : public std::runtime_error {
public:
    enum class Kind { Parse, Resolve, Budget, Internal };
    Error(Kind k, std::string msg) : std::runtime_error(std::move(msg)), kind(k) {}
    Kind kind;
};

// Enumerates all streams (or all states) over a universe in a fixed order:
// index digits are variable-major, time-minor, lowest domain position first.
class StreamSpace {
public:
    StreamSpace(UniversePtr uni, int horizon);

    uint64_t count() const { return count_; }
    // Throws Error::Budget when count exceeds the budget.
    void check_budget(uint64_t budget, const std::string& what) const;

    Stream decode(uint64_t idx) const;
    uint64_t encode(const Stream& s) const;

    const UniversePtr& universe() const { return uni_; }
    int horizon() const { return horizon_; }

private:
    UniversePtr uni_;
    int horizon_;
    uint64_t count_; // saturated at UINT64_MAX on overflow
    bool overflow_ = false;
};

// All states of a universe in lexicographic order (variable-major).
std::vector<State> all_states(const VarUniverse& u);

// Boolean expressions over one universe (predicates) or a pair of
// universes (relations).  Comparison operands are variables or constants
// resolved to domain positions; two variables may be compared only when
// their domains are identical lists.
struct BoolExpr;
using BoolExprPtr = std::shared_ptr<const BoolExpr>;

struct CmpOperand {
    bool is_const = false;
    int side = 0;  // 0 = left/state universe, 1 = right universe
    int var = -1;  // when !is_const
    int pos = -1;  // when is_const: domain position relative to the variable operand
    Value display; // when is_const: original literal, for printing
};

struct BoolExpr {
    enum class Kind { Lit, Cmp, And, Or, Not, Iff } kind = Kind::Lit;
    bool lit = false;
    enum class CmpOp { Eq, Ne, Lt, Le } op = CmpOp::Eq;
    CmpOperand lhs, rhs;
    BoolExprPtr a, b;
};

// Single-universe constructors (side 0 everywhere).
BoolExprPtr sp_lit(bool b);
BoolExprPtr sp_cmp(const VarUniverse& u, BoolExpr::CmpOp op, int var, const Value& c);
BoolExprPtr sp_cmp_vars(const VarUniverse& u, BoolExpr::CmpOp op, int va, int vb);
BoolExprPtr sp_and(BoolExprPtr a, BoolExprPtr b);
BoolExprPtr sp_or(BoolExprPtr a, BoolExprPtr b);
BoolExprPtr sp_not(BoolExprPtr a);
BoolExprPtr sp_iff(BoolExprPtr a, BoolExprPtr b);

// Two-universe comparison; sides pick the universe of each variable operand.
BoolExprPtr rel_cmp(const VarUniverse& lu, const VarUniverse& ru, BoolExpr::CmpOp op,
                    const CmpOperand& lhs, const CmpOperand& rhs);

bool eval_state_pred(const BoolExpr& e, const State& s);
bool eval_state_rel(const BoolExpr& e, const State& left, const State& right);

// Same, reading directly from stream rows at time t (no State copies).
bool eval_pred_at(const BoolExpr& e, const Stream& s, int t);
bool eval_rel_at(const BoolExpr& e, const Stream& left, const Stream& right, int t);

// Variable indices used on the given side, sorted ascending.
std::vector<int> free_vars(const BoolExpr& e, int side = 0);

std::string to_string(const BoolExpr& e, const VarUniverse& left, const VarUniverse* right = nullptr);

} // namespace ivdl
