#include "core/state.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace ivdl {

std::string to_string(const Value& v) {
    switch (v.kind) {
    case Value::Kind::NegInf: return "-inf";
    case Value::Kind::PosInf: return "+inf";
    case Value::Kind::Bool: return v.num ? "true" : "false";
    case Value::Kind::Int: return std::to_string(v.num);
    }
    return "?";
}

int VarUniverse::add(std::string name, std::vector<Value> domain) {
    if (domain.empty()) throw Error(Error::Kind::Resolve, "variable '" + name + "' has an empty domain");
    if (find(name) >= 0) throw Error(Error::Kind::Resolve, "duplicate variable '" + name + "'");
    for (size_t i = 0; i < domain.size(); ++i)
        for (size_t j = i + 1; j < domain.size(); ++j)
            if (domain[i] == domain[j])
                throw Error(Error::Kind::Resolve, "duplicate value in domain of '" + name + "'");
    vars_.push_back({std::move(name), std::move(domain)});
    return size() - 1;
}

int VarUniverse::find(const std::string& name) const {
    for (int i = 0; i < size(); ++i)
        if (vars_[i].name == name) return i;
    return -1;
}

std::optional<int> VarUniverse::value_pos(int v, const Value& val) const {
    const auto& dom = vars_[v].domain;
    for (size_t i = 0; i < dom.size(); ++i)
        if (dom[i] == val) return static_cast<int>(i);
    return std::nullopt;
}

bool VarUniverse::operator==(const VarUniverse& o) const { return vars_ == o.vars_; }

std::string to_string(const VarUniverse& u, const State& s) {
    std::string out = "{";
    for (int v = 0; v < u.size(); ++v) {
        if (v) out += ", ";
        out += u.name(v) + "=" + to_string(u.domain(v)[s.pos[v]]);
    }
    return out + "}";
}

State Stream::state_at(int t) const {
    State st;
    st.pos.assign(cells.begin() + static_cast<size_t>(t) * uni->size(),
                  cells.begin() + static_cast<size_t>(t + 1) * uni->size());
    return st;
}

std::string to_string(const Stream& s) {
    std::string out = "{";
    for (int v = 0; v < s.uni->size(); ++v) {
        if (v) out += ", ";
        out += s.uni->name(v) + ": [";
        for (int t = 0; t < s.horizon; ++t) {
            if (t) out += ", ";
            out += to_string(s.uni->domain(v)[s.at(t, v)]);
        }
        out += "]";
    }
    return out + "}";
}

bool matches(const Interval& iv, const Stream& a, const Stream& b) {
    if (!(*a.uni == *b.uni) || a.horizon != b.horizon)
        throw Error(Error::Kind::Resolve, "matches requires equal universes and horizons");
    if (iv.is_empty()) return true;
    const int n = a.uni->size();
    for (int t = iv.lo; t <= iv.hi; ++t)
        for (int v = 0; v < n; ++v)
            if (a.at(t, v) != b.at(t, v)) return false;
    return true;
}

Stream join_streams(const Stream& a, const Stream& b) {
    if (a.horizon != b.horizon)
        throw Error(Error::Kind::Resolve, "join_streams requires equal horizons");
    // Union universe sorted by name; overlap is an error.
    std::map<std::string, std::pair<const Stream*, int>> sources;
    for (int v = 0; v < a.uni->size(); ++v) sources.emplace(a.uni->name(v), std::make_pair(&a, v));
    for (int v = 0; v < b.uni->size(); ++v) {
        auto [it, fresh] = sources.emplace(b.uni->name(v), std::make_pair(&b, v));
        if (!fresh) throw Error(Error::Kind::Resolve, "join_streams universes overlap on '" + b.uni->name(v) + "'");
    }
    auto uni = std::make_shared<VarUniverse>();
    std::vector<std::pair<const Stream*, int>> order;
    for (const auto& [name, src] : sources) {
        uni->add(name, src.first->uni->domain(src.second));
        order.push_back(src);
    }
    Stream out;
    out.uni = uni;
    out.horizon = a.horizon;
    out.cells.resize(static_cast<size_t>(a.horizon) * uni->size());
    for (int t = 0; t < a.horizon; ++t)
        for (size_t v = 0; v < order.size(); ++v)
            out.at(t, static_cast<int>(v)) = order[v].first->at(t, order[v].second);
    return out;
}

Stream restrict_stream(const Stream& s, const UniversePtr& target) {
    std::vector<int> map(target->size());
    for (int v = 0; v < target->size(); ++v) {
        int src = s.uni->find(target->name(v));
        if (src < 0 || s.uni->domain(src) != target->domain(v))
            throw Error(Error::Kind::Resolve, "restriction target variable '" + target->name(v) + "' not present");
        map[v] = src;
    }
    Stream out;
    out.uni = target;
    out.horizon = s.horizon;
    out.cells.resize(static_cast<size_t>(s.horizon) * target->size());
    for (int t = 0; t < s.horizon; ++t)
        for (int v = 0; v < target->size(); ++v)
            out.at(t, v) = s.at(t, map[v]);
    return out;
}

std::vector<State> apparent(const Interval& iv, const Stream& s) {
    std::vector<State> out;
    if (iv.is_empty()) return out;
    const int n = s.uni->size();
    // Observed positions per variable, kept in domain order.
    std::vector<std::vector<uint8_t>> seen(n);
    for (int v = 0; v < n; ++v) {
        std::vector<bool> mark(s.uni->domain_size(v), false);
        for (int t = iv.lo; t <= iv.hi; ++t) mark[s.at(t, v)] = true;
        for (size_t p = 0; p < mark.size(); ++p)
            if (mark[p]) seen[v].push_back(static_cast<uint8_t>(p));
    }
    State cur;
    cur.pos.resize(n);
    std::vector<int> idx(n, 0);
    while (true) {
        for (int v = 0; v < n; ++v) cur.pos[v] = seen[v][idx[v]];
        out.push_back(cur);
        int v = n - 1;
        while (v >= 0) {
            if (++idx[v] < static_cast<int>(seen[v].size())) break;
            idx[v] = 0;
            --v;
        }
        if (v < 0) break;
    }
    return out;
}

StreamSpace::StreamSpace(UniversePtr uni, int horizon) : uni_(std::move(uni)), horizon_(horizon) {
    count_ = 1;
    for (int v = 0; v < uni_->size(); ++v) {
        for (int t = 0; t < horizon_; ++t) {
            uint64_t d = static_cast<uint64_t>(uni_->domain_size(v));
            if (count_ > UINT64_MAX / d) {
                count_ = UINT64_MAX;
                overflow_ = true;
                return;
            }
            count_ *= d;
        }
    }
}

void StreamSpace::check_budget(uint64_t budget, const std::string& what) const {
    if (overflow_ || count_ > budget)
        throw Error(Error::Kind::Budget,
                    what + " needs " + (overflow_ ? std::string("more than 2^64") : std::to_string(count_)) +
                        " streams, budget is " + std::to_string(budget));
}

Stream StreamSpace::decode(uint64_t idx) const {
    Stream out;
    out.uni = uni_;
    out.horizon = horizon_;
    out.cells.resize(static_cast<size_t>(horizon_) * uni_->size());
    // Variable-major, time-minor digits; the last digit varies fastest.
    for (int v = uni_->size() - 1; v >= 0; --v) {
        uint64_t d = static_cast<uint64_t>(uni_->domain_size(v));
        for (int t = horizon_ - 1; t >= 0; --t) {
            out.at(t, v) = static_cast<uint8_t>(idx % d);
            idx /= d;
        }
    }
    return out;
}

uint64_t StreamSpace::encode(const Stream& s) const {
    uint64_t idx = 0;
    for (int v = 0; v < uni_->size(); ++v) {
        uint64_t d = static_cast<uint64_t>(uni_->domain_size(v));
        for (int t = 0; t < horizon_; ++t) idx = idx * d + s.at(t, v);
    }
    return idx;
}

std::vector<State> all_states(const VarUniverse& u) {
    std::vector<State> out;
    const int n = u.size();
    State cur;
    cur.pos.assign(n, 0);
    while (true) {
        out.push_back(cur);
        int v = n - 1;
        while (v >= 0) {
            if (++cur.pos[v] < u.domain_size(v)) break;
            cur.pos[v] = 0;
            --v;
        }
        if (v < 0) break;
    }
    return out;
}

namespace {

BoolExprPtr mk(BoolExpr e) { return std::make_shared<BoolExpr>(std::move(e)); }

int operand_pos(const CmpOperand& o, const State& left, const State& right) {
    if (o.is_const) return o.pos;
    return (o.side == 0 ? left : right).pos[o.var];
}

bool apply_cmp(BoolExpr::CmpOp op, int a, int b) {
    switch (op) {
    case BoolExpr::CmpOp::Eq: return a == b;
    case BoolExpr::CmpOp::Ne: return a != b;
    case BoolExpr::CmpOp::Lt: return a < b;
    case BoolExpr::CmpOp::Le: return a <= b;
    }
    return false;
}

} // namespace

BoolExprPtr sp_lit(bool b) {
    BoolExpr e;
    e.kind = BoolExpr::Kind::Lit;
    e.lit = b;
    return mk(std::move(e));
}

BoolExprPtr sp_cmp(const VarUniverse& u, BoolExpr::CmpOp op, int var, const Value& c) {
    auto pos = u.value_pos(var, c);
    if (!pos)
        throw Error(Error::Kind::Resolve,
                    "constant " + to_string(c) + " is not in the domain of '" + u.name(var) + "'");
    BoolExpr e;
    e.kind = BoolExpr::Kind::Cmp;
    e.op = op;
    e.lhs = CmpOperand{false, 0, var, -1, {}};
    e.rhs = CmpOperand{true, 0, -1, *pos, c};
    return mk(std::move(e));
}

BoolExprPtr sp_cmp_vars(const VarUniverse& u, BoolExpr::CmpOp op, int va, int vb) {
    if (!u.same_domain(va, vb))
        throw Error(Error::Kind::Resolve,
                    "cannot compare '" + u.name(va) + "' and '" + u.name(vb) + "': different domains");
    BoolExpr e;
    e.kind = BoolExpr::Kind::Cmp;
    e.op = op;
    e.lhs = CmpOperand{false, 0, va, -1, {}};
    e.rhs = CmpOperand{false, 0, vb, -1, {}};
    return mk(std::move(e));
}

BoolExprPtr sp_and(BoolExprPtr a, BoolExprPtr b) {
    BoolExpr e;
    e.kind = BoolExpr::Kind::And;
    e.a = std::move(a);
    e.b = std::move(b);
    return mk(std::move(e));
}

BoolExprPtr sp_or(BoolExprPtr a, BoolExprPtr b) {
    BoolExpr e;
    e.kind = BoolExpr::Kind::Or;
    e.a = std::move(a);
    e.b = std::move(b);
    return mk(std::move(e));
}

BoolExprPtr sp_not(BoolExprPtr a) {
    BoolExpr e;
    e.kind = BoolExpr::Kind::Not;
    e.a = std::move(a);
    return mk(std::move(e));
}

BoolExprPtr sp_iff(BoolExprPtr a, BoolExprPtr b) {
    BoolExpr e;
    e.kind = BoolExpr::Kind::Iff;
    e.a = std::move(a);
    e.b = std::move(b);
    return mk(std::move(e));
}

BoolExprPtr rel_cmp(const VarUniverse& lu, const VarUniverse& ru, BoolExpr::CmpOp op,
                    const CmpOperand& lhs, const CmpOperand& rhs) {
    auto dom_of = [&](const CmpOperand& o) -> const std::vector<Value>* {
        if (o.is_const) return nullptr;
        return &(o.side == 0 ? lu : ru).domain(o.var);
    };
    const auto* dl = dom_of(lhs);
    const auto* dr = dom_of(rhs);
    if (!dl && !dr) throw Error(Error::Kind::Resolve, "comparison needs at least one variable");
    BoolExpr e;
    e.kind = BoolExpr::Kind::Cmp;
    e.op = op;
    e.lhs = lhs;
    e.rhs = rhs;
    if (dl && dr) {
        if (*dl != *dr) throw Error(Error::Kind::Resolve, "cannot compare variables with different domains");
    } else {
        // Resolve the constant against the variable operand's domain.
        const auto* dom = dl ? dl : dr;
        CmpOperand& c = dl ? e.rhs : e.lhs;
        int pos = -1;
        for (size_t i = 0; i < dom->size(); ++i)
            if ((*dom)[i] == c.display) pos = static_cast<int>(i);
        if (pos < 0)
            throw Error(Error::Kind::Resolve,
                        "constant " + to_string(c.display) + " is not in the compared variable's domain");
        c.pos = pos;
    }
    return mk(std::move(e));
}

bool eval_state_rel(const BoolExpr& e, const State& left, const State& right) {
    switch (e.kind) {
    case BoolExpr::Kind::Lit: return e.lit;
    case BoolExpr::Kind::Cmp:
        return apply_cmp(e.op, operand_pos(e.lhs, left, right), operand_pos(e.rhs, left, right));
    case BoolExpr::Kind::And: return eval_state_rel(*e.a, left, right) && eval_state_rel(*e.b, left, right);
    case BoolExpr::Kind::Or: return eval_state_rel(*e.a, left, right) || eval_state_rel(*e.b, left, right);
    case BoolExpr::Kind::Not: return !eval_state_rel(*e.a, left, right);
    case BoolExpr::Kind::Iff: return eval_state_rel(*e.a, left, right) == eval_state_rel(*e.b, left, right);
    }
    return false;
}

bool eval_state_pred(const BoolExpr& e, const State& s) { return eval_state_rel(e, s, s); }

namespace {
int operand_row_pos(const CmpOperand& o, const Stream& left, const Stream& right, int t) {
    if (o.is_const) return o.pos;
    return (o.side == 0 ? left : right).at(t, o.var);
}
} // namespace

bool eval_rel_at(const BoolExpr& e, const Stream& left, const Stream& right, int t) {
    switch (e.kind) {
    case BoolExpr::Kind::Lit: return e.lit;
    case BoolExpr::Kind::Cmp:
        return apply_cmp(e.op, operand_row_pos(e.lhs, left, right, t), operand_row_pos(e.rhs, left, right, t));
    case BoolExpr::Kind::And: return eval_rel_at(*e.a, left, right, t) && eval_rel_at(*e.b, left, right, t);
    case BoolExpr::Kind::Or: return eval_rel_at(*e.a, left, right, t) || eval_rel_at(*e.b, left, right, t);
    case BoolExpr::Kind::Not: return !eval_rel_at(*e.a, left, right, t);
    case BoolExpr::Kind::Iff: return eval_rel_at(*e.a, left, right, t) == eval_rel_at(*e.b, left, right, t);
    }
    return false;
}

bool eval_pred_at(const BoolExpr& e, const Stream& s, int t) { return eval_rel_at(e, s, s, t); }

namespace {
void collect_vars(const BoolExpr& e, int side, std::vector<int>& out) {
    switch (e.kind) {
    case BoolExpr::Kind::Lit: return;
    case BoolExpr::Kind::Cmp:
        if (!e.lhs.is_const && e.lhs.side == side) out.push_back(e.lhs.var);
        if (!e.rhs.is_const && e.rhs.side == side) out.push_back(e.rhs.var);
        return;
    default:
        if (e.a) collect_vars(*e.a, side, out);
        if (e.b) collect_vars(*e.b, side, out);
    }
}
} // namespace

std::vector<int> free_vars(const BoolExpr& e, int side) {
    std::vector<int> out;
    collect_vars(e, side, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {
std::string operand_str(const CmpOperand& o, const VarUniverse& left, const VarUniverse* right) {
    if (o.is_const) return to_string(o.display);
    const VarUniverse& u = o.side == 0 ? left : *right;
    if (right) return (o.side == 0 ? "left." : "right.") + u.name(o.var);
    return u.name(o.var);
}
} // namespace

std::string to_string(const BoolExpr& e, const VarUniverse& left, const VarUniverse* right) {
    switch (e.kind) {
    case BoolExpr::Kind::Lit: return e.lit ? "true" : "false";
    case BoolExpr::Kind::Cmp: {
        const char* op = e.op == BoolExpr::CmpOp::Eq   ? " = "
                         : e.op == BoolExpr::CmpOp::Ne ? " != "
                         : e.op == BoolExpr::CmpOp::Lt ? " < "
                                                       : " <= ";
        return operand_str(e.lhs, left, right) + op + operand_str(e.rhs, left, right);
    }
    case BoolExpr::Kind::And:
        return "(" + to_string(*e.a, left, right) + " /\\ " + to_string(*e.b, left, right) + ")";
    case BoolExpr::Kind::Or:
        return "(" + to_string(*e.a, left, right) + " \\/ " + to_string(*e.b, left, right) + ")";
    case BoolExpr::Kind::Not: return "!(" + to_string(*e.a, left, right) + ")";
    case BoolExpr::Kind::Iff:
        return "(" + to_string(*e.a, left, right) + " <-> " + to_string(*e.b, left, right) + ")";
    }
    return "?";
}

} // namespace ivdl
