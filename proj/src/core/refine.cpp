#include "core/refine.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>
#include <tuple>
#include <unordered_map>

#include "core/parallel.hpp"

namespace ivdl {

namespace {

constexpr uint64_t kChunk = 256; // scan chunk; has no effect on results

void require(bool cond, const std::string& msg) {
    if (!cond) throw Error(Error::Kind::Resolve, msg);
}

bool same_uni(const UniversePtr& x, const UniversePtr& y) {
    return x == y || (x && y && *x == *y);
}

bool apply_cmp(BoolExpr::CmpOp op, int l, int r) {
    switch (op) {
    case BoolExpr::CmpOp::Eq: return l == r;
    case BoolExpr::CmpOp::Ne: return l != r;
    case BoolExpr::CmpOp::Lt: return l < r;
    case BoolExpr::CmpOp::Le: return l <= r;
    }
    return false;
}

int state_index(const VarUniverse& u, const State& st) {
    int idx = 0;
    for (int v = 0; v < u.size(); ++v) idx = idx * u.domain_size(v) + st.pos[v];
    return idx;
}

} // namespace

UniversePtr make_joint(const UniversePtr& vars, const UniversePtr& obs) {
    auto j = std::make_shared<VarUniverse>();
    for (int v = 0; v < vars->size(); ++v) j->add(vars->name(v), vars->domain(v));
    for (int v = 0; v < obs->size(); ++v) j->add(obs->name(v), obs->domain(v));
    return j;
}

namespace {

BoolExprPtr subst_expr(const BoolExpr& e, int nvars, const UniversePtr& obs, const State& rho) {
    switch (e.kind) {
    case BoolExpr::Kind::Lit:
        return sp_lit(e.lit);
    case BoolExpr::Kind::Cmp: {
        BoolExpr out = e;
        auto subst = [&](CmpOperand& op) {
            if (op.is_const || op.var < nvars) return;
            int o = op.var - nvars;
            op.is_const = true;
            op.pos = rho.pos[o];
            op.display = obs->domain(o)[rho.pos[o]];
            op.var = -1;
        };
        subst(out.lhs);
        subst(out.rhs);
        if (out.lhs.is_const && out.rhs.is_const)
            return sp_lit(apply_cmp(out.op, out.lhs.pos, out.rhs.pos));
        return std::make_shared<const BoolExpr>(std::move(out));
    }
    case BoolExpr::Kind::And:
        return sp_and(subst_expr(*e.a, nvars, obs, rho), subst_expr(*e.b, nvars, obs, rho));
    case BoolExpr::Kind::Or:
        return sp_or(subst_expr(*e.a, nvars, obs, rho), subst_expr(*e.b, nvars, obs, rho));
    case BoolExpr::Kind::Not:
        return sp_not(subst_expr(*e.a, nvars, obs, rho));
    case BoolExpr::Kind::Iff:
        return sp_iff(subst_expr(*e.a, nvars, obs, rho), subst_expr(*e.b, nvars, obs, rho));
    }
    throw Error(Error::Kind::Internal, "unhandled expression kind");
}

} // namespace

PredPtr specialize_obs(const PredPtr& t, const UniversePtr& vars, const UniversePtr& obs,
                       const State& rho) {
    const int nvars = vars->size();
    using K = PredTerm::Kind;
    switch (t->kind) {
    case K::Lit: return p_lit(vars, t->lit);
    case K::Always: return p_always(vars, subst_expr(*t->sp, nvars, obs, rho));
    case K::Sometime: return p_sometime(vars, subst_expr(*t->sp, nvars, obs, rho));
    case K::Definitely: return p_definitely(vars, subst_expr(*t->sp, nvars, obs, rho));
    case K::Possibly: return p_possibly(vars, subst_expr(*t->sp, nvars, obs, rho));
    case K::Empty: return p_empty(vars);
    case K::Finite: return p_finite(vars);
    case K::Infinite: return p_infinite(vars);
    case K::NonEmpty: return p_nonempty(specialize_obs(t->a, vars, obs, rho));
    case K::And:
        return p_and(specialize_obs(t->a, vars, obs, rho), specialize_obs(t->b, vars, obs, rho));
    case K::Or:
        return p_or(specialize_obs(t->a, vars, obs, rho), specialize_obs(t->b, vars, obs, rho));
    case K::Not: return p_not(specialize_obs(t->a, vars, obs, rho));
    case K::Chop:
        return p_chop(specialize_obs(t->a, vars, obs, rho), specialize_obs(t->b, vars, obs, rho));
    case K::Omega: return p_omega(specialize_obs(t->a, vars, obs, rho));
    case K::Prev: return p_prev(specialize_obs(t->a, vars, obs, rho));
    case K::PrevHolds: return p_prev_holds(vars, subst_expr(*t->sp, nvars, obs, rho));
    case K::StableVar:
        require(t->var < nvars, "stable over an observable is not supported");
        return p_stable_var(vars, t->var);
    case K::StableSet: {
        for (int v : t->vars) require(v < nvars, "stable over an observable is not supported");
        return p_stable_set(vars, t->vars);
    }
    }
    throw Error(Error::Kind::Internal, "unhandled predicate kind");
}

PredPtr ops_conj(const SystemSpec& s) {
    PredPtr g;
    for (const auto& [name, op] : s.ops) g = g ? p_and(g, op) : op;
    return g ? g : p_lit(s.vars, true);
}

PredPtr init_for(const SystemSpec& s, const State& rho) {
    return specialize_obs(s.init, s.vars, s.obs, rho);
}

namespace {

// Assignments to the cells of one interval, everything else pinned at domain
// position 0.  Digit order mirrors full stream enumeration (variable-major,
// time-minor, last digit fastest).
class RestrictionSpace {
public:
    RestrictionSpace(UniversePtr u, int horizon, const Interval& iv)
        : uni_(std::move(u)), horizon_(horizon), iv_(iv) {
        len_ = iv.is_empty() ? 0 : iv.size();
        count_ = 1;
        for (int v = 0; v < uni_->size(); ++v) {
            uint64_t d = static_cast<uint64_t>(uni_->domain_size(v));
            for (int k = 0; k < len_; ++k) {
                if (count_ > UINT64_MAX / d) {
                    count_ = UINT64_MAX;
                    return;
                }
                count_ *= d;
            }
        }
    }

    uint64_t count() const { return count_; }

    void check_budget(uint64_t budget, const std::string& what) const {
        if (count_ > budget)
            throw Error(Error::Kind::Budget,
                        what + ": " + std::to_string(count_) + " candidates exceed the budget of " +
                            std::to_string(budget));
    }

    Stream base() const {
        Stream s;
        s.uni = uni_;
        s.horizon = horizon_;
        s.cells.assign(static_cast<size_t>(horizon_) * uni_->size(), 0);
        return s;
    }

    void write(uint64_t idx, Stream& s) const {
        for (int v = uni_->size() - 1; v >= 0; --v) {
            uint64_t d = static_cast<uint64_t>(uni_->domain_size(v));
            for (int k = len_ - 1; k >= 0; --k) {
                s.at(iv_.lo + k, v) = static_cast<uint8_t>(idx % d);
                idx /= d;
            }
        }
    }

private:
    UniversePtr uni_;
    int horizon_;
    Interval iv_;
    int len_;
    uint64_t count_;
};

std::string restriction_key(const Stream& s, const Interval& iv) {
    if (iv.is_empty()) return {};
    const int n = s.uni->size();
    std::string k;
    k.reserve(static_cast<size_t>(iv.size()) * n);
    for (int t = iv.lo; t <= iv.hi; ++t)
        for (int v = 0; v < n; ++v) k.push_back(static_cast<char>(s.at(t, v)));
    return k;
}

// Searches for a left stream satisfying ref (and g when given) on one
// interval, optionally pinned to y0 on an adjoining prefix d0.  The fast mode
// scans restriction classes; it is exact only when ref (and g) never read
// outside the interval.
bool exists_matching_y(const RelPtr& ref, const PredPtr& g, const CarrierTables& tables,
                       const Carrier& c, const Stream& z, int iv_idx, const Interval* d0,
                       const Stream* y0, uint64_t budget, bool fast, EvalStats* stats) {
    const UniversePtr& yuni = ref->left;
    if (fast) {
        RestrictionSpace rs(yuni, c.horizon, tables.intervals()[iv_idx]);
        rs.check_budget(budget, "matching-stream candidates");
        Stream y = rs.base();
        if (d0 && y0 && !d0->is_empty())
            for (int t = d0->lo; t <= d0->hi; ++t)
                for (int v = 0; v < yuni->size(); ++v) y.at(t, v) = y0->at(t, v);
        for (uint64_t i = 0; i < rs.count(); ++i) {
            rs.write(i, y);
            if (eval_rel_once(ref, iv_idx, y, z, tables, budget, stats) &&
                (!g || eval_pred_once(g, iv_idx, y, tables, stats)))
                return true;
        }
        return false;
    }
    StreamSpace ys(yuni, c.horizon);
    ys.check_budget(budget, "matching-stream candidates");
    for (uint64_t i = 0; i < ys.count(); ++i) {
        Stream y = ys.decode(i);
        if (d0 && y0 && !matches(*d0, *y0, y)) continue;
        if (eval_rel_once(ref, iv_idx, y, z, tables, budget, stats) &&
            (!g || eval_pred_once(g, iv_idx, y, tables, stats)))
            return true;
    }
    return false;
}

// Per-worker scan state for the simulation obligation.
class SimEngine {
public:
    SimEngine(const Carrier& c, const CarrierTables& tables, const StreamSpace& zs, RelPtr ref,
              PredPtr g, PredPtr h, std::string clause, uint64_t budget)
        : c_(c), tables_(tables), zs_(zs), ref_(std::move(ref)), g_(std::move(g)),
          h_(std::move(h)), clause_(std::move(clause)), budget_(budget),
          fast_(past_free(*ref_) && (!g_ || past_free(*g_))) {
        conseq_.resize(tables_.count());
        ante_.resize(tables_.count());
    }

    std::optional<Counterexample> visit(uint64_t zi) {
        Stream z = zs_.decode(zi);
        PredEval ph(tables_, z);
        std::optional<Counterexample> out =
            fast_ ? visit_fast(z, ph) : visit_slow(z, ph);
        stats_.merge(ph.stats());
        return out;
    }

    const EvalStats& stats() const { return stats_; }

private:
    const Carrier& c_;
    const CarrierTables& tables_;
    const StreamSpace& zs_;
    RelPtr ref_;
    PredPtr g_, h_;
    std::string clause_;
    uint64_t budget_;
    bool fast_;
    EvalStats stats_;
    std::vector<std::unordered_map<std::string, int8_t>> conseq_;
    std::vector<std::unordered_map<std::string, std::pair<int8_t, uint64_t>>> ante_;
    std::unordered_map<std::string, int8_t> slow_conseq_; // per-z, keyed (iv,d0,y0|d0)

    Counterexample make_cex(const Stream& z, const Stream& y0, int d0, int iv) {
        Counterexample cex;
        cex.clause = clause_;
        cex.carrier = c_;
        cex.streams = {{"z", z}, {"y0", y0}};
        cex.intervals = {{"delta0", tables_.intervals()[d0]}, {"delta", tables_.intervals()[iv]}};
        return cex;
    }

    bool conseq_exists(const Stream& z, int iv) {
        std::string key = restriction_key(z, tables_.intervals()[iv]);
        auto& cache = conseq_[iv];
        if (auto it = cache.find(key); it != cache.end()) return it->second != 0;
        bool found = exists_matching_y(ref_, g_, tables_, c_, z, iv, nullptr, nullptr, budget_,
                                       true, &stats_);
        cache.emplace(std::move(key), found ? 1 : 0);
        return found;
    }

    std::optional<uint64_t> ante_find(const Stream& z, int d0) {
        std::string key = restriction_key(z, tables_.intervals()[d0]);
        auto& cache = ante_[d0];
        if (auto it = cache.find(key); it != cache.end())
            return it->second.first ? std::optional<uint64_t>(it->second.second) : std::nullopt;
        RestrictionSpace rs(ref_->left, c_.horizon, tables_.intervals()[d0]);
        rs.check_budget(budget_, "lookback candidates");
        Stream y0 = rs.base();
        std::optional<uint64_t> found;
        for (uint64_t i = 0; i < rs.count(); ++i) {
            rs.write(i, y0);
            if (eval_rel_once(ref_, d0, y0, z, tables_, budget_, &stats_)) {
                found = i;
                break;
            }
        }
        cache.emplace(std::move(key), std::make_pair(found ? 1 : 0, found.value_or(0)));
        return found;
    }

    std::optional<Counterexample> visit_fast(const Stream& z, PredEval& ph) {
        for (int iv = 0; iv < tables_.count(); ++iv) {
            if (!ph.eval_idx(h_, iv)) continue;
            if (conseq_exists(z, iv)) continue;
            // the required y does not exist: any lookback satisfying ref fails
            for (int d0 : tables_.preceders(iv)) {
                if (auto y0i = ante_find(z, d0)) {
                    RestrictionSpace rs(ref_->left, c_.horizon, tables_.intervals()[d0]);
                    Stream y0 = rs.base();
                    rs.write(*y0i, y0);
                    return make_cex(z, y0, d0, iv);
                }
            }
        }
        return std::nullopt;
    }

    std::optional<Counterexample> visit_slow(const Stream& z, PredEval& ph) {
        std::vector<int> ivs;
        for (int iv = 0; iv < tables_.count(); ++iv)
            if (ph.eval_idx(h_, iv)) ivs.push_back(iv);
        if (ivs.empty()) return std::nullopt;

        StreamSpace ys(ref_->left, c_.horizon);
        ys.check_budget(budget_, "lookback candidates");
        std::vector<int> d0s;
        for (int iv : ivs)
            for (int d0 : tables_.preceders(iv)) d0s.push_back(d0);
        std::sort(d0s.begin(), d0s.end());
        d0s.erase(std::unique(d0s.begin(), d0s.end()), d0s.end());

        // antecedent truth per (lookback interval, candidate stream)
        std::vector<std::vector<uint8_t>> ante(tables_.count());
        for (int d0 : d0s) ante[d0].assign(ys.count(), 0);
        for (uint64_t yi = 0; yi < ys.count(); ++yi) {
            Stream y0 = ys.decode(yi);
            RelEval ev(tables_, y0, z, budget_);
            for (int d0 : d0s) ante[d0][yi] = ev.eval_idx(ref_, d0) ? 1 : 0;
            stats_.merge(ev.stats());
        }

        slow_conseq_.clear();
        for (int iv : ivs) {
            for (int d0 : tables_.preceders(iv)) {
                for (uint64_t yi = 0; yi < ys.count(); ++yi) {
                    if (!ante[d0][yi]) continue;
                    Stream y0 = ys.decode(yi);
                    const Interval& dv0 = tables_.intervals()[d0];
                    std::string key = std::to_string(iv) + ":" + std::to_string(d0) + ":" +
                                      restriction_key(y0, dv0);
                    bool ok;
                    if (auto it = slow_conseq_.find(key); it != slow_conseq_.end()) {
                        ok = it->second != 0;
                    } else {
                        ok = exists_matching_y(ref_, g_, tables_, c_, z, iv, &dv0, &y0, budget_,
                                               false, &stats_);
                        slow_conseq_.emplace(std::move(key), ok ? 1 : 0);
                    }
                    if (!ok) return make_cex(z, y0, d0, iv);
                }
            }
        }
        return std::nullopt;
    }
};

// Shrinks witness stream values toward domain position 0 wherever the
// counterexample stays valid under replay.
void shrink_streams(Counterexample& cex, const std::function<bool(const Counterexample&)>& replay) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& ns : cex.streams) {
            Stream& s = ns.stream;
            const int n = s.uni->size();
            for (int t = 0; t < s.horizon; ++t) {
                for (int v = 0; v < n; ++v) {
                    uint8_t& cell = s.at(t, v);
                    const uint8_t orig = cell;
                    uint8_t best = orig;
                    for (uint8_t p = 0; p < orig; ++p) {
                        cell = p;
                        if (replay(cex)) {
                            best = p;
                            break;
                        }
                    }
                    cell = best;
                    if (best != orig) changed = true;
                }
            }
        }
    }
}

using Replay = std::function<bool(const Counterexample&)>;

// Runs a check, then makes its counterexample small: first rerun at ever
// smaller horizons while the same clause still fails, then shrink stream
// values pointwise under replay.
Verdict minimized(const Carrier& c, const CheckLimits& lim,
                  const std::function<Verdict(const Carrier&)>& runner,
                  const std::function<Replay(const Carrier&)>& make_replay) {
    Verdict v = runner(c);
    if (v.pass || !lim.minimize) return v;
    Carrier cur = c;
    while (cur.horizon > 1) {
        Carrier smaller{cur.horizon - 1, cur.open_ended};
        Verdict v2 = runner(smaller);
        if (!v2.pass && v2.cex && v2.cex->clause == v.cex->clause) {
            v = std::move(v2);
            cur = smaller;
        } else {
            break;
        }
    }
    shrink_streams(*v.cex, make_replay(cur));
    return v;
}

Verdict simulates_core(const RelPtr& ref, const PredPtr& g, const PredPtr& h,
                       const std::string& clause, const Carrier& c, const CheckLimits& lim,
                       EvalStats* stats) {
    CarrierTables tables(c);
    StreamSpace zs(ref->right, c.horizon);
    zs.check_budget(lim.budget, "right streams");
    if (!(past_free(*ref) && (!g || past_free(*g)))) {
        StreamSpace ys(ref->left, c.horizon);
        ys.check_budget(lim.budget, "left streams");
        if (ys.count() != 0 && zs.count() > lim.budget / ys.count())
            throw Error(Error::Kind::Budget, "stream pair space exceeds the budget");
    }
    std::mutex stats_mu;
    auto hit = parallel_first<Counterexample>(
        zs.count(), lim.jobs, kChunk,
        [&](int) { return SimEngine(c, tables, zs, ref, g, h, clause, lim.budget); },
        [](SimEngine& e, uint64_t zi) { return e.visit(zi); },
        [&](SimEngine& e) {
            std::lock_guard<std::mutex> lock(stats_mu);
            if (stats) stats->merge(e.stats());
        });
    return hit ? Verdict::fail(std::move(*hit)) : Verdict::ok();
}

Replay make_sim_replay(const RelPtr& ref, const PredPtr& g, const PredPtr& h, uint64_t budget) {
    bool fast = past_free(*ref) && (!g || past_free(*g));
    return [=](const Counterexample& cx) -> bool {
        CarrierTables t2(cx.carrier);
        const Stream& z = cx.streams[0].stream;
        const Stream& y0 = cx.streams[1].stream;
        const Interval& d0 = cx.intervals[0].iv;
        const Interval& dv = cx.intervals[1].iv;
        PredEval ph(t2, z);
        if (!ph.eval(h, dv)) return false;
        if (!eval_rel_once(ref, t2.index_of(d0), y0, z, t2, budget)) return false;
        return !exists_matching_y(ref, g, t2, cx.carrier, z, t2.index_of(dv), &d0, &y0, budget,
                                  fast, nullptr);
    };
}

} // namespace

Verdict check_simulates(const RelPtr& ref, const PredPtr& g, const PredPtr& h, const Carrier& c,
                        const CheckLimits& lim, EvalStats* stats) {
    require(ref && g && h, "simulation check needs a relation and two predicates");
    require(same_uni(ref->left, g->uni), "left predicate is over the wrong universe");
    require(same_uni(ref->right, h->uni), "right predicate is over the wrong universe");
    return minimized(
        c, lim,
        [&](const Carrier& cc) { return simulates_core(ref, g, h, "simulation", cc, lim, stats); },
        [&](const Carrier&) { return make_sim_replay(ref, g, h, lim.budget); });
}

Verdict check_vdash(const PredPtr& h, const RelPtr& ref, const Carrier& c, const CheckLimits& lim,
                    EvalStats* stats) {
    require(ref && h, "extension check needs a relation and a predicate");
    require(same_uni(ref->right, h->uni), "right predicate is over the wrong universe");
    return minimized(
        c, lim,
        [&](const Carrier& cc) { return simulates_core(ref, nullptr, h, "vdash", cc, lim, stats); },
        [&](const Carrier&) { return make_sim_replay(ref, nullptr, h, lim.budget); });
}

namespace {

// Per-worker scan state for the direct pointwise obligation: ref and h on an
// interval force g on the left stream.
class Ref2Engine {
public:
    Ref2Engine(const Carrier& c, const CarrierTables& tables, const StreamSpace& zs, RelPtr ref,
               PredPtr g, PredPtr h, uint64_t budget)
        : c_(c), tables_(tables), zs_(zs), ref_(std::move(ref)), g_(std::move(g)),
          h_(std::move(h)), budget_(budget), fast_(past_free(*ref_) && past_free(*g_)) {
        forall_.resize(tables_.count());
    }

    std::optional<Counterexample> visit(uint64_t zi) {
        Stream z = zs_.decode(zi);
        PredEval ph(tables_, z);
        std::optional<Counterexample> out;
        for (int iv = 0; iv < tables_.count() && !out; ++iv) {
            if (!ph.eval_idx(h_, iv)) continue;
            if (fast_) {
                if (auto yi = first_bad_fast(z, iv)) {
                    RestrictionSpace rs(ref_->left, c_.horizon, tables_.intervals()[iv]);
                    Stream y = rs.base();
                    rs.write(*yi, y);
                    out = make_cex(z, y, iv);
                }
            } else {
                StreamSpace ys(ref_->left, c_.horizon);
                ys.check_budget(budget_, "left streams");
                for (uint64_t yi = 0; yi < ys.count(); ++yi) {
                    Stream y = ys.decode(yi);
                    if (eval_rel_once(ref_, iv, y, z, tables_, budget_, &stats_) &&
                        !eval_pred_once(g_, iv, y, tables_, &stats_)) {
                        out = make_cex(z, y, iv);
                        break;
                    }
                }
            }
        }
        stats_.merge(ph.stats());
        return out;
    }

    const EvalStats& stats() const { return stats_; }

private:
    const Carrier& c_;
    const CarrierTables& tables_;
    const StreamSpace& zs_;
    RelPtr ref_;
    PredPtr g_, h_;
    uint64_t budget_;
    bool fast_;
    EvalStats stats_;
    std::vector<std::unordered_map<std::string, std::pair<int8_t, uint64_t>>> forall_;

    Counterexample make_cex(const Stream& z, const Stream& y, int iv) {
        Counterexample cex;
        cex.clause = "ref2";
        cex.carrier = c_;
        cex.streams = {{"z", z}, {"y", y}};
        cex.intervals = {{"delta", tables_.intervals()[iv]}};
        return cex;
    }

    std::optional<uint64_t> first_bad_fast(const Stream& z, int iv) {
        std::string key = restriction_key(z, tables_.intervals()[iv]);
        auto& cache = forall_[iv];
        if (auto it = cache.find(key); it != cache.end())
            return it->second.first ? std::optional<uint64_t>(it->second.second) : std::nullopt;
        RestrictionSpace rs(ref_->left, c_.horizon, tables_.intervals()[iv]);
        rs.check_budget(budget_, "left candidates");
        Stream y = rs.base();
        std::optional<uint64_t> bad;
        for (uint64_t i = 0; i < rs.count(); ++i) {
            rs.write(i, y);
            if (eval_rel_once(ref_, iv, y, z, tables_, budget_, &stats_) &&
                !eval_pred_once(g_, iv, y, tables_, &stats_)) {
                bad = i;
                break;
            }
        }
        cache.emplace(std::move(key), std::make_pair(bad ? 1 : 0, bad.value_or(0)));
        return bad;
    }
};

Verdict ref2_core(const PredPtr& g, const PredPtr& h, const RelPtr& ref, const Carrier& c,
                  const CheckLimits& lim, EvalStats* stats) {
    CarrierTables tables(c);
    StreamSpace zs(ref->right, c.horizon);
    zs.check_budget(lim.budget, "right streams");
    if (!(past_free(*ref) && past_free(*g))) {
        StreamSpace ys(ref->left, c.horizon);
        ys.check_budget(lim.budget, "left streams");
        if (ys.count() != 0 && zs.count() > lim.budget / ys.count())
            throw Error(Error::Kind::Budget, "stream pair space exceeds the budget");
    }
    std::mutex stats_mu;
    auto hit = parallel_first<Counterexample>(
        zs.count(), lim.jobs, kChunk,
        [&](int) { return Ref2Engine(c, tables, zs, ref, g, h, lim.budget); },
        [](Ref2Engine& e, uint64_t zi) { return e.visit(zi); },
        [&](Ref2Engine& e) {
            std::lock_guard<std::mutex> lock(stats_mu);
            if (stats) stats->merge(e.stats());
        });
    return hit ? Verdict::fail(std::move(*hit)) : Verdict::ok();
}

} // namespace

Verdict check_ref2(const PredPtr& g, const PredPtr& h, const RelPtr& ref, const Carrier& c,
                   const CheckLimits& lim, EvalStats* stats) {
    require(ref && g && h, "forcing check needs a relation and two predicates");
    require(same_uni(ref->left, g->uni), "left predicate is over the wrong universe");
    require(same_uni(ref->right, h->uni), "right predicate is over the wrong universe");
    auto replay = [&](const Carrier&) -> Replay {
        RelPtr r2 = ref;
        PredPtr g2 = g, h2 = h;
        uint64_t budget = lim.budget;
        return [=](const Counterexample& cx) -> bool {
            CarrierTables t2(cx.carrier);
            const Stream& z = cx.streams[0].stream;
            const Stream& y = cx.streams[1].stream;
            int iv = t2.index_of(cx.intervals[0].iv);
            PredEval ph(t2, z);
            if (!ph.eval_idx(h2, iv)) return false;
            return eval_rel_once(r2, iv, y, z, t2, budget) && !eval_pred_once(g2, iv, y, t2);
        };
    };
    return minimized(
        c, lim, [&](const Carrier& cc) { return ref2_core(g, h, ref, cc, lim, stats); }, replay);
}

namespace {

// Per-worker scan state for the start obligation: every concrete start for an
// observation state extends to a related abstract start.
class InitEngine {
public:
    InitEngine(const Carrier& c, const CarrierTables& tables, const StreamSpace& zs, RelPtr ref,
               std::vector<PredPtr> ci, std::vector<PredPtr> ai, std::vector<State> sigmas,
               UniversePtr obs, uint64_t budget, bool fast)
        : c_(c), tables_(tables), zs_(zs), ref_(std::move(ref)), ci_(std::move(ci)),
          ai_(std::move(ai)), sigmas_(std::move(sigmas)), obs_(std::move(obs)), budget_(budget),
          fast_(fast) {
        conseq_.resize(ci_.size() * tables_.count());
    }

    std::optional<Counterexample> visit(uint64_t zi) {
        Stream z = zs_.decode(zi);
        PredEval ev(tables_, z);
        std::optional<Counterexample> out;
        for (size_t s = 0; s < ci_.size() && !out; ++s) {
            for (int iv = 0; iv < tables_.count(); ++iv) {
                if (!ev.eval_idx(ci_[s], iv)) continue;
                if (conseq(s, iv, z)) continue;
                Counterexample cex;
                cex.clause = "initialisation";
                cex.carrier = c_;
                cex.streams = {{"z", z}};
                cex.intervals = {{"delta", tables_.intervals()[iv]}};
                cex.states = {{"sigma", obs_, sigmas_[s]}};
                out = std::move(cex);
                break;
            }
        }
        stats_.merge(ev.stats());
        return out;
    }

    const EvalStats& stats() const { return stats_; }

private:
    const Carrier& c_;
    const CarrierTables& tables_;
    const StreamSpace& zs_;
    RelPtr ref_;
    std::vector<PredPtr> ci_, ai_;
    std::vector<State> sigmas_;
    UniversePtr obs_;
    uint64_t budget_;
    bool fast_;
    EvalStats stats_;
    std::vector<std::unordered_map<std::string, int8_t>> conseq_;

    bool conseq(size_t s, int iv, const Stream& z) {
        std::string key = restriction_key(z, tables_.intervals()[iv]);
        auto& cache = conseq_[s * tables_.count() + iv];
        if (auto it = cache.find(key); it != cache.end()) return it->second != 0;
        bool found = exists_matching_y(ref_, ai_[s], tables_, c_, z, iv, nullptr, nullptr, budget_,
                                       fast_, &stats_);
        cache.emplace(std::move(key), found ? 1 : 0);
        return found;
    }
};

// Per-worker scan state for the finalisation obligation: related streams read
// the same observation at every inner point.
class FinalEngine {
public:
    FinalEngine(const Carrier& c, const CarrierTables& tables, const StreamSpace& zs, RelPtr ref,
                BoolExprPtr cf, BoolExprPtr af, std::vector<State> sigmas, UniversePtr obs,
                uint64_t budget, bool fast)
        : c_(c), tables_(tables), zs_(zs), ref_(std::move(ref)), cf_(std::move(cf)),
          af_(std::move(af)), sigmas_(std::move(sigmas)), obs_(std::move(obs)), budget_(budget),
          fast_(fast) {
        cache_.resize(tables_.count());
    }

    std::optional<Counterexample> visit(uint64_t zi) {
        Stream z = zs_.decode(zi);
        for (int iv = 0; iv < tables_.count(); ++iv) {
            const Interval& dv = tables_.intervals()[iv];
            if (dv.is_empty()) continue; // no inner point to finalise at
            if (fast_) {
                if (auto bad = scan_fast(z, iv)) {
                    RestrictionSpace rs(ref_->left, c_.horizon, dv);
                    Stream y = rs.base();
                    rs.write(bad->y, y);
                    return make_cex(z, y, iv, bad->t, bad->sigma);
                }
            } else {
                StreamSpace ys(ref_->left, c_.horizon);
                ys.check_budget(budget_, "left streams");
                for (uint64_t yi = 0; yi < ys.count(); ++yi) {
                    Stream y = ys.decode(yi);
                    if (!eval_rel_once(ref_, iv, y, z, tables_, budget_, &stats_)) continue;
                    if (auto bad = scan_points(z, y, dv))
                        return make_cex(z, y, iv, bad->first, bad->second);
                }
            }
        }
        return std::nullopt;
    }

    const EvalStats& stats() const { return stats_; }

private:
    struct Bad {
        uint64_t y;
        int t;
        int sigma;
    };

    const Carrier& c_;
    const CarrierTables& tables_;
    const StreamSpace& zs_;
    RelPtr ref_;
    BoolExprPtr cf_, af_;
    std::vector<State> sigmas_;
    UniversePtr obs_;
    uint64_t budget_;
    bool fast_;
    EvalStats stats_;
    std::vector<std::unordered_map<std::string, std::optional<Bad>>> cache_;

    Counterexample make_cex(const Stream& z, const Stream& y, int iv, int t, int sigma) {
        Counterexample cex;
        cex.clause = "finalisation";
        cex.carrier = c_;
        cex.streams = {{"z", z}, {"y", y}};
        cex.intervals = {{"delta", tables_.intervals()[iv]}, {"t", Interval::range(t, t)}};
        cex.states = {{"sigma", obs_, sigmas_[sigma]}};
        return cex;
    }

    std::optional<std::pair<int, int>> scan_points(const Stream& z, const Stream& y,
                                                   const Interval& dv) {
        for (int t = dv.lo; t <= dv.hi; ++t) {
            State zst = z.state_at(t);
            State yst = y.state_at(t);
            for (size_t s = 0; s < sigmas_.size(); ++s)
                if (eval_state_rel(*cf_, zst, sigmas_[s]) && !eval_state_rel(*af_, yst, sigmas_[s]))
                    return std::make_pair(t, static_cast<int>(s));
        }
        return std::nullopt;
    }

    std::optional<Bad> scan_fast(const Stream& z, int iv) {
        const Interval& dv = tables_.intervals()[iv];
        std::string key = restriction_key(z, dv);
        auto& cache = cache_[iv];
        if (auto it = cache.find(key); it != cache.end()) return it->second;
        RestrictionSpace rs(ref_->left, c_.horizon, dv);
        rs.check_budget(budget_, "left candidates");
        Stream y = rs.base();
        std::optional<Bad> bad;
        for (uint64_t i = 0; i < rs.count() && !bad; ++i) {
            rs.write(i, y);
            if (!eval_rel_once(ref_, iv, y, z, tables_, budget_, &stats_)) continue;
            if (auto p = scan_points(z, y, dv)) bad = Bad{i, p->first, p->second};
        }
        cache.emplace(std::move(key), bad);
        return bad;
    }
};

template <typename Engine>
Verdict run_engine_scan(const StreamSpace& zs, const CheckLimits& lim, EvalStats* stats,
                        const std::function<Engine()>& make) {
    std::mutex stats_mu;
    auto hit = parallel_first<Counterexample>(
        zs.count(), lim.jobs, kChunk, [&](int) { return make(); },
        [](Engine& e, uint64_t zi) { return e.visit(zi); },
        [&](Engine& e) {
            std::lock_guard<std::mutex> lock(stats_mu);
            if (stats) stats->merge(e.stats());
        });
    return hit ? Verdict::fail(std::move(*hit)) : Verdict::ok();
}

Verdict forward_sim_core(const SystemSpec& abs_sys, const SystemSpec& conc_sys, const RelPtr& ref,
                         const Carrier& c, const CheckLimits& lim, EvalStats* stats) {
    CarrierTables tables(c);
    StreamSpace zs(conc_sys.vars, c.horizon);
    zs.check_budget(lim.budget, "right streams");

    std::vector<State> sigmas = all_states(*conc_sys.obs);
    std::vector<PredPtr> ci, ai;
    ci.reserve(sigmas.size());
    ai.reserve(sigmas.size());
    for (const State& s : sigmas) {
        ci.push_back(init_for(conc_sys, s));
        ai.push_back(init_for(abs_sys, s));
    }
    bool init_fast = past_free(*ref);
    for (const PredPtr& t : ai) init_fast = init_fast && past_free(*t);
    if (!init_fast || !past_free(*ref)) {
        StreamSpace ys(abs_sys.vars, c.horizon);
        ys.check_budget(lim.budget, "left streams");
        if (ys.count() != 0 && zs.count() > lim.budget / ys.count())
            throw Error(Error::Kind::Budget, "stream pair space exceeds the budget");
    }

    Verdict v = run_engine_scan<InitEngine>(zs, lim, stats, [&]() {
        return InitEngine(c, tables, zs, ref, ci, ai, sigmas, conc_sys.obs, lim.budget, init_fast);
    });
    if (!v.pass) return v;

    v = simulates_core(ref, ops_conj(abs_sys), ops_conj(conc_sys), "simulation", c, lim, stats);
    if (!v.pass) return v;

    bool final_fast = past_free(*ref);
    return run_engine_scan<FinalEngine>(zs, lim, stats, [&]() {
        return FinalEngine(c, tables, zs, ref, conc_sys.final_rel, abs_sys.final_rel, sigmas,
                           conc_sys.obs, lim.budget, final_fast);
    });
}

} // namespace

Verdict check_forward_simulation(const SystemSpec& abs_sys, const SystemSpec& conc_sys,
                                 const RelPtr& ref, const Carrier& c, const CheckLimits& lim,
                                 EvalStats* stats) {
    require(static_cast<bool>(ref), "forward simulation needs a relation");
    require(same_uni(ref->left, abs_sys.vars), "relation's left universe is not the abstract one");
    require(same_uni(ref->right, conc_sys.vars),
            "relation's right universe is not the concrete one");
    require(same_uni(abs_sys.obs, conc_sys.obs), "systems observe different universes");

    auto make_replay = [&](const Carrier&) -> Replay {
        const SystemSpec* A = &abs_sys;
        const SystemSpec* C = &conc_sys;
        RelPtr r2 = ref;
        uint64_t budget = lim.budget;
        Replay sim = make_sim_replay(r2, ops_conj(*A), ops_conj(*C), budget);
        return [=](const Counterexample& cx) -> bool {
            CarrierTables t2(cx.carrier);
            if (cx.clause == "simulation") return sim(cx);
            if (cx.clause == "initialisation") {
                const Stream& z = cx.streams[0].stream;
                int iv = t2.index_of(cx.intervals[0].iv);
                const State& sigma = cx.states[0].state;
                PredPtr cis = init_for(*C, sigma);
                PredPtr ais = init_for(*A, sigma);
                PredEval ev(t2, z);
                if (!ev.eval_idx(cis, iv)) return false;
                bool fast = past_free(*r2) && past_free(*ais);
                return !exists_matching_y(r2, ais, t2, cx.carrier, z, iv, nullptr, nullptr, budget,
                                          fast, nullptr);
            }
            // finalisation
            const Stream& z = cx.streams[0].stream;
            const Stream& y = cx.streams[1].stream;
            int iv = t2.index_of(cx.intervals[0].iv);
            int t = cx.intervals[1].iv.lo;
            const State& sigma = cx.states[0].state;
            if (!eval_rel_once(r2, iv, y, z, t2, budget)) return false;
            return eval_state_rel(*C->final_rel, z.state_at(t), sigma) &&
                   !eval_state_rel(*A->final_rel, y.state_at(t), sigma);
        };
    };
    return minimized(
        c, lim,
        [&](const Carrier& cc) {
            return forward_sim_core(abs_sys, conc_sys, ref, cc, lim, stats);
        },
        make_replay);
}

ObsSet observations(const SystemSpec& s, const Carrier& c, const CheckLimits& lim,
                    EvalStats* stats) {
    CarrierTables tables(c);
    StreamSpace zs(s.vars, c.horizon);
    zs.check_budget(lim.budget, "streams of '" + s.name + "'");

    std::vector<State> sigmas = all_states(*s.obs);
    const int n = static_cast<int>(sigmas.size());
    PredPtr conj = ops_conj(s);
    std::vector<PredPtr> started; // lookback-initialised process conjunction per start state
    started.reserve(sigmas.size());
    for (const State& rho : sigmas) started.push_back(p_and(p_prev(init_for(s, rho)), conj));

    ObsSet out;
    out.obs = s.obs;
    out.n = n;
    out.mat.assign(static_cast<size_t>(n) * n, 0);
    out.wit.assign(static_cast<size_t>(n) * n, {});

    auto scan = [&](uint64_t zi, ObsSet& acc, EvalStats& st) {
        Stream z = zs.decode(zi);
        PredEval ev(tables, z);
        for (int b = 0; b < n; ++b) {
            for (int iv = 0; iv < tables.count(); ++iv) {
                const Interval& dv = tables.intervals()[iv];
                if (dv.is_empty()) continue;
                if (!ev.eval_idx(started[b], iv)) continue;
                for (int t = dv.lo; t <= dv.hi; ++t) {
                    State zst = z.state_at(t);
                    for (int a = 0; a < n; ++a) {
                        if (!eval_state_rel(*s.final_rel, zst, sigmas[a])) continue;
                        auto& cell = acc.mat[static_cast<size_t>(b) * n + a];
                        if (!cell) {
                            cell = 1;
                            acc.wit[static_cast<size_t>(b) * n + a] = {zi, iv, t};
                        }
                    }
                }
            }
        }
        st.merge(ev.stats());
    };

    int jobs = lim.jobs;
    if (jobs < 2 || zs.count() <= kChunk) {
        EvalStats st;
        for (uint64_t zi = 0; zi < zs.count(); ++zi) scan(zi, out, st);
        if (stats) stats->merge(st);
        return out;
    }

    std::atomic<uint64_t> next{0};
    std::mutex mu;
    std::exception_ptr error;
    auto merge_into = [](ObsSet& dst, const ObsSet& src) {
        for (size_t i = 0; i < src.mat.size(); ++i) {
            if (!src.mat[i]) continue;
            const auto& w = src.wit[i];
            if (!dst.mat[i]) {
                dst.mat[i] = 1;
                dst.wit[i] = w;
            } else {
                auto& d = dst.wit[i];
                if (std::tuple(w.z, w.iv, w.t) < std::tuple(d.z, d.iv, d.t)) d = w;
            }
        }
    };
    const ObsSet zero = out; // all-clear template for worker partials
    auto worker = [&]() {
        ObsSet part = zero;
        EvalStats st;
        try {
            for (;;) {
                uint64_t start = next.fetch_add(kChunk);
                if (start >= zs.count()) break;
                uint64_t end = std::min(zs.count(), start + kChunk);
                for (uint64_t zi = start; zi < end; ++zi) scan(zi, part, st);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(mu);
            if (!error) error = std::current_exception();
            return;
        }
        std::lock_guard<std::mutex> lock(mu);
        merge_into(out, part);
        if (stats) stats->merge(st);
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
    return out;
}

namespace {

Verdict refinement_core(const SystemSpec& abs_sys, const SystemSpec& conc_sys, const Carrier& c,
                        const CheckLimits& lim, EvalStats* stats) {
    ObsSet oa = observations(abs_sys, c, lim, stats);
    ObsSet oc = observations(conc_sys, c, lim, stats);
    const int n = oc.n;
    std::vector<State> sigmas = all_states(*conc_sys.obs);
    StreamSpace zs(conc_sys.vars, c.horizon);
    CarrierTables tables(c);
    for (int b = 0; b < n; ++b) {
        for (int a = 0; a < n; ++a) {
            if (!oc.contains(b, a) || oa.contains(b, a)) continue;
            const auto& w = oc.wit[static_cast<size_t>(b) * n + a];
            Counterexample cex;
            cex.clause = "observation";
            cex.carrier = c;
            cex.streams = {{"z", zs.decode(w.z)}};
            cex.intervals = {{"delta", tables.intervals()[w.iv]}, {"t", Interval::range(w.t, w.t)}};
            cex.states = {{"rho", conc_sys.obs, sigmas[b]}, {"rho2", conc_sys.obs, sigmas[a]}};
            cex.note = "pair observed of '" + conc_sys.name + "' but not of '" + abs_sys.name + "'";
            return Verdict::fail(std::move(cex));
        }
    }
    return Verdict::ok();
}

} // namespace

Verdict check_data_refinement(const SystemSpec& abs_sys, const SystemSpec& conc_sys,
                              const Carrier& c, const CheckLimits& lim, EvalStats* stats) {
    require(same_uni(abs_sys.obs, conc_sys.obs), "systems observe different universes");
    auto make_replay = [&](const Carrier& cc) -> Replay {
        auto oa = std::make_shared<ObsSet>(observations(abs_sys, cc, lim, nullptr));
        const SystemSpec* C = &conc_sys;
        return [oa, C](const Counterexample& cx) -> bool {
            CarrierTables t2(cx.carrier);
            const Stream& z = cx.streams[0].stream;
            int iv = t2.index_of(cx.intervals[0].iv);
            int t = cx.intervals[1].iv.lo;
            const State& rho = cx.states[0].state;
            const State& rho2 = cx.states[1].state;
            if (oa->contains(state_index(*C->obs, rho), state_index(*C->obs, rho2))) return false;
            PredPtr started = p_and(p_prev(init_for(*C, rho)), ops_conj(*C));
            PredEval ev(t2, z);
            if (!ev.eval_idx(started, iv)) return false;
            return eval_state_rel(*C->final_rel, z.state_at(t), rho2);
        };
    };
    return minimized(
        c, lim,
        [&](const Carrier& cc) { return refinement_core(abs_sys, conc_sys, cc, lim, stats); },
        make_replay);
}

std::string to_string(const Counterexample& cex) {
    std::string out = "clause: " + cex.clause + "\n";
    out += "carrier: horizon " + std::to_string(cex.carrier.horizon) +
           (cex.carrier.open_ended ? " (open)" : " (closed)") + "\n";
    for (const auto& ni : cex.intervals) out += ni.name + " = " + to_string(ni.iv) + "\n";
    for (const auto& ns : cex.streams) out += ns.name + " = " + to_string(ns.stream) + "\n";
    for (const auto& st : cex.states) out += st.name + " = " + to_string(*st.uni, st.state) + "\n";
    if (!cex.note.empty()) out += "note: " + cex.note + "\n";
    return out;
}

} // namespace ivdl
