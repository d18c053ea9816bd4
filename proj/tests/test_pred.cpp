#include "doctest.h"

#include "core/pred.hpp"
#include "support/compare.hpp"
#include "support/gen.hpp"
#include "support/naive.hpp"

using namespace ivdl;

namespace {

struct Fix {
    Carrier closed{3, false};
    Carrier open{3, true};
    UniversePtr u = gen::universe({{"x", 2}});
    CarrierTables tc{closed};
    CarrierTables to{open};

    // x over the three points, by domain position
    Stream mk(std::initializer_list<int> xs) {
        Stream s;
        s.uni = u;
        s.horizon = 3;
        for (int p : xs) s.cells.push_back(static_cast<uint8_t>(p));
        return s;
    }

    BoolExprPtr x_is(int k) { return sp_cmp(*u, BoolExpr::CmpOp::Eq, 0, Value::integer(k)); }

    bool ev(const PredPtr& t, const Interval& iv, const Stream& s, bool open_time = false) {
        PredEval e(open_time ? to : tc, s);
        return e.eval(t, iv);
    }
};

} // namespace

TEST_CASE("pointwise and apparent quantifiers at the edges") {
    Fix f;
    Stream s = f.mk({0, 1, 1});
    Interval e = Interval::empty();
    Interval whole = Interval::range(0, 2);

    // true on empty: always, definitely; false on empty: sometime, possibly
    CHECK(f.ev(p_always(f.u, f.x_is(0)), e, s));
    CHECK(f.ev(p_definitely(f.u, f.x_is(0)), e, s));
    CHECK(!f.ev(p_sometime(f.u, f.x_is(0)), e, s));
    CHECK(!f.ev(p_possibly(f.u, f.x_is(0)), e, s));

    CHECK(!f.ev(p_always(f.u, f.x_is(1)), whole, s));
    CHECK(f.ev(p_always(f.u, f.x_is(1)), Interval::range(1, 2), s));
    CHECK(f.ev(p_sometime(f.u, f.x_is(0)), whole, s));
    CHECK(!f.ev(p_sometime(f.u, f.x_is(0)), Interval::range(1, 2), s));

    // on [0,2] x shows both values, so neither value is definite but both
    // are possible
    CHECK(!f.ev(p_definitely(f.u, f.x_is(1)), whole, s));
    CHECK(f.ev(p_possibly(f.u, f.x_is(1)), whole, s));
    CHECK(f.ev(p_possibly(f.u, f.x_is(0)), whole, s));
    CHECK(f.ev(p_definitely(f.u, f.x_is(1)), Interval::range(1, 2), s));
}

TEST_CASE("interval class predicates") {
    Fix f;
    Stream s = f.mk({0, 0, 0});
    Interval e = Interval::empty();
    Interval touch = Interval::range(1, 2); // touches the last point
    Interval inner = Interval::range(0, 1);

    CHECK(f.ev(p_empty(f.u), e, s));
    CHECK(!f.ev(p_empty(f.u), inner, s));
    CHECK(f.ev(p_finite(f.u), e, s));
    CHECK(f.ev(p_finite(f.u), touch, s));
    CHECK(!f.ev(p_infinite(f.u), touch, s));

    // unbounded continuations exist only on an open carrier
    CHECK(f.ev(p_infinite(f.u), touch, s, true));
    CHECK(!f.ev(p_finite(f.u), touch, s, true));
    CHECK(f.ev(p_finite(f.u), inner, s, true));
    CHECK(f.ev(p_finite(f.u), e, s, true));

    CHECK(!f.ev(p_nonempty(p_lit(f.u, true)), e, s));
    CHECK(f.ev(p_nonempty(p_lit(f.u, true)), inner, s));
}

TEST_CASE("chop splits inside the interval, with the unbounded escape") {
    Fix f;
    Stream s = f.mk({0, 1, 1});
    auto seg0 = p_nonempty(p_always(f.u, f.x_is(0)));
    auto seg1 = p_nonempty(p_always(f.u, f.x_is(1)));
    auto chop = p_chop(seg0, seg1);

    CHECK(f.ev(chop, Interval::range(0, 2), s));
    CHECK(f.ev(chop, Interval::range(0, 1), s));
    CHECK(!f.ev(chop, Interval::range(1, 2), s)); // no 0-segment inside
    CHECK(!f.ev(chop, Interval::empty(), s));

    // the empty interval only splits into empty halves
    CHECK(f.ev(p_chop(p_empty(f.u), p_empty(f.u)), Interval::empty(), s));

    // an unbounded interval may satisfy the left part as a whole
    auto whole_zero = p_always(f.u, f.x_is(0));
    auto never = p_and(p_nonempty(p_lit(f.u, true)), p_empty(f.u)); // unsatisfiable
    Stream z = f.mk({0, 0, 0});
    CHECK(!f.ev(p_chop(whole_zero, never), Interval::range(0, 2), z));
    CHECK(f.ev(p_chop(whole_zero, never), Interval::range(0, 2), z, true));
}

TEST_CASE("iteration covers partitions and accepts the empty interval") {
    Fix f;
    Stream s = f.mk({0, 1, 0});
    auto unit = p_nonempty(p_lit(f.u, true)); // any single nonempty piece
    CHECK(f.ev(p_omega(unit), Interval::empty(), s));
    CHECK(f.ev(p_omega(unit), Interval::range(0, 2), s));

    // pieces of x-constant runs: [0,2] needs three, [1,1] one
    auto run = p_nonempty(p_or(p_always(f.u, f.x_is(0)), p_always(f.u, f.x_is(1))));
    CHECK(f.ev(p_omega(run), Interval::range(0, 2), s));

    // a body rejecting the empty interval but demanding width 2 cannot tile
    // an odd interval
    auto two = p_chop(unit, unit);
    auto exactly_two = p_and(two, p_not(p_chop(two, unit)));
    CHECK(f.ev(p_omega(exactly_two), Interval::range(0, 1), s));
    CHECK(!f.ev(p_omega(exactly_two), Interval::range(0, 2), s));
}

TEST_CASE("lookback operators read adjoining history") {
    Fix f;
    Stream s = f.mk({0, 1, 1});
    auto held0 = p_prev_holds(f.u, f.x_is(0));
    auto held1 = p_prev_holds(f.u, f.x_is(1));

    // needs a nonempty adjoining prefix
    CHECK(!f.ev(held0, Interval::range(0, 2), s));
    CHECK(f.ev(held0, Interval::range(1, 2), s));
    CHECK(!f.ev(held1, Interval::range(1, 2), s));
    CHECK(f.ev(held1, Interval::range(2, 2), s));

    // prev admits the empty prefix too
    auto started = p_prev(p_empty(f.u));
    CHECK(f.ev(started, Interval::range(0, 2), s));
    auto from_zero = p_prev(p_nonempty(p_always(f.u, f.x_is(0))));
    CHECK(!f.ev(from_zero, Interval::range(0, 2), s));
    CHECK(f.ev(from_zero, Interval::range(1, 2), s));

    // every interval precedes the empty interval
    CHECK(f.ev(p_prev(p_nonempty(p_always(f.u, f.x_is(1)))), Interval::empty(), s));
    CHECK(f.ev(held1, Interval::empty(), s));
    CHECK(!f.ev(p_prev_holds(f.u, sp_lit(false)), Interval::empty(), s));
}

TEST_CASE("stability carries the inherited value through the interval") {
    Fix f;
    Stream s = f.mk({0, 0, 1});
    auto st = p_stable_var(f.u, 0);

    CHECK(f.ev(st, Interval::range(1, 1), s));  // 0 before, 0 throughout
    CHECK(!f.ev(st, Interval::range(1, 2), s)); // value moves inside
    CHECK(!f.ev(st, Interval::range(2, 2), s)); // inherited 0, holds 1
    CHECK(!f.ev(st, Interval::range(0, 0), s)); // no history at the origin
    CHECK(f.ev(st, Interval::empty(), s));      // any nonempty history counts

    CHECK(f.ev(p_stable_set(f.u, {}), Interval::range(0, 2), s)); // empty set
    CHECK(f.ev(p_stable_set(f.u, {0}), Interval::range(1, 1), s));
    CHECK(!f.ev(p_stable_set(f.u, {0}), Interval::range(2, 2), s));
}

TEST_CASE("guards of compiled programs read apparent states") {
    auto u = gen::universe({{"x", 2}});
    auto c = sp_cmp(*u, BoolExpr::CmpOp::Eq, 0, Value::integer(1));
    CHECK(term_equal(normalize_guard(u, c), p_possibly(u, c)));
    CHECK(!term_equal(normalize_guard(u, c), p_sometime(u, c)));
}

TEST_CASE("past_free spots lookback anywhere in the term") {
    auto u = gen::universe({{"x", 2}});
    auto c = sp_cmp(*u, BoolExpr::CmpOp::Eq, 0, Value::integer(0));
    CHECK(past_free(*p_always(u, c)));
    CHECK(past_free(*p_chop(p_possibly(u, c), p_omega(p_empty(u)))));
    CHECK(!past_free(*p_prev(p_lit(u, true))));
    CHECK(!past_free(*p_prev_holds(u, c)));
    CHECK(!past_free(*p_stable_var(u, 0)));
    CHECK(!past_free(*p_and(p_lit(u, true), p_not(p_stable_set(u, {0})))));
}

TEST_CASE("term printing round-trips the surface syntax") {
    auto u = gen::universe({{"m", 3}});
    auto one = p_nonempty(p_always(u, sp_cmp(*u, BoolExpr::CmpOp::Eq, 0, Value::integer(1))));
    CHECK(to_string(*one) == "nonempty(always(m = 1))");
    auto guard = p_possibly(u, sp_cmp(*u, BoolExpr::CmpOp::Lt, 0, Value::integer(2)));
    CHECK(to_string(*p_chop(guard, one)) == "(possibly(m < 2) ; nonempty(always(m = 1)))");
    CHECK(to_string(*p_omega(p_empty(u))) == "omega(empty)");
    CHECK(to_string(*p_stable_var(u, 0)) == "stable(m)");
}

TEST_CASE("session, one-shot and oracle agree across random terms") {
    auto rep = support::compare_triples(309, 2000);
    CHECK(rep.run == 2000);
    CHECK(rep.omega_violations == 0);
    if (rep.mismatches != 0) FAIL_CHECK(rep.first_bad);
    CHECK(rep.mismatches == 0);
}

TEST_CASE("session memo matches one-shot evaluation across every interval") {
    // same term asked at every interval of the carrier through one session
    gen::Rng rng(41);
    auto u = gen::universe({{"a", 2}, {"b", 2}});
    for (const Carrier c : {Carrier{3, false}, Carrier{3, true}}) {
        CarrierTables tables(c);
        for (int i = 0; i < 150; ++i) {
            PredPtr t = gen::pred(rng, u, 3);
            while (gen::omega_nesting(t) > 2) t = gen::pred(rng, u, 3);
            Stream s = gen::stream(rng, u, c.horizon);
            PredEval ev(tables, s);
            for (int idx = 0; idx < tables.count(); ++idx) {
                bool a = ev.eval_idx(t, idx);
                bool b = eval_pred_once(t, idx, s, tables);
                bool r = naive::eval_pred(t, tables.intervals()[idx], s, c);
                CHECK(a == r);
                CHECK(b == r);
            }
            CHECK(ev.stats().max_omega_iters <= tables.count());
        }
    }
}

TEST_CASE("validity scanning finds the first counterexample") {
    auto u = gen::universe({{"x", 2}});
    Carrier c{2, false};
    auto c0 = sp_cmp(*u, BoolExpr::CmpOp::Eq, 0, Value::integer(0));

    // sometime k  implies  possibly k
    Verdict v = check_valid_implication(p_sometime(u, c0), p_possibly(u, c0), c, 1000);
    CHECK(v.pass);

    // always k does not imply sometime k: the empty interval separates them
    v = check_valid_implication(p_always(u, c0), p_sometime(u, c0), c, 1000);
    REQUIRE(!v.pass);
    REQUIRE(v.cex.has_value());
    CHECK(v.cex->clause == "implication");
    CHECK(v.cex->intervals[0].iv == Interval::empty());

    // budget gate
    auto w = gen::universe({{"a", 4}, {"b", 4}, {"c", 4}});
    CHECK_THROWS_AS(check_valid_implication(p_lit(w, true), p_lit(w, true), Carrier{3, false}, 10),
                    Error);
}

TEST_CASE("splitting and joining closure scans") {
    auto u = gen::universe({{"x", 2}});
    Carrier c{3, false};
    auto c0 = sp_cmp(*u, BoolExpr::CmpOp::Eq, 0, Value::integer(0));

    CHECK(check_splits(p_always(u, c0), c, 100000).pass);

    // a body true on the empty interval absorbs every interval into its
    // iteration, so the joining side condition needs the nonempty guard
    Verdict v = check_joins(p_always(u, c0), c, 100000);
    REQUIRE(!v.pass);
    CHECK(v.cex->clause == "joins");
    CHECK(check_joins(p_nonempty(p_always(u, c0)), c, 100000).pass);

    // a single point cannot split into two nonempty halves
    v = check_splits(p_nonempty(p_lit(u, true)), c, 100000);
    REQUIRE(!v.pass);
    CHECK(v.cex->clause == "splits");
    CHECK(v.cex->intervals[0].iv.size() == 1);

    // "at most one point" does not survive joining
    auto two = p_chop(p_nonempty(p_lit(u, true)), p_nonempty(p_lit(u, true)));
    v = check_joins(p_not(two), c, 100000);
    REQUIRE(!v.pass);
    CHECK(v.cex->clause == "joins");
}
