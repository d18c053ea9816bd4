#include "doctest.h"

#include "core/parse.hpp"
#include "core/refine.hpp"
#include "support/gen.hpp"
#include "support/naive.hpp"
#include "support/util.hpp"

using namespace ivdl;

namespace {

// Replays a counterexample against the oracle semantics using only the
// objects named in the clause.
const Stream& named(const Counterexample& cx, const char* name) {
    for (const auto& ns : cx.streams)
        if (ns.name == name) return ns.stream;
    throw std::runtime_error(std::string("missing stream ") + name);
}

const Interval& named_iv(const Counterexample& cx, const char* name) {
    for (const auto& ni : cx.intervals)
        if (ni.name == name) return ni.iv;
    throw std::runtime_error(std::string("missing interval ") + name);
}

const NamedState& named_state(const Counterexample& cx, const char* name) {
    for (const auto& ns : cx.states)
        if (ns.name == name) return ns;
    throw std::runtime_error(std::string("missing state ") + name);
}

bool agrees_on(const Interval& iv, const Stream& a, const Stream& b) {
    for (int t = iv.lo; t <= iv.hi; ++t)
        for (size_t v = 0; v < a.uni->size(); ++v)
            if (a.cells[t * a.uni->size() + v] != b.cells[t * b.uni->size() + v]) return false;
    return true;
}

// The simulation clause is refuted by exhibiting (z, delta0, delta, y0) with
// no extending y; confirm that against brute force.
void replay_sim(const Counterexample& cx, const RelPtr& ref, const PredPtr& g, const PredPtr& h) {
    const Carrier c = cx.carrier;
    const Stream& z = named(cx, "z");
    const Stream& y0 = named(cx, "y0");
    const Interval& d0 = named_iv(cx, "delta0");
    const Interval& d = named_iv(cx, "delta");

    REQUIRE(naive::eval_pred(h, d, z, c));
    REQUIRE(naive::eval_rel(ref, d0, y0, z, c));
    // d0 must adjoin d
    bool adj = d0.is_empty() || d.is_empty() || d0.hi + 1 == d.lo;
    REQUIRE(adj);
    for (const Stream& y : naive::streams(y0.uni, c.horizon)) {
        if (!agrees_on(d0, y0, y)) continue;
        if (!naive::eval_rel(ref, d, y, z, c)) continue;
        if (g && !naive::eval_pred(g, d, y, c)) continue;
        FAIL("reported counterexample has an extending stream");
    }
}

gen::Rng shared_rng(4242);

} // namespace

TEST_CASE("joint universe appends the observables") {
    auto vars = gen::universe({{"x", 2}, {"y", 3}});
    auto obs = gen::universe({{"o", 2}});
    auto joint = make_joint(vars, obs);
    REQUIRE(joint->size() == 3);
    CHECK(joint->name(0) == "x");
    CHECK(joint->name(1) == "y");
    CHECK(joint->name(2) == "o");
    CHECK(joint->domain(2) == obs->domain(0));

    auto clash = gen::universe({{"x", 2}});
    CHECK_THROWS_AS(make_joint(vars, clash), Error);
}

TEST_CASE("specializing observables agrees with pinning them in a joint stream") {
    auto vars = gen::universe({{"x", 2}, {"y", 2}});
    auto obs = gen::universe({{"o", 3}});
    auto joint = make_joint(vars, obs);
    Carrier c{3, false};
    CarrierTables tc(c);
    auto rhos = all_states(*obs);

    gen::Rng rng(617);
    for (int i = 0; i < 120; ++i) {
        PredPtr t = gen::pred_limited(rng, joint, 3, static_cast<int>(vars->size()));
        while (gen::omega_nesting(t) > 2) t = gen::pred_limited(rng, joint, 3, 2);
        Stream zs = gen::stream(rng, vars, 3);
        const State& rho = rhos[rng.pick(static_cast<int>(rhos.size()))];
        PredPtr spec = specialize_obs(t, vars, obs, rho);
        Interval iv = tc.intervals()[rng.pick(tc.count())];

        // pin the observables to rho at every instant of a joint stream
        Stream js;
        js.uni = joint;
        js.horizon = 3;
        js.cells.resize(3 * joint->size());
        for (int tt = 0; tt < 3; ++tt) {
            for (size_t v = 0; v < vars->size(); ++v)
                js.cells[tt * joint->size() + v] = zs.cells[tt * vars->size() + v];
            js.cells[tt * joint->size() + vars->size()] = static_cast<uint8_t>(rho.pos[0]);
        }
        CHECK(naive::eval_pred(spec, iv, zs, c) == naive::eval_pred(t, iv, js, c));
        CHECK(eval_pred_once(spec, tc.index_of(iv), zs, tc) == naive::eval_pred(t, iv, js, c));
    }

    // lookback state over an observable cannot be specialized
    CHECK_THROWS_WITH_AS(specialize_obs(p_stable_var(joint, 2), vars, obs, rhos[0]),
                         "stable over an observable is not supported", Error);
}

TEST_CASE("process conjunction defaults to true") {
    auto vars = gen::universe({{"x", 2}});
    auto obs = gen::universe({{"o", 2}});
    SystemSpec s;
    s.name = "S";
    s.obs = obs;
    s.vars = vars;
    s.joint = make_joint(vars, obs);
    s.init = p_lit(s.joint, true);
    s.final_rel = rel_cmp(*vars, *obs, BoolExpr::CmpOp::Eq, {false, 0, 0, -1, {}},
                          {false, 1, 0, -1, {}});
    CHECK(term_equal(ops_conj(s), p_lit(vars, true)));
    s.ops.push_back({"p0", p_finite(vars)});
    CHECK(term_equal(ops_conj(s), p_finite(vars)));
    s.ops.push_back({"p1", p_empty(vars)});
    CHECK(term_equal(ops_conj(s), p_and(p_finite(vars), p_empty(vars))));
}

TEST_CASE("simulation checks agree with brute force and replay their failures") {
    auto lu = gen::universe({{"a", 2}});
    auto ru = gen::universe({{"b", 2}});
    CheckLimits lim;
    int fails = 0;
    for (const Carrier c : {Carrier{2, false}, Carrier{3, false}, Carrier{2, true}}) {
        for (int i = 0; i < 14; ++i) {
            RelPtr ref = gen::rel(shared_rng, lu, ru, 2);
            while (gen::compose_nesting(ref) > 1) ref = gen::rel(shared_rng, lu, ru, 2);
            PredPtr g = gen::pred(shared_rng, lu, 2);
            PredPtr h = gen::pred(shared_rng, ru, 2);
            while (gen::omega_nesting(g) > 2) g = gen::pred(shared_rng, lu, 2);
            while (gen::omega_nesting(h) > 2) h = gen::pred(shared_rng, ru, 2);

            Verdict v = check_simulates(ref, g, h, c, lim);
            CHECK(v.pass == naive::simulates(ref, g, h, c));
            if (!v.pass) {
                ++fails;
                REQUIRE(v.cex.has_value());
                CHECK(v.cex->clause == "simulation");
                replay_sim(*v.cex, ref, g, h);
            }
        }
    }
    CHECK(fails > 0); // the sample must exercise the counterexample path
}

TEST_CASE("extendability without the program conjunct") {
    auto lu = gen::universe({{"a", 2}});
    auto ru = gen::universe({{"b", 3}});
    CheckLimits lim;
    int fails = 0;
    for (const Carrier c : {Carrier{2, false}, Carrier{3, false}}) {
        for (int i = 0; i < 15; ++i) {
            RelPtr ref = gen::rel(shared_rng, lu, ru, 2);
            while (gen::compose_nesting(ref) > 1) ref = gen::rel(shared_rng, lu, ru, 2);
            PredPtr h = gen::pred(shared_rng, ru, 2);
            while (gen::omega_nesting(h) > 2) h = gen::pred(shared_rng, ru, 2);

            Verdict v = check_vdash(h, ref, c, lim);
            CHECK(v.pass == naive::vdash(h, ref, c));
            if (!v.pass) {
                ++fails;
                CHECK(v.cex->clause == "vdash");
                replay_sim(*v.cex, ref, nullptr, h);
            }
        }
    }
    CHECK(fails > 0);
}

TEST_CASE("pointwise strengthening obligation") {
    auto lu = gen::universe({{"a", 2}});
    auto ru = gen::universe({{"b", 2}});
    CheckLimits lim;
    int fails = 0;
    for (const Carrier c : {Carrier{2, false}, Carrier{3, false}, Carrier{2, true}}) {
        for (int i = 0; i < 14; ++i) {
            RelPtr ref = gen::rel(shared_rng, lu, ru, 2);
            while (gen::compose_nesting(ref) > 1) ref = gen::rel(shared_rng, lu, ru, 2);
            PredPtr g = gen::pred(shared_rng, lu, 2);
            PredPtr h = gen::pred(shared_rng, ru, 2);
            while (gen::omega_nesting(g) > 2) g = gen::pred(shared_rng, lu, 2);
            while (gen::omega_nesting(h) > 2) h = gen::pred(shared_rng, ru, 2);

            Verdict v = check_ref2(g, h, ref, c, lim);
            CHECK(v.pass == naive::ref2(g, h, ref, c));
            if (!v.pass) {
                ++fails;
                REQUIRE(v.cex.has_value());
                CHECK(v.cex->clause == "ref2");
                // replay: ref and h hold yet g does not
                const Carrier cc = v.cex->carrier;
                const Stream& z = named(*v.cex, "z");
                const Stream& y = named(*v.cex, "y");
                const Interval& d = named_iv(*v.cex, "delta");
                CHECK(naive::eval_rel(ref, d, y, z, cc));
                CHECK(naive::eval_pred(h, d, z, cc));
                CHECK(!naive::eval_pred(g, d, y, cc));
            }
        }
    }
    CHECK(fails > 0);
}

TEST_CASE("a satisfiable concrete guard that the abstract side forbids") {
    auto u = gen::universe({{"x", 2}});
    auto ref = r_identity(u);
    auto h = p_nonempty(p_always(u, sp_cmp(*u, BoolExpr::CmpOp::Eq, 0, Value::integer(0))));
    auto g = p_nonempty(p_sometime(u, sp_cmp(*u, BoolExpr::CmpOp::Eq, 0, Value::integer(1))));
    Verdict v = check_simulates(ref, g, h, Carrier{2, false}, CheckLimits{});
    REQUIRE(!v.pass);
    CHECK(v.cex->clause == "simulation");
    CHECK(check_simulates(ref, h, h, Carrier{2, false}, CheckLimits{}).pass);
}

TEST_CASE("stepwise system checks match brute force on random tiny systems") {
    auto obs = gen::universe({{"o", 2}});
    CheckLimits lim;
    int fails = 0;
    for (const Carrier c : {Carrier{2, false}, Carrier{3, false}}) {
        for (int i = 0; i < 8; ++i) {
            auto au = gen::universe({{"x", 2}});
            auto cu = gen::universe({{"w", i % 2 ? 3 : 2}});
            SystemSpec abs_sys = gen::system(shared_rng, obs, au, "A");
            SystemSpec conc_sys = gen::system(shared_rng, obs, cu, "C");
            RelPtr ref = gen::rel(shared_rng, au, cu, 2);
            while (gen::compose_nesting(ref) > 1) ref = gen::rel(shared_rng, au, cu, 2);

            Verdict v = check_forward_simulation(abs_sys, conc_sys, ref, c, lim);
            CHECK(v.pass == naive::forward_sim(abs_sys, conc_sys, ref, c));
            if (!v.pass) {
                ++fails;
                REQUIRE(v.cex.has_value());
                const std::string& cl = v.cex->clause;
                bool known = cl == "initialisation" || cl == "simulation" || cl == "finalisation";
                REQUIRE(known);
                const Carrier cc = v.cex->carrier;
                if (cl == "initialisation") {
                    // no abstract start covers this concrete one
                    const Stream& z = named(*v.cex, "z");
                    const Interval& d = named_iv(*v.cex, "delta");
                    const NamedState& sig = named_state(*v.cex, "sigma");
                    CHECK(naive::eval_pred(init_for(conc_sys, sig.state), d, z, cc));
                    bool covered = false;
                    for (const Stream& y : naive::streams(abs_sys.vars, cc.horizon))
                        covered = covered ||
                                  (naive::eval_rel(ref, d, y, z, cc) &&
                                   naive::eval_pred(init_for(abs_sys, sig.state), d, y, cc));
                    CHECK(!covered);
                } else if (cl == "simulation") {
                    replay_sim(*v.cex, ref, ops_conj(abs_sys), ops_conj(conc_sys));
                } else {
                    // related streams finalise differently at one point
                    const Stream& z = named(*v.cex, "z");
                    const Stream& y = named(*v.cex, "y");
                    const Interval& d = named_iv(*v.cex, "delta");
                    const Interval& pt = v.cex->intervals[1].iv;
                    const NamedState& sig = named_state(*v.cex, "sigma");
                    CHECK(naive::eval_rel(ref, d, y, z, cc));
                    CHECK(pt.lo == pt.hi);
                    CHECK(d.lo <= pt.lo);
                    CHECK(pt.hi <= d.hi);
                    State zc = z.state_at(pt.lo);
                    State yc = y.state_at(pt.lo);
                    CHECK(eval_state_rel(*conc_sys.final_rel, zc, sig.state));
                    CHECK(!eval_state_rel(*abs_sys.final_rel, yc, sig.state));
                }
            }
        }
    }
    CHECK(fails > 0);
}

TEST_CASE("observation sets and containment match brute force") {
    auto obs = gen::universe({{"o", 2}});
    CheckLimits lim;
    Carrier c{2, false};
    int contained = 0, separated = 0;
    for (int i = 0; i < 20; ++i) {
        auto au = gen::universe({{"x", 2}});
        auto cu = gen::universe({{"w", 2}});
        SystemSpec abs_sys = gen::system(shared_rng, obs, au, "A");
        SystemSpec conc_sys = gen::system(shared_rng, obs, cu, "C");

        ObsSet oa = observations(abs_sys, c, lim);
        auto na = naive::observations(abs_sys, c);
        REQUIRE(oa.n == 2);
        for (int b = 0; b < oa.n; ++b)
            for (int a = 0; a < oa.n; ++a)
                CHECK(oa.contains(b, a) == (na.count({b, a}) > 0));

        Verdict v = check_data_refinement(abs_sys, conc_sys, c, lim);
        CHECK(v.pass == naive::refinement(abs_sys, conc_sys, c));
        if (v.pass) {
            ++contained;
        } else {
            ++separated;
            CHECK(v.cex->clause == "observation");
        }
    }
    CHECK(contained + separated == 20);
    CHECK(separated > 0);
}

TEST_CASE("every system simulates itself under identity") {
    auto obs = gen::universe({{"o", 2}});
    auto au = gen::universe({{"x", 2}});
    for (int i = 0; i < 5; ++i) {
        SystemSpec s = gen::system(shared_rng, obs, au, "S");
        CHECK(check_forward_simulation(s, s, r_identity(au), Carrier{2, false}, CheckLimits{}).pass);
        CHECK(check_data_refinement(s, s, Carrier{2, false}, CheckLimits{}).pass);
    }
}

TEST_CASE("observation containment composes") {
    auto obs = gen::universe({{"o", 2}});
    Carrier c{2, false};
    CheckLimits lim;
    int chained = 0;
    for (int i = 0; i < 30 && chained < 4; ++i) {
        SystemSpec a = gen::system(shared_rng, obs, gen::universe({{"x", 2}}), "A");
        SystemSpec b = gen::system(shared_rng, obs, gen::universe({{"y", 2}}), "B");
        SystemSpec d = gen::system(shared_rng, obs, gen::universe({{"w", 2}}), "D");
        if (check_data_refinement(a, b, c, lim).pass && check_data_refinement(b, d, c, lim).pass) {
            CHECK(check_data_refinement(a, d, c, lim).pass);
            ++chained;
        }
    }
    CHECK(chained > 0);
}

TEST_CASE("a mode switching pair fails stepwise under the trivial relation") {
    SpecFile spec = parse_spec(support::read_file(support::sample("mode_switch.ivdl")),
                               "mode_switch.ivdl");
    REQUIRE(spec.systems.size() >= 2);
    const SystemSpec& abs_sys = spec.systems[0];
    const SystemSpec& conc_sys = spec.systems[1];
    RelPtr trivial = r_lit(abs_sys.vars, conc_sys.vars, true);
    Verdict v = check_forward_simulation(abs_sys, conc_sys, trivial, spec.carrier, CheckLimits{});
    REQUIRE(!v.pass);
    CHECK(v.cex->clause == "finalisation");
}

TEST_CASE("enumeration size gates") {
    auto obs = gen::universe({{"o", 2}});
    auto au = gen::universe({{"x", 2}});
    SystemSpec s = gen::system(shared_rng, obs, au, "S");
    CheckLimits tiny;
    tiny.budget = 3;
    CHECK_THROWS_AS(check_data_refinement(s, s, Carrier{3, false}, tiny), Error);
    try {
        check_forward_simulation(s, s, r_identity(au), Carrier{3, false}, tiny);
        FAIL("expected a budget error");
    } catch (const Error& e) {
        CHECK(e.kind == Error::Kind::Budget);
    }
}
