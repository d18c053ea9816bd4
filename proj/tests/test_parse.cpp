#include "doctest.h"

#include <string>

#include "core/parse.hpp"
#include "support/util.hpp"

using namespace ivdl;

namespace {

// Fails parsing and hands back the error for inspection.
Error capture(const std::string& text) {
    try {
        parse_spec(text, "t.ivdl");
    } catch (const Error& e) {
        return e;
    }
    throw std::runtime_error("expected the text to be rejected");
}

void expect_err(const std::string& text, Error::Kind kind, const std::string& fragment) {
    Error e = capture(text);
    CAPTURE(fragment);
    CAPTURE(e.what());
    CHECK(e.kind == kind);
    CHECK(std::string(e.what()).find(fragment) != std::string::npos);
    CHECK(std::string(e.what()).rfind("t.ivdl:", 0) == 0);
}

const std::string base = R"(carrier 2 closed

observable O : { 0, 1 }

var x : { 0, 1 }
var y : { 0, 1 }

system A {
  use x
  init empty
  process p : finite
  final x = O
}

system B {
  use y
  init empty
  process p : finite
  final y = O
}

relation r from A to B : nonempty(always(left.x = right.y))
)";

} // namespace

TEST_CASE("each sample parses to the expected shape") {
    SpecFile ms = parse_spec(support::read_file(support::sample("mode_switch.ivdl")),
                             "mode_switch.ivdl");
    CHECK(ms.carrier.horizon == 3);
    CHECK(!ms.carrier.open_ended);
    CHECK(ms.systems.size() == 4);
    CHECK(ms.relations.size() == 2);
    CHECK(ms.directives.size() == 7);
    CHECK(ms.directives[0].kind == "forward-sim");
    CHECK(ms.directives[0].name == "forward-sim"); // unnamed directives take their kind
    CHECK(ms.directives[1].name == "whole-sim");
    CHECK(ms.directives[6].kind == "refinement");
    CHECK(ms.systems[0].ops.size() == 2);
    CHECK(ms.systems[0].obs->size() == 1);
    CHECK(ms.systems[0].vars->size() == 3);
    CHECK(ms.systems[0].joint->size() == 4);

    SpecFile sw = parse_spec(support::read_file(support::sample("mode_switch_swapped.ivdl")),
                             "mode_switch_swapped.ivdl");
    CHECK(sw.directives.size() == 3);
    CHECK(sw.systems.size() == 2);

    SpecFile ar = parse_spec(support::read_file(support::sample("apparent_reads.ivdl")),
                             "apparent_reads.ivdl");
    CHECK(ar.preds.size() == 4);
    CHECK(ar.preds[0].name == "possibly_lt");
    CHECK(ar.preds[0].uni->size() == 2);
    CHECK(ar.systems.empty());
    CHECK(ar.directives.empty());

    SpecFile ps = parse_spec(support::read_file(support::sample("program_sugar.ivdl")),
                             "program_sugar.ivdl");
    CHECK(ps.systems.size() == 2);
    CHECK(ps.directives.size() == 1);
    CHECK(ps.directives[0].kind == "refinement");
}

TEST_CASE("pretty printing reaches a fixed point and matches the frozen output") {
    for (const char* name : {"mode_switch.ivdl", "mode_switch_swapped.ivdl",
                             "apparent_reads.ivdl", "program_sugar.ivdl"}) {
        CAPTURE(name);
        SpecFile first = parse_spec(support::read_file(support::sample(name)), name);
        std::string once = pretty_print(first);
        SpecFile second = parse_spec(once, name);
        std::string twice = pretty_print(second);
        CHECK(once == twice);
        CHECK(second.systems.size() == first.systems.size());
        CHECK(second.directives.size() == first.directives.size());
    }

    SpecFile ms = parse_spec(support::read_file(support::sample("mode_switch.ivdl")),
                             "mode_switch.ivdl");
    CHECK(pretty_print(ms) == support::read_file(support::golden("mode_switch.pretty.txt")));
    SpecFile ps = parse_spec(support::read_file(support::sample("program_sugar.ivdl")),
                             "program_sugar.ivdl");
    CHECK(pretty_print(ps) == support::read_file(support::golden("program_sugar.pretty.txt")));
}

TEST_CASE("program statements compile to their interval forms") {
    std::string text = R"(carrier 2 closed
var v : { 0, 1 }
var w : { 0, 1 }
system S {
  use v, w
  init empty
  process a skip
  process b v := 1
  process c if v = 1 then skip else w := 0 fi
  process d do v := 0 ; v := 1 od
  process e skip |~| [ v = 0 ]
  process f skip with always(v = 0)
  final v = v
}
)";
    SpecFile s = parse_spec(text, "t.ivdl");
    REQUIRE(s.systems.size() == 1);
    const auto& ops = s.systems[0].ops;
    REQUIRE(ops.size() == 6);
    auto body = [&](const char* n) -> const PredPtr& {
        for (const auto& [pn, b] : ops)
            if (pn == n) return b;
        throw std::runtime_error("missing process");
    };

    CHECK(body("a")->kind == PredTerm::Kind::Empty);
    CHECK(to_string(*body("b")) == "nonempty(always(v = 1))");
    CHECK(to_string(*body("c")) ==
          "((possibly(v = 1) ; empty) \\/ (possibly(!(v = 1)) ; nonempty(always(w = 0))))");
    CHECK(body("d")->kind == PredTerm::Kind::Omega);
    CHECK(to_string(*body("d")) == "omega((nonempty(always(v = 0)) ; nonempty(always(v = 1))))");
    CHECK(body("e")->kind == PredTerm::Kind::Or);
    CHECK(to_string(*body("e")) == "(empty \\/ possibly(v = 0))");
    CHECK(body("f")->kind == PredTerm::Kind::And);
    CHECK(to_string(*body("f")) == "(empty /\\ always(v = 0))");
}

TEST_CASE("comparisons fold constants onto the right") {
    std::string text = R"(carrier 2 closed
var u : { 0, 1, 2 }
pred a over u : always(0 < u)
pred b over u : always(1 <= u)
pred c over u : always(u != 2)
pred d over u : always(true)
)";
    SpecFile s = parse_spec(text, "t.ivdl");
    CHECK(to_string(*s.preds[0].term) == "always(!(u <= 0))");
    CHECK(to_string(*s.preds[1].term) == "always(!(u < 1))");
    CHECK(to_string(*s.preds[2].term) == "always(u != 2)");
    CHECK(to_string(*s.preds[3].term) == "always(true)");
}

TEST_CASE("equivalence connective expands in state expressions") {
    std::string text = R"(carrier 2 closed
var u : { 0, 1 }
var v : { 0, 1 }
pred a over u, v : always(u = 1 <-> v = 1)
)";
    SpecFile s = parse_spec(text, "t.ivdl");
    // both orientations satisfied or both refuted
    CHECK(to_string(*s.preds[0].term) == "always((u = 1 <-> v = 1))");
}

TEST_CASE("lexical and structural rejections") {
    expect_err("carrier 2 closed\nvar x : { 0 @ 1 }\n", Error::Kind::Parse,
               "unexpected character '@'");
    expect_err("carrier 0 closed\n", Error::Kind::Parse, "expected a horizon of at least 1");
    expect_err("carrier 2\nvar x : { 0 }\n", Error::Kind::Parse, "expected 'open' or 'closed'");
    expect_err("var x : { 0 }\n", Error::Kind::Parse, "expected 'carrier'");
    expect_err("carrier 2 closed\nwidget w\n", Error::Kind::Parse,
               "expected a declaration (var, observable, pred, system, relation, check)");
    expect_err("carrier 2 closed\nvar always : { 0 }\n", Error::Kind::Parse,
               "'always' is a reserved word");
    expect_err("carrier 2 closed\nvar x : { }\n", Error::Kind::Parse, "expected a value");
}

TEST_CASE("name resolution rejections") {
    expect_err("carrier 2 closed\nvar x : { 0 }\nvar x : { 1 }\n", Error::Kind::Resolve,
               "'x' is already declared (line 2)");
    expect_err("carrier 2 closed\nvar x : { 0, 0 }\n", Error::Kind::Resolve,
               "domain of 'x' repeats the value 0");
    expect_err("carrier 2 closed\nvar x : { 0 }\npred p over zz : empty\n", Error::Kind::Resolve,
               "unknown variable 'zz'");
    expect_err("carrier 2 closed\nvar x : { 0 }\npred p over x, x : empty\n", Error::Kind::Resolve,
               "variable 'x' listed twice");
    expect_err("carrier 2 closed\nvar x : { 0, 1 }\npred p over x : always(x = 7)\n",
               Error::Kind::Resolve, "constant 7 is not in the domain of 'x'");
    expect_err("carrier 2 closed\nvar x : { 0, 1 }\npred p over x : always(1 = 0)\n",
               Error::Kind::Resolve, "comparison needs a variable");
    expect_err(base + "check refinement A Z\n", Error::Kind::Resolve, "unknown system 'Z'");
    expect_err(base + "check forward-sim A B rr\n", Error::Kind::Resolve, "unknown relation 'rr'");
    expect_err(base + "check forward-sim B A r\n", Error::Kind::Resolve,
               "relation 'r' is from 'A' to 'B', not these systems");
    expect_err(base + "check simulates r B.p B.p\n", Error::Kind::Resolve,
               "the first process must come from 'A' (the relation's from side)");
    expect_err(base + "check vdash r A.p\n", Error::Kind::Resolve,
               "the process must come from 'B' (the relation's to side)");
    expect_err(base + "check simulates r A.q B.p\n", Error::Kind::Resolve,
               "system 'A' has no process 'q'");
}

TEST_CASE("system block rejections") {
    expect_err("carrier 2 closed\nvar x : { 0 }\nsystem S {\n  use x\n  init empty\n  final x = x\n}\n",
               Error::Kind::Parse, "system 'S' needs at least one process");
    expect_err("carrier 2 closed\nvar x : { 0 }\nsystem S {\n  use x\n  init empty\n"
               "  process p : finite\n  process p : empty\n  final x = x\n}\n",
               Error::Kind::Resolve, "process 'p' is already defined in system 'S'");
    expect_err("carrier 2 closed\nvar x : { 0, 1 }\nsystem S {\n  use x\n  init empty\n"
               "  process p x := y\n  final x = x\n}\n",
               Error::Kind::Parse, "only assignments of literal values are supported");
    expect_err("carrier 2 closed\nvar x : { 0 }\nsystem S {\n  use x\n  init empty\n"
               "  process p : finite\n  final x = x\n}\nobservable O : { 0 }\n",
               Error::Kind::Parse, "observables must be declared before the first system");
    expect_err(base + "check 5\n", Error::Kind::Parse, "expected a directive kind or name");
    expect_err(base + "check extra widget A B\n", Error::Kind::Parse,
               "expected a directive kind (refinement, forward-sim, simulates, vdash, ref2)");
}

TEST_CASE("relation expressions name their sides") {
    std::string head = "carrier 2 closed\nvar x : { 0, 1 }\nvar y : { 0, 1 }\n"
                       "system A {\n  use x\n  init empty\n  process p : finite\n  final x = x\n}\n"
                       "system B {\n  use y\n  init empty\n  process p : finite\n  final y = y\n}\n";
    SpecFile ok = parse_spec(head + "relation r from A to B : always(left.x = right.y)\n", "t.ivdl");
    CHECK(ok.relations.size() == 1);
    CHECK(ok.relations[0].term->kind == RelTerm::Kind::AlwaysRel);

    expect_err(head + "relation r from A to B : always(left.y = right.y)\n", Error::Kind::Resolve,
               "no variable 'y' on the left side");
    expect_err(head + "relation r from A to B : always(right.x = left.x)\n", Error::Kind::Resolve,
               "no variable 'x' on the right side");

    // an unqualified name owned by one side resolves there
    SpecFile loose = parse_spec(head + "relation r from A to B : always(x = y)\n", "t.ivdl");
    CHECK(loose.relations.size() == 1);

    // shared names must be qualified
    std::string shared = "carrier 2 closed\nvar x : { 0, 1 }\n"
                         "system A {\n  use x\n  init empty\n  process p : finite\n  final x = x\n}\n";
    expect_err(shared + "relation r from A to A : always(x = 0)\n", Error::Kind::Resolve,
               "'x' exists on both sides; write left.x or right.x");
    SpecFile q = parse_spec(shared + "relation r from A to A : always(left.x = right.x)\n",
                            "t.ivdl");
    CHECK(q.relations.size() == 1);
}

TEST_CASE("positions point at the offending token") {
    Error e = capture("carrier 2 closed\nvar x : { 0, 0 }\n");
    CHECK(std::string(e.what()).rfind("t.ivdl:2:5:", 0) == 0);
    e = capture("carrier 2 closed\n\nvar x : { 0 @ 1 }\n");
    CHECK(std::string(e.what()).rfind("t.ivdl:3:13:", 0) == 0);
}
