#include "doctest.h"

#include <algorithm>
#include <set>

#include "core/laws.hpp"
#include "core/run.hpp"

using namespace ivdl;

namespace {

LawOptions quick() {
    LawOptions o;
    o.seed = 7;
    o.random_instances = 30;
    return o;
}

const std::set<std::string> negatives = {
    "seq-comp-no-joins", "always-definitely", "possibly-sometime",
    "ref-weaken", "disjunction-one-sided",
};

} // namespace

TEST_CASE("the catalog is fixed and queryable") {
    auto ids = law_ids();
    CHECK(ids.size() == 22);
    std::set<std::string> uniq(ids.begin(), ids.end());
    CHECK(uniq.size() == ids.size());
    for (const auto& id : ids) CHECK(is_law_id(id));
    CHECK(!is_law_id("chop"));
    CHECK(!is_law_id(""));
    for (const auto& neg : negatives) CHECK(uniq.count(neg) == 1);
    CHECK(uniq.count("soundness") == 1);
    CHECK(uniq.count("iteration") == 1);
}

TEST_CASE("every law reaches its expected polarity on a reduced run") {
    for (const auto& id : law_ids()) {
        CAPTURE(id);
        LawResult r = run_law(id, quick());
        CHECK(r.law == id);
        CHECK(r.status == "pass");
        CHECK(r.instances > 0);
        if (negatives.count(id)) {
            CHECK(r.polarity == "fails");
            CHECK(r.failures >= 1);
            CHECK(!r.witness.empty());
        } else {
            CHECK(r.polarity == "holds");
            CHECK(r.failures == 0);
            CHECK(r.non_vacuous > 0);
        }
    }
}

TEST_CASE("law runs are deterministic for a fixed seed") {
    for (const std::string id : {"iteration", "stability", "seq-comp-no-joins"}) {
        LawResult a = run_law(id, quick());
        LawResult b = run_law(id, quick());
        CHECK(a.instances == b.instances);
        CHECK(a.non_vacuous == b.non_vacuous);
        CHECK(a.failures == b.failures);
        CHECK(a.witness == b.witness);
        CHECK(a.status == b.status);
    }
    LawOptions other = quick();
    other.seed = 8;
    LawResult a = run_law("soundness", quick());
    LawResult c = run_law("soundness", other);
    CHECK(a.instances == c.instances); // same schedule, different draws
}

TEST_CASE("unknown law ids are rejected") {
    CHECK_THROWS_AS(run_law("associativity", quick()), Error);
    try {
        run_law("associativity", quick());
    } catch (const Error& e) {
        CHECK(e.kind == Error::Kind::Resolve);
        CHECK(std::string(e.what()).find("associativity") != std::string::npos);
    }
}

TEST_CASE("an instance budget cuts a law short as inconclusive") {
    LawOptions o = quick();
    o.instance_budget = 5;
    LawResult r = run_law("iteration", o);
    CHECK(r.status == "inconclusive");
    CHECK(r.instances <= 5);
    std::vector<LawResult> rep{r};
    CHECK(exit_code(rep) == 3);
}

TEST_CASE("exit codes rank inconclusive above failure") {
    LawResult pass1{"a", "holds", 10, 5, 0, "pass", "", "", 0.0};
    LawResult fail1{"b", "holds", 10, 5, 1, "fail", "w", "", 0.0};
    LawResult inc1{"c", "holds", 2, 1, 0, "inconclusive", "", "", 0.0};
    CHECK(exit_code(std::vector<LawResult>{pass1, pass1}) == 0);
    CHECK(exit_code(std::vector<LawResult>{pass1, fail1}) == 1);
    CHECK(exit_code(std::vector<LawResult>{fail1, inc1}) == 3);
    CHECK(exit_code(std::vector<LawResult>{}) == 0);
}
