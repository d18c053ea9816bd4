#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "core/interval.hpp"
#include "core/pred.hpp"
#include "core/rel.hpp"
#include "core/state.hpp"
#include "core/verdict.hpp"

namespace ivdl {

// A system couples representation variables, evolving over intervals, with
// an observation universe read only at the boundaries: the init predicate
// (over vars plus observables) fixes how runs may start for a given
// observation state, and the final relation reads an observation state off a
// representation state.
struct SystemSpec {
    std::string name;
    UniversePtr obs;
    UniversePtr vars;
    UniversePtr joint; // vars followed by the observables; init lives here
    PredPtr init;      // over joint
    std::vector<std::pair<std::string, PredPtr>> ops; // each over vars
    BoolExprPtr final_rel; // side 0 over vars, side 1 over obs
};

// vars followed by obs, in declaration order; names must not clash.
UniversePtr make_joint(const UniversePtr& vars, const UniversePtr& obs);

// Substitutes an observation state for the observable occurrences of a
// joint-universe term, yielding a term over vars alone.
PredPtr specialize_obs(const PredPtr& t, const UniversePtr& vars, const UniversePtr& obs,
                       const State& rho);

// Conjunction of the system's process predicates (true when there are none).
PredPtr ops_conj(const SystemSpec& s);

// The init predicate specialized to one observation state.
PredPtr init_for(const SystemSpec& s, const State& rho);

struct CheckLimits {
    uint64_t budget = 4000000; // largest enumeration space accepted
    int jobs = 1;
    bool minimize = true; // shrink counterexamples (horizon, then values)
};

// The observation pairs of a system: (before, after) such that some stream
// satisfies the lookback-initialised process conjunction on some interval
// whose inside finalises to `after` at some point.  For each pair the first
// witness in (stream, interval, point) order is kept.
struct ObsSet {
    UniversePtr obs;
    int n = 0;
    std::vector<uint8_t> mat; // n*n, row-major: [before * n + after]
    struct Wit {
        uint64_t z = 0;
        int iv = -1;
        int t = -1;
    };
    std::vector<Wit> wit; // parallel to mat

    bool contains(int before, int after) const {
        return mat[static_cast<size_t>(before) * n + after] != 0;
    }
};

ObsSet observations(const SystemSpec& s, const Carrier& c, const CheckLimits& lim,
                    EvalStats* stats = nullptr);

// Every check scans deterministically (right stream index outermost, then
// interval, then the remaining quantifiers) and reports the first
// counterexample, minimized when lim.minimize is set.  Universe sizes are
// gated against lim.budget.

// Whenever ref carries an interval of the right stream forward from an
// adjoining prefix, some matching left stream extends under ref while
// satisfying g: for all z, delta0 adjoining delta, y0 with ref on delta0 and
// h on delta, there is y agreeing with y0 on delta0 with ref and g on delta.
Verdict check_simulates(const RelPtr& ref, const PredPtr& g, const PredPtr& h, const Carrier& c,
                        const CheckLimits& lim, EvalStats* stats = nullptr);

// Same obligation without the g conjunct: h keeps ref extendable.
Verdict check_vdash(const PredPtr& h, const RelPtr& ref, const Carrier& c, const CheckLimits& lim,
                    EvalStats* stats = nullptr);

// ref together with h on an interval forces g on the left stream there.
Verdict check_ref2(const PredPtr& g, const PredPtr& h, const RelPtr& ref, const Carrier& c,
                   const CheckLimits& lim, EvalStats* stats = nullptr);

// Stepwise obligations between two systems under ref: initialisation (every
// concrete start extends to an abstract one related by ref), simulation (the
// process conjunctions simulate), finalisation (related streams finalise to
// the same observation at every inner point).
Verdict check_forward_simulation(const SystemSpec& abs_sys, const SystemSpec& conc_sys,
                                 const RelPtr& ref, const Carrier& c, const CheckLimits& lim,
                                 EvalStats* stats = nullptr);

// Observation containment: every pair observed of the concrete system is
// observed of the abstract one.
Verdict check_data_refinement(const SystemSpec& abs_sys, const SystemSpec& conc_sys,
                              const Carrier& c, const CheckLimits& lim, EvalStats* stats = nullptr);

} // namespace ivdl
