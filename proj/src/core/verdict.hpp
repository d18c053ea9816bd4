#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/interval.hpp"
#include "core/state.hpp"

namespace ivdl {

struct NamedStream {
    std::string name;
    Stream stream;
};

struct NamedInterval {
    std::string name;
    Interval iv;
};

struct NamedState {
    std::string name;
    UniversePtr uni;
    State state;
};

// Everything needed to replay a failed check: the clause that failed plus
// the witness objects, each under the name used by the clause.
struct Counterexample {
    std::string clause;
    Carrier carrier;
    std::vector<NamedStream> streams;
    std::vector<NamedInterval> intervals;
    std::vector<NamedState> states;
    std::string note;
};

struct Verdict {
    bool pass = true;
    std::optional<Counterexample> cex;

    static Verdict ok() { return {}; }
    static Verdict fail(Counterexample c) { return {false, std::move(c)}; }
};

std::string to_string(const Counterexample& cex);

} // namespace ivdl
