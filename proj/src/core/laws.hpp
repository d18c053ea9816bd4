#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/pred.hpp"
#include "core/refine.hpp"
#include "core/rel.hpp"

namespace ivdl {

// One algebraic-law battery entry.  A law runs a fixed systematic region
// (every combination drawn from small constructor-covering pools) followed by
// seeded random instances.  Side conditions are established by brute force
// per instance, never assumed from the shape of a term; instances whose side
// conditions or hypotheses fail count as vacuous.
struct LawResult {
    std::string law;
    std::string polarity;     // "holds": no instance may break; "fails": some instance must break
    uint64_t instances = 0;   // instances actually run
    uint64_t non_vacuous = 0; // instances whose hypotheses all held
    uint64_t failures = 0;    // non-vacuous instances whose body broke
    std::string status;       // "pass" | "fail" | "inconclusive"
    std::string witness;      // first breaking instance, when one was found
    std::string notes;
    double runtime_ms = 0.0;
};

struct LawOptions {
    uint64_t seed = 1;
    int depth = 3;   // random term generator depth
    int horizon = 3; // carrier height; laws always use a closed carrier unless open_ended
    bool open_ended = false;
    int jobs = 1; // laws run whole-law-per-worker; instances stay sequential
    uint64_t random_instances = 1000;        // per law, after the systematic region
    uint64_t instance_budget = UINT64_MAX;   // cap on instances run; hitting it => inconclusive
    uint64_t eval_budget = 4000000;          // stream-space gate inside the underlying checks
};

std::vector<std::string> law_ids();
bool is_law_id(const std::string& id);

// Runs one law to completion (or to the instance budget).  Unknown ids throw
// Error::Resolve.
LawResult run_law(const std::string& id, const LawOptions& opt);

// Runs the whole catalog in catalog order.
std::vector<LawResult> run_laws(const LawOptions& opt);

} // namespace ivdl
