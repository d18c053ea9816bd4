#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/laws.hpp"
#include "core/parse.hpp"
#include "core/verdict.hpp"

namespace ivdl {

struct RunOptions {
    int horizon_override = 0; // 0 keeps the file's carrier
    int jobs = 1;
    uint64_t budget = 4000000;
    bool emit_timing = true; // runtime fields in reports; off for byte-stable output
};

struct DirectiveResult {
    std::string name;
    std::string kind;
    std::string verdict; // "pass" | "fail" | "budget"
    std::optional<Counterexample> cex;
    std::string message; // budget refusals carry the reason here
    int64_t runtime_ms = 0;
};

struct CheckReport {
    std::string file;
    Carrier carrier;
    std::vector<DirectiveResult> results;
};

// Runs every directive of the file in order.  Budget refusals are recorded
// per directive, not thrown; parse/resolution problems never reach here.
CheckReport run_checks(const SpecFile& spec, const RunOptions& opt);

// 3 if anything was refused on budget, else 1 if anything failed, else 0.
int exit_code(const CheckReport& rep);
// 3 if any law is inconclusive, else 1 if any law failed, else 0.
int exit_code(const std::vector<LawResult>& laws);

std::string report_text(const CheckReport& rep, const RunOptions& opt);
std::string report_json(const CheckReport& rep, const RunOptions& opt);
std::string report_text(const std::vector<LawResult>& laws, uint64_t seed, const RunOptions& opt);
std::string report_json(const std::vector<LawResult>& laws, uint64_t seed, const RunOptions& opt);

// Evaluation of one named predicate on one stream and interval, with an
// optional trace of the decision (chop splits, fixpoint iterations, point
// and apparent-state tables).
struct EvalRequest {
    std::string pred;
    Interval iv;
    uint64_t stream = 0; // stream-space index over the predicate's universe
    bool trace = false;
};

struct EvalResult {
    std::string pred;
    Interval iv;
    uint64_t stream = 0;
    std::string stream_text;
    bool value = false;
    std::vector<std::string> trace;
};

EvalResult run_eval(const SpecFile& spec, const EvalRequest& req, const RunOptions& opt);
std::string report_text(const EvalResult& res, const RunOptions& opt);
std::string report_json(const EvalResult& res, const RunOptions& opt);

} // namespace ivdl
