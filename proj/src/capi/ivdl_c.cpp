#include "ivdl.h"

#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "core/laws.hpp"
#include "core/parse.hpp"
#include "core/run.hpp"

struct ivdl_spec {
    ivdl::SpecFile spec;
};

struct ivdl_report {
    int exit_code = 0;
    std::string text;
    std::string json;
};

namespace {

thread_local std::string g_last_error;

ivdl_status fail(ivdl_status st, std::string msg) {
    g_last_error = std::move(msg);
    return st;
}

ivdl_status from_error(const ivdl::Error& e) {
    switch (e.kind) {
    case ivdl::Error::Kind::Parse:
    case ivdl::Error::Kind::Resolve:
        return fail(IVDL_PARSE_ERROR, e.what());
    case ivdl::Error::Kind::Budget:
        return fail(IVDL_BUDGET_EXCEEDED, e.what());
    case ivdl::Error::Kind::Internal:
    default:
        return fail(IVDL_INTERNAL, e.what());
    }
}

ivdl::RunOptions to_run_options(const ivdl_options* opts) {
    ivdl::RunOptions r;
    if (opts) {
        r.horizon_override = opts->horizon;
        r.jobs = opts->jobs < 1 ? 1 : opts->jobs;
        r.budget = opts->budget;
        r.emit_timing = opts->emit_timing != 0;
    }
    return r;
}

} // namespace

extern "C" {

void ivdl_options_init(ivdl_options* opts) {
    if (!opts) return;
    opts->horizon = 0;
    opts->jobs = 1;
    opts->budget = 4000000;
    opts->emit_timing = 1;
}

const char* ivdl_version(void) { return "1.0.0"; }

const char* ivdl_last_error(void) { return g_last_error.c_str(); }

ivdl_status ivdl_spec_load(const char* path, ivdl_spec** out) {
    if (!path || !out) return fail(IVDL_BAD_ARGUMENT, "null argument");
    *out = nullptr;
    std::ifstream in(path, std::ios::binary);
    if (!in) return fail(IVDL_NOT_FOUND, std::string("cannot open ") + path);
    std::ostringstream text;
    text << in.rdbuf();
    try {
        auto spec = std::make_unique<ivdl_spec>();
        spec->spec = ivdl::parse_spec(text.str(), path);
        *out = spec.release();
        return IVDL_OK;
    } catch (const ivdl::Error& e) {
        return from_error(e);
    } catch (const std::exception& e) {
        return fail(IVDL_INTERNAL, e.what());
    }
}

ivdl_status ivdl_spec_load_string(const char* text, const char* name, ivdl_spec** out) {
    if (!text || !out) return fail(IVDL_BAD_ARGUMENT, "null argument");
    *out = nullptr;
    try {
        auto spec = std::make_unique<ivdl_spec>();
        spec->spec = ivdl::parse_spec(text, name ? name : "<string>");
        *out = spec.release();
        return IVDL_OK;
    } catch (const ivdl::Error& e) {
        return from_error(e);
    } catch (const std::exception& e) {
        return fail(IVDL_INTERNAL, e.what());
    }
}

void ivdl_spec_free(ivdl_spec* spec) { delete spec; }

ivdl_status ivdl_run_checks(const ivdl_spec* spec, const ivdl_options* opts, ivdl_report** out) {
    if (!spec || !out) return fail(IVDL_BAD_ARGUMENT, "null argument");
    *out = nullptr;
    try {
        ivdl::RunOptions ro = to_run_options(opts);
        ivdl::CheckReport rep = ivdl::run_checks(spec->spec, ro);
        auto r = std::make_unique<ivdl_report>();
        r->exit_code = ivdl::exit_code(rep);
        r->text = ivdl::report_text(rep, ro);
        r->json = ivdl::report_json(rep, ro);
        *out = r.release();
        return IVDL_OK;
    } catch (const ivdl::Error& e) {
        return from_error(e);
    } catch (const std::exception& e) {
        return fail(IVDL_INTERNAL, e.what());
    }
}

ivdl_status ivdl_run_laws(const char* law_id, uint64_t seed, int depth, int horizon,
                          uint64_t instance_budget, const ivdl_options* opts, ivdl_report** out) {
    if (!out) return fail(IVDL_BAD_ARGUMENT, "null argument");
    *out = nullptr;
    if (law_id && !ivdl::is_law_id(law_id))
        return fail(IVDL_NOT_FOUND, std::string("unknown law: ") + law_id);
    try {
        ivdl::RunOptions ro = to_run_options(opts);
        ivdl::LawOptions lo;
        lo.seed = seed;
        if (depth > 0) lo.depth = depth;
        if (horizon > 0) lo.horizon = horizon;
        lo.jobs = ro.jobs;
        lo.instance_budget = instance_budget;
        lo.eval_budget = ro.budget;
        std::vector<ivdl::LawResult> results;
        if (law_id) {
            results.push_back(ivdl::run_law(law_id, lo));
        } else {
            results = ivdl::run_laws(lo);
        }
        auto r = std::make_unique<ivdl_report>();
        r->exit_code = ivdl::exit_code(results);
        r->text = ivdl::report_text(results, seed, ro);
        r->json = ivdl::report_json(results, seed, ro);
        *out = r.release();
        return IVDL_OK;
    } catch (const ivdl::Error& e) {
        return from_error(e);
    } catch (const std::exception& e) {
        return fail(IVDL_INTERNAL, e.what());
    }
}

ivdl_status ivdl_eval_pred(const ivdl_spec* spec, const char* pred, int lo, int hi,
                           uint64_t stream, int trace, const ivdl_options* opts,
                           ivdl_report** out) {
    if (!spec || !pred || !out) return fail(IVDL_BAD_ARGUMENT, "null argument");
    *out = nullptr;
    bool known = false;
    for (const auto& p : spec->spec.preds)
        if (p.name == pred) known = true;
    if (!known) return fail(IVDL_NOT_FOUND, std::string("no predicate named '") + pred + "'");
    try {
        ivdl::RunOptions ro = to_run_options(opts);
        ivdl::EvalRequest req;
        req.pred = pred;
        req.iv = hi < lo ? ivdl::Interval::empty() : ivdl::Interval::range(lo, hi);
        req.stream = stream;
        req.trace = trace != 0;
        ivdl::EvalResult res = ivdl::run_eval(spec->spec, req, ro);
        auto r = std::make_unique<ivdl_report>();
        r->exit_code = 0;
        r->text = ivdl::report_text(res, ro);
        r->json = ivdl::report_json(res, ro);
        *out = r.release();
        return IVDL_OK;
    } catch (const ivdl::Error& e) {
        return from_error(e);
    } catch (const std::exception& e) {
        return fail(IVDL_INTERNAL, e.what());
    }
}

int ivdl_report_exit_code(const ivdl_report* rep) { return rep ? rep->exit_code : 2; }

const char* ivdl_report_text(const ivdl_report* rep) { return rep ? rep->text.c_str() : ""; }

const char* ivdl_report_json(const ivdl_report* rep) { return rep ? rep->json.c_str() : ""; }

void ivdl_report_free(ivdl_report* rep) { delete rep; }

} // extern "C"
