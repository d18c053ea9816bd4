// Command line front end.  Everything semantic lives behind the C API; this
// file only parses flags, forwards them, and prints reports.

#include <cstdint>
#include <cstdio>
#include <string>

#include "CLI11.hpp"

#include "ivdl.h"

namespace {

struct Common {
    int horizon = 0;
    int jobs = 1;
    uint64_t budget = 4000000;
    bool json = false;
    bool no_timing = false;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_flag("--json", c.json, "emit the JSON report instead of text");
    cmd->add_option("--jobs", c.jobs, "parallel workers")->check(CLI::PositiveNumber);
    cmd->add_option("--budget", c.budget, "largest enumeration space accepted");
    cmd->add_option("--horizon", c.horizon, "override the carrier horizon")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--no-timing", c.no_timing, "omit runtime fields (byte-stable output)");
}

ivdl_options to_opts(const Common& c) {
    ivdl_options o;
    ivdl_options_init(&o);
    o.horizon = c.horizon;
    o.jobs = c.jobs;
    o.budget = c.budget;
    o.emit_timing = c.no_timing ? 0 : 1;
    return o;
}

int finish(ivdl_status st, ivdl_report* rep, bool json) {
    if (st != IVDL_OK) {
        std::fprintf(stderr, "error: %s\n", ivdl_last_error());
        ivdl_report_free(rep);
        return st == IVDL_BUDGET_EXCEEDED ? 3 : 2;
    }
    std::fputs(json ? ivdl_report_json(rep) : ivdl_report_text(rep), stdout);
    int code = ivdl_report_exit_code(rep);
    ivdl_report_free(rep);
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"interval-predicate refinement checker"};
    app.require_subcommand(1);

    std::string file;
    std::string law;
    std::string pred;
    std::string interval;
    uint64_t seed = 1;
    uint64_t stream = 0;
    uint64_t instance_budget = UINT64_MAX;
    int depth = 0;
    bool trace = false;
    Common ccheck, claws, ceval;

    CLI::App* check = app.add_subcommand("check", "run the file's check directives");
    check->add_option("file", file, "specification file")->required();
    add_common(check, ccheck);

    CLI::App* laws = app.add_subcommand("laws", "run the algebraic law suite");
    laws->add_option("--seed", seed, "random seed");
    laws->add_option("--depth", depth, "random term depth")->check(CLI::PositiveNumber);
    laws->add_option("--law", law, "run a single law by id");
    laws->add_option("--instance-budget", instance_budget, "instances tried per law");
    add_common(laws, claws);

    CLI::App* eval = app.add_subcommand("eval", "evaluate a named predicate");
    eval->add_option("file", file, "specification file")->required();
    eval->add_option("--pred", pred, "predicate name")->required();
    eval->add_option("--interval", interval, "a..b or empty")->required();
    eval->add_option("--stream", stream, "stream index");
    eval->add_flag("--trace", trace, "print the decision table");
    add_common(eval, ceval);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (check->parsed()) {
        ivdl_spec* spec = nullptr;
        ivdl_status st = ivdl_spec_load(file.c_str(), &spec);
        if (st != IVDL_OK) return finish(st, nullptr, ccheck.json);
        ivdl_options o = to_opts(ccheck);
        ivdl_report* rep = nullptr;
        st = ivdl_run_checks(spec, &o, &rep);
        ivdl_spec_free(spec);
        return finish(st, rep, ccheck.json);
    }

    if (laws->parsed()) {
        ivdl_options o = to_opts(claws);
        ivdl_report* rep = nullptr;
        ivdl_status st = ivdl_run_laws(law.empty() ? nullptr : law.c_str(), seed, depth,
                                       claws.horizon, instance_budget, &o, &rep);
        return finish(st, rep, claws.json);
    }

    // eval
    int lo = 0;
    int hi = -1;
    if (interval != "empty") {
        size_t dots = interval.find("..");
        bool ok = dots != std::string::npos && dots > 0;
        if (ok) {
            try {
                lo = std::stoi(interval.substr(0, dots));
                hi = std::stoi(interval.substr(dots + 2));
            } catch (...) {
                ok = false;
            }
        }
        if (!ok || lo < 0 || hi < lo) {
            std::fprintf(stderr, "error: --interval wants a..b with 0 <= a <= b, or empty\n");
            return 2;
        }
    }
    ivdl_spec* spec = nullptr;
    ivdl_status st = ivdl_spec_load(file.c_str(), &spec);
    if (st != IVDL_OK) return finish(st, nullptr, ceval.json);
    ivdl_options o = to_opts(ceval);
    ivdl_report* rep = nullptr;
    st = ivdl_eval_pred(spec, pred.c_str(), lo, hi, stream, trace ? 1 : 0, &o, &rep);
    ivdl_spec_free(spec);
    return finish(st, rep, ceval.json);
}
