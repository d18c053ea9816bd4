#include "core/run.hpp"

#include <chrono>
#include <sstream>

#include "json.hpp"

#include "core/refine.hpp"

namespace ivdl {

using ordered_json = nlohmann::ordered_json;

namespace {

Carrier effective_carrier(const SpecFile& spec, const RunOptions& opt) {
    Carrier c = spec.carrier;
    if (opt.horizon_override > 0) c.horizon = opt.horizon_override;
    return c;
}

std::string carrier_text(const Carrier& c) {
    return std::to_string(c.horizon) + (c.open_ended ? " open" : " closed");
}

int64_t ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                 t0)
        .count();
}

ordered_json interval_json(const Interval& iv) {
    if (iv.is_empty()) return "empty";
    return ordered_json::array({iv.lo, iv.hi});
}

ordered_json cex_json(const Counterexample& cex) {
    ordered_json j;
    j["clause"] = cex.clause;
    if (!cex.note.empty()) j["note"] = cex.note;
    j["intervals"] = ordered_json::array();
    for (const auto& ni : cex.intervals)
        j["intervals"].push_back({{"name", ni.name}, {"interval", interval_json(ni.iv)}});
    j["streams"] = ordered_json::array();
    for (const auto& ns : cex.streams) {
        ordered_json vars = ordered_json::array();
        const Stream& s = ns.stream;
        for (int v = 0; v < s.uni->size(); v++) {
            ordered_json vals = ordered_json::array();
            for (int t = 0; t < s.horizon; t++) vals.push_back(to_string(s.uni->domain(v)[s.at(t, v)]));
            vars.push_back({{"var", s.uni->name(v)}, {"values", std::move(vals)}});
        }
        j["streams"].push_back({{"stream", ns.name}, {"vars", std::move(vars)}});
    }
    j["states"] = ordered_json::array();
    for (const auto& ns : cex.states) {
        ordered_json vals = ordered_json::array();
        for (int v = 0; v < ns.uni->size(); v++)
            vals.push_back(
                {{"var", ns.uni->name(v)}, {"value", to_string(ns.uni->domain(v)[ns.state.pos[v]])}});
        j["states"].push_back({{"name", ns.name}, {"values", std::move(vals)}});
    }
    return j;
}

} // namespace

CheckReport run_checks(const SpecFile& spec, const RunOptions& opt) {
    CheckReport rep;
    rep.file = spec.file;
    rep.carrier = effective_carrier(spec, opt);
    CheckLimits lim;
    lim.budget = opt.budget;
    lim.jobs = opt.jobs;
    for (const Directive& d : spec.directives) {
        DirectiveResult r;
        r.name = d.name;
        r.kind = d.kind;
        auto t0 = std::chrono::steady_clock::now();
        try {
            Verdict v;
            if (d.kind == "refinement") {
                v = check_data_refinement(spec.systems[d.sys_a], spec.systems[d.sys_b], rep.carrier,
                                          lim);
            } else if (d.kind == "forward-sim") {
                v = check_forward_simulation(spec.systems[d.sys_a], spec.systems[d.sys_b],
                                             spec.relations[d.rel].term, rep.carrier, lim);
            } else if (d.kind == "simulates") {
                v = check_simulates(spec.relations[d.rel].term, d.g, d.h, rep.carrier, lim);
            } else if (d.kind == "vdash") {
                v = check_vdash(d.h, spec.relations[d.rel].term, rep.carrier, lim);
            } else { // ref2
                v = check_ref2(d.g, d.h, spec.relations[d.rel].term, rep.carrier, lim);
            }
            r.verdict = v.pass ? "pass" : "fail";
            r.cex = std::move(v.cex);
        } catch (const Error& e) {
            if (e.kind != Error::Kind::Budget) throw;
            r.verdict = "budget";
            r.message = e.what();
        }
        r.runtime_ms = ms_since(t0);
        rep.results.push_back(std::move(r));
    }
    return rep;
}

int exit_code(const CheckReport& rep) {
    bool failed = false;
    for (const auto& r : rep.results) {
        if (r.verdict == "budget") return 3;
        if (r.verdict == "fail") failed = true;
    }
    return failed ? 1 : 0;
}

int exit_code(const std::vector<LawResult>& laws) {
    bool failed = false;
    for (const auto& l : laws) {
        if (l.status == "inconclusive") return 3;
        if (l.status == "fail") failed = true;
    }
    return failed ? 1 : 0;
}

std::string report_text(const CheckReport& rep, const RunOptions& opt) {
    std::ostringstream os;
    os << "checked " << rep.file << " (carrier " << carrier_text(rep.carrier) << ")\n";
    int passed = 0;
    for (const auto& r : rep.results) {
        if (r.verdict == "pass") {
            os << "PASS";
            passed++;
        } else if (r.verdict == "fail") {
            os << "FAIL";
        } else {
            os << "BUDGET";
        }
        os << " " << r.name << " (" << r.kind << ")";
        if (opt.emit_timing) os << "  " << r.runtime_ms << "ms";
        os << "\n";
        if (r.cex) {
            std::istringstream lines(to_string(*r.cex));
            std::string line;
            while (std::getline(lines, line)) os << "    " << line << "\n";
        }
        if (!r.message.empty()) os << "    " << r.message << "\n";
    }
    os << passed << " of " << rep.results.size() << " directives passed\n";
    return os.str();
}

std::string report_json(const CheckReport& rep, const RunOptions& opt) {
    ordered_json j;
    j["version"] = 1;
    j["kind"] = "check";
    j["file"] = rep.file;
    j["carrier"] = {{"horizon", rep.carrier.horizon}, {"open", rep.carrier.open_ended}};
    j["directives"] = ordered_json::array();
    for (const auto& r : rep.results) {
        ordered_json d;
        d["name"] = r.name;
        d["kind"] = r.kind;
        d["verdict"] = r.verdict;
        if (opt.emit_timing) d["runtime_ms"] = r.runtime_ms;
        if (r.cex) d["counterexample"] = cex_json(*r.cex);
        if (!r.message.empty()) d["message"] = r.message;
        j["directives"].push_back(std::move(d));
    }
    return j.dump(2) + "\n";
}

std::string report_text(const std::vector<LawResult>& laws, uint64_t seed, const RunOptions& opt) {
    std::ostringstream os;
    os << "law suite, seed " << seed << "\n";
    int ok = 0;
    for (const auto& l : laws) {
        std::string tag = l.status == "pass" ? "PASS" : l.status == "fail" ? "FAIL" : "INCONCLUSIVE";
        if (tag == "PASS") ok++;
        os << tag << " " << l.law << " (" << l.polarity << ")  instances " << l.instances
           << ", non-vacuous " << l.non_vacuous << ", failures " << l.failures;
        if (opt.emit_timing) os << ", " << l.runtime_ms << "ms";
        os << "\n";
        if (!l.witness.empty()) {
            std::istringstream lines(l.witness);
            std::string line;
            while (std::getline(lines, line)) os << "    " << line << "\n";
        }
        if (!l.notes.empty()) os << "    note: " << l.notes << "\n";
    }
    os << ok << " of " << laws.size() << " laws passed\n";
    return os.str();
}

std::string report_json(const std::vector<LawResult>& laws, uint64_t seed, const RunOptions& opt) {
    ordered_json j;
    j["version"] = 1;
    j["kind"] = "laws";
    j["seed"] = seed;
    j["laws"] = ordered_json::array();
    for (const auto& l : laws) {
        ordered_json e;
        e["law"] = l.law;
        e["polarity"] = l.polarity;
        e["instances"] = l.instances;
        e["non_vacuous"] = l.non_vacuous;
        e["failures"] = l.failures;
        e["status"] = l.status;
        if (opt.emit_timing) e["runtime_ms"] = l.runtime_ms;
        if (!l.witness.empty()) e["witness"] = l.witness;
        if (!l.notes.empty()) e["notes"] = l.notes;
        j["laws"].push_back(std::move(e));
    }
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// eval

namespace {

// The decision table for the queried term: how its top combinator reached
// the answer on this interval.
void trace_term(std::vector<std::string>& out, const PredPtr& t, const Interval& iv,
                const Stream& s, const CarrierTables& tables) {
    PredEval ev(tables, s);
    using K = PredTerm::Kind;
    const VarUniverse& u = *t->uni;
    auto point_table = [&](const BoolExprPtr& c) {
        if (iv.is_empty()) {
            out.push_back("no points (empty interval)");
            return;
        }
        for (int p = iv.lo; p <= iv.hi; p++)
            out.push_back("point " + std::to_string(p) + ": state " +
                          to_string(u, s.state_at(p)) + " -> " +
                          (eval_pred_at(*c, s, p) ? "true" : "false"));
    };
    auto apparent_table = [&](const BoolExprPtr& c) {
        auto states = apparent(iv, s);
        if (states.empty()) {
            out.push_back("no apparent states (empty interval)");
            return;
        }
        for (const State& st : states)
            out.push_back("apparent state " + to_string(u, st) + " -> " +
                          (eval_state_pred(*c, st) ? "true" : "false"));
    };

    switch (t->kind) {
    case K::Always:
    case K::Sometime:
        point_table(t->sp);
        break;
    case K::Definitely:
    case K::Possibly:
        apparent_table(t->sp);
        break;
    case K::Chop: {
        for (auto [i1, i2] : tables.splits(tables.index_of(iv))) {
            const Interval& a = tables.intervals()[i1];
            const Interval& b = tables.intervals()[i2];
            out.push_back("split " + to_string(a) + " + " + to_string(b) + ": left=" +
                          (ev.eval_idx(t->a, i1) ? "true" : "false") + ", right=" +
                          (ev.eval_idx(t->b, i2) ? "true" : "false"));
        }
        if (classify(iv, tables.carrier()) == IntervalClass::Infinite)
            out.push_back(std::string("infinite clause: left on the whole interval = ") +
                          (ev.eval(t->a, iv) ? "true" : "false"));
        break;
    }
    case K::Omega: {
        // Jacobi restart of the fixpoint, counting surviving intervals per
        // round; the memoized evaluator reaches the same limit.
        int n = tables.count();
        std::vector<char> z(n, 1);
        out.push_back("greatest fixpoint over " + std::to_string(n) + " intervals, start all true");
        for (int iter = 1;; iter++) {
            std::vector<char> nx(n, 0);
            for (int i = 0; i < n; i++) {
                bool v = tables.classify(i) == IntervalClass::Empty;
                if (!v)
                    for (auto [i1, i2] : tables.splits(i))
                        if (ev.eval_idx(t->a, i1) && z[i2]) {
                            v = true;
                            break;
                        }
                if (!v && tables.classify(i) == IntervalClass::Infinite) v = ev.eval_idx(t->a, i);
                nx[i] = v;
            }
            int surviving = 0;
            for (char c : nx) surviving += c;
            if (nx == z) {
                out.push_back("stable after " + std::to_string(iter) + " iterations, " +
                              std::to_string(surviving) + " intervals hold");
                break;
            }
            out.push_back("iteration " + std::to_string(iter) + ": " + std::to_string(surviving) +
                          " intervals hold");
            z = std::move(nx);
        }
        break;
    }
    case K::And:
    case K::Or:
        out.push_back(std::string("left ") + to_string(*t->a) + " -> " +
                      (ev.eval(t->a, iv) ? "true" : "false"));
        out.push_back(std::string("right ") + to_string(*t->b) + " -> " +
                      (ev.eval(t->b, iv) ? "true" : "false"));
        break;
    case K::Not:
    case K::NonEmpty:
        out.push_back(std::string("inner ") + to_string(*t->a) + " -> " +
                      (ev.eval(t->a, iv) ? "true" : "false"));
        break;
    case K::Prev: {
        for (int pi : tables.preceders(tables.index_of(iv)))
            out.push_back("preceding " + to_string(tables.intervals()[pi]) + " -> " +
                          (ev.eval_idx(t->a, pi) ? "true" : "false"));
        break;
    }
    case K::PrevHolds: {
        for (int pi : tables.preceders(tables.index_of(iv))) {
            const Interval& p = tables.intervals()[pi];
            if (p.is_empty()) continue;
            bool all = true;
            for (int q = p.lo; q <= p.hi && all; q++) all = eval_pred_at(*t->sp, s, q);
            out.push_back("preceding " + to_string(p) + ": held throughout = " +
                          (all ? "true" : "false"));
        }
        break;
    }
    default:
        out.push_back("class of interval: " + std::string(classify(iv, tables.carrier()) ==
                                                                   IntervalClass::Empty
                                                               ? "empty"
                                                               : classify(iv, tables.carrier()) ==
                                                                         IntervalClass::Finite
                                                                     ? "finite"
                                                                     : "infinite"));
        break;
    }
}

} // namespace

EvalResult run_eval(const SpecFile& spec, const EvalRequest& req, const RunOptions& opt) {
    const PredDef* def = nullptr;
    for (const auto& p : spec.preds)
        if (p.name == req.pred) def = &p;
    if (!def) throw Error(Error::Kind::Resolve, "no predicate named '" + req.pred + "'");

    Carrier car = effective_carrier(spec, opt);
    CarrierTables tables(car);
    if (!req.iv.is_empty() && (req.iv.lo < 0 || req.iv.hi >= car.horizon))
        throw Error(Error::Kind::Resolve,
                    "interval " + to_string(req.iv) + " is outside the carrier (horizon " +
                        std::to_string(car.horizon) + ")");

    StreamSpace space(def->uni, car.horizon);
    space.check_budget(opt.budget, "streams");
    if (req.stream >= space.count())
        throw Error(Error::Kind::Resolve,
                    "stream index " + std::to_string(req.stream) + " is out of range (" +
                        std::to_string(space.count()) + " streams)");
    Stream s = space.decode(req.stream);

    EvalResult res;
    res.pred = req.pred;
    res.iv = req.iv;
    res.stream = req.stream;
    res.stream_text = to_string(s);
    PredEval ev(tables, s);
    res.value = ev.eval(def->term, req.iv);
    if (req.trace) trace_term(res.trace, def->term, req.iv, s, tables);
    return res;
}

std::string report_text(const EvalResult& res, const RunOptions&) {
    std::ostringstream os;
    os << res.pred << " on " << to_string(res.iv) << ", stream " << res.stream << " "
       << res.stream_text << "\n";
    for (const auto& line : res.trace) os << "    " << line << "\n";
    os << (res.value ? "true" : "false") << "\n";
    return os.str();
}

std::string report_json(const EvalResult& res, const RunOptions&) {
    ordered_json j;
    j["version"] = 1;
    j["kind"] = "eval";
    j["pred"] = res.pred;
    j["interval"] = interval_json(res.iv);
    j["stream"] = res.stream;
    j["stream_values"] = res.stream_text;
    j["value"] = res.value;
    if (!res.trace.empty()) j["trace"] = res.trace;
    return j.dump(2) + "\n";
}

} // namespace ivdl
