#include "core/parse.hpp"

#include <map>
#include <set>
#include <sstream>
#include <utility>

namespace ivdl {
namespace {

// ---------------------------------------------------------------------------
// Lexing

struct Tok {
    enum class Kind { Ident, Num, Inf, Sym, End } kind = Kind::End;
    std::string text; // spelling; "end of file" for End
    Value val;        // Num / Inf only
    int line = 1;
    int col = 1;
};

std::string describe(const Tok& t) {
    if (t.kind == Tok::Kind::End) return "end of file";
    return "'" + t.text + "'";
}

bool ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
// '-' is an identifier character so kinded names like forward-sim lex whole;
// the file grammar has no arithmetic, so nothing else claims it.
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9') || c == '-'; }
bool digit(char c) { return c >= '0' && c <= '9'; }

struct Lexer {
    const std::string& file;
    const std::string& src;
    size_t i = 0;
    int line = 1;
    int col = 1;

    [[noreturn]] void fail(const std::string& msg) const {
        std::ostringstream os;
        os << file << ":" << line << ":" << col << ": " << msg;
        throw Error(Error::Kind::Parse, os.str());
    }

    char peek(size_t k = 0) const { return i + k < src.size() ? src[i + k] : '\0'; }
    void adv() {
        if (src[i] == '\n') {
            line++;
            col = 1;
        } else {
            col++;
        }
        i++;
    }

    void number(Tok& t, bool negative) {
        int64_t n = 0;
        while (digit(peek())) {
            n = n * 10 + (peek() - '0');
            adv();
        }
        t.kind = Tok::Kind::Num;
        t.val = Value::integer(negative ? -n : n);
        t.text = std::to_string(t.val.num);
    }

    void symbol(Tok& t) {
        t.kind = Tok::Kind::Sym;
        auto take = [&](int n, const char* s) {
            for (int k = 0; k < n; k++) adv();
            t.text = s;
        };
        switch (peek()) {
        case '{': take(1, "{"); return;
        case '}': take(1, "}"); return;
        case '(': take(1, "("); return;
        case ')': take(1, ")"); return;
        case '[': take(1, "["); return;
        case ']': take(1, "]"); return;
        case ',': take(1, ","); return;
        case ';': take(1, ";"); return;
        case '.': take(1, "."); return;
        case '=': take(1, "="); return;
        case ':':
            if (peek(1) == '=') { take(2, ":="); return; }
            take(1, ":");
            return;
        case '<':
            if (peek(1) == '-' && peek(2) == '>') { take(3, "<->"); return; }
            if (peek(1) == '=') { take(2, "<="); return; }
            take(1, "<");
            return;
        case '!':
            if (peek(1) == '=') { take(2, "!="); return; }
            take(1, "!");
            return;
        case '/':
            if (peek(1) == '\\') { take(2, "/\\"); return; }
            fail("unexpected '/'");
        case '\\':
            if (peek(1) == '/') { take(2, "\\/"); return; }
            fail("unexpected '\\'");
        case '|':
            if (peek(1) == '~' && peek(2) == '|') { take(3, "|~|"); return; }
            fail("unexpected '|'");
        default:
            fail(std::string("unexpected character '") + peek() + "'");
        }
    }

    std::vector<Tok> run() {
        std::vector<Tok> out;
        while (i < src.size()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                adv();
                continue;
            }
            if (c == '#' || (c == '/' && peek(1) == '/')) {
                while (i < src.size() && peek() != '\n') adv();
                continue;
            }
            Tok t;
            t.line = line;
            t.col = col;
            if (ident_start(c)) {
                while (i < src.size() && ident_char(peek())) {
                    t.text += peek();
                    adv();
                }
                t.kind = Tok::Kind::Ident;
            } else if (digit(c)) {
                number(t, false);
            } else if ((c == '-' || c == '+') && digit(peek(1))) {
                adv();
                number(t, c == '-');
            } else if ((c == '-' || c == '+') && peek(1) == 'i' && peek(2) == 'n' &&
                       peek(3) == 'f' && !ident_char(peek(4))) {
                t.kind = Tok::Kind::Inf;
                t.val = c == '-' ? Value::neg_inf() : Value::pos_inf();
                t.text = c == '-' ? "-inf" : "+inf";
                for (int k = 0; k < 4; k++) adv();
            } else {
                symbol(t);
            }
            out.push_back(std::move(t));
        }
        Tok end;
        end.kind = Tok::Kind::End;
        end.text = "end of file";
        end.line = line;
        end.col = col;
        out.push_back(std::move(end));
        return out;
    }
};

const std::set<std::string>& reserved_words() {
    static const std::set<std::string> r = {
        "carrier",    "open",        "closed",    "var",      "observable", "pred",
        "over",       "system",      "use",       "init",     "process",    "with",
        "final",      "relation",    "from",      "to",       "check",      "refinement",
        "forward-sim", "simulates",  "vdash",     "ref2",     "true",       "false",
        "empty",      "finite",      "infinite",  "nonempty", "always",     "sometime",
        "definitely", "possibly",    "prevholds", "stable",   "prev",       "omega",
        "left",       "right",       "if",        "then",     "else",       "fi",
        "do",         "od",          "skip",
    };
    return r;
}

// ---------------------------------------------------------------------------
// Parsing and resolution (single pass; everything must be declared before use)

struct Parser {
    std::string file;
    std::vector<Tok> toks;
    size_t pos = 0;
    SpecFile out;

    std::map<std::string, int> var_ix;  // global variable name -> index in out.vars
    std::map<std::string, int> sys_ix;  // system name -> index
    std::map<std::string, int> rel_ix;  // relation name -> index
    std::map<std::string, int> decl_ln; // every top-level name -> declaration line
    bool system_seen = false;
    // Mutable while observable declarations are still allowed; systems share
    // the same object through out.observables, so additions stop once the
    // first system has captured it.
    std::shared_ptr<VarUniverse> obs_build = std::make_shared<VarUniverse>();

    const Tok& cur() const { return toks[pos]; }
    const Tok& ahead() const { return toks[pos + 1 < toks.size() ? pos + 1 : toks.size() - 1]; }

    [[noreturn]] void fail_at(const Tok& t, const std::string& msg,
                              Error::Kind k = Error::Kind::Parse) const {
        std::ostringstream os;
        os << file << ":" << t.line << ":" << t.col << ": " << msg;
        throw Error(k, os.str());
    }
    [[noreturn]] void bad_name(const Tok& t, const std::string& msg) const {
        fail_at(t, msg, Error::Kind::Resolve);
    }

    // Re-raises factory errors (domain mismatches and the like) with a position.
    template <typename F>
    auto at(const Tok& t, F&& f) -> decltype(f()) {
        try {
            return f();
        } catch (const Error& e) {
            fail_at(t, e.what(), e.kind);
        }
    }

    bool at_sym(const char* s) const { return cur().kind == Tok::Kind::Sym && cur().text == s; }
    bool at_kw(const char* s) const { return cur().kind == Tok::Kind::Ident && cur().text == s; }
    bool eat_sym(const char* s) {
        if (!at_sym(s)) return false;
        pos++;
        return true;
    }
    bool eat_kw(const char* s) {
        if (!at_kw(s)) return false;
        pos++;
        return true;
    }
    void expect_sym(const char* s) {
        if (!eat_sym(s)) fail_at(cur(), std::string("expected '") + s + "', got " + describe(cur()));
    }
    void expect_kw(const char* s) {
        if (!eat_kw(s)) fail_at(cur(), std::string("expected '") + s + "', got " + describe(cur()));
    }
    std::string expect_ident(const char* what) {
        if (cur().kind != Tok::Kind::Ident)
            fail_at(cur(), std::string("expected ") + what + ", got " + describe(cur()));
        return toks[pos++].text;
    }

    std::string decl_name(const char* what) {
        const Tok t = cur();
        std::string n = expect_ident(what);
        if (reserved_words().count(n)) fail_at(t, "'" + n + "' is a reserved word");
        auto it = decl_ln.find(n);
        if (it != decl_ln.end())
            bad_name(t, "'" + n + "' is already declared (line " + std::to_string(it->second) + ")");
        decl_ln[n] = t.line;
        return n;
    }

    Value parse_value() {
        const Tok& t = cur();
        if (t.kind == Tok::Kind::Num || t.kind == Tok::Kind::Inf) {
            pos++;
            return t.val;
        }
        if (t.kind == Tok::Kind::Ident && (t.text == "true" || t.text == "false")) {
            pos++;
            return Value::boolean(t.text == "true");
        }
        fail_at(t, "expected a value, got " + describe(t));
    }

    int resolve_local_var(const UniversePtr& u) {
        const Tok t = cur();
        std::string n = expect_ident("a variable name");
        int v = u->find(n);
        if (v < 0) bad_name(t, "unknown variable '" + n + "'");
        return v;
    }

    // ---- state expressions -------------------------------------------------
    // One parser covers both contexts: r == nullptr is the single-universe
    // (predicate) context, otherwise operands may carry left./right. sides.

    struct SCtx {
        const VarUniverse* l = nullptr;
        const VarUniverse* r = nullptr;
    };

    static bool is_cmp(const Tok& t) {
        return t.kind == Tok::Kind::Sym &&
               (t.text == "=" || t.text == "!=" || t.text == "<" || t.text == "<=");
    }

    BoolExpr::CmpOp parse_cmpop() {
        if (eat_sym("=")) return BoolExpr::CmpOp::Eq;
        if (eat_sym("!=")) return BoolExpr::CmpOp::Ne;
        if (eat_sym("<=")) return BoolExpr::CmpOp::Le;
        if (eat_sym("<")) return BoolExpr::CmpOp::Lt;
        fail_at(cur(), "expected a comparison (=, !=, <, <=), got " + describe(cur()));
    }

    BoolExprPtr parse_siff(const SCtx& c) {
        BoolExprPtr a = parse_sor(c);
        while (at_sym("<->")) {
            pos++;
            a = sp_iff(std::move(a), parse_sor(c));
        }
        return a;
    }
    BoolExprPtr parse_sor(const SCtx& c) {
        BoolExprPtr a = parse_sand(c);
        while (at_sym("\\/")) {
            pos++;
            a = sp_or(std::move(a), parse_sand(c));
        }
        return a;
    }
    BoolExprPtr parse_sand(const SCtx& c) {
        BoolExprPtr a = parse_snot(c);
        while (at_sym("/\\")) {
            pos++;
            a = sp_and(std::move(a), parse_snot(c));
        }
        return a;
    }
    BoolExprPtr parse_snot(const SCtx& c) {
        if (eat_sym("!")) return sp_not(parse_snot(c));
        return parse_sprimary(c);
    }
    BoolExprPtr parse_sprimary(const SCtx& c) {
        if (eat_sym("(")) {
            BoolExprPtr a = parse_siff(c);
            expect_sym(")");
            return a;
        }
        if ((at_kw("true") || at_kw("false")) && !is_cmp(ahead())) {
            bool b = cur().text == "true";
            pos++;
            return sp_lit(b);
        }
        return parse_satom(c);
    }

    BoolExprPtr parse_satom(const SCtx& c) {
        if (c.r) return parse_satom_rel(c);

        struct Opnd {
            bool is_var = false;
            int var = -1;
            Value val;
            Tok tok;
        };
        auto operand = [&]() -> Opnd {
            const Tok t = cur();
            if (t.kind == Tok::Kind::Ident && t.text != "true" && t.text != "false") {
                pos++;
                int v = c.l->find(t.text);
                if (v < 0) bad_name(t, "unknown variable '" + t.text + "'");
                return {true, v, {}, t};
            }
            return {false, -1, parse_value(), t};
        };

        using Cmp = BoolExpr::CmpOp;
        Opnd a = operand();
        const Tok opt = cur();
        Cmp op = parse_cmpop();
        Opnd b = operand();
        if (a.is_var && b.is_var)
            return at(opt, [&] { return sp_cmp_vars(*c.l, op, a.var, b.var); });
        if (a.is_var) return at(b.tok, [&] { return sp_cmp(*c.l, op, a.var, b.val); });
        if (b.is_var) {
            // Constant on the left; fold the order into the operator.
            switch (op) {
            case Cmp::Eq:
            case Cmp::Ne:
                return at(a.tok, [&] { return sp_cmp(*c.l, op, b.var, a.val); });
            case Cmp::Lt: // k < x  ==  !(x <= k)
                return at(a.tok, [&] { return sp_not(sp_cmp(*c.l, Cmp::Le, b.var, a.val)); });
            case Cmp::Le: // k <= x  ==  !(x < k)
                return at(a.tok, [&] { return sp_not(sp_cmp(*c.l, Cmp::Lt, b.var, a.val)); });
            }
        }
        fail_at(opt, "comparison needs a variable", Error::Kind::Resolve);
    }

    BoolExprPtr parse_satom_rel(const SCtx& c) {
        auto operand = [&]() -> std::pair<CmpOperand, Tok> {
            const Tok t = cur();
            if (at_kw("left") || at_kw("right")) {
                int side = cur().text == "right" ? 1 : 0;
                pos++;
                expect_sym(".");
                const Tok vt = cur();
                std::string n = expect_ident("a variable name");
                const VarUniverse& u = side == 0 ? *c.l : *c.r;
                int v = u.find(n);
                if (v < 0)
                    bad_name(vt, "no variable '" + n + "' on the " +
                                     (side == 0 ? "left" : "right") + " side");
                return {CmpOperand{false, side, v, -1, {}}, t};
            }
            if (t.kind == Tok::Kind::Ident && t.text != "true" && t.text != "false") {
                pos++;
                int lv = c.l->find(t.text);
                int rv = c.r->find(t.text);
                if (lv >= 0 && rv >= 0)
                    bad_name(t, "'" + t.text + "' exists on both sides; write left." + t.text +
                                    " or right." + t.text);
                if (lv >= 0) return {CmpOperand{false, 0, lv, -1, {}}, t};
                if (rv >= 0) return {CmpOperand{false, 1, rv, -1, {}}, t};
                bad_name(t, "unknown variable '" + t.text + "'");
            }
            return {CmpOperand{true, 0, -1, -1, parse_value()}, t};
        };

        auto [a, atok] = operand();
        const Tok opt = cur();
        BoolExpr::CmpOp op = parse_cmpop();
        auto [b, btok] = operand();
        (void)atok;
        (void)btok;
        return at(opt, [&] { return rel_cmp(*c.l, *c.r, op, a, b); });
    }

    // ---- interval predicates -----------------------------------------------

    PredPtr parse_pexpr(const UniversePtr& u) {
        PredPtr a = parse_por(u);
        while (at_sym("<->")) {
            pos++;
            PredPtr b = parse_por(u);
            a = p_or(p_and(a, b), p_and(p_not(a), p_not(b)));
        }
        return a;
    }
    PredPtr parse_por(const UniversePtr& u) {
        PredPtr a = parse_pand(u);
        while (at_sym("\\/")) {
            pos++;
            a = p_or(std::move(a), parse_pand(u));
        }
        return a;
    }
    PredPtr parse_pand(const UniversePtr& u) {
        PredPtr a = parse_pchop(u);
        while (at_sym("/\\")) {
            pos++;
            a = p_and(std::move(a), parse_pchop(u));
        }
        return a;
    }
    PredPtr parse_pchop(const UniversePtr& u) {
        PredPtr a = parse_punary(u);
        while (at_sym(";")) {
            pos++;
            a = p_chop(std::move(a), parse_punary(u));
        }
        return a;
    }
    PredPtr parse_punary(const UniversePtr& u) {
        if (eat_sym("!")) return p_not(parse_punary(u));
        return parse_pprimary(u);
    }

    PredPtr parse_pprimary(const UniversePtr& u) {
        const Tok t = cur();
        if (eat_sym("(")) {
            PredPtr a = parse_pexpr(u);
            expect_sym(")");
            return a;
        }
        if (t.kind != Tok::Kind::Ident)
            fail_at(t, "expected an interval predicate, got " + describe(t));
        const std::string& kw = t.text;
        if (kw == "true" || kw == "false") {
            pos++;
            return p_lit(u, kw == "true");
        }
        if (kw == "empty") {
            pos++;
            return p_empty(u);
        }
        if (kw == "finite") {
            pos++;
            return p_finite(u);
        }
        if (kw == "infinite") {
            pos++;
            return p_infinite(u);
        }
        if (kw == "always" || kw == "sometime" || kw == "definitely" || kw == "possibly" ||
            kw == "prevholds") {
            pos++;
            expect_sym("(");
            BoolExprPtr c = parse_siff({u.get(), nullptr});
            expect_sym(")");
            if (kw == "always") return p_always(u, std::move(c));
            if (kw == "sometime") return p_sometime(u, std::move(c));
            if (kw == "definitely") return p_definitely(u, std::move(c));
            if (kw == "possibly") return p_possibly(u, std::move(c));
            return p_prev_holds(u, std::move(c));
        }
        if (kw == "nonempty" || kw == "prev" || kw == "omega") {
            pos++;
            expect_sym("(");
            PredPtr a = parse_pexpr(u);
            expect_sym(")");
            if (kw == "nonempty") return p_nonempty(std::move(a));
            if (kw == "prev") return p_prev(std::move(a));
            return p_omega(std::move(a));
        }
        if (kw == "stable") {
            pos++;
            expect_sym("(");
            std::vector<int> vs;
            vs.push_back(resolve_local_var(u));
            while (eat_sym(",")) vs.push_back(resolve_local_var(u));
            expect_sym(")");
            if (vs.size() == 1) return p_stable_var(u, vs[0]);
            return p_stable_set(u, std::move(vs));
        }
        fail_at(t, "unknown interval predicate " + describe(t));
    }

    // ---- relation expressions ----------------------------------------------

    RelPtr parse_rexpr(const UniversePtr& l, const UniversePtr& r) {
        RelPtr a = parse_rand(l, r);
        while (at_sym("\\/")) {
            pos++;
            a = r_or(std::move(a), parse_rand(l, r));
        }
        return a;
    }
    RelPtr parse_rand(const UniversePtr& l, const UniversePtr& r) {
        RelPtr a = parse_rchop(l, r);
        while (at_sym("/\\")) {
            pos++;
            a = r_and(std::move(a), parse_rchop(l, r));
        }
        return a;
    }
    RelPtr parse_rchop(const UniversePtr& l, const UniversePtr& r) {
        RelPtr a = parse_runary(l, r);
        while (at_sym(";")) {
            pos++;
            a = r_chop(std::move(a), parse_runary(l, r));
        }
        return a;
    }
    RelPtr parse_runary(const UniversePtr& l, const UniversePtr& r) {
        if (eat_sym("!")) return r_not(parse_runary(l, r));
        return parse_rprimary(l, r);
    }

    RelPtr parse_rprimary(const UniversePtr& l, const UniversePtr& r) {
        const Tok t = cur();
        if (eat_sym("(")) {
            RelPtr a = parse_rexpr(l, r);
            expect_sym(")");
            return a;
        }
        if (t.kind != Tok::Kind::Ident)
            fail_at(t, "expected a relation expression, got " + describe(t));
        const std::string& kw = t.text;
        if (kw == "true" || kw == "false") {
            pos++;
            return r_lit(l, r, kw == "true");
        }
        if (kw == "always") {
            pos++;
            expect_sym("(");
            BoolExprPtr c = parse_siff({l.get(), r.get()});
            expect_sym(")");
            return r_always(l, r, std::move(c));
        }
        if (kw == "nonempty") {
            pos++;
            expect_sym("(");
            RelPtr a = parse_rexpr(l, r);
            expect_sym(")");
            return r_nonempty(std::move(a));
        }
        if (kw == "left") {
            pos++;
            expect_sym("(");
            PredPtr g = parse_pexpr(l);
            expect_sym(")");
            return r_proj1(std::move(g), r);
        }
        if (kw == "right") {
            pos++;
            expect_sym("(");
            PredPtr g = parse_pexpr(r);
            expect_sym(")");
            return r_proj2(l, std::move(g));
        }
        fail_at(t, "unknown relation expression " + describe(t));
    }

    // ---- program statements ------------------------------------------------
    // Compiled straight to interval predicates: guards become possibly(c)
    // (read against apparent states), assignments pin the variable over a
    // nonempty interval, ; is chop, |~| is choice, do..od is iteration,
    // skip is the empty interval.

    PredPtr parse_stmt(const UniversePtr& u) {
        PredPtr a = parse_stmt_seq(u);
        while (at_sym("|~|")) {
            pos++;
            a = p_or(std::move(a), parse_stmt_seq(u));
        }
        return a;
    }
    PredPtr parse_stmt_seq(const UniversePtr& u) {
        PredPtr a = parse_stmt_atom(u);
        while (at_sym(";")) {
            pos++;
            a = p_chop(std::move(a), parse_stmt_atom(u));
        }
        return a;
    }
    PredPtr parse_stmt_atom(const UniversePtr& u) {
        if (eat_sym("(")) {
            PredPtr a = parse_stmt(u);
            expect_sym(")");
            return a;
        }
        if (eat_sym("[")) {
            BoolExprPtr c = parse_siff({u.get(), nullptr});
            expect_sym("]");
            return normalize_guard(u, std::move(c));
        }
        if (eat_kw("skip")) return p_empty(u);
        if (eat_kw("if")) {
            BoolExprPtr c = parse_siff({u.get(), nullptr});
            expect_kw("then");
            PredPtr s1 = parse_stmt(u);
            expect_kw("else");
            PredPtr s2 = parse_stmt(u);
            expect_kw("fi");
            return p_or(p_chop(normalize_guard(u, c), std::move(s1)),
                        p_chop(normalize_guard(u, sp_not(c)), std::move(s2)));
        }
        if (eat_kw("do")) {
            PredPtr body = parse_stmt(u);
            expect_kw("od");
            return p_omega(std::move(body));
        }
        const Tok t = cur();
        if (t.kind == Tok::Kind::Ident) {
            int v = resolve_local_var(u);
            expect_sym(":=");
            const Tok vt = cur();
            if (vt.kind == Tok::Kind::Ident && vt.text != "true" && vt.text != "false")
                fail_at(vt, "only assignments of literal values are supported");
            Value val = parse_value();
            BoolExprPtr eq = at(vt, [&] { return sp_cmp(*u, BoolExpr::CmpOp::Eq, v, val); });
            return p_nonempty(p_always(u, std::move(eq)));
        }
        fail_at(t, "expected a statement, got " + describe(t));
    }

    // ---- declarations --------------------------------------------------------

    void parse_carrier() {
        if (!at_kw("carrier")) fail_at(cur(), "expected 'carrier', got " + describe(cur()));
        pos++;
        const Tok& n = cur();
        if (n.kind != Tok::Kind::Num || n.val.num < 1)
            fail_at(n, "expected a horizon of at least 1, got " + describe(n));
        pos++;
        out.carrier.horizon = static_cast<int>(n.val.num);
        if (eat_kw("open")) {
            out.carrier.open_ended = true;
        } else if (eat_kw("closed")) {
            out.carrier.open_ended = false;
        } else {
            fail_at(cur(), "expected 'open' or 'closed', got " + describe(cur()));
        }
    }

    void parse_var_decl(bool is_obs) {
        pos++;
        const Tok t = cur();
        std::string name = decl_name(is_obs ? "an observable name" : "a variable name");
        if (is_obs && system_seen)
            fail_at(t, "observables must be declared before the first system");
        expect_sym(":");
        expect_sym("{");
        std::vector<Value> dom;
        dom.push_back(parse_value());
        while (eat_sym(",")) dom.push_back(parse_value());
        expect_sym("}");
        for (size_t a = 0; a < dom.size(); a++)
            for (size_t b = a + 1; b < dom.size(); b++)
                if (dom[a] == dom[b])
                    bad_name(t, "domain of '" + name + "' repeats the value " + to_string(dom[a]));
        if (is_obs) {
            obs_build->add(std::move(name), std::move(dom));
        } else {
            var_ix[name] = static_cast<int>(out.vars.size());
            out.vars.emplace_back(std::move(name), std::move(dom));
        }
    }

    void add_used_var(VarUniverse& uni) {
        const Tok t = cur();
        std::string n = expect_ident("a variable name");
        auto it = var_ix.find(n);
        if (it == var_ix.end()) bad_name(t, "unknown variable '" + n + "'");
        if (uni.find(n) >= 0) bad_name(t, "variable '" + n + "' listed twice");
        uni.add(n, out.vars[it->second].second);
    }

    void parse_pred_decl() {
        pos++;
        std::string name = decl_name("a predicate name");
        expect_kw("over");
        auto build = std::make_shared<VarUniverse>();
        add_used_var(*build);
        while (eat_sym(",")) add_used_var(*build);
        expect_sym(":");
        UniversePtr uni = build;
        PredPtr term = parse_pexpr(uni);
        out.preds.push_back({std::move(name), std::move(uni), std::move(term)});
    }

    void parse_system_decl() {
        pos++;
        std::string name = decl_name("a system name");
        system_seen = true;
        expect_sym("{");
        SystemSpec sys;
        sys.name = name;
        sys.obs = out.observables;
        auto build = std::make_shared<VarUniverse>();
        expect_kw("use");
        add_used_var(*build);
        while (eat_sym(",")) add_used_var(*build);
        sys.vars = build;
        sys.joint = make_joint(sys.vars, sys.obs);
        expect_kw("init");
        sys.init = parse_pexpr(sys.joint);
        while (at_kw("process")) {
            pos++;
            const Tok pt = cur();
            std::string pn = expect_ident("a process name");
            if (reserved_words().count(pn)) fail_at(pt, "'" + pn + "' is a reserved word");
            for (const auto& [existing, body] : sys.ops)
                if (existing == pn)
                    bad_name(pt, "process '" + pn + "' is already defined in system '" + name + "'");
            PredPtr body;
            if (eat_sym(":")) {
                body = parse_pexpr(sys.vars);
            } else {
                body = parse_stmt(sys.vars);
                if (eat_kw("with")) body = p_and(std::move(body), parse_pexpr(sys.vars));
            }
            sys.ops.emplace_back(std::move(pn), std::move(body));
        }
        if (sys.ops.empty())
            fail_at(cur(), "system '" + name + "' needs at least one process");
        expect_kw("final");
        sys.final_rel = parse_siff({sys.vars.get(), sys.obs.get()});
        expect_sym("}");
        sys_ix[name] = static_cast<int>(out.systems.size());
        out.systems.push_back(std::move(sys));
    }

    int resolve_system() {
        const Tok t = cur();
        std::string n = expect_ident("a system name");
        auto it = sys_ix.find(n);
        if (it == sys_ix.end()) bad_name(t, "unknown system '" + n + "'");
        return it->second;
    }

    int resolve_relation() {
        const Tok t = cur();
        std::string n = expect_ident("a relation name");
        auto it = rel_ix.find(n);
        if (it == rel_ix.end()) bad_name(t, "unknown relation '" + n + "'");
        return it->second;
    }

    void parse_relation_decl() {
        pos++;
        std::string name = decl_name("a relation name");
        expect_kw("from");
        int a = resolve_system();
        expect_kw("to");
        int b = resolve_system();
        expect_sym(":");
        RelationDef def;
        def.name = std::move(name);
        def.from_sys = a;
        def.to_sys = b;
        def.term = parse_rexpr(out.systems[a].vars, out.systems[b].vars);
        rel_ix[def.name] = static_cast<int>(out.relations.size());
        out.relations.push_back(std::move(def));
    }

    // Returns {system index, process body, "SYS.PROC"}.
    std::tuple<int, PredPtr, std::string> resolve_procref() {
        const Tok st = cur();
        int si = resolve_system();
        expect_sym(".");
        const Tok pt = cur();
        std::string pn = expect_ident("a process name");
        for (const auto& [n, body] : out.systems[si].ops)
            if (n == pn) return {si, body, st.text + "." + pn};
        bad_name(pt, "system '" + st.text + "' has no process '" + pn + "'");
    }

    void parse_check_decl() {
        pos++;
        static const std::set<std::string> kinds = {"refinement", "forward-sim", "simulates",
                                                    "vdash", "ref2"};
        Directive d;
        if (cur().kind != Tok::Kind::Ident)
            fail_at(cur(), "expected a directive kind or name, got " + describe(cur()));
        if (!kinds.count(cur().text)) {
            d.name = toks[pos++].text;
            if (cur().kind != Tok::Kind::Ident || !kinds.count(cur().text))
                fail_at(cur(), "expected a directive kind (refinement, forward-sim, simulates, "
                               "vdash, ref2), got " +
                                   describe(cur()));
        }
        d.kind = toks[pos++].text;
        if (d.name.empty()) d.name = d.kind;

        if (d.kind == "refinement") {
            d.sys_a = resolve_system();
            d.sys_b = resolve_system();
        } else if (d.kind == "forward-sim") {
            d.sys_a = resolve_system();
            d.sys_b = resolve_system();
            const Tok rt = cur();
            d.rel = resolve_relation();
            const RelationDef& r = out.relations[d.rel];
            if (r.from_sys != d.sys_a || r.to_sys != d.sys_b)
                bad_name(rt, "relation '" + r.name + "' is from '" +
                                 out.systems[r.from_sys].name + "' to '" +
                                 out.systems[r.to_sys].name + "', not these systems");
        } else if (d.kind == "simulates" || d.kind == "ref2") {
            d.rel = resolve_relation();
            const RelationDef& r = out.relations[d.rel];
            const Tok gt = cur();
            auto [sa, g, pa] = resolve_procref();
            if (sa != r.from_sys)
                bad_name(gt, "the first process must come from '" +
                                 out.systems[r.from_sys].name + "' (the relation's from side)");
            const Tok ht = cur();
            auto [sb, h, pb] = resolve_procref();
            if (sb != r.to_sys)
                bad_name(ht, "the second process must come from '" +
                                 out.systems[r.to_sys].name + "' (the relation's to side)");
            d.sys_a = sa;
            d.sys_b = sb;
            d.g = std::move(g);
            d.h = std::move(h);
            d.proc_a = std::move(pa);
            d.proc_b = std::move(pb);
        } else { // vdash
            d.rel = resolve_relation();
            const RelationDef& r = out.relations[d.rel];
            const Tok ht = cur();
            auto [sb, h, pb] = resolve_procref();
            if (sb != r.to_sys)
                bad_name(ht, "the process must come from '" + out.systems[r.to_sys].name +
                                 "' (the relation's to side)");
            d.sys_b = sb;
            d.h = std::move(h);
            d.proc_b = std::move(pb);
        }
        out.directives.push_back(std::move(d));
    }

    SpecFile run() {
        out.observables = obs_build;
        parse_carrier();
        while (cur().kind != Tok::Kind::End) {
            if (at_kw("var")) {
                parse_var_decl(false);
            } else if (at_kw("observable")) {
                parse_var_decl(true);
            } else if (at_kw("pred")) {
                parse_pred_decl();
            } else if (at_kw("system")) {
                parse_system_decl();
            } else if (at_kw("relation")) {
                parse_relation_decl();
            } else if (at_kw("check")) {
                parse_check_decl();
            } else {
                fail_at(cur(), "expected a declaration (var, observable, pred, system, relation, "
                               "check), got " +
                                   describe(cur()));
            }
        }
        return std::move(out);
    }
};

void print_domain(std::ostringstream& os, const std::vector<Value>& dom) {
    os << "{ ";
    for (size_t i = 0; i < dom.size(); i++) {
        if (i) os << ", ";
        os << to_string(dom[i]);
    }
    os << " }";
}

} // namespace

SpecFile parse_spec(const std::string& text, const std::string& filename) {
    Lexer lx{filename, text};
    Parser p;
    p.file = filename;
    p.toks = lx.run();
    SpecFile spec = p.run();
    spec.file = filename;
    return spec;
}

std::string pretty_print(const SpecFile& spec) {
    std::ostringstream os;
    os << "carrier " << spec.carrier.horizon << (spec.carrier.open_ended ? " open" : " closed")
       << "\n";
    for (const auto& [name, dom] : spec.vars) {
        os << "var " << name << " : ";
        print_domain(os, dom);
        os << "\n";
    }
    const VarUniverse& obs = *spec.observables;
    for (int i = 0; i < obs.size(); i++) {
        os << "observable " << obs.name(i) << " : ";
        print_domain(os, obs.domain(i));
        os << "\n";
    }
    for (const auto& p : spec.preds) {
        os << "pred " << p.name << " over ";
        for (int i = 0; i < p.uni->size(); i++) {
            if (i) os << ", ";
            os << p.uni->name(i);
        }
        os << " : " << to_string(*p.term) << "\n";
    }
    for (const auto& s : spec.systems) {
        os << "system " << s.name << " {\n";
        os << "    use ";
        for (int i = 0; i < s.vars->size(); i++) {
            if (i) os << ", ";
            os << s.vars->name(i);
        }
        os << "\n";
        os << "    init " << to_string(*s.init) << "\n";
        for (const auto& [pn, body] : s.ops)
            os << "    process " << pn << " : " << to_string(*body) << "\n";
        os << "    final " << to_string(*s.final_rel, *s.vars, s.obs.get()) << "\n";
        os << "}\n";
    }
    for (const auto& r : spec.relations) {
        os << "relation " << r.name << " from " << spec.systems[r.from_sys].name << " to "
           << spec.systems[r.to_sys].name << " : " << to_string(*r.term) << "\n";
    }
    for (const auto& d : spec.directives) {
        os << "check ";
        if (d.name != d.kind) os << d.name << " ";
        os << d.kind;
        if (d.kind == "refinement") {
            os << " " << spec.systems[d.sys_a].name << " " << spec.systems[d.sys_b].name;
        } else if (d.kind == "forward-sim") {
            os << " " << spec.systems[d.sys_a].name << " " << spec.systems[d.sys_b].name << " "
               << spec.relations[d.rel].name;
        } else if (d.kind == "simulates" || d.kind == "ref2") {
            os << " " << spec.relations[d.rel].name << " " << d.proc_a << " " << d.proc_b;
        } else {
            os << " " << spec.relations[d.rel].name << " " << d.proc_b;
        }
        os << "\n";
    }
    return os.str();
}

} // namespace ivdl
