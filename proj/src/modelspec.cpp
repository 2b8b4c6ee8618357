#include "tamc/modelspec.hpp"

#include "tamc/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

namespace tamc {

std::string to_string(const ParseDiagnostic& d) {
    return std::to_string(d.line) + ":" + std::to_string(d.column) + ": " +
           (d.severity == ParseDiagnostic::Severity::Error ? "error: " : "warning: ") + d.message;
}

namespace {

// ── Lexer ───────────────────────────────────────────────────────────────────

enum class Tok : std::uint8_t { Ident, Int, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::size_t line = 1;
    std::size_t column = 1;
};

struct Failure {
    ParseDiagnostic diag;
};

[[noreturn]] void fail(const Token& t, std::string msg) {
    throw Failure{{t.line, t.column, std::move(msg), ParseDiagnostic::Severity::Error}};
}

std::vector<Token> lex(std::string_view src) {
    static const char* const kPuncts[] = {"-->", "->", ":=", "<=", ">=", "==", "!=", "&&", "||", "<>", "[]",
                                          "{",   "}",  "(",  ")",  "[",  "]",  ",",  ";",  "!",  "?",
                                          ".",   "<",  ">",  "+",  "-",  "*",  "/",  "%"};
    std::vector<Token> out;
    std::size_t line = 1, col = 1, i = 0;
    auto advance = [&](std::size_t k) {
        for (std::size_t j = 0; j < k; ++j, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < src.size()) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (src.substr(i, 2) == "//") {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        Token t;
        t.line = line;
        t.column = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
            t.kind = Tok::Ident;
            t.text = std::string(src.substr(i, j - i));
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            t.kind = Tok::Int;
            t.text = std::string(src.substr(i, j - i));
            advance(j - i);
        } else {
            bool matched = false;
            for (const char* p : kPuncts) {
                const std::string_view ps(p);
                if (src.substr(i, ps.size()) == ps) {
                    t.kind = Tok::Punct;
                    t.text = std::string(ps);
                    advance(ps.size());
                    matched = true;
                    break;
                }
            }
            if (!matched) {
                t.text = std::string(1, c);
                fail(t, "unexpected character '" + t.text + "'");
            }
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.line = line;
    end.column = col;
    out.push_back(end);
    return out;
}

const std::set<std::string, std::less<>> kKeywords = {
    "clock", "int",  "chan",  "broadcast", "process", "loc",    "init", "urgent", "committed",
    "inv",   "guard", "sync", "assign",    "system",  "deadlock", "not", "and",    "or",
    "true",  "false"};

// ── Token cursor ────────────────────────────────────────────────────────────

class Cursor {
public:
    explicit Cursor(std::vector<Token> toks) : toks_(std::move(toks)) {}

    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    const Token& next() {
        const Token& t = peek();
        if (pos_ < toks_.size() - 1) ++pos_;
        return t;
    }
    bool at_end() const { return peek().kind == Tok::End; }

    bool is(std::string_view text) const {
        const Token& t = peek();
        return (t.kind == Tok::Punct || t.kind == Tok::Ident) && t.text == text;
    }
    bool accept(std::string_view text) {
        if (!is(text)) return false;
        next();
        return true;
    }
    const Token& expect(std::string_view text) {
        if (!is(text)) fail(peek(), "expected '" + std::string(text) + "'" + found());
        return next();
    }
    std::string found() const {
        return at_end() ? " but reached end of input" : " but found '" + peek().text + "'";
    }
    const Token& name() {
        const Token& t = peek();
        if (t.kind != Tok::Ident || kKeywords.count(t.text)) fail(t, "expected a name" + found());
        return next();
    }
    std::int32_t integer() {
        bool negative = accept("-");
        const Token& t = peek();
        if (t.kind != Tok::Int) fail(t, "expected an integer" + found());
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc() || v > Bound::kMaxValue) fail(t, "integer out of range");
        next();
        return static_cast<std::int32_t>(negative ? -v : v);
    }
    std::optional<CmpOp> comparison() {
        static const std::pair<const char*, CmpOp> ops[] = {{"<=", CmpOp::Le}, {">=", CmpOp::Ge}, {"==", CmpOp::Eq},
                                                            {"!=", CmpOp::Ne}, {"<", CmpOp::Lt},  {">", CmpOp::Gt}};
        for (const auto& [txt, op] : ops)
            if (accept(txt)) return op;
        return std::nullopt;
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

// ── Model parser ────────────────────────────────────────────────────────────

class ModelParser {
public:
    explicit ModelParser(std::vector<Token> toks) : c_(std::move(toks)) {}

    SourceModel parse() {
        while (c_.is("clock") || c_.is("int") || c_.is("chan") || c_.is("broadcast")) declaration();
        if (!c_.is("process")) fail(c_.peek(), "expected 'process'" + c_.found());
        while (c_.is("process")) process();
        system();
        if (!c_.at_end()) fail(c_.peek(), "unexpected '" + c_.peek().text + "' after system declaration");
        return std::move(m_);
    }

private:
    void declare(const Token& t) {
        if (!names_.insert(t.text).second) fail(t, "duplicate declaration of '" + t.text + "'");
    }

    void declaration() {
        if (c_.accept("clock")) {
            do {
                const Token& t = c_.name();
                declare(t);
                m_.decls.clocks.push_back(t.text);
            } while (c_.accept(","));
        } else if (c_.accept("int")) {
            IntVarDecl proto;
            if (c_.accept("[")) {
                const Token& at = c_.peek();
                proto.lo = c_.integer();
                c_.expect(",");
                proto.hi = c_.integer();
                c_.expect("]");
                if (proto.lo > proto.hi) fail(at, "empty integer range");
            }
            if (proto.lo > 0 || proto.hi < 0) fail(c_.peek(), "range must contain the initial value 0");
            do {
                const Token& t = c_.name();
                declare(t);
                IntVarDecl d = proto;
                d.name = t.text;
                m_.decls.ints.push_back(d);
            } while (c_.accept(","));
        } else {
            ChannelKind kind = ChannelKind::Binary;
            if (c_.accept("broadcast")) kind = ChannelKind::Broadcast;
            c_.expect("chan");
            do {
                const Token& t = c_.name();
                declare(t);
                m_.decls.channels.push_back({t.text, kind});
            } while (c_.accept(","));
        }
        c_.expect(";");
    }

    void process() {
        c_.expect("process");
        const Token& nt = c_.name();
        for (const auto& t : m_.templates)
            if (t.name == nt.text) fail(nt, "duplicate process '" + nt.text + "'");
        Template t;
        t.name = nt.text;
        c_.expect("{");
        while (c_.is("loc") || c_.is("urgent") || c_.is("committed")) {
            Location l;
            if (c_.accept("urgent")) l.kind = LocationKind::Urgent;
            else if (c_.accept("committed")) l.kind = LocationKind::Committed;
            c_.expect("loc");
            const Token& ln = c_.name();
            if (t.find_location(ln.text)) fail(ln, "duplicate location '" + ln.text + "'");
            l.name = ln.text;
            if (c_.accept("inv")) {
                Guard g = conjunction();
                if (!g.ints.empty()) fail(ln, "invariants may only constrain clocks");
                for (const auto& cc : g.clocks)
                    if (cc.left.is_zero()) fail(ln, "invariants may only bound clocks from above");
                l.invariant = std::move(g.clocks);
            }
            c_.expect(";");
            t.locations.push_back(std::move(l));
        }
        if (t.locations.empty()) fail(c_.peek(), "expected 'loc'" + c_.found());
        c_.expect("init");
        t.initial = location_ref(t);
        c_.expect(";");
        while (!c_.is("}")) t.edges.push_back(edge(t));
        c_.expect("}");
        m_.templates.push_back(std::move(t));
    }

    LocId location_ref(const Template& t) {
        const Token& tok = c_.name();
        auto id = t.find_location(tok.text);
        if (!id) fail(tok, "unknown location '" + tok.text + "' in process " + t.name);
        return *id;
    }

    Edge edge(const Template& t) {
        Edge e;
        e.source = location_ref(t);
        c_.expect("->");
        e.target = location_ref(t);
        c_.expect("{");
        if (c_.accept("guard")) {
            e.guard = conjunction();
            c_.expect(";");
        }
        if (c_.accept("sync")) {
            const Token& ch = c_.name();
            auto id = m_.decls.find_channel(ch.text);
            if (!id) fail(ch, "unknown channel '" + ch.text + "'");
            if (c_.accept("!")) e.sync = SyncLabel::send(*id);
            else if (c_.accept("?")) e.sync = SyncLabel::receive(*id);
            else fail(c_.peek(), "expected '!' or '?'" + c_.found());
            if (e.sync.kind == SyncLabel::Kind::Receive &&
                m_.decls.channels[*id].kind == ChannelKind::Broadcast && !e.guard.clocks.empty())
                fail(ch, "broadcast receivers may not have clock guards");
            c_.expect(";");
        }
        if (c_.accept("assign")) {
            do e.updates.push_back(update());
            while (c_.accept(","));
            c_.expect(";");
        }
        c_.expect("}");
        return e;
    }

    Update update() {
        const Token& t = c_.name();
        c_.expect(":=");
        if (auto clock = m_.decls.find_clock(t.text)) {
            const Token& vt = c_.peek();
            const std::int32_t v = c_.integer();
            if (v < 0) fail(vt, "clocks can only be assigned non-negative constants");
            return ClockAssign{*clock, v};
        }
        if (auto var = m_.decls.find_int(t.text)) return IntAssign{*var, expression()};
        fail(t, "unknown variable '" + t.text + "'");
    }

    Guard conjunction() {
        Guard g;
        do constraint(g);
        while (c_.accept("&&"));
        return g;
    }

    void constraint(Guard& g) {
        const Token& first = c_.peek();
        if (first.kind == Tok::Ident) {
            if (auto x = m_.decls.find_clock(first.text)) {
                c_.next();
                ClockId y = ClockId::zero();
                if (c_.accept("-")) {
                    const Token& yt = c_.name();
                    auto yc = m_.decls.find_clock(yt.text);
                    if (!yc) fail(yt, "expected a clock after '-' in clock difference");
                    y = *yc;
                    if (y == *x) fail(yt, "clock difference of a clock with itself");
                }
                auto op = c_.comparison();
                if (!op) fail(c_.peek(), "expected a comparison" + c_.found());
                if (*op == CmpOp::Ne) fail(first, "'!=' is not allowed on clocks");
                const std::int32_t v = c_.integer();
                auto cs = clock_difference(*x, y, *op, v);
                g.clocks.insert(g.clocks.end(), cs.begin(), cs.end());
                return;
            }
        }
        IntPredicate p;
        p.lhs = expression();
        auto op = c_.comparison();
        if (!op) fail(c_.peek(), "expected a comparison" + c_.found());
        p.op = *op;
        p.rhs = expression();
        g.ints.push_back(std::move(p));
    }

    IntExpr expression() {
        IntExpr e = term();
        while (c_.is("+") || c_.is("-")) {
            const auto op = c_.next().text == "+" ? IntExpr::Op::Add : IntExpr::Op::Sub;
            e = IntExpr::binary(op, std::move(e), term());
        }
        return e;
    }

    IntExpr term() {
        IntExpr e = unary();
        while (c_.is("*") || c_.is("/") || c_.is("%")) {
            const std::string t = c_.next().text;
            const auto op = t == "*" ? IntExpr::Op::Mul : t == "/" ? IntExpr::Op::Div : IntExpr::Op::Mod;
            e = IntExpr::binary(op, std::move(e), unary());
        }
        return e;
    }

    IntExpr unary() {
        if (c_.is("-")) {
            if (c_.peek(1).kind == Tok::Int) return IntExpr::constant(c_.integer());
            c_.next();
            return IntExpr::unary(IntExpr::Op::Neg, unary());
        }
        const Token& t = c_.peek();
        if (t.kind == Tok::Int) return IntExpr::constant(c_.integer());
        if (c_.accept("(")) {
            IntExpr e = expression();
            c_.expect(")");
            return e;
        }
        const Token& n = c_.name();
        if (auto v = m_.decls.find_int(n.text)) return IntExpr::variable(*v);
        if (m_.decls.find_clock(n.text)) fail(n, "clock '" + n.text + "' used in an integer expression");
        fail(n, "unknown identifier '" + n.text + "'");
    }

    void system() {
        c_.expect("system");
        std::set<std::string> seen;
        do {
            const Token& t = c_.name();
            bool known = false;
            for (const auto& tpl : m_.templates) known |= tpl.name == t.text;
            if (!known) fail(t, "unknown process '" + t.text + "'");
            if (!seen.insert(t.text).second) fail(t, "process '" + t.text + "' instantiated twice");
            m_.system.push_back(t.text);
        } while (c_.accept(","));
        c_.expect(";");
    }

    Cursor c_;
    SourceModel m_;
    std::set<std::string> names_;
};

// ── Query parser ────────────────────────────────────────────────────────────

class QueryParser {
public:
    explicit QueryParser(std::vector<Token> toks) : c_(std::move(toks)) {}

    Query parse() {
        Query q;
        const Token& t = c_.peek();
        const Token& t1 = c_.peek(1);
        if (t.kind == Tok::Ident && (t.text == "E" || t.text == "A") && (t1.text == "<>" || t1.text == "[]")) {
            c_.next();
            c_.next();
            if (t.text == "E") q.kind = t1.text == "<>" ? Query::Kind::ExistsEventually : Query::Kind::ExistsGlobally;
            else q.kind = t1.text == "<>" ? Query::Kind::AlwaysEventually : Query::Kind::AlwaysGlobally;
            q.phi = disjunction();
        } else {
            q.phi = disjunction();
            c_.expect("-->");
            q.kind = Query::Kind::LeadsTo;
            q.psi = disjunction();
        }
        if (!c_.at_end()) fail(c_.peek(), "unexpected '" + c_.peek().text + "'");
        return q;
    }

private:
    StateFormula disjunction() {
        StateFormula f = conjunction();
        while (c_.accept("or") || c_.accept("||")) f = StateFormula::disjunction(std::move(f), conjunction());
        return f;
    }

    StateFormula conjunction() {
        StateFormula f = negation();
        while (c_.accept("and") || c_.accept("&&")) f = StateFormula::conjunction(std::move(f), negation());
        return f;
    }

    StateFormula negation() {
        if (c_.accept("not") || c_.accept("!")) return StateFormula::negation(negation());
        return atom();
    }

    StateFormula atom() {
        if (c_.accept("(")) {
            StateFormula f = disjunction();
            c_.expect(")");
            return f;
        }
        if (c_.accept("true")) return StateFormula::truth(true);
        if (c_.accept("false")) return StateFormula::truth(false);
        if (c_.accept("deadlock")) return StateFormula::deadlock();
        const Token& n = c_.name();
        if (c_.accept(".")) {
            const Token& l = c_.name();
            return StateFormula::location(n.text, l.text);
        }
        auto op = c_.comparison();
        if (!op) fail(c_.peek(), "expected '.' or a comparison after '" + n.text + "'");
        return StateFormula::compare(n.text, *op, c_.integer());
    }

    Cursor c_;
};

// ── Printer ─────────────────────────────────────────────────────────────────

int expr_precedence(const IntExpr& e) {
    using Op = IntExpr::Op;
    switch (e.op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div:
    case Op::Mod: return 2;
    case Op::Neg: return 3;
    default: return 4;
    }
}

std::string print_expr(const IntExpr& e, const Declarations& d) {
    using Op = IntExpr::Op;
    auto wrap = [&](const IntExpr& sub, bool paren) {
        const std::string s = print_expr(sub, d);
        return paren ? "(" + s + ")" : s;
    };
    switch (e.op) {
    case Op::Const: return std::to_string(e.value);
    case Op::Var: return d.ints.at(static_cast<std::size_t>(e.value)).name;
    case Op::Neg: {
        const auto& a = e.args[0];
        const bool paren = expr_precedence(a) < 3 || a.op == Op::Const || a.op == Op::Neg;
        return "-" + wrap(a, paren);
    }
    default: break;
    }
    const int p = expr_precedence(e);
    const char* sym = e.op == Op::Add ? " + " : e.op == Op::Sub ? " - " : e.op == Op::Mul ? " * "
                                                                        : e.op == Op::Div ? " / " : " % ";
    return wrap(e.args[0], expr_precedence(e.args[0]) < p) + sym + wrap(e.args[1], expr_precedence(e.args[1]) <= p);
}

std::string print_conj(const Guard& g, const Declarations& d) {
    std::vector<std::string> parts;
    const auto& cs = g.clocks;
    for (std::size_t i = 0; i < cs.size(); ++i) {
        const auto& c = cs[i];
        if (i + 1 < cs.size() && !c.left.is_zero() && c.bound.is_weak()) {
            const auto& n = cs[i + 1];
            if (n.left == c.right && n.right == c.left && n.bound == Bound::weak(-c.bound.value())) {
                std::string lhs = d.clock_name(c.left);
                if (!c.right.is_zero()) lhs += " - " + d.clock_name(c.right);
                parts.push_back(lhs + " == " + std::to_string(c.bound.value()));
                ++i;
                continue;
            }
        }
        parts.push_back(to_string(c, d));
    }
    for (const auto& p : g.ints)
        parts.push_back(print_expr(p.lhs, d) + " " + std::string(to_string(p.op)) + " " + print_expr(p.rhs, d));
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? " && " : "") + parts[i];
    return out;
}

}  // namespace

ParseResult<SourceModel> parse_model(std::string_view text) {
    ParseResult<SourceModel> r;
    try {
        r.value = ModelParser(lex(text)).parse();
    } catch (const Failure& f) {
        r.diagnostics.push_back(f.diag);
    }
    return r;
}

ParseResult<std::vector<Query>> parse_queries(std::string_view text) {
    ParseResult<std::vector<Query>> r;
    std::vector<Query> qs;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        ++line_no;
        const std::string_view line = text.substr(start, end - start);
        start = end + 1;
        try {
            auto toks = lex(line);
            for (auto& t : toks) t.line = line_no;
            if (toks.size() == 1) continue;  // blank or comment-only
            qs.push_back(QueryParser(std::move(toks)).parse());
        } catch (const Failure& f) {
            auto d = f.diag;
            d.line = line_no;
            r.diagnostics.push_back(d);
        }
        if (end == text.size()) break;
    }
    if (r.diagnostics.empty()) r.value = std::move(qs);
    return r;
}

std::string print_model(const SourceModel& m) {
    std::ostringstream os;
    const auto& d = m.decls;
    if (!d.clocks.empty()) {
        os << "clock ";
        for (std::size_t i = 0; i < d.clocks.size(); ++i) os << (i ? ", " : "") << d.clocks[i];
        os << ";\n";
    }
    for (std::size_t i = 0; i < d.ints.size();) {
        std::size_t j = i;
        while (j < d.ints.size() && d.ints[j].lo == d.ints[i].lo && d.ints[j].hi == d.ints[i].hi) ++j;
        os << "int[" << d.ints[i].lo << "," << d.ints[i].hi << "] ";
        for (std::size_t k = i; k < j; ++k) os << (k > i ? ", " : "") << d.ints[k].name;
        os << ";\n";
        i = j;
    }
    for (std::size_t i = 0; i < d.channels.size();) {
        std::size_t j = i;
        while (j < d.channels.size() && d.channels[j].kind == d.channels[i].kind) ++j;
        os << (d.channels[i].kind == ChannelKind::Broadcast ? "broadcast chan " : "chan ");
        for (std::size_t k = i; k < j; ++k) os << (k > i ? ", " : "") << d.channels[k].name;
        os << ";\n";
        i = j;
    }
    for (const auto& t : m.templates) {
        os << "\nprocess " << t.name << " {\n";
        for (const auto& l : t.locations) {
            os << "    ";
            if (l.kind == LocationKind::Urgent) os << "urgent ";
            if (l.kind == LocationKind::Committed) os << "committed ";
            os << "loc " << l.name;
            if (!l.invariant.empty()) os << " inv " << print_conj(Guard{l.invariant, {}}, d);
            os << ";\n";
        }
        os << "    init " << t.locations.at(t.initial).name << ";\n";
        for (const auto& e : t.edges) {
            os << "    " << t.locations.at(e.source).name << " -> " << t.locations.at(e.target).name << " {";
            if (!e.guard.empty()) os << " guard " << print_conj(e.guard, d) << ";";
            if (e.sync.kind != SyncLabel::Kind::Internal)
                os << " sync " << d.channels.at(e.sync.channel).name
                   << (e.sync.kind == SyncLabel::Kind::Send ? "!" : "?") << ";";
            if (!e.updates.empty()) {
                os << " assign ";
                for (std::size_t k = 0; k < e.updates.size(); ++k) {
                    if (k) os << ", ";
                    if (const auto* ca = std::get_if<ClockAssign>(&e.updates[k]))
                        os << d.clock_name(ca->clock) << " := " << ca->value;
                    else {
                        const auto& ia = std::get<IntAssign>(e.updates[k]);
                        os << d.ints.at(ia.var).name << " := " << print_expr(ia.expr, d);
                    }
                }
                os << ";";
            }
            os << " }\n";
        }
        os << "}\n";
    }
    os << "\nsystem ";
    for (std::size_t i = 0; i < m.system.size(); ++i) os << (i ? ", " : "") << m.system[i];
    os << ";\n";
    return os.str();
}

Network to_network(const SourceModel& m) {
    std::vector<Template> instances;
    for (const auto& name : m.system) {
        auto it = std::find_if(m.templates.begin(), m.templates.end(), [&](const Template& t) { return t.name == name; });
        if (it == m.templates.end()) throw ModelError("system references unknown process '" + name + "'");
        instances.push_back(*it);
    }
    return make_network(m.decls, std::move(instances));
}

Network load_network(std::string_view text) {
    auto r = parse_model(text);
    if (!r.ok()) {
        std::string msg;
        for (const auto& d : r.diagnostics) msg += (msg.empty() ? "" : "\n") + to_string(d);
        throw ModelError(msg);
    }
    return to_network(*r.value);
}

}  // namespace tamc
