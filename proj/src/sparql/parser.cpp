#include "fedsparql/sparql/parser.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <map>
#include <optional>

namespace fedsparql::sparql {

namespace {

using rdf::Term;
using rdf::TermOrVar;
using rdf::Variable;

bool name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
           static_cast<unsigned char>(c) >= 0x80;
}

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

const char* kRejectedKeywords[] = {
    "OPTIONAL", "MINUS",  "BIND",   "ORDER",    "HAVING", "CONSTRUCT",    "DESCRIBE",
    "INSERT",   "DELETE", "LOAD",   "CLEAR",    "CREATE", "DROP",         "EXISTS",
    "REDUCED",  "FROM",   "SAMPLE", "SUM",      "AVG",    "MIN",          "MAX",
    "GROUP_CONCAT",
};

class Parser {
  public:
    explicit Parser(const std::string& src) : src_(src) {}

    Query parse() {
        prologue();
        Query q;
        if (keyword("SELECT")) {
            parse_select(q);
        } else if (keyword("ASK")) {
            q.form = Query::Form::Ask;
            keyword("WHERE");
            q.pattern = group();
        } else {
            reject_if_listed();
            fail("expected SELECT or ASK");
        }
        solution_modifiers(q);
        skip_ws();
        if (!eof()) {
            reject_if_listed();
            fail("unexpected trailing input");
        }
        q.prefixes.assign(prefix_order_.begin(), prefix_order_.end());
        validate(q);
        return q;
    }

  private:
    // --- character machinery -------------------------------------------------

    [[noreturn]] void fail(const std::string& msg, ParseErrorKind kind = ParseErrorKind::Syntax) const {
        throw QueryParseError(kind, msg, line_, col_);
    }
    [[noreturn]] void unsupported(const std::string& feature) const {
        fail("unsupported feature: " + feature, ParseErrorKind::UnsupportedFeature);
    }

    bool eof() const { return pos_ >= src_.size(); }
    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }
    char advance() {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_ws() {
        while (!eof()) {
            char c = peek();
            if (c == '#') {
                while (!eof() && peek() != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    bool match_char(char c) {
        skip_ws();
        if (peek() == c) {
            advance();
            return true;
        }
        return false;
    }

    void expect_char(char c, const char* what) {
        if (!match_char(c)) fail(std::string("expected '") + c + "' (" + what + ")");
    }

    /// Case-insensitive keyword match with word boundary.
    bool keyword(const char* kw) {
        skip_ws();
        std::size_t n = std::strlen(kw);
        if (pos_ + n > src_.size()) return false;
        for (std::size_t i = 0; i < n; ++i)
            if (std::toupper(static_cast<unsigned char>(src_[pos_ + i])) != kw[i]) return false;
        char after = pos_ + n < src_.size() ? src_[pos_ + n] : ' ';
        if (name_char(after) || after == ':') return false;
        for (std::size_t i = 0; i < n; ++i) advance();
        return true;
    }

    bool peek_keyword(const char* kw) {
        std::size_t sp = pos_, sl = line_, sc = col_;
        bool ok = keyword(kw);
        pos_ = sp;
        line_ = sl;
        col_ = sc;
        return ok;
    }

    void reject_if_listed() {
        for (const char* kw : kRejectedKeywords)
            if (peek_keyword(kw)) unsupported(kw);
    }

    // --- terms ---------------------------------------------------------------

    std::string iriref() {
        skip_ws();
        if (peek() != '<') fail("expected IRI");
        advance();
        std::string out;
        while (!eof() && peek() != '>') {
            char c = advance();
            if (c == ' ' || c == '\n') fail("whitespace inside IRI");
            out += c;
        }
        if (eof()) fail("unterminated IRI");
        advance();
        return out;
    }

    Term iri_term() {
        skip_ws();
        if (peek() == '<') return Term::iri(iriref());
        std::string pfx;
        while (!eof() && peek() != ':' && name_char(peek())) pfx += advance();
        if (peek() != ':') fail("expected IRI or prefixed name");
        advance();
        std::string local;
        while (!eof()) {
            char c = peek();
            if (c == '\\') {
                advance();
                local += advance();
            } else if (name_char(c) || c == '-' || c == '%') {
                local += advance();
            } else if (c == '.' && (name_char(peek(1)) || peek(1) == '-')) {
                local += advance();
            } else {
                break;
            }
        }
        auto it = prefixes_.find(pfx);
        if (it == prefixes_.end())
            fail("undefined prefix '" + pfx + ":'", ParseErrorKind::UndefinedPrefix);
        return Term::iri(it->second + local);
    }

    std::string variable() {
        skip_ws();
        if (peek() != '?' && peek() != '$') fail("expected variable");
        advance();
        std::string name;
        while (!eof() && (name_char(peek()) || peek() == '-')) name += advance();
        if (name.empty()) fail("empty variable name");
        return name;
    }

    std::string string_body() {
        char q = advance();
        bool long_form = false;
        if (peek() == q && peek(1) == q) {
            advance();
            advance();
            long_form = true;
        }
        std::string out;
        while (true) {
            if (eof()) fail("unterminated string literal");
            char c = peek();
            if (!long_form && (c == '\n' || c == '\r')) fail("newline in string literal");
            if (c == q) {
                if (!long_form) {
                    advance();
                    return out;
                }
                if (peek(1) == q && peek(2) == q) {
                    advance();
                    advance();
                    advance();
                    return out;
                }
                out += advance();
                continue;
            }
            advance();
            if (c != '\\') {
                out += c;
                continue;
            }
            char e = advance();
            switch (e) {
            case 't': out += '\t'; break;
            case 'b': out += '\b'; break;
            case 'n': out += '\n'; break;
            case 'r': out += '\r'; break;
            case 'f': out += '\f'; break;
            case '"': out += '"'; break;
            case '\'': out += '\''; break;
            case '\\': out += '\\'; break;
            case 'u':
            case 'U': {
                int n = e == 'u' ? 4 : 8;
                std::uint32_t cp = 0;
                for (int i = 0; i < n; ++i) {
                    char h = advance();
                    if (!std::isxdigit(static_cast<unsigned char>(h))) fail("bad \\u escape");
                    cp = cp * 16 + (std::isdigit(static_cast<unsigned char>(h))
                                        ? h - '0'
                                        : std::tolower(static_cast<unsigned char>(h)) - 'a' + 10);
                }
                append_utf8(out, cp);
                break;
            }
            default: fail("invalid string escape");
            }
        }
    }

    Term literal() {
        skip_ws();
        char c = peek();
        if (c == '"' || c == '\'') {
            std::string lex = string_body();
            if (peek() == '@') {
                advance();
                std::string lang;
                while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-'))
                    lang += advance();
                if (lang.empty()) fail("empty language tag");
                return Term::lang_literal(lex, lang);
            }
            if (peek() == '^' && peek(1) == '^') {
                advance();
                advance();
                Term dt = iri_term();
                return Term::literal(lex, dt.value());
            }
            return Term::literal(lex);
        }
        if (keyword("TRUE")) return Term::literal("true", std::string(vocab::xsd_boolean));
        if (keyword("FALSE")) return Term::literal("false", std::string(vocab::xsd_boolean));
        std::string num;
        if (c == '+' || c == '-') num += advance();
        bool has_dot = false, has_exp = false, has_digit = false;
        while (!eof()) {
            char d = peek();
            if (std::isdigit(static_cast<unsigned char>(d))) {
                has_digit = true;
                num += advance();
            } else if (d == '.' && !has_dot && !has_exp &&
                       std::isdigit(static_cast<unsigned char>(peek(1)))) {
                has_dot = true;
                num += advance();
            } else if ((d == 'e' || d == 'E') && !has_exp && has_digit) {
                has_exp = true;
                num += advance();
                if (peek() == '+' || peek() == '-') num += advance();
            } else {
                break;
            }
        }
        if (!has_digit) fail("expected literal");
        if (has_exp) return Term::literal(num, std::string(vocab::xsd_double));
        if (has_dot) return Term::literal(num, std::string(vocab::xsd_decimal));
        return Term::literal(num, std::string(vocab::xsd_integer));
    }

    TermOrVar term_or_var() {
        skip_ws();
        char c = peek();
        if (c == '?' || c == '$') return Variable{variable()};
        if (c == '[') unsupported("blank nodes in query patterns");
        if (c == '_' && peek(1) == ':') unsupported("blank nodes in query patterns");
        if (c == '(') unsupported("collections in query patterns");
        if (c == '"' || c == '\'' || c == '+' || c == '-' ||
            std::isdigit(static_cast<unsigned char>(c)))
            return literal();
        if (peek_keyword("TRUE") || peek_keyword("FALSE")) return literal();
        return iri_term();
    }

    TermOrVar verb() {
        skip_ws();
        if (peek() == '?' || peek() == '$') return Variable{variable()};
        if (peek() == 'a' && !name_char(peek(1)) && peek(1) != ':') {
            advance();
            return Term::iri(std::string(vocab::rdf_type));
        }
        if (peek() == '^' || peek() == '!' || peek() == '(') unsupported("property paths");
        TermOrVar v = iri_term();
        skip_ws();
        char c = peek();
        if (c == '/' || c == '|' || c == '*' || c == '+' ||
            (c == '?' && !name_char(peek(1)) && peek(1) != '$'))
            unsupported("property paths");
        return v;
    }

    // --- prologue ------------------------------------------------------------

    void prologue() {
        while (true) {
            if (keyword("PREFIX")) {
                skip_ws();
                std::string pfx;
                while (!eof() && peek() != ':') {
                    if (std::isspace(static_cast<unsigned char>(peek())))
                        fail("expected ':' in prefix declaration");
                    pfx += advance();
                }
                expect_char(':', "prefix declaration");
                std::string iri = iriref();
                prefixes_[pfx] = iri;
                prefix_order_.emplace_back(pfx, iri);
            } else if (keyword("BASE")) {
                unsupported("BASE (use absolute IRIs)");
            } else {
                break;
            }
        }
    }

    // --- select header -------------------------------------------------------

    void parse_select(Query& q) {
        q.form = Query::Form::Select;
        if (keyword("DISTINCT")) q.distinct = true;
        if (keyword("REDUCED")) unsupported("REDUCED");
        skip_ws();
        if (match_char('*')) {
            q.select_star = true;
        } else {
            bool any = false;
            while (true) {
                skip_ws();
                if (peek() == '?' || peek() == '$') {
                    q.projection.push_back(variable());
                    any = true;
                } else if (peek() == '(') {
                    advance();
                    parse_count(q);
                    expect_char(')', "aggregate alias");
                    any = true;
                } else {
                    break;
                }
            }
            if (!any) fail("expected projection variables or *");
        }
        if (!keyword("WHERE")) {
            skip_ws();
            if (peek() != '{') fail("expected WHERE");
        }
        q.pattern = group();
    }

    void parse_count(Query& q) {
        if (!keyword("COUNT")) {
            reject_if_listed();
            unsupported("non-COUNT aggregate or expression projection");
        }
        if (q.count) unsupported("multiple aggregates");
        expect_char('(', "COUNT");
        CountSpec spec;
        skip_ws();
        if (match_char('*')) {
            spec.var = std::nullopt;
        } else {
            if (keyword("DISTINCT")) spec.distinct = true;
            skip_ws();
            if (match_char('*'))
                spec.var = std::nullopt;
            else
                spec.var = variable();
        }
        expect_char(')', "COUNT argument");
        if (!keyword("AS")) fail("expected AS after COUNT(...)");
        spec.alias = variable();
        q.count = std::move(spec);
    }

    // --- group graph patterns --------------------------------------------------

    PatternPtr group() {
        expect_char('{', "group graph pattern");
        std::vector<PatternPtr> elements;
        std::vector<ExprPtr> filters;
        rdf::Bgp bgp; // current run of triple patterns

        auto flush_bgp = [&]() {
            if (!bgp.patterns.empty()) {
                elements.push_back(make_basic(std::move(bgp)));
                bgp = rdf::Bgp{};
            }
        };

        while (true) {
            skip_ws();
            if (eof()) fail("unterminated group (missing '}')");
            if (peek() == '}') {
                advance();
                break;
            }
            if (match_char('.')) continue;
            if (keyword("FILTER")) {
                filters.push_back(constraint());
                continue;
            }
            if (keyword("SERVICE")) {
                flush_bgp();
                elements.push_back(service_pattern());
                continue;
            }
            if (keyword("GRAPH")) {
                flush_bgp();
                skip_ws();
                if (peek() == '?' || peek() == '$') {
                    std::string v = variable();
                    elements.push_back(make_named_graph_var(v, group()));
                } else {
                    Term g = iri_term();
                    elements.push_back(make_named_graph_iri(g.value(), group()));
                }
                continue;
            }
            if (keyword("VALUES")) {
                flush_bgp();
                elements.push_back(make_values(values_block()));
                continue;
            }
            reject_if_listed();
            if (peek() == '{') {
                flush_bgp();
                elements.push_back(group_or_union());
                continue;
            }
            // Triples block entry.
            triples_same_subject(bgp);
        }
        flush_bgp();

        PatternPtr out;
        if (elements.empty())
            out = make_basic(rdf::Bgp{});
        else if (elements.size() == 1)
            out = elements.front();
        else
            out = make_join(std::move(elements));
        for (const ExprPtr& f : filters) out = make_filter(out, f);
        return out;
    }

    PatternPtr group_or_union() {
        std::vector<PatternPtr> branches;
        branches.push_back(group());
        while (keyword("UNION")) branches.push_back(group());
        if (branches.size() == 1) return branches.front();
        return make_union(std::move(branches));
    }

    PatternPtr service_pattern() {
        bool silent = keyword("SILENT");
        skip_ws();
        if (peek() == '?' || peek() == '$')
            unsupported("SERVICE with a variable endpoint");
        if (peek() != '<')
            fail("malformed SERVICE: expected an endpoint IRI in angle brackets",
                 ParseErrorKind::MalformedService);
        Term e = iri_term();
        if (e.value().find("://") == std::string::npos)
            fail("malformed SERVICE: endpoint IRI must be absolute",
                 ParseErrorKind::MalformedService);
        skip_ws();
        if (peek() != '{')
            fail("malformed SERVICE: expected '{' after endpoint IRI",
                 ParseErrorKind::MalformedService);
        return make_service(e.value(), group(), silent);
    }

    void triples_same_subject(rdf::Bgp& bgp) {
        TermOrVar s = term_or_var();
        if (!rdf::is_var(s) && rdf::as_term(s).is_literal()) fail("literal cannot be a subject");
        while (true) {
            TermOrVar p = verb();
            while (true) {
                TermOrVar o = term_or_var();
                bgp.patterns.push_back(rdf::TriplePattern{s, p, o});
                if (!match_char(',')) break;
            }
            if (!match_char(';')) break;
            skip_ws();
            if (peek() == '.' || peek() == '}' || eof()) break;
        }
    }

    ValuesBlock values_block() {
        ValuesBlock block;
        skip_ws();
        if (peek() == '?' || peek() == '$') {
            block.vars.push_back(variable());
            expect_char('{', "VALUES data");
            while (!match_char('}')) {
                skip_ws();
                if (eof()) fail("unterminated VALUES block");
                block.rows.push_back({data_value()});
            }
            return block;
        }
        expect_char('(', "VALUES variable list");
        while (!match_char(')')) {
            skip_ws();
            if (eof()) fail("unterminated VALUES variable list");
            block.vars.push_back(variable());
        }
        expect_char('{', "VALUES data");
        while (!match_char('}')) {
            skip_ws();
            if (eof()) fail("unterminated VALUES block");
            expect_char('(', "VALUES row");
            std::vector<std::optional<Term>> row;
            while (!match_char(')')) {
                skip_ws();
                if (eof()) fail("unterminated VALUES row");
                row.push_back(data_value());
            }
            if (row.size() != block.vars.size()) fail("VALUES row arity mismatch");
            block.rows.push_back(std::move(row));
        }
        return block;
    }

    std::optional<Term> data_value() {
        if (keyword("UNDEF")) return std::nullopt;
        skip_ws();
        char c = peek();
        if (c == '<') return iri_term();
        if (c == '"' || c == '\'' || c == '+' || c == '-' ||
            std::isdigit(static_cast<unsigned char>(c)))
            return literal();
        if (peek_keyword("TRUE") || peek_keyword("FALSE")) return literal();
        return iri_term();
    }

    // --- expressions -----------------------------------------------------------

    ExprPtr constraint() {
        skip_ws();
        if (peek() == '(') {
            advance();
            ExprPtr e = expression();
            expect_char(')', "FILTER expression");
            return e;
        }
        if (keyword("REGEX")) return regex_call();
        reject_if_listed();
        unsupported("FILTER constraint (only bracketted expressions and REGEX are supported)");
    }

    ExprPtr expression() { return or_expression(); }

    ExprPtr or_expression() {
        ExprPtr e = and_expression();
        while (true) {
            skip_ws();
            if (peek() == '|' && peek(1) == '|') {
                advance();
                advance();
                e = expr_or(e, and_expression());
            } else {
                break;
            }
        }
        return e;
    }

    ExprPtr and_expression() {
        ExprPtr e = relational();
        while (true) {
            skip_ws();
            if (peek() == '&' && peek(1) == '&') {
                advance();
                advance();
                e = expr_and(e, relational());
            } else {
                break;
            }
        }
        return e;
    }

    ExprPtr relational() {
        ExprPtr a = unary();
        skip_ws();
        char c = peek();
        std::string op;
        if (c == '=') {
            advance();
            op = "=";
        } else if (c == '!' && peek(1) == '=') {
            advance();
            advance();
            op = "!=";
        } else if (c == '<') {
            advance();
            op = match_char('=') ? "<=" : "<";
        } else if (c == '>') {
            advance();
            op = match_char('=') ? ">=" : ">";
        } else {
            return a;
        }
        return expr_compare(op, a, unary());
    }

    ExprPtr unary() {
        skip_ws();
        if (peek() == '!' && peek(1) != '=') {
            advance();
            return expr_not(unary());
        }
        return primary();
    }

    ExprPtr primary() {
        skip_ws();
        char c = peek();
        if (c == '(') {
            advance();
            ExprPtr e = expression();
            expect_char(')', "parenthesized expression");
            return e;
        }
        if (keyword("REGEX")) return regex_call();
        if (c == '?' || c == '$') return expr_var(variable());
        if (c == '<') return expr_const(iri_term());
        if (c == '"' || c == '\'' || c == '+' || c == '-' ||
            std::isdigit(static_cast<unsigned char>(c)))
            return expr_const(literal());
        if (keyword("TRUE")) return expr_const(Term::literal("true", std::string(vocab::xsd_boolean)));
        if (keyword("FALSE")) return expr_const(Term::literal("false", std::string(vocab::xsd_boolean)));
        // Bare identifier: either a prefixed name constant or an unsupported function call.
        std::size_t sp = pos_, sl = line_, sc = col_;
        std::string word;
        while (!eof() && name_char(peek())) word += advance();
        skip_ws();
        if (!word.empty() && peek() == '(') unsupported("function " + word);
        pos_ = sp;
        line_ = sl;
        col_ = sc;
        return expr_const(iri_term());
    }

    ExprPtr regex_call() {
        expect_char('(', "REGEX arguments");
        ExprPtr text = expression();
        expect_char(',', "REGEX arguments");
        ExprPtr pattern = expression();
        ExprPtr flags;
        if (match_char(',')) flags = expression();
        expect_char(')', "REGEX arguments");
        return expr_regex(text, pattern, flags);
    }

    // --- solution modifiers ------------------------------------------------------

    void solution_modifiers(Query& q) {
        while (true) {
            if (keyword("GROUP")) {
                if (!keyword("BY")) fail("expected BY after GROUP");
                skip_ws();
                while (peek() == '?' || peek() == '$') {
                    q.group_by.push_back(variable());
                    skip_ws();
                }
                if (q.group_by.empty()) fail("expected grouping variables");
                continue;
            }
            if (keyword("ORDER")) unsupported("ORDER BY");
            if (keyword("HAVING")) unsupported("HAVING");
            if (keyword("LIMIT")) {
                q.limit = non_negative_int("LIMIT");
                continue;
            }
            if (keyword("OFFSET")) {
                q.offset = non_negative_int("OFFSET");
                continue;
            }
            break;
        }
    }

    long long non_negative_int(const char* what) {
        skip_ws();
        std::string digits;
        while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) digits += advance();
        if (digits.empty()) fail(std::string("expected non-negative integer after ") + what);
        return std::stoll(digits);
    }

    // --- validation ----------------------------------------------------------------

    void validate(const Query& q) {
        auto vars = pattern_variables(*q.pattern);
        auto in_pattern = [&](const std::string& v) {
            return std::find(vars.begin(), vars.end(), v) != vars.end();
        };
        for (const std::string& v : q.projection)
            if (!in_pattern(v)) fail("projection variable ?" + v + " does not occur in the pattern");
        if (q.count && !q.count->var.has_value()) {
            // COUNT(*) always fine
        } else if (q.count && !in_pattern(*q.count->var)) {
            fail("aggregated variable ?" + *q.count->var + " does not occur in the pattern");
        }
        if (q.count && !q.group_by.empty())
            for (const std::string& v : q.projection)
                if (std::find(q.group_by.begin(), q.group_by.end(), v) == q.group_by.end())
                    fail("projected variable ?" + v + " is not grouped");
        if (q.count && q.group_by.empty() && !q.projection.empty())
            fail("plain variables cannot be projected next to an ungrouped aggregate");
    }

    const std::string& src_;
    std::size_t pos_ = 0, line_ = 1, col_ = 1;
    std::map<std::string, std::string> prefixes_;
    std::vector<std::pair<std::string, std::string>> prefix_order_;
};

} // namespace

Query parse_query(const std::string& text) {
    Parser p(text);
    return p.parse();
}

} // namespace fedsparql::sparql
