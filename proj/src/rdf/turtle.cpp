#include "fedsparql/rdf/turtle.hpp"

#include "fedsparql/util/fnv1a.hpp"

#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace fedsparql::rdf {

namespace {

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

bool is_pn_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
           static_cast<unsigned char>(c) >= 0x80;
}

// Minimal RFC 3986 reference resolution; covers the forms fixtures use.
std::string resolve_iri(const std::string& ref, const std::string& base) {
    auto is_absolute = [](const std::string& s) {
        for (char c : s) {
            if (c == ':') return true;
            if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.')
                return false;
        }
        return false;
    };
    if (base.empty() || is_absolute(ref)) return ref;
    if (ref.empty()) return base;
    if (ref[0] == '#') {
        auto hash = base.find('#');
        return (hash == std::string::npos ? base : base.substr(0, hash)) + ref;
    }
    auto scheme_end = base.find("://");
    if (ref[0] == '/') {
        if (scheme_end == std::string::npos) return ref;
        auto path_start = base.find('/', scheme_end + 3);
        return (path_start == std::string::npos ? base : base.substr(0, path_start)) + ref;
    }
    auto last_slash = base.rfind('/');
    if (last_slash == std::string::npos || last_slash < scheme_end + 3) return base + "/" + ref;
    return base.substr(0, last_slash + 1) + ref;
}

class Parser {
  public:
    Parser(const std::string& src, const TurtleOptions& opts) : src_(src), opts_(opts) {
        if (!opts.document_id.empty()) {
            char buf[17];
            std::snprintf(buf, sizeof buf, "%08llx",
                          static_cast<unsigned long long>(util::fnv1a64(opts.document_id) & 0xffffffffu));
            bnode_prefix_ = std::string(buf) + "_";
        }
        base_ = opts.base_iri;
    }

    Graph parse() {
        Graph g;
        skip_ws();
        while (!eof()) {
            if (!directive()) triples(g);
            skip_ws();
        }
        return g;
    }

  private:
    [[noreturn]] void fail(const std::string& msg) const { throw TurtleParseError(msg, line_, col_); }

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

    bool match_keyword_ci(const char* kw) {
        skip_ws();
        std::size_t n = std::strlen(kw);
        if (pos_ + n > src_.size()) return false;
        for (std::size_t i = 0; i < n; ++i)
            if (std::tolower(static_cast<unsigned char>(src_[pos_ + i])) !=
                std::tolower(static_cast<unsigned char>(kw[i])))
                return false;
        char after = pos_ + n < src_.size() ? src_[pos_ + n] : ' ';
        if (is_pn_char(after) || after == ':') return false;
        for (std::size_t i = 0; i < n; ++i) advance();
        return true;
    }

    bool directive() {
        skip_ws();
        if (peek() == '@') {
            advance();
            if (match_keyword_ci("prefix")) {
                auto [pfx, iri] = prefix_binding();
                expect_char('.', "end of @prefix directive");
                prefixes_[pfx] = iri;
                return true;
            }
            if (match_keyword_ci("base")) {
                base_ = resolve_iri(iriref(), base_);
                expect_char('.', "end of @base directive");
                return true;
            }
            fail("unknown directive");
        }
        // SPARQL-style PREFIX/BASE, no trailing dot.
        std::size_t save_pos = pos_, save_line = line_, save_col = col_;
        if (match_keyword_ci("prefix")) {
            auto [pfx, iri] = prefix_binding();
            prefixes_[pfx] = iri;
            return true;
        }
        if (match_keyword_ci("base")) {
            base_ = resolve_iri(iriref(), base_);
            return true;
        }
        pos_ = save_pos;
        line_ = save_line;
        col_ = save_col;
        return false;
    }

    std::pair<std::string, std::string> prefix_binding() {
        skip_ws();
        std::string pfx;
        while (!eof() && peek() != ':') {
            if (std::isspace(static_cast<unsigned char>(peek()))) fail("expected ':' in prefix name");
            pfx += advance();
        }
        expect_char(':', "prefix declaration");
        std::string iri = resolve_iri(iriref(), base_);
        return {pfx, iri};
    }

    std::string iriref() {
        skip_ws();
        if (peek() != '<') fail("expected IRI");
        advance();
        std::string out;
        while (!eof() && peek() != '>') {
            char c = advance();
            if (c == '\\') {
                char e = advance();
                if (e == 'u' || e == 'U') {
                    int n = e == 'u' ? 4 : 8;
                    std::uint32_t cp = 0;
                    for (int i = 0; i < n; ++i) {
                        char h = advance();
                        if (!std::isxdigit(static_cast<unsigned char>(h))) fail("bad \\u escape in IRI");
                        cp = cp * 16 + (std::isdigit(static_cast<unsigned char>(h))
                                            ? h - '0'
                                            : std::tolower(static_cast<unsigned char>(h)) - 'a' + 10);
                    }
                    append_utf8(out, cp);
                } else {
                    fail("invalid escape in IRI");
                }
            } else if (c == ' ' || c == '\n') {
                fail("whitespace inside IRI");
            } else {
                out += c;
            }
        }
        if (eof()) fail("unterminated IRI");
        advance();
        return out;
    }

    Term iri_term() {
        skip_ws();
        if (peek() == '<') return Term::iri(resolve_iri(iriref(), base_));
        // Prefixed name.
        std::string pfx;
        while (!eof() && peek() != ':' && is_pn_char(peek()) && peek() != '.') pfx += advance();
        if (peek() != ':') fail("expected IRI or prefixed name");
        advance();
        std::string local;
        while (!eof()) {
            char c = peek();
            if (c == '\\') {
                advance();
                local += advance(); // PN_LOCAL_ESC
            } else if (is_pn_char(c) || c == '%' || c == ':') {
                local += advance();
            } else if (c == '.' && is_pn_char(peek(1))) {
                local += advance(); // dots allowed mid-local-name
            } else {
                break;
            }
        }
        auto it = prefixes_.find(pfx);
        if (it == prefixes_.end()) fail("undefined prefix '" + pfx + ":'");
        return Term::iri(it->second + local);
    }

    Term blank_node(Graph& g) {
        skip_ws();
        if (peek() == '_' && peek(1) == ':') {
            advance();
            advance();
            std::string label;
            while (!eof() && (is_pn_char(peek()) || (peek() == '.' && is_pn_char(peek(1)))))
                label += advance();
            if (label.empty()) fail("empty blank node label");
            return Term::blank(bnode_prefix_ + label);
        }
        if (peek() == '[') {
            advance();
            Term node = fresh_bnode();
            skip_ws();
            if (peek() == ']') {
                advance();
                return node;
            }
            predicate_object_list(g, node);
            expect_char(']', "end of blank node property list");
            return node;
        }
        fail("expected blank node");
    }

    Term fresh_bnode() { return Term::blank(bnode_prefix_ + "g" + std::to_string(gen_counter_++)); }

    Term collection(Graph& g) {
        expect_char('(', "collection");
        Term rdf_first = Term::iri(std::string(vocab::rdf_first));
        Term rdf_rest = Term::iri(std::string(vocab::rdf_rest));
        Term nil = Term::iri(std::string(vocab::rdf_nil));
        std::vector<Term> items;
        skip_ws();
        while (peek() != ')') {
            items.push_back(object_term(g));
            skip_ws();
            if (eof()) fail("unterminated collection");
        }
        advance();
        if (items.empty()) return nil;
        Term head = fresh_bnode();
        Term cur = head;
        for (std::size_t i = 0; i < items.size(); ++i) {
            g.insert(Triple(cur, rdf_first, items[i]));
            if (i + 1 == items.size()) {
                g.insert(Triple(cur, rdf_rest, nil));
            } else {
                Term next = fresh_bnode();
                g.insert(Triple(cur, rdf_rest, next));
                cur = next;
            }
        }
        return head;
    }

    std::string string_body() {
        // Called with pos_ at the opening quote.
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
        if (match_keyword_ci("true")) return Term::literal("true", std::string(vocab::xsd_boolean));
        if (match_keyword_ci("false")) return Term::literal("false", std::string(vocab::xsd_boolean));
        // Numeric shorthand.
        std::string num;
        if (c == '+' || c == '-') num += advance();
        bool has_dot = false, has_exp = false, has_digit = false;
        while (!eof()) {
            char d = peek();
            if (std::isdigit(static_cast<unsigned char>(d))) {
                has_digit = true;
                num += advance();
            } else if (d == '.' && !has_dot && !has_exp && std::isdigit(static_cast<unsigned char>(peek(1)))) {
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

    Term object_term(Graph& g) {
        skip_ws();
        char c = peek();
        if (c == '<') return iri_term();
        if (c == '_' || c == '[') return blank_node(g);
        if (c == '(') return collection(g);
        if (c == '"' || c == '\'' || c == '+' || c == '-' ||
            std::isdigit(static_cast<unsigned char>(c)))
            return literal();
        if (match_keyword_ci("true")) return Term::literal("true", std::string(vocab::xsd_boolean));
        if (match_keyword_ci("false")) return Term::literal("false", std::string(vocab::xsd_boolean));
        return iri_term(); // prefixed name
    }

    Term verb() {
        skip_ws();
        if (peek() == 'a' && !is_pn_char(peek(1)) && peek(1) != ':') {
            advance();
            return Term::iri(std::string(vocab::rdf_type));
        }
        return iri_term();
    }

    void predicate_object_list(Graph& g, const Term& subject) {
        while (true) {
            Term p = verb();
            while (true) {
                Term o = object_term(g);
                g.insert(Triple(subject, p, o));
                if (!match_char(',')) break;
            }
            if (!match_char(';')) break;
            skip_ws();
            // Trailing ';' before '.' or ']' is legal.
            if (peek() == '.' || peek() == ']' || eof()) break;
        }
    }

    void triples(Graph& g) {
        skip_ws();
        if (eof()) return;
        Term subject;
        char c = peek();
        if (c == '[') {
            subject = blank_node(g);
            skip_ws();
            if (peek() == '.') { // bare property list statement
                advance();
                return;
            }
        } else if (c == '_') {
            subject = blank_node(g);
        } else if (c == '(') {
            subject = collection(g);
        } else {
            subject = iri_term();
        }
        predicate_object_list(g, subject);
        expect_char('.', "end of triples statement");
    }

    const std::string& src_;
    TurtleOptions opts_;
    std::size_t pos_ = 0, line_ = 1, col_ = 1;
    std::map<std::string, std::string> prefixes_;
    std::string base_;
    std::string bnode_prefix_;
    std::size_t gen_counter_ = 0;
};

std::string term_turtle(const Term& t, const std::map<std::string, std::string>& prefixes) {
    if (t.is_iri()) {
        for (const auto& [pfx, ns] : prefixes) {
            if (t.value().rfind(ns, 0) == 0) {
                std::string local = t.value().substr(ns.size());
                bool plain = !local.empty();
                for (char c : local)
                    if (!is_pn_char(c)) plain = false;
                if (plain) return pfx + ":" + local;
            }
        }
    }
    return t.ntriples();
}

} // namespace

Graph parse_turtle(const std::string& text, const TurtleOptions& opts) {
    Parser p(text, opts);
    return p.parse();
}

std::string serialize_turtle(const Graph& g, const std::map<std::string, std::string>& prefixes) {
    std::ostringstream out;
    for (const auto& [pfx, ns] : prefixes) out << "@prefix " << pfx << ": <" << ns << "> .\n";
    if (!prefixes.empty() && !g.empty()) out << "\n";

    // Group consecutive triples by subject for ';' chains.
    const auto& ts = g.triples();
    std::size_t i = 0;
    while (i < ts.size()) {
        const Term& s = ts[i].subject();
        out << term_turtle(s, prefixes);
        std::size_t j = i;
        bool first = true;
        while (j < ts.size() && ts[j].subject() == s) {
            out << (first ? " " : " ;\n    ");
            first = false;
            const Term& p = ts[j].predicate();
            if (p.is_iri() && p.value() == vocab::rdf_type)
                out << "a";
            else
                out << term_turtle(p, prefixes);
            out << " " << term_turtle(ts[j].object(), prefixes);
            std::size_t k = j + 1;
            while (k < ts.size() && ts[k].subject() == s && ts[k].predicate() == p) {
                out << " , " << term_turtle(ts[k].object(), prefixes);
                ++k;
            }
            j = k;
        }
        out << " .\n";
        i = j;
    }
    return out.str();
}

std::string serialize_ntriples(const Graph& g) {
    std::ostringstream out;
    for (const Triple& t : g.triples()) out << t.ntriples() << "\n";
    return out.str();
}

Graph load_turtle_file(const std::string& path) {
    TurtleOptions opts;
    opts.document_id = path;
    return parse_turtle(read_file(path), opts);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

} // namespace fedsparql::rdf
