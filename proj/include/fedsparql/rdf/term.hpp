#pragma once

#include "fedsparql/rdf/vocab.hpp"

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fedsparql::rdf {

enum class TermKind : std::uint8_t { Iri, Blank, Literal };

/// An RDF term: IRI, blank node, or literal. Immutable value type;
/// equality and ordering are structural (lexical form + datatype + language).
class Term {
  public:
    Term() : kind_(TermKind::Iri) {}

    static Term iri(std::string value) {
        Term t;
        t.kind_ = TermKind::Iri;
        t.value_ = std::move(value);
        return t;
    }

    static Term blank(std::string label) {
        Term t;
        t.kind_ = TermKind::Blank;
        t.value_ = std::move(label);
        return t;
    }

    static Term literal(std::string lexical, std::string datatype = std::string(vocab::xsd_string)) {
        if (datatype == vocab::rdf_langString)
            throw std::invalid_argument("language-string literal requires a language tag");
        Term t;
        t.kind_ = TermKind::Literal;
        t.value_ = std::move(lexical);
        t.datatype_ = std::move(datatype);
        return t;
    }

    static Term lang_literal(std::string lexical, std::string lang) {
        if (lang.empty())
            throw std::invalid_argument("empty language tag");
        Term t;
        t.kind_ = TermKind::Literal;
        t.value_ = std::move(lexical);
        t.datatype_ = std::string(vocab::rdf_langString);
        t.lang_ = std::move(lang);
        return t;
    }

    TermKind kind() const { return kind_; }
    bool is_iri() const { return kind_ == TermKind::Iri; }
    bool is_blank() const { return kind_ == TermKind::Blank; }
    bool is_literal() const { return kind_ == TermKind::Literal; }

    /// IRI text, blank-node label, or literal lexical form.
    const std::string& value() const { return value_; }
    const std::string& datatype() const { return datatype_; }
    const std::string& language() const { return lang_; }

    /// N-Triples surface form; also used as the canonical map/set key.
    std::string ntriples() const;

    friend auto operator<=>(const Term&, const Term&) = default;
    friend bool operator==(const Term&, const Term&) = default;

  private:
    TermKind kind_;
    std::string value_;
    std::string datatype_; // literals only
    std::string lang_;     // non-empty iff datatype is rdf:langString
};

struct TermHash {
    std::size_t operator()(const Term& t) const noexcept;
};

/// One RDF triple. Positional constraints are enforced at construction:
/// subject is an IRI or blank node, predicate is an IRI.
class Triple {
  public:
    Triple(Term s, Term p, Term o) : s_(std::move(s)), p_(std::move(p)), o_(std::move(o)) {
        if (s_.is_literal())
            throw std::invalid_argument("triple subject must be an IRI or blank node");
        if (!p_.is_iri())
            throw std::invalid_argument("triple predicate must be an IRI");
    }

    const Term& subject() const { return s_; }
    const Term& predicate() const { return p_; }
    const Term& object() const { return o_; }

    std::string ntriples() const;

    friend auto operator<=>(const Triple&, const Triple&) = default;
    friend bool operator==(const Triple&, const Triple&) = default;

  private:
    Term s_, p_, o_;
};

struct TripleHash {
    std::size_t operator()(const Triple& t) const noexcept;
};

/// Escapes a string per N-Triples/Turtle rules (quotes, backslash, control chars).
std::string escape_string_literal(std::string_view raw);

} // namespace fedsparql::rdf
