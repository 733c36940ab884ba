#include "fedsparql/rdf/term.hpp"

#include "fedsparql/util/fnv1a.hpp"

namespace fedsparql::rdf {

std::string escape_string_literal(std::string_view raw) {
    std::string out;
    out.reserve(raw.size() + 2);
    for (char c : raw) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        case '\b': out += "\\b"; break;
        case '\f': out += "\\f"; break;
        default: out += c; break;
        }
    }
    return out;
}

std::string Term::ntriples() const {
    switch (kind_) {
    case TermKind::Iri: return "<" + value_ + ">";
    case TermKind::Blank: return "_:" + value_;
    case TermKind::Literal: {
        std::string out = "\"" + escape_string_literal(value_) + "\"";
        if (!lang_.empty())
            out += "@" + lang_;
        else if (datatype_ != vocab::xsd_string)
            out += "^^<" + datatype_ + ">";
        return out;
    }
    }
    return {};
}

std::string Triple::ntriples() const {
    return s_.ntriples() + " " + p_.ntriples() + " " + o_.ntriples() + " .";
}

std::size_t TermHash::operator()(const Term& t) const noexcept {
    std::uint64_t h = util::fnv1a64(t.value());
    h ^= util::fnv1a64(t.datatype()) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= util::fnv1a64(t.language()) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(t.kind()) * util::kFnv1a64Prime;
    return static_cast<std::size_t>(h);
}

std::size_t TripleHash::operator()(const Triple& t) const noexcept {
    TermHash th;
    std::size_t h = th(t.subject());
    h ^= th(t.predicate()) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= th(t.object()) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

} // namespace fedsparql::rdf
