#include "fedsparql/net/url.hpp"

#include <cctype>
#include <cstdio>

namespace fedsparql::net {

std::optional<ParsedUrl> parse_url(const std::string& url) {
    ParsedUrl out;
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) return std::nullopt;
    out.scheme = url.substr(0, scheme_end);
    if (out.scheme != "http" && out.scheme != "https") return std::nullopt;
    std::size_t host_start = scheme_end + 3;
    std::size_t path_start = url.find('/', host_start);
    std::string authority = url.substr(host_start, path_start == std::string::npos
                                                       ? std::string::npos
                                                       : path_start - host_start);
    out.path = path_start == std::string::npos ? "/" : url.substr(path_start);
    auto colon = authority.rfind(':');
    if (colon != std::string::npos) {
        out.host = authority.substr(0, colon);
        try {
            out.port = std::stoi(authority.substr(colon + 1));
        } catch (...) {
            return std::nullopt;
        }
    } else {
        out.host = authority;
        out.port = out.scheme == "https" ? 443 : 80;
    }
    if (out.host.empty()) return std::nullopt;
    return out;
}

std::string url_encode(const std::string& raw) {
    std::string out;
    out.reserve(raw.size() * 3);
    for (unsigned char c : raw) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out += static_cast<char>(c);
        } else {
            char buf[4];
            std::snprintf(buf, sizeof buf, "%%%02X", c);
            out += buf;
        }
    }
    return out;
}

} // namespace fedsparql::net
