#pragma once

#include <optional>
#include <string>

namespace fedsparql::net {

struct ParsedUrl {
    std::string scheme; // http or https
    std::string host;
    int port = 0;       // resolved default when absent
    std::string path;   // always starts with '/'
    std::string origin() const {
        return scheme + "://" + host + ":" + std::to_string(port);
    }
};

std::optional<ParsedUrl> parse_url(const std::string& url);

std::string url_encode(const std::string& raw);

} // namespace fedsparql::net
