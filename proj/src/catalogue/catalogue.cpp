#include "fedsparql/catalogue/catalogue.hpp"

#include "fedsparql/net/url.hpp"
#include "fedsparql/rdf/turtle.hpp"
#include "fedsparql/util/fnv1a.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace fedsparql::catalogue {

using nlohmann::json;

Catalogue::Catalogue(const Catalogue& other) {
    std::lock_guard lk(other.mutex_);
    entries_ = other.entries_;
    cache_dir_ = other.cache_dir_;
    void_ttl_seconds = other.void_ttl_seconds;
}

Catalogue& Catalogue::operator=(const Catalogue& other) {
    if (this == &other) return *this;
    std::scoped_lock lk(mutex_, other.mutex_);
    entries_ = other.entries_;
    cache_dir_ = other.cache_dir_;
    void_ttl_seconds = other.void_ttl_seconds;
    return *this;
}

CatalogueEntry Catalogue::register_endpoint(const std::string& url, const std::string& label,
                                            const std::string& description) {
    if (!net::parse_url(url)) throw std::invalid_argument("not an HTTP(S) endpoint URL: " + url);
    std::lock_guard lk(mutex_);
    for (const CatalogueEntry& e : entries_)
        if (e.url == url) throw DuplicateEndpoint(url);
    entries_.push_back(CatalogueEntry{url, label, description, std::nullopt, std::nullopt});
    return entries_.back();
}

bool Catalogue::has(const std::string& url) const {
    std::lock_guard lk(mutex_);
    for (const CatalogueEntry& e : entries_)
        if (e.url == url) return true;
    return false;
}

std::optional<CatalogueEntry> Catalogue::find(const std::string& url) const {
    std::lock_guard lk(mutex_);
    for (const CatalogueEntry& e : entries_)
        if (e.url == url) return e;
    return std::nullopt;
}

std::vector<CatalogueEntry> Catalogue::entries() const {
    std::lock_guard lk(mutex_);
    return entries_;
}

std::vector<std::string> Catalogue::endpoint_urls() const {
    std::lock_guard lk(mutex_);
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const CatalogueEntry& e : entries_) out.push_back(e.url);
    return out;
}

std::size_t Catalogue::size() const {
    std::lock_guard lk(mutex_);
    return entries_.size();
}

void Catalogue::set_capabilities(const std::string& url, const net::Capabilities& caps) {
    std::lock_guard lk(mutex_);
    for (CatalogueEntry& e : entries_)
        if (e.url == url) e.capabilities = caps;
}

void Catalogue::set_cache_dir(const std::string& dir) {
    std::lock_guard lk(mutex_);
    cache_dir_ = dir;
    std::filesystem::create_directories(dir);
}

std::string Catalogue::void_cache_path(const std::string& url) const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(util::fnv1a64(url)));
    return (cache_dir_.empty() ? std::string(".") : cache_dir_) + "/void_" + buf + ".ttl";
}

std::optional<rdf::Graph> Catalogue::cached_void(const std::string& url) const {
    std::lock_guard lk(mutex_);
    std::int64_t cached_at = 0;
    bool registered = false;
    for (const CatalogueEntry& e : entries_)
        if (e.url == url) {
            registered = true;
            if (!e.void_cached_at) return std::nullopt;
            cached_at = *e.void_cached_at;
        }
    if (!registered) return std::nullopt;
    if (void_ttl_seconds) {
        auto now = std::chrono::duration_cast<std::chrono::seconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count();
        if (now - cached_at > *void_ttl_seconds) return std::nullopt;
    }
    std::string path = void_cache_path(url);
    if (!std::filesystem::exists(path)) return std::nullopt;
    try {
        return rdf::parse_turtle(rdf::read_file(path));
    } catch (const std::exception&) {
        return std::nullopt; // unreadable cache behaves like a miss
    }
}

void Catalogue::store_void(const std::string& url, const rdf::Graph& g) {
    std::lock_guard lk(mutex_);
    if (!cache_dir_.empty()) std::filesystem::create_directories(cache_dir_);
    rdf::write_file(void_cache_path(url), rdf::serialize_turtle(g));
    auto now = std::chrono::duration_cast<std::chrono::seconds>(
                   std::chrono::system_clock::now().time_since_epoch())
                   .count();
    for (CatalogueEntry& e : entries_)
        if (e.url == url) e.void_cached_at = now;
}

void Catalogue::invalidate_void(const std::string& url) {
    std::lock_guard lk(mutex_);
    std::error_code ec;
    std::filesystem::remove(void_cache_path(url), ec);
    for (CatalogueEntry& e : entries_)
        if (e.url == url) e.void_cached_at = std::nullopt;
}

namespace {

json caps_to_json(const net::Capabilities& c) {
    json j{{"values", c.values}, {"service", c.service}, {"aggregates", c.aggregates}};
    if (c.result_limit) j["result_limit"] = *c.result_limit;
    return j;
}

net::Capabilities caps_from_json(const json& j) {
    net::Capabilities c;
    c.values = j.value("values", true);
    c.service = j.value("service", true);
    c.aggregates = j.value("aggregates", true);
    if (j.contains("result_limit")) c.result_limit = j.at("result_limit").get<std::size_t>();
    return c;
}

} // namespace

void Catalogue::save(const std::string& registry_path) const {
    std::lock_guard lk(mutex_);
    json doc;
    doc["cache_dir"] = cache_dir_;
    if (void_ttl_seconds) doc["void_ttl_seconds"] = *void_ttl_seconds;
    doc["endpoints"] = json::array();
    for (const CatalogueEntry& e : entries_) {
        json j{{"url", e.url}, {"label", e.label}, {"description", e.description}};
        if (e.capabilities) j["capabilities"] = caps_to_json(*e.capabilities);
        if (e.void_cached_at) j["void_cached_at"] = *e.void_cached_at;
        doc["endpoints"].push_back(std::move(j));
    }
    std::ofstream out(registry_path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write registry: " + registry_path);
    out << doc.dump(2) << "\n";
}

Catalogue Catalogue::load(const std::string& registry_path) {
    json doc = json::parse(rdf::read_file(registry_path));
    Catalogue cat;
    if (doc.contains("cache_dir") && !doc.at("cache_dir").get<std::string>().empty())
        cat.set_cache_dir(doc.at("cache_dir").get<std::string>());
    if (doc.contains("void_ttl_seconds"))
        cat.void_ttl_seconds = doc.at("void_ttl_seconds").get<std::int64_t>();
    for (const json& j : doc.value("endpoints", json::array())) {
        CatalogueEntry e;
        e.url = j.at("url").get<std::string>();
        e.label = j.value("label", "");
        e.description = j.value("description", "");
        if (j.contains("capabilities")) e.capabilities = caps_from_json(j.at("capabilities"));
        if (j.contains("void_cached_at")) e.void_cached_at = j.at("void_cached_at").get<std::int64_t>();
        cat.entries_.push_back(std::move(e));
    }
    return cat;
}

} // namespace fedsparql::catalogue
