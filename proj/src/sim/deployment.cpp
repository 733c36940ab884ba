#include "fedsparql/sim/deployment.hpp"

#include "fedsparql/rdf/turtle.hpp"

#include <json.hpp>

#include <filesystem>
#include <set>

namespace fedsparql::sim {

using nlohmann::json;

namespace {

std::string parent_dir(const std::string& path) {
    auto p = std::filesystem::path(path).parent_path();
    return p.empty() ? "." : p.string();
}

SimConfig config_from_json(const json& j, SimConfig base) {
    if (j.contains("port")) base.port = j.at("port").get<int>();
    if (j.contains("latency_ms"))
        base.latency = std::chrono::milliseconds(j.at("latency_ms").get<long>());
    if (j.contains("result_limit")) base.result_limit = j.at("result_limit").get<std::size_t>();
    if (j.contains("availability")) {
        std::string a = j.at("availability").get<std::string>();
        if (a == "down")
            base.availability = Availability::Down;
        else if (a == "flaky")
            base.availability = Availability::Flaky;
        else
            base.availability = Availability::Up;
    }
    if (j.contains("flaky_probability"))
        base.flaky_probability = j.at("flaky_probability").get<double>();
    if (j.contains("features")) {
        const json& f = j.at("features");
        base.features.values = f.value("values", base.features.values);
        base.features.service = f.value("service", base.features.service);
        base.features.aggregates = f.value("aggregates", base.features.aggregates);
    }
    if (j.contains("publish_void")) {
        std::string mode = j.at("publish_void").get<std::string>();
        if (mode == "well-known")
            base.publish_void = VoidPublish::WellKnown;
        else if (mode == "default-graph")
            base.publish_void = VoidPublish::DefaultGraph;
        else if (mode == "named-graph")
            base.publish_void = VoidPublish::NamedGraph;
        else
            base.publish_void = VoidPublish::None;
    }
    return base;
}

} // namespace

Deployment Deployment::from_graphs(std::vector<std::pair<std::string, rdf::Graph>> shards,
                                   const SimConfig& base) {
    Deployment d;
    for (auto& [id, graph] : shards) {
        Member m;
        m.shard_id = id;
        m.label = id;
        m.description = "Shard '" + id + "' of the deployed dataset.";
        SimConfig cfg = base;
        cfg.label = id;
        m.simulator = std::make_unique<Simulator>(std::move(graph), cfg);
        m.url = m.simulator->start();
        d.members_.push_back(std::move(m));
    }
    return d;
}

Deployment Deployment::from_manifest(const std::string& manifest_path, const SimConfig& base,
                                     int base_port) {
    json manifest = json::parse(rdf::read_file(manifest_path));
    std::string dir = parent_dir(manifest_path);

    Deployment d;
    int next_port = base_port;
    for (const json& s : manifest.at("shards")) {
        Member m;
        m.shard_id = s.at("id").get<std::string>();
        m.label = m.shard_id;
        std::string kind = s.value("kind", "shard");
        std::string detail = s.value("detail", "");
        m.description = "Holds the " + kind + " partition " +
                        (detail.empty() ? m.shard_id : detail) + " of the dataset.";
        SimConfig cfg = base;
        cfg.label = m.shard_id;
        if (base_port != 0) cfg.port = next_port++;
        rdf::Graph g = rdf::parse_turtle(rdf::read_file(dir + "/" + s.at("file").get<std::string>()));
        m.simulator = std::make_unique<Simulator>(std::move(g), cfg);
        m.url = m.simulator->start();
        d.members_.push_back(std::move(m));
    }
    return d;
}

Deployment Deployment::from_descriptor(const std::string& descriptor_path) {
    json desc = json::parse(rdf::read_file(descriptor_path));
    std::string dir = parent_dir(descriptor_path);

    // Unique explicit ports are a descriptor invariant.
    std::set<int> ports;
    for (const json& e : desc.at("endpoints")) {
        int port = e.value("port", 0);
        if (port != 0 && !ports.insert(port).second)
            throw std::runtime_error("deployment descriptor reuses port " + std::to_string(port));
    }

    Deployment d;
    for (const json& e : desc.at("endpoints")) {
        Member m;
        std::string file = e.at("shard_file").get<std::string>();
        std::filesystem::path path(file);
        if (path.is_relative()) path = std::filesystem::path(dir) / path;
        if (!std::filesystem::exists(path))
            throw std::runtime_error("shard file does not exist: " + path.string());
        m.shard_id = e.value("label", path.stem().string());
        m.label = m.shard_id;
        m.description = e.value("description", "");
        SimConfig cfg = config_from_json(e, SimConfig{});
        cfg.label = m.shard_id;
        m.simulator = std::make_unique<Simulator>(
            rdf::parse_turtle(rdf::read_file(path.string())), cfg);
        m.url = m.simulator->start();
        d.members_.push_back(std::move(m));
    }
    return d;
}

std::vector<std::string> Deployment::urls() const {
    std::vector<std::string> out;
    out.reserve(members_.size());
    for (const Member& m : members_) out.push_back(m.url);
    return out;
}

Simulator* Deployment::find(const std::string& shard_id) {
    for (Member& m : members_)
        if (m.shard_id == shard_id) return m.simulator.get();
    return nullptr;
}

catalogue::Catalogue Deployment::make_catalogue() const {
    catalogue::Catalogue cat;
    for (const Member& m : members_) cat.register_endpoint(m.url, m.label, m.description);
    return cat;
}

void Deployment::stop_all() {
    for (Member& m : members_)
        if (m.simulator) m.simulator->stop();
}

} // namespace fedsparql::sim
