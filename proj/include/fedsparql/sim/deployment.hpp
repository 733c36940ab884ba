#pragma once

#include "fedsparql/catalogue/catalogue.hpp"
#include "fedsparql/sim/simulator.hpp"

#include <memory>
#include <string>
#include <vector>

namespace fedsparql::sim {

/// A set of running simulators, one per shard, plus the catalogue naming them.
class Deployment {
  public:
    struct Member {
        std::string shard_id;
        std::string label;
        std::string description;
        std::unique_ptr<Simulator> simulator;
        std::string url;
    };

    Deployment() = default;

    /// One simulator per (shard id, graph); all started before returning.
    static Deployment from_graphs(std::vector<std::pair<std::string, rdf::Graph>> shards,
                                  const SimConfig& base = {});

    /// Launches from a shard manifest (manifest.json next to the .nt files).
    /// base_port = 0 assigns free ports; otherwise ports count up from it.
    static Deployment from_manifest(const std::string& manifest_path, const SimConfig& base = {},
                                    int base_port = 0);

    /// Launches from a deployment descriptor (JSON: endpoints with per-member
    /// shard_file, port and simulator overrides).
    static Deployment from_descriptor(const std::string& descriptor_path);

    const std::vector<Member>& members() const { return members_; }
    std::vector<std::string> urls() const;
    Simulator* find(const std::string& shard_id);

    /// Registry with every member registered under its label/description.
    catalogue::Catalogue make_catalogue() const;

    void stop_all();

  private:
    std::vector<Member> members_;
};

} // namespace fedsparql::sim
