#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "mhgrn/error.hpp"
#include "mhgrn/graph.hpp"
#include "mhgrn/vocab.hpp"

namespace mhgrn {

// Graph JSON schema:
//   {"n": int, "phi": ["q"|"a"|"o", ...], "kg_ids": [int, ...],
//    "edges": [[src, rel, dst], ...]}
// kg_ids uses -1 for nodes without a knowledge-graph identity.

inline nlohmann::json graph_to_json(const MultiRelGraph& g) {
  nlohmann::json j;
  j["n"] = g.n();
  nlohmann::json phi = nlohmann::json::array();
  for (NodeType t : g.phi()) {
    switch (t) {
      case NodeType::Question: phi.push_back("q"); break;
      case NodeType::Answer: phi.push_back("a"); break;
      case NodeType::Other: phi.push_back("o"); break;
    }
  }
  j["phi"] = std::move(phi);
  j["kg_ids"] = g.kg_ids();
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : g.edges())
    edges.push_back(nlohmann::json::array({e.src, e.rel, e.dst}));
  j["edges"] = std::move(edges);
  return j;
}

inline MultiRelGraph graph_from_json(const nlohmann::json& j, int m) {
  try {
    int n = j.at("n").get<int>();
    std::vector<NodeType> phi;
    for (const auto& tag : j.at("phi")) {
      std::string s = tag.get<std::string>();
      if (s == "q")
        phi.push_back(NodeType::Question);
      else if (s == "a")
        phi.push_back(NodeType::Answer);
      else if (s == "o")
        phi.push_back(NodeType::Other);
      else
        throw ParseError("graph_from_json: bad phi tag '" + s + "'");
    }
    std::vector<long> kg_ids;
    if (j.contains("kg_ids")) kg_ids = j.at("kg_ids").get<std::vector<long>>();
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 3)
        throw ParseError("graph_from_json: edge must be [src, rel, dst]");
      edges.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<int>()});
    }
    return make_graph(n, std::move(phi), std::move(kg_ids), std::move(edges),
                      m);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("graph_from_json: ") + e.what());
  } catch (const DimMismatch& e) {
    throw ParseError(std::string("graph_from_json: ") + e.what());
  }
}

inline nlohmann::json vocab_to_json(const RelationVocab& v) {
  nlohmann::json j;
  j["forward_names"] = v.forward_names;
  nlohmann::json merge = nlohmann::json::object();
  for (const auto& [raw, target] : v.merge_map) {
    merge[raw] = {{"to", target.first}, {"reversed", target.second}};
  }
  j["merge_map"] = std::move(merge);
  return j;
}

inline RelationVocab vocab_from_json(const nlohmann::json& j) {
  try {
    RelationVocab v;
    v.forward_names = j.at("forward_names").get<std::vector<std::string>>();
    if (v.forward_names.empty())
      throw ParseError("vocab_from_json: no forward names");
    for (const auto& [raw, target] : j.at("merge_map").items()) {
      v.merge_map[to_lower(raw)] = {
          to_lower(target.at("to").get<std::string>()),
          target.at("reversed").get<bool>()};
    }
    // Validate: every merge target must be a forward name.
    for (const auto& [raw, target] : v.merge_map) {
      (void)raw;
      v.forward_id(target.first);  // throws UnknownRelation if absent
    }
    return v;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("vocab_from_json: ") + e.what());
  } catch (const UnknownRelation& e) {
    throw ParseError(std::string("vocab_from_json: ") + e.what());
  }
}

}  // namespace mhgrn
