#pragma once

#include <algorithm>
#include <fstream>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mhgrn/error.hpp"
#include "mhgrn/vocab.hpp"

namespace mhgrn {

/// Node schema of a grounded subgraph: question mentions, answer mentions,
/// and other (bridge) entities.
enum class NodeType { Question, Answer, Other };

/// Directed typed edge src -(rel)-> dst. rel is a vocabulary id in 1..m.
struct Edge {
  int src;
  int rel;
  int dst;
};

inline bool operator==(const Edge& a, const Edge& b) {
  return a.src == b.src && a.rel == b.rel && a.dst == b.dst;
}

/// Immutable multi-relational graph over n nodes with relation ids 1..m.
/// Edges are deduplicated and kept in canonical (rel, src, dst) order;
/// adjacency views are prebuilt at construction. Use make_graph() to build
/// one with validation.
class MultiRelGraph {
 public:
  int n() const { return n_; }
  int m() const { return m_; }
  const std::vector<NodeType>& phi() const { return phi_; }
  const std::vector<long>& kg_ids() const { return kg_ids_; }
  const std::vector<Edge>& edges() const { return edges_; }

  const std::vector<Edge>& edges_of_relation(int r) const {
    if (r < 1 || r > m_)
      throw BadRelationId("edges_of_relation: id " + std::to_string(r));
    return by_rel_[r];
  }

  /// Out-edges of v sorted by (rel, dst).
  const std::vector<Edge>& out_edges(int v) const {
    if (v < 0 || v >= n_)
      throw IndexOutOfRange("out_edges: node " + std::to_string(v));
    return out_[v];
  }

  bool has_edge(int j, int r, int i) const {
    if (j < 0 || j >= n_ || i < 0 || i >= n_) return false;
    if (r < 1 || r > m_) return false;
    const auto& o = out_[j];
    auto it = std::lower_bound(o.begin(), o.end(), std::make_pair(r, i),
                               [](const Edge& e, const std::pair<int, int>& k) {
                                 return std::make_pair(e.rel, e.dst) < k;
                               });
    return it != o.end() && it->rel == r && it->dst == i;
  }

  const std::vector<int>& question_nodes() const { return questions_; }
  const std::vector<int>& answer_nodes() const { return answers_; }

  friend MultiRelGraph make_graph(int n, std::vector<NodeType> phi,
                                  std::vector<long> kg_ids,
                                  std::vector<Edge> edges, int m);

 private:
  int n_ = 0;
  int m_ = 0;
  std::vector<NodeType> phi_;
  std::vector<long> kg_ids_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Edge>> by_rel_;  // index 0 unused (padding id)
  std::vector<std::vector<Edge>> out_;
  std::vector<int> questions_;
  std::vector<int> answers_;
};

/// Validating constructor. kg_ids may be empty (filled with -1 for synthetic
/// graphs) or one id per node.
inline MultiRelGraph make_graph(int n, std::vector<NodeType> phi,
                                std::vector<long> kg_ids,
                                std::vector<Edge> edges, int m) {
  if (n < 0 || static_cast<int>(phi.size()) != n)
    throw DimMismatch("make_graph: phi has " + std::to_string(phi.size()) +
                      " entries for n=" + std::to_string(n));
  if (m < 1) throw BadRelationId("make_graph: m must be >= 1");
  if (kg_ids.empty()) kg_ids.assign(n, -1);
  if (static_cast<int>(kg_ids.size()) != n)
    throw DimMismatch("make_graph: kg_ids size mismatch");
  for (const auto& e : edges) {
    if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n)
      throw IndexOutOfRange("make_graph: edge endpoint outside 0.." +
                            std::to_string(n - 1));
    if (e.rel < 1 || e.rel > m)
      throw BadRelationId("make_graph: relation id " + std::to_string(e.rel) +
                          " outside 1.." + std::to_string(m));
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.rel, a.src, a.dst) < std::tie(b.rel, b.src, b.dst);
  });
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  MultiRelGraph g;
  g.n_ = n;
  g.m_ = m;
  g.phi_ = std::move(phi);
  g.kg_ids_ = std::move(kg_ids);
  g.edges_ = std::move(edges);
  g.by_rel_.assign(m + 1, {});
  g.out_.assign(n, {});
  for (const auto& e : g.edges_) {
    g.by_rel_[e.rel].push_back(e);
    g.out_[e.src].push_back(e);
  }
  for (auto& o : g.out_) {
    std::sort(o.begin(), o.end(), [](const Edge& a, const Edge& b) {
      return std::make_pair(a.rel, a.dst) < std::make_pair(b.rel, b.dst);
    });
  }
  for (int v = 0; v < n; ++v) {
    if (g.phi_[v] == NodeType::Question) g.questions_.push_back(v);
    if (g.phi_[v] == NodeType::Answer) g.answers_.push_back(v);
  }
  return g;
}

/// A knowledge-graph triple over interned entity ids.
struct Triple {
  long h;
  int r;
  long t;
};

/// In-memory knowledge graph: interned entities (lowercased names, ids in
/// first-seen order) and deduplicated triples closed under reversal
/// ((h, r, t) implies (t, reverse(r), h)). Self-loop triples are dropped.
class KGStore {
 public:
  std::size_t num_entities() const { return names_.size(); }

  long entity_id(const std::string& name) const {
    auto it = ids_.find(to_lower(name));
    if (it == ids_.end())
      throw IndexOutOfRange("unknown entity '" + name + "'");
    return it->second;
  }

  bool has_entity(const std::string& name) const {
    return ids_.count(to_lower(name)) > 0;
  }

  const std::string& entity_name(long id) const {
    if (id < 0 || id >= static_cast<long>(names_.size()))
      throw IndexOutOfRange("entity id " + std::to_string(id));
    return names_[id];
  }

  const std::vector<Triple>& triples() const { return triples_; }

  /// Out-neighbors of h as (relation, tail), sorted.
  const std::vector<std::pair<int, long>>& out(long h) const {
    if (h < 0 || h >= static_cast<long>(names_.size()))
      throw IndexOutOfRange("entity id " + std::to_string(h));
    return out_[h];
  }

  bool has_triple(long h, int r, long t) const {
    if (h < 0 || h >= static_cast<long>(names_.size())) return false;
    const auto& o = out_[h];
    return std::binary_search(o.begin(), o.end(), std::make_pair(r, t));
  }

  bool has_any_triple(long h, long t) const {
    if (h < 0 || h >= static_cast<long>(names_.size())) return false;
    for (const auto& [r, tail] : out_[h])
      if (tail == t) return true;
    return false;
  }

  const RelationVocab& vocab() const { return vocab_; }

  friend KGStore load_kg(const std::string& path, const RelationVocab& vocab);

 private:
  long intern(const std::string& lower_name) {
    auto it = ids_.find(lower_name);
    if (it != ids_.end()) return it->second;
    long id = static_cast<long>(names_.size());
    names_.push_back(lower_name);
    ids_.emplace(lower_name, id);
    return id;
  }

  std::vector<std::string> names_;
  std::unordered_map<std::string, long> ids_;
  std::vector<Triple> triples_;
  std::vector<std::vector<std::pair<int, long>>> out_;
  RelationVocab vocab_;
};

/// Loads a head<TAB>relation<TAB>tail file, merging raw relation names
/// through the vocabulary and closing the triple set under reversal.
inline KGStore load_kg(const std::string& path, const RelationVocab& vocab) {
  std::ifstream in(path);
  if (!in) throw IoError("load_kg: cannot open " + path);
  KGStore kg;
  kg.vocab_ = vocab;
  std::set<std::tuple<long, int, long>> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 3 || fields[0].empty() || fields[2].empty())
      throw ParseError("load_kg: expected head\\trelation\\ttail at " + path +
                       ":" + std::to_string(lineno));
    int r = vocab.merge_relation(fields[1]);
    long h = kg.intern(to_lower(fields[0]));
    long t = kg.intern(to_lower(fields[2]));
    if (h == t) continue;  // self-loops carry no relational path information
    seen.insert({h, r, t});
    seen.insert({t, vocab.reverse_id(r), h});
  }
  if (seen.empty()) throw NoTriples("load_kg: no triples in " + path);
  kg.triples_.reserve(seen.size());
  for (const auto& [h, r, t] : seen) kg.triples_.push_back({h, r, t});
  kg.out_.assign(kg.names_.size(), {});
  for (const auto& tr : kg.triples_)
    kg.out_[tr.h].emplace_back(tr.r, tr.t);
  for (auto& o : kg.out_) std::sort(o.begin(), o.end());
  return kg;
}

/// Schema-constrained subgraph extraction. The node set is the mentioned
/// entities plus every bridge entity sitting on a 2-hop path between two
/// distinct mentions; the edge set is every kg triple with both endpoints
/// inside the node set (no pruning). Mentions appearing in both sets are
/// tagged Answer.
inline MultiRelGraph extract_subgraph(const KGStore& kg,
                                      const std::vector<long>& q_entities,
                                      const std::vector<long>& a_entities) {
  std::set<long> questions(q_entities.begin(), q_entities.end());
  std::set<long> answers(a_entities.begin(), a_entities.end());
  for (long id : questions)
    if (id < 0 || id >= static_cast<long>(kg.num_entities()))
      throw IndexOutOfRange("extract_subgraph: entity id " +
                            std::to_string(id));
  for (long id : answers)
    if (id < 0 || id >= static_cast<long>(kg.num_entities()))
      throw IndexOutOfRange("extract_subgraph: entity id " +
                            std::to_string(id));
  std::set<long> mentions = questions;
  mentions.insert(answers.begin(), answers.end());
  if (mentions.empty())
    throw EmptyMentionSet("extract_subgraph: no mentioned entities");

  std::set<long> nodes = mentions;
  for (long j : mentions) {
    for (const auto& [r1, v] : kg.out(j)) {
      (void)r1;
      if (nodes.count(v) && mentions.count(v)) {
        // v is itself a mention; it is already a node either way.
      }
      for (const auto& [r2, t] : kg.out(v)) {
        (void)r2;
        if (t != j && mentions.count(t)) {
          nodes.insert(v);
          break;
        }
      }
    }
  }

  std::vector<long> ordered(nodes.begin(), nodes.end());
  std::unordered_map<long, int> index;
  for (std::size_t i = 0; i < ordered.size(); ++i)
    index[ordered[i]] = static_cast<int>(i);

  std::vector<NodeType> phi(ordered.size(), NodeType::Other);
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    if (answers.count(ordered[i]))
      phi[i] = NodeType::Answer;  // overlap with questions resolves to Answer
    else if (questions.count(ordered[i]))
      phi[i] = NodeType::Question;
  }

  std::vector<Edge> edges;
  for (const auto& tr : kg.triples()) {
    auto hi = index.find(tr.h);
    auto ti = index.find(tr.t);
    if (hi != index.end() && ti != index.end())
      edges.push_back({hi->second, tr.r, ti->second});
  }
  const int n = static_cast<int>(ordered.size());
  return make_graph(n, std::move(phi), std::move(ordered), std::move(edges),
                    static_cast<int>(kg.vocab().num_relations()));
}

}  // namespace mhgrn
