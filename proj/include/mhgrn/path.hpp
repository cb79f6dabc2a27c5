#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mhgrn/error.hpp"
#include "mhgrn/graph.hpp"

namespace mhgrn {

/// A relational path (walk; node revisits allowed) through a graph:
/// source -(rels[0])-> intermediates[0] -(rels[1])-> ... -> target.
/// intermediates has exactly rels.size() - 1 entries. score carries the
/// path weight once the path has been scored.
struct ReasoningPath {
  int source = 0;
  std::vector<int> rels;
  std::vector<int> intermediates;
  int target = 0;
  double score = 0.0;

  int k() const { return static_cast<int>(rels.size()); }

  /// Full node sequence source, intermediates..., target.
  std::vector<int> nodes() const {
    std::vector<int> seq;
    seq.reserve(rels.size() + 1);
    seq.push_back(source);
    seq.insert(seq.end(), intermediates.begin(), intermediates.end());
    seq.push_back(target);
    return seq;
  }
};

/// Canonical path order: (length, source, relation sequence, intermediate
/// sequence, target). Enumeration and tie-breaking both use this.
inline bool path_less(const ReasoningPath& a, const ReasoningPath& b) {
  if (a.k() != b.k()) return a.k() < b.k();
  if (a.source != b.source) return a.source < b.source;
  if (a.rels != b.rels) return a.rels < b.rels;
  if (a.intermediates != b.intermediates)
    return a.intermediates < b.intermediates;
  return a.target < b.target;
}

/// Checks shape and that every hop is an edge of g. Throws InvalidPath.
inline void validate_path(const ReasoningPath& p, const MultiRelGraph& g) {
  if (p.rels.empty()) throw InvalidPath("path has no hops");
  if (p.intermediates.size() + 1 != p.rels.size())
    throw InvalidPath("path needs exactly k-1 intermediates, got " +
                      std::to_string(p.intermediates.size()) + " for k=" +
                      std::to_string(p.rels.size()));
  auto seq = p.nodes();
  for (std::size_t t = 0; t < p.rels.size(); ++t) {
    if (!g.has_edge(seq[t], p.rels[t], seq[t + 1]))
      throw InvalidPath("missing edge " + std::to_string(seq[t]) + " -(" +
                        std::to_string(p.rels[t]) + ")-> " +
                        std::to_string(seq[t + 1]));
  }
}

}  // namespace mhgrn
