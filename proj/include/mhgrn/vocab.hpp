#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mhgrn/error.hpp"

namespace mhgrn {

inline std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

/// Relation vocabulary: F forward relation names with ids 1..F assigned in
/// alphabetical order, reverse ids F+1..2F (reverse of r is r+F / r-F), and
/// a merge map folding raw knowledge-graph relation names onto the retained
/// set. Id 0 is reserved padding and is never a real relation.
///
/// A merge entry may be direction-flipping: e.g. raw "hasa" merges into the
/// reverse of "partof" (x hasa y  ==  y partof x). A leading '*' on a queried
/// raw name marks the reverse of that name and toggles the mapped direction.
struct RelationVocab {
  std::vector<std::string> forward_names;
  /// raw lowercase name -> (forward target name, direction flipped?)
  std::map<std::string, std::pair<std::string, bool>> merge_map;

  std::size_t num_forward() const { return forward_names.size(); }
  std::size_t num_relations() const { return 2 * forward_names.size(); }

  int forward_id(const std::string& name) const {
    auto low = to_lower(name);
    auto it = std::find(forward_names.begin(), forward_names.end(), low);
    if (it == forward_names.end())
      throw UnknownRelation("not a forward relation: " + name);
    return static_cast<int>(it - forward_names.begin()) + 1;
  }

  int reverse_id(int r) const {
    const int f = static_cast<int>(num_forward());
    if (r >= 1 && r <= f) return r + f;
    if (r > f && r <= 2 * f) return r - f;
    throw BadRelationId("reverse_id: id " + std::to_string(r) +
                        " outside 1.." + std::to_string(2 * f));
  }

  bool is_reverse(int r) const {
    const int f = static_cast<int>(num_forward());
    if (r < 1 || r > 2 * f)
      throw BadRelationId("is_reverse: id " + std::to_string(r));
    return r > f;
  }

  /// Display name: forward names verbatim, reverse ids as "*name".
  std::string relation_name(int r) const {
    const int f = static_cast<int>(num_forward());
    if (r >= 1 && r <= f) return forward_names[r - 1];
    if (r > f && r <= 2 * f) return "*" + forward_names[r - f - 1];
    throw BadRelationId("relation_name: id " + std::to_string(r));
  }

  /// Maps a raw relation name through the merge table to a relation id.
  /// Lookup is case-insensitive; a leading '*' toggles direction.
  int merge_relation(const std::string& raw) const {
    std::string key = to_lower(raw);
    bool flipped = false;
    if (!key.empty() && key.front() == '*') {
      flipped = true;
      key.erase(key.begin());
    }
    auto it = merge_map.find(key);
    if (it == merge_map.end())
      throw UnknownRelation("no merge rule for relation '" + raw + "'");
    int id = forward_id(it->second.first);
    if (it->second.second != flipped) id = reverse_id(id);
    return id;
  }
};

/// The standard 17-relation vocabulary (34 ids with reverses) and its merge
/// table. Merge targets map to themselves; "hasa" and "motivatedbygoal"
/// merge with a direction flip.
inline RelationVocab builtin_vocab() {
  RelationVocab v;
  v.forward_names = {
      "antonym",    "atlocation",     "capableof",      "causes",
      "createdby",  "desires",        "hascontext",     "hasproperty",
      "hassubevent", "isa",           "madeof",         "notcapableof",
      "notdesires", "partof",         "receivesaction", "relatedto",
      "usedfor",
  };
  auto keep = [&v](const std::string& name) {
    v.merge_map[name] = {name, false};
  };
  for (const auto& name : v.forward_names) keep(name);
  v.merge_map["locatednear"] = {"atlocation", false};
  v.merge_map["causesdesire"] = {"causes", false};
  v.merge_map["motivatedbygoal"] = {"causes", true};
  v.merge_map["distinctfrom"] = {"antonym", false};
  v.merge_map["hasfirstsubevent"] = {"hassubevent", false};
  v.merge_map["haslastsubevent"] = {"hassubevent", false};
  v.merge_map["hasprerequisite"] = {"hassubevent", false};
  v.merge_map["entails"] = {"hassubevent", false};
  v.merge_map["mannerof"] = {"hassubevent", false};
  v.merge_map["instanceof"] = {"isa", false};
  v.merge_map["definedas"] = {"isa", false};
  v.merge_map["hasa"] = {"partof", true};
  v.merge_map["similarto"] = {"relatedto", false};
  v.merge_map["synonym"] = {"relatedto", false};
  return v;
}

}  // namespace mhgrn
