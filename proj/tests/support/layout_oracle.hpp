// SPDX-License-Identifier: Apache-2.0
#pragma once

// Independent crossing count and exhaustive search over orderings.

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <vector>

#include "qviz/layout/layout.hpp"

namespace qviz::testing {

/// Crossings between adjacent layers, lines anchored at attribute rows.
inline int oracle_crossings(const diagram::Diagram& d, const layout::Layers& layers, const layout::Ordering& ordering) {
  std::map<std::string, std::pair<int, int>> where;  // node id -> (layer, position)
  for (std::size_t l = 0; l < ordering.size(); ++l) {
    for (std::size_t i = 0; i < ordering[l].size(); ++i) {
      where[d.nodes[static_cast<std::size_t>(ordering[l][i])].id] = {static_cast<int>(l), static_cast<int>(i)};
    }
  }
  (void)layers;
  struct Line {
    int layer;
    double y1;
    double y2;
  };
  std::vector<Line> lines;
  for (const auto& e : d.edges) {
    if (!e.to) continue;
    auto a = where.at(e.from.node);
    auto b = where.at(e.to->node);
    double ya = a.second + d.row_index(e.from) / 100.0;
    double yb = b.second + d.row_index(*e.to) / 100.0;
    if (a.first == b.first) continue;
    if (a.first > b.first) {
      std::swap(a, b);
      std::swap(ya, yb);
    }
    lines.push_back({a.first, ya, yb});
  }
  int count = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      if (lines[i].layer != lines[j].layer) continue;
      if ((lines[i].y1 - lines[j].y1) * (lines[i].y2 - lines[j].y2) < 0) ++count;
    }
  }
  return count;
}

/// Minimum crossings over every ordering that keeps groups contiguous
/// (direct members above child groups, sibling groups in one global order).
/// Returns -1 if the search space exceeds `cap`.
inline int brute_force_optimum(const diagram::Diagram& d, const layout::Layers& layers, long cap = 200000) {
  const int layerCount = *std::max_element(layers.begin(), layers.end()) + 1;
  auto group_of = [&](std::size_t n) { return d.nodes[n].groupId ? d.group_index(*d.nodes[n].groupId) : -1; };
  auto parent_of = [&](int g) {
    const auto& p = d.groups[static_cast<std::size_t>(g)].parentGroup;
    return p ? d.group_index(*p) : -1;
  };
  // Choice slots: members of (layer, group), and children of each group.
  std::map<std::pair<int, int>, std::vector<int>> members;
  for (std::size_t n = 0; n < d.nodes.size(); ++n) members[{layers[n], group_of(n)}].push_back(static_cast<int>(n));
  std::map<int, std::vector<int>> children;
  for (std::size_t g = 0; g < d.groups.size(); ++g) children[parent_of(static_cast<int>(g))].push_back(static_cast<int>(g));

  std::vector<std::vector<int>*> slots;
  long space = 1;
  for (auto& [k, v] : members) slots.push_back(&v);
  for (auto& [k, v] : children) slots.push_back(&v);
  for (auto* s : slots) {
    for (long f = 2; f <= static_cast<long>(s->size()); ++f) space *= f;
    if (space > cap) return -1;
  }
  for (auto* s : slots) std::sort(s->begin(), s->end());

  std::function<bool(int, int)> occupies = [&](int g, int layer) {
    for (std::size_t n = 0; n < d.nodes.size(); ++n) {
      if (layers[n] != layer) continue;
      for (int h = group_of(n); h >= 0; h = parent_of(h)) {
        if (h == g) return true;
      }
    }
    return false;
  };
  std::function<void(int, int, std::vector<int>&)> emit = [&](int g, int layer, std::vector<int>& out) {
    const auto it = members.find({layer, g});
    if (it != members.end()) out.insert(out.end(), it->second.begin(), it->second.end());
    for (int c : children[g]) {
      if (occupies(c, layer)) emit(c, layer, out);
    }
  };

  int best = std::numeric_limits<int>::max();
  std::function<void(std::size_t)> search = [&](std::size_t slot) {
    if (slot == slots.size()) {
      layout::Ordering ordering(static_cast<std::size_t>(layerCount));
      for (int l = 0; l < layerCount; ++l) emit(-1, l, ordering[static_cast<std::size_t>(l)]);
      best = std::min(best, oracle_crossings(d, layers, ordering));
      return;
    }
    std::vector<int>& s = *slots[slot];
    std::sort(s.begin(), s.end());
    do {
      search(slot + 1);
    } while (std::next_permutation(s.begin(), s.end()));
  };
  search(0);
  return best;
}

}  // namespace qviz::testing
