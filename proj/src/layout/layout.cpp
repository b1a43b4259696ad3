// SPDX-License-Identifier: Apache-2.0
#include "qviz/layout/layout.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <tuple>

namespace qviz::layout {

using diagram::Diagram;
using diagram::PredicateEdge;
using diagram::TableBox;

bool Rect::contains(const Rect& inner, int margin) const {
  return inner.x >= x + margin && inner.y >= y + margin && inner.right() <= right() - margin &&
         inner.bottom() <= bottom() - margin;
}

bool Rect::overlaps(const Rect& o) const {
  return x < o.right() && o.x < right() && y < o.bottom() && o.y < bottom();
}

int node_width(const Diagram& d, const TableBox& node) {
  std::size_t widest = node.title.size();
  for (std::size_t r = 0; r < node.attrRows.size(); ++r) {
    widest = std::max(widest, diagram::row_text(d, node, r).size());
  }
  return static_cast<int>(widest) + 2;
}

int gutter_width(const LayoutStyle& style, int maxGroupDepth) {
  return style.baseGutter + 2 * style.padX * maxGroupDepth;
}

std::vector<int> group_path(const Diagram& d, int group) {
  std::vector<int> path;
  for (int g = group; g >= 0;) {
    path.push_back(g);
    const auto& parent = d.groups[static_cast<std::size_t>(g)].parentGroup;
    g = parent ? d.group_index(*parent) : -1;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

namespace {

struct Link {
  int a;
  int rowA;
  int b;
  int rowB;
};

/// Lines between two distinct nodes, with row indices resolved.
std::vector<Link> links(const Diagram& d) {
  std::vector<Link> out;
  for (const PredicateEdge& e : d.edges) {
    if (!e.to) continue;
    const int a = d.node_index(e.from.node);
    const int b = d.node_index(e.to->node);
    if (a < 0 || b < 0 || a == b) continue;
    out.push_back({a, d.row_index(e.from), b, d.row_index(*e.to)});
  }
  return out;
}

std::vector<std::vector<int>> adjacency(const Diagram& d) {
  std::vector<std::vector<int>> adj(d.nodes.size());
  for (const Link& l : links(d)) {
    adj[static_cast<std::size_t>(l.a)].push_back(l.b);
    adj[static_cast<std::size_t>(l.b)].push_back(l.a);
  }
  return adj;
}

std::vector<int> bfs(const std::vector<std::vector<int>>& adj, int source) {
  std::vector<int> dist(adj.size(), -1);
  std::deque<int> queue{source};
  dist[static_cast<std::size_t>(source)] = 0;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int v : adj[static_cast<std::size_t>(u)]) {
      if (dist[static_cast<std::size_t>(v)] < 0) {
        dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

int output_node(const Diagram& d) {
  for (std::size_t i = 0; i < d.nodes.size(); ++i) {
    if (d.nodes[i].role == diagram::NodeRole::Output) return static_cast<int>(i);
  }
  throw Error(ErrorCode::InvalidInput, "diagram has no output table");
}

std::vector<int> node_groups(const Diagram& d) {
  std::vector<int> out;
  for (const auto& n : d.nodes) out.push_back(n.groupId ? d.group_index(*n.groupId) : -1);
  return out;
}

std::size_t tie_key(const Diagram& d, int node) {
  const auto it = d.spanMap.find(d.nodes[static_cast<std::size_t>(node)].id);
  return it == d.spanMap.end() ? 0 : it->second.start;
}

/// Ordering as ranks: nodes rank within (layer, direct group); groups rank
/// among their siblings. Sorting by the hierarchical key yields layers in
/// which every group is contiguous, direct members above child groups.
struct RankState {
  std::vector<int> nodeRank;
  std::vector<int> groupRank;
};

class Orderer {
 public:
  Orderer(const Diagram& d, const Layers& layers)
      : d_(d), layers_(layers), groupOf_(node_groups(d)), links_(links(d)) {
    for (std::size_t g = 0; g < d.groups.size(); ++g) paths_.push_back(group_path(d, static_cast<int>(g)));
    layerCount_ = layers.empty() ? 0 : *std::max_element(layers.begin(), layers.end()) + 1;
  }

  RankState initial() const {
    RankState s;
    std::vector<int> nodes(d_.nodes.size());
    std::iota(nodes.begin(), nodes.end(), 0);
    std::stable_sort(nodes.begin(), nodes.end(), [&](int a, int b) { return tie_key(d_, a) < tie_key(d_, b); });
    s.nodeRank.assign(d_.nodes.size(), 0);
    for (std::size_t i = 0; i < nodes.size(); ++i) s.nodeRank[static_cast<std::size_t>(nodes[i])] = static_cast<int>(i);
    s.groupRank.resize(d_.groups.size());
    std::iota(s.groupRank.begin(), s.groupRank.end(), 0);
    return s;
  }

  Ordering ordering(const RankState& s) const {
    Ordering out(static_cast<std::size_t>(layerCount_));
    for (std::size_t n = 0; n < d_.nodes.size(); ++n) out[static_cast<std::size_t>(layers_[n])].push_back(static_cast<int>(n));
    for (auto& layer : out) {
      std::sort(layer.begin(), layer.end(), [&](int a, int b) { return key(s, a) < key(s, b); });
    }
    return out;
  }

  int crossings(const RankState& s) const { return count_crossings(d_, layers_, ordering(s)); }

  /// One barycenter pass over every layer in the given direction.
  void sweep(RankState& s, bool forward) const {
    std::vector<double> bary(d_.nodes.size(), 0.0);
    std::vector<bool> has(d_.nodes.size(), false);
    for (int step = 1; step < layerCount_; ++step) {
      const int layer = forward ? step : layerCount_ - 1 - step;
      const int neighbour = forward ? layer - 1 : layer + 1;
      const Ordering current = ordering(s);
      const auto position = row_positions(current);
      std::vector<double> sum(d_.nodes.size(), 0.0);
      std::vector<int> count(d_.nodes.size(), 0);
      for (const Link& l : links_) {
        for (const auto& [self, other, otherRow] : {std::tuple{l.a, l.b, l.rowB}, std::tuple{l.b, l.a, l.rowA}}) {
          if (layers_[static_cast<std::size_t>(self)] != layer || layers_[static_cast<std::size_t>(other)] != neighbour) continue;
          sum[static_cast<std::size_t>(self)] += position[static_cast<std::size_t>(other)] + 1 + otherRow;
          ++count[static_cast<std::size_t>(self)];
        }
      }
      const auto& members = current[static_cast<std::size_t>(layer)];
      for (int n : members) {
        const auto i = static_cast<std::size_t>(n);
        bary[i] = count[i] > 0 ? sum[i] / count[i] : position[i];
        has[i] = true;
      }
      // Re-rank each group's direct members on this layer.
      std::map<int, std::vector<int>> byGroup;
      for (int n : members) byGroup[groupOf_[static_cast<std::size_t>(n)]].push_back(n);
      for (auto& [g, nodes] : byGroup) {
        std::vector<int> ranks;
        for (int n : nodes) ranks.push_back(s.nodeRank[static_cast<std::size_t>(n)]);
        std::sort(ranks.begin(), ranks.end());
        std::stable_sort(nodes.begin(), nodes.end(), [&](int a, int b) {
          const auto ia = static_cast<std::size_t>(a);
          const auto ib = static_cast<std::size_t>(b);
          if (bary[ia] != bary[ib]) return bary[ia] < bary[ib];
          return s.nodeRank[ia] < s.nodeRank[ib];
        });
        for (std::size_t k = 0; k < nodes.size(); ++k) s.nodeRank[static_cast<std::size_t>(nodes[k])] = ranks[k];
      }
    }
    // Sibling groups follow the mean barycenter of everything inside them.
    std::vector<double> groupSum(d_.groups.size(), 0.0);
    std::vector<int> groupCount(d_.groups.size(), 0);
    for (std::size_t n = 0; n < d_.nodes.size(); ++n) {
      if (!has[n] || groupOf_[n] < 0) continue;
      for (int g : paths_[static_cast<std::size_t>(groupOf_[n])]) {
        groupSum[static_cast<std::size_t>(g)] += bary[n];
        ++groupCount[static_cast<std::size_t>(g)];
      }
    }
    for (auto& siblings : sibling_sets()) {
      std::vector<int> ranks;
      for (int g : siblings) ranks.push_back(s.groupRank[static_cast<std::size_t>(g)]);
      std::sort(ranks.begin(), ranks.end());
      auto mean = [&](int g) {
        const auto i = static_cast<std::size_t>(g);
        return groupCount[i] > 0 ? groupSum[i] / groupCount[i] : std::numeric_limits<double>::max();
      };
      std::stable_sort(siblings.begin(), siblings.end(), [&](int a, int b) {
        if (mean(a) != mean(b)) return mean(a) < mean(b);
        return s.groupRank[static_cast<std::size_t>(a)] < s.groupRank[static_cast<std::size_t>(b)];
      });
      for (std::size_t k = 0; k < siblings.size(); ++k) s.groupRank[static_cast<std::size_t>(siblings[k])] = ranks[k];
    }
  }

  /// Swaps neighbouring nodes (same group, same layer) and neighbouring
  /// sibling groups while that strictly lowers the crossing count.
  void transpose(RankState& s) const {
    int best = crossings(s);
    for (int round = 0; round < 16 && best > 0; ++round) {
      bool improved = false;
      for (const auto& layer : ordering(s)) {
        for (std::size_t i = 0; i + 1 < layer.size(); ++i) {
          const auto a = static_cast<std::size_t>(layer[i]);
          const auto b = static_cast<std::size_t>(layer[i + 1]);
          if (groupOf_[a] != groupOf_[b]) continue;
          std::swap(s.nodeRank[a], s.nodeRank[b]);
          const int c = crossings(s);
          if (c < best) {
            best = c;
            improved = true;
            break;
          }
          std::swap(s.nodeRank[a], s.nodeRank[b]);
        }
      }
      for (auto siblings : sibling_sets()) {
        std::sort(siblings.begin(), siblings.end(), [&](int a, int b) {
          return s.groupRank[static_cast<std::size_t>(a)] < s.groupRank[static_cast<std::size_t>(b)];
        });
        for (std::size_t i = 0; i + 1 < siblings.size(); ++i) {
          const auto a = static_cast<std::size_t>(siblings[i]);
          const auto b = static_cast<std::size_t>(siblings[i + 1]);
          std::swap(s.groupRank[a], s.groupRank[b]);
          const int c = crossings(s);
          if (c < best) {
            best = c;
            improved = true;
            break;
          }
          std::swap(s.groupRank[a], s.groupRank[b]);
        }
      }
      if (!improved) break;
    }
  }

 private:
  std::vector<std::pair<int, int>> key(const RankState& s, int node) const {
    std::vector<std::pair<int, int>> k;
    const int g = groupOf_[static_cast<std::size_t>(node)];
    if (g >= 0) {
      for (int p : paths_[static_cast<std::size_t>(g)]) k.emplace_back(1, s.groupRank[static_cast<std::size_t>(p)]);
    }
    k.emplace_back(0, s.nodeRank[static_cast<std::size_t>(node)]);
    return k;
  }

  /// Row offset of each node's title row within its layer's stack.
  std::vector<int> row_positions(const Ordering& ordering) const {
    std::vector<int> pos(d_.nodes.size(), 0);
    for (const auto& layer : ordering) {
      int y = 0;
      for (int n : layer) {
        pos[static_cast<std::size_t>(n)] = y;
        y += 1 + static_cast<int>(d_.nodes[static_cast<std::size_t>(n)].attrRows.size());
      }
    }
    return pos;
  }

  std::vector<std::vector<int>> sibling_sets() const {
    std::map<int, std::vector<int>> byParent;
    for (std::size_t g = 0; g < d_.groups.size(); ++g) {
      const auto& path = paths_[g];
      byParent[path.size() > 1 ? path[path.size() - 2] : -1].push_back(static_cast<int>(g));
    }
    std::vector<std::vector<int>> out;
    for (auto& [parent, groups] : byParent) {
      if (groups.size() > 1) out.push_back(std::move(groups));
    }
    return out;
  }

  const Diagram& d_;
  const Layers& layers_;
  std::vector<int> groupOf_;
  std::vector<Link> links_;
  std::vector<std::vector<int>> paths_;
  int layerCount_ = 0;
};

}  // namespace

Layers assign_layers(const Diagram& d) {
  const std::size_t n = d.nodes.size();
  const auto adj = adjacency(d);
  // Join distance from SELECT. With SELECT pinned to layer 0 and every line
  // confined to adjacent layers, no node can sit further right than this,
  // so nesting depth cannot push a table past it.
  Layers layers = bfs(adj, output_node(d));
  // Components SELECT does not reach: one band each, in source order.
  for (std::size_t v = 0; v < n; ++v) {
    if (layers[v] >= 0) continue;
    const int start = *std::max_element(layers.begin(), layers.end()) + 1;
    const auto dist = bfs(adj, static_cast<int>(v));
    for (std::size_t u = 0; u < n; ++u) {
      if (dist[u] >= 0) layers[u] = start + dist[u];
    }
  }
  return layers;
}

Ordering initial_ordering(const Diagram& d, const Layers& layers) {
  const Orderer orderer(d, layers);
  return orderer.ordering(orderer.initial());
}

OrderingReport order_within_layers(const Diagram& d, const Layers& layers) {
  const Orderer orderer(d, layers);
  RankState state = orderer.initial();
  OrderingReport report;
  report.initialCrossings = orderer.crossings(state);
  RankState best = state;
  int bestCrossings = report.initialCrossings;
  int stale = 0;
  for (int sweep = 0; sweep < 8 && bestCrossings > 0 && stale < 2; ++sweep) {
    orderer.sweep(state, sweep % 2 == 0);
    orderer.transpose(state);
    ++report.sweeps;
    const int c = orderer.crossings(state);
    if (c < bestCrossings) {
      best = state;
      bestCrossings = c;
      stale = 0;
    } else {
      ++stale;
    }
  }
  report.ordering = orderer.ordering(best);
  report.finalCrossings = bestCrossings;
  return report;
}

int count_crossings(const Diagram& d, const Layers& layers, const Ordering& ordering) {
  std::vector<int> order(d.nodes.size(), 0);
  for (const auto& layer : ordering) {
    for (std::size_t i = 0; i < layer.size(); ++i) order[static_cast<std::size_t>(layer[i])] = static_cast<int>(i);
  }
  struct Segment {
    int left;
    std::pair<int, int> p;
    std::pair<int, int> q;
  };
  std::vector<Segment> segments;
  for (const Link& l : links(d)) {
    const int la = layers[static_cast<std::size_t>(l.a)];
    const int lb = layers[static_cast<std::size_t>(l.b)];
    if (la == lb) continue;
    std::pair<int, int> a{order[static_cast<std::size_t>(l.a)], l.rowA};
    std::pair<int, int> b{order[static_cast<std::size_t>(l.b)], l.rowB};
    if (la < lb) segments.push_back({la * 1000 + lb, a, b});
    else segments.push_back({lb * 1000 + la, b, a});
  }
  int crossings = 0;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    for (std::size_t j = i + 1; j < segments.size(); ++j) {
      const auto& s = segments[i];
      const auto& t = segments[j];
      if (s.left != t.left) continue;
      if ((s.p < t.p && s.q > t.q) || (s.p > t.p && s.q < t.q)) ++crossings;
    }
  }
  return crossings;
}

int count_crossings(const PositionedDiagram& pd) {
  const int layerCount = pd.layer.empty() ? 0 : *std::max_element(pd.layer.begin(), pd.layer.end()) + 1;
  Ordering ordering(static_cast<std::size_t>(layerCount));
  for (std::size_t n = 0; n < pd.layer.size(); ++n) {
    auto& layer = ordering[static_cast<std::size_t>(pd.layer[n])];
    if (layer.size() <= static_cast<std::size_t>(pd.order[n])) layer.resize(static_cast<std::size_t>(pd.order[n]) + 1);
    layer[static_cast<std::size_t>(pd.order[n])] = static_cast<int>(n);
  }
  return count_crossings(pd.diagram, pd.layer, ordering);
}

PositionedDiagram assign_coordinates(const Diagram& d, const Layers& layers, const Ordering& ordering,
                                     const LayoutStyle& style) {
  PositionedDiagram pd;
  pd.diagram = d;
  pd.layer = layers;
  pd.order.assign(d.nodes.size(), 0);
  pd.nodeRects.assign(d.nodes.size(), Rect{});
  pd.groupRects.assign(d.groups.size(), Rect{});

  int maxGroupDepth = 0;
  for (const auto& g : d.groups) maxGroupDepth = std::max(maxGroupDepth, g.depth);
  const int gutter = gutter_width(style, maxGroupDepth);

  // Columns.
  std::vector<int> columnX;
  int x = 0;
  for (const auto& layer : ordering) {
    int widest = 0;
    for (int n : layer) widest = std::max(widest, node_width(d, d.nodes[static_cast<std::size_t>(n)]));
    columnX.push_back(x);
    x += widest + gutter;
  }
  pd.width = x;
  for (std::size_t n = 0; n < d.nodes.size(); ++n) {
    auto& r = pd.nodeRects[n];
    r.x = columnX[static_cast<std::size_t>(layers[n])];
    r.width = node_width(d, d.nodes[n]);
    r.height = 1 + static_cast<int>(d.nodes[n].attrRows.size());
  }

  const std::vector<int> groupOf = node_groups(d);
  std::vector<int> position(d.nodes.size(), 0);
  for (const auto& layer : ordering) {
    for (std::size_t i = 0; i < layer.size(); ++i) {
      position[static_cast<std::size_t>(layer[i])] = static_cast<int>(i);
      pd.order[static_cast<std::size_t>(layer[i])] = static_cast<int>(i);
    }
  }
  // Children of each group (and of the top level, -1) in ordering order.
  std::map<int, std::vector<int>> childGroups;
  std::vector<std::pair<int, int>> span(d.groups.size(), {std::numeric_limits<int>::max(), -1});
  std::vector<std::pair<int, int>> firstSeen(d.groups.size(), {std::numeric_limits<int>::max(), 0});
  for (std::size_t n = 0; n < d.nodes.size(); ++n) {
    if (groupOf[n] < 0) continue;
    for (int g : group_path(d, groupOf[n])) {
      auto& s = span[static_cast<std::size_t>(g)];
      s.first = std::min(s.first, layers[n]);
      s.second = std::max(s.second, layers[n]);
      // A group's rank among its siblings shows in any layer it occupies:
      // compare by (layer, position) of its earliest member per layer.
      firstSeen[static_cast<std::size_t>(g)] =
          std::min(firstSeen[static_cast<std::size_t>(g)], std::pair{layers[n], position[n]});
    }
  }
  for (std::size_t g = 0; g < d.groups.size(); ++g) {
    const auto& parent = d.groups[g].parentGroup;
    childGroups[parent ? d.group_index(*parent) : -1].push_back(static_cast<int>(g));
  }
  // Sibling groups sharing a layer keep their relative order from
  // `ordering`; the rest follow their first appearance.
  for (auto& [parent, children] : childGroups) {
    std::map<int, std::vector<int>> after;
    std::map<int, int> blockers;
    for (int a : children) {
      for (int b : children) {
        if (a == b) continue;
        for (std::size_t l = 0; l < ordering.size(); ++l) {
          int pa = -1;
          int pb = -1;
          for (int n : ordering[l]) {
            if (groupOf[static_cast<std::size_t>(n)] < 0) continue;
            const auto path = group_path(d, groupOf[static_cast<std::size_t>(n)]);
            if (pa < 0 && std::find(path.begin(), path.end(), a) != path.end()) pa = position[static_cast<std::size_t>(n)];
            if (pb < 0 && std::find(path.begin(), path.end(), b) != path.end()) pb = position[static_cast<std::size_t>(n)];
          }
          if (pa >= 0 && pb >= 0) {
            if (pa < pb) {
              after[a].push_back(b);
              ++blockers[b];
            }
            break;
          }
        }
      }
    }
    std::vector<int> sorted;
    std::vector<int> pending = children;
    while (!pending.empty()) {
      auto pick = pending.end();
      for (auto it = pending.begin(); it != pending.end(); ++it) {
        if (blockers[*it] > 0) continue;
        if (pick == pending.end() || firstSeen[static_cast<std::size_t>(*it)] < firstSeen[static_cast<std::size_t>(*pick)]) pick = it;
      }
      if (pick == pending.end()) pick = pending.begin();  // inconsistent input; stay total
      const int g = *pick;
      pending.erase(pick);
      sorted.push_back(g);
      for (int b : after[g]) --blockers[b];
    }
    children = std::move(sorted);
  }

  // Vertical placement: a group's direct members first, then its child
  // groups, each child dropped below whatever already occupies its layers.
  const std::size_t layerCount = ordering.size();
  std::function<Rect(int, int)> place = [&](int group, int top) -> Rect {
    const int inset = group >= 0 ? style.padY : 0;
    std::vector<int> cursor(layerCount, top + inset);
    int contentBottom = top + inset;
    int left = std::numeric_limits<int>::max();
    int right = std::numeric_limits<int>::min();
    for (std::size_t l = 0; l < layerCount; ++l) {
      for (int n : ordering[l]) {
        if (groupOf[static_cast<std::size_t>(n)] != group) continue;
        Rect& r = pd.nodeRects[static_cast<std::size_t>(n)];
        r.y = cursor[l];
        cursor[l] = r.bottom() + style.nodeGap;
        contentBottom = std::max(contentBottom, r.bottom());
        left = std::min(left, r.x);
        right = std::max(right, r.right());
      }
    }
    for (int child : childGroups[group]) {
      const auto [from, to] = span[static_cast<std::size_t>(child)];
      int y = 0;
      for (int l = from; l <= to; ++l) y = std::max(y, cursor[static_cast<std::size_t>(l)]);
      const Rect r = place(child, y);
      for (int l = from; l <= to; ++l) cursor[static_cast<std::size_t>(l)] = r.bottom() + style.nodeGap;
      contentBottom = std::max(contentBottom, r.bottom());
      left = std::min(left, r.x);
      right = std::max(right, r.right());
    }
    if (group < 0) return Rect{0, top, 0, contentBottom - top};
    Rect g{left - style.padX, top, right - left + 2 * style.padX, contentBottom + style.padY - top};
    pd.groupRects[static_cast<std::size_t>(group)] = g;
    return g;
  };
  pd.height = place(-1, 0).height;

  // Final order within each layer follows the drawing.
  for (const auto& layer : ordering) {
    std::vector<int> byY = layer;
    std::stable_sort(byY.begin(), byY.end(), [&](int a, int b) {
      return pd.nodeRects[static_cast<std::size_t>(a)].y < pd.nodeRects[static_cast<std::size_t>(b)].y;
    });
    for (std::size_t i = 0; i < byY.size(); ++i) pd.order[static_cast<std::size_t>(byY[i])] = static_cast<int>(i);
  }
  return pd;
}

PositionedDiagram layout(const Diagram& d, const LayoutStyle& style) {
  const Layers layers = assign_layers(d);
  return assign_coordinates(d, layers, order_within_layers(d, layers).ordering, style);
}

}  // namespace qviz::layout
