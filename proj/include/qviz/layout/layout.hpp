// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "qviz/diagram/diagram.hpp"

namespace qviz::layout {

/// Rectangle in abstract units: x counts characters, y counts text rows.
struct Rect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  [[nodiscard]] int right() const { return x + width; }
  [[nodiscard]] int bottom() const { return y + height; }
  /// `inner` lies inside with at least `margin` units on every side.
  [[nodiscard]] bool contains(const Rect& inner, int margin = 0) const;
  [[nodiscard]] bool overlaps(const Rect& other) const;

  friend bool operator==(const Rect&, const Rect&) = default;
};

struct LayoutStyle {
  int padX = 2;
  int padY = 1;
  int nodeGap = 1;
  /// Gutter between layers before room for group borders is added.
  int baseGutter = 6;
};

/// Node index -> layer.
using Layers = std::vector<int>;
/// Per layer, node indices from top to bottom.
using Ordering = std::vector<std::vector<int>>;

struct PositionedDiagram {
  diagram::Diagram diagram;
  std::vector<int> layer;
  std::vector<int> order;
  std::vector<Rect> nodeRects;
  std::vector<Rect> groupRects;
  int width = 0;
  int height = 0;

  friend bool operator==(const PositionedDiagram&, const PositionedDiagram&) = default;
};

/// SELECT on layer 0, tables by join distance from it. Nested blocks are
/// pushed right of their enclosing depth as far as the rule "every line
/// joins the same or adjacent layers" allows. Components not reachable
/// from SELECT occupy consecutive bands further right.
Layers assign_layers(const diagram::Diagram& d);

/// Source-order ordering that keeps every group's members contiguous.
Ordering initial_ordering(const diagram::Diagram& d, const Layers& layers);

struct OrderingReport {
  Ordering ordering;
  int initialCrossings = 0;
  int finalCrossings = 0;
  int sweeps = 0;
};

/// Barycenter sweeps alternating direction plus adjacent transposition,
/// at most 8 sweeps, keeping the best ordering seen. Groups stay contiguous.
OrderingReport order_within_layers(const diagram::Diagram& d, const Layers& layers);

/// Pairs of lines between the same two adjacent layers whose endpoints
/// (node order, then attribute row) are inverted.
int count_crossings(const diagram::Diagram& d, const Layers& layers, const Ordering& ordering);
int count_crossings(const PositionedDiagram& pd);

PositionedDiagram assign_coordinates(const diagram::Diagram& d, const Layers& layers,
                                     const Ordering& ordering, const LayoutStyle& style = {});

/// assign_layers, order_within_layers and assign_coordinates in sequence.
PositionedDiagram layout(const diagram::Diagram& d, const LayoutStyle& style = {});

/// Number of characters of the widest line in a node, plus margins.
int node_width(const diagram::Diagram& d, const diagram::TableBox& node);

/// Gutter width for a diagram whose groups nest `maxGroupDepth` deep.
int gutter_width(const LayoutStyle& style, int maxGroupDepth);

/// Group index -> group indices from the outermost down to itself.
std::vector<int> group_path(const diagram::Diagram& d, int group);

}  // namespace qviz::layout
