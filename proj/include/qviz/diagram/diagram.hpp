// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qviz/calculus/calculus.hpp"
#include "qviz/error.hpp"

namespace qviz::diagram {

enum class Dialect { QueryVis, RelationalDiagrams };

std::string_view to_string(Dialect dialect);
/// Accepts "queryvis", "rd" and "relational-diagrams".
Dialect parse_dialect(std::string_view text);

enum class NodeRole { Output, Input };
enum class EdgeKind { Output, Join, Selection };
enum class GroupStyle { NotExistsDashed, ForallDouble, NegationShaded };

std::string_view to_string(NodeRole role);
std::string_view to_string(EdgeKind kind);
std::string_view to_string(GroupStyle style);
NodeRole parse_node_role(std::string_view text);
EdgeKind parse_edge_kind(std::string_view text);
GroupStyle parse_group_style(std::string_view text);

struct TableBox {
  std::string id;
  std::string title;
  NodeRole role = NodeRole::Input;
  std::vector<std::string> attrRows;
  std::optional<std::string> groupId;
  /// Quantifier block the table belongs to, and that block's depth.
  int block = 0;
  int depth = 0;

  friend bool operator==(const TableBox&, const TableBox&) = default;
};

struct RowRef {
  std::string node;
  std::string attr;

  friend bool operator==(const RowRef&, const RowRef&) = default;
  friend auto operator<=>(const RowRef&, const RowRef&) = default;
};

/// A line between two attribute rows, or a comparison of one row with a
/// constant (then `to` is empty and `constant` holds the literal).
struct PredicateEdge {
  std::string id;
  EdgeKind kind = EdgeKind::Join;
  RowRef from;
  std::optional<RowRef> to;
  std::string constant;
  /// Operator text; empty for `=`.
  std::string opLabel;

  friend bool operator==(const PredicateEdge&, const PredicateEdge&) = default;
};

struct GroupBox {
  std::string id;
  GroupStyle style = GroupStyle::NotExistsDashed;
  std::vector<std::string> memberNodes;
  std::optional<std::string> parentGroup;
  /// 1 for an outermost group.
  int depth = 1;
  int shade = 0;

  friend bool operator==(const GroupBox&, const GroupBox&) = default;
};

struct ReadingArrow {
  std::string id;
  std::string from;
  std::string to;

  friend bool operator==(const ReadingArrow&, const ReadingArrow&) = default;
};

struct Diagram {
  Dialect dialect = Dialect::QueryVis;
  std::vector<TableBox> nodes;
  std::vector<PredicateEdge> edges;
  std::vector<GroupBox> groups;
  std::vector<ReadingArrow> arrows;
  /// Element id -> source span, for every node, edge, group and arrow.
  std::map<std::string, SourceSpan> spanMap;

  [[nodiscard]] int node_index(const std::string& id) const;
  [[nodiscard]] int group_index(const std::string& id) const;
  [[nodiscard]] const TableBox& node(const std::string& id) const;
  /// Index of `attr` in the node's rows, or -1.
  [[nodiscard]] int row_index(const RowRef& ref) const;

  friend bool operator==(const Diagram&, const Diagram&) = default;
};

inline constexpr int kMaxQueryVisDepth = 3;

/// QueryVis diagram: dashed boxes for NOT EXISTS, double-lined boxes for
/// forall blocks and reading arrows between block anchors. Throws
/// DepthExceeded beyond depth 3 and DisconnectedQuery when the join graph
/// falls apart.
Diagram build_queryvis(const calculus::CalculusQuery& query, bool applyForall = true);

/// Relational Diagram: nested, alternately shaded negation boxes. Accepts
/// any depth and disconnected queries.
Diagram build_relational_diagram(const calculus::CalculusQuery& query);

Diagram build(const calculus::CalculusQuery& query, Dialect dialect, bool applyForall = true);

struct DiagramStats {
  int nodes = 0;
  int edges = 0;
  int groups = 0;
  int arrows = 0;
  int maxDepth = 0;

  friend bool operator==(const DiagramStats&, const DiagramStats&) = default;
};

DiagramStats diagram_stats(const Diagram& diagram);

/// Number of connected components of the join graph over tuple variables.
int join_components(const calculus::CalculusQuery& query);

/// Text shown on an attribute row: the attribute plus any constant
/// comparisons attached to it, e.g. "price > 5".
std::string row_text(const Diagram& diagram, const TableBox& node, std::size_t row);

}  // namespace qviz::diagram
