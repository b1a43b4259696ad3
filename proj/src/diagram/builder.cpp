// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <functional>
#include <numeric>

#include "qviz/diagram/diagram.hpp"

namespace qviz::diagram {

using calculus::BlockKind;
using calculus::CalculusQuery;
using calculus::QuantifierBlock;

std::string_view to_string(Dialect dialect) {
  return dialect == Dialect::QueryVis ? "queryvis" : "relational-diagrams";
}

Dialect parse_dialect(std::string_view text) {
  if (text == "queryvis") return Dialect::QueryVis;
  if (text == "rd" || text == "relational-diagrams") return Dialect::RelationalDiagrams;
  throw Error(ErrorCode::InvalidInput, "unknown dialect '" + std::string(text) + "'");
}

std::string_view to_string(NodeRole role) { return role == NodeRole::Output ? "output" : "input"; }

std::string_view to_string(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::Output: return "output";
    case EdgeKind::Join: return "join";
    case EdgeKind::Selection: return "selection";
  }
  return "?";
}

std::string_view to_string(GroupStyle style) {
  switch (style) {
    case GroupStyle::NotExistsDashed: return "not-exists-dashed";
    case GroupStyle::ForallDouble: return "forall-double";
    case GroupStyle::NegationShaded: return "negation-solid-shaded";
  }
  return "?";
}

NodeRole parse_node_role(std::string_view text) {
  if (text == "output") return NodeRole::Output;
  if (text == "input") return NodeRole::Input;
  throw Error(ErrorCode::InvalidInput, "unknown node role '" + std::string(text) + "'");
}

EdgeKind parse_edge_kind(std::string_view text) {
  for (EdgeKind k : {EdgeKind::Output, EdgeKind::Join, EdgeKind::Selection}) {
    if (to_string(k) == text) return k;
  }
  throw Error(ErrorCode::InvalidInput, "unknown edge kind '" + std::string(text) + "'");
}

GroupStyle parse_group_style(std::string_view text) {
  for (GroupStyle s : {GroupStyle::NotExistsDashed, GroupStyle::ForallDouble, GroupStyle::NegationShaded}) {
    if (to_string(s) == text) return s;
  }
  throw Error(ErrorCode::InvalidInput, "unknown group style '" + std::string(text) + "'");
}

int Diagram::node_index(const std::string& id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

int Diagram::group_index(const std::string& id) const {
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (groups[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

const TableBox& Diagram::node(const std::string& id) const {
  const int i = node_index(id);
  if (i < 0) throw Error(ErrorCode::InvalidInput, "no node '" + id + "'");
  return nodes[static_cast<std::size_t>(i)];
}

int Diagram::row_index(const RowRef& ref) const {
  const int n = node_index(ref.node);
  if (n < 0) return -1;
  const auto& rows = nodes[static_cast<std::size_t>(n)].attrRows;
  const auto it = std::find(rows.begin(), rows.end(), ref.attr);
  return it == rows.end() ? -1 : static_cast<int>(it - rows.begin());
}

std::string row_text(const Diagram& diagram, const TableBox& node, std::size_t row) {
  const std::string& attr = node.attrRows.at(row);
  std::string text = attr;
  bool first = true;
  for (const PredicateEdge& e : diagram.edges) {
    if (e.to || e.from.node != node.id || e.from.attr != attr) continue;
    text += first ? " " : ", ";
    text += (e.opLabel.empty() ? "=" : e.opLabel) + " " + e.constant;
    first = false;
  }
  return text;
}

namespace {

std::string node_id(int var) { return "t" + std::to_string(var); }
std::string group_id(int block) { return "g" + std::to_string(block); }

int anchor_of(const QuantifierBlock& block) {
  int best = block.vars.front().id;
  for (const auto& v : block.vars) best = std::min(best, v.id);
  return best;
}

/// forall x (h -> exists y c)  ==  not exists x (h and not exists y c)
void expand_forall(QuantifierBlock& block) {
  if (block.kind == BlockKind::ForallImplies) {
    block.kind = BlockKind::NotExists;
    for (auto& child : block.children) {
      if (child.kind == BlockKind::Exists) child.kind = BlockKind::NotExists;
    }
  }
  for (auto& child : block.children) expand_forall(child);
}

/// Nodes and edges, identical for both dialects; groups are assigned by
/// `group_of`, which returns the style of the group a block opens (if any).
Diagram skeleton(const CalculusQuery& q, Dialect dialect,
                 const std::function<std::optional<GroupStyle>(const QuantifierBlock&)>& style_of) {
  Diagram d;
  d.dialect = dialect;

  TableBox select;
  select.id = calculus::kSelectElementId;
  select.title = "SELECT";
  select.role = NodeRole::Output;
  for (const auto& col : q.output) select.attrRows.push_back(col.name);
  d.nodes.push_back(select);
  d.spanMap[select.id] = q.spanMap.at(calculus::kSelectElementId);

  // Groups in block pre-order; nodes take the nearest enclosing group.
  std::function<void(const QuantifierBlock&, std::optional<std::string>, int)> walk =
      [&](const QuantifierBlock& block, std::optional<std::string> group, int groupDepth) {
        if (const auto style = style_of(block)) {
          GroupBox g;
          g.id = group_id(block.id);
          g.style = *style;
          g.parentGroup = group;
          g.depth = groupDepth + 1;
          g.shade = dialect == Dialect::RelationalDiagrams ? g.depth % 2 : 0;
          d.spanMap[g.id] = q.spanMap.at(calculus::block_element_id(block.id));
          group = g.id;
          groupDepth = g.depth;
          d.groups.push_back(std::move(g));
        }
        for (const auto& v : block.vars) {
          TableBox box;
          box.id = node_id(v.id);
          box.title = v.displayName;
          box.attrRows = v.referencedAttrs;
          box.groupId = group;
          box.block = block.id;
          box.depth = block.depth;
          if (group) d.groups[static_cast<std::size_t>(d.group_index(*group))].memberNodes.push_back(box.id);
          d.spanMap[box.id] = q.spanMap.at(calculus::var_element_id(v.id));
          d.nodes.push_back(std::move(box));
        }
        for (const auto& child : block.children) walk(child, group, groupDepth);
      };
  walk(q.root, std::nullopt, 0);

  int edge = 0;
  auto next_edge_id = [&] { return "e" + std::to_string(edge++); };
  for (std::size_t i = 0; i < q.output.size(); ++i) {
    const auto& col = q.output[i];
    PredicateEdge e;
    e.id = next_edge_id();
    e.kind = EdgeKind::Output;
    e.from = {select.id, col.name};
    e.to = RowRef{node_id(col.source.var), col.source.attr};
    d.spanMap[e.id] = col.span;
    d.edges.push_back(std::move(e));
  }
  calculus::for_each_block(q.root, [&](const QuantifierBlock& block) {
    for (const auto& p : block.predicates) {
      PredicateEdge e;
      e.id = next_edge_id();
      e.from = {node_id(p.left.var), p.left.attr};
      e.opLabel = p.op == CompareOp::Eq ? "" : std::string(to_string(p.op));
      if (const auto* r = std::get_if<calculus::AttrSlot>(&p.right)) {
        e.kind = EdgeKind::Join;
        e.to = RowRef{node_id(r->var), r->attr};
      } else {
        e.kind = EdgeKind::Selection;
        e.constant = to_literal(std::get<Value>(p.right));
      }
      d.spanMap[e.id] = p.span;
      d.edges.push_back(std::move(e));
    }
  });
  return d;
}

}  // namespace

int join_components(const CalculusQuery& query) {
  std::vector<int> ids;
  for (const auto* v : calculus::all_vars(query)) ids.push_back(v->id);
  std::map<int, int> parent;
  for (int id : ids) parent[id] = id;
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  calculus::for_each_block(query.root, [&](const QuantifierBlock& block) {
    for (const auto& p : block.predicates) {
      if (const auto* r = std::get_if<calculus::AttrSlot>(&p.right)) parent[find(p.left.var)] = find(r->var);
    }
  });
  int roots = 0;
  for (int id : ids) roots += find(id) == id ? 1 : 0;
  return roots;
}

Diagram build_queryvis(const CalculusQuery& input, bool applyForall) {
  const int depth = calculus::nesting_depth(input);
  if (depth > kMaxQueryVisDepth) {
    std::optional<SourceSpan> span;
    calculus::for_each_block(input.root, [&](const QuantifierBlock& b) {
      if (!span && b.depth > kMaxQueryVisDepth) span = b.span;
    });
    throw Error(ErrorCode::DepthExceeded,
                "nesting depth " + std::to_string(depth) + " exceeds the QueryVis limit of " +
                    std::to_string(kMaxQueryVisDepth) + "; use the relational-diagrams dialect",
                span);
  }
  if (const int parts = join_components(input); parts > 1) {
    throw Error(ErrorCode::DisconnectedQuery,
                "join graph has " + std::to_string(parts) +
                    " components; use the relational-diagrams dialect",
                input.spanMap.at(calculus::kSelectElementId));
  }
  const CalculusQuery q = applyForall ? calculus::forall_transform(input) : input;
  Diagram d = skeleton(q, Dialect::QueryVis, [](const QuantifierBlock& b) -> std::optional<GroupStyle> {
    if (b.kind == BlockKind::NotExists) return GroupStyle::NotExistsDashed;
    if (b.kind == BlockKind::ForallImplies) return GroupStyle::ForallDouble;
    return std::nullopt;
  });

  if (!q.root.children.empty()) {
    int n = 0;
    auto arrow = [&](const std::string& from, const QuantifierBlock& to) {
      ReadingArrow a{"a" + std::to_string(n++), from, node_id(anchor_of(to))};
      d.spanMap[a.id] = q.spanMap.at(calculus::block_element_id(to.id));
      d.arrows.push_back(std::move(a));
    };
    arrow(calculus::kSelectElementId, q.root);
    calculus::for_each_block(q.root, [&](const QuantifierBlock& block) {
      for (const auto& child : block.children) arrow(node_id(anchor_of(block)), child);
    });
  }
  return d;
}

Diagram build_relational_diagram(const CalculusQuery& input) {
  CalculusQuery q = input;
  expand_forall(q.root);
  return skeleton(q, Dialect::RelationalDiagrams, [](const QuantifierBlock& b) -> std::optional<GroupStyle> {
    if (b.kind == BlockKind::NotExists) return GroupStyle::NegationShaded;
    return std::nullopt;
  });
}

Diagram build(const CalculusQuery& query, Dialect dialect, bool applyForall) {
  return dialect == Dialect::QueryVis ? build_queryvis(query, applyForall) : build_relational_diagram(query);
}

DiagramStats diagram_stats(const Diagram& d) {
  DiagramStats s;
  s.nodes = static_cast<int>(d.nodes.size());
  s.edges = static_cast<int>(d.edges.size());
  s.groups = static_cast<int>(d.groups.size());
  s.arrows = static_cast<int>(d.arrows.size());
  for (const auto& n : d.nodes) s.maxDepth = std::max(s.maxDepth, n.depth);
  return s;
}

}  // namespace qviz::diagram
