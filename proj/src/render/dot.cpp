// SPDX-License-Identifier: Apache-2.0
#include <functional>
#include <sstream>

#include "qviz/render/render.hpp"

namespace qviz::render {

using diagram::Diagram;
using diagram::GroupStyle;

namespace {

/// Escapes the characters that structure a record label.
std::string record_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '{' || c == '}' || c == '|' || c == '<' || c == '>' || c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string quoted(std::string_view text) {
  // Inside DOT strings only the quote is an escape.
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string group_attributes(GroupStyle style) {
  switch (style) {
    case GroupStyle::NotExistsDashed: return "style=dashed";
    case GroupStyle::ForallDouble: return "peripheries=2";
    case GroupStyle::NegationShaded: return "style=filled";
  }
  return {};
}

}  // namespace

std::string to_dot(const Diagram& d) {
  std::ostringstream out;
  out << "digraph qviz {\n"
      << "  graph [rankdir=LR, fontname=\"monospace\"];\n"
      << "  node [shape=record, fontname=\"monospace\"];\n"
      << "  edge [fontname=\"monospace\"];\n";

  auto node_line = [&](const diagram::TableBox& n, const std::string& indent) {
    std::string label = "{" + record_escape(n.title);
    for (std::size_t r = 0; r < n.attrRows.size(); ++r) {
      label += "|<r" + std::to_string(r) + "> " + record_escape(diagram::row_text(d, n, r));
    }
    label += "}";
    out << indent << quoted(n.id) << " [id=" << quoted(n.id) << ", label=" << quoted(label) << "];\n";
  };

  std::function<void(const std::optional<std::string>&, const std::string&)> emit =
      [&](const std::optional<std::string>& group, const std::string& indent) {
        for (const auto& n : d.nodes) {
          if (n.groupId == group) node_line(n, indent);
        }
        for (const auto& g : d.groups) {
          if (g.parentGroup != group) continue;
          out << indent << "subgraph " << quoted("cluster_" + g.id) << " {\n"
              << indent << "  graph [id=" << quoted(g.id) << ", label=\"\", " << group_attributes(g.style);
          if (g.style == GroupStyle::NegationShaded) out << ", fillcolor=" << (g.shade == 0 ? "\"#ffffff\"" : "\"#d9d9d9\"");
          out << "];\n";
          emit(g.id, indent + "  ");
          out << indent << "}\n";
        }
      };
  emit(std::nullopt, "  ");

  auto port = [&](const diagram::RowRef& ref) {
    return quoted(ref.node) + ":r" + std::to_string(d.row_index(ref));
  };
  for (const auto& e : d.edges) {
    if (!e.to) continue;
    out << "  " << port(e.from) << " -> " << port(*e.to) << " [id=" << quoted(e.id) << ", dir=none";
    if (!e.opLabel.empty()) out << ", label=" << quoted(e.opLabel);
    out << "];\n";
  }
  for (const auto& a : d.arrows) {
    out << "  " << quoted(a.from) << " -> " << quoted(a.to) << " [id=" << quoted(a.id)
        << ", style=bold, color=\"#a04040\", constraint=false];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace qviz::render
