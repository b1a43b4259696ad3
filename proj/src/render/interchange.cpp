// SPDX-License-Identifier: Apache-2.0
#include "json.hpp"
#include "qviz/render/render.hpp"

namespace qviz::render {

using nlohmann::json;
using layout::PositionedDiagram;
using layout::Rect;

namespace {

json rect_json(const Rect& r) { return {{"x", r.x}, {"y", r.y}, {"width", r.width}, {"height", r.height}}; }

Rect rect_from(const json& j) {
  return Rect{j.at("x").get<int>(), j.at("y").get<int>(), j.at("width").get<int>(), j.at("height").get<int>()};
}

json optional_string(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

std::optional<std::string> optional_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<std::string>();
}

json row_json(const diagram::RowRef& r) { return {{"node", r.node}, {"attr", r.attr}}; }

diagram::RowRef row_from(const json& j) { return {j.at("node").get<std::string>(), j.at("attr").get<std::string>()}; }

}  // namespace

std::string to_interchange(const PositionedDiagram& pd) {
  const auto& d = pd.diagram;
  json doc;
  doc["version"] = kInterchangeVersion;
  doc["dialect"] = std::string(diagram::to_string(d.dialect));
  doc["width"] = pd.width;
  doc["height"] = pd.height;
  json nodes = json::array();
  for (std::size_t i = 0; i < d.nodes.size(); ++i) {
    const auto& n = d.nodes[i];
    nodes.push_back({{"id", n.id},
                     {"title", n.title},
                     {"role", std::string(diagram::to_string(n.role))},
                     {"attrRows", n.attrRows},
                     {"group", optional_string(n.groupId)},
                     {"block", n.block},
                     {"depth", n.depth},
                     {"layer", pd.layer[i]},
                     {"order", pd.order[i]},
                     {"rect", rect_json(pd.nodeRects[i])}});
  }
  doc["nodes"] = nodes;
  json edges = json::array();
  for (const auto& e : d.edges) {
    edges.push_back({{"id", e.id},
                     {"kind", std::string(diagram::to_string(e.kind))},
                     {"from", row_json(e.from)},
                     {"to", e.to ? row_json(*e.to) : json(nullptr)},
                     {"constant", e.constant},
                     {"op", e.opLabel}});
  }
  doc["edges"] = edges;
  json groups = json::array();
  for (std::size_t i = 0; i < d.groups.size(); ++i) {
    const auto& g = d.groups[i];
    groups.push_back({{"id", g.id},
                      {"style", std::string(diagram::to_string(g.style))},
                      {"members", g.memberNodes},
                      {"parent", optional_string(g.parentGroup)},
                      {"depth", g.depth},
                      {"shade", g.shade},
                      {"rect", rect_json(pd.groupRects[i])}});
  }
  doc["groups"] = groups;
  json arrows = json::array();
  for (const auto& a : d.arrows) arrows.push_back({{"id", a.id}, {"from", a.from}, {"to", a.to}});
  doc["arrows"] = arrows;
  json spans = json::object();
  for (const auto& [id, span] : d.spanMap) spans[id] = {{"start", span.start}, {"end", span.end}};
  doc["spanMap"] = spans;
  return doc.dump(2) + "\n";
}

PositionedDiagram from_interchange(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidInput, std::string("interchange: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("version")) throw Error(ErrorCode::InvalidInput, "interchange: missing version");
  if (!doc["version"].is_string() || doc["version"].get<std::string>() != kInterchangeVersion) {
    throw Error(ErrorCode::VersionError, "interchange: unsupported version " + doc["version"].dump() +
                                             ", expected \"" + kInterchangeVersion + "\"");
  }
  try {
    PositionedDiagram pd;
    auto& d = pd.diagram;
    d.dialect = diagram::parse_dialect(doc.at("dialect").get<std::string>());
    pd.width = doc.at("width").get<int>();
    pd.height = doc.at("height").get<int>();
    for (const auto& n : doc.at("nodes")) {
      diagram::TableBox box;
      box.id = n.at("id").get<std::string>();
      box.title = n.at("title").get<std::string>();
      box.role = diagram::parse_node_role(n.at("role").get<std::string>());
      box.attrRows = n.at("attrRows").get<std::vector<std::string>>();
      box.groupId = optional_from(n.at("group"));
      box.block = n.at("block").get<int>();
      box.depth = n.at("depth").get<int>();
      d.nodes.push_back(std::move(box));
      pd.layer.push_back(n.at("layer").get<int>());
      pd.order.push_back(n.at("order").get<int>());
      pd.nodeRects.push_back(rect_from(n.at("rect")));
    }
    for (const auto& e : doc.at("edges")) {
      diagram::PredicateEdge edge;
      edge.id = e.at("id").get<std::string>();
      edge.kind = diagram::parse_edge_kind(e.at("kind").get<std::string>());
      edge.from = row_from(e.at("from"));
      if (!e.at("to").is_null()) edge.to = row_from(e.at("to"));
      edge.constant = e.at("constant").get<std::string>();
      edge.opLabel = e.at("op").get<std::string>();
      d.edges.push_back(std::move(edge));
    }
    for (const auto& g : doc.at("groups")) {
      diagram::GroupBox group;
      group.id = g.at("id").get<std::string>();
      group.style = diagram::parse_group_style(g.at("style").get<std::string>());
      group.memberNodes = g.at("members").get<std::vector<std::string>>();
      group.parentGroup = optional_from(g.at("parent"));
      group.depth = g.at("depth").get<int>();
      group.shade = g.at("shade").get<int>();
      d.groups.push_back(std::move(group));
      pd.groupRects.push_back(rect_from(g.at("rect")));
    }
    for (const auto& a : doc.at("arrows")) {
      d.arrows.push_back({a.at("id").get<std::string>(), a.at("from").get<std::string>(), a.at("to").get<std::string>()});
    }
    for (const auto& [id, span] : doc.at("spanMap").items()) {
      d.spanMap[id] = SourceSpan{span.at("start").get<std::size_t>(), span.at("end").get<std::size_t>()};
    }
    return pd;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("interchange: ") + e.what());
  }
}

}  // namespace qviz::render
