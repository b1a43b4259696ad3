// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cstdio>
#include <sstream>

#include "qviz/render/render.hpp"

namespace qviz::render {

using diagram::Diagram;
using diagram::GroupStyle;
using diagram::PredicateEdge;
using layout::PositionedDiagram;
using layout::Rect;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s == "-0" ? "0" : s;
}

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

class SvgWriter {
 public:
  SvgWriter(const PositionedDiagram& pd, const StyleConfig& style) : pd_(pd), d_(pd.diagram), s_(style) {}

  std::string run() {
    const double w = pd_.width * s_.pxPerUnitX;
    const double h = pd_.height * s_.pxPerUnitY;
    out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(w + 2 * s_.margin)
         << "\" height=\"" << num(h + 2 * s_.margin) << "\" viewBox=\"" << num(-s_.margin) << ' '
         << num(-s_.margin) << ' ' << num(w + 2 * s_.margin) << ' ' << num(h + 2 * s_.margin)
         << "\" font-family=\"" << escape(s_.fontFamily) << "\" font-size=\"" << num(s_.fontSize)
         << "\" data-dialect=\"" << diagram::to_string(d_.dialect) << "\">\n";
    out_ << "<defs><marker id=\"arrowhead\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"8\" "
            "markerHeight=\"8\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\""
         << escape(s_.arrowStroke) << "\"/></marker></defs>\n";
    groups();
    tables();
    edges();
    arrows();
    out_ << "</svg>\n";
    return out_.str();
  }

 private:
  double px(double units) const { return units * s_.pxPerUnitX; }
  double py(double units) const { return units * s_.pxPerUnitY; }

  std::string span_attrs(const std::string& id) const {
    const auto it = d_.spanMap.find(id);
    if (it == d_.spanMap.end()) return {};
    return " data-span-start=\"" + std::to_string(it->second.start) + "\" data-span-end=\"" +
           std::to_string(it->second.end) + "\"";
  }

  std::string rect(const Rect& r, const std::string& extra) const {
    return "<rect x=\"" + num(px(r.x)) + "\" y=\"" + num(py(r.y)) + "\" width=\"" + num(px(r.width)) +
           "\" height=\"" + num(py(r.height)) + "\" " + extra + "/>";
  }

  // Outer groups first so inner frames paint on top.
  void groups() {
    std::vector<std::size_t> order(d_.groups.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return d_.groups[a].depth < d_.groups[b].depth; });
    out_ << "<g class=\"groups\">\n";
    for (std::size_t i : order) {
      const auto& g = d_.groups[i];
      const Rect& r = pd_.groupRects[i];
      out_ << "<g id=\"" << g.id << "\" class=\"group " << diagram::to_string(g.style) << "\" data-depth=\""
           << g.depth << "\"" << span_attrs(g.id) << ">";
      const std::string stroke = "stroke=\"" + escape(s_.stroke) + "\" stroke-width=\"1.5\"";
      switch (g.style) {
        case GroupStyle::NotExistsDashed:
          out_ << rect(r, "fill=\"none\" " + stroke + " stroke-dasharray=\"" + escape(s_.dashPattern) + "\"");
          break;
        case GroupStyle::ForallDouble: {
          out_ << rect(r, "fill=\"none\" " + stroke);
          const double gap = s_.doubleGap;
          out_ << "<rect x=\"" << num(px(r.x) + gap) << "\" y=\"" << num(py(r.y) + gap) << "\" width=\""
               << num(px(r.width) - 2 * gap) << "\" height=\"" << num(py(r.height) - 2 * gap)
               << "\" fill=\"none\" " << stroke << "/>";
          break;
        }
        case GroupStyle::NegationShaded:
          out_ << rect(r, "fill=\"" + escape(g.shade == 0 ? s_.shadeFill0 : s_.shadeFill1) +
                              "\" fill-opacity=\"" + num(s_.shadeOpacity) + "\" " + stroke);
          break;
      }
      out_ << "</g>\n";
    }
    out_ << "</g>\n";
  }

  void tables() {
    out_ << "<g class=\"tables\">\n";
    for (std::size_t i = 0; i < d_.nodes.size(); ++i) {
      const auto& n = d_.nodes[i];
      const Rect& r = pd_.nodeRects[i];
      out_ << "<g id=\"" << n.id << "\" class=\"table " << diagram::to_string(n.role) << "\""
           << span_attrs(n.id) << ">";
      out_ << rect(r, "fill=\"" + escape(s_.tableFill) + "\" stroke=\"" + escape(s_.stroke) + "\"");
      out_ << rect(Rect{r.x, r.y, r.width, 1}, "fill=\"" + escape(s_.titleFill) + "\" stroke=\"" + escape(s_.stroke) + "\"");
      out_ << text_at(r.x + 1, r.y, n.title, "title");
      for (std::size_t row = 0; row < n.attrRows.size(); ++row) {
        const int y = r.y + 1 + static_cast<int>(row);
        out_ << text_at(r.x + 1, y, n.attrRows[row], "attr");
        // Constant comparisons follow the attribute name on its row.
        int offset = r.x + 2 + static_cast<int>(n.attrRows[row].size());
        bool first = true;
        for (const PredicateEdge& e : d_.edges) {
          if (e.to || e.from.node != n.id || e.from.attr != n.attrRows[row]) continue;
          std::string label = (first ? "" : ", ") + (e.opLabel.empty() ? std::string("=") : e.opLabel) + " " + e.constant;
          out_ << "<text id=\"" << e.id << "\" class=\"edge selection\"" << span_attrs(e.id) << " x=\""
               << num(px(offset)) << "\" y=\"" << num(py(y + 0.72)) << "\">" << escape(label) << "</text>";
          offset += static_cast<int>(label.size());
          first = false;
        }
      }
      out_ << "</g>\n";
    }
    out_ << "</g>\n";
  }

  std::string text_at(int x, int y, const std::string& text, const char* cls) const {
    return "<text class=\"" + std::string(cls) + "\" x=\"" + num(px(x)) + "\" y=\"" + num(py(y + 0.72)) + "\">" +
           escape(text) + "</text>";
  }

  struct Point {
    double x;
    double y;
  };

  /// Attribute row anchor on the side facing `towards`.
  Point row_anchor(int node, int row, int towards) const {
    const Rect& r = pd_.nodeRects[static_cast<std::size_t>(node)];
    const Rect& t = pd_.nodeRects[static_cast<std::size_t>(towards)];
    const double y = py(r.y + 1 + row + 0.5);
    return {t.x > r.x ? px(r.right()) : (t.x < r.x ? px(r.x) : px(r.right())), y};
  }

  std::string path(Point a, Point b) const {
    if (a.x == b.x) {
      // Same column: bow out to the right.
      const double bulge = px(3);
      return "M" + num(a.x) + "," + num(a.y) + " C" + num(a.x + bulge) + "," + num(a.y) + " " +
             num(b.x + bulge) + "," + num(b.y) + " " + num(b.x) + "," + num(b.y);
    }
    return "M" + num(a.x) + "," + num(a.y) + " L" + num(b.x) + "," + num(b.y);
  }

  void edges() {
    out_ << "<g class=\"edges\">\n";
    for (const PredicateEdge& e : d_.edges) {
      if (!e.to) continue;
      const int a = d_.node_index(e.from.node);
      const int b = d_.node_index(e.to->node);
      const Point p = row_anchor(a, d_.row_index(e.from), b);
      const Point q = row_anchor(b, d_.row_index(*e.to), a);
      out_ << "<g id=\"" << e.id << "\" class=\"edge " << diagram::to_string(e.kind) << "\"" << span_attrs(e.id)
           << "><path d=\"" << path(p, q) << "\" fill=\"none\" stroke=\"" << escape(s_.edgeStroke)
           << "\" stroke-width=\"1.5\"/>";
      if (!e.opLabel.empty()) {
        out_ << "<text class=\"op\" x=\"" << num((p.x + q.x) / 2) << "\" y=\"" << num((p.y + q.y) / 2 - 3)
             << "\" text-anchor=\"middle\">" << escape(e.opLabel) << "</text>";
      }
      out_ << "</g>\n";
    }
    out_ << "</g>\n";
  }

  void arrows() {
    out_ << "<g class=\"arrows\">\n";
    for (const auto& a : d_.arrows) {
      const Rect& from = pd_.nodeRects[static_cast<std::size_t>(d_.node_index(a.from))];
      const Rect& to = pd_.nodeRects[static_cast<std::size_t>(d_.node_index(a.to))];
      Point p{px(from.right()), py(from.y + 0.5)};
      Point q{to.x > from.x ? px(to.x) : px(to.right()), py(to.y + 0.5)};
      out_ << "<path id=\"" << a.id << "\" class=\"arrow\"" << span_attrs(a.id) << " d=\"" << path(p, q)
           << "\" fill=\"none\" stroke=\"" << escape(s_.arrowStroke)
           << "\" stroke-width=\"1.5\" marker-end=\"url(#arrowhead)\"/>\n";
    }
    out_ << "</g>\n";
  }

  const PositionedDiagram& pd_;
  const Diagram& d_;
  const StyleConfig& s_;
  std::ostringstream out_;
};

}  // namespace

std::string to_svg(const PositionedDiagram& pd, const StyleConfig& style) { return SvgWriter(pd, style).run(); }

}  // namespace qviz::render
