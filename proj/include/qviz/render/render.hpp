// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "qviz/layout/layout.hpp"

namespace qviz::render {

/// Visual constants. Every field may be overridden from a JSON object with
/// the same keys; unknown keys are rejected.
struct StyleConfig {
  double pxPerUnitX = 8;
  double pxPerUnitY = 20;
  double margin = 16;
  std::string fontFamily = "monospace";
  double fontSize = 13;
  std::string stroke = "#333333";
  std::string tableFill = "#ffffff";
  std::string titleFill = "#e8eef7";
  std::string edgeStroke = "#4a6fa5";
  std::string arrowStroke = "#a04040";
  std::string dashPattern = "6 4";
  double doubleGap = 3;
  /// Fill per shade index for negation boxes.
  std::string shadeFill0 = "#ffffff";
  std::string shadeFill1 = "#d9d9d9";
  double shadeOpacity = 0.6;

  static StyleConfig from_json(std::string_view text);
  /// Reads the file named by QVIZ_STYLE when set, defaults otherwise.
  static StyleConfig from_environment();

  friend bool operator==(const StyleConfig&, const StyleConfig&) = default;
};

/// SVG 1.1 document. Ids: "select", "t<n>" for tables, "e<n>" edges,
/// "g<n>" groups, "a<n>" arrows; each element carries data-span-start and
/// data-span-end. Rectangles are the layout rectangles scaled by the style.
std::string to_svg(const layout::PositionedDiagram& pd, const StyleConfig& style = {});

/// Graphviz digraph: record nodes with one port per attribute row,
/// clusters for groups, undirected predicate lines, directed arrows.
std::string to_dot(const diagram::Diagram& d);

inline constexpr const char* kInterchangeVersion = "1";

/// JSON document (see docs/diagram-schema.json).
std::string to_interchange(const layout::PositionedDiagram& pd);

/// Inverse of to_interchange. VersionError on a different version,
/// InvalidInput on anything malformed.
layout::PositionedDiagram from_interchange(std::string_view text);

}  // namespace qviz::render
