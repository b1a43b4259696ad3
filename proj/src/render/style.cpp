// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "qviz/render/render.hpp"

namespace qviz::render {

namespace {

template <typename T>
struct Field {
  const char* key;
  T StyleConfig::*member;
};

constexpr Field<double> kNumbers[] = {
    {"pxPerUnitX", &StyleConfig::pxPerUnitX}, {"pxPerUnitY", &StyleConfig::pxPerUnitY},
    {"margin", &StyleConfig::margin},         {"fontSize", &StyleConfig::fontSize},
    {"doubleGap", &StyleConfig::doubleGap},   {"shadeOpacity", &StyleConfig::shadeOpacity},
};

constexpr Field<std::string> kStrings[] = {
    {"fontFamily", &StyleConfig::fontFamily}, {"stroke", &StyleConfig::stroke},
    {"tableFill", &StyleConfig::tableFill},   {"titleFill", &StyleConfig::titleFill},
    {"edgeStroke", &StyleConfig::edgeStroke}, {"arrowStroke", &StyleConfig::arrowStroke},
    {"dashPattern", &StyleConfig::dashPattern}, {"shadeFill0", &StyleConfig::shadeFill0},
    {"shadeFill1", &StyleConfig::shadeFill1},
};

}  // namespace

StyleConfig StyleConfig::from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::InvalidInput, std::string("style: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::InvalidInput, "style: expected a JSON object");
  StyleConfig style;
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const auto& f : kNumbers) {
      if (key != f.key) continue;
      if (!value.is_number()) throw Error(ErrorCode::InvalidInput, "style: '" + key + "' must be a number");
      style.*f.member = value.get<double>();
      known = true;
    }
    for (const auto& f : kStrings) {
      if (key != f.key) continue;
      if (!value.is_string()) throw Error(ErrorCode::InvalidInput, "style: '" + key + "' must be a string");
      style.*f.member = value.get<std::string>();
      known = true;
    }
    if (!known) throw Error(ErrorCode::InvalidInput, "style: unknown key '" + key + "'");
  }
  if (style.pxPerUnitX <= 0 || style.pxPerUnitY <= 0) {
    throw Error(ErrorCode::InvalidInput, "style: scale factors must be positive");
  }
  return style;
}

StyleConfig StyleConfig::from_environment() {
  const char* path = std::getenv("QVIZ_STYLE");
  if (path == nullptr || *path == '\0') return {};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidInput, std::string("cannot read style file ") + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

}  // namespace qviz::render
