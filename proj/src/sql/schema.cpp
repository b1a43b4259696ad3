// SPDX-License-Identifier: Apache-2.0
#include "qviz/sql/schema.hpp"

#include <algorithm>
#include <cctype>

#include "json.hpp"

#include "qviz/error.hpp"

namespace qviz::sql {

std::string lowercase(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

void Schema::add_relation(std::string_view name, const std::vector<std::string>& attributes) {
  const std::string key = lowercase(name);
  if (relations_.count(key) != 0) {
    throw Error(ErrorCode::InvalidInput, "duplicate relation '" + key + "' in schema");
  }
  std::vector<std::string> attrs;
  for (const std::string& a : attributes) {
    std::string lowered = lowercase(a);
    if (std::find(attrs.begin(), attrs.end(), lowered) != attrs.end()) {
      throw Error(ErrorCode::InvalidInput,
                  "duplicate attribute '" + lowered + "' in relation '" + key + "'");
    }
    attrs.push_back(std::move(lowered));
  }
  relations_.emplace(key, std::move(attrs));
}

void Schema::add_attribute(std::string_view relation, std::string_view attribute) {
  auto& attrs = relations_[lowercase(relation)];
  std::string lowered = lowercase(attribute);
  if (std::find(attrs.begin(), attrs.end(), lowered) == attrs.end()) {
    attrs.push_back(std::move(lowered));
  }
}

bool Schema::has_relation(std::string_view name) const {
  return relations_.count(lowercase(name)) != 0;
}

bool Schema::has_attribute(std::string_view relation, std::string_view attribute) const {
  auto it = relations_.find(lowercase(relation));
  if (it == relations_.end()) return false;
  const std::string lowered = lowercase(attribute);
  return std::find(it->second.begin(), it->second.end(), lowered) != it->second.end();
}

const std::vector<std::string>& Schema::attributes(std::string_view relation) const {
  auto it = relations_.find(lowercase(relation));
  if (it == relations_.end()) {
    throw Error(ErrorCode::UnknownRelation, "unknown relation '" + std::string(relation) + "'");
  }
  return it->second;
}

Schema Schema::from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::InvalidInput, std::string("schema is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw Error(ErrorCode::InvalidInput, "schema must be a JSON object of relation -> [attributes]");
  }
  Schema schema;
  for (const auto& [name, attrs] : doc.items()) {
    if (!attrs.is_array()) {
      throw Error(ErrorCode::InvalidInput, "schema entry '" + name + "' must be an array");
    }
    std::vector<std::string> list;
    for (const auto& a : attrs) {
      if (!a.is_string()) {
        throw Error(ErrorCode::InvalidInput, "attribute names of '" + name + "' must be strings");
      }
      list.push_back(a.get<std::string>());
    }
    schema.add_relation(name, list);
  }
  return schema;
}

std::string Schema::to_json() const {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const auto& [name, attrs] : relations_) doc[name] = attrs;
  return doc.dump();
}

}  // namespace qviz::sql
