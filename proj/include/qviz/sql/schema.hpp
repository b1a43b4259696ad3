// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace qviz::sql {

/// Relation name -> ordered attribute names, all lower-cased.
class Schema {
 public:
  Schema() = default;

  /// Adds a relation; throws InvalidInput on duplicate relation or attribute.
  void add_relation(std::string_view name, const std::vector<std::string>& attributes);
  /// Appends `attribute` to `relation` (creating it) unless already present.
  void add_attribute(std::string_view relation, std::string_view attribute);

  [[nodiscard]] bool has_relation(std::string_view name) const;
  [[nodiscard]] bool has_attribute(std::string_view relation, std::string_view attribute) const;
  [[nodiscard]] const std::vector<std::string>& attributes(std::string_view relation) const;
  [[nodiscard]] const std::map<std::string, std::vector<std::string>>& relations() const {
    return relations_;
  }
  [[nodiscard]] bool empty() const { return relations_.empty(); }

  /// Parses `{"Relation": ["attr", ...], ...}`.
  static Schema from_json(std::string_view text);
  [[nodiscard]] std::string to_json() const;

  friend bool operator==(const Schema&, const Schema&) = default;

 private:
  std::map<std::string, std::vector<std::string>> relations_;
};

std::string lowercase(std::string_view text);

}  // namespace qviz::sql
