// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "qviz/calculus/calculus.hpp"
#include "qviz/value.hpp"

namespace qviz::calculus {

/// A set of tuples over a fixed attribute list.
struct Relation {
  std::vector<std::string> attributes;
  std::vector<std::vector<Value>> rows;

  /// Index of `attr` in `attributes`, or -1.
  [[nodiscard]] int column(std::string_view attr) const;
};

/// Small NULL-free database instance used as a semantic oracle.
class Database {
 public:
  /// Declares a relation. Attribute names are lower-cased.
  void add_relation(std::string_view name, std::vector<std::string> attributes);
  /// Inserts a tuple (set semantics: duplicates are ignored).
  void insert(std::string_view relation, std::vector<Value> row);

  [[nodiscard]] const Relation* find(std::string_view name) const;
  [[nodiscard]] const std::map<std::string, Relation>& relations() const { return relations_; }

  /// `{"R": [{"a": 1, "b": "x"}, ...], ...}`. Rejects nulls (NullValue) and
  /// tuples whose attribute set differs from their relation's (InvalidInput).
  static Database from_json(std::string_view text);
  [[nodiscard]] std::string to_json() const;

 private:
  std::map<std::string, Relation> relations_;
};

using Tuple = std::vector<Value>;
using ResultSet = std::set<Tuple>;

/// Brute-force set semantics over all variable assignments. Throws
/// SchemaMismatch when `db` lacks a referenced relation or attribute.
ResultSet evaluate(const CalculusQuery& query, const Database& db);

}  // namespace qviz::calculus
