// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qviz/sql/ast.hpp"
#include "qviz/sql/schema.hpp"

namespace qviz::sql {

struct Warning {
  std::string message;
  SourceSpan span;
};

/// A parsed query whose attribute references all carry a binding to a
/// FromItem, together with the schema they were checked against.
struct ResolvedQuery {
  SelectQuery ast;
  Schema schema;
  bool schemaInferred = false;
  std::vector<Warning> warnings;
};

/// Binds every attribute reference. With a schema, references are checked
/// against it; without one, the minimal schema implied by the query is
/// inferred. Throws UnknownRelation, UnknownAttribute, AmbiguousAttribute or
/// DuplicateAlias.
ResolvedQuery resolve(SelectQuery ast, const std::optional<Schema>& schema = std::nullopt);

/// Resolves again under the same schema mode; a no-op on resolver output.
ResolvedQuery resolve(const ResolvedQuery& resolved);

/// Convenience: parse + resolve.
ResolvedQuery parse_and_resolve(std::string_view source,
                                const std::optional<Schema>& schema = std::nullopt);

/// Finds a FromItem by id anywhere in the query; nullptr if absent.
const FromItem* find_from_item(const SelectQuery& query, int id);

}  // namespace qviz::sql
