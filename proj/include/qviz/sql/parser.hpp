// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>

#include "qviz/sql/ast.hpp"

namespace qviz::sql {

/// Parses one query of the supported subset:
///
///   SELECT [DISTINCT] (* | attr [AS name], ...)
///   FROM relation [[AS] alias], ...
///   [WHERE conjunct AND conjunct ...]
///
/// where a conjunct is a comparison, [NOT] EXISTS (subquery) or
/// attr [NOT] IN (subquery). Throws ParseError or UnsupportedFeature.
SelectQuery parse(std::string_view source);

/// Pretty-prints a query so that parse(to_sql(q)) has the same structure.
std::string to_sql(const SelectQuery& query);

}  // namespace qviz::sql
