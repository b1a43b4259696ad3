// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qviz/error.hpp"
#include "qviz/sql/resolver.hpp"
#include "qviz/value.hpp"

namespace qviz::calculus {

enum class BlockKind { Root, Exists, NotExists, ForallImplies };

std::string_view to_string(BlockKind kind);

/// One attribute of one tuple variable.
struct AttrSlot {
  int var = 0;
  std::string attr;

  friend auto operator<=>(const AttrSlot&, const AttrSlot&) = default;
};

struct Predicate {
  int id = 0;
  AttrSlot left;
  CompareOp op = CompareOp::Eq;
  std::variant<AttrSlot, Value> right;
  SourceSpan span;

  [[nodiscard]] bool is_join() const { return std::holds_alternative<AttrSlot>(right); }
};

/// A tuple variable ranging over one relation (one FROM item).
struct TableVar {
  int id = 0;  // equals the FromItem id, so stable across rebuilds
  std::string relation;
  std::string displayName;
  std::string alias;
  SourceSpan span;
  /// Attributes used by predicates or output bindings, in first-use order.
  std::vector<std::string> referencedAttrs;
};

struct QuantifierBlock {
  int id = 0;
  BlockKind kind = BlockKind::Root;
  int depth = 0;
  std::vector<TableVar> vars;
  std::vector<Predicate> predicates;
  std::vector<QuantifierBlock> children;
  SourceSpan span;
};

struct OutputColumn {
  std::string name;
  AttrSlot source;
  SourceSpan span;
};

/// Tuple-relational-calculus form of a query:
///   { q(output...) | root-block }
struct CalculusQuery {
  std::vector<OutputColumn> output;
  QuantifierBlock root;
  /// Element id ("select", "v<n>", "p<n>", "b<n>", "o<n>") -> source span.
  std::map<std::string, SourceSpan> spanMap;
};

std::string var_element_id(int var);
std::string predicate_element_id(int predicate);
std::string block_element_id(int block);
std::string output_element_id(std::size_t column);
inline constexpr const char* kSelectElementId = "select";

/// Lowers a resolved query. IN / NOT IN subqueries become EXISTS / NOT
/// EXISTS blocks with an added equality between the tested attribute and
/// the subquery's selected attribute.
CalculusQuery to_calculus(const sql::ResolvedQuery& resolved);

/// Rewrites every NOT EXISTS block whose only child is a NOT EXISTS block
/// into a forall-implies block (its predicates are the hypothesis) with an
/// EXISTS conclusion. Applied bottom-up until nothing changes.
CalculusQuery forall_transform(CalculusQuery query);

/// Maximum block depth; 0 for a conjunctive query.
int nesting_depth(const CalculusQuery& query);

/// Equality that ignores source spans and aliases.
bool same_structure(const CalculusQuery& a, const CalculusQuery& b);

/// Human-readable formula, e.g.
///   { q(person) | exists f in Frequents [ q.person = f.person and ... ] }
std::string to_formula(const CalculusQuery& query);

// --- traversal helpers ------------------------------------------------------

const TableVar* find_var(const CalculusQuery& query, int var);
const QuantifierBlock* block_of_var(const CalculusQuery& query, int var);
/// Block ids from the root down to (and including) the block owning `var`.
std::vector<int> block_path_of_var(const CalculusQuery& query, int var);
std::vector<const TableVar*> all_vars(const CalculusQuery& query);

template <typename Fn>
void for_each_block(const QuantifierBlock& block, Fn&& fn) {
  fn(block);
  for (const QuantifierBlock& child : block.children) for_each_block(child, fn);
}

/// True when every predicate only mentions variables of its own block or of
/// an ancestor block, and output columns only mention root variables.
bool scope_safe(const CalculusQuery& query);

}  // namespace qviz::calculus
