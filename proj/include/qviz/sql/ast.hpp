// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qviz/error.hpp"
#include "qviz/value.hpp"

namespace qviz::sql {

/// Owning pointer with value semantics, used to break the recursion between
/// a query block and the subqueries in its WHERE clause.
template <typename T>
class Box {
 public:
  Box() : ptr_(std::make_unique<T>()) {}
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}  // NOLINT(implicit)
  Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;
  ~Box() = default;

  T& operator*() { return *ptr_; }
  const T& operator*() const { return *ptr_; }
  T* operator->() { return ptr_.get(); }
  const T* operator->() const { return ptr_.get(); }

 private:
  std::unique_ptr<T> ptr_;
};

/// `alias.attr` or a bare `attr`. Names are lower-cased.
struct AttrRef {
  std::string qualifier;  // as written; empty when unqualified
  std::string name;
  SourceSpan span;
  /// FromItem::id this reference is bound to; set by resolve().
  std::optional<int> binding;
};

struct Literal {
  Value value;
  SourceSpan span;
};

using Operand = std::variant<AttrRef, Literal>;

struct SelectQuery;

struct Comparison {
  AttrRef left;
  CompareOp op = CompareOp::Eq;
  Operand right;
  SourceSpan span;
};

struct ExistsPredicate {
  bool negated = false;
  Box<SelectQuery> subquery;
  SourceSpan span;
};

struct InPredicate {
  bool negated = false;
  AttrRef test;
  Box<SelectQuery> subquery;
  SourceSpan span;
};

using Conjunct = std::variant<Comparison, ExistsPredicate, InPredicate>;

struct SelectItem {
  AttrRef attr;
  std::string outputName;  // from `AS name`; empty if absent
  SourceSpan span;
};

struct FromItem {
  /// Unique across the whole query, assigned in source order.
  int id = 0;
  std::string relation;     // lower-cased
  std::string displayName;  // relation as written
  std::string alias;        // lower-cased; defaults to the relation name
  bool explicitAlias = false;
  SourceSpan span;
};

struct SelectQuery {
  bool distinct = false;
  /// `SELECT *`; inside EXISTS it projects nothing.
  bool star = false;
  std::vector<SelectItem> select;
  std::vector<FromItem> from;
  std::vector<Conjunct> where;
  SourceSpan span;        // whole block, parentheses excluded
  SourceSpan selectSpan;  // `select ... ` up to (excluding) FROM
};

/// Spans are ignored; everything else must match.
bool same_structure(const SelectQuery& a, const SelectQuery& b);

/// Visits every query block in pre-order (the block itself, then the
/// subqueries of its WHERE clause in order).
template <typename Fn>
void for_each_block(const SelectQuery& query, Fn&& fn) {
  fn(query);
  for (const Conjunct& c : query.where) {
    if (const auto* e = std::get_if<ExistsPredicate>(&c)) for_each_block(*e->subquery, fn);
    if (const auto* in = std::get_if<InPredicate>(&c)) for_each_block(*in->subquery, fn);
  }
}

}  // namespace qviz::sql
