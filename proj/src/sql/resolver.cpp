// SPDX-License-Identifier: Apache-2.0
#include "qviz/sql/resolver.hpp"

#include <functional>
#include <set>

#include "qviz/sql/parser.hpp"

namespace qviz::sql {

namespace {

using Scope = std::vector<std::vector<const FromItem*>>;

/// Walks every attribute reference in source order, handing the visitor the
/// scope in effect at that point.
class RefWalker {
 public:
  using Visitor = std::function<void(AttrRef&, const Scope&)>;
  using BlockVisitor = std::function<void(SelectQuery&, const Scope&)>;

  RefWalker(Visitor visit, BlockVisitor on_block = {})
      : visit_(std::move(visit)), on_block_(std::move(on_block)) {}

  void walk(SelectQuery& query) {
    Scope scope;
    walk(query, scope);
  }

 private:
  void walk(SelectQuery& query, Scope& scope) {
    std::vector<const FromItem*> level;
    for (const FromItem& item : query.from) level.push_back(&item);
    scope.push_back(std::move(level));
    if (on_block_) on_block_(query, scope);
    for (SelectItem& item : query.select) visit_(item.attr, scope);
    for (Conjunct& c : query.where) {
      if (auto* cmp = std::get_if<Comparison>(&c)) {
        visit_(cmp->left, scope);
        if (auto* r = std::get_if<AttrRef>(&cmp->right)) visit_(*r, scope);
      } else if (auto* ex = std::get_if<ExistsPredicate>(&c)) {
        walk(*ex->subquery, scope);
      } else {
        auto& in = std::get<InPredicate>(c);
        visit_(in.test, scope);
        walk(*in.subquery, scope);
      }
    }
    scope.pop_back();
  }

  Visitor visit_;
  BlockVisitor on_block_;
};

const FromItem* find_alias(const Scope& scope, const std::string& alias) {
  for (auto level = scope.rbegin(); level != scope.rend(); ++level) {
    for (const FromItem* item : *level) {
      if (item->alias == alias) return item;
    }
  }
  return nullptr;
}

[[noreturn]] void unknown_alias(const AttrRef& ref) {
  throw Error(ErrorCode::UnknownRelation,
              "unknown table or alias '" + ref.qualifier + "'",
              SourceSpan{ref.span.start, ref.span.start + ref.qualifier.size()});
}

void check_aliases(const SelectQuery& query) {
  for_each_block(query, [](const SelectQuery& block) {
    std::set<std::string> seen;
    for (const FromItem& item : block.from) {
      if (!seen.insert(item.alias).second) {
        throw Error(ErrorCode::DuplicateAlias,
                    "alias '" + item.alias + "' is used twice in one FROM clause", item.span);
      }
    }
  });
}

std::string describe(const std::vector<const FromItem*>& candidates) {
  std::string out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (i > 0) out += ", ";
    out += candidates[i]->alias;
  }
  return out;
}

[[noreturn]] void ambiguous(const AttrRef& ref, const std::vector<const FromItem*>& candidates) {
  throw Error(ErrorCode::AmbiguousAttribute,
              "attribute '" + ref.name + "' is ambiguous between " + describe(candidates),
              ref.span);
}

void bind_with_schema(SelectQuery& ast, const Schema& schema) {
  for_each_block(ast, [&](const SelectQuery& block) {
    for (const FromItem& item : block.from) {
      if (!schema.has_relation(item.relation)) {
        throw Error(ErrorCode::UnknownRelation, "unknown relation '" + item.displayName + "'",
                    item.span);
      }
    }
  });

  RefWalker walker([&](AttrRef& ref, const Scope& scope) {
    if (!ref.qualifier.empty()) {
      const FromItem* item = find_alias(scope, ref.qualifier);
      if (item == nullptr) unknown_alias(ref);
      if (!schema.has_attribute(item->relation, ref.name)) {
        throw Error(ErrorCode::UnknownAttribute,
                    "relation '" + item->displayName + "' has no attribute '" + ref.name + "'",
                    ref.span);
      }
      ref.binding = item->id;
      return;
    }
    std::vector<const FromItem*> candidates;
    for (const auto& level : scope) {
      for (const FromItem* item : level) {
        if (schema.has_attribute(item->relation, ref.name)) candidates.push_back(item);
      }
    }
    if (candidates.empty()) {
      throw Error(ErrorCode::UnknownAttribute,
                  "no relation in scope has attribute '" + ref.name + "'", ref.span);
    }
    if (candidates.size() > 1) ambiguous(ref, candidates);
    ref.binding = candidates.front()->id;
  });
  walker.walk(ast);
}

/// Without a schema: qualified references define what each relation is
/// known to contain; unqualified ones bind to the unique in-scope relation
/// known to have the attribute, else to the innermost block when it has a
/// single FROM item.
void bind_inferring(SelectQuery& ast) {
  Schema known;
  RefWalker qualified([&](AttrRef& ref, const Scope& scope) {
    if (ref.qualifier.empty()) return;
    const FromItem* item = find_alias(scope, ref.qualifier);
    if (item == nullptr) unknown_alias(ref);
    ref.binding = item->id;
    known.add_attribute(item->relation, ref.name);
  });
  qualified.walk(ast);

  RefWalker unqualified([&](AttrRef& ref, const Scope& scope) {
    if (!ref.qualifier.empty()) return;
    std::vector<const FromItem*> candidates;
    for (const auto& level : scope) {
      for (const FromItem* item : level) {
        if (known.has_attribute(item->relation, ref.name)) candidates.push_back(item);
      }
    }
    if (candidates.size() == 1) {
      ref.binding = candidates.front()->id;
      return;
    }
    if (candidates.size() > 1) ambiguous(ref, candidates);
    const auto& innermost = scope.back();
    if (innermost.size() != 1) {
      std::vector<const FromItem*> all;
      for (const auto& level : scope) all.insert(all.end(), level.begin(), level.end());
      ambiguous(ref, all);
    }
    ref.binding = innermost.front()->id;
    known.add_attribute(innermost.front()->relation, ref.name);
  });
  unqualified.walk(ast);
}

Schema infer_schema(SelectQuery& ast) {
  Schema schema;
  std::map<int, std::string> relationOf;
  for_each_block(ast, [&](const SelectQuery& block) {
    for (const FromItem& item : block.from) relationOf[item.id] = item.relation;
  });
  // Touch relations in FROM order so attribute-less relations still appear.
  for_each_block(ast, [&](const SelectQuery& block) {
    for (const FromItem& item : block.from) {
      if (!schema.has_relation(item.relation)) schema.add_relation(item.relation, {});
    }
  });
  RefWalker collect([&](AttrRef& ref, const Scope&) {
    schema.add_attribute(relationOf.at(*ref.binding), ref.name);
  });
  collect.walk(ast);
  return schema;
}

void expand_star(SelectQuery& ast, const Schema& schema) {
  if (!ast.star) return;
  ast.star = false;
  for (const FromItem& item : ast.from) {
    for (const std::string& attr : schema.attributes(item.relation)) {
      SelectItem sel;
      sel.attr.qualifier = item.alias;
      sel.attr.name = attr;
      sel.attr.span = ast.selectSpan;
      sel.attr.binding = item.id;
      sel.span = ast.selectSpan;
      ast.select.push_back(std::move(sel));
    }
  }
}

}  // namespace

ResolvedQuery resolve(SelectQuery ast, const std::optional<Schema>& schema) {
  check_aliases(ast);
  ResolvedQuery out;
  if (schema) {
    bind_with_schema(ast, *schema);
    out.schema = *schema;
  } else {
    bind_inferring(ast);
    out.schema = infer_schema(ast);
    out.schemaInferred = true;
  }
  expand_star(ast, out.schema);
  if (!ast.distinct) {
    out.warnings.push_back(
        {"SELECT without DISTINCT is interpreted under set semantics", ast.selectSpan});
  }
  out.ast = std::move(ast);
  return out;
}

ResolvedQuery resolve(const ResolvedQuery& resolved) {
  if (resolved.schemaInferred) return resolve(resolved.ast, std::nullopt);
  return resolve(resolved.ast, resolved.schema);
}

ResolvedQuery parse_and_resolve(std::string_view source, const std::optional<Schema>& schema) {
  return resolve(parse(source), schema);
}

const FromItem* find_from_item(const SelectQuery& query, int id) {
  const FromItem* found = nullptr;
  for_each_block(query, [&](const SelectQuery& block) {
    for (const FromItem& item : block.from) {
      if (item.id == id) found = &item;
    }
  });
  return found;
}

}  // namespace qviz::sql
