// SPDX-License-Identifier: Apache-2.0
#include <algorithm>

#include "json.hpp"
#include "qviz/calculus/database.hpp"
#include "qviz/sql/schema.hpp"

namespace qviz::calculus {

int Relation::column(std::string_view attr) const {
  auto it = std::find(attributes.begin(), attributes.end(), attr);
  return it == attributes.end() ? -1 : static_cast<int>(it - attributes.begin());
}

void Database::add_relation(std::string_view name, std::vector<std::string> attributes) {
  for (std::string& a : attributes) a = sql::lowercase(a);
  relations_[sql::lowercase(name)] = Relation{std::move(attributes), {}};
}

void Database::insert(std::string_view relation, std::vector<Value> row) {
  auto it = relations_.find(sql::lowercase(relation));
  if (it == relations_.end()) {
    throw Error(ErrorCode::SchemaMismatch, "no relation '" + std::string(relation) + "'");
  }
  if (row.size() != it->second.attributes.size()) {
    throw Error(ErrorCode::InvalidInput, "tuple arity does not match relation '" +
                                             std::string(relation) + "'");
  }
  auto& rows = it->second.rows;
  if (std::find(rows.begin(), rows.end(), row) == rows.end()) rows.push_back(std::move(row));
}

const Relation* Database::find(std::string_view name) const {
  auto it = relations_.find(sql::lowercase(name));
  return it == relations_.end() ? nullptr : &it->second;
}

Database Database::from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::InvalidInput, std::string("database is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw Error(ErrorCode::InvalidInput, "database must be a JSON object of relation -> [tuples]");
  }
  Database db;
  for (const auto& [name, tuples] : doc.items()) {
    if (!tuples.is_array()) {
      throw Error(ErrorCode::InvalidInput, "relation '" + name + "' must be an array of objects");
    }
    std::vector<std::string> attrs;
    if (!tuples.empty() && tuples.front().is_object()) {
      for (const auto& [attr, value] : tuples.front().items()) attrs.push_back(attr);
    }
    db.add_relation(name, attrs);
    const Relation& rel = *db.find(name);
    for (const auto& tuple : tuples) {
      if (!tuple.is_object() || tuple.size() != attrs.size()) {
        throw Error(ErrorCode::InvalidInput,
                    "tuples of '" + name + "' must all have the same attributes");
      }
      std::vector<Value> row(attrs.size());
      for (const auto& [attr, value] : tuple.items()) {
        const int col = rel.column(sql::lowercase(attr));
        if (col < 0) {
          throw Error(ErrorCode::InvalidInput,
                      "tuples of '" + name + "' must all have the same attributes");
        }
        if (value.is_null()) {
          throw Error(ErrorCode::NullValue,
                      "NULL in " + name + "." + attr + " (NULL values are not supported)");
        }
        if (value.is_number_integer()) {
          row[static_cast<std::size_t>(col)] = value.get<std::int64_t>();
        } else if (value.is_string()) {
          row[static_cast<std::size_t>(col)] = value.get<std::string>();
        } else {
          throw Error(ErrorCode::InvalidInput,
                      "value of " + name + "." + attr + " must be an integer or a string");
        }
      }
      db.insert(name, std::move(row));
    }
  }
  return db;
}

std::string Database::to_json() const {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const auto& [name, rel] : relations_) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : rel.rows) {
      nlohmann::ordered_json obj = nlohmann::ordered_json::object();
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (const auto* n = std::get_if<std::int64_t>(&row[i])) obj[rel.attributes[i]] = *n;
        else obj[rel.attributes[i]] = std::get<std::string>(row[i]);
      }
      rows.push_back(std::move(obj));
    }
    doc[name] = std::move(rows);
  }
  return doc.dump();
}

namespace {

using Row = std::vector<Value>;

struct ColumnRef {
  int var = 0;
  int column = 0;
};

struct CompiledPredicate {
  ColumnRef left;
  CompareOp op = CompareOp::Eq;
  bool rightIsConstant = false;
  ColumnRef right;
  Value constant;
};

struct CompiledBlock {
  BlockKind kind = BlockKind::Root;
  std::vector<int> vars;
  std::vector<const Relation*> relations;
  /// checks[i] holds the predicates that become decidable once vars[0..i-1]
  /// are bound; checks[0] only needs enclosing variables.
  std::vector<std::vector<CompiledPredicate>> checks;
  std::vector<CompiledBlock> children;
};

class Evaluator {
 public:
  Evaluator(const CalculusQuery& query, const Database& db) : db_(db) {
    int maxVar = -1;
    for (const TableVar* v : all_vars(query)) {
      maxVar = std::max(maxVar, v->id);
      relationOf_[v->id] = find_relation(*v);
    }
    env_.assign(static_cast<std::size_t>(maxVar + 1), nullptr);
    std::vector<int> bound;
    root_ = compile(query.root, bound);
    for (const OutputColumn& col : query.output) output_.push_back(resolve(col.source));
  }

  ResultSet run() {
    ResultSet result;
    enumerate(root_, 0, [&] {
      if (!children_hold(root_)) return false;
      Tuple t;
      t.reserve(output_.size());
      for (const ColumnRef& c : output_) t.push_back(cell(c));
      result.insert(std::move(t));
      return false;
    });
    return result;
  }

 private:
  const Relation* find_relation(const TableVar& v) const {
    const Relation* rel = db_.find(v.relation);
    if (rel == nullptr) {
      throw Error(ErrorCode::SchemaMismatch,
                  "database has no relation '" + v.displayName + "'", v.span);
    }
    return rel;
  }

  ColumnRef resolve(const AttrSlot& slot) const {
    const Relation* rel = relationOf_.at(slot.var);
    const int col = rel->column(slot.attr);
    if (col < 0) {
      // An empty relation declared without attributes can never be read.
      if (rel->rows.empty() && rel->attributes.empty()) return ColumnRef{slot.var, -1};
      throw Error(ErrorCode::SchemaMismatch, "database relation has no attribute '" +
                                                 slot.attr + "'");
    }
    return ColumnRef{slot.var, col};
  }

  CompiledBlock compile(const QuantifierBlock& block, std::vector<int>& bound) {
    CompiledBlock out;
    out.kind = block.kind;
    for (const TableVar& v : block.vars) {
      out.vars.push_back(v.id);
      out.relations.push_back(relationOf_.at(v.id));
    }
    out.checks.resize(block.vars.size() + 1);
    const std::size_t outer = bound.size();
    for (const TableVar& v : block.vars) bound.push_back(v.id);

    auto position = [&](int var) -> std::size_t {
      for (std::size_t i = 0; i < block.vars.size(); ++i) {
        if (block.vars[i].id == var) return i + 1;
      }
      return 0;
    };
    for (const Predicate& p : block.predicates) {
      CompiledPredicate c;
      c.left = resolve(p.left);
      c.op = p.op;
      std::size_t ready = position(p.left.var);
      if (const auto* s = std::get_if<AttrSlot>(&p.right)) {
        c.right = resolve(*s);
        ready = std::max(ready, position(s->var));
      } else {
        c.rightIsConstant = true;
        c.constant = std::get<Value>(p.right);
      }
      out.checks[ready].push_back(std::move(c));
    }
    for (const QuantifierBlock& child : block.children) out.children.push_back(compile(child, bound));
    bound.resize(outer);
    return out;
  }

  [[nodiscard]] const Value& cell(const ColumnRef& c) const {
    return (*env_[static_cast<std::size_t>(c.var)])[static_cast<std::size_t>(c.column)];
  }

  [[nodiscard]] bool holds(const std::vector<CompiledPredicate>& preds) const {
    for (const CompiledPredicate& p : preds) {
      const Value& left = cell(p.left);
      const Value& right = p.rightIsConstant ? p.constant : cell(p.right);
      if (!compare(left, p.op, right)) return false;
    }
    return true;
  }

  /// Calls `visit` for every assignment of the block's variables that
  /// satisfies its local predicates; stops early when `visit` returns true.
  template <typename Visit>
  bool enumerate(const CompiledBlock& block, std::size_t i, Visit&& visit) {
    if (i == 0 && !holds(block.checks[0])) return false;
    if (i == block.vars.size()) return visit();
    const auto slot = static_cast<std::size_t>(block.vars[i]);
    for (const Row& row : block.relations[i]->rows) {
      env_[slot] = &row;
      if (holds(block.checks[i + 1]) && enumerate(block, i + 1, visit)) {
        env_[slot] = nullptr;
        return true;
      }
    }
    env_[slot] = nullptr;
    return false;
  }

  bool satisfiable(const CompiledBlock& block) {
    return enumerate(block, 0, [&] { return children_hold(block); });
  }

  bool children_hold(const CompiledBlock& block) {
    for (const CompiledBlock& child : block.children) {
      if (!block_holds(child)) return false;
    }
    return true;
  }

  bool block_holds(const CompiledBlock& block) {
    switch (block.kind) {
      case BlockKind::Exists:
        return satisfiable(block);
      case BlockKind::NotExists:
        return !satisfiable(block);
      case BlockKind::ForallImplies:
        // A counterexample satisfies the hypothesis but not the conclusion.
        return !enumerate(block, 0, [&] { return !children_hold(block); });
      case BlockKind::Root:
        break;
    }
    return satisfiable(block);
  }

  const Database& db_;
  std::map<int, const Relation*> relationOf_;
  std::vector<const Row*> env_;
  CompiledBlock root_;
  std::vector<ColumnRef> output_;
};

}  // namespace

ResultSet evaluate(const CalculusQuery& query, const Database& db) {
  return Evaluator(query, db).run();
}

}  // namespace qviz::calculus
