// SPDX-License-Identifier: Apache-2.0
#include "qviz/calculus/calculus.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <tuple>

namespace qviz::calculus {

std::string_view to_string(BlockKind kind) {
  switch (kind) {
    case BlockKind::Root: return "root";
    case BlockKind::Exists: return "exists";
    case BlockKind::NotExists: return "not-exists";
    case BlockKind::ForallImplies: return "forall-implies";
  }
  return "?";
}

std::string var_element_id(int var) { return "v" + std::to_string(var); }
std::string predicate_element_id(int predicate) { return "p" + std::to_string(predicate); }
std::string block_element_id(int block) { return "b" + std::to_string(block); }
std::string output_element_id(std::size_t column) { return "o" + std::to_string(column); }

namespace {

struct Reference {
  std::size_t offset;
  int var;
  std::string attr;
};

class Lowering {
 public:
  explicit Lowering(const sql::ResolvedQuery& resolved) : resolved_(resolved) {}

  CalculusQuery run() {
    const sql::SelectQuery& ast = resolved_.ast;
    CalculusQuery query;
    query.spanMap[kSelectElementId] = ast.selectSpan;

    std::map<std::string, int> seen;
    for (std::size_t i = 0; i < ast.select.size(); ++i) {
      const sql::SelectItem& item = ast.select[i];
      std::string name = item.outputName.empty() ? item.attr.name : item.outputName;
      const int count = ++seen[name];
      if (count > 1) name += "_" + std::to_string(count);
      query.output.push_back({name, slot(item.attr), item.span});
      query.spanMap[output_element_id(i)] = item.span;
      note(item.attr);
    }

    query.root = lower_block(ast, BlockKind::Root, 0, ast.span, nullptr, query);

    std::stable_sort(refs_.begin(), refs_.end(),
                     [](const Reference& a, const Reference& b) { return a.offset < b.offset; });
    std::map<int, TableVar*> vars;
    std::function<void(QuantifierBlock&)> index = [&](QuantifierBlock& block) {
      for (TableVar& v : block.vars) vars[v.id] = &v;
      for (QuantifierBlock& child : block.children) index(child);
    };
    index(query.root);
    for (const Reference& r : refs_) {
      auto& attrs = vars.at(r.var)->referencedAttrs;
      if (std::find(attrs.begin(), attrs.end(), r.attr) == attrs.end()) attrs.push_back(r.attr);
    }
    return query;
  }

 private:
  static AttrSlot slot(const sql::AttrRef& ref) {
    if (!ref.binding) {
      throw Error(ErrorCode::InvalidInput, "attribute reference '" + ref.name + "' is unresolved",
                  ref.span);
    }
    return AttrSlot{*ref.binding, ref.name};
  }

  void note(const sql::AttrRef& ref) { refs_.push_back({ref.span.start, *ref.binding, ref.name}); }

  Predicate make_predicate(const AttrSlot& left, CompareOp op, std::variant<AttrSlot, Value> right,
                           SourceSpan span, CalculusQuery& query) {
    Predicate p;
    p.id = next_predicate_++;
    p.left = left;
    p.op = op;
    p.right = std::move(right);
    p.span = span;
    query.spanMap[predicate_element_id(p.id)] = span;
    return p;
  }

  QuantifierBlock lower_block(const sql::SelectQuery& sub, BlockKind kind, int depth,
                              SourceSpan span, const sql::InPredicate* viaIn,
                              CalculusQuery& query) {
    QuantifierBlock block;
    block.id = next_block_++;
    block.kind = kind;
    block.depth = depth;
    block.span = span;
    query.spanMap[block_element_id(block.id)] = span;

    for (const sql::FromItem& item : sub.from) {
      TableVar v;
      v.id = item.id;
      v.relation = item.relation;
      v.displayName = item.displayName;
      v.alias = item.alias;
      v.span = item.span;
      query.spanMap[var_element_id(v.id)] = item.span;
      block.vars.push_back(std::move(v));
    }

    if (viaIn != nullptr) {
      const sql::AttrRef& selected = sub.select.front().attr;
      block.predicates.push_back(make_predicate(slot(viaIn->test), CompareOp::Eq, slot(selected),
                                                viaIn->span, query));
      note(viaIn->test);
      note(selected);
    }

    for (const sql::Conjunct& c : sub.where) {
      if (const auto* cmp = std::get_if<sql::Comparison>(&c)) {
        note(cmp->left);
        std::variant<AttrSlot, Value> right;
        if (const auto* attr = std::get_if<sql::AttrRef>(&cmp->right)) {
          right = slot(*attr);
          note(*attr);
        } else {
          right = std::get<sql::Literal>(cmp->right).value;
        }
        block.predicates.push_back(
            make_predicate(slot(cmp->left), cmp->op, std::move(right), cmp->span, query));
      } else if (const auto* ex = std::get_if<sql::ExistsPredicate>(&c)) {
        block.children.push_back(lower_block(*ex->subquery,
                                             ex->negated ? BlockKind::NotExists : BlockKind::Exists,
                                             depth + 1, ex->span, nullptr, query));
      } else {
        const auto& in = std::get<sql::InPredicate>(c);
        block.children.push_back(lower_block(*in.subquery,
                                             in.negated ? BlockKind::NotExists : BlockKind::Exists,
                                             depth + 1, in.span, &in, query));
      }
    }
    return block;
  }

  const sql::ResolvedQuery& resolved_;
  std::vector<Reference> refs_;
  int next_predicate_ = 0;
  int next_block_ = 0;
};

bool rewrite_forall(QuantifierBlock& block) {
  bool changed = false;
  for (QuantifierBlock& child : block.children) changed |= rewrite_forall(child);
  if (block.kind == BlockKind::NotExists && block.children.size() == 1 &&
      block.children.front().kind == BlockKind::NotExists) {
    block.kind = BlockKind::ForallImplies;
    block.children.front().kind = BlockKind::Exists;
    changed = true;
  }
  return changed;
}

int max_depth(const QuantifierBlock& block) {
  int depth = block.depth;
  for (const QuantifierBlock& child : block.children) depth = std::max(depth, max_depth(child));
  return depth;
}

bool same_predicate(const Predicate& a, const Predicate& b) {
  return a.id == b.id && a.left == b.left && a.op == b.op && a.right == b.right;
}

bool same_block(const QuantifierBlock& a, const QuantifierBlock& b) {
  if (a.id != b.id || a.kind != b.kind || a.depth != b.depth || a.vars.size() != b.vars.size() ||
      a.predicates.size() != b.predicates.size() || a.children.size() != b.children.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.vars.size(); ++i) {
    const TableVar& x = a.vars[i];
    const TableVar& y = b.vars[i];
    if (x.id != y.id || x.relation != y.relation || x.referencedAttrs != y.referencedAttrs) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.predicates.size(); ++i) {
    if (!same_predicate(a.predicates[i], b.predicates[i])) return false;
  }
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!same_block(a.children[i], b.children[i])) return false;
  }
  return true;
}

std::string var_name(const CalculusQuery& q, int var) {
  const TableVar* v = find_var(q, var);
  return v != nullptr ? v->alias : "?" + std::to_string(var);
}

std::string slot_text(const CalculusQuery& q, const AttrSlot& s) {
  return var_name(q, s.var) + "." + s.attr;
}

void formula_block(std::ostream& out, const CalculusQuery& q, const QuantifierBlock& block,
                   bool first) {
  std::vector<std::string> parts;
  for (const Predicate& p : block.predicates) {
    std::string text = slot_text(q, p.left) + " " + std::string(to_string(p.op)) + " ";
    if (const auto* s = std::get_if<AttrSlot>(&p.right)) text += slot_text(q, *s);
    else text += to_literal(std::get<Value>(p.right));
    parts.push_back(std::move(text));
  }
  const bool forall = block.kind == BlockKind::ForallImplies;
  bool any = !first;
  for (const std::string& part : parts) {
    out << (any ? " and " : " ") << part;
    any = true;
  }
  for (std::size_t i = 0; i < block.children.size(); ++i) {
    const QuantifierBlock& child = block.children[i];
    if (forall && i == 0) out << (any ? " -> " : " true -> ");
    else out << (any ? " and " : " ");
    any = true;
    switch (child.kind) {
      case BlockKind::NotExists: out << "not exists "; break;
      case BlockKind::ForallImplies: out << "forall "; break;
      default: out << "exists "; break;
    }
    for (std::size_t v = 0; v < child.vars.size(); ++v) {
      if (v > 0) out << ", ";
      out << child.vars[v].alias << " in " << child.vars[v].displayName;
    }
    out << " [";
    formula_block(out, q, child, true);
    out << " ]";
  }
}

}  // namespace

CalculusQuery to_calculus(const sql::ResolvedQuery& resolved) { return Lowering(resolved).run(); }

CalculusQuery forall_transform(CalculusQuery query) {
  while (rewrite_forall(query.root)) {
  }
  return query;
}

int nesting_depth(const CalculusQuery& query) { return max_depth(query.root); }

bool same_structure(const CalculusQuery& a, const CalculusQuery& b) {
  if (a.output.size() != b.output.size()) return false;
  for (std::size_t i = 0; i < a.output.size(); ++i) {
    if (a.output[i].name != b.output[i].name || a.output[i].source != b.output[i].source) {
      return false;
    }
  }
  return same_block(a.root, b.root);
}

std::string to_formula(const CalculusQuery& query) {
  std::ostringstream out;
  out << "{ q(";
  for (std::size_t i = 0; i < query.output.size(); ++i) {
    if (i > 0) out << ", ";
    out << query.output[i].name;
  }
  out << ") | exists ";
  for (std::size_t v = 0; v < query.root.vars.size(); ++v) {
    if (v > 0) out << ", ";
    out << query.root.vars[v].alias << " in " << query.root.vars[v].displayName;
  }
  out << " [";
  bool first = true;
  for (const OutputColumn& col : query.output) {
    out << (first ? " " : " and ") << "q." << col.name << " = " << slot_text(query, col.source);
    first = false;
  }
  formula_block(out, query, query.root, first);
  out << " ] }";
  return out.str();
}

const TableVar* find_var(const CalculusQuery& query, int var) {
  const TableVar* found = nullptr;
  for_each_block(query.root, [&](const QuantifierBlock& block) {
    for (const TableVar& v : block.vars) {
      if (v.id == var) found = &v;
    }
  });
  return found;
}

const QuantifierBlock* block_of_var(const CalculusQuery& query, int var) {
  const QuantifierBlock* found = nullptr;
  for_each_block(query.root, [&](const QuantifierBlock& block) {
    for (const TableVar& v : block.vars) {
      if (v.id == var) found = &block;
    }
  });
  return found;
}

std::vector<int> block_path_of_var(const CalculusQuery& query, int var) {
  std::vector<int> path;
  std::function<bool(const QuantifierBlock&)> search = [&](const QuantifierBlock& block) {
    path.push_back(block.id);
    for (const TableVar& v : block.vars) {
      if (v.id == var) return true;
    }
    for (const QuantifierBlock& child : block.children) {
      if (search(child)) return true;
    }
    path.pop_back();
    return false;
  };
  search(query.root);
  return path;
}

std::vector<const TableVar*> all_vars(const CalculusQuery& query) {
  std::vector<const TableVar*> vars;
  for_each_block(query.root, [&](const QuantifierBlock& block) {
    for (const TableVar& v : block.vars) vars.push_back(&v);
  });
  return vars;
}

bool scope_safe(const CalculusQuery& query) {
  std::vector<std::set<int>> scope;
  std::function<bool(const QuantifierBlock&)> check = [&](const QuantifierBlock& block) {
    std::set<int> visible = scope.empty() ? std::set<int>{} : scope.back();
    for (const TableVar& v : block.vars) visible.insert(v.id);
    scope.push_back(visible);
    for (const Predicate& p : block.predicates) {
      if (visible.count(p.left.var) == 0) return false;
      if (const auto* s = std::get_if<AttrSlot>(&p.right); s != nullptr && !visible.count(s->var)) {
        return false;
      }
    }
    for (const QuantifierBlock& child : block.children) {
      if (!check(child)) return false;
    }
    scope.pop_back();
    return true;
  };
  if (!check(query.root)) return false;
  for (const OutputColumn& col : query.output) {
    const bool inRoot = std::any_of(query.root.vars.begin(), query.root.vars.end(),
                                    [&](const TableVar& v) { return v.id == col.source.var; });
    if (!inRoot) return false;
  }
  return true;
}

}  // namespace qviz::calculus
