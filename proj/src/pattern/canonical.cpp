// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <map>
#include <numeric>

#include "qviz/pattern/pattern.hpp"

namespace qviz::pattern {

using calculus::AttrSlot;
using calculus::BlockKind;
using calculus::CalculusQuery;
using calculus::Predicate;
using calculus::QuantifierBlock;

namespace {

enum class NodeKind { Var, Block, Predicate, Output };

struct Edge {
  std::string label;
  int target;
};

/// The labeled query graph. Predicates and output columns are nodes so that
/// "which block states this predicate" is part of the structure.
struct Graph {
  std::vector<NodeKind> kinds;
  std::vector<std::string> labels;
  std::vector<std::vector<Edge>> edges;

  int add(NodeKind kind, std::string label) {
    kinds.push_back(kind);
    labels.push_back(std::move(label));
    edges.emplace_back();
    return static_cast<int>(kinds.size()) - 1;
  }

  void link(int a, int b, const std::string& forward, const std::string& backward) {
    edges[static_cast<std::size_t>(a)].push_back({forward, b});
    edges[static_cast<std::size_t>(b)].push_back({backward, a});
  }

  [[nodiscard]] std::size_t size() const { return kinds.size(); }
};

/// Comparison normalized so that > and >= never appear.
struct NormalPredicate {
  AttrSlot left;
  CompareOp op;
  std::variant<AttrSlot, Value> right;
};

NormalPredicate normalize(const Predicate& p) {
  NormalPredicate n{p.left, p.op, p.right};
  if (const auto* r = std::get_if<AttrSlot>(&p.right)) {
    if (p.op == CompareOp::Gt || p.op == CompareOp::Ge) {
      n.left = *r;
      n.right = p.left;
      n.op = mirrored(p.op);
    }
  }
  return n;
}

std::string constant_text(const Value& v, const CanonicalOptions& options) {
  return options.abstractConstants ? "?" : to_literal(v);
}

class Canonicalizer {
 public:
  Canonicalizer(const CalculusQuery& query, CanonicalOptions options)
      : query_(query), options_(options) {
    build(query_.root, -1);
    for (std::size_t i = 0; i < query_.output.size(); ++i) {
      const auto& col = query_.output[i];
      const int node = graph_.add(NodeKind::Output, "O|" + std::to_string(i) + "|" + col.name);
      graph_.link(node, varNode_.at(col.source.var), "out|" + col.source.attr,
                  "outof|" + col.source.attr);
    }
  }

  std::string run() {
    std::vector<int> colors = initial_colors();
    refine(colors);
    search(colors);
    return best_;
  }

 private:
  void build(const QuantifierBlock& block, int parentNode) {
    const int node = graph_.add(NodeKind::Block, "B|" + std::string(calculus::to_string(block.kind)) +
                                                     "|" + std::to_string(block.depth));
    blockNode_[block.id] = node;
    if (parentNode >= 0) graph_.link(node, parentNode, "child-of", "parent-of");
    for (const auto& v : block.vars) {
      const int vn = graph_.add(NodeKind::Var, "V|" + v.relation);
      varNode_[v.id] = vn;
      graph_.link(vn, node, "member-of", "has-member");
    }
    // Predicates may refer to variables of nested blocks only after those
    // exist, so children first.
    for (const auto& child : block.children) build(child, node);
    for (const Predicate& p : block.predicates) {
      const NormalPredicate n = normalize(p);
      const bool symmetric = is_symmetric(n.op);
      std::string label = "P|" + std::string(to_string(n.op));
      if (const auto* c = std::get_if<Value>(&n.right)) label += "|" + constant_text(*c, options_);
      const int pn = graph_.add(NodeKind::Predicate, label);
      graph_.link(pn, node, "stated-in", "states");
      const std::string leftRole = symmetric ? "arg" : "lhs";
      graph_.link(pn, varNode_.at(n.left.var), leftRole + "|" + n.left.attr,
                  "in-" + leftRole + "|" + n.left.attr);
      if (const auto* r = std::get_if<AttrSlot>(&n.right)) {
        const std::string role = symmetric ? "arg" : "rhs";
        graph_.link(pn, varNode_.at(r->var), role + "|" + r->attr, "in-" + role + "|" + r->attr);
      }
    }
  }

  std::vector<int> initial_colors() const { return rank(graph_.labels); }

  template <typename Key>
  static std::vector<int> rank(const std::vector<Key>& keys) {
    std::vector<Key> sorted = keys;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<int> out(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
      out[i] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), keys[i]) -
                                sorted.begin());
    }
    return out;
  }

  static int count(const std::vector<int>& colors) {
    return colors.empty() ? 0 : *std::max_element(colors.begin(), colors.end()) + 1;
  }

  /// Colour refinement to a stable partition.
  void refine(std::vector<int>& colors) const {
    using Signature = std::pair<int, std::vector<std::pair<std::string, int>>>;
    int classes = count(colors);
    while (true) {
      std::vector<Signature> sigs(graph_.size());
      for (std::size_t v = 0; v < graph_.size(); ++v) {
        sigs[v].first = colors[v];
        for (const Edge& e : graph_.edges[v]) {
          sigs[v].second.emplace_back(e.label, colors[static_cast<std::size_t>(e.target)]);
        }
        std::sort(sigs[v].second.begin(), sigs[v].second.end());
      }
      std::vector<int> next = rank(sigs);
      const int nextClasses = count(next);
      colors = std::move(next);
      if (nextClasses == classes) return;
      classes = nextClasses;
    }
  }

  void search(const std::vector<int>& colors) {
    // First colour class with more than one member, if any.
    std::vector<int> size(static_cast<std::size_t>(count(colors)), 0);
    for (int c : colors) ++size[static_cast<std::size_t>(c)];
    int target = -1;
    for (std::size_t c = 0; c < size.size(); ++c) {
      if (size[c] > 1) {
        target = static_cast<int>(c);
        break;
      }
    }
    if (target < 0) {
      std::string text = encode(colors);
      if (best_.empty() || text < best_) best_ = std::move(text);
      return;
    }
    for (std::size_t v = 0; v < colors.size(); ++v) {
      if (colors[v] != target) continue;
      std::vector<std::pair<int, int>> split(colors.size());
      for (std::size_t u = 0; u < colors.size(); ++u) {
        split[u] = {colors[u], (u == v || colors[u] != target) ? 0 : 1};
      }
      std::vector<int> next = rank(split);
      refine(next);
      search(next);
    }
  }

  /// Text of the query under a discrete colouring.
  std::string encode(const std::vector<int>& colors) const {
    // Canonical variable index = rank of its colour among variable nodes.
    std::vector<std::pair<int, int>> vars;
    for (const auto& [id, node] : varNode_) vars.emplace_back(colors[static_cast<std::size_t>(node)], id);
    std::sort(vars.begin(), vars.end());
    std::map<int, int> index;
    for (std::size_t i = 0; i < vars.size(); ++i) index[vars[i].second] = static_cast<int>(i);

    std::string out = "select";
    for (const auto& col : query_.output) {
      out += " " + col.name + "=" + slot(index, col.source);
    }
    out += "\n" + encode_block(query_.root, index, 0);
    return out;
  }

  static std::string slot(const std::map<int, int>& index, const AttrSlot& s) {
    return "t" + std::to_string(index.at(s.var)) + "." + s.attr;
  }

  std::string predicate_text(const Predicate& p, const std::map<int, int>& index) const {
    const NormalPredicate n = normalize(p);
    std::string left = slot(index, n.left);
    std::string right;
    if (const auto* r = std::get_if<AttrSlot>(&n.right)) right = slot(index, *r);
    else right = constant_text(std::get<Value>(n.right), options_);
    if (is_symmetric(n.op) && std::holds_alternative<AttrSlot>(n.right) && right < left) {
      std::swap(left, right);
    }
    return left + " " + std::string(to_string(n.op)) + " " + right;
  }

  std::string encode_block(const QuantifierBlock& block, const std::map<int, int>& index,
                           int indent) const {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    std::vector<std::pair<int, std::string>> vars;
    for (const auto& v : block.vars) vars.emplace_back(index.at(v.id), v.relation);
    std::sort(vars.begin(), vars.end());
    std::vector<std::string> preds;
    for (const Predicate& p : block.predicates) preds.push_back(predicate_text(p, index));
    std::sort(preds.begin(), preds.end());
    std::vector<std::string> children;
    for (const auto& child : block.children) children.push_back(encode_block(child, index, indent + 1));
    std::sort(children.begin(), children.end());

    std::string out = pad + std::string(calculus::to_string(block.kind)) + " {";
    for (const auto& [i, rel] : vars) out += " t" + std::to_string(i) + ":" + rel;
    out += "\n";
    for (const auto& p : preds) out += pad + "  " + p + "\n";
    for (const auto& c : children) out += c;
    out += pad + "}\n";
    return out;
  }

  const CalculusQuery& query_;
  CanonicalOptions options_;
  Graph graph_;
  std::map<int, int> varNode_;
  std::map<int, int> blockNode_;
  std::string best_;
};

}  // namespace

CanonicalForm canonicalize(const CalculusQuery& query, CanonicalOptions options) {
  const CalculusQuery normalized = calculus::forall_transform(query);
  return CanonicalForm{Canonicalizer(normalized, options).run()};
}

PatternHash pattern_hash(const CalculusQuery& query, CanonicalOptions options) {
  return PatternHash{sha256_hex(canonicalize(query, options).text)};
}

std::vector<Cluster> cluster(const std::vector<std::pair<std::string, CalculusQuery>>& queries,
                             CanonicalOptions options) {
  std::map<PatternHash, std::vector<std::string>> groups;
  for (const auto& [name, query] : queries) groups[pattern_hash(query, options)].push_back(name);
  std::vector<Cluster> out;
  for (auto& [hash, members] : groups) {
    std::sort(members.begin(), members.end());
    out.push_back({hash, std::move(members)});
  }
  std::stable_sort(out.begin(), out.end(), [](const Cluster& a, const Cluster& b) {
    if (a.members.size() != b.members.size()) return a.members.size() > b.members.size();
    return a.hash < b.hash;
  });
  return out;
}

}  // namespace qviz::pattern
