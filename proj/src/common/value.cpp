// SPDX-License-Identifier: Apache-2.0
#include "qviz/value.hpp"

#include "qviz/error.hpp"

namespace qviz {

std::string_view to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "=";
    case CompareOp::Ne: return "<>";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
  }
  return "?";
}

CompareOp parse_compare_op(std::string_view text) {
  if (text == "=") return CompareOp::Eq;
  if (text == "<>" || text == "!=") return CompareOp::Ne;
  if (text == "<") return CompareOp::Lt;
  if (text == "<=") return CompareOp::Le;
  if (text == ">") return CompareOp::Gt;
  if (text == ">=") return CompareOp::Ge;
  throw Error(ErrorCode::InvalidInput, "unknown comparison operator '" + std::string(text) + "'");
}

CompareOp mirrored(CompareOp op) {
  switch (op) {
    case CompareOp::Lt: return CompareOp::Gt;
    case CompareOp::Le: return CompareOp::Ge;
    case CompareOp::Gt: return CompareOp::Lt;
    case CompareOp::Ge: return CompareOp::Le;
    default: return op;
  }
}

bool is_symmetric(CompareOp op) { return op == CompareOp::Eq || op == CompareOp::Ne; }

std::string to_literal(const Value& value) {
  if (const auto* i = std::get_if<std::int64_t>(&value)) return std::to_string(*i);
  std::string out = "'";
  for (char c : std::get<std::string>(value)) {
    if (c == '\'') out += "''";
    else out.push_back(c);
  }
  out += "'";
  return out;
}

bool compare(const Value& left, CompareOp op, const Value& right) {
  if (left.index() != right.index()) {
    throw Error(ErrorCode::TypeMismatch,
                "cannot compare " + to_literal(left) + " with " + to_literal(right));
  }
  const std::strong_ordering order = left <=> right;
  switch (op) {
    case CompareOp::Eq: return order == 0;
    case CompareOp::Ne: return order != 0;
    case CompareOp::Lt: return order < 0;
    case CompareOp::Le: return order <= 0;
    case CompareOp::Gt: return order > 0;
    case CompareOp::Ge: return order >= 0;
  }
  return false;
}

}  // namespace qviz
