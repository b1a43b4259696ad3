// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

namespace qviz {

/// A SQL constant: integers compare numerically, strings lexicographically.
/// Mixing the two in one comparison is a TypeMismatch.
using Value = std::variant<std::int64_t, std::string>;

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };

std::string_view to_string(CompareOp op);
/// Accepts "=", "<>", "!=", "<", "<=", ">", ">=".
CompareOp parse_compare_op(std::string_view text);
/// The operator that holds after swapping the operands (a < b  <=>  b > a).
CompareOp mirrored(CompareOp op);
bool is_symmetric(CompareOp op);

/// SQL literal text: integers verbatim, strings single-quoted with '' escaping.
std::string to_literal(const Value& value);

/// Applies `op`; throws Error(TypeMismatch) when the operand types differ.
bool compare(const Value& left, CompareOp op, const Value& right);

}  // namespace qviz
