// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qviz {

/// Half-open byte range [start, end) into the query text.
struct SourceSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  [[nodiscard]] std::size_t size() const { return end - start; }
  [[nodiscard]] bool contains(std::size_t offset) const { return start <= offset && offset < end; }
  [[nodiscard]] bool covers(const SourceSpan& other) const {
    return start <= other.start && other.end <= end;
  }
  [[nodiscard]] std::string_view slice(std::string_view source) const {
    return source.substr(start, end - start);
  }

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

/// Smallest span covering both arguments.
inline SourceSpan merge(const SourceSpan& a, const SourceSpan& b) {
  return {a.start < b.start ? a.start : b.start, a.end > b.end ? a.end : b.end};
}

enum class ErrorCode {
  LexError,
  ParseError,
  UnsupportedFeature,
  DuplicateAlias,
  UnknownRelation,
  UnknownAttribute,
  AmbiguousAttribute,
  SchemaMismatch,
  NullValue,
  TypeMismatch,
  DepthExceeded,
  DisconnectedQuery,
  VersionError,
  InvalidInput,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the pipeline. Errors that originate in the query
/// text carry the offending span.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::optional<SourceSpan> span = std::nullopt,
        std::vector<std::string> expected = {});

  [[nodiscard]] ErrorCode code() const { return code_; }
  [[nodiscard]] const std::optional<SourceSpan>& span() const { return span_; }
  /// Token descriptions the parser would have accepted (ParseError only).
  [[nodiscard]] const std::vector<std::string>& expected() const { return expected_; }
  /// Feature name for UnsupportedFeature, empty otherwise.
  [[nodiscard]] const std::string& feature() const { return feature_; }

  static Error unsupported(std::string feature, SourceSpan span);

 private:
  ErrorCode code_;
  std::optional<SourceSpan> span_;
  std::vector<std::string> expected_;
  std::string feature_;
};

/// 1-based line and column of a byte offset.
struct LineColumn {
  std::size_t line = 1;
  std::size_t column = 1;
};

LineColumn line_column(std::string_view source, std::size_t offset);

/// "line:col: error: message" followed by the source line and a caret marker.
std::string format_diagnostic(std::string_view source, const Error& error,
                              std::string_view origin = {});

}  // namespace qviz
