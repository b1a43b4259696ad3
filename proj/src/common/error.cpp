// SPDX-License-Identifier: Apache-2.0
#include "qviz/error.hpp"

#include <algorithm>
#include <sstream>

namespace qviz {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::LexError: return "LexError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnsupportedFeature: return "UnsupportedFeature";
    case ErrorCode::DuplicateAlias: return "DuplicateAlias";
    case ErrorCode::UnknownRelation: return "UnknownRelation";
    case ErrorCode::UnknownAttribute: return "UnknownAttribute";
    case ErrorCode::AmbiguousAttribute: return "AmbiguousAttribute";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::NullValue: return "NullValue";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::DepthExceeded: return "DepthExceeded";
    case ErrorCode::DisconnectedQuery: return "DisconnectedQuery";
    case ErrorCode::VersionError: return "VersionError";
    case ErrorCode::InvalidInput: return "InvalidInput";
  }
  return "Error";
}

Error::Error(ErrorCode code, std::string message, std::optional<SourceSpan> span,
             std::vector<std::string> expected)
    : std::runtime_error(std::move(message)),
      code_(code),
      span_(span),
      expected_(std::move(expected)) {}

Error Error::unsupported(std::string feature, SourceSpan span) {
  Error e(ErrorCode::UnsupportedFeature, "unsupported feature: " + feature, span);
  e.feature_ = std::move(feature);
  return e;
}

LineColumn line_column(std::string_view source, std::size_t offset) {
  offset = std::min(offset, source.size());
  LineColumn lc;
  for (std::size_t i = 0; i < offset; ++i) {
    if (source[i] == '\n') {
      ++lc.line;
      lc.column = 1;
    } else {
      ++lc.column;
    }
  }
  return lc;
}

std::string format_diagnostic(std::string_view source, const Error& error,
                              std::string_view origin) {
  std::ostringstream out;
  if (!origin.empty()) out << origin << ':';
  if (!error.span()) {
    out << " error: " << error.what() << '\n';
    return out.str();
  }
  const SourceSpan span = *error.span();
  const LineColumn lc = line_column(source, span.start);
  out << lc.line << ':' << lc.column << ": error: " << error.what() << '\n';

  const std::size_t clamped = std::min(span.start, source.size());
  std::size_t begin = clamped;
  while (begin > 0 && source[begin - 1] != '\n') --begin;
  std::size_t finish = source.find('\n', clamped);
  if (finish == std::string_view::npos) finish = source.size();
  out << "  " << source.substr(begin, finish - begin) << '\n';
  out << "  " << std::string(clamped - begin, ' ');
  const std::size_t width = std::max<std::size_t>(1, std::min(span.end, finish) - clamped);
  out << std::string(width, '^') << '\n';
  return out.str();
}

}  // namespace qviz
