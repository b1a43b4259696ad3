// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qviz/layout/layout.hpp"
#include "qviz/render/render.hpp"
#include "qviz/sql/schema.hpp"

namespace qviz::service {

/// Process exit statuses of the command-line tool.
enum ExitCode : int { kOk = 0, kUsage = 1, kQueryError = 2, kUnsupported = 3 };

/// Exit status for a pipeline error.
int exit_code(ErrorCode code);

struct Diagnostic {
  std::string severity;  // "error", "warning" or "notice"
  std::string code;      // ErrorCode name for errors, empty otherwise
  std::string message;
  std::optional<SourceSpan> span;
};

/// Parses, resolves and lowers; throws Error.
calculus::CalculusQuery compile(std::string_view sql, const std::optional<sql::Schema>& schema,
                                std::vector<Diagnostic>* warnings = nullptr);

struct VisualizeRequest {
  std::string sql;
  diagram::Dialect dialect = diagram::Dialect::QueryVis;
  bool forall = true;
  std::optional<sql::Schema> schema;
};

struct VisualizeResult {
  /// Empty when the query could not be compiled; see `error`.
  std::optional<layout::PositionedDiagram> diagram;
  std::optional<Error> error;
  diagram::Dialect dialect = diagram::Dialect::QueryVis;
  bool fellBack = false;
  std::vector<Diagnostic> diagnostics;
};

/// Full pipeline. Query errors are reported, not thrown. A QueryVis
/// request that hits the depth or connectivity limit is drawn as a
/// relational diagram with a notice.
VisualizeResult visualize(const VisualizeRequest& request);

struct HttpReply {
  int status = 200;
  std::string body;
};

/// POST /api/visualize: {sql, dialect?, forall?, schema?} ->
/// {svg, interchange, diagnostics}. 400 for a malformed request body.
HttpReply handle_visualize(std::string_view body, const render::StyleConfig& style = {});

/// GET /api/health -> {"version": ...}
HttpReply handle_health();

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  /// Directory served at "/", if any.
  std::string staticDir;
  render::StyleConfig style;
};

/// Blocks until stop_server() or process exit. Returns false if the port
/// cannot be bound. `onReady` receives the bound port (useful with port 0).
bool serve(const ServeOptions& options, const std::function<void(int)>& onReady = {});
void stop_server();

}  // namespace qviz::service
