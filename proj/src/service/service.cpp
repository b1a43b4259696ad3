// SPDX-License-Identifier: Apache-2.0
#include "qviz/service/service.hpp"

#include "json.hpp"
#include "qviz/version.hpp"

namespace qviz::service {

using nlohmann::json;

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnsupportedFeature: return kUnsupported;
    case ErrorCode::InvalidInput:
    case ErrorCode::VersionError: return kUsage;
    default: return kQueryError;
  }
}

calculus::CalculusQuery compile(std::string_view sql, const std::optional<sql::Schema>& schema,
                                std::vector<Diagnostic>* warnings) {
  const sql::ResolvedQuery resolved = sql::parse_and_resolve(sql, schema);
  if (warnings != nullptr) {
    for (const auto& w : resolved.warnings) warnings->push_back({"warning", "", w.message, w.span});
  }
  return calculus::to_calculus(resolved);
}

VisualizeResult visualize(const VisualizeRequest& request) {
  VisualizeResult result;
  result.dialect = request.dialect;
  try {
    const auto query = compile(request.sql, request.schema, &result.diagnostics);
    diagram::Diagram d;
    try {
      d = diagram::build(query, request.dialect, request.forall);
    } catch (const Error& e) {
      const bool recoverable = e.code() == ErrorCode::DepthExceeded || e.code() == ErrorCode::DisconnectedQuery;
      if (request.dialect != diagram::Dialect::QueryVis || !recoverable) throw;
      result.diagnostics.push_back({"notice", std::string(to_string(e.code())),
                                    std::string(e.what()) + "; drawn as a relational diagram instead", e.span()});
      result.dialect = diagram::Dialect::RelationalDiagrams;
      result.fellBack = true;
      d = diagram::build_relational_diagram(query);
    }
    result.diagram = layout::layout(d);
  } catch (const Error& e) {
    result.error = e;
    result.diagnostics.push_back({"error", std::string(to_string(e.code())), e.what(), e.span()});
  }
  return result;
}

namespace {

json diagnostic_json(const Diagnostic& d, std::string_view source) {
  json j{{"severity", d.severity}, {"code", d.code}, {"message", d.message}};
  if (d.span) {
    const auto lc = line_column(source, d.span->start);
    j["span"] = {{"start", d.span->start}, {"end", d.span->end}};
    j["line"] = lc.line;
    j["column"] = lc.column;
  } else {
    j["span"] = nullptr;
  }
  return j;
}

HttpReply bad_request(const std::string& why) {
  return {400, json{{"error", why}}.dump()};
}

}  // namespace

HttpReply handle_visualize(std::string_view body, const render::StyleConfig& style) {
  json request;
  try {
    request = json::parse(body);
  } catch (const json::parse_error&) {
    return bad_request("request body is not valid JSON");
  }
  if (!request.is_object()) return bad_request("request body must be a JSON object");
  if (!request.contains("sql") || !request["sql"].is_string()) return bad_request("'sql' must be a string");

  VisualizeRequest req;
  req.sql = request["sql"].get<std::string>();
  try {
    if (request.contains("dialect") && !request["dialect"].is_null()) {
      if (!request["dialect"].is_string()) return bad_request("'dialect' must be a string");
      req.dialect = diagram::parse_dialect(request["dialect"].get<std::string>());
    }
    if (request.contains("forall") && !request["forall"].is_null()) {
      if (!request["forall"].is_boolean()) return bad_request("'forall' must be a boolean");
      req.forall = request["forall"].get<bool>();
    }
    if (request.contains("schema") && !request["schema"].is_null()) {
      req.schema = sql::Schema::from_json(request["schema"].dump());
    }
  } catch (const Error& e) {
    return bad_request(e.what());
  }

  const VisualizeResult result = visualize(req);
  json reply;
  reply["dialect"] = std::string(diagram::to_string(result.dialect));
  if (result.diagram) {
    reply["svg"] = render::to_svg(*result.diagram, style);
    reply["interchange"] = json::parse(render::to_interchange(*result.diagram));
  } else {
    reply["svg"] = nullptr;
    reply["interchange"] = nullptr;
  }
  json diagnostics = json::array();
  for (const auto& d : result.diagnostics) diagnostics.push_back(diagnostic_json(d, req.sql));
  reply["diagnostics"] = diagnostics;
  return {200, reply.dump()};
}

HttpReply handle_health() { return {200, json{{"version", kVersion}}.dump()}; }

}  // namespace qviz::service
