// SPDX-License-Identifier: Apache-2.0
// qviz: SQL query visualization, pattern clustering and evaluation.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qviz/calculus/database.hpp"
#include "qviz/pattern/pattern.hpp"
#include "qviz/service/service.hpp"
#include "qviz/version.hpp"

namespace fs = std::filesystem;
using namespace qviz;

namespace {

/// Failure to read an input file or a malformed option value.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::optional<sql::Schema> load_schema(const std::string& path) {
  if (path.empty()) return std::nullopt;
  try {
    return sql::Schema::from_json(read_file(path));
  } catch (const Error& e) {
    throw UsageError(path + ": " + e.what());
  }
}

void print_diagnostic(const service::Diagnostic& d, const std::string& source, const std::string& origin) {
  if (d.severity == "error" && d.span) {
    std::cerr << format_diagnostic(source, Error(ErrorCode::InvalidInput, d.message, d.span), origin);
    return;
  }
  std::cerr << origin;
  if (d.span) {
    const auto lc = line_column(source, d.span->start);
    std::cerr << ":" << lc.line << ":" << lc.column;
  }
  std::cerr << ": " << d.severity << ": " << d.message << "\n";
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

/// Compiles a file, printing warnings; errors print a span-annotated
/// message and yield the matching exit code.
std::optional<calculus::CalculusQuery> compile_file(const std::string& path, const std::string& source,
                                                    const std::optional<sql::Schema>& schema, int& status) {
  std::vector<service::Diagnostic> warnings;
  try {
    auto q = service::compile(source, schema, &warnings);
    for (const auto& w : warnings) print_diagnostic(w, source, path);
    return q;
  } catch (const Error& e) {
    std::cerr << format_diagnostic(source, e, path);
    status = service::exit_code(e.code());
    return std::nullopt;
  }
}

struct VisualizeArgs {
  std::string file;
  std::string dialect = "queryvis";
  bool forall = true;
  std::string schema;
  std::string out;
  std::string format = "svg";
};

int cmd_visualize(const VisualizeArgs& a) {
  service::VisualizeRequest req;
  req.sql = read_file(a.file);
  req.dialect = diagram::parse_dialect(a.dialect);
  req.forall = a.forall;
  req.schema = load_schema(a.schema);
  const auto style = render::StyleConfig::from_environment();
  const service::VisualizeResult result = service::visualize(req);
  for (const auto& d : result.diagnostics) print_diagnostic(d, req.sql, a.file);
  if (result.error) return service::exit_code(result.error->code());

  std::string text;
  if (a.format == "svg") text = render::to_svg(*result.diagram, style);
  else if (a.format == "dot") text = render::to_dot(result.diagram->diagram);
  else text = render::to_interchange(*result.diagram);
  write_output(a.out, text);
  return service::kOk;
}

struct ClusterArgs {
  std::string dir;
  bool abstractConstants = false;
  std::string schema;
};

int cmd_cluster(const ClusterArgs& a) {
  if (!fs::is_directory(a.dir)) throw UsageError(a.dir + " is not a directory");
  const auto schema = load_schema(a.schema);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(a.dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".sql") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<std::pair<std::string, calculus::CalculusQuery>> queries;
  std::vector<std::string> skipped;
  for (const auto& path : files) {
    const std::string name = path.filename().string();
    const std::string source = read_file(path.string());
    try {
      queries.emplace_back(name, service::compile(source, schema));
    } catch (const Error& e) {
      std::string message = name;
      if (e.span()) {
        const auto lc = line_column(source, e.span()->start);
        message += ":" + std::to_string(lc.line) + ":" + std::to_string(lc.column);
      }
      skipped.push_back(message + ": " + e.what());
    }
  }

  const auto clusters = pattern::cluster(queries, {a.abstractConstants});
  std::cout << clusters.size() << " cluster" << (clusters.size() == 1 ? "" : "s") << " from " << queries.size()
            << " file" << (queries.size() == 1 ? "" : "s") << "\n";
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    std::cout << "cluster " << i + 1 << "  size " << clusters[i].members.size() << "  hash "
              << clusters[i].hash.hex.substr(0, 12) << "\n";
    for (const auto& m : clusters[i].members) std::cout << "  " << m << "\n";
  }
  if (!skipped.empty()) {
    std::cout << "skipped:\n";
    for (const auto& s : skipped) std::cout << "  " << s << "\n";
  }
  return queries.empty() && !skipped.empty() ? service::kQueryError : service::kOk;
}

int cmd_check(const std::string& file, const std::string& schemaPath) {
  const std::string source = read_file(file);
  const auto schema = load_schema(schemaPath);
  std::vector<service::Diagnostic> warnings;
  try {
    const auto resolved = sql::parse_and_resolve(source, schema);
    for (const auto& w : resolved.warnings) print_diagnostic({"warning", "", w.message, w.span}, source, file);
    std::cout << "ok: depth " << calculus::nesting_depth(calculus::to_calculus(resolved)) << "\n";
    if (resolved.schemaInferred) std::cout << resolved.schema.to_json() << "\n";
    return service::kOk;
  } catch (const Error& e) {
    std::cerr << format_diagnostic(source, e, file);
    return service::exit_code(e.code());
  }
}

int cmd_pattern(const std::string& file, const std::string& schemaPath, bool abstractConstants) {
  const std::string source = read_file(file);
  int status = service::kOk;
  const auto q = compile_file(file, source, load_schema(schemaPath), status);
  if (!q) return status;
  const auto form = pattern::canonicalize(*q, {abstractConstants});
  std::cout << pattern::sha256_hex(form.text) << "\n" << form.text;
  return service::kOk;
}

int cmd_eval(const std::string& file, const std::string& dbPath, const std::string& schemaPath, bool forall) {
  const std::string source = read_file(file);
  calculus::Database db;
  try {
    db = calculus::Database::from_json(read_file(dbPath));
  } catch (const Error& e) {
    throw UsageError(dbPath + ": " + e.what());
  }
  int status = service::kOk;
  auto q = compile_file(file, source, load_schema(schemaPath), status);
  if (!q) return status;
  if (forall) q = calculus::forall_transform(*q);
  try {
    const auto rows = calculus::evaluate(*q, db);
    for (std::size_t i = 0; i < q->output.size(); ++i) std::cout << (i ? "\t" : "") << q->output[i].name;
    std::cout << "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) std::cout << (i ? "\t" : "") << to_literal(row[i]);
      std::cout << "\n";
    }
  } catch (const Error& e) {
    std::cerr << file << ": error: " << e.what() << "\n";
    return service::exit_code(e.code());
  }
  return service::kOk;
}

int cmd_serve(int port, const std::string& host, const std::string& staticDir) {
  service::ServeOptions options;
  options.port = port;
  options.host = host;
  options.staticDir = staticDir;
  options.style = render::StyleConfig::from_environment();
  if (!staticDir.empty() && !fs::is_directory(staticDir)) throw UsageError(staticDir + " is not a directory");
  const bool ok = service::serve(options, [&](int bound) {
    std::cout << "listening on http://" << host << ":" << bound << std::endl;
  });
  if (!ok) {
    std::cerr << "qviz: cannot listen on " << host << ":" << port << "\n";
    return service::kUsage;
  }
  return service::kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SQL query visualization (QueryVis and Relational Diagrams)", "qviz"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  VisualizeArgs vis;
  auto* visualize = app.add_subcommand("visualize", "Draw a query as SVG, DOT or interchange JSON");
  visualize->add_option("file", vis.file, "SQL file")->required();
  visualize->add_option("--dialect", vis.dialect, "queryvis or rd")
      ->check(CLI::IsMember({"queryvis", "rd", "relational-diagrams"}));
  visualize->add_flag("--forall,!--no-forall", vis.forall, "Draw NOT EXISTS / NOT EXISTS as a forall box");
  visualize->add_option("--schema", vis.schema, "Schema JSON: {relation: [attributes]}");
  visualize->add_option("--out,-o", vis.out, "Output file (default: stdout)");
  visualize->add_option("--format", vis.format, "svg, dot or json")->check(CLI::IsMember({"svg", "dot", "json"}));

  ClusterArgs cl;
  auto* cluster = app.add_subcommand("cluster", "Group the .sql files of a directory by query pattern");
  cluster->add_option("dir", cl.dir, "Directory")->required();
  cluster->add_flag("--abstract-constants", cl.abstractConstants, "Ignore constant values");
  cluster->add_option("--schema", cl.schema, "Schema JSON");

  std::string checkFile, checkSchema;
  auto* check = app.add_subcommand("check", "Parse and resolve; print the inferred schema");
  check->add_option("file", checkFile, "SQL file")->required();
  check->add_option("--schema", checkSchema, "Schema JSON");

  std::string patFile, patSchema;
  bool patAbstract = false;
  auto* pat = app.add_subcommand("pattern", "Print the pattern hash and canonical form");
  pat->add_option("file", patFile, "SQL file")->required();
  pat->add_option("--schema", patSchema, "Schema JSON");
  pat->add_flag("--abstract-constants", patAbstract, "Ignore constant values");

  std::string evalFile, evalDb, evalSchema;
  bool evalForall = false;
  auto* eval = app.add_subcommand("eval", "Evaluate a query over a small JSON database");
  eval->add_option("file", evalFile, "SQL file")->required();
  eval->add_option("--db", evalDb, "Database JSON: {relation: [{attr: value}]}")->required();
  eval->add_option("--schema", evalSchema, "Schema JSON");
  eval->add_flag("--forall", evalForall, "Evaluate the forall-rewritten form");

  int port = 8080;
  std::string host = "127.0.0.1";
  std::string staticDir;
  auto* serve = app.add_subcommand("serve", "HTTP API for editors and the web studio");
  serve->add_option("--port", port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));
  serve->add_option("--host", host, "Interface to bind");
  serve->add_option("--static", staticDir, "Directory served at /");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return service::kUsage;
  }

  try {
    if (*visualize) return cmd_visualize(vis);
    if (*cluster) return cmd_cluster(cl);
    if (*check) return cmd_check(checkFile, checkSchema);
    if (*pat) return cmd_pattern(patFile, patSchema, patAbstract);
    if (*eval) return cmd_eval(evalFile, evalDb, evalSchema, evalForall);
    if (*serve) return cmd_serve(port, host, staticDir);
  } catch (const UsageError& e) {
    std::cerr << "qviz: " << e.what() << "\n";
    return service::kUsage;
  } catch (const Error& e) {
    std::cerr << "qviz: " << e.what() << "\n";
    return service::exit_code(e.code());
  }
  return service::kUsage;
}
