// SPDX-License-Identifier: Apache-2.0
// Drives the qviz executable as a subprocess.

#include <sys/wait.h>

#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <future>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "qviz/pattern/pattern.hpp"
#include "qviz/version.hpp"
#include "support/golden.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / ("qviz_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

Run run_qviz(const std::string& args, const std::string& env = "") {
  const fs::path out = scratch() / "stdout";
  const fs::path err = scratch() / "stderr";
  const std::string cmd = env + " " + quote(QVIZ_BIN) + " " + args + " >" + quote(out.string()) + " 2>" +
                          quote(err.string());
  const int raw = std::system(cmd.c_str());
  Run r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = qviz::testing::read_file(out.string());
  r.err = qviz::testing::read_file(err.string());
  return r;
}

std::string query(const std::string& name) { return quote(std::string(QVIZ_SOURCE_DIR) + "/queries/" + name); }

std::string write_temp(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p, std::ios::binary) << text;
  return quote(p.string());
}

}  // namespace

TEST_CASE("help and version exit 0") {
  const Run help = run_qviz("--help");
  CHECK(help.status == 0);
  CHECK(help.out.find("visualize") != std::string::npos);
  const Run version = run_qviz("--version");
  CHECK(version.status == 0);
  CHECK(version.out.find(qviz::kVersion) != std::string::npos);
}

TEST_CASE("usage errors exit 1") {
  CHECK(run_qviz("").status == 1);
  CHECK(run_qviz("bogus").status == 1);
  CHECK(run_qviz("visualize").status == 1);
  CHECK(run_qviz("visualize " + query("q_some.sql") + " --dialect nope").status == 1);
  CHECK(run_qviz("visualize " + query("q_some.sql") + " --format png").status == 1);
  const Run missing = run_qviz("visualize /nonexistent/q.sql");
  CHECK(missing.status == 1);
  CHECK(missing.err.find("cannot read") != std::string::npos);
  CHECK(run_qviz("cluster /nonexistent").status == 1);
  CHECK(run_qviz("visualize " + query("q_some.sql") + " --schema " + write_temp("bad.json", "{\"R\": 1}")).status == 1);
}

TEST_CASE("query errors exit 2 with a located message") {
  const Run r = run_qviz("visualize " + write_temp("typo.sql", "select F.person\nfrom Frequents F\nwher 1 = 1"));
  CHECK(r.status == 2);
  CHECK(r.out.empty());
  CHECK(r.err.find("typo.sql:3:1: error") != std::string::npos);
  CHECK(r.err.find("^^^^") != std::string::npos);
  CHECK(run_qviz("check " + write_temp("empty.sql", "")).status == 2);
}

TEST_CASE("unsupported constructs exit 3") {
  const Run r = run_qviz("visualize " + write_temp("agg.sql", "select count(*) from R r"));
  CHECK(r.status == 3);
  CHECK(r.err.find("error") != std::string::npos);
}

TEST_CASE("visualize writes svg, dot and json deterministically") {
  for (const char* format : {"svg", "dot", "json"}) {
    CAPTURE(format);
    const Run a = run_qviz("visualize " + query("q_only.sql") + " --format " + format);
    const Run b = run_qviz("visualize " + query("q_only.sql") + " --format " + format);
    CHECK(a.status == 0);
    CHECK(!a.out.empty());
    CHECK(a.out == b.out);
  }
  const Run svg = run_qviz("visualize " + query("q_only.sql"));
  CHECK(svg.out.rfind("<?xml", 0) == 0);
  const Run dot = run_qviz("visualize " + query("q_only.sql") + " --format dot");
  CHECK(dot.out.rfind("digraph", 0) == 0);
  const Run js = run_qviz("visualize " + query("q_only.sql") + " --format json --dialect rd");
  const json doc = json::parse(js.out);
  CHECK(doc["dialect"] == "relational-diagrams");
  CHECK(doc["groups"].size() == 2);
}

TEST_CASE("forall switch changes the QueryVis drawing") {
  const json on = json::parse(run_qviz("visualize " + query("q_only.sql") + " --format json").out);
  const json off = json::parse(run_qviz("visualize " + query("q_only.sql") + " --format json --no-forall").out);
  CHECK(on["groups"].size() == 1);
  CHECK(off["groups"].size() == 2);
}

TEST_CASE("--out writes the file instead of stdout") {
  const fs::path target = scratch() / "out.svg";
  const Run r = run_qviz("visualize " + query("q_some.sql") + " --out " + quote(target.string()));
  CHECK(r.status == 0);
  CHECK(r.out.empty());
  CHECK(qviz::testing::read_file(target.string()) == run_qviz("visualize " + query("q_some.sql")).out);
}

TEST_CASE("style environment variable reaches the svg") {
  const Run r = run_qviz("visualize " + query("q_some.sql"),
                         "QVIZ_STYLE=" + write_temp("style.json", "{\"stroke\": \"#123456\"}"));
  CHECK(r.status == 0);
  CHECK(r.out.find("#123456") != std::string::npos);
  CHECK(run_qviz("visualize " + query("q_some.sql"), "QVIZ_STYLE=" + write_temp("bad_style.json", "{\"nope\": 1}"))
            .status == 1);
  CHECK(run_qviz("visualize " + query("q_some.sql"), "QVIZ_STYLE=/nonexistent.json").status == 1);
}

TEST_CASE("deep query falls back with a notice") {
  const Run r = run_qviz("visualize " + query("depth4.sql") + " --format json");
  CHECK(r.status == 0);
  CHECK(r.err.find("notice") != std::string::npos);
  CHECK(json::parse(r.out)["dialect"] == "relational-diagrams");
}

TEST_CASE("cluster reports the corpus groups") {
  const std::string dir = quote(std::string(QVIZ_SOURCE_DIR) + "/queries/corpus");
  const Run r = run_qviz("cluster " + dir + " --schema " + quote(std::string(QVIZ_SOURCE_DIR) + "/queries/corpus/schema.json"));
  CHECK(r.status == 0);
  CHECK(r.out.rfind("2 clusters from 6 files\n", 0) == 0);
  CHECK(r.out.find("size 4") < r.out.find("size 2"));
  CHECK(r.out.find("skipped") == std::string::npos);
  CHECK(r.out == run_qviz("cluster " + dir + " --schema " + quote(std::string(QVIZ_SOURCE_DIR) + "/queries/corpus/schema.json")).out);
}

TEST_CASE("cluster lists unparsable files as skipped") {
  const fs::path dir = scratch() / "mixed";
  fs::create_directories(dir);
  std::ofstream(dir / "a.sql") << "select r.a from R r where r.b = 1";
  std::ofstream(dir / "b.sql") << "select x.a from R x where x.b = 1";
  std::ofstream(dir / "c.sql") << "selec";
  std::ofstream(dir / "notes.txt") << "ignored";
  const Run r = run_qviz("cluster " + quote(dir.string()));
  CHECK(r.status == 0);
  CHECK(r.out.rfind("1 cluster from 2 files\n", 0) == 0);
  CHECK(r.out.find("skipped:\n  c.sql:1:1:") != std::string::npos);

  const fs::path empty = scratch() / "empty";
  fs::create_directories(empty);
  CHECK(run_qviz("cluster " + quote(empty.string())).status == 0);

  const fs::path broken = scratch() / "broken";
  fs::create_directories(broken);
  std::ofstream(broken / "c.sql") << "selec";
  CHECK(run_qviz("cluster " + quote(broken.string())).status == 2);
}

TEST_CASE("check prints the inferred schema") {
  const Run r = run_qviz("check " + query("q_some.sql"));
  CHECK(r.status == 0);
  const auto brace = r.out.find('{');
  REQUIRE(brace != std::string::npos);
  const json schema = json::parse(r.out.substr(brace));
  CHECK(schema["frequents"] == json({"person", "bar"}));
}

TEST_CASE("pattern prints hash then canonical form") {
  const Run a = run_qviz("pattern " + query("not_in.sql") + " --schema " + query("rs_schema.json"));
  const Run b = run_qviz("pattern " + query("not_exists.sql") + " --schema " + query("rs_schema.json"));
  CHECK(a.status == 0);
  CHECK(a.out.size() > 65);
  CHECK(a.out == b.out);
  CHECK(a.out.substr(0, 64) == qviz::pattern::sha256_hex(a.out.substr(65)));
}

TEST_CASE("eval prints the result rows") {
  // Q_only: persons who frequent only bars serving only drinks they like.
  const std::string db = quote(std::string(QVIZ_SOURCE_DIR) + "/tests/data/bars.json");
  const Run r = run_qviz("eval " + query("q_only.sql") + " --db " + db);
  CHECK(r.status == 0);
  CHECK(r.out == "person\n'ann'\n");
  CHECK(run_qviz("eval " + query("q_only.sql") + " --db " + db + " --forall").out == r.out);
  CHECK(run_qviz("eval " + query("q_only.sql") + " --db " + write_temp("nulls.json", "{\"Likes\": [{\"person\": null, \"drink\": \"x\"}]}")).status == 1);
}

TEST_CASE("serve answers HTTP and exits 1 when the port is taken") {
  const fs::path log = scratch() / "serve.log";
  const fs::path pidFile = scratch() / "serve.pid";
  const std::string cmd = quote(QVIZ_BIN) + " serve --port 0 >" + quote(log.string()) + " 2>&1 & echo $! >" +
                          quote(pidFile.string());
  REQUIRE(std::system(cmd.c_str()) == 0);
  const int pid = std::stoi(qviz::testing::read_file(pidFile.string()));

  int port = 0;
  for (int i = 0; i < 200 && port == 0; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(25));
    const std::string text = qviz::testing::read_file(log.string());
    const auto colon = text.rfind(':');
    if (text.find('\n') != std::string::npos && colon != std::string::npos) port = std::stoi(text.substr(colon + 1));
  }
  REQUIRE(port > 0);

  httplib::Client client("127.0.0.1", port);
  const auto health = client.Get("/api/health");
  REQUIRE(health);
  CHECK(json::parse(health->body)["version"] == qviz::kVersion);
  const auto vis = client.Post("/api/visualize", R"({"sql": "select R.a from R"})", "application/json");
  REQUIRE(vis);
  CHECK(vis->status == 200);

  const Run taken = run_qviz("serve --port " + std::to_string(port));
  CHECK(taken.status == 1);
  CHECK(taken.err.find("cannot listen") != std::string::npos);

  ::kill(pid, SIGTERM);
}
