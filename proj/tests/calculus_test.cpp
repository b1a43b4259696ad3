// SPDX-License-Identifier: Apache-2.0
#include <functional>
#include <random>

#include "doctest.h"
#include "qviz/calculus/calculus.hpp"
#include "qviz/calculus/database.hpp"
#include "support/golden.hpp"
#include "support/query_gen.hpp"
#include "support/random_db.hpp"
#include "support/sql_reference.hpp"

using namespace qviz;
using namespace qviz::calculus;

namespace {

struct Lowered {
  sql::ResolvedQuery resolved;
  CalculusQuery query;
};

Lowered lower(const std::string& source, const std::optional<sql::Schema>& schema = std::nullopt) {
  Lowered out{sql::parse_and_resolve(source, schema), {}};
  out.query = to_calculus(out.resolved);
  return out;
}

Database drinkers(std::vector<std::vector<Value>> frequents, std::vector<std::vector<Value>> likes,
                  std::vector<std::vector<Value>> serves) {
  Database db;
  db.add_relation("Frequents", {"person", "bar"});
  db.add_relation("Likes", {"person", "drink"});
  db.add_relation("Serves", {"bar", "drink"});
  for (auto& r : frequents) db.insert("Frequents", std::move(r));
  for (auto& r : likes) db.insert("Likes", std::move(r));
  for (auto& r : serves) db.insert("Serves", std::move(r));
  return db;
}

Value s(const char* text) { return std::string(text); }

bool has_negation(const QuantifierBlock& block) {
  if (block.kind == BlockKind::NotExists || block.kind == BlockKind::ForallImplies) return true;
  for (const auto& c : block.children) {
    if (has_negation(c)) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("to_calculus of Q_some is a single conjunctive block") {
  const auto [resolved, q] = lower(testing::golden("q_some.sql"));
  CHECK(q.root.kind == BlockKind::Root);
  REQUIRE(q.root.vars.size() == 3);
  CHECK(q.root.vars[0].relation == "frequents");
  CHECK(q.root.vars[1].relation == "likes");
  CHECK(q.root.vars[2].relation == "serves");
  CHECK(q.root.predicates.size() == 3);
  CHECK(q.root.children.empty());
  REQUIRE(q.output.size() == 1);
  CHECK(q.output[0].name == "person");
  CHECK(q.output[0].source == AttrSlot{0, "person"});
  CHECK(q.root.vars[0].referencedAttrs == std::vector<std::string>{"person", "bar"});
  CHECK(q.root.vars[2].referencedAttrs == std::vector<std::string>{"bar", "drink"});
}

TEST_CASE("NOT IN and NOT EXISTS phrasings lower to the same calculus") {
  const auto a = lower(testing::golden("not_in.sql"), testing::rs_schema()).query;
  const auto b = lower(testing::golden("not_exists.sql"), testing::rs_schema()).query;
  CHECK(same_structure(a, b));
  REQUIRE(a.root.children.size() == 1);
  const QuantifierBlock& child = a.root.children[0];
  CHECK(child.kind == BlockKind::NotExists);
  CHECK(child.vars[0].relation == "s");
  REQUIRE(child.predicates.size() == 1);
  CHECK(child.predicates[0].left == AttrSlot{0, "b"});
  CHECK(std::get<AttrSlot>(child.predicates[0].right) == AttrSlot{1, "c"});
}

TEST_CASE("query with empty WHERE has no predicates") {
  const auto q = lower("select distinct R.a from R").query;
  CHECK(q.root.vars.size() == 1);
  CHECK(q.root.predicates.empty());
  CHECK(nesting_depth(q) == 0);
}

TEST_CASE("correlation predicates stay in the block that states them") {
  const auto q = lower(testing::golden("q_only.sql")).query;
  REQUIRE(q.root.children.size() == 1);
  const auto& serves = q.root.children[0];
  CHECK(serves.kind == BlockKind::NotExists);
  CHECK(serves.depth == 1);
  REQUIRE(serves.predicates.size() == 1);
  CHECK(serves.predicates[0].left == AttrSlot{1, "bar"});
  const auto& likes = serves.children[0];
  CHECK(likes.depth == 2);
  CHECK(likes.predicates.size() == 2);
  CHECK(scope_safe(q));
}

TEST_CASE("spanMap covers every element that originates from source") {
  const std::string source = testing::golden("q_some.sql");
  const auto q = lower(source).query;
  CHECK(q.spanMap.at("p1").slice(source) == "F.bar = S.bar");
  CHECK(q.spanMap.at("v0").slice(source) == "Frequents F");
  CHECK(q.spanMap.at("o0").slice(source) == "F.person");
  CHECK(q.spanMap.count("select") == 1);
}

TEST_CASE("forall_transform rewrites the Q_only double negation") {
  const auto q = forall_transform(lower(testing::golden("q_only.sql")).query);
  const auto& serves = q.root.children.at(0);
  CHECK(serves.kind == BlockKind::ForallImplies);
  CHECK(serves.children.at(0).kind == BlockKind::Exists);
  // Same shape as the hand-written universal formula for Q_only.
  CHECK(to_formula(q) ==
        "{ q(person) | exists f in Frequents [ q.person = f.person and forall s in Serves "
        "[ s.bar = f.bar -> exists l in Likes [ l.person = f.person and s.drink = l.drink ] ] ] }");
}

TEST_CASE("forall_transform leaves queries without the pattern unchanged") {
  for (const char* name : {"q_some.sql", "not_in.sql"}) {
    const auto q = lower(testing::golden(name), name == std::string("not_in.sql")
                                                    ? std::optional(testing::rs_schema())
                                                    : std::nullopt)
                       .query;
    CHECK(same_structure(q, forall_transform(q)));
  }
}

TEST_CASE("forall_transform requires exactly one negated child") {
  const auto q = lower(testing::golden("unique_taste.sql")).query;
  const auto t = forall_transform(q);
  const auto& other = t.root.children.at(0);
  // Two NOT EXISTS children: the outer block stays a plain negation.
  CHECK(other.kind == BlockKind::NotExists);
  REQUIRE(other.children.size() == 2);
  for (const auto& chain : other.children) {
    CHECK(chain.kind == BlockKind::ForallImplies);
    CHECK(chain.children.at(0).kind == BlockKind::Exists);
  }
}

TEST_CASE("rewriting the two-child negation naively changes semantics") {
  // Oracle for the single-child restriction: force the rewrite on the
  // two-child node and look for a database where the answers differ.
  const auto lowered = lower(testing::golden("unique_taste.sql"));
  auto naive = lowered.query;
  auto& other = naive.root.children.at(0);
  other.kind = BlockKind::ForallImplies;
  for (auto& c : other.children) c.kind = BlockKind::Exists;

  std::mt19937 rng(7);
  bool differs = false;
  for (int i = 0; i < 500 && !differs; ++i) {
    const auto db = testing::random_database(lowered.resolved.schema, rng);
    differs = evaluate(lowered.query, db) != evaluate(naive, db);
  }
  CHECK(differs);
}

TEST_CASE("evaluate Q_some by hand enumeration") {
  const auto q = lower(testing::golden("q_some.sql")).query;
  const auto db = drinkers({{s("alice"), s("b1")}}, {{s("alice"), s("cola")}},
                           {{s("b1"), s("cola")}});
  CHECK(evaluate(q, db) == ResultSet{{s("alice")}});
  const auto empty = drinkers({{s("alice"), s("b1")}}, {{s("alice"), s("cola")}}, {});
  CHECK(evaluate(q, empty).empty());
}

TEST_CASE("evaluate Q_only with a vacuous universal") {
  const auto q = lower(testing::golden("q_only.sql")).query;
  const auto db = drinkers({{s("alice"), s("b1")}}, {}, {});
  CHECK(evaluate(q, db) == ResultSet{{s("alice")}});
  CHECK(evaluate(forall_transform(q), db) == ResultSet{{s("alice")}});
  const auto serving = drinkers({{s("alice"), s("b1")}}, {}, {{s("b1"), s("beer")}});
  CHECK(evaluate(q, serving).empty());
}

TEST_CASE("evaluate reports schema mismatches and type errors") {
  const auto q = lower(testing::golden("q_some.sql")).query;
  Database missing;
  missing.add_relation("Frequents", {"person", "bar"});
  CHECK_THROWS_AS(evaluate(q, missing), Error);
  try {
    evaluate(q, missing);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SchemaMismatch);
  }

  Database wrongAttr = drinkers({{s("a"), s("b")}}, {}, {});
  Database renamed;
  renamed.add_relation("Frequents", {"person", "pub"});
  renamed.add_relation("Likes", {"person", "drink"});
  renamed.add_relation("Serves", {"bar", "drink"});
  try {
    evaluate(q, renamed);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SchemaMismatch);
  }

  const auto typed = lower("select distinct R.a from R where R.a = 'x'").query;
  Database ints;
  ints.add_relation("R", {"a"});
  ints.insert("R", {std::int64_t{1}});
  try {
    evaluate(typed, ints);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TypeMismatch);
  }
}

TEST_CASE("database JSON rejects NULLs and round-trips") {
  try {
    Database::from_json(R"({"R": [{"a": null}]})");
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NullValue);
  }
  CHECK_THROWS_AS(Database::from_json(R"({"R": [{"a": 1}, {"b": 2}]})"), Error);
  const auto db = Database::from_json(R"({"R": [{"a": 1, "b": "x"}, {"a": 1, "b": "x"}]})");
  REQUIRE(db.find("r") != nullptr);
  CHECK(db.find("r")->rows.size() == 1);
  CHECK(Database::from_json(db.to_json()).to_json() == db.to_json());
}

TEST_CASE("nesting depth of the golden queries") {
  CHECK(nesting_depth(lower(testing::golden("q_some.sql")).query) == 0);
  CHECK(nesting_depth(lower(testing::golden("q_only.sql")).query) == 2);
  CHECK(nesting_depth(lower(testing::golden("unique_taste.sql")).query) == 3);
  CHECK(nesting_depth(lower(testing::golden("depth4.sql")).query) == 4);
  CHECK(all_vars(lower(testing::golden("unique_taste.sql")).query).size() == 6);
}

TEST_CASE("forall_transform preserves semantics on golden queries") {
  std::mt19937 rng(2024);
  for (const char* name : {"q_some.sql", "q_only.sql", "unique_taste.sql", "depth4.sql"}) {
    const auto lowered = lower(testing::golden(name));
    const auto transformed = forall_transform(lowered.query);
    for (int i = 0; i < 100; ++i) {
      const auto db = testing::random_database(lowered.resolved.schema, rng);
      REQUIRE(evaluate(lowered.query, db) == evaluate(transformed, db));
    }
  }
}

TEST_CASE("calculus agrees with direct SQL interpretation") {
  std::mt19937 rng(99);
  for (const char* name : {"q_some.sql", "q_only.sql", "unique_taste.sql", "not_in.sql",
                           "not_exists.sql"}) {
    const auto lowered = lower(testing::golden(name), std::string(name).rfind("not_", 0) == 0
                                                          ? std::optional(testing::rs_schema())
                                                          : std::nullopt);
    for (int i = 0; i < 100; ++i) {
      const auto db = testing::random_database(lowered.resolved.schema, rng);
      REQUIRE(evaluate(lowered.query, db) == testing::reference_eval(lowered.resolved.ast, db));
    }
  }
}

TEST_CASE("NOT IN collapse is sound on NULL-free databases") {
  const auto a = lower(testing::golden("not_in.sql"), testing::rs_schema());
  const auto b = lower(testing::golden("not_exists.sql"), testing::rs_schema());
  std::mt19937 rng(5);
  for (int i = 0; i < 200; ++i) {
    const auto db = testing::random_database(a.resolved.schema, rng);
    const auto expected = testing::reference_eval(a.resolved.ast, db);
    REQUIRE(testing::reference_eval(b.resolved.ast, db) == expected);
    REQUIRE(evaluate(a.query, db) == expected);
    REQUIRE(evaluate(b.query, db) == expected);
  }
}

TEST_CASE("generated queries: oracle equivalence, scope safety, reference agreement") {
  for (std::uint32_t seed = 0; seed < 150; ++seed) {
    testing::QueryGenerator gen(seed, {});
    const std::string text = testing::print_query(gen.generate());
    const auto lowered = lower(text);
    REQUIRE_MESSAGE(scope_safe(lowered.query), text);
    const auto transformed = forall_transform(lowered.query);
    CHECK(scope_safe(transformed));
    std::mt19937 rng(seed);
    for (int i = 0; i < 20; ++i) {
      const auto db = testing::random_database(lowered.resolved.schema, rng);
      const auto result = evaluate(lowered.query, db);
      REQUIRE_MESSAGE(result == evaluate(transformed, db), text);
      REQUIRE_MESSAGE(result == testing::reference_eval(lowered.resolved.ast, db), text);
    }
  }
}

TEST_CASE("negation-free queries are monotone") {
  testing::GenOptions options;
  int checked = 0;
  for (std::uint32_t seed = 0; checked < 60 && seed < 2000; ++seed) {
    testing::QueryGenerator gen(seed, options);
    const auto lowered = lower(testing::print_query(gen.generate()));
    if (has_negation(lowered.query.root)) continue;
    ++checked;
    std::mt19937 rng(seed);
    for (int i = 0; i < 10; ++i) {
      auto db = testing::random_database(lowered.resolved.schema, rng);
      const auto before = evaluate(lowered.query, db);
      const auto& [name, rel] = *db.relations().begin();
      std::vector<Value> row(rel.attributes.size(), Value{std::int64_t{1}});
      db.insert(name, row);
      const auto after = evaluate(lowered.query, db);
      CHECK(std::includes(after.begin(), after.end(), before.begin(), before.end()));
    }
  }
  CHECK(checked >= 20);
}
