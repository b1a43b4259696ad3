// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <functional>
#include <map>
#include <numeric>

#include "doctest.h"
#include "qviz/layout/layout.hpp"
#include "support/golden.hpp"
#include "support/layout_oracle.hpp"
#include "support/query_gen.hpp"

using namespace qviz;
using namespace qviz::layout;
using diagram::Diagram;
using testing::brute_force_optimum;
using testing::oracle_crossings;

namespace {

calculus::CalculusQuery lower(const std::string& source) {
  return calculus::to_calculus(sql::parse_and_resolve(source));
}

std::map<std::string, int> layer_map(const Diagram& d, const Layers& layers) {
  std::map<std::string, int> out;
  for (std::size_t i = 0; i < d.nodes.size(); ++i) out[d.nodes[i].title] = layers[i];
  return out;
}

/// Plain diagram of single-row boxes for synthetic layer tests.
Diagram boxes(const std::vector<std::string>& names, const std::vector<std::pair<std::string, std::string>>& lines) {
  Diagram d;
  for (const auto& n : names) {
    diagram::TableBox b;
    b.id = n;
    b.title = n;
    b.attrRows = {"x"};
    d.nodes.push_back(b);
  }
  int id = 0;
  for (const auto& [a, b] : lines) {
    diagram::PredicateEdge e;
    e.id = "e" + std::to_string(id++);
    e.from = {a, "x"};
    e.to = diagram::RowRef{b, "x"};
    d.edges.push_back(e);
  }
  return d;
}

}  // namespace

TEST_CASE("assign_layers on the golden queries") {
  const Diagram some = diagram::build_queryvis(lower(testing::golden("q_some.sql")));
  CHECK(layer_map(some, assign_layers(some)) ==
        std::map<std::string, int>{{"SELECT", 0}, {"Frequents", 1}, {"Likes", 2}, {"Serves", 2}});

  // Likes joins Frequents directly, so keeping lines between adjacent
  // layers holds it on Serves' layer.
  const Diagram only = diagram::build_queryvis(lower(testing::golden("q_only.sql")), false);
  CHECK(layer_map(only, assign_layers(only)) ==
        std::map<std::string, int>{{"SELECT", 0}, {"Frequents", 1}, {"Serves", 2}, {"Likes", 2}});

  const Diagram single = diagram::build_queryvis(lower("select distinct T.a from T"));
  CHECK(assign_layers(single) == Layers{0, 1});
}

TEST_CASE("layers follow join distance, not nesting depth") {
  const Diagram chain = diagram::build_relational_diagram(lower(
      "select distinct F.a from F where not exists (select * from S where S.b = F.b "
      "and not exists (select * from L where L.c = S.c))"));
  CHECK(assign_layers(chain) == Layers{0, 1, 2, 3});

  const Diagram inner = diagram::build_relational_diagram(lower(
      "select distinct F.a from F, G where F.b = G.b and not exists "
      "(select * from S, T where S.c = F.c and T.d = S.d)"));
  CHECK(layer_map(inner, assign_layers(inner)) ==
        std::map<std::string, int>{{"SELECT", 0}, {"F", 1}, {"G", 2}, {"S", 2}, {"T", 3}});

  // An uncorrelated subquery is its own component.
  const Diagram loose = diagram::build_relational_diagram(
      lower("select distinct F.a from F where not exists (select * from S)"));
  CHECK(assign_layers(loose) == Layers{0, 1, 2});
}

TEST_CASE("disconnected components occupy consecutive bands") {
  const Diagram d = diagram::build_relational_diagram(
      lower("select distinct R.a from R, S, T where S.c = T.c"));
  CHECK(assign_layers(d) == Layers{0, 1, 2, 3});
}

TEST_CASE("one swap removes the crossing of a twisted pair") {
  const Diagram d = boxes({"a1", "a2", "b1", "b2"}, {{"a1", "b2"}, {"a2", "b1"}});
  const Layers layers{0, 0, 1, 1};
  const Ordering initial = initial_ordering(d, layers);
  CHECK(initial == Ordering{{0, 1}, {2, 3}});
  CHECK(count_crossings(d, layers, initial) == 1);
  const auto report = order_within_layers(d, layers);
  CHECK(report.initialCrossings == 1);
  CHECK(report.finalCrossings == 0);
  CHECK(count_crossings(d, layers, report.ordering) == 0);
}

TEST_CASE("complete bipartite 2x2 keeps its single unavoidable crossing") {
  const Diagram d = boxes({"a1", "a2", "b1", "b2"}, {{"a1", "b1"}, {"a1", "b2"}, {"a2", "b1"}, {"a2", "b2"}});
  const Layers layers{0, 0, 1, 1};
  CHECK(brute_force_optimum(d, layers) == 1);
  CHECK(order_within_layers(d, layers).finalCrossings == 1);
}

TEST_CASE("Q_some lays out without crossings") {
  const Diagram d = diagram::build_queryvis(lower(testing::golden("q_some.sql")));
  const Layers layers = assign_layers(d);
  CHECK(brute_force_optimum(d, layers) == 0);
  CHECK(order_within_layers(d, layers).finalCrossings == 0);
}

TEST_CASE("coordinates") {
  const Diagram two = diagram::build_queryvis(lower("select distinct T.a from T where T.a = T.b"));
  const PositionedDiagram single = layout::layout(two);
  CHECK(single.nodeRects[1].height == 3);

  // Q_some: three layers, each followed by one gutter.
  const Diagram some = diagram::build_queryvis(lower(testing::golden("q_some.sql")));
  const PositionedDiagram pd = layout::layout(some);
  std::map<int, int> column;
  for (std::size_t i = 0; i < some.nodes.size(); ++i) {
    column[pd.layer[i]] = std::max(column[pd.layer[i]], pd.nodeRects[i].width);
  }
  int used = 0;
  for (const auto& [l, w] : column) used += w;
  CHECK(column.size() == 3);
  CHECK(pd.width - used == 3 * gutter_width({}, 0));
  // Widths follow the longest text plus a margin.
  CHECK(pd.nodeRects[1].width == static_cast<int>(std::string("Frequents").size()) + 2);

  // Q_only relational diagram: Likes inside the inner box inside the outer.
  const Diagram only = diagram::build_relational_diagram(lower(testing::golden("q_only.sql")));
  const PositionedDiagram po = layout::layout(only);
  const Rect likes = po.nodeRects[static_cast<std::size_t>(only.node_index("t2"))];
  const Rect serves = po.nodeRects[static_cast<std::size_t>(only.node_index("t1"))];
  const Rect outer = po.groupRects[0];
  const Rect inner = po.groupRects[1];
  CHECK(inner.contains(likes, 1));
  CHECK(outer.contains(inner, 1));
  CHECK(outer.contains(serves, 1));
  CHECK_FALSE(inner.overlaps(serves));
}

TEST_CASE("layout properties over generated queries") {
  int compared = 0;
  int optimal = 0;
  double worstRatio = 0;
  for (std::uint32_t seed = 0; seed < 200; ++seed) {
    testing::QueryGenerator gen(seed, {});
    const std::string source = testing::print_query(gen.generate());
    CAPTURE(source);
    const auto q = lower(source);
    const Diagram d = diagram::build_relational_diagram(q);
    const Layers layers = assign_layers(d);

    // SELECT alone on layer 0; every line within adjacent layers.
    for (std::size_t i = 0; i < d.nodes.size(); ++i) CHECK((layers[i] == 0) == (i == 0));
    for (const auto& e : d.edges) {
      if (!e.to) continue;
      const int a = layers[static_cast<std::size_t>(d.node_index(e.from.node))];
      const int b = layers[static_cast<std::size_t>(d.node_index(e.to->node))];
      CHECK(std::abs(a - b) <= 1);
    }

    const auto report = order_within_layers(d, layers);
    CHECK(report.finalCrossings <= report.initialCrossings);
    CHECK(report.finalCrossings == oracle_crossings(d, layers, report.ordering));
    CHECK(report.initialCrossings == oracle_crossings(d, layers, initial_ordering(d, layers)));

    const int best = brute_force_optimum(d, layers);
    if (best >= 0) {
      ++compared;
      CHECK(report.finalCrossings >= best);
      CHECK(report.finalCrossings <= 1.5 * best);
      if (report.finalCrossings == best) ++optimal;
      if (best > 0) worstRatio = std::max(worstRatio, double(report.finalCrossings) / best);
    }

    const PositionedDiagram pd = assign_coordinates(d, layers, report.ordering);
    CHECK(count_crossings(pd) == report.finalCrossings);
    for (std::size_t i = 0; i < pd.nodeRects.size(); ++i) {
      for (std::size_t j = i + 1; j < pd.nodeRects.size(); ++j) CHECK_FALSE(pd.nodeRects[i].overlaps(pd.nodeRects[j]));
    }
    for (std::size_t g = 0; g < d.groups.size(); ++g) {
      const Rect& r = pd.groupRects[g];
      for (std::size_t n = 0; n < d.nodes.size(); ++n) {
        const auto path = d.nodes[n].groupId ? group_path(d, d.group_index(*d.nodes[n].groupId)) : std::vector<int>{};
        const bool inside = std::find(path.begin(), path.end(), static_cast<int>(g)) != path.end();
        if (inside) CHECK(r.contains(pd.nodeRects[n], 1));
        else CHECK_FALSE(r.overlaps(pd.nodeRects[n]));
      }
      for (std::size_t h = 0; h < d.groups.size(); ++h) {
        if (h == g) continue;
        const auto path = group_path(d, static_cast<int>(h));
        const bool descendant = std::find(path.begin(), path.end(), static_cast<int>(g)) != path.end();
        const auto own = group_path(d, static_cast<int>(g));
        const bool ancestor = std::find(own.begin(), own.end(), static_cast<int>(h)) != own.end();
        if (descendant) CHECK(r.contains(pd.groupRects[h], 1));
        else if (!ancestor) CHECK_FALSE(r.overlaps(pd.groupRects[h]));
      }
    }
    CHECK(layout::layout(d) == pd);
  }
  MESSAGE("compared ", compared, ", optimal ", optimal, ", worst ratio ", worstRatio);
  CHECK(compared == 200);
  CHECK(worstRatio <= 1.5);
}
