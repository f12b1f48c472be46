#include "doctest.h"
#include "helpers.hpp"
#include "sevgae/aamg.hpp"

using namespace sevgae;

namespace {

// Path graph 0-1-2-3 plus a pendant 4 on node 1.
Aamg fixture_graph() {
  Aamg g;
  g.id = "fixture";
  g.n = 5;
  g.node_class = {0, 1, 1, 1, 1};
  g.node_area = {0.0, 0.2, 0.2, 0.2, 0.2};
  g.node_center = {{0.5, 0.5}, {0.2, 0.2}, {0.4, 0.2}, {0.6, 0.2}, {0.2, 0.4}};
  g.edges = {{0, 1, 0}, {1, 2, 0}, {1, 4, 0}, {2, 3, 0}};
  return g;
}

}  // namespace

TEST_CASE("validate accepts the fixture") {
  auto schema = LabelSchema::make(SchemaVariant::Six);
  CHECK(validate(fixture_graph(), schema).ok());
}

TEST_CASE("validate reports violations as data") {
  auto schema = LabelSchema::make(SchemaVariant::Six);
  Aamg g = fixture_graph();
  g.edges.push_back({2, 2, 0});           // self loop
  g.edges.push_back({3, 1, 0});           // unordered
  g.edges.push_back({1, 2, 0});           // duplicate
  g.node_area[1] = 1.5;                   // out of range
  auto r = validate(g, schema);
  CHECK_FALSE(r.ok());
  CHECK(r.violations.size() >= 4);
}

TEST_CASE("interior area budget excludes outdoor") {
  auto schema = LabelSchema::make(SchemaVariant::Six);
  Aamg g = fixture_graph();
  g.node_area = {1.0, 0.25, 0.25, 0.25, 0.25};  // outdoor may carry any area
  CHECK(validate(g, schema).ok());
  g.node_area = {0.0, 0.5, 0.25, 0.25, 0.25};
  CHECK_FALSE(validate(g, schema).ok());
}

TEST_CASE("degree ordering with tie-break") {
  // Degrees: node0=1 node1=3 node2=2 node3=1 node4=1.
  auto ord = canonical_order(fixture_graph(), OrderingKind::DegreeDesc);
  CHECK(ord.permutation == std::vector<int>{1, 2, 0, 3, 4});
}

TEST_CASE("average neighbor degree ordering") {
  // avg nbr deg: 0->3, 1->(1+2+1)/3, 2->(3+1)/2, 3->2, 4->3.
  auto ord = canonical_order(fixture_graph(), OrderingKind::AvgNeighborDegree);
  CHECK(ord.permutation == std::vector<int>{0, 4, 2, 3, 1});
}

TEST_CASE("closeness ordering matches hand-computed Wasserman-Faust values") {
  // Distances from 1: {1,0,1,2,1} sum 5 -> c=4/5*1=0.8 (n-1=4, all reachable).
  auto g = fixture_graph();
  auto c = closeness_centrality(g.simple_adjacency());
  CHECK(c[1] == doctest::Approx(4.0 / 5.0).epsilon(1e-12));
  // Node 0: dists {0,1,2,3,2} sum 8 -> 4/8 = 0.5.
  CHECK(c[0] == doctest::Approx(0.5).epsilon(1e-12));
  auto ord = canonical_order(g, OrderingKind::Closeness);
  CHECK(ord.permutation.front() == 1);
}

TEST_CASE("betweenness matches hand-computed values on a path") {
  // Path 0-1-2-3: betweenness 0,2,2,0.
  Aamg g;
  g.n = 4;
  g.node_class = {0, 1, 1, 1};
  g.node_area = {0, .1, .1, .1};
  g.node_center.assign(4, {0.5, 0.5});
  g.edges = {{0, 1, 0}, {1, 2, 0}, {2, 3, 0}};
  auto b = betweenness_centrality(g.simple_adjacency());
  CHECK(b[0] == doctest::Approx(0.0));
  CHECK(b[1] == doctest::Approx(2.0));
  CHECK(b[2] == doctest::Approx(2.0));
  CHECK(b[3] == doctest::Approx(0.0));
}

TEST_CASE("ordering family has four fixed kinds") {
  auto fam = ordering_family(fixture_graph());
  REQUIRE(fam.size() == 4);
  CHECK(fam[0].kind == OrderingKind::DegreeDesc);
  CHECK(fam[1].kind == OrderingKind::AvgNeighborDegree);
  CHECK(fam[2].kind == OrderingKind::Closeness);
  CHECK(fam[3].kind == OrderingKind::Betweenness);
}

TEST_CASE("hop distances clip and mark disconnected") {
  Aamg g = fixture_graph();
  auto d = hop_distances(g, 2);
  CHECK(d.entries[0][1] == 1);
  CHECK(d.entries[0][3] == 2);  // true distance 3, clipped
  g.edges.pop_back();           // disconnect node 3
  g.edges.pop_back();
  auto d2 = hop_distances(g, 8);
  CHECK(d2.entries[0][3] == 8);
}

TEST_CASE("apply_permutation preserves structure and round-trips") {
  Aamg g = fixture_graph();
  auto ord = canonical_order(g, OrderingKind::DegreeDesc);
  Aamg p = apply_permutation(g, ord);
  auto schema = LabelSchema::make(SchemaVariant::Six);
  CHECK(validate(p, schema).ok());
  CHECK(p.edges.size() == g.edges.size());
  CHECK(p.degrees()[0] == 3);  // highest-degree node moved to front
  // Inverse permutation restores the original graph.
  CanonicalOrdering inv{ord.kind, std::vector<int>(g.n)};
  for (int i = 0; i < g.n; ++i) inv.permutation[ord.permutation[i]] = i;
  Aamg back = apply_permutation(p, inv);
  CHECK(back == g);
}

TEST_CASE("ordering statistics use the collapsed simple graph") {
  Aamg g = fixture_graph();
  Aamg multi = g;
  multi.edges.push_back({0, 1, 1});  // extra typed edge, same pair
  for (auto kind : {OrderingKind::DegreeDesc, OrderingKind::AvgNeighborDegree,
                    OrderingKind::Closeness, OrderingKind::Betweenness}) {
    CHECK(canonical_order(g, kind).permutation ==
          canonical_order(multi, kind).permutation);
  }
}
