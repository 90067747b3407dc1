#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "covplan/coverage_graph.hpp"
#include "covplan/errors.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/random_gen.hpp"

using namespace covplan;
using namespace covplan::test;

namespace {

std::vector<ServiceTrack> two_tracks() {
  return {{{{0, 0.25}, {1, 0.25}}, 0, TrackKind::sweep},
          {{{0, 0.75}, {1, 0.75}}, 0, TrackKind::sweep}};
}

}  // namespace

TEST_CASE("build_vertices") {
  SUBCASE("dedup across endpoint classes") {
    int depot_id = -1;
    const auto verts = build_vertices(unit_square(), two_tracks(), {0, 0}, &depot_id);
    // 4 track endpoints + 4 corners + depot(=corner) deduped
    CHECK(verts.size() == 8);
    CHECK(depot_id >= 0);
    CHECK(nearly_equal(verts[static_cast<std::size_t>(depot_id)], {0, 0}));
  }
  SUBCASE("depot coinciding with a track endpoint adds nothing") {
    int depot_id = -1;
    const auto verts = build_vertices(unit_square(), two_tracks(), {0, 0.25}, &depot_id);
    CHECK(verts.size() == 8);
    CHECK(nearly_equal(verts[static_cast<std::size_t>(depot_id)], {0, 0.25}));
  }
  SUBCASE("depot in a hole is rejected") {
    CHECK_THROWS_AS(build_vertices(square_with_hole(4, 1.5, 2.5), {}, {2, 2}, nullptr),
                    InvalidDepot);
  }
}

TEST_CASE("visibility_edges") {
  SUBCASE("convex environment yields the complete graph") {
    int depot_id = -1;
    const auto verts = build_vertices(unit_square(), two_tracks(), {0, 0}, &depot_id);
    const auto edges = visibility_edges(unit_square(), verts, false, CostModel::length());
    CHECK(edges.size() == verts.size() * (verts.size() - 1) / 2);
  }
  SUBCASE("holes block, flying over restores") {
    const PolygonWithHoles env = square_with_hole(4, 1.5, 2.5);
    const std::vector<Point> verts{{0.5, 2.0}, {3.5, 2.0}};
    const auto blocked = visibility_edges(env, verts, false, CostModel::length());
    CHECK(blocked.empty());
    const auto over = visibility_edges(env, verts, true, CostModel::length());
    CHECK(over.size() == 1);
  }
  SUBCASE("matches the brute-force oracle on random environments") {
    std::mt19937_64 rng(90);
    for (int k = 0; k < 12; ++k) {
      const PolygonWithHoles env = random_polygon(rng, 8 + k, k % 3);
      std::vector<Point> verts;
      for (const Point& p : env.outer.vertices) verts.push_back(p);
      for (const Ring& h : env.holes)
        for (const Point& p : h.vertices) verts.push_back(p);
      for (bool fly : {false, true}) {
        const auto edges = visibility_edges(env, verts, fly, CostModel::length());
        std::size_t oracle_count = 0;
        for (std::size_t i = 0; i < verts.size(); ++i)
          for (std::size_t j = i + 1; j < verts.size(); ++j) {
            if (dist(verts[i], verts[j]) <= kEpsGeom) continue;
            if (visible_oracle(env, verts[i], verts[j], fly)) ++oracle_count;
          }
        CAPTURE(k);
        CAPTURE(fly);
        CHECK(edges.size() == oracle_count);
      }
    }
  }
}

TEST_CASE("require_tracks") {
  int depot_id = -1;
  const auto verts = build_vertices(unit_square(), two_tracks(), {0, 0}, &depot_id);
  const auto rb = require_tracks(two_tracks(), verts, CostModel::length());
  REQUIRE(rb.required.size() == 2);
  REQUIRE(rb.deadhead_twins.size() == 2);
  CHECK(rb.required[0].values.cost_fwd == doctest::Approx(1.0));
  CHECK(rb.required[0].values.cost_rev == doctest::Approx(1.0));

  SUBCASE("wind makes a track cheaper along the blow-to direction") {
    const CostModel m = CostModel::wind_model(3.33, 5.0, {1.39, 270.0});  // blowing east
    const auto windy = require_tracks(two_tracks(), verts, m);
    CHECK(windy.required[0].values.cost_fwd < windy.required[0].values.cost_rev);
  }
  SUBCASE("zero tracks build an empty required set") {
    const auto empty = require_tracks({}, verts, CostModel::length());
    CHECK(empty.required.empty());
  }
}

TEST_CASE("build_coverage_graph deduplicates required deadhead twins") {
  const CoverageGraph g = build_coverage_graph(unit_square(), two_tracks(), {0, 0},
                                               CostModel::length(), kInfiniteCapacity, false);
  CHECK(g.required.size() == 2);
  std::set<std::pair<int, int>> seen;
  for (const GraphEdge& e : g.deadhead) {
    const auto key = std::pair{std::min(e.u, e.v), std::max(e.u, e.v)};
    CHECK(seen.insert(key).second);
  }
  CHECK(g.deadhead.size() == g.vertices.size() * (g.vertices.size() - 1) / 2);
}

TEST_CASE("shortest_deadheads") {
  SUBCASE("complete Euclidean graph: direct edge is optimal") {
    std::mt19937_64 rng(5);
    const CoverageGraph g = random_instance(rng, {.vertices = 7, .required = 3});
    const DeadheadPathTable table = DeadheadPathTable::build(g);
    CHECK(table.cost(g.depot, g.depot) == doctest::Approx(0.0));
    for (const GraphEdge& e : g.required) {
      const double direct =
          dist(g.vertices[static_cast<std::size_t>(g.depot)], g.vertices[static_cast<std::size_t>(e.u)]) / 2.0;
      CHECK(table.cost(g.depot, e.u) == doctest::Approx(direct));
      CHECK(table.path(g.depot, e.u).size() == (e.u == g.depot ? 1 : 2));
    }
  }
  SUBCASE("hole detour beats the straight line it cannot take") {
    // 6-vertex instance around a blocking hole
    const PolygonWithHoles env = square_with_hole(4, 1.5, 2.5);
    const std::vector<ServiceTrack> tracks{{{{0.5, 2}, {1.2, 2}}, 0, TrackKind::sweep},
                                           {{{2.8, 2}, {3.5, 2}}, 0, TrackKind::sweep}};
    const CoverageGraph g = build_coverage_graph(env, tracks, {0.5, 0.5}, CostModel::length(),
                                                 kInfiniteCapacity, false);
    const DeadheadPathTable table = DeadheadPathTable::build(g);
    // locate the two inner endpoints
    int a = -1, b = -1;
    for (std::size_t i = 0; i < g.vertices.size(); ++i) {
      if (nearly_equal(g.vertices[i], {1.2, 2})) a = static_cast<int>(i);
      if (nearly_equal(g.vertices[i], {2.8, 2})) b = static_cast<int>(i);
    }
    REQUIRE(a >= 0);
    REQUIRE(b >= 0);
    const double straight = dist({1.2, 2}, {2.8, 2});
    CHECK(table.cost(a, b) > straight + 0.1);
    // brute-force path enumeration over intermediate vertices
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t m1 = 0; m1 < g.vertices.size(); ++m1) {
      for (std::size_t m2 = 0; m2 < g.vertices.size(); ++m2) {
        bool leg1 = segment_in_free_space(env, {g.vertices[static_cast<std::size_t>(a)], g.vertices[m1]}, false);
        bool leg2 = segment_in_free_space(env, {g.vertices[m1], g.vertices[m2]}, false);
        bool leg3 = segment_in_free_space(env, {g.vertices[m2], g.vertices[static_cast<std::size_t>(b)]}, false);
        if (!leg1 || !leg2 || !leg3) continue;
        best = std::min(best, dist(g.vertices[static_cast<std::size_t>(a)], g.vertices[m1]) +
                                  dist(g.vertices[m1], g.vertices[m2]) +
                                  dist(g.vertices[m2], g.vertices[static_cast<std::size_t>(b)]));
      }
    }
    CHECK(table.cost(a, b) == doctest::Approx(best).epsilon(1e-9));
  }
  SUBCASE("symmetric model gives a symmetric table") {
    std::mt19937_64 rng(6);
    const CoverageGraph g = random_instance(rng, {.vertices = 8, .required = 4});
    const DeadheadPathTable table = DeadheadPathTable::build(g);
    for (const GraphEdge& e : g.required) {
      CHECK(table.cost(g.depot, e.u) == doctest::Approx(table.cost(e.u, g.depot)));
      CHECK(table.cost(e.u, e.v) == doctest::Approx(table.cost(e.v, e.u)));
    }
  }
  SUBCASE("disconnected instance is reported") {
    CoverageGraph g;
    g.vertices = {{0, 0}, {1, 0}, {5, 5}};
    g.depot = 0;
    g.required.push_back({0, 2, EdgeValues{1, 1, 1, 1}});
    g.deadhead.push_back({0, 1, EdgeValues{1, 1, 1, 1}});
    CHECK_THROWS_AS(DeadheadPathTable::build(g), DisconnectedInstance);
  }
}

TEST_CASE("wind model table keeps the round-trip speed bound") {
  // fwd+rev cost of any pair is bounded by twice distance over the best ground speed
  const CostModel m = CostModel::wind_model(3.33, 5.0, {1.39, 225.0});
  const PolygonWithHoles env = square_with_hole(40, 15, 25);
  const std::vector<ServiceTrack> tracks{{{{2, 2}, {12, 2}}, 0, TrackKind::sweep},
                                         {{{2, 30}, {30, 38}}, 0, TrackKind::sweep}};
  const CoverageGraph g = build_coverage_graph(env, tracks, {1, 1}, m, kInfiniteCapacity, false);
  const DeadheadPathTable table = DeadheadPathTable::build(g);
  const double max_speed = 5.0 + 1.39;
  for (const GraphEdge& e : g.required) {
    for (int v : {e.u, e.v}) {
      const double euclid = dist(g.vertices[static_cast<std::size_t>(g.depot)],
                                 g.vertices[static_cast<std::size_t>(v)]);
      CHECK(table.cost(g.depot, v) + table.cost(v, g.depot) >= 2.0 * euclid / max_speed - 1e-9);
    }
  }
}

TEST_CASE("instance JSON round trip") {
  std::mt19937_64 rng(11);
  const CoverageGraph g = random_instance(rng, {.vertices = 6, .required = 3,
                                                .asymmetric = true, .finite_capacity = true});
  const CoverageGraph back = instance_from_json(instance_to_json(g));
  REQUIRE(back.vertices.size() == g.vertices.size());
  REQUIRE(back.required.size() == g.required.size());
  REQUIRE(back.deadhead.size() == g.deadhead.size());
  CHECK(back.depot == g.depot);
  CHECK(back.capacity == doctest::Approx(g.capacity));
  for (std::size_t i = 0; i < g.required.size(); ++i) {
    CHECK(back.required[i].u == g.required[i].u);
    CHECK(back.required[i].values.cost_rev == doctest::Approx(g.required[i].values.cost_rev));
    CHECK(back.required[i].values.demand_fwd == doctest::Approx(g.required[i].values.demand_fwd));
  }
  SUBCASE("infinite capacity survives the round trip") {
    CoverageGraph inf = g;
    inf.capacity = kInfiniteCapacity;
    CHECK(instance_from_json(instance_to_json(inf)).capacity == kInfiniteCapacity);
  }
  SUBCASE("malformed text is a format error") {
    CHECK_THROWS_AS(instance_from_json("{not json"), FormatError);
    CHECK_THROWS_AS(instance_from_json(R"({"vertices": []})"), FormatError);
  }
}
