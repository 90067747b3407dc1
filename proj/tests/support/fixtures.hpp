#pragma once

#include <string>
#include <vector>

#include "covplan/geometry.hpp"

namespace covplan::test {

inline Ring ring(std::initializer_list<Point> pts) { return Ring{std::vector<Point>(pts)}; }

inline PolygonWithHoles rect(double w, double h, double x0 = 0, double y0 = 0) {
  return {ring({{x0, y0}, {x0 + w, y0}, {x0 + w, y0 + h}, {x0, y0 + h}}), {}};
}

inline PolygonWithHoles unit_square() { return rect(1, 1); }

inline PolygonWithHoles l_shape() {
  return {ring({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}), {}};
}

// 3x2 outer with a 1x1 notch cut from the top middle
inline PolygonWithHoles u_shape() {
  return {ring({{0, 0}, {3, 0}, {3, 2}, {2, 2}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}), {}};
}

inline PolygonWithHoles square_with_hole(double side = 1.0, double hole_lo = 0.25,
                                         double hole_hi = 0.75) {
  PolygonWithHoles p = rect(side, side);
  p.holes.push_back(ring({{hole_lo, hole_lo}, {hole_lo, hole_hi}, {hole_hi, hole_hi}, {hole_hi, hole_lo}}));
  return p;
}

// Near-horizontal spike escaping between sweep offsets (first failure scenario).
inline PolygonWithHoles spike_env() {
  return {ring({{0, 0}, {10, 0}, {10, 0.4}, {14, 0.5}, {10, 0.6}, {10, 1}, {0, 1}}), {}};
}

// Shallow edge crossing several sweep offsets (second failure scenario).
inline PolygonWithHoles ramp_env() {
  return {ring({{0, 0}, {20, 0}, {20, 1.8}, {10, 1.8}, {0, 0.8}}), {}};
}

struct NamedEnv {
  std::string name;
  PolygonWithHoles env;
  double fov;
};

// Regression suite covering convex, rectilinear, non-monotone and holed shapes
// plus the two adversarial constructions.
inline std::vector<NamedEnv> regression_suite() {
  std::vector<NamedEnv> suite;
  auto add = [&](std::string name, PolygonWithHoles env, double fov) {
    repair_and_validate(env);
    suite.push_back({std::move(name), std::move(env), fov});
  };

  add("unit_square", unit_square(), 0.5);
  add("rect_2x1", rect(2, 1), 0.4);
  add("triangle", {ring({{0, 0}, {4, 0}, {0, 3}}), {}}, 0.5);
  add("hexagon",
      {ring({{2, 0}, {6, 0}, {8, 3}, {6, 6}, {2, 6}, {0, 3}}), {}}, 0.8);
  add("rotated_square", {ring({{2, 0}, {4, 2}, {2, 4}, {0, 2}}), {}}, 0.5);
  add("trapezoid", {ring({{0, 0}, {6, 0}, {4.5, 3}, {1.5, 3}}), {}}, 0.6);
  add("l_shape", l_shape(), 0.3);
  add("u_shape", u_shape(), 0.3);
  add("t_shape", {ring({{2, 0}, {4, 0}, {4, 3}, {6, 3}, {6, 5}, {0, 5}, {0, 3}, {2, 3}}), {}}, 0.6);
  add("plus_shape",
      {ring({{2, 0}, {4, 0}, {4, 2}, {6, 2}, {6, 4}, {4, 4}, {4, 6}, {2, 6}, {2, 4}, {0, 4},
             {0, 2}, {2, 2}}),
       {}},
      0.5);
  add("staircase",
      {ring({{0, 0}, {6, 0}, {6, 1}, {4, 1}, {4, 2}, {2, 2}, {2, 3}, {0, 3}}), {}}, 0.4);
  add("comb",
      {ring({{0, 0}, {7, 0}, {7, 4}, {6, 4}, {6, 1}, {5, 1}, {5, 4}, {4, 4}, {4, 1}, {3, 1},
             {3, 4}, {2, 4}, {2, 1}, {1, 1}, {1, 4}, {0, 4}}),
       {}},
      0.35);
  add("zigzag", {ring({{0, 0}, {8, 0}, {8, 3}, {6, 1.5}, {4, 3}, {2, 1.5}, {0, 3}}), {}}, 0.5);
  add("square_with_hole", square_with_hole(4, 1.5, 2.5), 0.5);
  {
    PolygonWithHoles env = rect(8, 6);
    env.holes.push_back(ring({{1, 1}, {1, 2.5}, {2.5, 2.5}, {2.5, 1}}));
    env.holes.push_back(ring({{5, 3}, {5, 5}, {7, 5}, {7, 3}}));
    add("two_holes", env, 0.6);
  }
  {
    PolygonWithHoles env = rect(10, 8);
    env.holes.push_back(ring({{1, 1}, {1, 2}, {2, 2}, {2, 1}}));
    env.holes.push_back(ring({{4, 5}, {4, 7}, {6, 7}, {6, 5}}));
    env.holes.push_back(ring({{7, 1}, {7, 3}, {9, 3}, {9, 1}}));
    add("three_holes", env, 0.7);
  }
  {
    // four-point star obstacle in a square workspace
    PolygonWithHoles env = rect(20, 20);
    env.holes.push_back(ring({{14, 10},
                              {11.06, 11.06},
                              {10, 14},
                              {8.94, 11.06},
                              {6, 10},
                              {8.94, 8.94},
                              {10, 6},
                              {11.06, 8.94}}));
    add("star_obstacle", env, 1.2);
  }
  {
    PolygonWithHoles env = rect(6, 6);
    env.holes.push_back(ring({{2, 2}, {2.4, 3}, {2, 4}, {3.4, 3.6}, {4, 4.4}, {4.2, 3},
                              {4, 2.2}, {3, 2.6}}));
    add("concave_hole", env, 0.6);
  }
  add("diamond_with_hole",
      [] {
        PolygonWithHoles env{ring({{5, 0}, {10, 5}, {5, 10}, {0, 5}}), {}};
        env.holes.push_back(ring({{4, 4}, {4, 6}, {6, 6}, {6, 4}}));
        return env;
      }(),
      0.8);
  add("notched_rect", {ring({{0, 0}, {9, 0}, {9, 4}, {6, 4}, {6, 2}, {5, 2}, {5, 4}, {0, 4}}), {}},
      0.5);
  add("spike", spike_env(), 0.5);
  add("shallow_ramp", ramp_env(), 0.5);
  return suite;
}

}  // namespace covplan::test
