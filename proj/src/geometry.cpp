#include "covplan/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <optional>

#include "covplan/errors.hpp"

namespace covplan {

namespace {

constexpr double kPi = std::numbers::pi;

double orient(Point a, Point b, Point c) { return cross(b - a, c - a); }

}  // namespace

Point Segment::dir() const {
  const double len = length();
  if (len <= 0) return {0, 0};
  return {(b.x - a.x) / len, (b.y - a.y) / len};
}

Direction::Direction(double angle_rad) {
  double a = std::fmod(angle_rad, kPi);
  if (a < 0) a += kPi;
  if (a >= kPi - 1e-12) a = 0.0;
  angle_ = a;
}

Direction Direction::of(Point vec) { return Direction(std::atan2(vec.y, vec.x)); }

double direction_distance(Direction a, Direction b) {
  double d = std::abs(a.angle() - b.angle());
  return std::min(d, kPi - d);
}

double signed_area(const Ring& ring) {
  if (ring.vertices.size() < 3) throw InvalidRing("ring needs at least 3 vertices");
  double twice = 0.0;
  const auto& v = ring.vertices;
  for (std::size_t i = 0, n = v.size(); i < n; ++i) {
    const Point& a = v[i];
    const Point& b = v[(i + 1) % n];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * twice;
}

double perimeter(const Ring& ring) {
  double total = 0.0;
  const auto& v = ring.vertices;
  for (std::size_t i = 0, n = v.size(); i < n; ++i) total += dist(v[i], v[(i + 1) % n]);
  return total;
}

void remove_duplicate_vertices(Ring& ring, double eps) {
  std::vector<Point> out;
  for (const Point& p : ring.vertices) {
    if (out.empty() || !nearly_equal(out.back(), p, eps)) out.push_back(p);
  }
  while (out.size() >= 2 && nearly_equal(out.front(), out.back(), eps)) out.pop_back();
  ring.vertices = std::move(out);
}

void remove_collinear_vertices(Ring& ring) {
  auto& v = ring.vertices;
  bool changed = true;
  while (changed && v.size() > 3) {
    changed = false;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Point prev = v[(i + v.size() - 1) % v.size()];
      const Point next = v[(i + 1) % v.size()];
      const Point d1 = v[i] - prev;
      const Point d2 = next - v[i];
      if (std::abs(cross(d1, d2)) <= kEpsGeom * (norm(d1) + norm(d2)) && dot(d1, d2) > 0) {
        v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
}

double distance_to_segment(Point p, Point a, Point b) {
  const Point ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 <= 0) return dist(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return dist(p, a + t * ab);
}

namespace {

double segment_segment_distance(Point a, Point b, Point c, Point d) {
  const double o1 = orient(a, b, c);
  const double o2 = orient(a, b, d);
  const double o3 = orient(c, d, a);
  const double o4 = orient(c, d, b);
  if (((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != o2 && o3 != o4) return 0.0;
  return std::min(std::min(distance_to_segment(c, a, b), distance_to_segment(d, a, b)),
                  std::min(distance_to_segment(a, c, d), distance_to_segment(b, c, d)));
}

}  // namespace

bool ring_is_simple(const Ring& ring, double eps) {
  const auto& v = ring.vertices;
  const std::size_t n = v.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = v[i];
    const Point b = v[(i + 1) % n];
    if (dist(a, b) < eps) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point c = v[j];
      const Point d = v[(j + 1) % n];
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) {
        // consecutive edges (p,q),(q,r) may only meet at the shared vertex q
        const Point p = (j == i + 1) ? a : c;
        const Point q = (j == i + 1) ? b : a;
        const Point r = (j == i + 1) ? d : b;
        if (distance_to_segment(r, p, q) < eps && !nearly_equal(r, q, eps)) return false;
        if (distance_to_segment(p, q, r) < eps && !nearly_equal(p, q, eps)) return false;
      } else {
        if (segment_segment_distance(a, b, c, d) < eps) return false;
      }
    }
  }
  return true;
}

double PolygonWithHoles::area() const {
  double total = signed_area(outer);
  for (const Ring& h : holes) total += signed_area(h);
  return total;
}

BoundingBox bounding_box(const PolygonWithHoles& poly) {
  BoundingBox bb{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
                 std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
  for (const Point& p : poly.outer.vertices) {
    bb.min_x = std::min(bb.min_x, p.x);
    bb.min_y = std::min(bb.min_y, p.y);
    bb.max_x = std::max(bb.max_x, p.x);
    bb.max_y = std::max(bb.max_y, p.y);
  }
  return bb;
}

bool repair_and_validate(PolygonWithHoles& poly) {
  bool repaired = false;
  remove_duplicate_vertices(poly.outer);
  for (Ring& h : poly.holes) remove_duplicate_vertices(h);

  if (poly.outer.vertices.size() < 3) throw GeometryError("outer ring has fewer than 3 distinct vertices");
  if (signed_area(poly.outer) < 0) {
    std::reverse(poly.outer.vertices.begin(), poly.outer.vertices.end());
    repaired = true;
  }
  if (!ring_is_simple(poly.outer)) throw GeometryError("outer ring is not simple");

  for (std::size_t h = 0; h < poly.holes.size(); ++h) {
    Ring& hole = poly.holes[h];
    const std::string label = "hole " + std::to_string(h);
    if (hole.vertices.size() < 3) throw GeometryError(label + " has fewer than 3 distinct vertices");
    if (signed_area(hole) > 0) {
      std::reverse(hole.vertices.begin(), hole.vertices.end());
      repaired = true;
    }
    if (!ring_is_simple(hole)) throw GeometryError(label + " is not simple");
    for (const Point& p : hole.vertices) {
      if (!point_in_ring(p, poly.outer) || distance_to_ring(p, poly.outer) <= kEpsGeom)
        throw GeometryError(label + " is not strictly inside the outer ring");
    }
    // hole edges may not reach the outer boundary either
    const auto& hv = hole.vertices;
    const auto& ov = poly.outer.vertices;
    for (std::size_t a = 0; a < hv.size(); ++a) {
      for (std::size_t b = 0; b < ov.size(); ++b) {
        if (segment_segment_distance(hv[a], hv[(a + 1) % hv.size()], ov[b],
                                     ov[(b + 1) % ov.size()]) <= kEpsGeom)
          throw GeometryError(label + " touches the outer ring");
      }
    }
  }
  // pairwise hole disjointness
  for (std::size_t i = 0; i < poly.holes.size(); ++i) {
    for (std::size_t j = i + 1; j < poly.holes.size(); ++j) {
      const auto& vi = poly.holes[i].vertices;
      const auto& vj = poly.holes[j].vertices;
      for (std::size_t a = 0; a < vi.size(); ++a) {
        for (std::size_t b = 0; b < vj.size(); ++b) {
          if (segment_segment_distance(vi[a], vi[(a + 1) % vi.size()], vj[b],
                                       vj[(b + 1) % vj.size()]) <= kEpsGeom)
            throw GeometryError("holes " + std::to_string(i) + " and " + std::to_string(j) +
                                " overlap");
        }
      }
      if (point_in_ring(vj[0], poly.holes[i]) || point_in_ring(vi[0], poly.holes[j]))
        throw GeometryError("holes " + std::to_string(i) + " and " + std::to_string(j) + " nest");
    }
  }
  return repaired;
}

bool is_reflex(const PolygonWithHoles& poly, std::size_t ring_index, std::size_t vertex_index) {
  const Ring* ring = nullptr;
  if (ring_index == 0) {
    ring = &poly.outer;
  } else {
    if (ring_index - 1 >= poly.holes.size()) throw IndexError("ring index out of range");
    ring = &poly.holes[ring_index - 1];
  }
  const auto& v = ring->vertices;
  if (vertex_index >= v.size()) throw IndexError("vertex index out of range");
  const Point prev = v[(vertex_index + v.size() - 1) % v.size()];
  const Point cur = v[vertex_index];
  const Point next = v[(vertex_index + 1) % v.size()];
  // Interior-left orientation (outer CCW, holes CW) makes this test uniform.
  return cross(cur - prev, next - cur) < -kEpsGeom;
}

Point rotate_to_frame(Point p, Direction dir) {
  const double c = std::cos(dir.angle());
  const double s = std::sin(dir.angle());
  return {p.x * c + p.y * s, -p.x * s + p.y * c};
}

Point rotate_from_frame(Point p, Direction dir) {
  const double c = std::cos(dir.angle());
  const double s = std::sin(dir.angle());
  return {p.x * c - p.y * s, p.x * s + p.y * c};
}

namespace {

PolygonWithHoles map_polygon(const PolygonWithHoles& poly, Point (*f)(Point, Direction),
                             Direction dir) {
  PolygonWithHoles out = poly;
  for (Point& p : out.outer.vertices) p = f(p, dir);
  for (Ring& h : out.holes)
    for (Point& p : h.vertices) p = f(p, dir);
  return out;
}

}  // namespace

PolygonWithHoles rotate_frame(const PolygonWithHoles& poly, Direction dir) {
  return map_polygon(poly, &rotate_to_frame, dir);
}

PolygonWithHoles unrotate_frame(const PolygonWithHoles& poly, Direction dir) {
  return map_polygon(poly, &rotate_from_frame, dir);
}

bool point_in_ring(Point p, const Ring& ring) {
  bool inside = false;
  const auto& v = ring.vertices;
  const std::size_t n = v.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point a = v[j];
    const Point b = v[i];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double xint = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < xint) inside = !inside;
    }
  }
  return inside;
}

double distance_to_ring(Point p, const Ring& ring) {
  double best = std::numeric_limits<double>::max();
  const auto& v = ring.vertices;
  for (std::size_t i = 0, n = v.size(); i < n; ++i)
    best = std::min(best, distance_to_segment(p, v[i], v[(i + 1) % n]));
  return best;
}

bool in_free_space(const PolygonWithHoles& poly, Point p, double eps) {
  const bool on_outer = distance_to_ring(p, poly.outer) <= eps;
  if (!on_outer && !point_in_ring(p, poly.outer)) return false;
  for (const Ring& h : poly.holes) {
    if (distance_to_ring(p, h) <= eps) continue;  // hole boundary stays in the closure
    if (point_in_ring(p, h)) return false;
  }
  return true;
}

std::vector<SweepCrossing> sweep_crossings(const PolygonWithHoles& poly, double y) {
  std::vector<SweepCrossing> out;
  auto scan = [&](const Ring& ring, int ring_id) {
    const auto& v = ring.vertices;
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point a = v[i];
      const Point b = v[(i + 1) % n];
      // a vertex on the line counts as below it
      const bool below_a = a.y <= y + kEpsGeom;
      const bool below_b = b.y <= y + kEpsGeom;
      if (below_a == below_b) continue;
      double x;
      if (std::abs(a.y - y) <= kEpsGeom) {
        x = a.x;
      } else if (std::abs(b.y - y) <= kEpsGeom) {
        x = b.x;
      } else {
        x = a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y);
      }
      out.push_back({x, ring_id, static_cast<int>(i)});
    }
  };
  scan(poly.outer, -1);
  for (std::size_t h = 0; h < poly.holes.size(); ++h) scan(poly.holes[h], static_cast<int>(h));
  std::sort(out.begin(), out.end(), [](const SweepCrossing& a, const SweepCrossing& b) {
    if (a.x != b.x) return a.x < b.x;
    if (a.ring != b.ring) return a.ring < b.ring;
    return a.edge < b.edge;
  });
  return out;
}

std::vector<Interval> sweep_intersections(const PolygonWithHoles& poly, double y) {
  const auto crossings = sweep_crossings(poly, y);
  std::vector<Interval> out;
  for (std::size_t i = 0; i + 1 < crossings.size(); i += 2) {
    const double lo = crossings[i].x;
    const double hi = crossings[i + 1].x;
    if (hi - lo <= kEpsGeom) continue;
    if (!out.empty() && lo - out.back().hi <= kEpsGeom) {
      out.back().hi = hi;  // merge touching intervals
    } else {
      out.push_back({lo, hi});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// split_by_line
// ---------------------------------------------------------------------------

namespace {

struct Chain {
  std::vector<Point> pts;  // first and last lie on the cut line
  int start_cross = -1;
  int end_cross = -1;
};

struct SideBuild {
  std::vector<Chain> chains;
  std::vector<Ring> untouched;  // rings entirely on this side
};

struct CrossEvent {
  double t = 0;
  Point p;
};

// Rings assembled from chains joined by bridges along the cut line.
std::vector<Ring> assemble_side(const SideBuild& side, const std::vector<CrossEvent>& events,
                                bool left_side) {
  std::vector<Ring> rings;
  std::vector<int> chain_at_start(events.size(), -1);
  for (std::size_t c = 0; c < side.chains.size(); ++c)
    chain_at_start[static_cast<std::size_t>(side.chains[c].start_cross)] = static_cast<int>(c);

  std::vector<bool> used(side.chains.size(), false);
  for (std::size_t c0 = 0; c0 < side.chains.size(); ++c0) {
    if (used[c0]) continue;
    Ring ring;
    std::size_t c = c0;
    while (!used[c]) {
      used[c] = true;
      for (const Point& p : side.chains[c].pts) {
        if (ring.vertices.empty() || !nearly_equal(ring.vertices.back(), p)) ring.vertices.push_back(p);
      }
      const int end = side.chains[c].end_cross;
      // For the left side the interior interval runs (even -> odd); right side reversed.
      int partner;
      if (left_side) {
        if (end % 2 != 0) throw GeometryError("degenerate cut: unmatched crossing");
        partner = end + 1;
      } else {
        if (end % 2 != 1) throw GeometryError("degenerate cut: unmatched crossing");
        partner = end - 1;
      }
      if (partner < 0 || partner >= static_cast<int>(events.size()))
        throw GeometryError("degenerate cut: bridge partner out of range");
      const int next = chain_at_start[static_cast<std::size_t>(partner)];
      if (next < 0) throw GeometryError("degenerate cut: no chain at bridge endpoint");
      c = static_cast<std::size_t>(next);
    }
    remove_duplicate_vertices(ring);
    if (ring.vertices.size() >= 3) rings.push_back(std::move(ring));
  }
  for (const Ring& r : side.untouched) rings.push_back(r);
  return rings;
}

std::vector<PolygonWithHoles> group_rings(std::vector<Ring> rings, double min_area) {
  std::vector<Ring> outers;
  std::vector<Ring> holes;
  for (Ring& r : rings) {
    remove_collinear_vertices(r);
    if (r.vertices.size() < 3) continue;
    const double a = signed_area(r);
    if (std::abs(a) <= min_area) continue;
    if (a > 0) {
      outers.push_back(std::move(r));
    } else {
      holes.push_back(std::move(r));
    }
  }
  std::vector<PolygonWithHoles> pieces;
  pieces.reserve(outers.size());
  for (Ring& o : outers) pieces.push_back({std::move(o), {}});
  for (Ring& h : holes) {
    int best = -1;
    double best_area = std::numeric_limits<double>::max();
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      if (point_in_ring(h.vertices[0], pieces[i].outer)) {
        const double a = signed_area(pieces[i].outer);
        if (a < best_area) {
          best_area = a;
          best = static_cast<int>(i);
        }
      }
    }
    if (best < 0) throw GeometryError("cut produced a hole with no containing piece");
    pieces[static_cast<std::size_t>(best)].holes.push_back(std::move(h));
  }
  return pieces;
}

}  // namespace

std::vector<PolygonWithHoles> split_by_line(const PolygonWithHoles& poly, const InfiniteLine& line) {
  const Point d = line.dir.unit();
  const Point n = line.dir.normal();
  auto sdist = [&](Point p) { return dot(n, p - line.anchor); };
  auto tparam = [&](Point p) { return dot(d, p - line.anchor); };

  std::vector<const Ring*> rings;
  rings.push_back(&poly.outer);
  for (const Ring& h : poly.holes) rings.push_back(&h);

  // side: +1 left of the line, -1 right; vertices on the line count as right
  auto side_of = [&](Point p) { return sdist(p) > kEpsGeom ? +1 : -1; };

  bool any_left = false;
  bool any_right = false;
  for (const Ring* r : rings)
    for (const Point& p : r->vertices) (side_of(p) > 0 ? any_left : any_right) = true;
  if (!any_left || !any_right) return {poly};

  // Crossing points, collected per ring edge, then globally ordered along the line.
  struct RawCross {
    Point p;
    double t;
    int ring, edge;
  };
  std::vector<RawCross> raw;
  for (std::size_t r = 0; r < rings.size(); ++r) {
    const auto& v = rings[r]->vertices;
    for (std::size_t i = 0, m = v.size(); i < m; ++i) {
      const Point a = v[i];
      const Point b = v[(i + 1) % m];
      if (side_of(a) == side_of(b)) continue;
      Point cp;
      const double sa = sdist(a);
      const double sb = sdist(b);
      if (std::abs(sa) <= kEpsGeom) {
        cp = a;
      } else if (std::abs(sb) <= kEpsGeom) {
        cp = b;
      } else {
        const double t = sa / (sa - sb);
        cp = a + t * (b - a);
      }
      raw.push_back({cp, tparam(cp), static_cast<int>(r), static_cast<int>(i)});
    }
  }
  if (raw.size() % 2 != 0) throw GeometryError("degenerate cut: odd crossing count");
  std::sort(raw.begin(), raw.end(), [](const RawCross& a, const RawCross& b) {
    if (a.t != b.t) return a.t < b.t;
    if (a.ring != b.ring) return a.ring < b.ring;
    return a.edge < b.edge;
  });
  std::vector<CrossEvent> events;
  events.reserve(raw.size());
  for (const RawCross& rc : raw) events.push_back({rc.t, rc.p});
  // crossing id lookup by (ring, edge)
  std::vector<std::vector<int>> cross_id(rings.size());
  for (std::size_t r = 0; r < rings.size(); ++r)
    cross_id[r].assign(rings[r]->vertices.size(), -1);
  for (std::size_t k = 0; k < raw.size(); ++k)
    cross_id[static_cast<std::size_t>(raw[k].ring)][static_cast<std::size_t>(raw[k].edge)] =
        static_cast<int>(k);

  auto build_side = [&](int want) {
    SideBuild out;
    for (std::size_t r = 0; r < rings.size(); ++r) {
      const auto& v = rings[r]->vertices;
      const std::size_t m = v.size();
      std::size_t start = m;  // first vertex not on this side
      for (std::size_t i = 0; i < m; ++i) {
        if (side_of(v[i]) != want) {
          start = i;
          break;
        }
      }
      if (start == m) {
        out.untouched.push_back(*rings[r]);
        continue;
      }
      Chain cur;
      bool open = false;
      for (std::size_t k = 0; k < m; ++k) {
        const std::size_t i = (start + k) % m;
        const std::size_t j = (i + 1) % m;
        const int si = side_of(v[i]);
        const int sj = side_of(v[j]);
        const int cid = cross_id[r][i];
        if (si != want && sj == want) {
          cur = Chain{};
          cur.start_cross = cid;
          cur.pts.push_back(events[static_cast<std::size_t>(cid)].p);
          cur.pts.push_back(v[j]);
          open = true;
        } else if (si == want && sj == want) {
          if (open) cur.pts.push_back(v[j]);
        } else if (si == want && sj != want) {
          if (open) {
            cur.end_cross = cid;
            cur.pts.push_back(events[static_cast<std::size_t>(cid)].p);
            out.chains.push_back(std::move(cur));
            open = false;
          }
        }
      }
      if (open) throw GeometryError("degenerate cut: unclosed chain");
    }
    return out;
  };

  const double min_area = std::max(1e-12, 1e-9 * std::abs(poly.area()));
  std::vector<Ring> left_rings = assemble_side(build_side(+1), events, true);
  std::vector<Ring> right_rings = assemble_side(build_side(-1), events, false);

  std::vector<PolygonWithHoles> pieces = group_rings(std::move(left_rings), min_area);
  std::vector<PolygonWithHoles> right = group_rings(std::move(right_rings), min_area);
  pieces.insert(pieces.end(), std::make_move_iterator(right.begin()),
                std::make_move_iterator(right.end()));
  if (pieces.empty()) return {poly};
  return pieces;
}

// ---------------------------------------------------------------------------
// shared_boundary / union_pair
// ---------------------------------------------------------------------------

namespace {

std::vector<Segment> boundary_edges(const PolygonWithHoles& poly) {
  std::vector<Segment> out;
  auto add = [&](const Ring& r) {
    const auto& v = r.vertices;
    for (std::size_t i = 0, n = v.size(); i < n; ++i) out.push_back({v[i], v[(i + 1) % n]});
  };
  add(poly.outer);
  for (const Ring& h : poly.holes) add(h);
  return out;
}

bool collinear_segments(const Segment& a, const Segment& b) {
  const Point da = a.b - a.a;
  const double la = norm(da);
  if (la <= 0) return false;
  return std::abs(cross(da, b.a - a.a)) <= kEpsGeom * la &&
         std::abs(cross(da, b.b - a.a)) <= kEpsGeom * la &&
         direction_distance(Direction::of(da), Direction::of(b.b - b.a)) <= 1e-9 + kEpsAng;
}

}  // namespace

std::vector<Segment> shared_boundary(const PolygonWithHoles& a, const PolygonWithHoles& b) {
  const auto ea = boundary_edges(a);
  const auto eb = boundary_edges(b);

  // overlap intervals grouped by carrier line (direction + offset)
  struct LineKey {
    double angle, offset;
    Point origin_dir;
  };
  std::vector<std::pair<LineKey, Interval>> pieces;
  for (const Segment& sa : ea) {
    const Point da = sa.dir();
    if (norm(sa.b - sa.a) <= kEpsGeom) continue;
    for (const Segment& sb : eb) {
      if (norm(sb.b - sb.a) <= kEpsGeom) continue;
      if (!collinear_segments(sa, sb)) continue;
      const double t0 = dot(da, sb.a - sa.a);
      const double t1 = dot(da, sb.b - sa.a);
      const double lo = std::max(0.0, std::min(t0, t1));
      const double hi = std::min(sa.length(), std::max(t0, t1));
      if (hi - lo <= kEpsGeom) continue;
      const Direction dir = Direction::of(da);
      const double offset = dot(dir.normal(), sa.a);
      pieces.push_back({{dir.angle(), offset, dir.unit()}, {dot(dir.unit(), sa.a) + lo * dot(dir.unit(), da),
                                                            dot(dir.unit(), sa.a) + hi * dot(dir.unit(), da)}});
      auto& iv = pieces.back().second;
      if (iv.lo > iv.hi) std::swap(iv.lo, iv.hi);
    }
  }

  // merge intervals on the same carrier line
  std::sort(pieces.begin(), pieces.end(), [](const auto& x, const auto& y) {
    if (std::abs(x.first.angle - y.first.angle) > kEpsAng) return x.first.angle < y.first.angle;
    if (std::abs(x.first.offset - y.first.offset) > kEpsGeom) return x.first.offset < y.first.offset;
    return x.second.lo < y.second.lo;
  });
  std::vector<Segment> out;
  std::size_t i = 0;
  while (i < pieces.size()) {
    std::size_t j = i;
    Interval merged = pieces[i].second;
    const LineKey key = pieces[i].first;
    auto flush = [&]() {
      const Point u = key.origin_dir;
      const Point n{-u.y, u.x};
      const Point base = key.offset * n;
      out.push_back({base + merged.lo * u, base + merged.hi * u});
    };
    while (++j < pieces.size()) {
      const bool same_line = std::abs(pieces[j].first.angle - key.angle) <= kEpsAng &&
                             std::abs(pieces[j].first.offset - key.offset) <= kEpsGeom;
      if (!same_line) break;
      if (pieces[j].second.lo <= merged.hi + kEpsGeom) {
        merged.hi = std::max(merged.hi, pieces[j].second.hi);
      } else {
        flush();
        merged = pieces[j].second;
      }
    }
    flush();
    i = j;
  }
  return out;
}

namespace {

// Registry assigning stable ids to points within tolerance.
class PointRegistry {
 public:
  int id(Point p) {
    for (std::size_t i = 0; i < pts_.size(); ++i)
      if (nearly_equal(pts_[i], p)) return static_cast<int>(i);
    pts_.push_back(p);
    return static_cast<int>(pts_.size()) - 1;
  }
  Point at(int i) const { return pts_[static_cast<std::size_t>(i)]; }

 private:
  std::vector<Point> pts_;
};

}  // namespace

PolygonWithHoles union_pair(const PolygonWithHoles& a, const PolygonWithHoles& b) {
  if (shared_boundary(a, b).empty()) throw NotAdjacent("polygons share no boundary");

  std::vector<Point> split_pts;
  auto collect = [&](const PolygonWithHoles& poly) {
    for (const Point& p : poly.outer.vertices) split_pts.push_back(p);
    for (const Ring& h : poly.holes)
      for (const Point& p : h.vertices) split_pts.push_back(p);
  };
  collect(a);
  collect(b);

  PointRegistry reg;
  struct DirEdge {
    int u, v;
  };
  std::vector<DirEdge> edges;
  auto add_edges = [&](const PolygonWithHoles& poly) {
    for (const Segment& e : boundary_edges(poly)) {
      // subdivide at any vertex of either polygon lying on the edge
      std::vector<double> ts{0.0, 1.0};
      const double len = e.length();
      if (len <= kEpsGeom) continue;
      for (const Point& p : split_pts) {
        if (distance_to_segment(p, e.a, e.b) > kEpsGeom) continue;
        const double t = dot(p - e.a, e.b - e.a) / (len * len);
        if (t > kEpsGeom / len && t < 1.0 - kEpsGeom / len) ts.push_back(t);
      }
      std::sort(ts.begin(), ts.end());
      for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        const Point p = e.at(ts[i]);
        const Point q = e.at(ts[i + 1]);
        if (dist(p, q) <= kEpsGeom) continue;
        edges.push_back({reg.id(p), reg.id(q)});
      }
    }
  };
  add_edges(a);
  add_edges(b);

  // cancel opposite sub-edge pairs (the shared seam)
  std::vector<bool> dead(edges.size(), false);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (dead[i]) continue;
    for (std::size_t j = i + 1; j < edges.size(); ++j) {
      if (dead[j]) continue;
      if (edges[i].u == edges[j].v && edges[i].v == edges[j].u) {
        dead[i] = dead[j] = true;
        break;
      }
    }
  }

  struct Outgoing {
    int v;
    std::size_t edge;
  };
  std::vector<std::vector<Outgoing>> out_map;
  auto ensure = [&](int v) {
    if (static_cast<std::size_t>(v) >= out_map.size()) out_map.resize(static_cast<std::size_t>(v) + 1);
  };
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (dead[i]) continue;
    ensure(edges[i].u);
    ensure(edges[i].v);
    out_map[static_cast<std::size_t>(edges[i].u)].push_back({edges[i].v, i});
  }

  std::vector<bool> used(edges.size(), false);
  std::vector<Ring> rings;
  for (std::size_t e0 = 0; e0 < edges.size(); ++e0) {
    if (dead[e0] || used[e0]) continue;
    Ring ring;
    int cur = edges[e0].u;
    int prev = -1;
    std::size_t cur_edge = e0;
    const std::size_t guard = edges.size() + 2;
    bool closed = false;
    for (std::size_t steps = 0; steps <= guard; ++steps) {
      used[cur_edge] = true;
      ring.vertices.push_back(reg.at(cur));
      prev = cur;
      cur = edges[cur_edge].v;
      if (cur == edges[e0].u) {
        closed = true;
        break;
      }
      // pick the most counter-clockwise unused continuation
      const Point din = reg.at(cur) - reg.at(prev);
      double best_ang = -10.0;
      std::size_t best = SIZE_MAX;
      for (const Outgoing& o : out_map[static_cast<std::size_t>(cur)]) {
        if (used[o.edge]) continue;
        const Point dout = reg.at(o.v) - reg.at(cur);
        const double ang = std::atan2(cross(din, dout), dot(din, dout));
        if (ang > best_ang) {
          best_ang = ang;
          best = o.edge;
        }
      }
      if (best == SIZE_MAX) throw GeometryError("union boundary trace failed to close");
      cur_edge = best;
    }
    if (!closed) throw GeometryError("union boundary trace did not terminate");
    remove_duplicate_vertices(ring);
    remove_collinear_vertices(ring);
    if (ring.vertices.size() >= 3) rings.push_back(std::move(ring));
  }

  PolygonWithHoles result;
  bool have_outer = false;
  for (Ring& r : rings) {
    const double area = signed_area(r);
    if (std::abs(area) <= 1e-9 * (std::abs(a.area()) + std::abs(b.area()))) continue;
    if (area > 0) {
      if (have_outer) throw GeometryError("union produced more than one outer ring");
      result.outer = std::move(r);
      have_outer = true;
    } else {
      result.holes.push_back(std::move(r));
    }
  }
  if (!have_outer) throw GeometryError("union produced no outer ring");

  const double expect = a.area() + b.area();
  if (std::abs(result.area() - expect) > kRelAreaEps * std::max(1.0, expect))
    throw GeometryError("union area mismatch");
  return result;
}

// ---------------------------------------------------------------------------
// segment_in_free_space
// ---------------------------------------------------------------------------

namespace {

// Parameters along s where it meets edge (c, d); collinear overlaps contribute endpoints.
void intersection_params(const Segment& s, Point c, Point d, std::vector<double>& ts) {
  const Point r = s.b - s.a;
  const Point q = d - c;
  const double denom = cross(r, q);
  const double len_r = norm(r);
  if (std::abs(denom) <= 1e-12 * std::max(1.0, norm(q) * len_r)) {
    // parallel: collect collinear overlap endpoints
    if (len_r <= 0) return;
    if (std::abs(cross(r, c - s.a)) > kEpsGeom * len_r) return;
    const double len2 = dot(r, r);
    for (const Point& p : {c, d}) {
      const double t = dot(p - s.a, r) / len2;
      if (t > 0 && t < 1) ts.push_back(t);
    }
    return;
  }
  const double t = cross(c - s.a, q) / denom;
  const double u = cross(c - s.a, r) / denom;
  const double tol_t = kEpsGeom / std::max(len_r, kEpsGeom);
  const double tol_u = kEpsGeom / std::max(norm(q), kEpsGeom);
  if (t >= -tol_t && t <= 1 + tol_t && u >= -tol_u && u <= 1 + tol_u)
    ts.push_back(std::clamp(t, 0.0, 1.0));
}

}  // namespace

bool segment_in_free_space(const PolygonWithHoles& env, const Segment& s, bool fly_over_holes) {
  std::vector<double> ts{0.0, 1.0};
  auto add_ring = [&](const Ring& r) {
    const auto& v = r.vertices;
    for (std::size_t i = 0, n = v.size(); i < n; ++i)
      intersection_params(s, v[i], v[(i + 1) % n], ts);
  };
  add_ring(env.outer);
  if (!fly_over_holes)
    for (const Ring& h : env.holes) add_ring(h);

  std::sort(ts.begin(), ts.end());
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    if (ts[i + 1] - ts[i] <= 1e-12) continue;
    const Point mid = s.at(0.5 * (ts[i] + ts[i + 1]));
    if (distance_to_ring(mid, env.outer) > kEpsGeom && !point_in_ring(mid, env.outer)) return false;
    if (!fly_over_holes) {
      for (const Ring& h : env.holes) {
        if (distance_to_ring(mid, h) > kEpsGeom && point_in_ring(mid, h)) return false;
      }
    }
  }
  return true;
}

}  // namespace covplan
