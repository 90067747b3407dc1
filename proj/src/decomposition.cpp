#include "covplan/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>

#include "covplan/errors.hpp"

namespace covplan {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> event_levels(const PolygonWithHoles& poly) {
  std::vector<double> ys;
  auto add = [&](const Ring& r) {
    for (const Point& p : r.vertices) ys.push_back(p.y);
  };
  add(poly.outer);
  for (const Ring& h : poly.holes) add(h);
  std::sort(ys.begin(), ys.end());
  std::vector<double> out;
  for (double y : ys) {
    if (out.empty() || y - out.back() > kEpsGeom) out.push_back(y);
  }
  return out;
}

}  // namespace

std::vector<Direction> candidate_directions(const PolygonWithHoles& poly) {
  std::vector<double> angles;
  auto add_ring = [&](const Ring& r) {
    const auto& v = r.vertices;
    for (std::size_t i = 0, n = v.size(); i < n; ++i) {
      const Point d = v[(i + 1) % n] - v[i];
      if (norm(d) <= kEpsGeom) continue;
      angles.push_back(Direction::of(d).angle());
    }
  };
  add_ring(poly.outer);
  for (const Ring& h : poly.holes) add_ring(h);
  std::sort(angles.begin(), angles.end());

  std::vector<Direction> out;
  for (double a : angles) {
    if (out.empty() || a - out.back().angle() >= kEpsAng) out.push_back(Direction(a));
  }
  // wrap-around: orientations just below pi coincide with 0
  while (out.size() > 1 && out.front().angle() + kPi - out.back().angle() < kEpsAng) out.pop_back();
  return out;
}

double altitude(const PolygonWithHoles& poly, Direction dir) {
  const PolygonWithHoles rotated = rotate_frame(poly, dir);
  const std::vector<double> ys = event_levels(rotated);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < ys.size(); ++i) {
    const double h = ys[i + 1] - ys[i];
    if (h <= kEpsGeom) continue;
    const double mid = 0.5 * (ys[i] + ys[i + 1]);
    total += h * static_cast<double>(sweep_intersections(rotated, mid).size());
  }
  return total;
}

std::pair<Direction, double> msa_of(const PolygonWithHoles& poly) {
  Direction best_dir;
  double best = std::numeric_limits<double>::max();
  for (Direction d : candidate_directions(poly)) {
    const double a = altitude(poly, d);
    if (a < best) {
      best = a;
      best_dir = d;
    }
  }
  return {best_dir, best};
}

// ---------------------------------------------------------------------------
// Boustrophedon decomposition (slab construction)
// ---------------------------------------------------------------------------

namespace {

struct Trap {
  int l_ring, l_edge, r_ring, r_edge;
  double y0, y1;
  int cell = -1;
};

}  // namespace

Decomposition bcd(const PolygonWithHoles& env, Direction dir) {
  const PolygonWithHoles rot = rotate_frame(env, dir);

  auto edge_pts = [&](int ring, int idx) {
    const Ring& r = ring < 0 ? rot.outer : rot.holes[static_cast<std::size_t>(ring)];
    const auto& v = r.vertices;
    return std::pair<Point, Point>{v[static_cast<std::size_t>(idx)],
                                   v[(static_cast<std::size_t>(idx) + 1) % v.size()]};
  };
  auto x_at = [&](int ring, int idx, double y) {
    const auto [a, b] = edge_pts(ring, idx);
    return a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y);
  };
  auto interval_at = [&](const Trap& t, double y) {
    return Interval{x_at(t.l_ring, t.l_edge, y), x_at(t.r_ring, t.r_edge, y)};
  };

  const std::vector<double> ys = event_levels(rot);
  std::vector<std::vector<Trap>> slabs;
  for (std::size_t i = 0; i + 1 < ys.size(); ++i) {
    const double mid = 0.5 * (ys[i] + ys[i + 1]);
    const auto cr = sweep_crossings(rot, mid);
    std::vector<Trap> slab;
    for (std::size_t k = 0; k + 1 < cr.size(); k += 2) {
      if (cr[k + 1].x - cr[k].x <= kEpsGeom) continue;
      slab.push_back({cr[k].ring, cr[k].edge, cr[k + 1].ring, cr[k + 1].edge, ys[i], ys[i + 1]});
    }
    slabs.push_back(std::move(slab));
  }

  // Link trapezoids across slab boundaries; connectivity changes open/close cells.
  std::vector<std::vector<Trap>> cell_stacks;
  auto open_cell = [&](Trap& t) {
    t.cell = static_cast<int>(cell_stacks.size());
    cell_stacks.push_back({t});
  };
  for (std::size_t s = 0; s < slabs.size(); ++s) {
    if (s == 0) {
      for (Trap& t : slabs[s]) open_cell(t);
      continue;
    }
    auto& below = slabs[s - 1];
    auto& cur = slabs[s];
    const double yb = ys[s];
    std::vector<int> parent_count(cur.size(), 0), child_count(below.size(), 0);
    std::vector<int> only_parent(cur.size(), -1);
    for (std::size_t b = 0; b < below.size(); ++b) {
      const Interval ib = interval_at(below[b], yb);
      for (std::size_t c = 0; c < cur.size(); ++c) {
        const Interval ic = interval_at(cur[c], yb);
        if (std::min(ib.hi, ic.hi) - std::max(ib.lo, ic.lo) > kEpsGeom) {
          ++parent_count[c];
          ++child_count[b];
          only_parent[c] = static_cast<int>(b);
        }
      }
    }
    for (std::size_t c = 0; c < cur.size(); ++c) {
      if (parent_count[c] == 1 && child_count[static_cast<std::size_t>(only_parent[c])] == 1) {
        Trap& p = below[static_cast<std::size_t>(only_parent[c])];
        cur[c].cell = p.cell;
        cell_stacks[static_cast<std::size_t>(p.cell)].push_back(cur[c]);
      } else {
        open_cell(cur[c]);
      }
    }
  }

  Decomposition result;
  result.sweep_direction = dir;
  for (const auto& stack : cell_stacks) {
    Ring ring;
    auto push = [&](double x, double y) { ring.vertices.push_back({x, y}); };
    const Trap& bot = stack.front();
    const Trap& top = stack.back();
    push(x_at(bot.l_ring, bot.l_edge, bot.y0), bot.y0);
    push(x_at(bot.r_ring, bot.r_edge, bot.y0), bot.y0);
    for (const Trap& t : stack) {
      push(x_at(t.r_ring, t.r_edge, t.y0), t.y0);
      push(x_at(t.r_ring, t.r_edge, t.y1), t.y1);
    }
    push(x_at(top.l_ring, top.l_edge, top.y1), top.y1);
    for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
      push(x_at(it->l_ring, it->l_edge, it->y1), it->y1);
      push(x_at(it->l_ring, it->l_edge, it->y0), it->y0);
    }
    remove_duplicate_vertices(ring);
    remove_collinear_vertices(ring);
    if (ring.vertices.size() < 3) continue;
    PolygonWithHoles shape{std::move(ring), {}};
    if (signed_area(shape.outer) < 0)
      std::reverse(shape.outer.vertices.begin(), shape.outer.vertices.end());
    shape = unrotate_frame(shape, dir);
    auto [d, a] = msa_of(shape);
    result.cells.push_back({std::move(shape), d, a});
  }
  for (const Cell& c : result.cells) result.total_msa += c.msa;
  return result;
}

Decomposition initial_decomposition(const PolygonWithHoles& env) {
  Decomposition best;
  double best_msa = std::numeric_limits<double>::max();
  for (Direction v : candidate_directions(env)) {
    Decomposition d = bcd(env, v);
    if (d.total_msa < best_msa) {
      best_msa = d.total_msa;
      best = std::move(d);
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Greedy reflex splitting
// ---------------------------------------------------------------------------

namespace {

struct SplitCandidate {
  InfiniteLine line;
  double angle;
  int ring;
  int vidx;
  int type;
};

std::vector<Cell> greedy_split_impl(const Cell& cell, int depth) {
  if (depth > 16) {
    std::cerr << "warning: greedy split recursion capped at depth 16\n";
    return {cell};
  }

  const PolygonWithHoles& shape = cell.shape;
  std::vector<const Ring*> rings{&shape.outer};
  for (const Ring& h : shape.holes) rings.push_back(&h);

  std::vector<std::pair<int, int>> reflex;
  for (std::size_t r = 0; r < rings.size(); ++r) {
    for (std::size_t i = 0; i < rings[r]->vertices.size(); ++i) {
      if (is_reflex(shape, r, i)) reflex.push_back({static_cast<int>(r), static_cast<int>(i)});
    }
  }
  if (reflex.empty()) return {cell};

  std::vector<SplitCandidate> candidates;
  const std::vector<Direction> dirs = candidate_directions(shape);
  for (const auto& [r, i] : reflex) {
    const auto& v = rings[static_cast<std::size_t>(r)]->vertices;
    const std::size_t n = v.size();
    const Point prev = v[(static_cast<std::size_t>(i) + n - 1) % n];
    const Point cur = v[static_cast<std::size_t>(i)];
    const Point next = v[(static_cast<std::size_t>(i) + 1) % n];
    // Type 1: lines supporting the edges adjacent to the reflex vertex
    for (const Point& other : {prev, next}) {
      if (dist(cur, other) <= kEpsGeom) continue;
      const Direction d = Direction::of(other - cur);
      candidates.push_back({{cur, d}, d.angle(), r, i, 1});
    }
    // Type 2: lines parallel to a cell edge with both neighbors strictly on one side
    for (Direction d : dirs) {
      const Point nrm = d.normal();
      const double sp = dot(nrm, prev - cur);
      const double sn = dot(nrm, next - cur);
      const bool same_side = (sp > kEpsGeom && sn > kEpsGeom) || (sp < -kEpsGeom && sn < -kEpsGeom);
      if (!same_side) continue;
      candidates.push_back({{cur, d}, d.angle(), r, i, 2});
    }
  }

  std::sort(candidates.begin(), candidates.end(), [](const SplitCandidate& a, const SplitCandidate& b) {
    if (std::abs(a.angle - b.angle) > 1e-15) return a.angle < b.angle;
    if (a.ring != b.ring) return a.ring < b.ring;
    if (a.vidx != b.vidx) return a.vidx < b.vidx;
    return a.type < b.type;
  });
  // keep one line per direction class (neither parallel nor anti-parallel to another)
  std::vector<SplitCandidate> kept;
  for (const SplitCandidate& c : candidates) {
    if (!kept.empty() && c.angle - kept.back().angle < kEpsAng) continue;
    if (!kept.empty() && kept.front().angle + kPi - c.angle < kEpsAng) continue;
    kept.push_back(c);
  }

  double best_total = std::numeric_limits<double>::max();
  std::vector<PolygonWithHoles> best_pieces;
  for (const SplitCandidate& c : kept) {
    std::vector<PolygonWithHoles> pieces;
    try {
      pieces = split_by_line(shape, c.line);
    } catch (const GeometryError&) {
      continue;  // degenerate cut, skip this candidate
    }
    if (pieces.size() < 2) continue;
    double total = 0;
    for (const PolygonWithHoles& p : pieces) total += msa_of(p).second;
    if (total < best_total - 1e-12) {
      best_total = total;
      best_pieces = std::move(pieces);
    }
  }

  const double improve_eps = kRelAreaEps * std::abs(shape.area());
  if (best_pieces.empty() || best_total >= cell.msa - improve_eps) return {cell};

  std::vector<Cell> out;
  for (PolygonWithHoles& p : best_pieces) {
    auto [d, a] = msa_of(p);
    Cell piece{std::move(p), d, a};
    auto sub = greedy_split_impl(piece, depth + 1);
    out.insert(out.end(), std::make_move_iterator(sub.begin()), std::make_move_iterator(sub.end()));
  }
  return out;
}

}  // namespace

std::vector<Cell> greedy_split(const Cell& cell) { return greedy_split_impl(cell, 0); }

std::vector<Cell> merge_cells(std::vector<Cell> cells) {
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < cells.size() && !merged; ++i) {
      for (std::size_t j = i + 1; j < cells.size() && !merged; ++j) {
        if (direction_distance(cells[i].service_direction, cells[j].service_direction) >=
            kMergeAngEps)
          continue;
        if (shared_boundary(cells[i].shape, cells[j].shape).empty()) continue;
        PolygonWithHoles u;
        try {
          u = union_pair(cells[i].shape, cells[j].shape);
        } catch (const Error&) {
          continue;
        }
        const Direction d = cells[i].service_direction;
        const double a = altitude(u, d);
        cells[i] = {std::move(u), d, a};
        cells.erase(cells.begin() + static_cast<std::ptrdiff_t>(j));
        merged = true;
      }
    }
  }
  return cells;
}

DecompositionPipeline run_decomposition(const PolygonWithHoles& env) {
  DecompositionPipeline p;
  p.initial = initial_decomposition(env);
  for (const Cell& c : p.initial.cells) {
    auto split = greedy_split(c);
    p.after_split.insert(p.after_split.end(), std::make_move_iterator(split.begin()),
                         std::make_move_iterator(split.end()));
  }
  p.after_merge = merge_cells(p.after_split);
  return p;
}

}  // namespace covplan
