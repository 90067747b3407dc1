#include "covplan/track_gen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "covplan/errors.hpp"

namespace covplan {

namespace {

constexpr double kQuarterPi = std::numbers::pi / 4.0;

// Square footprint of side fov, aligned with the track, swept along it.
bool point_covered(Point p, const Segment& t, double fov) {
  const double len = t.length();
  const double half = 0.5 * fov + kEpsGeom;
  if (len <= kEpsGeom) return std::abs(p.x - t.a.x) <= half && std::abs(p.y - t.a.y) <= half;
  const Point d = t.dir();
  const Point rel = p - t.a;
  const double along = dot(d, rel);
  const double perp = std::abs(cross(d, rel));
  return perp <= half && along >= -half && along <= len + half;
}

bool point_covered_any(Point p, const std::vector<Segment>& tracks, double fov) {
  for (const Segment& t : tracks)
    if (point_covered(p, t, fov)) return true;
  return false;
}

bool segment_covered(const Segment& e, const std::vector<Segment>& tracks, double fov) {
  const double len = e.length();
  const std::size_t k =
      std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(len / (fov / 8.0))));
  for (std::size_t i = 0; i <= k; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(k);
    if (!point_covered_any(e.at(t), tracks, fov)) return false;
  }
  return true;
}

}  // namespace

bool edge_angle_below_quarter_pi(const Segment& e, Direction dir) {
  const Point ed = e.dir();
  const Point dd = dir.unit();
  const double ang = std::atan2(std::abs(cross(dd, ed)), std::abs(dot(dd, ed)));
  return ang < kQuarterPi - kEpsAng;
}

bool within_fov(const Segment& e, const std::vector<ServiceTrack>& tracks, double fov) {
  std::vector<Segment> segs;
  segs.reserve(tracks.size());
  for (const ServiceTrack& t : tracks) segs.push_back(t.segment);
  return segment_covered(e, segs, fov);
}

std::vector<ServiceTrack> generate_tracks(const Cell& cell, double fov, int cell_id,
                                          TrackGenStats* stats) {
  if (fov <= 0) throw InvalidParameter("generate_tracks: fov must be positive");

  const Direction dir = cell.service_direction;
  const PolygonWithHoles rot = rotate_frame(cell.shape, dir);

  struct SweepEdge {
    Point u, v;  // u.y <= v.y
  };
  std::vector<SweepEdge> pending;
  double min_y = std::numeric_limits<double>::max();
  double max_y = std::numeric_limits<double>::lowest();
  auto add_ring = [&](const Ring& r) {
    const auto& vs = r.vertices;
    for (std::size_t i = 0, n = vs.size(); i < n; ++i) {
      Point a = vs[i];
      Point b = vs[(i + 1) % n];
      min_y = std::min({min_y, a.y, b.y});
      max_y = std::max({max_y, a.y, b.y});
      if (dist(a, b) <= kEpsGeom) continue;
      if (a.y > b.y) std::swap(a, b);
      pending.push_back({a, b});
    }
  };
  add_ring(rot.outer);
  for (const Ring& h : rot.holes) add_ring(h);
  std::stable_sort(pending.begin(), pending.end(),
                   [](const SweepEdge& a, const SweepEdge& b) { return a.u.y < b.u.y; });

  double offset = min_y + 0.5 * fov;
  if (offset > max_y - 0.5 * fov + kEpsGeom) offset = 0.5 * (min_y + max_y);  // thin cell

  std::vector<SweepEdge> current;   // edges crossing the sweep line
  std::vector<SweepEdge> special;   // edges fully passed since the previous offset
  std::vector<Segment> prev_iter;   // tracks emitted in the previous iteration
  std::vector<Segment> cur_iter;
  std::vector<ServiceTrack> out;
  std::size_t next = 0;

  // sweep until every edge has been reached and fully passed
  while (next < pending.size() || !current.empty()) {
    cur_iter.clear();
    if (stats) ++stats->offsets;

    // migrate newly reached edges
    while (next < pending.size() && pending[next].u.y <= offset + kEpsGeom) {
      const SweepEdge e = pending[next++];
      if (stats) ++stats->edge_events;
      if (e.v.y <= offset + kEpsGeom) {
        special.push_back(e);
      } else {
        current.push_back(e);
        const Segment seg{e.u, e.v};
        if (edge_angle_below_quarter_pi(seg, Direction(0.0))) {
          out.push_back({seg, cell_id, TrackKind::scenario2_edge});
          cur_iter.push_back(seg);
        }
      }
    }
    // retire edges the line has fully passed
    std::erase_if(current, [&](const SweepEdge& e) { return e.v.y <= offset + kEpsGeom; });

    // sweep tracks from the crossing intervals, skipping obstacle interiors
    std::vector<double> xs;
    for (const SweepEdge& e : current) {
      if (stats) ++stats->crossing_work;
      const double dy = e.v.y - e.u.y;
      const double t = std::clamp((offset - e.u.y) / dy, 0.0, 1.0);
      xs.push_back(e.u.x + t * (e.v.x - e.u.x));
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
      if (xs[i + 1] - xs[i] <= kEpsGeom) continue;
      const Segment seg{{xs[i], offset}, {xs[i + 1], offset}};
      out.push_back({seg, cell_id, TrackKind::sweep});
      cur_iter.push_back(seg);
    }

    // edges that escaped between consecutive offsets
    for (const SweepEdge& e : special) {
      const Segment seg{e.u, e.v};
      std::vector<Segment> recent = prev_iter;
      recent.insert(recent.end(), cur_iter.begin(), cur_iter.end());
      if (!segment_covered(seg, recent, fov)) {
        out.push_back({seg, cell_id, TrackKind::scenario1_edge});
        cur_iter.push_back(seg);
      }
    }
    special.clear();

    prev_iter = cur_iter;
    offset += fov;
  }

  for (ServiceTrack& t : out) {
    t.segment.a = rotate_from_frame(t.segment.a, dir);
    t.segment.b = rotate_from_frame(t.segment.b, dir);
  }
  return out;
}

std::vector<ServiceTrack> remove_overlaps(const std::vector<ServiceTrack>& tracks) {
  struct Lined {
    double angle, line_offset, t0, t1;
    std::size_t idx;
  };
  std::vector<Lined> lined;
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    const Segment& s = tracks[i].segment;
    if (s.length() <= kEpsGeom) continue;
    const Direction d = Direction::of(s.b - s.a);
    const Point u = d.unit();
    const Point n = d.normal();
    double t0 = dot(u, s.a);
    double t1 = dot(u, s.b);
    if (t0 > t1) std::swap(t0, t1);
    lined.push_back({d.angle(), dot(n, s.a), t0, t1, i});
  }
  std::sort(lined.begin(), lined.end(), [](const Lined& a, const Lined& b) {
    if (std::abs(a.angle - b.angle) > kEpsAng) return a.angle < b.angle;
    if (std::abs(a.line_offset - b.line_offset) > kEpsGeom) return a.line_offset < b.line_offset;
    return a.idx < b.idx;
  });

  std::vector<ServiceTrack> out;
  std::size_t i = 0;
  while (i < lined.size()) {
    std::size_t j = i + 1;
    while (j < lined.size() && std::abs(lined[j].angle - lined[j - 1].angle) <= kEpsAng &&
           std::abs(lined[j].line_offset - lined[j - 1].line_offset) <= kEpsGeom)
      ++j;

    // earlier track ids keep their extent; later ones are trimmed around it
    std::vector<Lined> group(lined.begin() + static_cast<std::ptrdiff_t>(i),
                             lined.begin() + static_cast<std::ptrdiff_t>(j));
    std::sort(group.begin(), group.end(), [](const Lined& a, const Lined& b) { return a.idx < b.idx; });

    const Direction d(group.front().angle);
    const Point u = d.unit();
    const Point n = d.normal();
    const double off = group.front().line_offset;
    auto at = [&](double t) { return Point{off * n.x + t * u.x, off * n.y + t * u.y}; };

    std::vector<Interval> covered;  // disjoint, sorted
    for (const Lined& m : group) {
      std::vector<Interval> remaining{{m.t0, m.t1}};
      for (const Interval& c : covered) {
        std::vector<Interval> next;
        for (const Interval& r : remaining) {
          if (c.hi <= r.lo || c.lo >= r.hi) {
            next.push_back(r);
            continue;
          }
          if (c.lo > r.lo) next.push_back({r.lo, c.lo});
          if (c.hi < r.hi) next.push_back({c.hi, r.hi});
        }
        remaining = std::move(next);
      }
      for (const Interval& r : remaining) {
        if (r.length() <= kEpsGeom) continue;
        ServiceTrack t = tracks[m.idx];
        t.segment = {at(r.lo), at(r.hi)};
        out.push_back(t);
      }
      // merge the full extent into covered
      covered.push_back({m.t0, m.t1});
      std::sort(covered.begin(), covered.end(),
                [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
      std::vector<Interval> merged;
      for (const Interval& c : covered) {
        if (!merged.empty() && c.lo <= merged.back().hi) {
          merged.back().hi = std::max(merged.back().hi, c.hi);
        } else {
          merged.push_back(c);
        }
      }
      covered = std::move(merged);
    }
    i = j;
  }
  return out;
}

std::vector<ServiceTrack> boundary_tracks(const PolygonWithHoles& env) {
  std::vector<ServiceTrack> out;
  auto add = [&](const Ring& r) {
    const auto& v = r.vertices;
    for (std::size_t i = 0, n = v.size(); i < n; ++i) {
      const Segment s{v[i], v[(i + 1) % n]};
      if (s.length() <= kEpsGeom) continue;
      out.push_back({s, -1, TrackKind::boundary});
    }
  };
  add(env.outer);
  for (const Ring& h : env.holes) add(h);
  return out;
}

double coverage_fraction(const PolygonWithHoles& env, const std::vector<ServiceTrack>& tracks,
                         double fov, std::size_t samples, std::uint64_t seed) {
  if (fov <= 0) throw InvalidParameter("coverage_fraction: fov must be positive");
  const BoundingBox bb = bounding_box(env);
  const double w = bb.max_x - bb.min_x;
  const double h = bb.max_y - bb.min_y;
  if (w <= 0 || h <= 0) return 0.0;

  // uniform grid over track footprints to keep the point queries cheap
  const double cell = std::max(fov, std::max(w, h) / 256.0);
  const int nx = std::max(1, static_cast<int>(std::ceil(w / cell)));
  const int ny = std::max(1, static_cast<int>(std::ceil(h / cell)));
  std::vector<std::vector<int>> buckets(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
  auto bucket_range = [&](double lo, double hi, double origin, int count) {
    int b0 = static_cast<int>(std::floor((lo - origin) / cell));
    int b1 = static_cast<int>(std::floor((hi - origin) / cell));
    return std::pair<int, int>{std::clamp(b0, 0, count - 1), std::clamp(b1, 0, count - 1)};
  };
  for (std::size_t t = 0; t < tracks.size(); ++t) {
    const Segment& s = tracks[t].segment;
    const double pad = 0.5 * fov + kEpsGeom;
    const auto [cx0, cx1] = bucket_range(std::min(s.a.x, s.b.x) - pad, std::max(s.a.x, s.b.x) + pad,
                                         bb.min_x, nx);
    const auto [cy0, cy1] = bucket_range(std::min(s.a.y, s.b.y) - pad, std::max(s.a.y, s.b.y) + pad,
                                         bb.min_y, ny);
    for (int cy = cy0; cy <= cy1; ++cy)
      for (int cx = cx0; cx <= cx1; ++cx)
        buckets[static_cast<std::size_t>(cy) * static_cast<std::size_t>(nx) +
                static_cast<std::size_t>(cx)]
            .push_back(static_cast<int>(t));
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(bb.min_x, bb.max_x);
  std::uniform_real_distribution<double> uy(bb.min_y, bb.max_y);
  std::size_t inside = 0;
  std::size_t covered = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    const Point p{ux(rng), uy(rng)};
    if (!in_free_space(env, p)) continue;
    ++inside;
    const int cx = std::clamp(static_cast<int>((p.x - bb.min_x) / cell), 0, nx - 1);
    const int cy = std::clamp(static_cast<int>((p.y - bb.min_y) / cell), 0, ny - 1);
    for (int t : buckets[static_cast<std::size_t>(cy) * static_cast<std::size_t>(nx) +
                         static_cast<std::size_t>(cx)]) {
      if (point_covered(p, tracks[static_cast<std::size_t>(t)].segment, fov)) {
        ++covered;
        break;
      }
    }
  }
  return inside == 0 ? 0.0 : static_cast<double>(covered) / static_cast<double>(inside);
}

}  // namespace covplan
