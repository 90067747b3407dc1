#pragma once

#include <cstdint>
#include <vector>

#include "covplan/decomposition.hpp"
#include "covplan/geometry.hpp"

namespace covplan {

enum class TrackKind { sweep, scenario1_edge, scenario2_edge, boundary };

struct ServiceTrack {
  Segment segment;       // world frame
  int source_cell = -1;  // -1 for boundary tracks
  TrackKind kind = TrackKind::sweep;
};

struct TrackGenStats {
  std::size_t offsets = 0;
  std::size_t edge_events = 0;
  std::size_t crossing_work = 0;  // edge visits across all sweep evaluations
};

// Sweep-line track generation for one cell. Handles non-monotone cells with holes;
// shallow edges and edges escaping between sweep offsets are added as tracks of
// their own so thin features stay covered.
std::vector<ServiceTrack> generate_tracks(const Cell& cell, double fov, int cell_id = 0,
                                          TrackGenStats* stats = nullptr);

// Acute angle between e and dir is below pi/4.
bool edge_angle_below_quarter_pi(const Segment& e, Direction dir);

// Every sampled point of e lies inside the square field-of-view swept along some track.
bool within_fov(const Segment& e, const std::vector<ServiceTrack>& tracks, double fov);

// Trims/splits later tracks so no pair of collinear tracks overlaps; covered
// 1-D measure is preserved.
std::vector<ServiceTrack> remove_overlaps(const std::vector<ServiceTrack>& tracks);

// One boundary-kind track per environment edge (outer + holes).
std::vector<ServiceTrack> boundary_tracks(const PolygonWithHoles& env);

// Monte-Carlo fraction of the free workspace within the swept square footprint
// of some track. Deterministic for a fixed seed.
double coverage_fraction(const PolygonWithHoles& env, const std::vector<ServiceTrack>& tracks,
                         double fov, std::size_t samples = 100000, std::uint64_t seed = 0);

inline double total_track_length(const std::vector<ServiceTrack>& tracks) {
  double t = 0;
  for (const ServiceTrack& s : tracks) t += s.segment.length();
  return t;
}

}  // namespace covplan
