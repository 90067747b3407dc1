#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace covplan {

// Tolerances used across the planner. Coordinates are meters.
inline constexpr double kEpsGeom = 1e-6;     // point coincidence
inline constexpr double kEpsAng = 1e-6;      // direction equality (radians)
inline constexpr double kRelAreaEps = 1e-6;  // area conservation, relative to polygon area

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double dist(Point a, Point b) { return norm(a - b); }
inline bool nearly_equal(Point a, Point b, double eps = kEpsGeom) { return dist(a, b) <= eps; }

struct Segment {
  Point a;
  Point b;
  double length() const { return dist(a, b); }
  Point at(double t) const { return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)}; }
  Point dir() const;  // unit vector a->b
};

// Undirected line orientation, normalized to [0, pi).
class Direction {
 public:
  Direction() = default;
  explicit Direction(double angle_rad);
  static Direction of(Point vec);

  double angle() const { return angle_; }
  Point unit() const { return {std::cos(angle_), std::sin(angle_)}; }
  Point normal() const { return {-std::sin(angle_), std::cos(angle_)}; }

 private:
  double angle_ = 0.0;
};

// Angular distance between undirected orientations, in [0, pi/2].
double direction_distance(Direction a, Direction b);
inline bool same_direction(Direction a, Direction b, double eps = kEpsAng) {
  return direction_distance(a, b) < eps;
}

struct Ring {
  std::vector<Point> vertices;
};

double signed_area(const Ring& ring);  // shoelace; throws InvalidRing if < 3 vertices
double perimeter(const Ring& ring);
void remove_duplicate_vertices(Ring& ring, double eps = kEpsGeom);
void remove_collinear_vertices(Ring& ring);
bool ring_is_simple(const Ring& ring, double eps = kEpsGeom);

struct PolygonWithHoles {
  Ring outer;               // counter-clockwise
  std::vector<Ring> holes;  // clockwise, strictly inside outer, pairwise disjoint
  double area() const;      // outer minus holes
};

struct BoundingBox {
  double min_x = 0, min_y = 0, max_x = 0, max_y = 0;
};
BoundingBox bounding_box(const PolygonWithHoles& poly);

// Forces outer CCW / holes CW; validates simplicity, containment and disjointness.
// Returns true when any ring orientation had to be repaired. Throws GeometryError.
bool repair_and_validate(PolygonWithHoles& poly);

// Interior angle at a vertex > pi, relative to the polygon interior. Hole vertices
// that are convex corners of the hole ring are reflex for the polygon.
bool is_reflex(const PolygonWithHoles& poly, std::size_t ring_index, std::size_t vertex_index);

// Rigid rotation mapping `dir` onto the +X axis (and its inverse).
Point rotate_to_frame(Point p, Direction dir);
Point rotate_from_frame(Point p, Direction dir);
PolygonWithHoles rotate_frame(const PolygonWithHoles& poly, Direction dir);
PolygonWithHoles unrotate_frame(const PolygonWithHoles& poly, Direction dir);

bool point_in_ring(Point p, const Ring& ring);  // strict crossing parity
double distance_to_ring(Point p, const Ring& ring);
double distance_to_segment(Point p, Point a, Point b);
// Closure of the free workspace: within outer (boundary included), not strictly inside a hole.
bool in_free_space(const PolygonWithHoles& poly, Point p, double eps = kEpsGeom);

struct Interval {
  double lo = 0;
  double hi = 0;
  double length() const { return hi - lo; }
};

struct SweepCrossing {
  double x = 0;
  int ring = -1;  // -1 outer, >= 0 hole index
  int edge = -1;  // edge (v_i, v_{i+1}) of that ring
};

// Crossings of the horizontal line at height y with the polygon boundary, sorted by x.
// Vertices on the line are treated as lying just below it.
std::vector<SweepCrossing> sweep_crossings(const PolygonWithHoles& poly, double y);

// Maximal interior intervals of the horizontal line at height y, sorted by lo.
std::vector<Interval> sweep_intersections(const PolygonWithHoles& poly, double y);

struct InfiniteLine {
  Point anchor;
  Direction dir;
};

// Partition into maximal connected pieces on each side of the line. Returns {poly}
// when the line misses the interior.
std::vector<PolygonWithHoles> split_by_line(const PolygonWithHoles& poly, const InfiniteLine& line);

// Maximal positive-length segments common to both boundaries; empty = not adjacent.
std::vector<Segment> shared_boundary(const PolygonWithHoles& a, const PolygonWithHoles& b);

// Union of two interior-disjoint adjacent polygons. May acquire new holes.
// Throws NotAdjacent when shared_boundary(a, b) is empty.
PolygonWithHoles union_pair(const PolygonWithHoles& a, const PolygonWithHoles& b);

// s stays within the closure of the outer boundary and (unless fly_over_holes) does
// not enter any hole interior. Boundary grazing is allowed.
bool segment_in_free_space(const PolygonWithHoles& env, const Segment& s, bool fly_over_holes);

}  // namespace covplan
