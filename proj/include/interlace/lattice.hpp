#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "interlace/errors.hpp"

namespace interlace {

inline constexpr int kMaxDim = 8;

// Coordinates stay below this magnitude so that sums of two coordinates and
// box strides never overflow 32/64-bit arithmetic.
inline constexpr int kMaxCoordinate = 1 << 28;

// A point of Z^d. The dimension is a runtime value, fixed per run.
class Point {
 public:
  Point() = default;
  explicit Point(int dim);
  Point(std::initializer_list<int> coords);
  static Point from_span(std::span<const int> coords);

  // Basis vector sign * e_axis (axis is 0-based).
  static Point unit(int dim, int axis, int sign = +1);

  int dim() const { return dim_; }
  int operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }
  int& operator[](int k) { return c_[static_cast<std::size_t>(k)]; }

  Point operator+(const Point& o) const;
  Point operator-(const Point& o) const;
  Point& operator+=(const Point& o);

  int norm_inf() const;
  long norm1() const;
  double norm2() const;

  std::vector<int> coords() const;
  std::string to_string() const;

  // Lexicographic; points of different dimension order by dimension first.
  friend std::strong_ordering operator<=>(const Point& a, const Point& b);
  friend bool operator==(const Point& a, const Point& b);

 private:
  std::array<std::int32_t, kMaxDim> c_{};
  std::uint8_t dim_ = 0;
};

struct PointHash {
  std::size_t operator()(const Point& p) const noexcept;
};

bool are_neighbors(const Point& a, const Point& b);

// Neighbor in direction `dir` in [0, 2d): axis = dir / 2, sign = + for even.
inline Point neighbor(const Point& p, int dir) {
  Point q = p;
  q[dir >> 1] += (dir & 1) ? -1 : 1;
  return q;
}

// Finite set of sites with lexicographic iteration order.
class SiteSet {
 public:
  SiteSet() = default;
  explicit SiteSet(std::vector<Point> sites);
  SiteSet(std::initializer_list<Point> sites);

  bool empty() const { return sites_.empty(); }
  std::size_t size() const { return sites_.size(); }
  bool contains(const Point& p) const;
  int dim() const { return sites_.empty() ? 0 : sites_.front().dim(); }

  auto begin() const { return sites_.begin(); }
  auto end() const { return sites_.end(); }
  const std::vector<Point>& sites() const { return sites_; }
  const Point& operator[](std::size_t i) const { return sites_[i]; }

  SiteSet unite(const SiteSet& o) const;
  SiteSet minus(const SiteSet& o) const;
  SiteSet intersect(const SiteSet& o) const;
  SiteSet translated(const Point& shift) const;
  bool is_subset_of(const SiteSet& o) const;

  // Largest |x|_inf over the set; 0 for the empty set.
  int circumradius() const;

  friend bool operator==(const SiteSet&, const SiteSet&) = default;

 private:
  std::vector<Point> sites_;
};

// l-infinity ball B(center, radius), indexed lexicographically.
class Box {
 public:
  Box() = default;
  Box(Point center, int radius);

  const Point& center() const { return center_; }
  int radius() const { return radius_; }
  int dim() const { return center_.dim(); }
  int side() const { return 2 * radius_ + 1; }
  std::size_t volume() const { return volume_; }

  bool contains(const Point& p) const;
  // On the inner boundary: some nearest neighbor lies outside the box.
  bool on_boundary(const Point& p) const;

  std::size_t index(const Point& p) const;
  Point point(std::size_t index) const;
  // Stride of axis k in the lexicographic layout (axis 0 is slowest).
  std::size_t stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }

  SiteSet sites() const;
  bool contains_set(const SiteSet& s) const;

  friend bool operator==(const Box& a, const Box& b) {
    return a.center_ == b.center_ && a.radius_ == b.radius_;
  }

 private:
  Point center_;
  int radius_ = 0;
  std::size_t volume_ = 0;
  std::array<std::size_t, kMaxDim> strides_{};
};

// Smallest box (with integer center) containing every site of `s`.
Box bounding_box(const SiteSet& s);

struct Boundaries {
  SiteSet inner;    // sites of K with a neighbor outside K
  SiteSet outer;    // sites outside K with a neighbor in K
  SiteSet closure;  // K together with its outer boundary
};

Boundaries boundaries(const SiteSet& k);
SiteSet closure(const SiteSet& k);

// (d-1)-dimensional slab {x : x_0 = 0, |x|_inf <= half_width}.
SiteSet slice(int dim, int half_width);

// Nearest-neighbor connectivity of the induced subgraph.
bool is_connected(const SiteSet& s);

void validate_dimension(int dim);

}  // namespace interlace
