#include "interlace/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <iterator>
#include <sstream>
#include <unordered_set>

namespace interlace {

void validate_dimension(int dim) {
  require(dim >= 3 && dim <= kMaxDim,
          "dimension must be in [3, " + std::to_string(kMaxDim) + "], got " + std::to_string(dim));
}

Point::Point(int dim) {
  require(dim >= 1 && dim <= kMaxDim, "point dimension out of range");
  dim_ = static_cast<std::uint8_t>(dim);
}

Point::Point(std::initializer_list<int> coords) {
  require(coords.size() >= 1 && coords.size() <= static_cast<std::size_t>(kMaxDim),
          "point dimension out of range");
  dim_ = static_cast<std::uint8_t>(coords.size());
  std::copy(coords.begin(), coords.end(), c_.begin());
}

Point Point::from_span(std::span<const int> coords) {
  Point p(static_cast<int>(coords.size()));
  std::copy(coords.begin(), coords.end(), p.c_.begin());
  return p;
}

Point Point::unit(int dim, int axis, int sign) {
  Point p(dim);
  p[axis] = sign;
  return p;
}

Point Point::operator+(const Point& o) const {
  Point r = *this;
  r += o;
  return r;
}

Point Point::operator-(const Point& o) const {
  Point r = *this;
  for (int k = 0; k < dim_; ++k) r[k] -= o[k];
  return r;
}

Point& Point::operator+=(const Point& o) {
  for (int k = 0; k < dim_; ++k) c_[static_cast<std::size_t>(k)] += o[k];
  return *this;
}

int Point::norm_inf() const {
  int m = 0;
  for (int k = 0; k < dim_; ++k) m = std::max(m, std::abs((*this)[k]));
  return m;
}

long Point::norm1() const {
  long s = 0;
  for (int k = 0; k < dim_; ++k) s += std::abs((*this)[k]);
  return s;
}

double Point::norm2() const {
  double s = 0;
  for (int k = 0; k < dim_; ++k) s += double((*this)[k]) * (*this)[k];
  return std::sqrt(s);
}

std::vector<int> Point::coords() const {
  return std::vector<int>(c_.begin(), c_.begin() + dim_);
}

std::string Point::to_string() const {
  std::ostringstream os;
  os << '(';
  for (int k = 0; k < dim_; ++k) os << (k ? "," : "") << (*this)[k];
  os << ')';
  return os.str();
}

std::strong_ordering operator<=>(const Point& a, const Point& b) {
  if (auto c = a.dim_ <=> b.dim_; c != 0) return c;
  for (int k = 0; k < a.dim_; ++k)
    if (auto c = a[k] <=> b[k]; c != 0) return c;
  return std::strong_ordering::equal;
}

bool operator==(const Point& a, const Point& b) { return (a <=> b) == 0; }

std::size_t PointHash::operator()(const Point& p) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(p.dim());
  for (int k = 0; k < p.dim(); ++k) {
    h ^= static_cast<std::uint32_t>(p[k]);
    h *= 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 31;
  }
  return static_cast<std::size_t>(h);
}

bool are_neighbors(const Point& a, const Point& b) {
  return a.dim() == b.dim() && (a - b).norm1() == 1;
}

// --- SiteSet ---------------------------------------------------------------

SiteSet::SiteSet(std::vector<Point> sites) : sites_(std::move(sites)) {
  std::sort(sites_.begin(), sites_.end());
  sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
  if (!sites_.empty()) {
    const int d = sites_.front().dim();
    for (const auto& p : sites_) require(p.dim() == d, "SiteSet: mixed dimensions");
  }
}

SiteSet::SiteSet(std::initializer_list<Point> sites) : SiteSet(std::vector<Point>(sites)) {}

bool SiteSet::contains(const Point& p) const {
  return std::binary_search(sites_.begin(), sites_.end(), p);
}

SiteSet SiteSet::unite(const SiteSet& o) const {
  std::vector<Point> out;
  out.reserve(size() + o.size());
  std::set_union(begin(), end(), o.begin(), o.end(), std::back_inserter(out));
  return SiteSet(std::move(out));
}

SiteSet SiteSet::minus(const SiteSet& o) const {
  std::vector<Point> out;
  std::set_difference(begin(), end(), o.begin(), o.end(), std::back_inserter(out));
  return SiteSet(std::move(out));
}

SiteSet SiteSet::intersect(const SiteSet& o) const {
  std::vector<Point> out;
  std::set_intersection(begin(), end(), o.begin(), o.end(), std::back_inserter(out));
  return SiteSet(std::move(out));
}

SiteSet SiteSet::translated(const Point& shift) const {
  std::vector<Point> out;
  out.reserve(size());
  for (const auto& p : sites_) out.push_back(p + shift);
  return SiteSet(std::move(out));
}

bool SiteSet::is_subset_of(const SiteSet& o) const {
  return std::includes(o.begin(), o.end(), begin(), end());
}

int SiteSet::circumradius() const {
  int r = 0;
  for (const auto& p : sites_) r = std::max(r, p.norm_inf());
  return r;
}

// --- Box -------------------------------------------------------------------

Box::Box(Point center, int radius) : center_(center), radius_(radius) {
  require(radius >= 0, "box radius must be nonnegative");
  require(center.dim() >= 1, "box center has no dimension");
  require(center.norm_inf() + radius < kMaxCoordinate,
          "box exceeds the coordinate range (radius " + std::to_string(radius) + ")");
  const auto side = static_cast<std::size_t>(2 * radius + 1);
  std::size_t s = 1;
  for (int k = center.dim() - 1; k >= 0; --k) {
    strides_[static_cast<std::size_t>(k)] = s;
    s *= side;
  }
  volume_ = s;
}

bool Box::contains(const Point& p) const {
  for (int k = 0; k < dim(); ++k)
    if (std::abs(p[k] - center_[k]) > radius_) return false;
  return true;
}

bool Box::on_boundary(const Point& p) const {
  return contains(p) && (p - center_).norm_inf() == radius_;
}

std::size_t Box::index(const Point& p) const {
  std::size_t i = 0;
  for (int k = 0; k < dim(); ++k)
    i += static_cast<std::size_t>(p[k] - center_[k] + radius_) * strides_[static_cast<std::size_t>(k)];
  return i;
}

Point Box::point(std::size_t index) const {
  Point p(dim());
  const auto n = static_cast<std::size_t>(side());
  for (int k = dim() - 1; k >= 0; --k) {
    p[k] = static_cast<int>(index % n) - radius_ + center_[k];
    index /= n;
  }
  return p;
}

SiteSet Box::sites() const {
  std::vector<Point> out;
  out.reserve(volume_);
  for (std::size_t i = 0; i < volume_; ++i) out.push_back(point(i));
  return SiteSet(std::move(out));
}

bool Box::contains_set(const SiteSet& s) const {
  return std::all_of(s.begin(), s.end(), [&](const Point& p) { return contains(p); });
}

namespace {
int floor_div2(long v) { return static_cast<int>(v >= 0 ? v / 2 : -((-v + 1) / 2)); }
}  // namespace

Box bounding_box(const SiteSet& s) {
  require(!s.empty(), "bounding_box of empty set");
  const int d = s.dim();
  Point lo = s[0], hi = s[0];
  for (const auto& p : s)
    for (int k = 0; k < d; ++k) {
      lo[k] = std::min(lo[k], p[k]);
      hi[k] = std::max(hi[k], p[k]);
    }
  Point c(d);
  int r = 0;
  for (int k = 0; k < d; ++k) {
    c[k] = floor_div2(static_cast<long>(lo[k]) + hi[k]);
    r = std::max({r, c[k] - lo[k], hi[k] - c[k]});
  }
  return Box(c, r);
}

// --- set operators ---------------------------------------------------------

Boundaries boundaries(const SiteSet& k) {
  if (k.empty()) return {};
  const int d = k.dim();
  std::vector<Point> inner, outer;
  for (const auto& x : k) {
    bool is_inner = false;
    for (int dir = 0; dir < 2 * d; ++dir) {
      Point y = neighbor(x, dir);
      if (!k.contains(y)) {
        is_inner = true;
        outer.push_back(y);
      }
    }
    if (is_inner) inner.push_back(x);
  }
  SiteSet out_set(std::move(outer));
  return {SiteSet(std::move(inner)), out_set, k.unite(out_set)};
}

SiteSet closure(const SiteSet& k) { return boundaries(k).closure; }

SiteSet slice(int dim, int half_width) {
  validate_dimension(dim);
  require(half_width >= 0, "slice half-width must be nonnegative");
  Point sub_center(dim - 1);
  Box face(sub_center, half_width);
  std::vector<Point> out;
  out.reserve(face.volume());
  for (std::size_t i = 0; i < face.volume(); ++i) {
    Point q = face.point(i);
    Point p(dim);
    for (int k = 1; k < dim; ++k) p[k] = q[k - 1];
    out.push_back(p);
  }
  return SiteSet(std::move(out));
}

bool is_connected(const SiteSet& s) {
  if (s.size() <= 1) return true;
  const int d = s.dim();
  std::vector<char> seen(s.size(), 0);
  std::deque<std::size_t> queue{0};
  seen[0] = 1;
  std::size_t reached = 1;
  const auto& v = s.sites();
  while (!queue.empty()) {
    const Point x = v[queue.front()];
    queue.pop_front();
    for (int dir = 0; dir < 2 * d; ++dir) {
      auto it = std::lower_bound(v.begin(), v.end(), neighbor(x, dir));
      if (it == v.end() || *it != neighbor(x, dir)) continue;
      auto j = static_cast<std::size_t>(it - v.begin());
      if (!seen[j]) {
        seen[j] = 1;
        ++reached;
        queue.push_back(j);
      }
    }
  }
  return reached == s.size();
}

}  // namespace interlace
