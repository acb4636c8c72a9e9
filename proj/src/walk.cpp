#include "interlace/walk.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>

namespace interlace {

const char* to_string(Termination t) {
  switch (t) {
    case Termination::kExitedTruncationBall: return "exited_truncation_ball";
    case Termination::kReachedStepCap: return "reached_step_cap";
  }
  return "unknown";
}

Point WalkSegment::end() const {
  Point p = start;
  for (auto m : moves) p[m >> 1] += (m & 1) ? -1 : 1;
  return p;
}

std::vector<Point> WalkSegment::points() const {
  std::vector<Point> out;
  out.reserve(num_points());
  for_each_point([&](const Point& p) { out.push_back(p); });
  return out;
}

SiteSet WalkSegment::range() const { return SiteSet(points()); }

WalkSegment WalkSegment::from_points(const std::vector<Point>& pts, Termination reason) {
  require(!pts.empty(), "path must contain at least one point");
  WalkSegment w{pts.front(), {}, reason};
  w.moves.reserve(pts.size() - 1);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const Point diff = pts[i] - pts[i - 1];
    require(diff.norm1() == 1, "path points " + pts[i - 1].to_string() + " and " +
                                   pts[i].to_string() + " are not nearest neighbors");
    for (int k = 0; k < diff.dim(); ++k)
      if (diff[k] != 0) w.moves.push_back(static_cast<std::uint8_t>(2 * k + (diff[k] < 0 ? 1 : 0)));
  }
  return w;
}

SiteMask::SiteMask(const SiteSet& s) {
  if (s.empty()) return;
  box_ = bounding_box(s);
  bits_.assign(box_.volume(), 0);
  for (const auto& p : s) bits_[box_.index(p)] = 1;
}

namespace {

void check_step_cap(long step_cap) { require(step_cap > 0, "step_cap must be positive"); }

}  // namespace

WalkSegment walk_to_exit(const Point& start, int truncation_radius, long step_cap, RngStream& rng) {
  check_step_cap(step_cap);
  require(truncation_radius >= 0 && truncation_radius < kMaxCoordinate,
          "truncation radius out of range");
  require(start.norm_inf() <= truncation_radius, "walk start lies outside the truncation ball");
  const int d = start.dim();
  const int two_d = 2 * d;
  WalkSegment w{start, {}, Termination::kReachedStepCap};
  std::array<int, kMaxDim> pos{};
  for (int k = 0; k < d; ++k) pos[static_cast<std::size_t>(k)] = start[k];
  const int r = truncation_radius;
  for (long n = 0; n < step_cap; ++n) {
    const int dir = rng.small_below(two_d);
    w.moves.push_back(static_cast<std::uint8_t>(dir));
    int& c = pos[static_cast<std::size_t>(dir >> 1)];
    c += (dir & 1) ? -1 : 1;
    if (c > r || c < -r) {
      w.reason = Termination::kExitedTruncationBall;
      break;
    }
  }
  return w;
}

WalkSegment run_until_escape(const Point& start, const SiteSet& k, int truncation_radius,
                             long step_cap, RngStream& rng) {
  require(start.norm_inf() <= truncation_radius,
          "truncation radius " + std::to_string(truncation_radius) +
              " does not contain the start point " + start.to_string());
  if (!k.empty()) {
    require(k.dim() == start.dim(), "start and K have different dimensions");
    require(truncation_radius > k.circumradius() + 1,
            "truncation ball must strictly contain the closure of K");
  }
  return walk_to_exit(start, truncation_radius, step_cap, rng);
}

EscapeOutcome escape_trial(const Point& x, const SiteMask& k, int truncation_radius,
                           long step_cap, RngStream& rng, Point* final_position) {
  check_step_cap(step_cap);
  const int two_d = 2 * x.dim();
  Point p = x;
  const int r = truncation_radius;
  auto finish = [&](EscapeOutcome o) {
    if (final_position) *final_position = p;
    return o;
  };
  for (long n = 0; n < step_cap; ++n) {
    const int dir = rng.small_below(two_d);
    int& c = p[dir >> 1];
    c += (dir & 1) ? -1 : 1;
    if (c > r || c < -r) return finish(EscapeOutcome::kEscaped);
    if (k.contains(p)) return finish(EscapeOutcome::kReturned);
  }
  return finish(EscapeOutcome::kStepCap);
}

double green_leading_constant(int dim) {
  const double d = dim;
  return d * std::tgamma(d / 2.0 - 1.0) / (2.0 * std::pow(std::numbers::pi, d / 2.0));
}

double green_far_field(const Point& x) {
  const int d = x.dim();
  double r2 = 0, r4sum = 0;
  for (int k = 0; k < d; ++k) {
    const double c = x[k];
    r2 += c * c;
    r4sum += c * c * c * c;
  }
  const double r = std::sqrt(r2);
  if (d == 3) {
    return 3.0 / (2.0 * std::numbers::pi * r) +
           3.0 / (16.0 * std::numbers::pi * r * r2) * (5.0 * r4sum / (r2 * r2) - 3.0);
  }
  return green_leading_constant(d) * std::pow(r, 2.0 - d);
}

namespace {

// G(x) / (a_d |x|^(2-d)) lies in [1 - lo/|x|^2, 1 + hi/|x|^2]; twice the
// extremes seen against the Bessel-integral representation of G.
constexpr double kGreenHi[] = {1, 3, 9, 20, 42, 80};
constexpr double kGreenLo[] = {1, 1, 2.1, 3.5, 5.2, 7.2};

}  // namespace

double green_upper_bound(int dim, double r) {
  require(r >= 1.0, "green_upper_bound needs r >= 1");
  validate_dimension(dim);
  const double c = kGreenHi[dim - 3];
  return std::min(1.0, green_leading_constant(dim) * std::pow(r, 2.0 - dim) * (1.0 + c / (r * r)));
}

double green_lower_bound(int dim, double r) {
  require(r >= 1.0, "green_lower_bound needs r >= 1");
  validate_dimension(dim);
  const double c = kGreenLo[dim - 3];
  return std::max(0.0, green_leading_constant(dim) * std::pow(r, 2.0 - dim) * (1.0 - c / (r * r)));
}

double escape_error_bound(const SiteSet& k, int truncation_radius,
                          std::optional<double> capacity_upper) {
  if (k.empty()) return 0.0;
  const int rho = k.circumradius();
  require(truncation_radius >= 2 * rho && truncation_radius > rho + 1,
          "truncation radius " + std::to_string(truncation_radius) +
              " is too small relative to K (circumradius " + std::to_string(rho) + ")");
  const double cap = capacity_upper ? *capacity_upper : static_cast<double>(boundaries(k).inner.size());
  // A walk outside B(0, R) is at l-inf (hence Euclidean) distance > R - rho from K.
  const double dist = static_cast<double>(truncation_radius - rho);
  return cap * green_upper_bound(k.dim(), dist);
}

EntranceDeparture entrance_departure_points(const WalkSegment& w, const SiteSet& k) {
  std::vector<Point> entries, exits;
  bool have_prev = false;
  bool prev_in = false;
  Point prev;
  w.for_each_point([&](const Point& p) {
    const bool in = k.contains(p);
    if (have_prev) {
      if (in && !prev_in) entries.push_back(p);
      if (!in && prev_in) exits.push_back(prev);
    }
    prev = p;
    prev_in = in;
    have_prev = true;
  });
  return {SiteSet(std::move(entries)), SiteSet(std::move(exits))};
}

}  // namespace interlace
