#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "interlace/lattice.hpp"
#include "interlace/rng.hpp"

namespace interlace {

inline constexpr long kDefaultStepCap = 10'000'000;

enum class Termination : std::uint8_t {
  kExitedTruncationBall,
  kReachedStepCap,
};

const char* to_string(Termination t);

// Nearest-neighbor path stored as its start point plus one direction code
// per step (see `neighbor`).
struct WalkSegment {
  Point start;
  std::vector<std::uint8_t> moves;
  Termination reason = Termination::kExitedTruncationBall;

  std::size_t num_points() const { return moves.size() + 1; }
  Point end() const;
  std::vector<Point> points() const;
  SiteSet range() const;

  template <class F>
  void for_each_point(F&& f) const {
    Point p = start;
    f(p);
    for (auto m : moves) {
      p[m >> 1] += (m & 1) ? -1 : 1;
      f(p);
    }
  }

  // Throws PreconditionError unless consecutive points are neighbors.
  static WalkSegment from_points(const std::vector<Point>& pts,
                                 Termination reason = Termination::kExitedTruncationBall);

  friend bool operator==(const WalkSegment&, const WalkSegment&) = default;
};

// Dense membership mask over the bounding box of a finite set.
class SiteMask {
 public:
  SiteMask() = default;
  explicit SiteMask(const SiteSet& s);
  bool contains(const Point& p) const {
    return !bits_.empty() && box_.contains(p) && bits_[box_.index(p)] != 0;
  }
  bool empty() const { return bits_.empty(); }

 private:
  Box box_;
  std::vector<std::uint8_t> bits_;
};

// Simple random walk from `start` until it first leaves B(0, truncation_radius)
// or makes `step_cap` steps. The set `k` only enters through the precondition
// that the truncation ball strictly contains its closure.
WalkSegment run_until_escape(const Point& start, const SiteSet& k, int truncation_radius,
                             long step_cap, RngStream& rng);

// Same walk without the precondition on a set; used by the samplers.
WalkSegment walk_to_exit(const Point& start, int truncation_radius, long step_cap, RngStream& rng);

enum class EscapeOutcome : std::uint8_t { kEscaped, kReturned, kStepCap };

// Walk from x (x in K) for at least one step; stops on a return to K or on
// leaving B(0, truncation_radius). Only the final position is reported.
EscapeOutcome escape_trial(const Point& x, const SiteMask& k, int truncation_radius,
                           long step_cap, RngStream& rng, Point* final_position = nullptr);

// Asymptotic lattice Green function constant: G(x) ~ a_d |x|^(2-d).
double green_leading_constant(int dim);
// Far-field approximation of G(0, x); includes the |x|^-3 anisotropic
// correction for d = 3. Intended for |x|_2 >= 8.
double green_far_field(const Point& x);
// Upper bound for G(0, x) over |x|_2 >= r (r >= 1).
double green_upper_bound(int dim, double r);
// Lower bound for G(0, x) over 0 < |x|_2 <= r (r >= 1).
double green_lower_bound(int dim, double r);

// Upper bound on P_y[H_K < inf] uniformly over y outside B(0, truncation_radius).
// Without `capacity_upper`, |inner boundary of K| bounds cap(K).
double escape_error_bound(const SiteSet& k, int truncation_radius,
                          std::optional<double> capacity_upper = std::nullopt);

struct EntranceDeparture {
  SiteSet entries;
  SiteSet exits;
};

EntranceDeparture entrance_departure_points(const WalkSegment& w, const SiteSet& k);

}  // namespace interlace
