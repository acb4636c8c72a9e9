#pragma once

#include <array>
#include <string>
#include <vector>

#include "interlace/interlacement.hpp"
#include "interlace/lattice.hpp"
#include "interlace/walk.hpp"

namespace interlace {

// Finite nearest-neighbor path; vertices may repeat.
struct PathPiece {
  std::vector<Point> points;

  PathPiece() = default;
  // Throws PreconditionError unless nonempty with consecutive neighbors.
  explicit PathPiece(std::vector<Point> pts);

  const Point& front() const { return points.front(); }
  const Point& back() const { return points.back(); }
  SiteSet range() const;

  friend bool operator==(const PathPiece&, const PathPiece&) = default;
};

// A walk from `start` to `end` whose range is S plus any endpoint outside S.
// Depth-first closed tour of S, then a shortest path in S to `end`.
// Requires S connected and each endpoint in S or adjacent to it.
PathPiece covering_excursion(const SiteSet& s, const Point& start, const Point& end);

// Shortest path inside S between two of its sites (deterministic tie-breaks).
PathPiece shortest_path_within(const SiteSet& s, const Point& from, const Point& to);

// Maximal runs of consecutive points inside `region`, as [first, last] indices.
struct Excursion {
  std::size_t first = 0, last = 0;
};
std::vector<Excursion> excursions(const std::vector<Point>& pts, const SiteSet& region);

// Splices a closed covering walk of `closure_k` in at the first visit.
WalkSegment fill_first_visit(const WalkSegment& segment, const SiteSet& closure_k);

struct RerouteResult {
  WalkSegment segment;
  bool applied = false;  // false: some excursion endpoint lies outside S, identity
  std::vector<Point> offending;
};

// Replaces each excursion inside `closure_k` by a shortest path in S with the
// same endpoints. S must equal closure_k minus U and be connected.
RerouteResult reroute_avoiding(const WalkSegment& segment, const SiteSet& closure_k, const SiteSet& u,
                               const SiteSet& s);

// K = B(0, L); U = K without its corners, z1, z2, and their neighbors in K.
struct RerouteFixture {
  SiteSet k, closure_k, u, s;
  Point z1, z2;
};
RerouteFixture reroute_fixture(int dim, int half_width, const Point& z1, const Point& z2);

inline constexpr int kCorridorSeparationPerDim = 100;
// Upper limit on the slab closure size accepted by plan_corridors.
inline constexpr long kMaxCorridorSites = 20'000'000;

struct CorridorPlan {
  int dim = 3;
  int l0 = 0;
  int separation = 0;
  std::array<Point, 3> z;
  std::array<PathPiece, 3> gammas;
  Point y;
  SiteSet h;       // union of the gamma ranges
  SiteSet c;       // closure of S_{L0} minus H
  SiteSet top, bottom, kernel, sides;
  SiteSet closure; // closure of S_{L0}
};

struct CorridorCheck {
  std::string claim;
  bool passed = false;
  std::string detail;
};

// Claims checked by check_corridors, in order.
inline const std::array<const char*, 5> kCorridorClaims = {
    "(a) gamma starts at z, steps into the slab, enters the inner slab within d-1 steps",
    "(b) the gammas meet pairwise only at y",
    "(c) H minus y has exactly three components",
    "(d) C is connected",
    "(e) T, B, Kc, E partition C as defined",
};

std::vector<CorridorCheck> check_corridors(const CorridorPlan& plan);

// Builds the three paths and the partition, then runs every check; throws
// VerificationError naming the first failed claim.
CorridorPlan build_corridors(int l0, const std::array<Point, 3>& z, int separation);
// Same without throwing on a failed check.
CorridorPlan plan_corridors(int l0, const std::array<Point, 3>& z, int separation);

// Three points of the slab's outer boundary near three corners, pairwise at
// l-infinity distance 2 L0 + 1.
std::array<Point, 3> default_corridor_endpoints(int dim, int l0);
// Smallest L0 for which default_corridor_endpoints are `separation` apart.
int admissible_l0(int separation);

struct SweepRow {
  int separation = 0;
  int l0 = 0;
  bool passed = false;
  std::string failed_claim;
};
std::vector<SweepRow> corridor_sweep(int dim, const std::vector<int>& separations);
// Smallest swept separation from which every larger swept one passes; -1 if none.
int minimal_passing_separation(const std::vector<SweepRow>& rows);

std::string corridor_plan_to_json(const CorridorPlan& plan, int indent = -1);

struct CorridorFill {
  OccupancyField field;
  std::size_t excursions_replaced = 0;
  bool covered() const { return excursions_replaced > 0; }
};

// Replaces every excursion in the slab closure of the trajectories with mark
// <= u by a covering walk of C with the same endpoints. Requires the slab
// closure inside the window, pieces recorded, and all excursion endpoints
// in C.
CorridorFill fill_to_corridor(const InterlacementSample& sample, const CorridorPlan& plan, double u);

// A hand-built sample on B(0, L0 + 1): one trajectory covers everything
// outside the slab closure and ends with a one-site excursion into C.
InterlacementSample corridor_fixture_sample(const CorridorPlan& plan);

}  // namespace interlace
