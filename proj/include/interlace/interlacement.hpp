#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "interlace/lattice.hpp"
#include "interlace/potential.hpp"
#include "interlace/rng.hpp"
#include "interlace/walk.hpp"

namespace interlace {

// One trajectory seen from the window. The forward walk is cut into pieces:
// the first starts from the window's normalized equilibrium measure; each
// later one is a return from the far field (see SamplerParams::far_field_reentry).
// Pieces are trimmed after their last visit to the window.
struct MarkedTrajectory {
  double level_mark = 0;
  std::vector<WalkSegment> pieces;
  SiteSet trace_in_window;
  bool step_cap_hit = false;
};

struct SamplerParams {
  // Radius of the truncation ball around the window center; 0 picks
  // default_truncation_radius(window).
  int truncation_radius = 0;
  long step_cap = kDefaultStepCap;
  // A walk that leaves the truncation ball at y comes back with probability
  // cap(W) G_far(y - c), re-entering at a point drawn from the normalized
  // equilibrium measure. Without it the walk is simply stopped.
  bool far_field_reentry = true;
  // Keep step lists; traces are recorded either way.
  bool record_pieces = true;
  CapacityParams capacity;
};

int default_truncation_radius(const Box& window);

struct InterlacementSample {
  Box window;
  double u_max = 0;
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;
  int truncation_radius = 0;
  bool far_field_reentry = true;
  CapacityReport capacity_used;     // equilibrium is not kept in snapshots
  std::uint64_t capacity_digest = 0;  // of the full equilibrium measure
  std::vector<MarkedTrajectory> trajectories;  // count is the Poisson draw
  std::string provenance;  // optional JSON object (e.g. the producing config), covered by the checksum

  long step_cap_incidents() const;
};

// Precomputes what every sample of one window shares: its capacity report and
// the equilibrium start sampler.
class WindowSampler {
 public:
  WindowSampler(const Box& window, const SamplerParams& params = {});
  // Reuses a capacity report of the window's sites (e.g. loaded from JSON).
  WindowSampler(const Box& window, CapacityReport capacity, const SamplerParams& params = {});

  InterlacementSample sample(double u_max, const RngStream& rng) const;

  // Whether some trajectory of sample(u_max, rng) meets K, computed from the
  // same random stream but without recording; stops once a hit is seen.
  bool hits(const SiteSet& k, double u_max, const RngStream& rng) const;

  const Box& window() const { return window_; }
  const CapacityReport& capacity() const { return capacity_; }
  int truncation_radius() const { return radius_; }
  const SamplerParams& params() const { return params_; }

 private:
  void init();

  Box window_;
  SamplerParams params_;
  CapacityReport capacity_;
  std::optional<EquilibriumSampler> starts_;
  int radius_ = 0;
};

InterlacementSample sample_window(double u_max, const Box& window, const RngStream& rng,
                                  const SamplerParams& params = {});

struct OccupancyField {
  Box window;
  std::vector<std::uint8_t> occupied;  // per site of window, lexicographic

  bool at(const Point& p) const { return window.contains(p) && occupied[window.index(p)] != 0; }
  SiteSet occupied_sites() const;
  SiteSet vacant_sites() const;
  std::size_t occupied_count() const;
};

OccupancyField occupancy_at_level(const InterlacementSample& sample, double u);

struct LawCheck {
  double empirical = 0;
  double target = 0;
  double std_error = 0;  // binomial, at the target
  double z_score = 0;
  long trials = 0;
  long vacant = 0;
  double capacity = 0;
  double capacity_error_bound = 0;
};

inline constexpr long kMinLawTrials = 1000;

// Estimates P[K within V^u] from fresh window samples (trial t uses stream
// (seed, first_stream + t)) and compares with exp(-u cap(K)).
LawCheck verify_law(const SiteSet& k, const Box& window, double u, long trials,
                    std::uint64_t seed, const SamplerParams& params = {},
                    std::uint64_t first_stream = 0);

// Snapshot: everything needed to re-derive any occupancy field bit-exactly,
// plus a checksum over the canonical content.
std::string snapshot_to_json(const InterlacementSample& sample, int indent = -1);
InterlacementSample snapshot_from_json(const std::string& text);
// FNV-1a digest of the occupancy field, for replay comparisons.
std::uint64_t occupancy_digest(const OccupancyField& field);

}  // namespace interlace
