#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "interlace/errors.hpp"
#include "interlace/stats.hpp"

namespace interlace {

// Malformed configuration; field() names the offending key.
class ConfigError : public PreconditionError {
 public:
  ConfigError(std::string field, const std::string& detail)
      : PreconditionError("config field '" + field + "': " + detail), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Settings shared by every subcommand. Empty lists and zero counts mean
// "use the subcommand's default".
struct ExperimentConfig {
  int dim = 3;
  std::uint64_t seed = 1;
  long trials = 0;
  int workers = 1;
  std::vector<int> radii;
  std::vector<double> u;
  std::vector<std::vector<std::vector<int>>> k_sets;  // each a list of sites
  double threshold = 0.5;
  double alpha = 0.25;
  int separation = 0;  // 0: 100 d
  int l0 = 0;          // 0: admissible_l0(separation)
  std::vector<int> sweep;
  std::string capacity_method = "linear_solve";
  int solve_radius = 0;
  bool far_field_boundary = true;
  double solver_tolerance = kDefaultSolverTolerance;
  long walks_per_site = 20000;
  int truncation_radius = 0;
  long step_cap = kDefaultStepCap;
  bool far_field_reentry = true;
  std::uint64_t stream = 0;
  std::string snapshot;
  std::string out;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;

  CapacityParams capacity_params() const;
  SamplerParams sampler_params() const;
  ExperimentParams experiment_params() const;
  std::vector<SiteSet> sites() const;
};

// Throws ConfigError on unknown keys, wrong types or out-of-range values.
void validate(const ExperimentConfig& c);
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& c, int indent = -1);
// Digest of the canonical (compact, key-sorted) JSON form, ignoring `out` and `workers`.
std::string config_digest(const ExperimentConfig& c);

}  // namespace interlace
