#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "interlace/interlacement.hpp"

namespace interlace {

// Shared settings of the Monte Carlo experiments. Trial t of an experiment
// always draws from RngStream(seed, t), so results do not depend on workers.
struct ExperimentParams {
  int dim = 3;
  std::uint64_t seed = 1;
  int workers = 1;
  SamplerParams sampler;
};

struct Estimate {
  double value = 0;
  long trials = 0;
  long successes = 0;
  double std_error = 0;  // sqrt(value (1 - value) / trials)
  std::string config_digest;
};

Estimate make_estimate(long successes, long trials, std::string config_digest = {});

// 16-hex-digit FNV-1a digest of a canonical configuration string.
std::string digest_hex(const std::string& canonical);

// Runs body(t) for t in [0, n) on up to `workers` threads.
void parallel_trials(long n, int workers, const std::function<void(long)>& body);

// Whether the origin is vacant and its vacant component reaches the window's
// inner boundary.
bool origin_crosses(const OccupancyField& field);

inline constexpr long kMinCrossingTrials = 100;

// P[origin connected to the inner boundary of B(0, r) within V^u].
Estimate crossing_probability(double u, int r, long trials, const ExperimentParams& params = {});

// For each trial, the level below which the origin crosses: the crossing
// holds at u iff u < critical[t]. Infinity when it still holds at u_max.
struct CrossingLevels {
  int r = 0;
  double u_max = 0;
  std::vector<double> critical;
  std::string config_digest;

  Estimate at(double u) const;
};

CrossingLevels crossing_levels(double u_max, int r, long trials, const ExperimentParams& params = {});

struct EtaCurve {
  int r = 0;
  std::vector<double> u;
  std::vector<Estimate> estimates;
  std::uint64_t seed = 0;
};

// One coupled batch at u_max = max(grid), thresholded at every grid level.
EtaCurve eta_curve(const std::vector<double>& u_grid, int r, long trials, const ExperimentParams& params = {});

struct UStarBracket {
  double u_low = 0, u_high = 0;
  Estimate at_low, at_high;
  int r = 0;
  long trials = 0;
  double threshold = 0.5;
  bool certified = false;  // both ends separated from the threshold by 2 standard errors
  int evaluations = 0;
  std::string config_digest;
};

inline constexpr int kDefaultBisectionBudget = 24;

// Doubles u until the crossing estimate is certified below the threshold,
// then bisects on coupled samples at that level.
UStarBracket ustar_bracket(int r, long trials, double threshold = 0.5, const ExperimentParams& params = {},
                           int budget = kDefaultBisectionBudget);

struct UniquenessReport {
  Estimate two_large;  // two or more vacant components of diameter >= alpha n
  double trifurcation_density = 0;  // mean trifurcation points per window site
  int n = 0;
  double alpha = 0;
  double u = 0;
};

UniquenessReport uniqueness_frequency(double u, int n, double alpha, long trials,
                                      const ExperimentParams& params = {});

// Decimal with 12 significant digits.
std::string format_number(double x);

// Rows: u,r,estimate,std_error,trials,seed
std::string eta_curve_to_csv(const EtaCurve& curve);
std::string estimate_csv_header();
std::string estimate_csv_row(double u, int r, const Estimate& e, std::uint64_t seed);

}  // namespace interlace
