#pragma once

#include <optional>
#include <string>
#include <vector>

#include "interlace/lattice.hpp"
#include "interlace/rng.hpp"
#include "interlace/walk.hpp"

namespace interlace {

// Real values on the sites of a box; zero everywhere outside it.
struct ScalarField {
  Box domain;
  std::vector<double> values;

  double at(const Point& p) const { return domain.contains(p) ? values[domain.index(p)] : 0.0; }
};

struct PotentialSolve {
  ScalarField field;
  double residual = 0;  // max |h(x) - mean of neighbors| over free sites
  int iterations = 0;
};

inline constexpr double kDefaultSolverTolerance = 1e-10;

// h(x) = P_x[walk hits K before leaving the solve box]. The box has the given
// radius and is centered at the center of K's bounding box, so translating K
// translates the whole computation. Solved by conjugate gradients.
PotentialSolve solve_hitting_potential(const SiteSet& k, int solve_radius,
                                       double tolerance = kDefaultSolverTolerance);
ScalarField hitting_potential(const SiteSet& k, int solve_radius,
                              double tolerance = kDefaultSolverTolerance);

// Max over free sites of |h(x) - mean of the 2d neighbors|, recomputed directly.
double harmonic_residual(const ScalarField& h, const SiteSet& k);

// (1/2d) * sum over unordered nearest-neighbor pairs meeting the domain of
// (f(x) - f(y))^2, with f = 0 outside the domain.
double dirichlet_energy(const ScalarField& f);

enum class CapacityMethod { kLinearSolve, kMonteCarlo };
const char* to_string(CapacityMethod m);

struct CapacityParams {
  CapacityMethod method = CapacityMethod::kLinearSolve;
  // Linear solve. 0 picks default_solve_radius(K). With far-field boundary
  // data the error bound compares against a solve at half the radius; with
  // zero boundary data the value is cap of the box-killed walk, an upper bound.
  int solve_radius = 0;
  bool far_field_boundary = true;
  double tolerance = kDefaultSolverTolerance;
  // Monte Carlo; 0 picks default_solve_radius(K).
  int truncation_radius = 0;
  long walks_per_site = 20000;
  long step_cap = kDefaultStepCap;
  std::uint64_t seed = 1;
};

struct CapacityReport {
  double value = 0;
  SiteSet sites;                   // K, lexicographic
  std::vector<double> equilibrium; // e_K per site of `sites`
  CapacityMethod method = CapacityMethod::kLinearSolve;
  double error_bound = 0;
  int solve_radius = 0;
  double residual = 0;             // linear solve only
  long step_cap_hits = 0;          // Monte Carlo only

  double equilibrium_at(const Point& x) const;
};

int default_solve_radius(const SiteSet& k);
CapacityReport capacity(const SiteSet& k, const CapacityParams& params = {});

// Draws x in K with probability e_K(x) / cap(K).
class EquilibriumSampler {
 public:
  explicit EquilibriumSampler(const CapacityReport& report);
  Point draw(RngStream& rng) const;
  const std::vector<Point>& support() const { return support_; }

 private:
  std::vector<Point> support_;
  std::vector<double> cumulative_;
};

Point sample_equilibrium_start(const CapacityReport& report, RngStream& rng);

std::string capacity_report_to_json(const CapacityReport& report, int indent = 2);
CapacityReport capacity_report_from_json(const std::string& text);

}  // namespace interlace
