#include <gsl/gsl_cdf.h>

#include <cmath>
#include <map>

#include "doctest.h"
#include "interlace/potential.hpp"
#include "oracles.hpp"

using namespace interlace;

namespace {

SiteSet box_sites(int r) { return r == 0 ? SiteSet{Point(3)} : Box(Point(3), r).sites(); }

SiteSet random_set(RngStream& rng, int n, int spread) {
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) {
    Point p(3);
    for (int k = 0; k < 3; ++k)
      p[k] = static_cast<int>(rng.uniform_below(2 * spread + 1)) - spread;
    pts.push_back(p);
  }
  return SiteSet(pts);
}

}  // namespace

TEST_CASE("capacity of the empty set") {
  auto rep = capacity(SiteSet{});
  CHECK(rep.value == 0.0);
  CHECK(rep.equilibrium.empty());
}

TEST_CASE("capacity against the Green-function oracle") {
  const double g0 = oracle::green_bessel(Point(3));
  SUBCASE("singleton, d = 3") {
    auto rep = capacity(SiteSet{Point(3)});
    CHECK(std::abs(rep.value - 1.0 / g0) <= rep.error_bound);
    CHECK(rep.error_bound < 1e-5);
    CHECK(rep.value == doctest::Approx(0.659462670449).epsilon(1e-7));
  }
  SUBCASE("singleton, d = 4 and 5") {
    for (int d : {4, 6, 8}) {
      auto rep = capacity(SiteSet{Point(d)});
      CHECK(std::abs(rep.value - 1.0 / oracle::green_bessel(Point(d))) <= rep.error_bound);
    }
  }
  SUBCASE("boxes") {
    for (int r : {1, 2, 3}) {
      auto k = box_sites(r);
      auto rep = capacity(k);
      const double truth = oracle::capacity_by_green_system(k);
      CAPTURE(r);
      CHECK(std::abs(rep.value - truth) <= rep.error_bound);
      CHECK(std::abs(rep.value - truth) < 1e-3 * truth);
    }
  }
  SUBCASE("two points") {
    for (int x : {1, 2, 5, 20}) {
      SiteSet k{Point(3), Point{x, 0, 0}};
      // Symmetric pair: e = 1 / (G(0) + G(x)) at both points.
      const double truth = 2.0 / (g0 + oracle::green_bessel(Point{x, 0, 0}));
      auto rep = capacity(k);
      CAPTURE(x);
      CHECK(std::abs(rep.value - truth) <= rep.error_bound);
      CHECK(truth == doctest::Approx(oracle::capacity_by_green_system(k)).epsilon(1e-10));
    }
  }
  SUBCASE("irregular set") {
    RngStream rng(5, 5);
    auto k = random_set(rng, 12, 3);
    auto rep = capacity(k);
    CHECK(std::abs(rep.value - oracle::capacity_by_green_system(k)) <= rep.error_bound);
  }
}

TEST_CASE("capacity report invariants") {
  RngStream rng(2, 0);
  for (int t = 0; t < 5; ++t) {
    auto k = random_set(rng, 30, 2);
    auto rep = capacity(k);
    const auto inner = boundaries(k).inner;
    double total = 0;
    REQUIRE(rep.equilibrium.size() == k.size());
    for (std::size_t i = 0; i < k.size(); ++i) {
      CHECK(rep.equilibrium[i] >= 0.0);
      CHECK(rep.equilibrium[i] <= 1.0);
      if (!inner.contains(k[i])) CHECK(rep.equilibrium[i] == 0.0);
      total += rep.equilibrium[i];
    }
    CHECK(total == doctest::Approx(rep.value).epsilon(1e-12));
    CHECK(rep.residual <= 1e-8);
  }
}

TEST_CASE("zero boundary data gives an upper bound") {
  for (int r : {0, 1, 2}) {
    auto k = box_sites(r);
    CapacityParams p;
    p.far_field_boundary = false;
    p.solve_radius = 12;
    auto killed = capacity(k, p);
    const double truth = oracle::capacity_by_green_system(k);
    CHECK(killed.value >= truth);
    CHECK(killed.value - truth <= killed.error_bound);
  }
}

TEST_CASE("hitting potential") {
  SiteSet k{Point(3)};
  auto s = solve_hitting_potential(k, 8);
  const auto& h = s.field;
  CHECK(h.at(Point(3)) == 1.0);
  CHECK(h.at(Point{9, 0, 0}) == 0.0);
  CHECK(s.residual <= kDefaultSolverTolerance);
  CHECK(harmonic_residual(h, k) <= kDefaultSolverTolerance);
  for (std::size_t i = 0; i < h.domain.volume(); ++i) {
    CHECK(h.values[i] >= -1e-12);
    CHECK(h.values[i] <= 1.0);
  }
  SUBCASE("lattice symmetries of the singleton potential") {
    int checked = 0;
    for (std::size_t i = 0; i < h.domain.volume(); i += 7) {
      const Point x = h.domain.point(i);
      const double v = h.values[i];
      CHECK(h.at(Point{x[1], x[2], x[0]}) == doctest::Approx(v).epsilon(1e-9));
      CHECK(h.at(Point{x[1], x[0], x[2]}) == doctest::Approx(v).epsilon(1e-9));
      CHECK(h.at(Point{-x[0], x[1], -x[2]}) == doctest::Approx(v).epsilon(1e-9));
      ++checked;
    }
    CHECK(checked > 100);
  }
  SUBCASE("increasing in the solve radius") {
    auto big = hitting_potential(k, 16);
    for (std::size_t i = 0; i < h.domain.volume(); ++i)
      CHECK(h.values[i] <= big.at(h.domain.point(i)) + 1e-9);
  }
  SUBCASE("preconditions and non-convergence") {
    CHECK_THROWS_AS(hitting_potential(Box(Point(3), 4).sites(), 4), PreconditionError);
    CHECK_THROWS_AS(hitting_potential(k, 8, 0.0), PreconditionError);
    CHECK_THROWS_AS(hitting_potential(SiteSet{}, 8), PreconditionError);
    try {
      hitting_potential(k, 3, 1e-300);
      FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
      CHECK(e.last_residual() > 0.0);
    }
  }
}

TEST_CASE("dirichlet energy") {
  ScalarField f{Box(Point(3), 2), {}};
  f.values.assign(f.domain.volume(), 0.0);
  CHECK(dirichlet_energy(f) == 0.0);
  f.values[f.domain.index(Point(3))] = 1.0;
  CHECK(dirichlet_energy(f) == doctest::Approx(1.0).epsilon(1e-15));
  // A bump touching the domain edge still counts edges leaving the domain.
  ScalarField g{Box(Point(3), 0), {2.0}};
  CHECK(dirichlet_energy(g) == doctest::Approx(4.0).epsilon(1e-15));

  SUBCASE("energy of the killed potential equals the killed capacity") {
    for (int r : {0, 1, 2}) {
      auto k = box_sites(r);
      CapacityParams p;
      p.far_field_boundary = false;
      p.solve_radius = 12;
      const double e = dirichlet_energy(hitting_potential(k, 12));
      CHECK(e == doctest::Approx(capacity(k, p).value).epsilon(1e-8));
    }
  }
}

TEST_CASE("capacity is monotone and subadditive") {
  RngStream rng(11, 0);
  for (int t = 0; t < 6; ++t) {
    auto small = random_set(rng, 6, 2);
    auto extra = random_set(rng, 6, 3);
    auto big = small.unite(extra);
    auto cs = capacity(small), ce = capacity(extra), cb = capacity(big);
    CHECK(cs.value <= cb.value + cs.error_bound + cb.error_bound);
    CHECK(cb.value <= cs.value + ce.value + cs.error_bound + ce.error_bound + cb.error_bound);
  }
  double prev = 0;
  for (int r : {0, 1, 2, 3}) {
    const double c = capacity(box_sites(r)).value;
    CHECK(c > prev);
    prev = c;
  }
}

TEST_CASE("capacity is translation invariant bit for bit") {
  RngStream rng(12, 0);
  auto k = random_set(rng, 10, 3);
  auto a = capacity(k);
  for (const Point& shift : {Point{17, -3, 250}, Point{-1000, 1, 0}}) {
    auto b = capacity(k.translated(shift));
    CHECK(a.value == b.value);
    CHECK(a.equilibrium == b.equilibrium);
    CHECK(a.error_bound == b.error_bound);
  }
}

TEST_CASE("Monte Carlo and linear solve agree on small boxes" * doctest::timeout(120)) {
  for (int r : {0, 1, 2, 3}) {
    auto k = box_sites(r);
    CapacityParams mc;
    mc.method = CapacityMethod::kMonteCarlo;
    mc.walks_per_site = 4000;
    mc.truncation_radius = 24;
    mc.seed = 100 + r;
    auto a = capacity(k);
    auto b = capacity(k, mc);
    CAPTURE(r);
    CHECK(b.method == CapacityMethod::kMonteCarlo);
    CHECK(b.step_cap_hits == 0);
    CHECK(std::abs(a.value - b.value) <= a.error_bound + b.error_bound);
    CHECK(b.error_bound < 0.1 * a.value);
  }
}

TEST_CASE("Monte Carlo escape frequency from a neighbor of the origin") {
  // From x adjacent to 0 the walk returns to 0 with probability 1 - cap({0}).
  SiteSet k{Point(3)};
  SiteMask mask(k);
  RngStream rng(21, 0);
  const long walks = 100000;
  long returned = 0;
  Point y;
  for (long i = 0; i < walks; ++i)
    if (escape_trial(Point{1, 0, 0}, mask, 48, kDefaultStepCap, rng, &y) == EscapeOutcome::kReturned)
      ++returned;
  // Walks that leave B(0, 48) can still return; at most escape_error_bound of them.
  const double lo = double(returned) / walks;
  const double hi = lo + escape_error_bound(k, 48, 0.66);
  const double target = 1.0 - 1.0 / oracle::green_bessel(Point(3));
  const double se = std::sqrt(target * (1 - target) / walks);
  CHECK(target >= lo - 3 * se);
  CHECK(target <= hi + 3 * se);
}

TEST_CASE("equilibrium sampler") {
  RngStream rng(31, 0);
  SUBCASE("singleton") {
    auto rep = capacity(SiteSet{Point(3)});
    for (int i = 0; i < 100; ++i) CHECK(sample_equilibrium_start(rep, rng) == Point(3));
  }
  SUBCASE("zero capacity is rejected") {
    CapacityReport empty;
    CHECK_THROWS_AS(sample_equilibrium_start(empty, rng), PreconditionError);
  }
  SUBCASE("chi-square against the report and lattice symmetry") {
    auto k = Box(Point(3), 1).sites();
    auto rep = capacity(k);
    EquilibriumSampler sampler(rep);
    CHECK(sampler.support().size() == 26);
    std::map<Point, long> counts;
    const long draws = 100000;
    for (long i = 0; i < draws; ++i) ++counts[sampler.draw(rng)];
    double chi2 = 0;
    for (const auto& x : sampler.support()) {
      const double expected = draws * rep.equilibrium_at(x) / rep.value;
      chi2 += std::pow(counts[x] - expected, 2) / expected;
    }
    CHECK(chi2 < gsl_cdf_chisq_Qinv(1e-3, 25));
    // Faces, edges and corners: each orbit's sites share one frequency.
    std::map<int, std::vector<long>> orbits;
    for (const auto& [x, c] : counts) orbits[x.norm1()].push_back(c);
    CHECK(orbits.size() == 3);
    for (const auto& [norm, cs] : orbits) {
      double mean = 0;
      for (long c : cs) mean += c;
      mean /= cs.size();
      const double p = mean / draws;
      for (long c : cs) CHECK(std::abs(c - mean) <= 4 * std::sqrt(draws * p * (1 - p)));
    }
  }
}

TEST_CASE("capacity report JSON round trip") {
  auto rep = capacity(SiteSet{Point(3), Point{0, 2, 0}, Point{1, 1, 1}});
  auto back = capacity_report_from_json(capacity_report_to_json(rep));
  CHECK(back.value == rep.value);
  CHECK(back.sites == rep.sites);
  CHECK(back.equilibrium == rep.equilibrium);
  CHECK(back.error_bound == rep.error_bound);
  CHECK(back.solve_radius == rep.solve_radius);
  CHECK(back.method == rep.method);
}
