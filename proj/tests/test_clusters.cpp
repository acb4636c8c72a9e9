#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

#include "doctest.h"
#include "interlace/clusters.hpp"

using namespace interlace;

namespace {

OccupancyField all_occupied(const Box& b) { return {b, std::vector<std::uint8_t>(b.volume(), 1)}; }
OccupancyField all_vacant(const Box& b) { return {b, std::vector<std::uint8_t>(b.volume(), 0)}; }

void vacate(OccupancyField& f, const Point& p) { f.occupied[f.window.index(p)] = 0; }

// Straight run of vacant sites from `from` along `axis` to the window face.
void vacate_ray(OccupancyField& f, Point from, int axis, int sign) {
  while (f.window.contains(from)) {
    vacate(f, from);
    from[axis] += sign;
  }
}

OccupancyField random_field(const Box& b, double p_occupied, RngStream& rng) {
  OccupancyField f{b, std::vector<std::uint8_t>(b.volume())};
  for (auto& o : f.occupied) o = rng.uniform01() < p_occupied;
  return f;
}

struct OracleComponent {
  std::vector<Point> members;  // in BFS order
  bool touches = false;
};

// Breadth-first search over vacant sites using Point arithmetic only.
std::vector<OracleComponent> bfs_components(const OccupancyField& f, const SiteSet& removed = {}) {
  std::set<Point> seen;
  std::vector<OracleComponent> out;
  auto vacant = [&](const Point& p) { return f.window.contains(p) && !f.at(p) && !removed.contains(p); };
  for (const auto& start : f.window.sites()) {
    if (!vacant(start) || seen.count(start)) continue;
    OracleComponent c;
    std::deque<Point> q{start};
    seen.insert(start);
    while (!q.empty()) {
      const Point x = q.front();
      q.pop_front();
      c.members.push_back(x);
      for (int dir = 0; dir < 2 * x.dim(); ++dir) {
        const Point y = neighbor(x, dir);
        if (!f.window.contains(y)) c.touches = true;
        else if (vacant(y) && seen.insert(y).second) q.push_back(y);
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::size_t boundary_count(const std::vector<OracleComponent>& cs) {
  return static_cast<std::size_t>(std::count_if(cs.begin(), cs.end(), [](const auto& c) { return c.touches; }));
}

// Removes each candidate site in turn and counts the boundary-touching
// components formed by its former component.
SiteSet naive_trifurcations(const OccupancyField& f) {
  std::vector<Point> out;
  for (const auto& comp : bfs_components(f)) {
    if (!comp.touches) continue;
    const SiteSet members(comp.members);
    for (const auto& y : comp.members) {
      if (f.window.on_boundary(y)) continue;
      std::size_t count = 0;
      for (const auto& c : bfs_components(f, SiteSet{y}))
        if (c.touches && members.contains(c.members.front())) ++count;
      if (count >= 3) out.push_back(y);
    }
  }
  return SiteSet(out);
}

}  // namespace

TEST_CASE("label: simple fields") {
  const Box b(Point(3), 3);
  SUBCASE("all vacant") {
    auto lab = label(all_vacant(b));
    REQUIRE(lab.components.size() == 1);
    CHECK(lab.components[0].id == 0);
    CHECK(lab.components[0].size == b.volume());
    CHECK(lab.components[0].diameter == 6);
    CHECK(lab.components[0].touches_boundary);
    CHECK(lab.boundary_component_count() == 1);
  }
  SUBCASE("all occupied") {
    auto lab = label(all_occupied(b));
    CHECK(lab.components.empty());
    CHECK(std::all_of(lab.component_id.begin(), lab.component_id.end(), [](auto id) { return id == kOccupied; }));
  }
  SUBCASE("checkerboard") {
    auto f = all_occupied(b);
    for (const auto& p : b.sites())
      if ((p[0] + p[1] + p[2]) % 2 == 0) vacate(f, p);
    auto lab = label(f);
    std::size_t vacant = 0;
    for (auto o : f.occupied) vacant += !o;
    CHECK(lab.components.size() == vacant);
    for (const auto& c : lab.components) {
      CHECK(c.size == 1);
      CHECK(c.diameter == 0);
      CHECK(c.touches_boundary == b.on_boundary(b.point(c.id)));
    }
  }
  SUBCASE("isolated interior site") {
    auto f = all_occupied(b);
    vacate(f, Point(3));
    vacate_ray(f, Point{2, 0, 0}, 0, +1);
    auto lab = label(f);
    REQUIRE(lab.components.size() == 2);
    CHECK(!lab.component(lab.id_at(Point(3))).touches_boundary);
    CHECK(lab.component(lab.id_at(Point{2, 0, 0})).touches_boundary);
    CHECK(lab.component(lab.id_at(Point{2, 0, 0})).diameter == 1);
    CHECK(lab.id_at(Point{9, 0, 0}) == kOccupied);
  }
}

TEST_CASE("label matches a breadth-first oracle on random fields") {
  const Box b(Point(3), 6);
  RngStream rng(21, 0);
  const double densities[] = {0.2, 0.45, 0.55, 0.7, 0.9};
  for (int t = 0; t < 1000; ++t) {
    auto f = random_field(b, densities[t % 5], rng);
    auto lab = label(f);
    auto oracle = bfs_components(f);
    REQUIRE(lab.components.size() == oracle.size());
    std::size_t covered = 0;
    for (const auto& oc : oracle) {
      const Point smallest = *std::min_element(oc.members.begin(), oc.members.end());
      const auto id = lab.id_at(oc.members.front());
      REQUIRE(id >= 0);
      CHECK(static_cast<std::size_t>(id) == b.index(smallest));
      for (const auto& x : oc.members) CHECK(lab.id_at(x) == id);
      const auto& c = lab.component(id);
      CHECK(c.size == oc.members.size());
      CHECK(c.touches_boundary == oc.touches);
      int diam = 0;
      for (int k = 0; k < 3; ++k) {
        auto [lo, hi] = std::minmax_element(oc.members.begin(), oc.members.end(),
                                            [k](const Point& a, const Point& p) { return a[k] < p[k]; });
        diam = std::max(diam, (*hi)[k] - (*lo)[k]);
      }
      CHECK(c.diameter == diam);
      covered += oc.members.size();
    }
    CHECK(covered == static_cast<std::size_t>(std::count(f.occupied.begin(), f.occupied.end(), 0)));
  }
}

TEST_CASE("label in other dimensions") {
  RngStream rng(22, 0);
  for (int d : {4, 5}) {
    const Box b(Point(d), 2);
    for (int t = 0; t < 50; ++t) {
      auto f = random_field(b, 0.6, rng);
      auto lab = label(f);
      auto oracle = bfs_components(f);
      CHECK(lab.components.size() == oracle.size());
      CHECK(lab.boundary_component_count() == boundary_count(oracle));
    }
  }
}

TEST_CASE("coupled levels refine the component partition") {
  const Box window(Point(3), 5);
  WindowSampler sampler(window);
  for (std::uint64_t t = 0; t < 40; ++t) {
    auto s = sampler.sample(2.0, RngStream(31, t));
    auto prev = label(occupancy_at_level(s, 0.0));
    for (double u : {0.4, 0.8, 1.3, 2.0}) {
      auto cur = label(occupancy_at_level(s, u));
      CHECK(refines(cur, prev));
      prev = std::move(cur);
    }
  }
  // Merging is detected.
  const Box b(Point(3), 2);
  auto split = all_occupied(b);
  vacate(split, Point{0, 0, 0});
  vacate(split, Point{0, 0, 2});
  auto joined = split;
  vacate(joined, Point{0, 0, 1});
  CHECK(refines(label(split), label(joined)));
  CHECK(!refines(label(joined), label(split)));
}

TEST_CASE("exiting tuples") {
  const Box b(Point(3), 6);
  const SiteSet k = Box(Point(3), 1).sites();
  const Point left{-1, 0, 0}, right{1, 0, 0};

  SUBCASE("fully vacant window") {
    auto f = all_vacant(b);
    auto lab = label(f);
    CHECK(!exiting_tuple(lab, f, {k, {left, right}}));
    CHECK(exiting_tuple(lab, f, {k, {left}}));
  }
  SUBCASE("two tunnels to opposite faces") {
    auto f = all_occupied(b);
    vacate_ray(f, left, 0, -1);
    vacate_ray(f, right, 0, +1);
    auto lab = label(f);
    CHECK(exiting_tuple(lab, f, {k, {left, right}}));
    CHECK(exiting_tuple(lab, f, {k, {right, left}}));
    CHECK(!exiting_tuple(lab, f, {k, {left, right, Point(3)}}));  // centre occupied
    // Pigeonhole: only two boundary-touching components exist.
    vacate(f, Point{0, 1, 0});
    auto lab2 = label(f);
    CHECK(!exiting_tuple(lab2, f, {k, {left, right, Point{0, 1, 0}}}));
  }
  SUBCASE("tunnels joined through K fail") {
    auto f = all_occupied(b);
    vacate_ray(f, left, 0, -1);
    vacate_ray(f, right, 0, +1);
    vacate(f, Point(3));
    auto lab = label(f);
    CHECK(!exiting_tuple(lab, f, {k, {left, right}}));
  }
  SUBCASE("connection outside K survives deleting K") {
    // The two candidates connect only through a detour outside K, so they
    // stay in one component after K \ {candidates} is removed.
    auto f = all_occupied(b);
    vacate_ray(f, left, 0, -1);
    vacate_ray(f, right, 0, +1);
    for (int x = -1; x <= 1; ++x) vacate(f, Point{x, 2, 0});
    vacate(f, Point{-1, 1, 0});
    vacate(f, Point{1, 1, 0});
    auto lab = label(f);
    CHECK(!exiting_tuple(lab, f, {k, {left, right}}));
  }
  SUBCASE("connection through K is cut by the deletion") {
    auto f = all_occupied(b);
    vacate_ray(f, left, 0, -1);
    vacate_ray(f, right, 0, +1);
    vacate_ray(f, Point{0, 1, 0}, 1, +1);
    auto lab = label(f);
    CHECK(exiting_tuple(lab, f, {k, {left, right, Point{0, 1, 0}}}));
  }
  SUBCASE("preconditions") {
    auto f = all_vacant(b);
    auto lab = label(f);
    CHECK_THROWS_AS(exiting_tuple(lab, f, {k, {left, left}}), PreconditionError);
    CHECK_THROWS_AS(exiting_tuple(lab, f, {k, {Point{3, 0, 0}}}), PreconditionError);
    CHECK_THROWS_AS(exiting_tuple(lab, f, {SiteSet{Point{6, 0, 0}}, {Point{6, 0, 0}}}), PreconditionError);
  }
}

TEST_CASE("exiting tuples are monotone in k") {
  const Box b(Point(3), 5);
  const SiteSet k = Box(Point(3), 1).sites();
  RngStream rng(23, 0);
  int positives = 0;
  std::vector<Point> faces;
  for (int dir = 0; dir < 6; ++dir) faces.push_back(neighbor(Point(3), dir));
  for (int t = 0; t < 400; ++t) {
    // Sparse noise plus rays from the face centres of K towards the window faces.
    auto f = random_field(b, 0.75, rng);
    for (const auto& x : k) f.occupied[b.index(x)] = rng.uniform01() < 0.5;
    for (int dir = 0; dir < 6; ++dir)
      if (rng.uniform01() < 0.7) vacate_ray(f, faces[static_cast<std::size_t>(dir)], dir >> 1, (dir & 1) ? -1 : 1);
    auto lab = label(f);
    std::vector<Point> cand;
    while (cand.size() < 3) {
      const Point p = faces[rng.uniform_below(6)];
      if (std::find(cand.begin(), cand.end(), p) == cand.end()) cand.push_back(p);
    }
    if (!exiting_tuple(lab, f, {k, cand})) continue;
    ++positives;
    for (std::size_t drop = 0; drop < 3; ++drop) {
      std::vector<Point> sub;
      for (std::size_t i = 0; i < 3; ++i)
        if (i != drop) sub.push_back(cand[i]);
      CHECK(exiting_tuple(lab, f, {k, sub}));
      CHECK(exiting_tuple(lab, f, {k, {sub[0]}}));
    }
  }
  CHECK(positives > 0);
}

TEST_CASE("trifurcation points") {
  const Box b(Point(3), 4);
  SUBCASE("empty vacant set") {
    auto f = all_occupied(b);
    CHECK(trifurcation_points(label(f), f).empty());
  }
  SUBCASE("solid box") {
    const Box b3(Point(3), 3);
    auto f = all_vacant(b3);
    CHECK(trifurcation_points(label(f), f).empty());
    CHECK(naive_trifurcations(f).empty());
  }
  SUBCASE("three corridors meeting at y") {
    const Point y{1, -1, 0};
    auto f = all_occupied(b);
    vacate_ray(f, y, 0, +1);
    vacate_ray(f, y, 1, +1);
    vacate_ray(f, y, 2, -1);
    auto lab = label(f);
    CHECK(trifurcation_points(lab, f) == SiteSet{y});
    CHECK(lab.boundary_component_count() == 1);
  }
  SUBCASE("two corridors are not enough") {
    auto f = all_occupied(b);
    vacate_ray(f, Point(3), 0, +1);
    vacate_ray(f, Point(3), 1, +1);
    CHECK(trifurcation_points(label(f), f).empty());
  }
  SUBCASE("a dead end does not count") {
    auto f = all_occupied(b);
    vacate_ray(f, Point(3), 0, +1);
    vacate_ray(f, Point(3), 1, +1);
    vacate(f, Point{0, 0, 1});
    vacate(f, Point{0, 0, 2});
    CHECK(trifurcation_points(label(f), f).empty());
  }
  SUBCASE("a corridor bundle splitting twice") {
    auto f = all_occupied(b);
    vacate_ray(f, Point{0, 0, 0}, 0, -1);
    vacate_ray(f, Point{0, 0, 0}, 2, +1);
    vacate_ray(f, Point{0, 0, 0}, 1, +1);
    vacate_ray(f, Point{0, 2, 0}, 0, +1);
    vacate_ray(f, Point{0, 2, 0}, 2, -1);
    CHECK(trifurcation_points(label(f), f) == (SiteSet{Point{0, 0, 0}, Point{0, 2, 0}}));
  }
}

TEST_CASE("trifurcation points match per-site removal on random fields") {
  RngStream rng(24, 0);
  for (int d : {3, 4}) {
    const Box b(Point(d), d == 3 ? 4 : 2);
    for (int t = 0; t < (d == 3 ? 150 : 60); ++t) {
      auto f = random_field(b, 0.45 + 0.05 * (t % 4), rng);
      auto lab = label(f);
      auto tri = trifurcation_points(lab, f);
      CHECK(tri == naive_trifurcations(f));
      const auto before = lab.boundary_component_count();
      for (const auto& y : tri) {
        auto g = f;
        g.occupied[b.index(y)] = 1;
        CHECK(label(g).boundary_component_count() >= before + 2);
      }
    }
  }
}

TEST_CASE("labeling CSV") {
  const Box b(Point{2, 0, 0}, 1);
  auto f = all_occupied(b);
  vacate_ray(f, Point{2, 0, 0}, 0, +1);
  vacate(f, Point{2, 0, 0});
  const auto csv = labeling_to_csv(label(f));
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "x0,x1,x2,occupied,component,touches_boundary");
  int rows = 0, vacant = 0;
  while (std::getline(in, line)) {
    ++rows;
    if (line.find(",0,") != std::string::npos && line.rfind(",1") == line.size() - 2) ++vacant;
  }
  CHECK(rows == 27);
  CHECK(vacant == 2);
  CHECK(csv.find("2,0,0,0,13,1\n") != std::string::npos);
  CHECK(csv.find("3,0,0,0,13,1\n") != std::string::npos);
}
