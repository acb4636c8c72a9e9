#include "interlace/surgery.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <optional>

#include "json.hpp"

namespace interlace {

namespace {

// Position of p in the sorted site vector, if present.
std::optional<std::size_t> find_index(const SiteSet& s, const Point& p) {
  const auto& v = s.sites();
  auto it = std::lower_bound(v.begin(), v.end(), p);
  if (it == v.end() || *it != p) return std::nullopt;
  return static_cast<std::size_t>(it - v.begin());
}

std::optional<Point> first_neighbor_in(const SiteSet& s, const Point& p) {
  for (int dir = 0; dir < 2 * p.dim(); ++dir)
    if (s.contains(neighbor(p, dir))) return neighbor(p, dir);
  return std::nullopt;
}

std::size_t count_components(const SiteSet& s) {
  std::vector<char> seen(s.size(), 0);
  std::size_t count = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (seen[i]) continue;
    ++count;
    std::deque<std::size_t> q{i};
    seen[i] = 1;
    while (!q.empty()) {
      const Point x = s[q.front()];
      q.pop_front();
      for (int dir = 0; dir < 2 * x.dim(); ++dir)
        if (auto j = find_index(s, neighbor(x, dir)); j && !seen[*j]) {
          seen[*j] = 1;
          q.push_back(*j);
        }
    }
  }
  return count;
}

int max_transverse(const Point& p) {
  int m = 0;
  for (int k = 1; k < p.dim(); ++k) m = std::max(m, std::abs(p[k]));
  return m;
}

bool in_slab(const Point& p, int l) { return p[0] == 0 && max_transverse(p) <= l; }

}  // namespace

PathPiece::PathPiece(std::vector<Point> pts) : points(std::move(pts)) {
  require(!points.empty(), "path piece must contain at least one point");
  for (std::size_t i = 1; i < points.size(); ++i)
    require(are_neighbors(points[i - 1], points[i]),
            "path points " + points[i - 1].to_string() + " and " + points[i].to_string() + " are not neighbors");
}

SiteSet PathPiece::range() const { return SiteSet(points); }

PathPiece shortest_path_within(const SiteSet& s, const Point& from, const Point& to) {
  const auto a = find_index(s, from), b = find_index(s, to);
  require(a && b, "shortest path endpoints must lie in the set");
  constexpr std::size_t kNone = ~std::size_t{0};
  std::vector<std::size_t> parent(s.size(), kNone);
  parent[*a] = *a;
  std::deque<std::size_t> q{*a};
  while (!q.empty() && parent[*b] == kNone) {
    const std::size_t i = q.front();
    q.pop_front();
    for (int dir = 0; dir < 2 * s[i].dim(); ++dir)
      if (auto j = find_index(s, neighbor(s[i], dir)); j && parent[*j] == kNone) {
        parent[*j] = i;
        q.push_back(*j);
      }
  }
  require(parent[*b] != kNone, "no path inside the set between " + from.to_string() + " and " + to.to_string());
  std::vector<Point> out;
  for (std::size_t i = *b; i != *a; i = parent[i]) out.push_back(s[i]);
  out.push_back(from);
  std::reverse(out.begin(), out.end());
  return PathPiece(std::move(out));
}

PathPiece covering_excursion(const SiteSet& s, const Point& start, const Point& end) {
  require(!s.empty(), "covering excursion of an empty set");
  require(is_connected(s), "covering excursion needs a connected set");
  auto attach = [&](const Point& p) {
    if (s.contains(p)) return p;
    auto q = first_neighbor_in(s, p);
    require(q.has_value(), "endpoint " + p.to_string() + " is neither in the set nor adjacent to it");
    return *q;
  };
  const Point root = attach(start), target = attach(end);

  std::vector<Point> out;
  if (start != root) out.push_back(start);

  // Closed depth-first tour from the root.
  std::vector<char> seen(s.size(), 0);
  struct Frame {
    std::size_t i;
    int dir;
  };
  const std::size_t r = *find_index(s, root);
  std::vector<Frame> stack{{r, 0}};
  seen[r] = 1;
  out.push_back(root);
  while (!stack.empty()) {
    Frame& f = stack.back();
    const Point x = s[f.i];
    if (f.dir < 2 * x.dim()) {
      const auto j = find_index(s, neighbor(x, f.dir++));
      if (j && !seen[*j]) {
        seen[*j] = 1;
        out.push_back(s[*j]);
        stack.push_back({*j, 0});
      }
      continue;
    }
    stack.pop_back();
    if (!stack.empty()) out.push_back(s[stack.back().i]);
  }

  const auto tail = shortest_path_within(s, root, target);
  out.insert(out.end(), tail.points.begin() + 1, tail.points.end());
  if (end != target) out.push_back(end);
  return PathPiece(std::move(out));
}

std::vector<Excursion> excursions(const std::vector<Point>& pts, const SiteSet& region) {
  std::vector<Excursion> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!region.contains(pts[i])) continue;
    if (!out.empty() && out.back().last + 1 == i) out.back().last = i;
    else out.push_back({i, i});
  }
  return out;
}

WalkSegment fill_first_visit(const WalkSegment& segment, const SiteSet& closure_k) {
  require(is_connected(closure_k), "fill_first_visit needs a connected closure");
  const auto pts = segment.points();
  auto it = std::find_if(pts.begin(), pts.end(), [&](const Point& p) { return closure_k.contains(p); });
  if (it == pts.end()) return segment;
  const auto first = static_cast<std::size_t>(it - pts.begin());
  const auto cover = covering_excursion(closure_k, pts[first], pts[first]);
  std::vector<Point> out(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(first));
  out.insert(out.end(), cover.points.begin(), cover.points.end());
  out.insert(out.end(), pts.begin() + static_cast<std::ptrdiff_t>(first) + 1, pts.end());
  return WalkSegment::from_points(out, segment.reason);
}

RerouteResult reroute_avoiding(const WalkSegment& segment, const SiteSet& closure_k, const SiteSet& u,
                               const SiteSet& s) {
  require(u.is_subset_of(closure_k), "U must lie inside the closure");
  require(s == closure_k.minus(u), "S must equal the closure minus U");
  require(!s.empty() && is_connected(s), "S must be nonempty and connected");
  const auto pts = segment.points();
  const auto runs = excursions(pts, closure_k);
  RerouteResult out{segment, false, {}};
  for (const auto& e : runs)
    for (auto i : {e.first, e.last})
      if (!s.contains(pts[i])) out.offending.push_back(pts[i]);
  if (!out.offending.empty()) return out;

  std::vector<Point> next;
  std::size_t i = 0;
  for (const auto& e : runs) {
    next.insert(next.end(), pts.begin() + static_cast<std::ptrdiff_t>(i),
                pts.begin() + static_cast<std::ptrdiff_t>(e.first));
    const auto detour = shortest_path_within(s, pts[e.first], pts[e.last]);
    next.insert(next.end(), detour.points.begin(), detour.points.end());
    i = e.last + 1;
  }
  next.insert(next.end(), pts.begin() + static_cast<std::ptrdiff_t>(i), pts.end());
  out.segment = WalkSegment::from_points(next, segment.reason);
  out.applied = true;
  return out;
}

RerouteFixture reroute_fixture(int dim, int half_width, const Point& z1, const Point& z2) {
  validate_dimension(dim);
  require(half_width >= 1, "fixture box needs half-width >= 1");
  RerouteFixture f;
  f.k = Box(Point(dim), half_width).sites();
  const auto b = boundaries(f.k);
  f.closure_k = b.closure;
  require(b.outer.contains(z1) && b.outer.contains(z2) && z1 != z2,
          "z1 and z2 must be distinct points of the outer boundary");
  f.z1 = z1;
  f.z2 = z2;
  std::vector<Point> u;
  for (const auto& x : f.k) {
    bool corner = true;
    for (int k = 0; k < dim; ++k) corner = corner && std::abs(x[k]) == half_width;
    if (!corner) u.push_back(x);
  }
  for (const auto& z : {z1, z2}) {
    u.push_back(z);
    for (int dir = 0; dir < 2 * dim; ++dir)
      if (f.k.contains(neighbor(z, dir))) u.push_back(neighbor(z, dir));
  }
  f.u = SiteSet(u);
  f.s = f.closure_k.minus(f.u);
  return f;
}

std::array<Point, 3> default_corridor_endpoints(int dim, int l0) {
  validate_dimension(dim);
  require(l0 >= 1, "L0 must be positive");
  std::array<Point, 3> z{Point(dim), Point(dim), Point(dim)};
  z[0][1] = l0 + 1;
  z[0][2] = -l0;
  z[1][1] = -l0;
  z[1][2] = l0 + 1;
  z[2][1] = -(l0 + 1);
  z[2][2] = -l0;
  return z;
}

int admissible_l0(int separation) {
  require(separation >= 1, "separation must be positive");
  return std::max(1, separation / 2);
}

namespace {

// Dense mask over the inner slab {x_0 = 0, |x|_inf <= m}.
class SlabMask {
 public:
  SlabMask(int dim, int m) : dim_(dim), m_(m), side_(static_cast<std::size_t>(2 * m + 1)) {
    std::size_t n = 1;
    for (int k = 1; k < dim; ++k) n *= side_;
    bits_.assign(n, 0);
  }
  bool inside(const Point& p) const { return m_ >= 0 && in_slab(p, m_); }
  std::size_t index(const Point& p) const {
    std::size_t i = 0;
    for (int k = 1; k < dim_; ++k) i = i * side_ + static_cast<std::size_t>(p[k] + m_);
    return i;
  }
  bool get(const Point& p) const { return inside(p) && bits_[index(p)]; }
  void set(const Point& p) {
    if (inside(p)) bits_[index(p)] = 1;
  }
  void set_with_neighbors(const Point& p) {
    set(p);
    for (int dir = 0; dir < 2 * dim_; ++dir) set(neighbor(p, dir));
  }
  std::size_t size() const { return bits_.size(); }

 private:
  int dim_, m_;
  std::size_t side_;
  std::vector<std::uint8_t> bits_;
};

// Breadth-first route inside the inner slab from `from` to a free neighbor
// of y, avoiding blocked sites and y itself; then the final step to y.
std::optional<std::vector<Point>> route_to(const Point& from, const Point& y, const SlabMask& blocked, int m) {
  if (!in_slab(from, m) || blocked.get(from) || from == y) return std::nullopt;
  const int dim = from.dim();
  SlabMask seen(dim, m);
  std::vector<Point> order{from};
  std::vector<std::size_t> parent{0};
  seen.set(from);
  for (std::size_t head = 0; head < order.size(); ++head) {
    const Point x = order[head];
    if (are_neighbors(x, y)) {
      std::vector<Point> path{y};
      for (std::size_t i = head;; i = parent[i]) {
        path.push_back(order[i]);
        if (i == 0) break;
      }
      std::reverse(path.begin(), path.end());
      return path;
    }
    for (int dir = 0; dir < 2 * dim; ++dir) {
      const Point n = neighbor(x, dir);
      if (!in_slab(n, m) || n == y || blocked.get(n) || seen.get(n)) continue;
      seen.set(n);
      order.push_back(n);
      parent.push_back(head);
    }
  }
  return std::nullopt;
}

}  // namespace

CorridorPlan plan_corridors(int l0, const std::array<Point, 3>& z, int separation) {
  const int dim = z[0].dim();
  validate_dimension(dim);
  require(l0 >= 1, "L0 must be positive");
  require(separation >= 1, "separation must be positive");
  double sites = 3;
  for (int k = 1; k < dim; ++k) sites *= 2.0 * l0 + 3;
  require(sites <= static_cast<double>(kMaxCorridorSites),
          "slab closure too large to build explicitly (~" + std::to_string(static_cast<long long>(sites)) + " sites)");
  CorridorPlan plan;
  plan.dim = dim;
  plan.l0 = l0;
  plan.separation = separation;
  plan.z = z;
  plan.closure = closure(slice(dim, l0));
  for (int i = 0; i < 3; ++i) {
    const Point& zi = z[static_cast<std::size_t>(i)];
    require(zi.dim() == dim, "endpoints must share the dimension");
    require(plan.closure.contains(zi) && !in_slab(zi, l0),
            "endpoint " + zi.to_string() + " is not on the outer boundary of the slab");
    for (int j = 0; j < i; ++j)
      require((zi - z[static_cast<std::size_t>(j)]).norm_inf() >= separation,
              "endpoints " + z[static_cast<std::size_t>(j)].to_string() + " and " + zi.to_string() +
                  " are closer than the separation " + std::to_string(separation));
  }

  // Prefixes: z, its neighbor in the slab, then fewest steps into the inner slab.
  std::array<std::vector<Point>, 3> prefix;
  for (std::size_t i = 0; i < 3; ++i) {
    Point p = z[i];
    prefix[i].push_back(p);
    for (int dir = 0; dir < 2 * dim; ++dir)
      if (in_slab(neighbor(p, dir), l0)) {
        p = neighbor(p, dir);
        break;
      }
    prefix[i].push_back(p);
    for (int k = 1; k < dim; ++k)
      if (std::abs(p[k]) == l0) {
        p[k] += p[k] > 0 ? -1 : 1;
        prefix[i].push_back(p);
      }
  }

  const int m = l0 - 1;
  std::vector<Point> y_candidates;
  for (int r = 0; r <= std::min(2, m); ++r)
    for (const auto& q : slice(dim, r))
      if (max_transverse(q) == r) y_candidates.push_back(q);

  std::array<std::vector<Point>, 3> routes;
  bool routed = false;
  std::array<int, 3> perm{0, 1, 2};
  for (const auto& y : y_candidates) {
    std::sort(perm.begin(), perm.end());
    do {
      std::array<std::vector<Point>, 3> trial;
      bool ok = true;
      for (std::size_t step = 0; step < 3 && ok; ++step) {
        const auto i = static_cast<std::size_t>(perm[step]);
        SlabMask blocked(dim, m);
        for (std::size_t j = 0; j < 3; ++j) {
          if (j == i) continue;
          for (const auto& p : prefix[j]) blocked.set_with_neighbors(p);
          for (const auto& p : trial[j])
            if (p != y) blocked.set_with_neighbors(p);
        }
        auto r = route_to(prefix[i].back(), y, blocked, m);
        if (!r) ok = false;
        else trial[i] = std::move(*r);
      }
      if (ok) {
        routes = std::move(trial);
        plan.y = y;
        routed = true;
      }
    } while (!routed && std::next_permutation(perm.begin(), perm.end()));
    if (routed) break;
  }
  if (!routed) {
    // No separated routing exists; fall back to plain shortest routes so the
    // checks report which claim fails.
    plan.y = Point(dim);
    const SlabMask none(dim, std::max(m, 0));
    for (std::size_t i = 0; i < 3; ++i) {
      const Point& e = prefix[i].back();
      if (e == plan.y) routes[i] = {e};
      else if (auto r = route_to(e, plan.y, none, std::max(m, 0))) routes[i] = std::move(*r);
      else routes[i] = {e};
    }
  }

  std::vector<Point> h;
  for (std::size_t i = 0; i < 3; ++i) {
    std::vector<Point> pts = prefix[i];
    pts.insert(pts.end(), routes[i].begin() + 1, routes[i].end());
    plan.gammas[i] = PathPiece(std::move(pts));
    h.insert(h.end(), plan.gammas[i].points.begin(), plan.gammas[i].points.end());
  }
  plan.h = SiteSet(h);
  plan.c = plan.closure.minus(plan.h);
  std::vector<Point> t, b, k, e;
  for (const auto& x : plan.c) {
    if (x[0] == 1) t.push_back(x);
    else if (x[0] == -1) b.push_back(x);
    else if (in_slab(x, l0)) k.push_back(x);
    else e.push_back(x);
  }
  plan.top = SiteSet(t);
  plan.bottom = SiteSet(b);
  plan.kernel = SiteSet(k);
  plan.sides = SiteSet(e);
  return plan;
}

std::vector<CorridorCheck> check_corridors(const CorridorPlan& plan) {
  std::vector<CorridorCheck> out;
  const int d = plan.dim, l0 = plan.l0;

  {
    CorridorCheck c{kCorridorClaims[0], true, ""};
    for (std::size_t i = 0; i < 3 && c.passed; ++i) {
      const auto& g = plan.gammas[i].points;
      if (g.size() < 2 || g[0] != plan.z[i]) {
        c = {c.claim, false, "gamma " + std::to_string(i + 1) + " does not start at z"};
      } else if (!in_slab(g[1], l0)) {
        c = {c.claim, false, "gamma " + std::to_string(i + 1) + " does not step into the slab"};
      } else {
        bool entered = false;
        for (std::size_t s = 1; s < g.size() && s <= static_cast<std::size_t>(d); ++s)
          entered = entered || in_slab(g[s], l0 - 1);
        bool stays = std::all_of(g.begin() + 1, g.end(), [&](const Point& p) { return in_slab(p, l0); });
        if (!entered) c = {c.claim, false, "gamma " + std::to_string(i + 1) + " needs more than d-1 steps"};
        else if (!stays) c = {c.claim, false, "gamma " + std::to_string(i + 1) + " leaves the slab"};
      }
    }
    out.push_back(c);
  }
  {
    CorridorCheck c{kCorridorClaims[1], true, ""};
    const SiteSet ys{plan.y};
    for (std::size_t i = 0; i < 3 && c.passed; ++i) {
      if (plan.gammas[i].back() != plan.y) {
        c = {c.claim, false, "gamma " + std::to_string(i + 1) + " does not end at y"};
        break;
      }
      for (std::size_t j = 0; j < i; ++j)
        if (plan.gammas[i].range().intersect(plan.gammas[j].range()) != ys) {
          c = {c.claim, false,
               "gammas " + std::to_string(j + 1) + " and " + std::to_string(i + 1) + " share a site other than y"};
          break;
        }
    }
    out.push_back(c);
  }
  {
    const auto n = count_components(plan.h.minus(SiteSet{plan.y}));
    out.push_back({kCorridorClaims[2], n == 3, std::to_string(n) + " components"});
  }
  {
    const bool ok = !plan.c.empty() && is_connected(plan.c);
    out.push_back({kCorridorClaims[3], ok, std::to_string(count_components(plan.c)) + " components, " +
                                               std::to_string(plan.c.size()) + " sites"});
  }
  {
    CorridorCheck c{kCorridorClaims[4], true, ""};
    const Point e0 = Point::unit(d, 0);
    const SiteSet slab = slice(d, l0);
    const SiteSet t = plan.c.intersect(slab.translated(e0));
    const SiteSet b = plan.c.intersect(slab.translated(Point(d) - e0));
    const SiteSet k = plan.c.intersect(slab);
    const SiteSet e = plan.c.minus(t.unite(b).unite(k));
    std::vector<Point> h;
    for (const auto& g : plan.gammas) h.insert(h.end(), g.points.begin(), g.points.end());
    if (plan.h != SiteSet(h) || plan.c != plan.closure.minus(plan.h))
      c = {c.claim, false, "H or C inconsistent with the paths"};
    else if (t != plan.top || b != plan.bottom || k != plan.kernel || e != plan.sides)
      c = {c.claim, false, "stored parts differ from their definitions"};
    else if (t.size() + b.size() + k.size() + e.size() != plan.c.size() || t.unite(b).unite(k).unite(e) != plan.c)
      c = {c.claim, false, "parts do not partition C"};
    else
      c.detail = "|T|=" + std::to_string(t.size()) + " |B|=" + std::to_string(b.size()) +
                 " |Kc|=" + std::to_string(k.size()) + " |E|=" + std::to_string(e.size());
    out.push_back(c);
  }
  return out;
}

CorridorPlan build_corridors(int l0, const std::array<Point, 3>& z, int separation) {
  auto plan = plan_corridors(l0, z, separation);
  for (const auto& c : check_corridors(plan))
    if (!c.passed) throw VerificationError(c.claim, c.detail);
  return plan;
}

std::vector<SweepRow> corridor_sweep(int dim, const std::vector<int>& separations) {
  std::vector<SweepRow> rows;
  for (int s : separations) {
    SweepRow row{s, admissible_l0(s), true, ""};
    const auto plan = plan_corridors(row.l0, default_corridor_endpoints(dim, row.l0), s);
    for (const auto& c : check_corridors(plan))
      if (!c.passed) {
        row.passed = false;
        row.failed_claim = c.claim;
        break;
      }
    rows.push_back(row);
  }
  return rows;
}

int minimal_passing_separation(const std::vector<SweepRow>& rows) {
  auto sorted = rows;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.separation < b.separation; });
  int best = -1;
  for (auto it = sorted.rbegin(); it != sorted.rend() && it->passed; ++it) best = it->separation;
  return best;
}

std::string corridor_plan_to_json(const CorridorPlan& plan, int indent) {
  using nlohmann::json;
  auto pt = [](const Point& p) { return json(p.coords()); };
  json j;
  j["format"] = "interlace-corridor-plan-1";
  j["dim"] = plan.dim;
  j["L0"] = plan.l0;
  j["separation"] = plan.separation;
  j["z"] = json::array();
  for (const auto& z : plan.z) j["z"].push_back(pt(z));
  j["y"] = pt(plan.y);
  j["gammas"] = json::array();
  for (const auto& g : plan.gammas) {
    json path = json::array();
    for (const auto& p : g.points) path.push_back(pt(p));
    j["gammas"].push_back(path);
  }
  j["sizes"] = {{"H", plan.h.size()},        {"C", plan.c.size()},         {"T", plan.top.size()},
                {"B", plan.bottom.size()},   {"Kc", plan.kernel.size()},   {"E", plan.sides.size()},
                {"closure", plan.closure.size()}};
  j["checks"] = json::array();
  bool all = true;
  for (const auto& c : check_corridors(plan)) {
    j["checks"].push_back({{"claim", c.claim}, {"passed", c.passed}, {"detail", c.detail}});
    all = all && c.passed;
  }
  j["all_passed"] = all;
  return j.dump(indent);
}

CorridorFill fill_to_corridor(const InterlacementSample& sample, const CorridorPlan& plan, double u) {
  require(u >= 0 && u <= sample.u_max, "level u must lie in [0, u_max]");
  require(sample.window.contains_set(plan.closure), "the slab closure must lie inside the window");
  CorridorFill out{{sample.window, std::vector<std::uint8_t>(sample.window.volume(), 0)}, 0};
  auto mark = [&](const Point& p) {
    if (sample.window.contains(p)) out.field.occupied[sample.window.index(p)] = 1;
  };
  std::vector<std::size_t> offending;
  for (std::size_t t = 0; t < sample.trajectories.size(); ++t) {
    const auto& tr = sample.trajectories[t];
    if (tr.level_mark > u) continue;
    if (tr.trace_in_window.intersect(plan.closure).empty()) {
      for (const auto& p : tr.trace_in_window) mark(p);
      continue;
    }
    require(!tr.pieces.empty(), "trajectory " + std::to_string(t) + " meets the slab but has no recorded pieces");
    bool bad = false;
    std::vector<std::vector<Point>> rebuilt;
    for (const auto& piece : tr.pieces) {
      const auto pts = piece.points();
      const auto runs = excursions(pts, plan.closure);
      for (const auto& e : runs) bad = bad || !plan.c.contains(pts[e.first]) || !plan.c.contains(pts[e.last]);
      if (bad) break;
      std::vector<Point> next;
      std::size_t i = 0;
      for (const auto& e : runs) {
        next.insert(next.end(), pts.begin() + static_cast<std::ptrdiff_t>(i),
                    pts.begin() + static_cast<std::ptrdiff_t>(e.first));
        const auto alpha = covering_excursion(plan.c, pts[e.first], pts[e.last]);
        next.insert(next.end(), alpha.points.begin(), alpha.points.end());
        i = e.last + 1;
        ++out.excursions_replaced;
      }
      next.insert(next.end(), pts.begin() + static_cast<std::ptrdiff_t>(i), pts.end());
      rebuilt.push_back(std::move(next));
    }
    if (bad) {
      offending.push_back(t);
      continue;
    }
    for (const auto& pts : rebuilt)
      for (const auto& p : pts) mark(p);
  }
  if (!offending.empty()) {
    std::string list;
    for (auto t : offending) list += (list.empty() ? "" : ", ") + std::to_string(t);
    throw PreconditionError("excursion endpoints outside C for trajectories: " + list);
  }
  return out;
}

InterlacementSample corridor_fixture_sample(const CorridorPlan& plan) {
  const Box window(Point(plan.dim), plan.l0 + 1);
  const SiteSet rest = window.sites().minus(plan.closure);
  if (!is_connected(rest)) throw VerificationError("fixture", "window minus the slab closure is disconnected");
  std::optional<Point> entry;
  for (const auto& x : plan.top)
    if (rest.contains(x + Point::unit(plan.dim, 0))) {
      entry = x;
      break;
    }
  if (!entry) throw VerificationError("fixture", "no site of T next to the rest of the window");
  const auto cover = covering_excursion(rest, rest[0], *entry);

  InterlacementSample s;
  s.window = window;
  s.u_max = 1.0;
  MarkedTrajectory tr;
  tr.level_mark = 0.5;
  tr.pieces.push_back(WalkSegment::from_points(cover.points));
  tr.trace_in_window = cover.range();
  s.trajectories.push_back(std::move(tr));
  return s;
}

}  // namespace interlace
