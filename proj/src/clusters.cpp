#include "interlace/clusters.hpp"

#include <algorithm>
#include <sstream>

namespace interlace {

namespace {

// Coordinates of window sites, as offsets from the box corner.
struct Grid {
  explicit Grid(const Box& b) : box(b), dim(b.dim()), side(static_cast<std::size_t>(b.side())) {}

  std::size_t coord(std::size_t i, int k) const { return (i / box.stride(k)) % side; }

  bool on_boundary(std::size_t i) const {
    for (int k = 0; k < dim; ++k) {
      const auto c = coord(i, k);
      if (c == 0 || c + 1 == side) return true;
    }
    return false;
  }

  const Box& box;
  int dim;
  std::size_t side;
};

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

}  // namespace

std::int64_t ClusterLabeling::id_at(const Point& p) const {
  if (!window.contains(p)) return kOccupied;
  return component_id[window.index(p)];
}

const Component& ClusterLabeling::component(std::int64_t id) const {
  require(id >= 0, "no component for an occupied site");
  auto it = std::lower_bound(components.begin(), components.end(), static_cast<std::size_t>(id),
                             [](const Component& c, std::size_t v) { return c.id < v; });
  require(it != components.end() && it->id == static_cast<std::size_t>(id), "unknown component id");
  return *it;
}

std::size_t ClusterLabeling::boundary_component_count() const {
  return static_cast<std::size_t>(
      std::count_if(components.begin(), components.end(), [](const Component& c) { return c.touches_boundary; }));
}

ClusterLabeling label(const OccupancyField& field) {
  const Box& box = field.window;
  require(field.occupied.size() == box.volume(), "occupancy field size does not match its window");
  const Grid g(box);
  const std::size_t n = box.volume();
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;

  for (std::size_t i = 0; i < n; ++i) {
    if (field.occupied[i]) continue;
    for (int k = 0; k < g.dim; ++k) {
      if (g.coord(i, k) + 1 >= g.side) continue;
      const std::size_t j = i + box.stride(k);
      if (field.occupied[j]) continue;
      std::size_t a = find_root(parent, i), b = find_root(parent, j);
      if (a == b) continue;
      if (b < a) std::swap(a, b);
      parent[b] = a;  // the smaller index, hence the smaller point, stays root
    }
  }

  ClusterLabeling out;
  out.window = box;
  out.component_id.assign(n, kOccupied);
  std::vector<std::size_t> slot(n, 0);
  std::vector<int> lo, hi;
  const auto d = static_cast<std::size_t>(g.dim);
  for (std::size_t i = 0; i < n; ++i) {
    if (field.occupied[i]) continue;
    const std::size_t r = find_root(parent, i);
    out.component_id[i] = static_cast<std::int64_t>(r);
    if (r == i) {
      slot[i] = out.components.size();
      out.components.push_back(Component{i, 0, 0, false});
      for (int k = 0; k < g.dim; ++k) {
        lo.push_back(static_cast<int>(g.coord(i, k)));
        hi.push_back(static_cast<int>(g.coord(i, k)));
      }
    }
    const std::size_t s = slot[r];
    auto& c = out.components[s];
    ++c.size;
    c.touches_boundary = c.touches_boundary || g.on_boundary(i);
    for (int k = 0; k < g.dim; ++k) {
      const int x = static_cast<int>(g.coord(i, k));
      lo[s * d + static_cast<std::size_t>(k)] = std::min(lo[s * d + static_cast<std::size_t>(k)], x);
      hi[s * d + static_cast<std::size_t>(k)] = std::max(hi[s * d + static_cast<std::size_t>(k)], x);
    }
  }
  for (std::size_t s = 0; s < out.components.size(); ++s)
    for (std::size_t k = 0; k < d; ++k)
      out.components[s].diameter = std::max(out.components[s].diameter, hi[s * d + k] - lo[s * d + k]);
  return out;
}

bool refines(const ClusterLabeling& fine, const ClusterLabeling& coarse) {
  require(fine.window == coarse.window, "labelings of different windows");
  // Each fine component must map into a single coarse component.
  std::vector<std::int64_t> image(fine.component_id.size(), kOccupied);
  for (std::size_t i = 0; i < fine.component_id.size(); ++i) {
    const auto f = fine.component_id[i];
    if (f == kOccupied) continue;
    const auto c = coarse.component_id[i];
    if (c == kOccupied) return false;
    auto& img = image[static_cast<std::size_t>(f)];
    if (img == kOccupied) img = c;
    else if (img != c) return false;
  }
  return true;
}

namespace {

bool distinct_boundary_components(const ClusterLabeling& lab, const std::vector<Point>& pts) {
  std::vector<std::int64_t> ids;
  for (const auto& p : pts) {
    const auto id = lab.id_at(p);
    if (id == kOccupied || !lab.component(id).touches_boundary) return false;
    ids.push_back(id);
  }
  std::sort(ids.begin(), ids.end());
  return std::adjacent_find(ids.begin(), ids.end()) == ids.end();
}

}  // namespace

bool exiting_tuple(const ClusterLabeling& labeling, const OccupancyField& field, const TupleQuery& q) {
  const Box& box = field.window;
  require(labeling.window == box, "labeling and field have different windows");
  for (const auto& x : q.k) require(box.contains(x) && !box.on_boundary(x), "K must lie in the window interior");
  for (std::size_t i = 0; i < q.candidates.size(); ++i) {
    require(q.k.contains(q.candidates[i]), "tuple candidates must belong to K");
    for (std::size_t j = 0; j < i; ++j) require(q.candidates[i] != q.candidates[j], "tuple candidates must be distinct");
  }
  if (!distinct_boundary_components(labeling, q.candidates)) return false;

  OccupancyField reduced = field;
  const SiteSet keep(q.candidates);
  for (const auto& x : q.k)
    if (!keep.contains(x)) reduced.occupied[box.index(x)] = 1;
  return distinct_boundary_components(label(reduced), q.candidates);
}

SiteSet trifurcation_points(const ClusterLabeling& labeling, const OccupancyField& field) {
  const Box& box = field.window;
  require(labeling.window == box, "labeling and field have different windows");
  const Grid g(box);
  const std::size_t n = box.volume();
  constexpr std::size_t kUnseen = ~std::size_t{0};

  // Iterative Tarjan DFS per boundary-touching component. Removing v cuts
  // off each child subtree c with low[c] >= disc[v] (every child of the
  // root); what remains of the component stays connected.
  std::vector<std::size_t> disc(n, kUnseen), low(n, 0), bsub(n, 0), cut_mass(n, 0), cut_touching(n, 0);
  std::vector<std::size_t> total_b(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    if (!field.occupied[i] && g.on_boundary(i)) ++total_b[static_cast<std::size_t>(labeling.component_id[i])];

  struct Frame {
    std::size_t v, parent;
    int dir;
  };
  std::vector<Frame> stack;
  std::size_t clock = 0;
  for (const auto& comp : labeling.components) {
    if (!comp.touches_boundary) continue;
    const std::size_t root = comp.id;
    disc[root] = low[root] = clock++;
    bsub[root] = g.on_boundary(root);
    stack.push_back({root, kUnseen, 0});
    while (!stack.empty()) {
      Frame& f = stack.back();
      const std::size_t v = f.v;
      if (f.dir < 2 * g.dim) {
        const int dir = f.dir++;
        const int k = dir >> 1;
        const auto c = g.coord(v, k);
        std::size_t w;
        if (dir & 1) {
          if (c == 0) continue;
          w = v - box.stride(k);
        } else {
          if (c + 1 >= g.side) continue;
          w = v + box.stride(k);
        }
        if (field.occupied[w]) continue;
        if (disc[w] == kUnseen) {
          disc[w] = low[w] = clock++;
          bsub[w] = g.on_boundary(w);
          stack.push_back({w, v, 0});
        } else if (w != f.parent) {
          low[v] = std::min(low[v], disc[w]);
        }
        continue;
      }
      const std::size_t p = f.parent;
      stack.pop_back();
      if (p == kUnseen) continue;
      low[p] = std::min(low[p], low[v]);
      bsub[p] += bsub[v];
      if (low[v] >= disc[p] || p == root) {
        cut_mass[p] += bsub[v];
        cut_touching[p] += bsub[v] > 0;
      }
    }
  }

  std::vector<Point> out;
  for (std::size_t v = 0; v < n; ++v) {
    if (disc[v] == kUnseen || g.on_boundary(v)) continue;
    const std::size_t rest = total_b[static_cast<std::size_t>(labeling.component_id[v])] - cut_mass[v];
    if (cut_touching[v] + (rest > 0) >= 3) out.push_back(box.point(v));
  }
  return SiteSet(std::move(out));
}

std::string labeling_to_csv(const ClusterLabeling& labeling) {
  const Box& box = labeling.window;
  std::ostringstream os;
  for (int k = 0; k < box.dim(); ++k) os << 'x' << k << ',';
  os << "occupied,component,touches_boundary\n";
  for (std::size_t i = 0; i < box.volume(); ++i) {
    const Point p = box.point(i);
    for (int k = 0; k < box.dim(); ++k) os << p[k] << ',';
    const auto id = labeling.component_id[i];
    if (id == kOccupied) {
      os << "1,-1,0\n";
    } else {
      os << "0," << id << ',' << (labeling.component(id).touches_boundary ? 1 : 0) << '\n';
    }
  }
  return os.str();
}

}  // namespace interlace
