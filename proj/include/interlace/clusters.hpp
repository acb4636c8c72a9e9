#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "interlace/interlacement.hpp"
#include "interlace/lattice.hpp"

namespace interlace {

// Throughout, an "infinite" component is proxied by a component of the
// vacant set that touches the window's inner boundary.

struct Component {
  std::size_t id = 0;  // window index of the lexicographically smallest member
  std::size_t size = 0;
  int diameter = 0;  // l-infinity
  bool touches_boundary = false;
};

inline constexpr std::int64_t kOccupied = -1;

struct ClusterLabeling {
  Box window;
  std::vector<std::int64_t> component_id;  // per window site; kOccupied if occupied
  std::vector<Component> components;       // sorted by id

  std::int64_t id_at(const Point& p) const;
  const Component& component(std::int64_t id) const;
  std::size_t boundary_component_count() const;
};

ClusterLabeling label(const OccupancyField& field);

// True iff every pair of vacant sites sharing a component in `fine` also
// shares one in `coarse`, and every vacant site of `fine` is vacant in `coarse`.
bool refines(const ClusterLabeling& fine, const ClusterLabeling& coarse);

struct TupleQuery {
  SiteSet k;
  std::vector<Point> candidates;
};

bool exiting_tuple(const ClusterLabeling& labeling, const OccupancyField& field, const TupleQuery& q);

// Vacant non-boundary sites whose removal splits their component into at
// least three boundary-touching components.
SiteSet trifurcation_points(const ClusterLabeling& labeling, const OccupancyField& field);

// One row per window site: coordinates, occupied flag, component id (-1 when
// occupied), and the component's boundary flag.
std::string labeling_to_csv(const ClusterLabeling& labeling);

}  // namespace interlace
