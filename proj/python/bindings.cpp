#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "interlace/clusters.hpp"
#include "interlace/config.hpp"
#include "interlace/stats.hpp"
#include "interlace/surgery.hpp"

namespace py = pybind11;
using namespace interlace;

namespace {

using Coords = std::vector<int>;

Point to_point(const Coords& c) { return Point::from_span(c); }

SiteSet to_set(const std::vector<Coords>& pts) {
  std::vector<Point> out;
  for (const auto& c : pts) out.push_back(to_point(c));
  return SiteSet(out);
}

std::vector<Coords> from_set(const SiteSet& s) {
  std::vector<Coords> out;
  for (const auto& p : s) out.push_back(p.coords());
  return out;
}

std::vector<py::ssize_t> box_shape(const Box& b) { return std::vector<py::ssize_t>(b.dim(), b.side()); }

py::array_t<std::uint8_t> field_array(const OccupancyField& f) {
  py::array_t<std::uint8_t> a(box_shape(f.window));
  std::copy(f.occupied.begin(), f.occupied.end(), a.mutable_data());
  return a;
}

OccupancyField array_field(py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> a) {
  const int d = static_cast<int>(a.ndim());
  validate_dimension(d);
  const auto side = a.shape(0);
  require(side % 2 == 1, "field side length must be odd");
  for (int k = 1; k < d; ++k) require(a.shape(k) == side, "field must be a cube");
  const Box window(Point(d), static_cast<int>(side / 2));
  OccupancyField f{window, std::vector<std::uint8_t>(a.data(), a.data() + a.size())};
  for (auto& v : f.occupied) v = v != 0;
  return f;
}

ExperimentParams experiment(int dim, std::uint64_t seed, int workers) {
  ExperimentParams p;
  p.dim = dim;
  p.seed = seed;
  p.workers = workers;
  return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Random interlacements on Z^d: capacities, window samples, clusters, path surgery, experiments";

  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<VerificationError>(m, "VerificationError", PyExc_RuntimeError);

  py::class_<CapacityReport>(m, "CapacityReport")
      .def_readonly("value", &CapacityReport::value)
      .def_readonly("error_bound", &CapacityReport::error_bound)
      .def_readonly("solve_radius", &CapacityReport::solve_radius)
      .def_readonly("residual", &CapacityReport::residual)
      .def_readonly("equilibrium", &CapacityReport::equilibrium)
      .def_property_readonly("sites", [](const CapacityReport& r) { return from_set(r.sites); })
      .def_property_readonly("method", [](const CapacityReport& r) { return std::string(to_string(r.method)); })
      .def("to_json", [](const CapacityReport& r) { return capacity_report_to_json(r); });

  m.def(
      "capacity",
      [](const std::vector<Coords>& k, int solve_radius, bool far_field_boundary, double tolerance) {
        CapacityParams p;
        p.solve_radius = solve_radius;
        p.far_field_boundary = far_field_boundary;
        p.tolerance = tolerance;
        return capacity(to_set(k), p);
      },
      py::arg("k"), py::arg("solve_radius") = 0, py::arg("far_field_boundary") = true,
      py::arg("tolerance") = kDefaultSolverTolerance, py::call_guard<py::gil_scoped_release>());

  m.def(
      "dirichlet_energy_of_hitting_potential",
      [](const std::vector<Coords>& k, int solve_radius) {
        return dirichlet_energy(hitting_potential(to_set(k), solve_radius));
      },
      py::arg("k"), py::arg("solve_radius"));

  py::class_<InterlacementSample>(m, "Sample")
      .def_readonly("u_max", &InterlacementSample::u_max)
      .def_readonly("master_seed", &InterlacementSample::master_seed)
      .def_readonly("stream_index", &InterlacementSample::stream_index)
      .def_property_readonly("radius", [](const InterlacementSample& s) { return s.window.radius(); })
      .def_property_readonly("trajectory_count", [](const InterlacementSample& s) { return s.trajectories.size(); })
      .def_property_readonly("marks",
                             [](const InterlacementSample& s) {
                               std::vector<double> out;
                               for (const auto& t : s.trajectories) out.push_back(t.level_mark);
                               return out;
                             })
      .def(
          "occupancy", [](const InterlacementSample& s, double u) { return field_array(occupancy_at_level(s, u)); },
          py::arg("u"), "Occupied-site indicator at level u, indexed [x0 + r, x1 + r, ...].")
      .def("to_json", [](const InterlacementSample& s) { return snapshot_to_json(s); })
      .def_static("from_json", &snapshot_from_json);

  m.def(
      "sample_window",
      [](double u_max, int radius, std::uint64_t seed, std::uint64_t stream, int dim) {
        return sample_window(u_max, Box(Point(dim), radius), RngStream(seed, stream));
      },
      py::arg("u_max"), py::arg("radius"), py::arg("seed") = 1, py::arg("stream") = 0, py::arg("dim") = 3,
      py::call_guard<py::gil_scoped_release>());

  py::class_<LawCheck>(m, "LawCheck")
      .def_readonly("empirical", &LawCheck::empirical)
      .def_readonly("target", &LawCheck::target)
      .def_readonly("std_error", &LawCheck::std_error)
      .def_readonly("z_score", &LawCheck::z_score)
      .def_readonly("trials", &LawCheck::trials)
      .def_readonly("vacant", &LawCheck::vacant)
      .def_readonly("capacity", &LawCheck::capacity)
      .def_readonly("capacity_error_bound", &LawCheck::capacity_error_bound);

  m.def(
      "verify_law",
      [](const std::vector<Coords>& k, double u, long trials, std::uint64_t seed, int window_radius) {
        const SiteSet ks = to_set(k);
        require(!ks.empty(), "K must be nonempty");
        int r = window_radius;
        if (r == 0)
          for (const auto& p : ks) r = std::max(r, p.norm_inf() + 1);
        return verify_law(ks, Box(Point(ks[0].dim()), r), u, trials, seed);
      },
      py::arg("k"), py::arg("u"), py::arg("trials"), py::arg("seed") = 1, py::arg("window_radius") = 0,
      py::call_guard<py::gil_scoped_release>());

  py::class_<Component>(m, "Component")
      .def_readonly("id", &Component::id)
      .def_readonly("size", &Component::size)
      .def_readonly("diameter", &Component::diameter)
      .def_readonly("touches_boundary", &Component::touches_boundary);

  m.def(
      "label",
      [](py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> occupied) {
        const auto f = array_field(occupied);
        const auto lab = label(f);
        py::array_t<std::int64_t> ids(box_shape(f.window));
        std::copy(lab.component_id.begin(), lab.component_id.end(), ids.mutable_data());
        return py::make_tuple(ids, lab.components);
      },
      py::arg("occupied"),
      "Vacant-cluster labels of a cubic occupancy array centered at the origin. Returns (ids, components); "
      "occupied sites get id -1.");

  m.def(
      "trifurcation_points",
      [](py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> occupied) {
        const auto f = array_field(occupied);
        return from_set(trifurcation_points(label(f), f));
      },
      py::arg("occupied"));

  py::class_<Estimate>(m, "Estimate")
      .def_readonly("value", &Estimate::value)
      .def_readonly("trials", &Estimate::trials)
      .def_readonly("successes", &Estimate::successes)
      .def_readonly("std_error", &Estimate::std_error)
      .def_readonly("config_digest", &Estimate::config_digest)
      .def("__repr__", [](const Estimate& e) {
        return "Estimate(" + format_number(e.value) + " +- " + format_number(e.std_error) + ", n=" +
               std::to_string(e.trials) + ")";
      });

  m.def(
      "crossing_probability",
      [](double u, int r, long trials, std::uint64_t seed, int dim, int workers) {
        return crossing_probability(u, r, trials, experiment(dim, seed, workers));
      },
      py::arg("u"), py::arg("r"), py::arg("trials"), py::arg("seed") = 1, py::arg("dim") = 3, py::arg("workers") = 1,
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "eta_curve",
      [](const std::vector<double>& grid, int r, long trials, std::uint64_t seed, int dim, int workers) {
        return eta_curve(grid, r, trials, experiment(dim, seed, workers)).estimates;
      },
      py::arg("u_grid"), py::arg("r"), py::arg("trials"), py::arg("seed") = 1, py::arg("dim") = 3,
      py::arg("workers") = 1, py::call_guard<py::gil_scoped_release>());

  py::class_<UStarBracket>(m, "UStarBracket")
      .def_readonly("u_low", &UStarBracket::u_low)
      .def_readonly("u_high", &UStarBracket::u_high)
      .def_readonly("at_low", &UStarBracket::at_low)
      .def_readonly("at_high", &UStarBracket::at_high)
      .def_readonly("r", &UStarBracket::r)
      .def_readonly("trials", &UStarBracket::trials)
      .def_readonly("threshold", &UStarBracket::threshold)
      .def_readonly("certified", &UStarBracket::certified)
      .def_readonly("evaluations", &UStarBracket::evaluations);

  m.def(
      "ustar_bracket",
      [](int r, long trials, double threshold, std::uint64_t seed, int dim, int workers) {
        return ustar_bracket(r, trials, threshold, experiment(dim, seed, workers));
      },
      py::arg("r") = 16, py::arg("trials") = 1000, py::arg("threshold") = 0.5, py::arg("seed") = 1,
      py::arg("dim") = 3, py::arg("workers") = 1, py::call_guard<py::gil_scoped_release>());

  py::class_<UniquenessReport>(m, "UniquenessReport")
      .def_readonly("two_large", &UniquenessReport::two_large)
      .def_readonly("trifurcation_density", &UniquenessReport::trifurcation_density)
      .def_readonly("n", &UniquenessReport::n)
      .def_readonly("alpha", &UniquenessReport::alpha)
      .def_readonly("u", &UniquenessReport::u);

  m.def(
      "uniqueness_frequency",
      [](double u, int n, double alpha, long trials, std::uint64_t seed, int dim, int workers) {
        return uniqueness_frequency(u, n, alpha, trials, experiment(dim, seed, workers));
      },
      py::arg("u"), py::arg("n"), py::arg("alpha") = 0.25, py::arg("trials") = 100, py::arg("seed") = 1,
      py::arg("dim") = 3, py::arg("workers") = 1, py::call_guard<py::gil_scoped_release>());

  py::class_<CorridorCheck>(m, "CorridorCheck")
      .def_readonly("claim", &CorridorCheck::claim)
      .def_readonly("passed", &CorridorCheck::passed)
      .def_readonly("detail", &CorridorCheck::detail);

  m.def(
      "corridor_checks",
      [](int dim, int separation, int l0) {
        if (l0 == 0) l0 = admissible_l0(separation);
        return check_corridors(plan_corridors(l0, default_corridor_endpoints(dim, l0), separation));
      },
      py::arg("dim") = 3, py::arg("separation") = 300, py::arg("l0") = 0, py::call_guard<py::gil_scoped_release>());

  m.def(
      "corridor_plan_json",
      [](int dim, int separation, int l0) {
        if (l0 == 0) l0 = admissible_l0(separation);
        return corridor_plan_to_json(plan_corridors(l0, default_corridor_endpoints(dim, l0), separation));
      },
      py::arg("dim") = 3, py::arg("separation") = 300, py::arg("l0") = 0);

  m.def(
      "minimal_passing_separation",
      [](int dim, const std::vector<int>& separations) {
        return minimal_passing_separation(corridor_sweep(dim, separations));
      },
      py::arg("dim"), py::arg("separations"));

  m.def(
      "normalize_config", [](const std::string& text) { return config_to_json(config_from_json(text)); },
      py::arg("json_text"), "Validates an experiment config and returns its canonical JSON.");
  m.def(
      "config_digest", [](const std::string& text) { return config_digest(config_from_json(text)); },
      py::arg("json_text"));

  m.attr("CORRIDOR_SEPARATION_PER_DIM") = kCorridorSeparationPerDim;
}
