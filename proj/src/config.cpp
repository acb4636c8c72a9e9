#include "interlace/config.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <map>

#include "json.hpp"

namespace interlace {

namespace {

using nlohmann::json;

long get_integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ConfigError(key, "expected an integer");
  return v.get<long>();
}

int get_int(const json& v, const std::string& key) {
  const long x = get_integer(v, key);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
    throw ConfigError(key, "integer out of range");
  return static_cast<int>(x);
}

std::uint64_t get_u64(const json& v, const std::string& key) {
  if (!v.is_number_unsigned()) throw ConfigError(key, "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

double get_double(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key, "expected a number");
  return v.get<double>();
}

bool get_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) throw ConfigError(key, "expected true or false");
  return v.get<bool>();
}

std::string get_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError(key, "expected a string");
  return v.get<std::string>();
}

template <class F>
auto get_list(const json& v, const std::string& key, F item) {
  if (!v.is_array()) throw ConfigError(key, "expected a list");
  std::vector<decltype(item(v, key))> out;
  for (const auto& x : v) out.push_back(item(x, key));
  return out;
}

std::vector<std::vector<int>> get_site_list(const json& v, const std::string& key) {
  return get_list(v, key, [](const json& p, const std::string& k) { return get_list(p, k, get_int); });
}

}  // namespace

CapacityParams ExperimentConfig::capacity_params() const {
  CapacityParams p;
  p.method = capacity_method == "monte_carlo" ? CapacityMethod::kMonteCarlo : CapacityMethod::kLinearSolve;
  p.solve_radius = solve_radius;
  p.truncation_radius = solve_radius;
  p.far_field_boundary = far_field_boundary;
  p.tolerance = solver_tolerance;
  p.walks_per_site = walks_per_site;
  p.step_cap = step_cap;
  p.seed = seed;
  return p;
}

SamplerParams ExperimentConfig::sampler_params() const {
  SamplerParams p;
  p.truncation_radius = truncation_radius;
  p.step_cap = step_cap;
  p.far_field_reentry = far_field_reentry;
  // Window capacities always come from the linear solve.
  p.capacity.solve_radius = solve_radius;
  p.capacity.far_field_boundary = far_field_boundary;
  p.capacity.tolerance = solver_tolerance;
  return p;
}

ExperimentParams ExperimentConfig::experiment_params() const {
  ExperimentParams p;
  p.dim = dim;
  p.seed = seed;
  p.workers = workers;
  p.sampler = sampler_params();
  return p;
}

std::vector<SiteSet> ExperimentConfig::sites() const {
  std::vector<SiteSet> out;
  for (const auto& set : k_sets) {
    std::vector<Point> pts;
    for (const auto& c : set) pts.push_back(Point::from_span(c));
    out.emplace_back(pts);
  }
  return out;
}

void validate(const ExperimentConfig& c) {
  if (c.dim < 3 || c.dim > 8) throw ConfigError("dim", "must lie in [3, 8]");
  if (c.trials < 0) throw ConfigError("trials", "must be nonnegative");
  if (c.workers < 1) throw ConfigError("workers", "must be positive");
  for (int r : c.radii)
    if (r < 1) throw ConfigError("radii", "radii must be positive");
  for (double u : c.u)
    if (!(u >= 0) || !std::isfinite(u)) throw ConfigError("u", "levels must be finite and nonnegative");
  for (const auto& set : c.k_sets) {
    if (set.empty()) throw ConfigError("k_sets", "sets must be nonempty");
    for (const auto& p : set)
      if (static_cast<int>(p.size()) != c.dim) throw ConfigError("k_sets", "site dimension differs from dim");
  }
  if (!(c.threshold > 0 && c.threshold < 1)) throw ConfigError("threshold", "must lie in (0, 1)");
  if (!(c.alpha > 0 && c.alpha <= 1)) throw ConfigError("alpha", "must lie in (0, 1]");
  if (c.separation < 0) throw ConfigError("separation", "must be nonnegative");
  if (c.l0 < 0) throw ConfigError("l0", "must be nonnegative");
  for (int s : c.sweep)
    if (s < 1) throw ConfigError("sweep", "separations must be positive");
  if (c.capacity_method != "linear_solve" && c.capacity_method != "monte_carlo")
    throw ConfigError("capacity_method", "must be linear_solve or monte_carlo");
  if (c.solve_radius < 0) throw ConfigError("solve_radius", "must be nonnegative");
  if (!(c.solver_tolerance > 0)) throw ConfigError("solver_tolerance", "must be positive");
  if (c.walks_per_site < 1) throw ConfigError("walks_per_site", "must be positive");
  if (c.truncation_radius < 0) throw ConfigError("truncation_radius", "must be nonnegative");
  if (c.step_cap < 1) throw ConfigError("step_cap", "must be positive");
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("<file>", "expected a JSON object");
  ExperimentConfig c;
  using Setter = std::function<void(const json&, const std::string&)>;
  const std::map<std::string, Setter> fields{
      {"dim", [&](const json& v, const std::string& k) { c.dim = get_int(v, k); }},
      {"seed", [&](const json& v, const std::string& k) { c.seed = get_u64(v, k); }},
      {"trials", [&](const json& v, const std::string& k) { c.trials = get_integer(v, k); }},
      {"workers", [&](const json& v, const std::string& k) { c.workers = get_int(v, k); }},
      {"radii", [&](const json& v, const std::string& k) { c.radii = get_list(v, k, get_int); }},
      {"u", [&](const json& v, const std::string& k) { c.u = get_list(v, k, get_double); }},
      {"k_sets", [&](const json& v, const std::string& k) { c.k_sets = get_list(v, k, get_site_list); }},
      {"threshold", [&](const json& v, const std::string& k) { c.threshold = get_double(v, k); }},
      {"alpha", [&](const json& v, const std::string& k) { c.alpha = get_double(v, k); }},
      {"separation", [&](const json& v, const std::string& k) { c.separation = get_int(v, k); }},
      {"l0", [&](const json& v, const std::string& k) { c.l0 = get_int(v, k); }},
      {"sweep", [&](const json& v, const std::string& k) { c.sweep = get_list(v, k, get_int); }},
      {"capacity_method", [&](const json& v, const std::string& k) { c.capacity_method = get_string(v, k); }},
      {"solve_radius", [&](const json& v, const std::string& k) { c.solve_radius = get_int(v, k); }},
      {"far_field_boundary", [&](const json& v, const std::string& k) { c.far_field_boundary = get_bool(v, k); }},
      {"solver_tolerance", [&](const json& v, const std::string& k) { c.solver_tolerance = get_double(v, k); }},
      {"walks_per_site", [&](const json& v, const std::string& k) { c.walks_per_site = get_integer(v, k); }},
      {"truncation_radius", [&](const json& v, const std::string& k) { c.truncation_radius = get_int(v, k); }},
      {"step_cap", [&](const json& v, const std::string& k) { c.step_cap = get_integer(v, k); }},
      {"far_field_reentry", [&](const json& v, const std::string& k) { c.far_field_reentry = get_bool(v, k); }},
      {"stream", [&](const json& v, const std::string& k) { c.stream = get_u64(v, k); }},
      {"snapshot", [&](const json& v, const std::string& k) { c.snapshot = get_string(v, k); }},
      {"out", [&](const json& v, const std::string& k) { c.out = get_string(v, k); }},
  };
  for (const auto& [key, value] : j.items()) {
    const auto it = fields.find(key);
    if (it == fields.end()) throw ConfigError(key, "unknown field");
    it->second(value, key);
  }
  validate(c);
  return c;
}

std::string config_to_json(const ExperimentConfig& c, int indent) {
  json j{{"dim", c.dim},
         {"seed", c.seed},
         {"trials", c.trials},
         {"workers", c.workers},
         {"radii", c.radii},
         {"u", c.u},
         {"k_sets", c.k_sets},
         {"threshold", c.threshold},
         {"alpha", c.alpha},
         {"separation", c.separation},
         {"l0", c.l0},
         {"sweep", c.sweep},
         {"capacity_method", c.capacity_method},
         {"solve_radius", c.solve_radius},
         {"far_field_boundary", c.far_field_boundary},
         {"solver_tolerance", c.solver_tolerance},
         {"walks_per_site", c.walks_per_site},
         {"truncation_radius", c.truncation_radius},
         {"step_cap", c.step_cap},
         {"far_field_reentry", c.far_field_reentry},
         {"stream", c.stream},
         {"snapshot", c.snapshot},
         {"out", c.out}};
  return j.dump(indent);
}

std::string config_digest(const ExperimentConfig& c) {
  ExperimentConfig key = c;
  key.out.clear();
  key.workers = 1;
  return digest_hex(config_to_json(key));
}

}  // namespace interlace
