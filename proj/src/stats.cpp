#include "interlace/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "interlace/clusters.hpp"

namespace interlace {

namespace {

std::string sampler_canonical(const ExperimentParams& p) {
  std::ostringstream os;
  os.precision(17);
  os << "dim=" << p.dim << ";seed=" << p.seed << ";trunc=" << p.sampler.truncation_radius
     << ";step_cap=" << p.sampler.step_cap << ";reentry=" << p.sampler.far_field_reentry
     << ";cap_method=" << to_string(p.sampler.capacity.method) << ";cap_radius=" << p.sampler.capacity.solve_radius
     << ";cap_far=" << p.sampler.capacity.far_field_boundary << ";cap_tol=" << p.sampler.capacity.tolerance;
  return os.str();
}

// Window samplers are expensive to build (one capacity solve each), so they
// are shared across calls with identical settings.
const WindowSampler& shared_sampler(const Box& window, const SamplerParams& params) {
  static std::mutex mu;
  static std::map<std::string, std::unique_ptr<WindowSampler>> cache;
  ExperimentParams key_params;
  key_params.dim = window.dim();
  key_params.sampler = params;
  const std::string key = sampler_canonical(key_params) + ";center=" + window.center().to_string() +
                          ";radius=" + std::to_string(window.radius());
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[key];
  if (!slot) slot = std::make_unique<WindowSampler>(window, params);
  return *slot;
}

Box origin_box(int dim, int r) {
  validate_dimension(dim);
  return Box(Point(dim), r);
}

double classify_margin(const Estimate& e, double threshold) {
  if (e.value - 2 * e.std_error > threshold) return 1;
  if (e.value + 2 * e.std_error < threshold) return -1;
  return 0;
}

}  // namespace

Estimate make_estimate(long successes, long trials, std::string config_digest) {
  require(trials > 0 && successes >= 0 && successes <= trials, "invalid estimate counts");
  Estimate e;
  e.trials = trials;
  e.successes = successes;
  e.value = static_cast<double>(successes) / static_cast<double>(trials);
  e.std_error = std::sqrt(e.value * (1 - e.value) / static_cast<double>(trials));
  e.config_digest = std::move(config_digest);
  return e;
}

std::string digest_hex(const std::string& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void parallel_trials(long n, int workers, const std::function<void(long)>& body) {
  const long w = std::clamp<long>(workers, 1, std::max<long>(1, n));
  if (w <= 1) {
    for (long t = 0; t < n; ++t) body(t);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (long i = 0; i < w; ++i)
    pool.emplace_back([&] {
      try {
        for (long t = next++; t < n; t = next++) body(t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        next = n;
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

bool origin_crosses(const OccupancyField& field) {
  const Box& b = field.window;
  const Point o = b.center();
  if (field.at(o)) return false;
  std::vector<std::uint8_t> seen(b.volume(), 0);
  std::deque<Point> q{o};
  seen[b.index(o)] = 1;
  while (!q.empty()) {
    const Point x = q.front();
    q.pop_front();
    if (b.on_boundary(x)) return true;
    for (int dir = 0; dir < 2 * x.dim(); ++dir) {
      const Point y = neighbor(x, dir);
      if (!b.contains(y) || field.at(y)) continue;
      auto& s = seen[b.index(y)];
      if (!s) {
        s = 1;
        q.push_back(y);
      }
    }
  }
  return false;
}

Estimate crossing_probability(double u, int r, long trials, const ExperimentParams& params) {
  require(u >= 0 && std::isfinite(u), "level u must be finite and nonnegative");
  require(r >= 1, "crossing radius must be at least 1");
  require(trials >= kMinCrossingTrials, "crossing_probability needs at least " +
                                             std::to_string(kMinCrossingTrials) + " trials");
  const Box window = origin_box(params.dim, r);
  std::ostringstream key;
  key.precision(17);
  key << "crossing;u=" << u << ";r=" << r << ";trials=" << trials << ";" << sampler_canonical(params);
  if (u == 0) return make_estimate(trials, trials, digest_hex(key.str()));
  const WindowSampler& sampler = shared_sampler(window, params.sampler);
  std::vector<std::uint8_t> hit(static_cast<std::size_t>(trials), 0);
  parallel_trials(trials, params.workers, [&](long t) {
    const auto s = sampler.sample(u, RngStream(params.seed, static_cast<std::uint64_t>(t)));
    hit[static_cast<std::size_t>(t)] = origin_crosses(occupancy_at_level(s, u));
  });
  return make_estimate(std::accumulate(hit.begin(), hit.end(), 0L), trials, digest_hex(key.str()));
}

Estimate CrossingLevels::at(double u) const {
  require(u >= 0 && u <= u_max, "level outside [0, u_max]");
  long n = 0;
  for (double c : critical) n += u < c;
  return make_estimate(n, static_cast<long>(critical.size()), config_digest);
}

CrossingLevels crossing_levels(double u_max, int r, long trials, const ExperimentParams& params) {
  require(u_max > 0 && std::isfinite(u_max), "u_max must be positive and finite");
  require(r >= 1, "crossing radius must be at least 1");
  require(trials >= kMinCrossingTrials, "crossing experiments need at least " +
                                             std::to_string(kMinCrossingTrials) + " trials");
  const Box window = origin_box(params.dim, r);
  const WindowSampler& sampler = shared_sampler(window, params.sampler);
  CrossingLevels out;
  out.r = r;
  out.u_max = u_max;
  out.critical.assign(static_cast<std::size_t>(trials), 0);
  std::ostringstream key;
  key.precision(17);
  key << "crossing-levels;u_max=" << u_max << ";r=" << r << ";trials=" << trials << ";"
      << sampler_canonical(params);
  out.config_digest = digest_hex(key.str());

  parallel_trials(trials, params.workers, [&](long t) {
    const auto s = sampler.sample(u_max, RngStream(params.seed, static_cast<std::uint64_t>(t)));
    std::vector<std::size_t> order(s.trajectories.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return s.trajectories[a].level_mark < s.trajectories[b].level_mark;
    });
    // Crossing is monotone in the number of trajectories added in mark order.
    auto crosses_with = [&](std::size_t k) {
      OccupancyField f{window, std::vector<std::uint8_t>(window.volume(), 0)};
      for (std::size_t i = 0; i < k; ++i)
        for (const auto& x : s.trajectories[order[i]].trace_in_window) f.occupied[window.index(x)] = 1;
      return origin_crosses(f);
    };
    double level = std::numeric_limits<double>::infinity();
    if (!crosses_with(order.size())) {
      std::size_t lo = 0, hi = order.size();  // crosses at lo, not at hi
      while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (crosses_with(mid)) lo = mid;
        else hi = mid;
      }
      level = s.trajectories[order[hi - 1]].level_mark;
    }
    out.critical[static_cast<std::size_t>(t)] = level;
  });
  return out;
}

EtaCurve eta_curve(const std::vector<double>& u_grid, int r, long trials, const ExperimentParams& params) {
  require(!u_grid.empty(), "u grid must be nonempty");
  require(u_grid.front() >= 0, "u grid must be nonnegative");
  for (std::size_t i = 1; i < u_grid.size(); ++i) require(u_grid[i] > u_grid[i - 1], "u grid must be strictly increasing");
  EtaCurve curve;
  curve.r = r;
  curve.u = u_grid;
  curve.seed = params.seed;
  const double u_max = u_grid.back();
  if (u_max == 0) {
    curve.estimates.push_back(crossing_probability(0, r, trials, params));
    return curve;
  }
  const auto levels = crossing_levels(u_max, r, trials, params);
  for (double u : u_grid) curve.estimates.push_back(levels.at(u));
  return curve;
}

UStarBracket ustar_bracket(int r, long trials, double threshold, const ExperimentParams& params, int budget) {
  require(threshold > 0 && threshold < 1, "threshold must lie in (0, 1)");
  require(r >= 8, "u_* bracketing needs r >= 8");
  require(budget >= 1, "bisection budget must be positive");
  UStarBracket out;
  out.r = r;
  out.trials = trials;
  out.threshold = threshold;

  double top = 1;
  CrossingLevels levels;
  for (;;) {
    levels = crossing_levels(top, r, trials, params);
    ++out.evaluations;
    if (classify_margin(levels.at(top), threshold) < 0 || out.evaluations >= budget) break;
    top *= 2;
  }
  out.config_digest = levels.config_digest;
  auto above = [&](double u) { return classify_margin(levels.at(u), threshold) > 0; };
  auto below = [&](double u) { return classify_margin(levels.at(u), threshold) < 0; };

  // The estimate is a nonincreasing step function of u on the coupled
  // samples, so both certified regions are intervals.
  double a = 0, b = top;
  for (int i = 0; i < 60; ++i) {
    const double m = 0.5 * (a + b);
    (above(m) ? a : b) = m;
  }
  out.u_low = a;
  a = 0;
  b = top;
  for (int i = 0; i < 60; ++i) {
    const double m = 0.5 * (a + b);
    (below(m) ? b : a) = m;
  }
  out.u_high = b;
  out.at_low = levels.at(out.u_low);
  out.at_high = levels.at(out.u_high);
  out.certified = out.u_low > 0 && above(out.u_low) && below(out.u_high) && out.u_low < out.u_high;
  return out;
}

UniquenessReport uniqueness_frequency(double u, int n, double alpha, long trials, const ExperimentParams& params) {
  require(u >= 0 && std::isfinite(u), "level u must be finite and nonnegative");
  require(alpha > 0 && alpha <= 1, "alpha must lie in (0, 1]");
  require(n >= 8, "uniqueness window needs n >= 8");
  require(trials >= 1, "trials must be positive");
  const Box window = origin_box(params.dim, n);
  std::ostringstream key;
  key.precision(17);
  key << "uniqueness;u=" << u << ";n=" << n << ";alpha=" << alpha << ";trials=" << trials << ";"
      << sampler_canonical(params);
  const int min_diameter = static_cast<int>(std::ceil(alpha * n - 1e-12));
  std::vector<std::uint8_t> two(static_cast<std::size_t>(trials), 0);
  std::vector<double> tri(static_cast<std::size_t>(trials), 0);
  const WindowSampler* sampler = u > 0 ? &shared_sampler(window, params.sampler) : nullptr;
  parallel_trials(trials, params.workers, [&](long t) {
    OccupancyField f{window, std::vector<std::uint8_t>(window.volume(), 0)};
    if (sampler) f = occupancy_at_level(sampler->sample(u, RngStream(params.seed, static_cast<std::uint64_t>(t))), u);
    const auto lab = label(f);
    long large = 0;
    for (const auto& c : lab.components) large += c.diameter >= min_diameter;
    two[static_cast<std::size_t>(t)] = large >= 2;
    tri[static_cast<std::size_t>(t)] = static_cast<double>(trifurcation_points(lab, f).size());
  });
  UniquenessReport out;
  out.two_large = make_estimate(std::accumulate(two.begin(), two.end(), 0L), trials, digest_hex(key.str()));
  out.trifurcation_density =
      std::accumulate(tri.begin(), tri.end(), 0.0) / (static_cast<double>(trials) * static_cast<double>(window.volume()));
  out.n = n;
  out.alpha = alpha;
  out.u = u;
  return out;
}

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string estimate_csv_header() { return "u,r,estimate,std_error,trials,seed\n"; }

std::string estimate_csv_row(double u, int r, const Estimate& e, std::uint64_t seed) {
  return format_number(u) + "," + std::to_string(r) + "," + format_number(e.value) + "," +
         format_number(e.std_error) + "," + std::to_string(e.trials) + "," + std::to_string(seed) + "\n";
}

std::string eta_curve_to_csv(const EtaCurve& curve) {
  std::string out = estimate_csv_header();
  for (std::size_t i = 0; i < curve.u.size(); ++i) out += estimate_csv_row(curve.u[i], curve.r, curve.estimates[i], curve.seed);
  return out;
}

}  // namespace interlace
