#include "interlace/interlacement.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace interlace {

int default_truncation_radius(const Box& window) { return std::max(32, 4 * (window.radius() + 1)); }

long InterlacementSample::step_cap_incidents() const {
  long n = 0;
  for (const auto& t : trajectories) n += t.step_cap_hit;
  return n;
}

WindowSampler::WindowSampler(const Box& window, const SamplerParams& params)
    : window_(window), params_(params) {
  validate_dimension(window.dim());
  capacity_ = interlace::capacity(window.sites(), params.capacity);
  init();
}

WindowSampler::WindowSampler(const Box& window, CapacityReport capacity, const SamplerParams& params)
    : window_(window), params_(params), capacity_(std::move(capacity)) {
  validate_dimension(window.dim());
  require(capacity_.sites == window.sites(), "capacity report does not belong to the window");
  init();
}

void WindowSampler::init() {
  radius_ = params_.truncation_radius > 0 ? params_.truncation_radius
                                          : default_truncation_radius(window_);
  const int rho = window_.radius();
  require(radius_ >= 2 * rho && radius_ > rho + 1,
          "truncation radius " + std::to_string(radius_) + " too small for a window of radius " +
              std::to_string(rho));
  require(window_.center().norm_inf() + radius_ + 1 < kMaxCoordinate,
          "window and truncation ball exceed the coordinate range");
  require(params_.step_cap > 0, "step_cap must be positive");
  starts_.emplace(capacity_);
}

namespace {

std::uint64_t equilibrium_digest(const CapacityReport& rep);

enum class PieceEnd { kLeft, kReturned, kStepCap, kStopped };

// Runs one trajectory. `on_start(x)` opens a piece at absolute x; `on_step(dir,
// rel, inside)` sees every step (rel is relative to the window center) and
// returns true to abandon the trajectory.
template <class OnStart, class OnStep, class OnEnd>
void run_trajectory(const Box& window, int radius, long step_cap, bool reentry, double cap,
                    const EquilibriumSampler& starts, RngStream& rng, OnStart on_start,
                    OnStep on_step, OnEnd on_end) {
  const int d = window.dim();
  const int two_d = 2 * d;
  const int rho = window.radius();
  const Point& c = window.center();
  for (;;) {
    const Point x = starts.draw(rng);
    on_start(x);
    Point rel = x - c;
    PieceEnd end = PieceEnd::kStepCap;
    for (long n = 0; n < step_cap; ++n) {
      const int dir = rng.small_below(two_d);
      int& coord = rel[dir >> 1];
      coord += (dir & 1) ? -1 : 1;
      if (coord > radius || coord < -radius) {
        on_step(dir, rel, false);
        end = PieceEnd::kLeft;
        break;
      }
      bool inside = true;
      for (int k = 0; k < d && inside; ++k) inside = rel[k] <= rho && rel[k] >= -rho;
      if (on_step(dir, rel, inside)) {
        end = PieceEnd::kStopped;
        break;
      }
    }
    if (end == PieceEnd::kLeft && reentry && rng.uniform01() < cap * green_far_field(rel))
      end = PieceEnd::kReturned;
    on_end(end);
    if (end != PieceEnd::kReturned) return;
  }
}

}  // namespace

InterlacementSample WindowSampler::sample(double u_max, const RngStream& stream) const {
  require(u_max > 0 && std::isfinite(u_max), "u_max must be positive (u = 0 is the empty sample)");
  InterlacementSample s;
  s.window = window_;
  s.u_max = u_max;
  s.master_seed = stream.master_seed();
  s.stream_index = stream.stream_index();
  s.truncation_radius = radius_;
  s.far_field_reentry = params_.far_field_reentry;
  s.capacity_used = capacity_;
  s.capacity_digest = equilibrium_digest(capacity_);
  RngStream rng = stream;
  const std::uint64_t count = poisson(u_max * capacity_.value, rng);
  s.trajectories.resize(count);
  std::vector<std::size_t> visited;
  for (std::uint64_t i = 0; i < count; ++i) {
    auto& t = s.trajectories[i];
    RngStream trng = stream.child(i);
    t.level_mark = u_max * (1.0 - trng.uniform01());
    visited.clear();
    WalkSegment* piece = nullptr;
    std::size_t last_inside = 0;
    run_trajectory(
        window_, radius_, params_.step_cap, params_.far_field_reentry, capacity_.value, *starts_, trng,
        [&](const Point& x) {
          t.pieces.push_back(WalkSegment{x, {}, Termination::kExitedTruncationBall});
          piece = &t.pieces.back();
          last_inside = 0;
          visited.push_back(window_.index(x));
        },
        [&](int dir, const Point& rel, bool inside) {
          if (params_.record_pieces) piece->moves.push_back(static_cast<std::uint8_t>(dir));
          if (inside) {
            last_inside = piece->moves.size();
            visited.push_back(window_.index(rel + window_.center()));
          }
          return false;
        },
        [&](PieceEnd end) {
          if (end == PieceEnd::kStepCap) {
            piece->reason = Termination::kReachedStepCap;
            t.step_cap_hit = true;
          }
          if (params_.record_pieces) piece->moves.resize(last_inside);
        });
    std::sort(visited.begin(), visited.end());
    visited.erase(std::unique(visited.begin(), visited.end()), visited.end());
    std::vector<Point> pts;
    pts.reserve(visited.size());
    for (auto idx : visited) pts.push_back(window_.point(idx));
    t.trace_in_window = SiteSet(std::move(pts));
    if (!params_.record_pieces) t.pieces.clear();
  }
  return s;
}

bool WindowSampler::hits(const SiteSet& k, double u_max, const RngStream& stream) const {
  require(u_max > 0 && std::isfinite(u_max), "u_max must be positive");
  if (k.empty()) return false;
  require(window_.contains_set(k), "K must lie inside the window");
  const SiteMask mask(k.translated(Point(window_.dim()) - window_.center()));
  RngStream rng = stream;
  const std::uint64_t count = poisson(u_max * capacity_.value, rng);
  bool hit = false;
  for (std::uint64_t i = 0; i < count && !hit; ++i) {
    RngStream trng = stream.child(i);
    trng.uniform01();  // level mark
    run_trajectory(
        window_, radius_, params_.step_cap, params_.far_field_reentry, capacity_.value, *starts_, trng,
        [&](const Point& x) { hit = hit || k.contains(x); },
        [&](int, const Point& rel, bool inside) {
          if (hit) return true;
          hit = inside && mask.contains(rel);
          return hit;
        },
        [](PieceEnd) {});
  }
  return hit;
}

InterlacementSample sample_window(double u_max, const Box& window, const RngStream& rng,
                                  const SamplerParams& params) {
  return WindowSampler(window, params).sample(u_max, rng);
}

SiteSet OccupancyField::occupied_sites() const {
  std::vector<Point> pts;
  for (std::size_t i = 0; i < occupied.size(); ++i)
    if (occupied[i]) pts.push_back(window.point(i));
  return SiteSet(std::move(pts));
}

SiteSet OccupancyField::vacant_sites() const {
  std::vector<Point> pts;
  for (std::size_t i = 0; i < occupied.size(); ++i)
    if (!occupied[i]) pts.push_back(window.point(i));
  return SiteSet(std::move(pts));
}

std::size_t OccupancyField::occupied_count() const {
  return static_cast<std::size_t>(std::count(occupied.begin(), occupied.end(), 1));
}

OccupancyField occupancy_at_level(const InterlacementSample& sample, double u) {
  require(u >= 0, "level u must be nonnegative");
  require(u <= sample.u_max, "level u exceeds the sample's u_max; the sample does not determine it");
  OccupancyField f{sample.window, std::vector<std::uint8_t>(sample.window.volume(), 0)};
  for (const auto& t : sample.trajectories) {
    if (t.level_mark > u) continue;
    for (const auto& x : t.trace_in_window) f.occupied[sample.window.index(x)] = 1;
  }
  return f;
}

LawCheck verify_law(const SiteSet& k, const Box& window, double u, long trials, std::uint64_t seed,
                    const SamplerParams& params, std::uint64_t first_stream) {
  require(trials >= kMinLawTrials,
          "verify_law needs at least " + std::to_string(kMinLawTrials) + " trials");
  require(u >= 0 && std::isfinite(u), "level u must be finite and nonnegative");
  require(window.contains_set(closure(k)), "window must contain the closure of K");
  LawCheck out;
  out.trials = trials;
  if (!k.empty()) {
    const auto rep = capacity(k, params.capacity);
    out.capacity = rep.value;
    out.capacity_error_bound = rep.error_bound;
  }
  out.target = std::exp(-u * out.capacity);
  if (k.empty() || u == 0) {
    out.vacant = trials;
  } else {
    WindowSampler sampler(window, params);
    for (long t = 0; t < trials; ++t)
      if (!sampler.hits(k, u, RngStream(seed, first_stream + static_cast<std::uint64_t>(t))))
        ++out.vacant;
  }
  out.empirical = double(out.vacant) / trials;
  out.std_error = std::sqrt(out.target * (1 - out.target) / trials);
  if (out.std_error > 0)
    out.z_score = (out.empirical - out.target) / out.std_error;
  else
    out.z_score = out.empirical == out.target ? 0.0 : INFINITY;
  return out;
}

namespace {

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 15];
  return s;
}

std::uint64_t parse_hex(const std::string& s) { return std::stoull(s, nullptr, 16); }

const char* reason_name(Termination t) { return to_string(t); }

Termination reason_from(const std::string& s) {
  if (s == to_string(Termination::kReachedStepCap)) return Termination::kReachedStepCap;
  require(s == to_string(Termination::kExitedTruncationBall), "unknown termination reason " + s);
  return Termination::kExitedTruncationBall;
}

std::uint64_t equilibrium_digest(const CapacityReport& rep) {
  std::uint64_t h = fnv1a(rep.equilibrium.data(), rep.equilibrium.size() * sizeof(double));
  for (const auto& x : rep.sites) {
    const auto c = x.coords();
    h = fnv1a(c.data(), c.size() * sizeof(int), h);
  }
  return h;
}

}  // namespace

std::uint64_t occupancy_digest(const OccupancyField& field) {
  const auto c = field.window.center().coords();
  std::uint64_t h = fnv1a(c.data(), c.size() * sizeof(int));
  const int r = field.window.radius();
  h = fnv1a(&r, sizeof r, h);
  return fnv1a(field.occupied.data(), field.occupied.size(), h);
}

std::string snapshot_to_json(const InterlacementSample& s, int indent) {
  using nlohmann::json;
  json j;
  j["format"] = "interlace-snapshot-1";
  j["window"] = {{"center", s.window.center().coords()}, {"radius", s.window.radius()}};
  j["u_max"] = s.u_max;
  j["seed"] = {{"master_seed", s.master_seed}, {"stream_index", s.stream_index}};
  j["truncation_radius"] = s.truncation_radius;
  j["far_field_reentry"] = s.far_field_reentry;
  j["capacity"] = {{"value", s.capacity_used.value},
                   {"error_bound", s.capacity_used.error_bound},
                   {"method", to_string(s.capacity_used.method)},
                   {"solve_radius", s.capacity_used.solve_radius},
                   {"equilibrium_digest", hex(s.capacity_digest)}};
  auto trajs = json::array();
  for (const auto& t : s.trajectories) {
    auto pieces = json::array();
    for (const auto& p : t.pieces) {
      std::string moves(p.moves.size(), '0');
      for (std::size_t i = 0; i < p.moves.size(); ++i) moves[i] = static_cast<char>('0' + p.moves[i]);
      pieces.push_back({{"start", p.start.coords()}, {"moves", moves}, {"reason", reason_name(p.reason)}});
    }
    trajs.push_back({{"level_mark", t.level_mark}, {"step_cap_hit", t.step_cap_hit}, {"pieces", pieces}});
  }
  j["trajectories"] = trajs;
  j["occupancy_digest_at_u_max"] = hex(occupancy_digest(occupancy_at_level(s, s.u_max)));
  if (!s.provenance.empty()) j["provenance"] = json::parse(s.provenance);
  const std::string canonical = j.dump();
  j["checksum"] = hex(fnv1a(canonical.data(), canonical.size()));
  return j.dump(indent);
}

InterlacementSample snapshot_from_json(const std::string& text) {
  using nlohmann::json;
  json j = json::parse(text);
  require(j.value("format", "") == "interlace-snapshot-1", "not an interlacement snapshot");
  require(j.contains("checksum"), "snapshot has no checksum");
  const std::string stored = j.at("checksum").get<std::string>();
  j.erase("checksum");
  const std::string canonical = j.dump();
  require(hex(fnv1a(canonical.data(), canonical.size())) == stored,
          "snapshot checksum mismatch (corrupt or edited file)");

  InterlacementSample s;
  const auto center = j.at("window").at("center").get<std::vector<int>>();
  s.window = Box(Point::from_span(center), j.at("window").at("radius").get<int>());
  s.u_max = j.at("u_max").get<double>();
  s.master_seed = j.at("seed").at("master_seed").get<std::uint64_t>();
  s.stream_index = j.at("seed").at("stream_index").get<std::uint64_t>();
  s.truncation_radius = j.at("truncation_radius").get<int>();
  s.far_field_reentry = j.at("far_field_reentry").get<bool>();
  const auto& cap = j.at("capacity");
  s.capacity_used.value = cap.at("value").get<double>();
  s.capacity_used.error_bound = cap.at("error_bound").get<double>();
  s.capacity_used.solve_radius = cap.at("solve_radius").get<int>();
  s.capacity_used.method = cap.at("method").get<std::string>() == "monte_carlo"
                               ? CapacityMethod::kMonteCarlo
                               : CapacityMethod::kLinearSolve;
  s.capacity_digest = parse_hex(cap.at("equilibrium_digest").get<std::string>());
  if (j.contains("provenance")) s.provenance = j.at("provenance").dump();
  const int d = s.window.dim();
  for (const auto& jt : j.at("trajectories")) {
    MarkedTrajectory t;
    t.level_mark = jt.at("level_mark").get<double>();
    t.step_cap_hit = jt.at("step_cap_hit").get<bool>();
    std::vector<Point> pts;
    for (const auto& jp : jt.at("pieces")) {
      WalkSegment w;
      w.start = Point::from_span(jp.at("start").get<std::vector<int>>());
      require(w.start.dim() == d, "piece start has the wrong dimension");
      w.reason = reason_from(jp.at("reason").get<std::string>());
      for (char ch : jp.at("moves").get<std::string>()) {
        const int m = ch - '0';
        require(m >= 0 && m < 2 * d, "invalid move in snapshot");
        w.moves.push_back(static_cast<std::uint8_t>(m));
      }
      w.for_each_point([&](const Point& p) {
        if (s.window.contains(p)) pts.push_back(p);
      });
      t.pieces.push_back(std::move(w));
    }
    t.trace_in_window = SiteSet(std::move(pts));
    s.trajectories.push_back(std::move(t));
  }
  const auto digest = parse_hex(j.at("occupancy_digest_at_u_max").get<std::string>());
  require(occupancy_digest(occupancy_at_level(s, s.u_max)) == digest,
          "snapshot occupancy does not match its recorded digest");
  return s;
}

}  // namespace interlace
