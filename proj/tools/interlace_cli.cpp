#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "interlace/clusters.hpp"
#include "interlace/config.hpp"
#include "interlace/stats.hpp"
#include "interlace/surgery.hpp"
#include "json.hpp"

using namespace interlace;
using nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kPostconditionFailed = 1, kUsage = 2, kNumerical = 3 };

struct Run {
  ExperimentConfig config;
  std::string digest;
};

json provenance(const Run& run) {
  return {{"config", json::parse(config_to_json(run.config))}, {"config_digest", run.digest}, {"seed", run.config.seed}};
}

std::string csv_preamble(const Run& run) {
  return "# config_digest=" + run.digest + "\n# seed=" + std::to_string(run.config.seed) +
         "\n# config=" + config_to_json(run.config) + "\n";
}

void emit(const Run& run, const std::string& file, const std::string& content) {
  if (run.config.out.empty()) {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << '\n';
    return;
  }
  std::filesystem::create_directories(run.config.out);
  const auto path = std::filesystem::path(run.config.out) / file;
  std::ofstream f(path, std::ios::binary);
  f << content;
  if (!f) throw std::runtime_error("cannot write " + path.string());
  std::cerr << "wrote " << path.string() << "\n";
}

Point origin(int dim) { return Point(dim); }

std::vector<SiteSet> sets_or_default(const ExperimentConfig& c) {
  if (!c.k_sets.empty()) return c.sites();
  const int d = c.dim;
  return {SiteSet{origin(d)}, SiteSet{origin(d), Point::unit(d, 0, 1)}, Box(origin(d), 1).sites()};
}

int max_norm(const SiteSet& k) {
  int m = 0;
  for (const auto& p : k) m = std::max(m, p.norm_inf());
  return m;
}

int cmd_capacity(const Run& run) {
  const auto& c = run.config;
  json out = provenance(run);
  out["capacity"] = json::array();
  bool ok = true;
  const auto sets = c.k_sets.empty() ? std::vector<SiteSet>{SiteSet{origin(c.dim)}} : c.sites();
  for (const auto& k : sets) {
    const auto report = capacity(k, c.capacity_params());
    double mass = 0;
    for (double e : report.equilibrium) {
      ok = ok && e >= 0;
      mass += e;
    }
    ok = ok && std::isfinite(report.value) && report.value > 0 && std::isfinite(report.error_bound) &&
         std::abs(mass - report.value) <= 1e-9 * report.value;
    out["capacity"].push_back(json::parse(capacity_report_to_json(report)));
  }
  out["postconditions_passed"] = ok;
  emit(run, "capacity.json", out.dump(2));
  return ok ? kOk : kPostconditionFailed;
}

int cmd_sample(const Run& run) {
  const auto& c = run.config;
  const int r = c.radii.empty() ? 8 : c.radii.front();
  const double u_max = c.u.empty() ? 1.0 : *std::max_element(c.u.begin(), c.u.end());
  WindowSampler sampler(Box(origin(c.dim), r), c.sampler_params());
  auto s = sampler.sample(u_max, RngStream(c.seed, c.stream));
  s.provenance = provenance(run).dump();
  emit(run, "sample.json", snapshot_to_json(s));
  const long incidents = s.step_cap_incidents();
  std::cerr << s.trajectories.size() << " trajectories, " << incidents << " step-cap incidents\n";
  return incidents == 0 ? kOk : kPostconditionFailed;
}

int cmd_verify_law(const Run& run) {
  const auto& c = run.config;
  const long trials = c.trials == 0 ? 100000 : c.trials;
  if (trials < kMinLawTrials)
    throw ConfigError("trials", "verify-law needs at least " + std::to_string(kMinLawTrials) + " trials");
  const auto sets = sets_or_default(c);
  const auto levels = c.u.empty() ? std::vector<double>{0.5, 1.0, 2.0} : c.u;
  std::ostringstream csv;
  csv << csv_preamble(run);
  for (std::size_t i = 0; i < sets.size(); ++i) {
    csv << "# k" << i << "=";
    for (const auto& p : sets[i]) csv << p.to_string();
    csv << "\n";
  }
  csv << "k,u,trials,vacant,empirical,target,std_error,z_score,capacity,capacity_error_bound,seed\n";
  bool ok = true;
  std::uint64_t stream = 0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const Box window(origin(c.dim), max_norm(sets[i]) + 1);
    for (double u : levels) {
      const auto law = verify_law(sets[i], window, u, trials, c.seed, c.sampler_params(), stream);
      stream += static_cast<std::uint64_t>(trials);
      ok = ok && std::abs(law.z_score) <= 3;
      csv << "k" << i << "," << format_number(u) << "," << law.trials << "," << law.vacant << ","
          << format_number(law.empirical) << "," << format_number(law.target) << "," << format_number(law.std_error)
          << "," << format_number(law.z_score) << "," << format_number(law.capacity) << ","
          << format_number(law.capacity_error_bound) << "," << c.seed << "\n";
    }
  }
  emit(run, "verify_law.csv", csv.str());
  return ok ? kOk : kPostconditionFailed;
}

std::vector<double> default_grid() { return {0, 0.25, 0.5, 0.75, 1, 1.25, 1.5, 2, 2.5, 3, 4}; }

int cmd_eta(const Run& run) {
  const auto& c = run.config;
  const long trials = c.trials == 0 ? 1000 : c.trials;
  auto grid = c.u.empty() ? default_grid() : c.u;
  std::sort(grid.begin(), grid.end());
  const auto radii = c.radii.empty() ? std::vector<int>{8, 16} : c.radii;
  std::vector<EtaCurve> curves;
  for (int r : radii) curves.push_back(eta_curve(grid, r, trials, c.experiment_params()));

  bool ok = true;
  std::ostringstream notes;
  for (const auto& curve : curves)
    for (std::size_t i = 1; i < curve.u.size(); ++i)
      if (curve.estimates[i].value > curve.estimates[i - 1].value) {
        ok = false;
        notes << "# FAIL not monotone in u at r=" << curve.r << " u=" << format_number(curve.u[i]) << "\n";
      }
  for (std::size_t a = 0; a < curves.size(); ++a)
    for (std::size_t b = 0; b < curves.size(); ++b) {
      if (curves[b].r <= curves[a].r) continue;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto &small = curves[a].estimates[i], &large = curves[b].estimates[i];
        if (large.value > small.value + 2 * std::hypot(small.std_error, large.std_error)) {
          ok = false;
          notes << "# FAIL r=" << curves[b].r << " exceeds r=" << curves[a].r << " by more than 2 SE at u="
                << format_number(grid[i]) << "\n";
        }
      }
    }
  std::ostringstream csv;
  csv << csv_preamble(run) << notes.str();
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto body = eta_curve_to_csv(curves[i]);
    csv << (i == 0 ? body : body.substr(body.find('\n') + 1));
  }
  emit(run, "eta.csv", csv.str());
  return ok ? kOk : kPostconditionFailed;
}

json estimate_json(const Estimate& e) {
  return {{"value", e.value}, {"trials", e.trials}, {"successes", e.successes}, {"std_error", e.std_error}};
}

UStarBracket run_bracket(const ExperimentConfig& c, long trials) {
  const int r = c.radii.empty() ? 16 : c.radii.front();
  return ustar_bracket(r, trials, c.threshold, c.experiment_params());
}

json bracket_json(const UStarBracket& b) {
  return {{"u_low", b.u_low},         {"u_high", b.u_high},       {"at_low", estimate_json(b.at_low)},
          {"at_high", estimate_json(b.at_high)}, {"r", b.r},     {"trials", b.trials},
          {"threshold", b.threshold}, {"certified", b.certified}, {"evaluations", b.evaluations},
          {"experiment_digest", b.config_digest}};
}

int cmd_ustar(const Run& run) {
  const auto b = run_bracket(run.config, run.config.trials == 0 ? 1000 : run.config.trials);
  json out = provenance(run);
  out["bracket"] = bracket_json(b);
  emit(run, "ustar.json", out.dump(2));
  return b.certified && b.u_low > 0 && std::isfinite(b.u_high) ? kOk : kPostconditionFailed;
}

int cmd_uniqueness(const Run& run) {
  const auto& c = run.config;
  const long trials = c.trials == 0 ? 500 : c.trials;
  std::ostringstream csv;
  csv << csv_preamble(run);
  std::vector<double> levels = c.u;
  if (levels.empty()) {
    const auto b = run_bracket(c, 1000);
    if (!b.certified) {
      std::cerr << "no certified u_* bracket; pass --u explicitly\n";
      return kPostconditionFailed;
    }
    levels = {b.u_low / 2};
    csv << "# u = u_low / 2 from bracket " << bracket_json(b).dump() << "\n";
  }
  auto sizes = c.radii.empty() ? std::vector<int>{16, 32} : c.radii;
  std::sort(sizes.begin(), sizes.end());
  bool ok = true;
  std::ostringstream rows, notes;
  for (double u : levels) {
    std::vector<UniquenessReport> reports;
    for (int n : sizes) {
      reports.push_back(uniqueness_frequency(u, n, c.alpha, trials, c.experiment_params()));
      const auto& rep = reports.back();
      rows << estimate_csv_row(u, n, rep.two_large, c.seed);
      notes << "# trifurcation_density u=" << format_number(u) << " n=" << n << " alpha=" << format_number(c.alpha)
            << ": " << format_number(rep.trifurcation_density) << "\n";
    }
    for (std::size_t i = 1; i < reports.size(); ++i) {
      const auto &a = reports[i - 1].two_large, &b = reports[i].two_large;
      if (b.value > a.value + 2 * std::hypot(a.std_error, b.std_error)) {
        ok = false;
        notes << "# FAIL increase from n=" << sizes[i - 1] << " to n=" << sizes[i] << " at u=" << format_number(u)
              << "\n";
      }
    }
  }
  csv << notes.str() << estimate_csv_header() << rows.str();
  emit(run, "uniqueness.csv", csv.str());
  return ok ? kOk : kPostconditionFailed;
}

std::vector<Point> random_walk(Point start, int steps, RngStream& rng) {
  std::vector<Point> pts{start};
  for (int i = 0; i < steps; ++i) pts.push_back(neighbor(pts.back(), rng.small_below(2 * start.dim())));
  return pts;
}

Point random_point(int dim, int r, RngStream& rng) {
  Point p(dim);
  for (int k = 0; k < dim; ++k) p[k] = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(2 * r + 1))) - r;
  return p;
}

std::vector<Point> outside(const std::vector<Point>& pts, const SiteSet& region) {
  std::vector<Point> out;
  for (const auto& p : pts)
    if (!region.contains(p)) out.push_back(p);
  return out;
}

int cmd_surgery_demo(const Run& run) {
  const auto& c = run.config;
  const int d = c.dim;
  const long segments = c.trials == 0 ? 10000 : c.trials;
  RngStream rng(c.seed, 0);

  const SiteSet kbar = closure(Box(origin(d), 2).sites());
  long fill_met = 0, fill_fail = 0;
  for (long t = 0; t < segments; ++t) {
    const auto pts = random_walk(random_point(d, 6, rng), 120, rng);
    const auto in = WalkSegment::from_points(pts);
    const auto res = fill_first_visit(in, kbar);
    const auto in_range = in.range(), out_range = res.range();
    bool ok = out_range.minus(kbar) == in_range.minus(kbar) && outside(res.points(), kbar) == outside(pts, kbar) &&
              res.start == in.start && res.end() == in.end();
    if (in_range.intersect(kbar).empty()) {
      ok = ok && res == in;
    } else {
      ++fill_met;
      ok = ok && kbar.is_subset_of(out_range);
    }
    fill_fail += !ok;
  }

  Point z1(d), z2(d);
  z1[0] = 4;
  z2[0] = -4;
  const auto f = reroute_fixture(d, 3, z1, z2);
  long applied = 0, flagged = 0, reroute_fail = 0;
  for (long t = 0; t < segments; ++t) {
    Point start = random_point(d, 6, rng);
    start[static_cast<int>(t % d)] = (t % 2 ? 1 : -1) * (5 + static_cast<int>(rng.uniform_below(2)));
    const auto w = WalkSegment::from_points(random_walk(start, 150, rng));
    const auto r = reroute_avoiding(w, f.closure_k, f.u, f.s);
    const auto pts = w.points();
    bool endpoints_in_s = true;
    for (const auto& e : excursions(pts, f.closure_k))
      endpoints_in_s = endpoints_in_s && f.s.contains(pts[e.first]) && f.s.contains(pts[e.last]);
    bool ok = r.applied == endpoints_in_s;
    if (r.applied) {
      ++applied;
      ok = ok && r.segment.range().intersect(f.u).empty() &&
           r.segment.range().minus(f.closure_k) == w.range().minus(f.closure_k) &&
           outside(r.segment.points(), f.closure_k) == outside(pts, f.closure_k);
    } else {
      ++flagged;
      ok = ok && r.segment == w && !r.offending.empty() &&
           std::all_of(r.offending.begin(), r.offending.end(), [&](const Point& p) { return f.u.contains(p); });
    }
    reroute_fail += !ok;
  }

  const auto plan = build_corridors(6, default_corridor_endpoints(d, 6), 13);
  const auto sample = corridor_fixture_sample(plan);
  const auto fill = fill_to_corridor(sample, plan, 1.0);
  std::vector<Point> occ;
  for (std::size_t i = 0; i < fill.field.occupied.size(); ++i)
    if (fill.field.occupied[i] && plan.closure.contains(fill.field.window.point(i)))
      occ.push_back(fill.field.window.point(i));
  const bool equals_c = SiteSet(occ) == plan.c;
  const bool trifurcates = trifurcation_points(label(fill.field), fill.field).contains(plan.y);

  const bool ok = fill_fail == 0 && reroute_fail == 0 && equals_c && trifurcates;
  json out = provenance(run);
  out["fill_first_visit"] = {{"segments", segments}, {"meeting_closure", fill_met}, {"failures", fill_fail}};
  out["reroute_avoiding"] = {
      {"segments", segments}, {"applied", applied}, {"flagged", flagged}, {"failures", reroute_fail}};
  out["fill_to_corridor"] = {{"l0", plan.l0},
                             {"occupied_closure_equals_c", equals_c},
                             {"y_trifurcation_point", trifurcates},
                             {"excursions_replaced", fill.excursions_replaced}};
  out["postconditions_passed"] = ok;
  emit(run, "surgery_demo.json", out.dump(2));
  return ok ? kOk : kPostconditionFailed;
}

int cmd_corridor_verify(const Run& run) {
  const auto& c = run.config;
  const int separation = c.separation == 0 ? kCorridorSeparationPerDim * c.dim : c.separation;
  const int l0 = c.l0 == 0 ? admissible_l0(separation) : c.l0;
  const auto plan = plan_corridors(l0, default_corridor_endpoints(c.dim, l0), separation);
  std::vector<int> sweep = c.sweep;
  if (sweep.empty())
    for (int s = 1; s <= 12; ++s) sweep.push_back(s);
  const auto rows = corridor_sweep(c.dim, sweep);

  json out = provenance(run);
  out["plan"] = json::parse(corridor_plan_to_json(plan));
  out["sweep"] = json::array();
  for (const auto& row : rows)
    out["sweep"].push_back(
        {{"separation", row.separation}, {"l0", row.l0}, {"passed", row.passed}, {"failed_claim", row.failed_claim}});
  out["minimal_passing_separation"] = minimal_passing_separation(rows);
  const auto checks = check_corridors(plan);
  const bool ok = std::all_of(checks.begin(), checks.end(), [](const auto& ch) { return ch.passed; });
  for (const auto& ch : checks) std::cerr << (ch.passed ? "PASS " : "FAIL ") << ch.claim << "\n";
  emit(run, "corridor_plan.json", out.dump(2));
  return ok ? kOk : kPostconditionFailed;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw PreconditionError("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int cmd_replay(const Run& run, bool u_given) {
  const auto& c = run.config;
  if (c.snapshot.empty()) throw ConfigError("snapshot", "replay needs --snapshot");
  const auto s = snapshot_from_json(read_file(c.snapshot));
  const double u = u_given ? c.u.front() : s.u_max;
  require(u >= 0 && u <= s.u_max, "replay level exceeds the snapshot's u_max");
  const auto field = occupancy_at_level(s, u);
  std::ostringstream csv;
  csv << csv_preamble(run) << "# snapshot_seed=" << s.master_seed << " stream=" << s.stream_index
      << " u=" << format_number(u) << " u_max=" << format_number(s.u_max) << "\n";
  if (!s.provenance.empty()) csv << "# snapshot_provenance=" << s.provenance << "\n";
  std::ostringstream digest;
  digest << std::hex << occupancy_digest(field);
  csv << "# occupancy_digest=" << digest.str() << "\n" << labeling_to_csv(label(field));
  emit(run, "replay.csv", csv.str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random interlacement experiments on Z^d"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::uint64_t seed = 0;
  int dim = 0;
  long trials = 0;
  std::string out_dir, snapshot;
  std::vector<double> levels;
  std::vector<int> radii;
  double threshold = 0, alpha = 0;
  int separation = 0, l0 = 0;
  std::uint64_t stream = 0;

  auto* o_config = app.add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
  auto* o_seed = app.add_option("--seed", seed, "master seed");
  auto* o_dim = app.add_option("--dim", dim, "lattice dimension");
  auto* o_trials = app.add_option("--trials", trials, "trial count");
  auto* o_out = app.add_option("--out", out_dir, "output directory (default: stdout)");
  auto* o_u = app.add_option("--u", levels, "level(s) u");
  auto* o_r = app.add_option("--r", radii, "window radius / radii");
  auto* o_threshold = app.add_option("--threshold", threshold, "u_* crossing threshold");
  auto* o_alpha = app.add_option("--alpha", alpha, "uniqueness diameter fraction");
  auto* o_sep = app.add_option("--separation", separation, "corridor endpoint separation");
  auto* o_l0 = app.add_option("--l0", l0, "corridor slab half-width");
  auto* o_stream = app.add_option("--stream", stream, "stream index for sample");
  auto* o_snapshot = app.add_option("--snapshot", snapshot, "snapshot file for replay");

  const std::vector<std::pair<std::string, std::string>> commands{
      {"capacity", "capacity report of the configured set(s)"},
      {"sample", "interlacement snapshot on a window"},
      {"verify-law", "z-score table for P[K vacant] = exp(-u cap(K))"},
      {"eta", "finite-r crossing probability curves"},
      {"ustar", "certified bracket for the crossing threshold level"},
      {"uniqueness", "frequency of two large vacant components"},
      {"surgery-demo", "postcondition audit of the path surgery maps"},
      {"corridor-verify", "corridor construction checks and separation sweep"},
      {"replay", "labeled field CSV from a snapshot"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();

  try {
    Run run;
    if (o_config->count()) run.config = config_from_json(read_file(config_path));
    auto& c = run.config;
    if (o_seed->count()) c.seed = seed;
    if (o_dim->count()) c.dim = dim;
    if (o_trials->count()) c.trials = trials;
    if (o_out->count()) c.out = out_dir;
    if (o_u->count()) c.u = levels;
    if (o_r->count()) c.radii = radii;
    if (o_threshold->count()) c.threshold = threshold;
    if (o_alpha->count()) c.alpha = alpha;
    if (o_sep->count()) c.separation = separation;
    if (o_l0->count()) c.l0 = l0;
    if (o_stream->count()) c.stream = stream;
    if (o_snapshot->count()) c.snapshot = snapshot;
    if (const char* w = std::getenv("INTERLACE_WORKERS")) {
      try {
        c.workers = std::stoi(w);
      } catch (const std::exception&) {
        throw ConfigError("INTERLACE_WORKERS", "expected an integer");
      }
    }
    validate(c);
    run.digest = config_digest(c);

    if (cmd == "capacity") return cmd_capacity(run);
    if (cmd == "sample") return cmd_sample(run);
    if (cmd == "verify-law") return cmd_verify_law(run);
    if (cmd == "eta") return cmd_eta(run);
    if (cmd == "ustar") return cmd_ustar(run);
    if (cmd == "uniqueness") return cmd_uniqueness(run);
    if (cmd == "surgery-demo") return cmd_surgery_demo(run);
    if (cmd == "corridor-verify") return cmd_corridor_verify(run);
    return cmd_replay(run, o_u->count() > 0 || !c.u.empty());
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const PreconditionError& e) {
    std::cerr << cmd << ": " << e.what() << "\n";
    return kUsage;
  } catch (const NumericalError& e) {
    std::cerr << cmd << ": numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const VerificationError& e) {
    std::cerr << cmd << ": verification failed: " << e.what() << "\n";
    return kPostconditionFailed;
  } catch (const std::exception& e) {
    std::cerr << cmd << ": " << e.what() << "\n";
    return kNumerical;
  }
}
