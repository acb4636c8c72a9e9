#include "interlace/potential.hpp"

#include <algorithm>
#include <cmath>
#include "json.hpp"

namespace interlace {

namespace {

// Solve box padded by one layer of zeros, laid out lexicographically.
struct PaddedGrid {
  Box inner;
  Box padded;
  std::vector<std::size_t> strides;

  PaddedGrid(const Point& center, int radius) : inner(center, radius), padded(center, radius + 1) {
    for (int k = 0; k < center.dim(); ++k) strides.push_back(padded.stride(k));
  }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_abs(const std::vector<double>& a) {
  double m = 0;
  for (double v : a)
    if (!(std::abs(v) <= m)) m = std::abs(v);  // NaN propagates
  return m;
}

}  // namespace

namespace {

// Solves for f harmonic on the solve box minus K with f = k_value on K and
// f = layer(y) on the layer just outside the box.
template <class Layer>
PotentialSolve solve_dirichlet(const SiteSet& k, int solve_radius, double tolerance, double k_value,
                               Layer layer) {
  require(!k.empty(), "hitting potential of an empty set");
  require(tolerance > 0, "solver tolerance must be positive");
  const int d = k.dim();
  validate_dimension(d);
  const Box kbox = bounding_box(k);
  require(solve_radius >= kbox.radius() + 1,
          "solve box of radius " + std::to_string(solve_radius) + " does not contain the closure of K");
  require(solve_radius < kMaxCoordinate / 2, "solve radius out of range");
  PaddedGrid grid(kbox.center(), solve_radius);
  const std::size_t n = grid.padded.volume();
  const double w = 1.0 / (2 * d);

  // free[i] = 1 for unknowns (inside the solve box, outside K).
  std::vector<double> free(n, 0.0), fixed(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Point y = grid.padded.point(i);
    if (grid.inner.contains(y))
      free[i] = 1.0;
    else
      fixed[i] = layer(y);
  }
  for (const auto& x : k) {
    const std::size_t i = grid.padded.index(x);
    free[i] = 0.0;
    fixed[i] = k_value;
  }

  const std::size_t lo = grid.strides[0], hi = n - grid.strides[0];
  auto neighbor_sum = [&](const std::vector<double>& v, std::size_t i) {
    double s = 0;
    for (int a = 0; a < d; ++a) s += v[i + grid.strides[static_cast<std::size_t>(a)]] +
                                     v[i - grid.strides[static_cast<std::size_t>(a)]];
    return s;
  };
  auto apply = [&](const std::vector<double>& p, std::vector<double>& out) {
    for (std::size_t i = lo; i < hi; ++i) out[i] = free[i] * (p[i] - w * neighbor_sum(p, i));
  };

  std::vector<double> x(n, 0.0), r(n, 0.0), p(n, 0.0), ap(n, 0.0);
  // Residual of the full field, recomputed rather than trusting the recurrence.
  auto true_residual = [&] {
    std::vector<double> h(n), out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) h[i] = x[i] + fixed[i];
    apply(h, out);
    return max_abs(out);
  };
  for (std::size_t i = lo; i < hi; ++i) r[i] = free[i] * w * neighbor_sum(fixed, i);
  p = r;
  double rr = dot(r, r);
  double res = max_abs(r);
  const int max_iter = 200 * (2 * solve_radius + 1) + 1000;
  int it = 0;
  while (!(res <= tolerance) && it < max_iter && rr > 0.0) {
    apply(p, ap);
    const double alpha = rr / dot(p, ap);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    const double rr_new = dot(r, r);
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    ++it;
    if (it % 50 == 0 || std::sqrt(rr) <= tolerance) res = true_residual();
  }
  res = true_residual();
  if (!(res <= tolerance))
    throw NumericalError("potential solve did not converge in " + std::to_string(it) + " iterations",
                         res);

  PotentialSolve out;
  out.field.domain = grid.inner;
  out.field.values.assign(grid.inner.volume(), 0.0);
  for (std::size_t i = 0; i < grid.inner.volume(); ++i) {
    const std::size_t j = grid.padded.index(grid.inner.point(i));
    out.field.values[i] = x[j] + fixed[j];
  }
  out.residual = res;
  out.iterations = it;
  return out;
}

}  // namespace

PotentialSolve solve_hitting_potential(const SiteSet& k, int solve_radius, double tolerance) {
  return solve_dirichlet(k, solve_radius, tolerance, 1.0, [](const Point&) { return 0.0; });
}

ScalarField hitting_potential(const SiteSet& k, int solve_radius, double tolerance) {
  return solve_hitting_potential(k, solve_radius, tolerance).field;
}

double harmonic_residual(const ScalarField& h, const SiteSet& k) {
  const int d = h.domain.dim();
  double worst = 0;
  for (std::size_t i = 0; i < h.domain.volume(); ++i) {
    const Point x = h.domain.point(i);
    if (k.contains(x)) continue;
    double s = 0;
    for (int dir = 0; dir < 2 * d; ++dir) s += h.at(neighbor(x, dir));
    worst = std::max(worst, std::abs(h.values[i] - s / (2 * d)));
  }
  return worst;
}

double dirichlet_energy(const ScalarField& f) {
  const int d = f.domain.dim();
  double sum = 0;
  for (std::size_t i = 0; i < f.domain.volume(); ++i) {
    const Point x = f.domain.point(i);
    const double fx = f.values[i];
    for (int a = 0; a < d; ++a) {
      const Point up = neighbor(x, 2 * a);
      const double diff = fx - f.at(up);
      sum += diff * diff;
      // Edges leaving the domain downward are not seen from inside otherwise.
      if (!f.domain.contains(neighbor(x, 2 * a + 1))) sum += fx * fx;
    }
  }
  return sum / (2 * d);
}

const char* to_string(CapacityMethod m) {
  return m == CapacityMethod::kLinearSolve ? "linear_solve" : "monte_carlo";
}

double CapacityReport::equilibrium_at(const Point& x) const {
  auto it = std::lower_bound(sites.begin(), sites.end(), x);
  if (it == sites.end() || *it != x) return 0.0;
  return equilibrium[static_cast<std::size_t>(it - sites.begin())];
}

namespace {

}  // namespace

int default_solve_radius(const SiteSet& k) {
  if (k.empty()) return 0;
  const int d = k.dim();
  const int rho = bounding_box(k).radius();
  int r = std::max(16, 2 * (rho + 1) + 8);
  // Keep the padded grid near 4e6 sites; the far field decays faster in high d.
  while (r > 2 * (rho + 1) && std::pow(2.0 * r + 3, d) > 4e6) --r;
  return r;
}

namespace {

// Escape probabilities of a field with value k_value on K: k_value minus the
// neighbor mean, restricted to the inner boundary.
std::vector<double> flux(const ScalarField& h, const SiteSet& k, double k_value) {
  const int d = k.dim();
  const SiteSet inner = boundaries(k).inner;
  std::vector<double> e;
  e.reserve(k.size());
  for (const auto& x : k) {
    if (!inner.contains(x)) {
      e.push_back(0.0);
      continue;
    }
    double s = 0;
    for (int dir = 0; dir < 2 * d; ++dir) s += h.at(neighbor(x, dir));
    e.push_back(k_value - s / (2 * d));
  }
  return e;
}

double sum(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s;
}

struct LinearEstimate {
  std::vector<double> equilibrium;
  double residual = 0;
};

// Zero boundary data gives e_R >= e_K. With far-field data, the walk that
// leaves the box is charged the return probability q * G(y - c) of a point
// charge q = cap(K) at the center c; q is fixed by self-consistency since the
// equilibrium measure is affine in q.
LinearEstimate linear_estimate(const SiteSet& k, int radius, double tol, bool far_field) {
  auto s0 = solve_hitting_potential(k, radius, tol);
  LinearEstimate out{flux(s0.field, k, 1.0), s0.residual};
  if (!far_field) return out;
  const Point c = bounding_box(k).center();
  auto s1 = solve_dirichlet(k, radius, tol, 0.0, [&](const Point& y) { return green_far_field(y - c); });
  const auto e1 = flux(s1.field, k, 0.0);
  const double q = sum(out.equilibrium) / (1.0 - sum(e1));
  for (std::size_t i = 0; i < k.size(); ++i)
    out.equilibrium[i] = std::clamp(out.equilibrium[i] + q * e1[i], 0.0, 1.0);
  out.residual = std::max(out.residual, q * s1.residual);
  return out;
}

CapacityReport linear_solve_capacity(const SiteSet& k, const CapacityParams& p) {
  CapacityReport rep;
  rep.method = CapacityMethod::kLinearSolve;
  rep.sites = k;
  const int rho = bounding_box(k).radius();
  rep.solve_radius = p.solve_radius > 0 ? p.solve_radius : default_solve_radius(k);
  const double residual_term = 2.0 * static_cast<double>(k.size()) * p.tolerance;
  auto fine = linear_estimate(k, rep.solve_radius, p.tolerance, p.far_field_boundary);
  rep.equilibrium = fine.equilibrium;
  rep.value = sum(rep.equilibrium);
  rep.residual = fine.residual;
  if (!p.far_field_boundary) {
    // cap_R - cap <= cap_R * max_y P_y[H_K < inf] over y outside the box.
    const double dist = static_cast<double>(rep.solve_radius + 1 - rho);
    rep.error_bound = rep.value * rep.value * green_upper_bound(k.dim(), dist) + residual_term;
    return rep;
  }
  const int coarse_radius = rep.solve_radius / 2;
  require(coarse_radius >= rho + 1,
          "solve radius " + std::to_string(rep.solve_radius) +
              " too small: the comparison solve at half the radius must contain the closure of K");
  const double coarse = sum(linear_estimate(k, coarse_radius, p.tolerance, true).equilibrium);
  rep.error_bound = std::abs(rep.value - coarse) + residual_term;
  return rep;
}

// Walks from each x in the inner boundary run until they return to K or leave
// B(c, R), c the center of K's bounding box. A walk that leaves at y still
// returns with probability P_y[H_K < inf] = sum_x' e(x') G(y - x'), which is
// replaced by q G_far(y - c) with q = cap(K) fixed self-consistently, as in the
// linear solve. The bias bound covers the spread of G over K and the far-field
// approximation through the Green bounds.
CapacityReport monte_carlo_capacity(const SiteSet& k, const CapacityParams& p) {
  require(p.walks_per_site > 0, "walks_per_site must be positive");
  CapacityReport rep;
  rep.method = CapacityMethod::kMonteCarlo;
  rep.sites = k;
  const int d = k.dim();
  const Box kbox = bounding_box(k);
  const int rho = kbox.radius();
  const int radius = p.truncation_radius > 0 ? p.truncation_radius : default_solve_radius(k);
  rep.solve_radius = radius;
  require(radius >= 2 * rho && radius > rho + 1, "Monte Carlo truncation radius too small for K");
  const SiteSet centered = k.translated(Point(d) - kbox.center());
  const SiteSet inner = boundaries(centered).inner;
  const SiteMask mask(centered);
  const double spread = std::sqrt(double(d)) * rho;

  std::vector<double> a(k.size(), 0.0), b(k.size(), 0.0), c(k.size(), 0.0), beta(k.size(), 0.0);
  RngStream base(p.seed, 0);
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (!inner.contains(centered[i])) continue;
    RngStream rng = base.child(i);
    Point y;
    for (long t = 0; t < p.walks_per_site; ++t) {
      const auto out = escape_trial(centered[i], mask, radius, p.step_cap, rng, &y);
      if (out == EscapeOutcome::kReturned) continue;
      a[i] += 1;
      if (out == EscapeOutcome::kStepCap) {
        ++rep.step_cap_hits;
        continue;
      }
      const double g = green_far_field(y);
      const double r = y.norm2();
      b[i] += g;
      c[i] += g * g;
      beta[i] += std::max(green_upper_bound(d, std::max(1.0, r - spread)) - g,
                          g - green_lower_bound(d, r + spread));
    }
  }
  const double n = static_cast<double>(p.walks_per_site);
  const double q = sum(a) / n / (1.0 + sum(b) / n);
  double variance = 0, bias = 0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double e = (a[i] - q * b[i]) / n;
    rep.equilibrium.push_back(std::clamp(e, 0.0, 1.0));
    const double second = (a[i] - 2 * q * b[i] + q * q * c[i]) / n;
    variance += std::max(0.0, second - e * e) / n;
    bias += q * beta[i] / n;
  }
  rep.value = sum(rep.equilibrium);
  rep.error_bound = 3.0 * std::sqrt(variance) + bias;
  return rep;
}

}  // namespace


CapacityReport capacity(const SiteSet& k, const CapacityParams& params) {
  if (k.empty()) {
    CapacityReport rep;
    rep.method = params.method;
    return rep;
  }
  validate_dimension(k.dim());
  return params.method == CapacityMethod::kLinearSolve ? linear_solve_capacity(k, params)
                                                       : monte_carlo_capacity(k, params);
}

EquilibriumSampler::EquilibriumSampler(const CapacityReport& report) {
  require(report.value > 0, "cannot sample from a zero equilibrium measure");
  double acc = 0;
  for (std::size_t i = 0; i < report.sites.size(); ++i) {
    if (report.equilibrium[i] <= 0) continue;
    acc += report.equilibrium[i];
    support_.push_back(report.sites[i]);
    cumulative_.push_back(acc);
  }
  for (double& c : cumulative_) c /= acc;
  cumulative_.back() = 1.0;
}

Point EquilibriumSampler::draw(RngStream& rng) const {
  const double u = rng.uniform01();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return support_[static_cast<std::size_t>(it - cumulative_.begin())];
}

Point sample_equilibrium_start(const CapacityReport& report, RngStream& rng) {
  return EquilibriumSampler(report).draw(rng);
}

std::string capacity_report_to_json(const CapacityReport& report, int indent) {
  nlohmann::json j;
  j["value"] = report.value;
  j["method"] = to_string(report.method);
  j["error_bound"] = report.error_bound;
  j["solve_radius"] = report.solve_radius;
  j["residual"] = report.residual;
  j["step_cap_hits"] = report.step_cap_hits;
  j["dimension"] = report.sites.dim();
  auto eq = nlohmann::json::array();
  for (std::size_t i = 0; i < report.sites.size(); ++i)
    eq.push_back({{"site", report.sites[i].coords()}, {"e", report.equilibrium[i]}});
  j["equilibrium"] = eq;
  return j.dump(indent);
}

CapacityReport capacity_report_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  CapacityReport rep;
  rep.value = j.at("value").get<double>();
  rep.method = j.at("method").get<std::string>() == "monte_carlo" ? CapacityMethod::kMonteCarlo
                                                                   : CapacityMethod::kLinearSolve;
  rep.error_bound = j.at("error_bound").get<double>();
  rep.solve_radius = j.at("solve_radius").get<int>();
  rep.residual = j.value("residual", 0.0);
  rep.step_cap_hits = j.value("step_cap_hits", 0L);
  std::vector<Point> pts;
  std::vector<std::pair<Point, double>> pairs;
  for (const auto& item : j.at("equilibrium")) {
    const auto c = item.at("site").get<std::vector<int>>();
    pairs.emplace_back(Point::from_span(c), item.at("e").get<double>());
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [p, e] : pairs) {
    pts.push_back(p);
    rep.equilibrium.push_back(e);
  }
  rep.sites = SiteSet(pts);
  require(rep.sites.size() == rep.equilibrium.size(), "duplicate sites in capacity report");
  return rep;
}

}  // namespace interlace

