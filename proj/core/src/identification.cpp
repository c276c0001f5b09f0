#include "oie/identification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "oie/rng.hpp"

namespace oie {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

double sanitized(double v) { return std::isfinite(v) ? v : kInf; }

// Gradient field at the observed cells, flattened row-major.
std::array<double, 9> gradient_field(const NoiseVector& xi, const ObservedGrid& data,
                                     const ComplianceModel& compliance) {
  std::array<double, 9> g{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      g[3 * i + j] = information_gradient(data.u[i][j], xi[i], xi[3 + j], compliance);
  return g;
}

struct Alignment {
  double gamma;      // closed-form effort ratio, unclamped
  double kkt;        // sum of squared dV/du at the clamped gamma
  double g_norm2;    // |g|^2
};

Alignment align(const NoiseVector& xi, const ObservedGrid& data,
                const ComplianceModel& compliance) {
  auto g = gradient_field(xi, data, compliance);
  double su2 = 0.0, sg2 = 0.0, sgu = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double u = data.u[i][j];
      double gij = g[3 * i + j];
      su2 += u * u;
      sg2 += gij * gij;
      sgu += gij * u;
    }
  double gamma = su2 > 0.0 ? sgu / su2 : 0.0;
  double gc = std::max(gamma, 0.0);
  double kkt = 0.0;
  for (int k = 0; k < 9; ++k) {
    int i = k / 3, j = k % 3;
    double r = gc * data.u[i][j] - g[k];
    kkt += r * r;
  }
  return {gamma, kkt, sg2};
}

// Search objective: misalignment between the gradient field and the data,
// kkt/|g|^2 = sin^2(angle(g, u)). Scale-invariant in g, so shrinking the
// field (sigma_h -> 0) buys nothing. Degenerate fields are infeasible.
double misalignment(const NoiseVector& xi, const ObservedGrid& data,
                    const ComplianceModel& compliance) {
  Alignment a = align(xi, data, compliance);
  if (a.g_norm2 <= 1e-20 || a.gamma <= 0.0) return kInf;
  return a.kkt / a.g_norm2;
}

// Bounded Nelder-Mead on a box; deterministic.
std::pair<std::vector<double>, double> nelder_mead(
    const std::function<double(std::span<const double>)>& f, std::vector<double> x0,
    const std::vector<PsoBounds>& bounds, double init_step, int max_iter) {
  const std::size_t n = x0.size();
  auto clamp_point = [&](std::vector<double>& p) {
    for (std::size_t d = 0; d < n; ++d) p[d] = std::clamp(p[d], bounds[d].lo, bounds[d].hi);
  };
  clamp_point(x0);

  std::vector<std::vector<double>> simplex(n + 1, x0);
  for (std::size_t d = 0; d < n; ++d) {
    double step = init_step * (bounds[d].hi - bounds[d].lo);
    if (simplex[d + 1][d] + step > bounds[d].hi) step = -step;
    simplex[d + 1][d] = std::clamp(simplex[d + 1][d] + step, bounds[d].lo, bounds[d].hi);
  }
  std::vector<double> fx(n + 1);
  for (std::size_t k = 0; k <= n; ++k) fx[k] = sanitized(f(simplex[k]));

  std::vector<std::size_t> order(n + 1);
  for (int it = 0; it < max_iter; ++it) {
    for (std::size_t k = 0; k <= n; ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
    std::size_t best = order[0], worst = order[n], second = order[n - 1];

    double spread = 0.0;
    for (std::size_t d = 0; d < n; ++d)
      spread = std::max(spread, std::abs(simplex[worst][d] - simplex[best][d]));
    if (spread < 1e-14 && std::abs(fx[worst] - fx[best]) < 1e-300) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t k = 0; k <= n; ++k) {
      if (k == worst) continue;
      for (std::size_t d = 0; d < n; ++d) centroid[d] += simplex[k][d];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    auto blend = [&](double t) {
      std::vector<double> p(n);
      for (std::size_t d = 0; d < n; ++d) p[d] = centroid[d] + t * (centroid[d] - simplex[worst][d]);
      clamp_point(p);
      return p;
    };

    auto xr = blend(1.0);
    double fr = sanitized(f(xr));
    if (fr < fx[best]) {
      auto xe = blend(2.0);
      double fe = sanitized(f(xe));
      if (fe < fr) {
        simplex[worst] = std::move(xe);
        fx[worst] = fe;
      } else {
        simplex[worst] = std::move(xr);
        fx[worst] = fr;
      }
    } else if (fr < fx[second]) {
      simplex[worst] = std::move(xr);
      fx[worst] = fr;
    } else {
      auto xc = blend(-0.5);
      double fc = sanitized(f(xc));
      if (fc < fx[worst]) {
        simplex[worst] = std::move(xc);
        fx[worst] = fc;
      } else {
        for (std::size_t k = 0; k <= n; ++k) {
          if (k == best) continue;
          for (std::size_t d = 0; d < n; ++d)
            simplex[k][d] = simplex[best][d] + 0.5 * (simplex[k][d] - simplex[best][d]);
          fx[k] = sanitized(f(simplex[k]));
        }
      }
    }
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k <= n; ++k)
    if (fx[k] < fx[best]) best = k;
  return {simplex[best], fx[best]};
}

}  // namespace

ObservedGrid ObservedGrid::validated(const Grid3& values) {
  for (const auto& row : values)
    for (double v : row)
      require(std::isfinite(v) && v >= 0.0 && v <= 1.0,
              "ObservedGrid: every cell must be a finite value in [0, 1]");
  return ObservedGrid{values};
}

double kkt_residual(const NoiseVector& xi, double gamma, const ObservedGrid& data,
                    const ComplianceModel& compliance) {
  for (double x : xi) require(x >= 0.0, "kkt_residual: noise values must be non-negative");
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double u = data.u[i][j];
      double r = gamma * u - information_gradient(u, xi[i], xi[3 + j], compliance);
      s += r * r;
    }
  return s;
}

OptimalGamma optimal_gamma(const NoiseVector& xi, const ObservedGrid& data,
                           const ComplianceModel& compliance) {
  for (double x : xi) require(x >= 0.0, "optimal_gamma: noise values must be non-negative");
  double su2 = 0.0, sgu = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double u = data.u[i][j];
      su2 += u * u;
      sgu += information_gradient(u, xi[i], xi[3 + j], compliance) * u;
    }
  require(su2 > 0.0, "optimal_gamma: all observed cocontractions are zero");
  double gamma = sgu / su2;
  if (gamma <= 0.0) return {0.0, true};
  return {gamma, false};
}

PsoResult pso_minimize(const std::function<double(std::span<const double>)>& f,
                       const PsoConfig& config) {
  const std::size_t dim = config.bounds.size();
  require(dim > 0, "pso_minimize: bounds must define at least one dimension");
  require(config.swarm_size >= 2, "pso_minimize: swarm_size must be at least 2");
  for (const auto& b : config.bounds)
    require(b.lo < b.hi, "pso_minimize: each bound must satisfy lo < hi");

  const int m = config.swarm_size;
  std::vector<std::vector<double>> x(m, std::vector<double>(dim));
  std::vector<std::vector<double>> v(m, std::vector<double>(dim));
  std::vector<Rng> streams;
  streams.reserve(m);
  for (int p = 0; p < m; ++p)
    streams.emplace_back(split_seed(config.seed, "pso/particle/" + std::to_string(p)));

  for (int p = 0; p < m; ++p) {
    for (std::size_t d = 0; d < dim; ++d) {
      double range = config.bounds[d].hi - config.bounds[d].lo;
      if (p < static_cast<int>(config.initial_points.size())) {
        require(config.initial_points[p].size() == dim,
                "pso_minimize: initial point dimensionality mismatch");
        x[p][d] = std::clamp(config.initial_points[p][d], config.bounds[d].lo,
                             config.bounds[d].hi);
      } else {
        x[p][d] = config.bounds[d].lo + streams[p].uniform() * range;
      }
      v[p][d] = streams[p].uniform(-0.25 * range, 0.25 * range);
    }
  }

  std::vector<std::vector<double>> pbest = x;
  std::vector<double> pval(m);
  for (int p = 0; p < m; ++p) pval[p] = sanitized(f(x[p]));
  int gi = 0;
  for (int p = 1; p < m; ++p)
    if (pval[p] < pval[gi]) gi = p;
  std::vector<double> gbest = pbest[gi];
  double gval = pval[gi];

  for (int it = 0; it < config.iterations; ++it) {
    for (int p = 0; p < m; ++p) {
      for (std::size_t d = 0; d < dim; ++d) {
        double range = config.bounds[d].hi - config.bounds[d].lo;
        double r1 = streams[p].uniform();
        double r2 = streams[p].uniform();
        v[p][d] = config.inertia * v[p][d] + config.cognitive * r1 * (pbest[p][d] - x[p][d]) +
                  config.social * r2 * (gbest[d] - x[p][d]);
        v[p][d] = std::clamp(v[p][d], -0.5 * range, 0.5 * range);
        x[p][d] = std::clamp(x[p][d] + v[p][d], config.bounds[d].lo, config.bounds[d].hi);
      }
      double fv = sanitized(f(x[p]));
      if (fv < pval[p]) {
        pval[p] = fv;
        pbest[p] = x[p];
      }
    }
    for (int p = 0; p < m; ++p) {
      if (pval[p] < gval) {
        gval = pval[p];
        gbest = pbest[p];
      }
    }
  }
  return {gbest, gval};
}

FitResult identify(const ObservedGrid& data, const PsoConfig& config,
                   const ComplianceModel& compliance) {
  require(config.bounds.size() == 6, "identify: six search dimensions expected");
  for (const auto& b : config.bounds)
    require(b.lo < b.hi, "identify: each bound must satisfy lo < hi");

  auto objective = [&](std::span<const double> p) {
    NoiseVector xi{};
    std::copy(p.begin(), p.end(), xi.begin());
    return misalignment(xi, data, compliance);
  };

  // Coarse grid pass: 5 geometric points per dimension (these are scale
  // parameters, so log-ish spacing covers the box far better than uniform).
  constexpr std::array<double, 5> kGridFractions = {0.0, 4.0 / 70.0, 12.0 / 70.0,
                                                    30.0 / 70.0, 1.0};
  std::vector<std::vector<double>> grid_points;
  grid_points.reserve(15625);
  std::array<int, 6> idx{};
  for (;;) {
    std::vector<double> p(6);
    for (int d = 0; d < 6; ++d)
      p[d] = config.bounds[d].lo +
             kGridFractions[idx[d]] * (config.bounds[d].hi - config.bounds[d].lo);
    grid_points.push_back(std::move(p));
    int d = 0;
    while (d < 6 && ++idx[d] == 5) idx[d++] = 0;
    if (d == 6) break;
  }
  std::vector<double> grid_vals(grid_points.size());
  for (std::size_t k = 0; k < grid_points.size(); ++k)
    grid_vals[k] = sanitized(objective(grid_points[k]));
  std::vector<std::size_t> order(grid_points.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return grid_vals[a] < grid_vals[b]; });

  PsoConfig pso_cfg = config;
  pso_cfg.initial_points.clear();
  for (int k = 0; k < config.swarm_size && k < static_cast<int>(order.size()); ++k)
    pso_cfg.initial_points.push_back(grid_points[order[k]]);
  PsoResult swarm = pso_minimize(objective, pso_cfg);

  // Polish the swarm best, the (seed-independent) grid best, and a few
  // well-separated personal bests; two Nelder-Mead rounds each.
  std::vector<std::vector<double>> starts = {swarm.point, grid_points[order[0]]};
  double dedupe_gap = 0.0;
  for (const auto& b : config.bounds) dedupe_gap = std::max(dedupe_gap, (b.hi - b.lo) / 35.0);
  for (std::size_t k = 0; k < order.size() && starts.size() < 10; ++k) {
    const auto& cand = grid_points[order[k]];
    if (!std::isfinite(grid_vals[order[k]])) break;
    bool fresh = true;
    for (const auto& s : starts) {
      double gap = 0.0;
      for (int d = 0; d < 6; ++d) gap = std::max(gap, std::abs(cand[d] - s[d]));
      if (gap <= dedupe_gap) {
        fresh = false;
        break;
      }
    }
    if (fresh) starts.push_back(cand);
  }

  std::vector<double> best_x = swarm.point;
  double best_f = sanitized(swarm.value);
  for (const auto& s : starts) {
    auto [x1, f1] = nelder_mead(objective, s, config.bounds, 1.0 / 35.0, 3000);
    auto [x2, f2] = nelder_mead(objective, x1, config.bounds, 1.0 / 140.0, 3000);
    if (f2 < best_f) {
      best_x = x2;
      best_f = f2;
    }
  }

  FitResult result;
  std::copy(best_x.begin(), best_x.end(), result.xi.begin());
  OptimalGamma og = optimal_gamma(result.xi, data, compliance);
  result.gamma = og.value;
  result.gamma_violated = og.constraint_violated;
  result.kkt_residual = kkt_residual(result.xi, result.gamma, data, compliance);

  OieParams params;
  params.gamma = result.gamma;
  params.compliance = compliance;
  double rss = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      result.predicted[i][j] = oie_fixed_point(result.xi[i], result.xi[3 + j], params);
      double e = result.predicted[i][j] - data.u[i][j];
      rss += e * e;
    }
  result.rss = rss;
  result.aic_oie = aic_normalized(std::max(rss, 1e-300), ObservedGrid::sample_count, 7);
  result.aic_tem = std::numeric_limits<double>::quiet_NaN();

  bool constant = true;
  for (int i = 0; i < 3 && constant; ++i)
    for (int j = 0; j < 3 && constant; ++j)
      if (data.u[i][j] != data.u[0][0]) constant = false;
  result.degenerate_data = constant;
  return result;
}

double aic_normalized(double rss, int n, int k, bool small_sample_correction) {
  require(rss > 0.0, "aic_normalized: rss must be positive");
  require(n > 0 && k >= 0, "aic_normalized: need n > 0 and k >= 0");
  double aic = n * std::log(rss / n) + 2.0 * k;
  if (small_sample_correction) {
    require(n > k + 1, "aic_normalized: small-sample correction needs n > k + 1");
    aic += 2.0 * k * (k + 1.0) / (n - k - 1.0);
  }
  return aic / n;
}

ModelComparison compare_models(const ObservedGrid& data, const FitResult& oie_fit,
                               const TemParams& tem, const Grid3& error_grid) {
  require(tem.alpha > 0.0, "compare_models: TEM alpha must be positive");
  require(tem.gamma > 0.0 && tem.gamma < 1.0, "compare_models: TEM gamma must be in (0,1)");

  ModelComparison cmp;
  cmp.oie_predicted = oie_fit.predicted;

  Grid3 raw{};
  double lo = kInf, hi = -kInf;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      require(error_grid[i][j] >= 0.0, "compare_models: tracking errors must be non-negative");
      raw[i][j] = tem_fixed_point(error_grid[i][j], tem);
      lo = std::min(lo, raw[i][j]);
      hi = std::max(hi, raw[i][j]);
    }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      cmp.tem_predicted[i][j] = hi > lo ? (raw[i][j] - lo) / (hi - lo) : 0.5;

  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      cmp.error_oie[i][j] = cmp.oie_predicted[i][j] - data.u[i][j];
      cmp.error_tem[i][j] = cmp.tem_predicted[i][j] - data.u[i][j];
      cmp.rss_oie += cmp.error_oie[i][j] * cmp.error_oie[i][j];
      cmp.rss_tem += cmp.error_tem[i][j] * cmp.error_tem[i][j];
    }
  cmp.aic_oie = aic_normalized(std::max(cmp.rss_oie, 1e-300), ObservedGrid::sample_count, 7);
  cmp.aic_tem = aic_normalized(std::max(cmp.rss_tem, 1e-300), ObservedGrid::sample_count, 2);
  return cmp;
}

}  // namespace oie
