#include "oie/adaptation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "oie/conditions.hpp"

namespace oie {
namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

ChannelNoise::ChannelNoise(double sigma) : sigma_(sigma), infinite_(false) {
  require(sigma >= 0.0, "ChannelNoise: deviation must be non-negative");
}

ChannelNoise ChannelNoise::infinite() { return ChannelNoise(kInf, true); }

double prediction_error(double u, ChannelNoise visual, ChannelNoise haptic,
                        const ComplianceModel& compliance) {
  require(u >= 0.0, "prediction_error: cocontraction must be non-negative");
  if (visual.is_infinite() && haptic.is_infinite()) return kInf;
  if (visual.is_infinite()) return haptic.variance();
  double st2 = sigma_t_squared(u, visual.sigma(), compliance);
  if (haptic.is_infinite()) return st2;
  double sh2 = haptic.variance();
  double denom = st2 + sh2;
  if (denom == 0.0) return 0.0;  // 0/0: continuous extension
  return st2 * sh2 / denom;
}

double cost(double u, ChannelNoise visual, ChannelNoise haptic, const OieParams& params) {
  return prediction_error(u, visual, haptic, params.compliance) + 0.5 * params.gamma * u * u;
}

double information_gradient(double u, ChannelNoise visual, ChannelNoise haptic,
                            const ComplianceModel& compliance) {
  require(u >= 0.0, "information_gradient: cocontraction must be non-negative");
  if (visual.is_infinite()) return 0.0;
  double sk = sigma_kappa(u, compliance);
  double dst2 = 2.0 * sk * sigma_kappa_derivative(u, compliance);  // d sigma_t^2/du < 0
  if (haptic.is_infinite()) return -dst2;
  double sh2 = haptic.variance();
  double denom = sigma_t_squared(u, visual.sigma(), compliance) + sh2;
  if (denom == 0.0) return 0.0;
  double w = sh2 / denom;
  return w * w * (-dst2);
}

double cost_slope(double u, ChannelNoise visual, ChannelNoise haptic, const OieParams& params) {
  return params.gamma * u - information_gradient(u, visual, haptic, params.compliance);
}

double oie_update(double u, ChannelNoise visual, ChannelNoise haptic, const OieParams& params) {
  double next = u - params.learning_rate * cost_slope(u, visual, haptic, params);
  return std::clamp(next, 0.0, params.u_max);
}

double oie_fixed_point(ChannelNoise visual, ChannelNoise haptic, const OieParams& params,
                       int grid_points) {
  require(grid_points >= 512, "oie_fixed_point: need at least 512 grid points");
  auto slope = [&](double u) { return cost_slope(u, visual, haptic, params); };

  std::vector<double> candidates = {0.0};
  double h = params.u_max / grid_points;
  double prev = slope(0.0);
  for (int i = 1; i <= grid_points; ++i) {
    double ui = i * h;
    double cur = slope(ui);
    if (prev == 0.0) candidates.push_back(ui - h);
    if (prev * cur < 0.0) {
      double a = ui - h, b = ui, fa = prev;
      for (int it = 0; it < 200 && (b - a) > 1e-15; ++it) {
        double m = 0.5 * (a + b);
        double fm = slope(m);
        if (fa * fm <= 0.0) {
          b = m;
        } else {
          a = m;
          fa = fm;
        }
      }
      candidates.push_back(0.5 * (a + b));
    }
    prev = cur;
  }
  if (prev < 0.0) candidates.push_back(params.u_max);  // still descending at the ceiling

  double best_u = 0.0;
  double best_cost = cost(0.0, visual, haptic, params);
  for (double u : candidates) {
    double c = cost(u, visual, haptic, params);
    // strictly better, or equal cost at smaller u
    if (c < best_cost - 1e-12 * std::max(1.0, std::abs(best_cost)) ||
        (c <= best_cost + 1e-12 * std::max(1.0, std::abs(best_cost)) && u < best_u)) {
      best_u = u;
      best_cost = std::min(best_cost, c);
    }
  }
  return best_u;
}

double tem_update(double u, double tracking_error, const TemParams& params) {
  require(u >= 0.0, "tem_update: cocontraction must be non-negative");
  require(tracking_error >= 0.0, "tem_update: tracking error must be non-negative");
  require(params.alpha > 0.0, "tem_update: alpha must be positive");
  require(params.gamma > 0.0 && params.gamma < 1.0, "tem_update: gamma must be in (0,1)");
  return std::max(0.0, params.alpha * tracking_error + (1.0 - params.gamma) * u);
}

double tem_fixed_point(double tracking_error, const TemParams& params) {
  require(params.gamma > 0.0 && params.gamma < 1.0, "tem_fixed_point: gamma must be in (0,1)");
  return params.alpha * tracking_error / params.gamma;
}

AdaptationTrace simulate_adaptation(double u0, int trials, ChannelNoise visual,
                                    ChannelNoise haptic, const OieParams& params) {
  AdaptationTrace trace;
  trace.reserve(static_cast<std::size_t>(std::max(trials, 0)) + 1);
  double u = std::clamp(u0, 0.0, params.u_max);
  trace.push_back({0, u, cost(u, visual, haptic, params)});
  for (int k = 1; k <= trials; ++k) {
    u = oie_update(u, visual, haptic, params);
    trace.push_back({k, u, cost(u, visual, haptic, params)});
  }
  return trace;
}

Grid3 predict_grid(const std::array<double, 3>& sigma_v_levels,
                   const std::array<double, 3>& sigma_h_levels, const OieParams& params) {
  Grid3 grid{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      grid[i][j] = oie_fixed_point(sigma_v_levels[i], sigma_h_levels[j], params);
  return grid;
}

Grid3 predict_grid(const VisualRegression& visual, const HapticRegression& haptic,
                   const OieParams& params) {
  std::array<double, 3> sv{}, sh{};
  for (int k = 0; k < 3; ++k) {
    sv[k] = visual_effective(kCloudDeviationMm[k], visual);
    sh[k] = haptic_effective(kPerturbationNm[k], haptic);
  }
  return predict_grid(sv, sh, params);
}

std::vector<SurfacePoint> predict_surface(const VisualRegression& visual,
                                          const HapticRegression& haptic,
                                          const OieParams& params, int mesh,
                                          double max_sigma_c, double max_sigma_p) {
  require(mesh >= 2, "predict_surface: mesh must be at least 2");
  std::vector<SurfacePoint> out;
  out.reserve(static_cast<std::size_t>(mesh) * mesh);
  for (int i = 0; i < mesh; ++i) {
    double sc = max_sigma_c * i / (mesh - 1);
    double sv = visual_effective(sc, visual);
    for (int j = 0; j < mesh; ++j) {
      double sp = max_sigma_p * j / (mesh - 1);
      double sh = haptic_effective(sp, haptic);
      out.push_back({sc, sp, sv, sh, oie_fixed_point(sv, sh, params)});
    }
  }
  return out;
}

}  // namespace oie
