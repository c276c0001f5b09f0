#ifndef OIE_ADAPTATION_HPP
#define OIE_ADAPTATION_HPP

#include <array>
#include <vector>

#include "oie/noise_models.hpp"

namespace oie {

/// Effective deviation of one sensory channel.
///
/// infinite() marks a channel carrying no usable information (the blind /
/// uncoupled limit). It is a distinguished flag rather than a large float so
/// the limit forms of the cost and gradient are exact.
class ChannelNoise {
 public:
  ChannelNoise(double sigma);  // implicit: plain deviations read naturally
  static ChannelNoise infinite();

  bool is_infinite() const { return infinite_; }
  double sigma() const { return sigma_; }
  double variance() const { return sigma_ * sigma_; }

 private:
  ChannelNoise(double sigma, bool inf) : sigma_(sigma), infinite_(inf) {}
  double sigma_;
  bool infinite_;
};

/// Parameters of the information/effort trade-off.
struct OieParams {
  double gamma = 2.26;          // effort ratio, > 0
  double learning_rate = 0.01;  // update step; 1.0 recovers the literal one-step form
  double u_max = 1.5;           // clamp ceiling on the normalized cocontraction scale
  ComplianceModel compliance{};
};

/// Tracking-error-minimization baseline: u <- alpha*e + (1-gamma)*u.
struct TemParams {
  double alpha = 0.05;  // error gain, > 0
  double gamma = 0.5;   // effort decay, in (0,1)
};

struct AdaptationStep {
  int trial;
  double u;
  double cost;
};
using AdaptationTrace = std::vector<AdaptationStep>;

using Grid3 = std::array<std::array<double, 3>, 3>;

/// Maximum-likelihood fused prediction error
///   Gamma(u) = sigma_t^2(u) * sigma_h^2 / (sigma_t^2(u) + sigma_h^2).
/// Blind vision gives sigma_h^2; an unavailable haptic channel gives
/// sigma_t^2(u); a 0/0 fused variance extends continuously to 0.
double prediction_error(double u, ChannelNoise visual, ChannelNoise haptic,
                        const ComplianceModel& compliance = {});

/// V(u) = Gamma(u) + (gamma/2) u^2.
double cost(double u, ChannelNoise visual, ChannelNoise haptic, const OieParams& params);

/// -dGamma/du = [sigma_h^2/(sigma_t^2+sigma_h^2)]^2 * (-d sigma_t^2/du) >= 0:
/// the rate at which stiffening reduces the fused prediction error.
double information_gradient(double u, ChannelNoise visual, ChannelNoise haptic,
                            const ComplianceModel& compliance = {});

/// dV/du = -information_gradient + gamma*u.
double cost_slope(double u, ChannelNoise visual, ChannelNoise haptic, const OieParams& params);

/// One gradient step clamped to [0, u_max]:
///   u <- clamp(u - learning_rate * dV/du).
double oie_update(double u, ChannelNoise visual, ChannelNoise haptic, const OieParams& params);

/// Equilibrium cocontraction: dV/du is scanned on a dense grid over
/// [0, u_max] (>= 512 points), every sign change is bisected, and the root
/// (or the boundary) with the lowest cost wins; ties break toward smaller u.
double oie_fixed_point(ChannelNoise visual, ChannelNoise haptic, const OieParams& params,
                       int grid_points = 1024);

/// u <- max(0, alpha*e + (1-gamma)*u).
double tem_update(double u, double tracking_error, const TemParams& params);

/// Steady state of tem_update under a constant error: alpha*e/gamma.
double tem_fixed_point(double tracking_error, const TemParams& params);

/// Iterates oie_update from u0, recording (trial, u, cost) per step.
AdaptationTrace simulate_adaptation(double u0, int trials, ChannelNoise visual,
                                    ChannelNoise haptic, const OieParams& params);

/// Fixed points for all nine (visual level, haptic level) pairs.
Grid3 predict_grid(const std::array<double, 3>& sigma_v_levels,
                   const std::array<double, 3>& sigma_h_levels, const OieParams& params);

/// Same grid with the effective deviations derived from the regressions at
/// the standard cloud / perturbation magnitudes.
Grid3 predict_grid(const VisualRegression& visual, const HapticRegression& haptic,
                   const OieParams& params);

struct SurfacePoint {
  double sigma_c;  // mm
  double sigma_p;  // Nm
  double sigma_v;  // effective
  double sigma_h;  // effective
  double u_star;
};

/// Fixed-point surface over a dense (sigma_c, sigma_p) mesh.
std::vector<SurfacePoint> predict_surface(const VisualRegression& visual,
                                          const HapticRegression& haptic,
                                          const OieParams& params, int mesh = 30,
                                          double max_sigma_c = 52.78,
                                          double max_sigma_p = 0.19);

}  // namespace oie

#endif  // OIE_ADAPTATION_HPP
