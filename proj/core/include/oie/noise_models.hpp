#ifndef OIE_NOISE_MODELS_HPP
#define OIE_NOISE_MODELS_HPP

#include <span>
#include <utility>

namespace oie {

/// Compliance-dependent motor noise: sigma_kappa(u) = c0 + c1*exp(-c2*u).
/// Strictly decreasing in the cocontraction u; tends to c0 as u grows.
struct ComplianceModel {
  double c0 = 5.18;
  double c1 = 49.65;
  double c2 = 6.11;  // decay rate per unit cocontraction
};

/// Saturating map from cloud deviation (mm) to effective visual deviation:
/// sigma_v = alpha_v + beta_v / (1 + exp(-sigma_c)).
struct VisualRegression {
  double alpha_v = -1.21;
  double beta_v = 66.18;
};

/// Quadratic map from perturbation amplitude (Nm) to effective haptic
/// deviation: sigma_h = alpha_p + beta_p*sigma_p + delta_p*sigma_p^2.
struct HapticRegression {
  double alpha_p = 5.05;
  double beta_p = 6.84;
  double delta_p = 41.68;
};

double sigma_kappa(double u, const ComplianceModel& model = {});

/// d(sigma_kappa)/du; negative for every u >= 0.
double sigma_kappa_derivative(double u, const ComplianceModel& model = {});

/// Total target-relative variance sigma_t^2(u) = sigma_v^2 + sigma_kappa(u)^2.
double sigma_t_squared(double u, double sigma_v, const ComplianceModel& model = {});

double visual_effective(double sigma_c, const VisualRegression& reg);
double haptic_effective(double sigma_p, const HapticRegression& reg);

/// Least-squares fit of (sigma_c, sigma_v) points. The model is linear in
/// (alpha_v, beta_v) once the sigmoid of sigma_c is evaluated, so this is an
/// exact two-parameter solve. With constrain_beta_zero the fit reduces to the
/// mean of the ordinates.
VisualRegression fit_visual_regression(std::span<const std::pair<double, double>> points,
                                       bool constrain_beta_zero = false);

/// Least-squares quadratic fit of (sigma_p, sigma_h) points; an exact
/// interpolation when given exactly three distinct abscissae. With
/// constrain_delta_zero fits a line instead (needs two distinct abscissae).
HapticRegression fit_haptic_regression(std::span<const std::pair<double, double>> points,
                                       bool constrain_delta_zero = false);

}  // namespace oie

#endif  // OIE_NOISE_MODELS_HPP
