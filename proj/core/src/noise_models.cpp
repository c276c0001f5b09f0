#include "oie/noise_models.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace oie {
namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Solves the n x n normal-equation system A x = b in place, n <= 3.
// Gaussian elimination with partial pivoting; throws on (near-)singular A.
template <int N>
std::array<double, N> solve_small(std::array<std::array<double, N>, N> a,
                                  std::array<double, N> b) {
  double scale = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) scale = std::max(scale, std::abs(a[i][j]));
  for (int col = 0; col < N; ++col) {
    int piv = col;
    for (int r = col + 1; r < N; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-12 * std::max(scale, 1.0))
      throw std::invalid_argument("regression design is rank deficient");
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (int r = col + 1; r < N; ++r) {
      double f = a[r][col] / a[col][col];
      for (int c = col; c < N; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::array<double, N> x{};
  for (int i = N - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < N; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

double sigma_kappa(double u, const ComplianceModel& m) {
  require(u >= 0.0, "sigma_kappa: cocontraction must be non-negative");
  return m.c0 + m.c1 * std::exp(-m.c2 * u);
}

double sigma_kappa_derivative(double u, const ComplianceModel& m) {
  require(u >= 0.0, "sigma_kappa_derivative: cocontraction must be non-negative");
  return -m.c1 * m.c2 * std::exp(-m.c2 * u);
}

double sigma_t_squared(double u, double sigma_v, const ComplianceModel& m) {
  require(sigma_v >= 0.0, "sigma_t_squared: sigma_v must be non-negative");
  double sk = sigma_kappa(u, m);
  return sigma_v * sigma_v + sk * sk;
}

double visual_effective(double sigma_c, const VisualRegression& reg) {
  require(sigma_c >= 0.0, "visual_effective: sigma_c must be non-negative");
  return reg.alpha_v + reg.beta_v * sigmoid(sigma_c);
}

double haptic_effective(double sigma_p, const HapticRegression& reg) {
  require(sigma_p >= 0.0, "haptic_effective: sigma_p must be non-negative");
  return reg.alpha_p + sigma_p * (reg.beta_p + reg.delta_p * sigma_p);
}

VisualRegression fit_visual_regression(std::span<const std::pair<double, double>> pts,
                                       bool constrain_beta_zero) {
  require(pts.size() >= 2 || (constrain_beta_zero && !pts.empty()),
          "fit_visual_regression: need at least two points");
  if (constrain_beta_zero) {
    double mean = 0.0;
    for (auto& [sc, sv] : pts) mean += sv;
    return {mean / static_cast<double>(pts.size()), 0.0};
  }
  // Normal equations for y = a + b * sigmoid(sigma_c).
  double n = 0, ss = 0, ss2 = 0, sy = 0, ssy = 0;
  for (auto& [sc, sv] : pts) {
    double s = sigmoid(sc);
    n += 1.0;
    ss += s;
    ss2 += s * s;
    sy += sv;
    ssy += s * sv;
  }
  auto x = solve_small<2>({{{n, ss}, {ss, ss2}}}, {sy, ssy});
  return {x[0], x[1]};
}

HapticRegression fit_haptic_regression(std::span<const std::pair<double, double>> pts,
                                       bool constrain_delta_zero) {
  if (constrain_delta_zero) {
    require(pts.size() >= 2, "fit_haptic_regression: need at least two points");
    double n = 0, sp = 0, sp2 = 0, sy = 0, spy = 0;
    for (auto& [p, y] : pts) {
      n += 1.0;
      sp += p;
      sp2 += p * p;
      sy += y;
      spy += p * y;
    }
    auto x = solve_small<2>({{{n, sp}, {sp, sp2}}}, {sy, spy});
    return {x[0], x[1], 0.0};
  }
  require(pts.size() >= 3, "fit_haptic_regression: need at least three points");
  double m[5] = {0, 0, 0, 0, 0};  // sums of sigma_p^0..4
  double r[3] = {0, 0, 0};        // sums of sigma_p^0..2 * sigma_h
  for (auto& [p, y] : pts) {
    double pk = 1.0;
    for (int k = 0; k <= 4; ++k) {
      m[k] += pk;
      if (k <= 2) r[k] += pk * y;
      pk *= p;
    }
  }
  auto x = solve_small<3>({{{m[0], m[1], m[2]}, {m[1], m[2], m[3]}, {m[2], m[3], m[4]}}},
                          {r[0], r[1], r[2]});
  return {x[0], x[1], x[2]};
}

}  // namespace oie
