#ifndef OIE_IDENTIFICATION_HPP
#define OIE_IDENTIFICATION_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "oie/adaptation.hpp"

namespace oie {

/// Observed normalized cocontraction, one value per (visual, haptic) cell.
/// Values must lie in [0, 1]; the grid is always complete.
struct ObservedGrid {
  Grid3 u{};
  static constexpr int sample_count = 9;

  /// Throws std::invalid_argument if any cell is outside [0, 1] or not finite.
  static ObservedGrid validated(const Grid3& values);
};

struct PsoBounds {
  double lo = 0.0;
  double hi = 70.0;
};

/// Global-best particle swarm settings. The search is deterministic under a
/// fixed seed: every particle draws from its own labelled RNG sub-stream.
struct PsoConfig {
  int swarm_size = 64;
  int iterations = 500;
  double inertia = 0.7298;
  double cognitive = 1.49618;
  double social = 1.49618;
  std::vector<PsoBounds> bounds = std::vector<PsoBounds>(6);  // one entry per dimension
  std::uint64_t seed = 1;
  /// Optional starting positions (clamped to bounds); remaining particles are
  /// placed uniformly at random.
  std::vector<std::vector<double>> initial_points{};
};

struct PsoResult {
  std::vector<double> point;
  double value;
};

/// Minimizes f over the box given by config.bounds. Non-finite objective
/// values are treated as +infinity.
PsoResult pso_minimize(const std::function<double(std::span<const double>)>& f,
                       const PsoConfig& config);

/// Effective noise values in the order
///   {sigma_v sharp, weak, strong, sigma_h sharp, weak, strong}.
using NoiseVector = std::array<double, 6>;

/// Sum of squared first-order optimality violations at the observed data:
///   sum_ij [dV/du(u_ij; sigma_v_i, sigma_h_j, gamma)]^2.
double kkt_residual(const NoiseVector& xi, double gamma, const ObservedGrid& data,
                    const ComplianceModel& compliance = {});

struct OptimalGamma {
  double value;               // clamped to >= 0
  bool constraint_violated;   // true when the unclamped optimum was <= 0
};

/// Closed-form minimizer of kkt_residual over gamma:
///   gamma* = sum_ij g_ij u_ij / sum_ij u_ij^2,
/// with g_ij the information gradient at the observed cell. Throws when all
/// observations are zero.
OptimalGamma optimal_gamma(const NoiseVector& xi, const ObservedGrid& data,
                           const ComplianceModel& compliance = {});

struct FitResult {
  NoiseVector xi{};
  double gamma = 0.0;
  double kkt_residual = 0.0;
  Grid3 predicted{};
  double aic_oie = 0.0;
  double aic_tem = 0.0;  // NaN until compare_models fills it
  double rss = 0.0;      // sum of squared prediction errors vs the data
  bool gamma_violated = false;
  bool degenerate_data = false;  // all observed cells equal
};

/// Identifies the six effective noise values and the effort ratio.
///
/// A coarse geometric grid (5 points per dimension) seeds the swarm, PSO
/// refines, and a bounded Nelder-Mead polishes the best candidates. The
/// search minimizes the scale-invariant misalignment kkt/|g|^2 so that the
/// degenerate sigma_h -> 0 valley (zero gradient field, zero residual, no fit)
/// cannot win; the reported kkt_residual is the plain sum of squares at the
/// solution. Parameter vectors may be non-unique; predictions are the contract.
FitResult identify(const ObservedGrid& data, const PsoConfig& config = {},
                   const ComplianceModel& compliance = {});

/// Sample-size normalized Akaike information criterion for least-squares fits:
///   (n*ln(rss/n) + 2k)/n,
/// optionally with the AICc small-sample term 2k(k+1)/(n-k-1) (which requires
/// n > k+1 and overwhelms the likelihood term when n-k-1 is tiny).
double aic_normalized(double rss, int n, int k, bool small_sample_correction = false);

struct ModelComparison {
  Grid3 oie_predicted{};
  Grid3 tem_predicted{};  // min-max normalized steady states alpha*e/gamma
  double rss_oie = 0.0;
  double rss_tem = 0.0;
  double aic_oie = 0.0;   // k = 7 (six noise values + gamma)
  double aic_tem = 0.0;   // k = 2 (alpha, gamma)
  Grid3 error_oie{};      // per-cell prediction errors
  Grid3 error_tem{};
};

/// Compares the identified fit against the tracking-error baseline on the
/// same grid. TEM steady states are min-max normalized like the observed
/// data, so only the pattern of the error grid matters.
ModelComparison compare_models(const ObservedGrid& data, const FitResult& oie_fit,
                               const TemParams& tem, const Grid3& error_grid);

}  // namespace oie

#endif  // OIE_IDENTIFICATION_HPP
