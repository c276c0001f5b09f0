#ifndef OIE_CONDITIONS_HPP
#define OIE_CONDITIONS_HPP

#include <array>
#include <string>
#include <string_view>

namespace oie {

enum class VisualLevel { sharp = 0, weak = 1, strong = 2 };
enum class HapticLevel { sharp = 0, weak = 1, strong = 2 };

/// Cloud angular deviations (mm) for V0, V1, V2.
inline constexpr std::array<double, 3> kCloudDeviationMm = {0.0, 21.32, 52.78};
/// Perturbation torque amplitudes (Nm) for H0, H1, H2.
inline constexpr std::array<double, 3> kPerturbationNm = {0.0, 0.08, 0.19};

/// One cell of the 3x3 noise grid with its physical noise magnitudes.
struct NoiseCondition {
  VisualLevel visual = VisualLevel::sharp;
  HapticLevel haptic = HapticLevel::sharp;

  double sigma_c() const { return kCloudDeviationMm[static_cast<int>(visual)]; }
  double sigma_p() const { return kPerturbationNm[static_cast<int>(haptic)]; }

  /// "V0".."V2" x "H0".."H2", e.g. "V1H2".
  std::string name() const {
    return "V" + std::to_string(static_cast<int>(visual)) +
           "H" + std::to_string(static_cast<int>(haptic));
  }

  /// Parses "V<i>H<j>" with i,j in 0..2; throws std::invalid_argument otherwise.
  static NoiseCondition parse(std::string_view text);

  /// All nine conditions in row-major (visual, haptic) order.
  static std::array<NoiseCondition, 9> all();
};

}  // namespace oie

#endif  // OIE_CONDITIONS_HPP
