#include "oie/conditions.hpp"

#include <stdexcept>

namespace oie {

NoiseCondition NoiseCondition::parse(std::string_view text) {
  if (text.size() != 4 || (text[0] != 'V' && text[0] != 'v') ||
      (text[2] != 'H' && text[2] != 'h') || text[1] < '0' || text[1] > '2' ||
      text[3] < '0' || text[3] > '2')
    throw std::invalid_argument("NoiseCondition: expected V<0-2>H<0-2>, got '" +
                                std::string(text) + "'");
  return {static_cast<VisualLevel>(text[1] - '0'), static_cast<HapticLevel>(text[3] - '0')};
}

std::array<NoiseCondition, 9> NoiseCondition::all() {
  std::array<NoiseCondition, 9> out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      out[3 * i + j] = {static_cast<VisualLevel>(i), static_cast<HapticLevel>(j)};
  return out;
}

}  // namespace oie
