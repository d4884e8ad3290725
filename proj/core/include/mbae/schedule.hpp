#pragma once

#include <algorithm>
#include <cstddef>

#include "mbae/errors.hpp"

namespace mbae {

// Linear anneal from `initial` to `final` over `horizon` episodes, constant
// afterwards. Monotone by construction when initial >= final.
struct LinearSchedule {
  double initial = 1.0;
  double final_value = 0.1;
  std::size_t horizon = 1000;

  double at(std::size_t episode) const {
    if (horizon == 0) return final_value;
    const double t = std::min(1.0, static_cast<double>(episode) / static_cast<double>(horizon));
    return initial + (final_value - initial) * t;
  }

  void validate(const char* what) const {
    if (initial <= 0.0 || final_value <= 0.0) {
      throw ConfigError(std::string(what) + ": schedule endpoints must be positive");
    }
  }
};

}  // namespace mbae
