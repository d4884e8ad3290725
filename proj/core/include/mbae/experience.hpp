#pragma once

#include <vector>

namespace mbae {

// One replayed transition (s, u, r, s', terminal).
struct Experience {
  std::vector<double> state;
  std::vector<double> action;
  double reward = 0.0;
  std::vector<double> next_state;
  bool terminal = false;
};

}  // namespace mbae
