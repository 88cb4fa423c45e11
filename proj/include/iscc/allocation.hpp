#pragma once

#include <cstddef>

namespace iscc {

// Decision tuple of one inference round. comm_power is 0 when nothing is
// uploaded (split == L) and edge_freq is 0 when nothing runs on the device
// (split == 0).
struct Allocation {
  std::size_t split = 0;
  int bits = 2;
  double rho = 1.0;
  double sensing_power = 0.0;
  double comm_power = 0.0;
  double edge_freq = 0.0;
};

}  // namespace iscc
