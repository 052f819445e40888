#pragma once

#include <cstdint>
#include <utility>

namespace pmsim {

// Deterministic stream keyed by (seed, stream index). Each (seed, index) pair
// yields an independent sequence, so per-sample draws do not depend on worker
// scheduling or evaluation order.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64();
    double uniform();                          // [0, 1)
    double uniform_pos();                      // (0, 1]
    std::pair<double, double> normal_pair();   // independent standard normals

  private:
    std::uint64_t state_;
};

}  // namespace pmsim
