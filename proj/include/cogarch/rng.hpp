#pragma once

#include <cstdint>

namespace cogarch {

// SplitMix64 step; used to expand master seeds into generator keys.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Roles keep the draw coordinates of different uses of one master seed disjoint.
enum class StreamRole : std::uint16_t {
  Data = 0,       // observed-sample simulation
  SimPath = 1,    // indirect-inference simulation paths
  BindingMc = 2,  // Monte Carlo moment-map evaluation
  Generic = 15,
};

// Counter-based generator (Philox4x32-10). A draw is a pure function of
// (master seed, replication, role, path, cell, position within cell), so
// output never depends on evaluation order or thread scheduling. Cells are
// logical slots, typically one per inner simulation step; rejection samplers
// consume as many positions within a cell as they need.
class RngStream {
 public:
  explicit RngStream(std::uint64_t master_seed, std::uint32_t replication = 0,
                     StreamRole role = StreamRole::Generic, std::uint16_t path = 0);

  // Position the stream at (cell, 0). Cells may be visited in any order.
  void seek_cell(std::uint64_t cell);

  std::uint64_t bits();
  double uniform();  // (0, 1]
  double normal();   // standard normal (Box-Muller)
  double gamma(double shape, double scale);
  // Poisson count via cumulative exponential interarrivals.
  unsigned poisson(double mean);

 private:
  void refill();

  std::uint32_t key_[2];
  std::uint32_t hi_[2];  // {replication, role|path}
  std::uint32_t cell_ = 0;
  std::uint32_t block_ = 0;
  std::uint32_t buf_[4];
  int lane_ = 4;
};

}  // namespace cogarch
