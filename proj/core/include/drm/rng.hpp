#pragma once

// Counter-based random streams (Philox4x32-10, Salmon et al. 2011). A stream
// is identified by (seed, index); draws are a pure function of
// (seed, index, position), so replications can run in any order or thread
// and still see identical numbers.

#include <array>
#include <cstdint>

namespace drm {

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t index) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t index() const noexcept { return index_; }

  std::uint32_t next_u32() noexcept;
  // Uniform on (0, 1), 53 random bits, never exactly 0 or 1.
  double uniform() noexcept;
  // Standard normal by the Box-Muller transform.
  double normal() noexcept;

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t index_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace drm
