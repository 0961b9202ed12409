#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "swd/core.hpp"

namespace swd {

/// Axis-aligned region [lower_i, upper_i] per coordinate.
struct Box {
  Vec lower;
  Vec upper;

  [[nodiscard]] static Box cube(std::size_t n, double lo, double hi) {
    return {Vec::Constant(static_cast<Eigen::Index>(n), lo),
            Vec::Constant(static_cast<Eigen::Index>(n), hi)};
  }
};

/// Halton sequence with a seeded Cranley-Patterson rotation. point(i) depends only on
/// (seed, i), so samples can be generated in any order or in parallel.
class HaltonSampler {
 public:
  HaltonSampler(std::size_t dimension, std::uint64_t seed);

  /// i-th point in [0, 1)^n.
  [[nodiscard]] Vec unit_point(std::size_t i) const;
  /// i-th point mapped affinely into the box.
  [[nodiscard]] Vec point_in(const Box& box, std::size_t i) const;

  [[nodiscard]] std::size_t dimension() const noexcept { return shifts_.size(); }

 private:
  std::vector<double> shifts_;
  std::vector<unsigned> bases_;
};

[[nodiscard]] double radical_inverse(std::size_t index, unsigned base);

}  // namespace swd
