#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "dopclust/common.hpp"

namespace dopclust {

// Shannon entropy in bits of the equal-width histogram of values over [0,1].
// Values outside [0,1] are clamped into the edge bins.
double entropy(const Matrix& patch, int bins = 32);

// Same, for an arbitrary block expression of a larger image.
double entropy(const Eigen::Ref<const Matrix>& patch, int bins);

enum class EntropyStrategyId { halves_vertical, halves_horizontal, grid10 };

inline constexpr std::array<EntropyStrategyId, 3> kEntropyStrategies = {
    EntropyStrategyId::halves_vertical, EntropyStrategyId::halves_horizontal, EntropyStrategyId::grid10};

std::string_view to_string(EntropyStrategyId id);
EntropyStrategyId parse_entropy_strategy(std::string_view name);

struct PatchRect {
  int row = 0;
  int col = 0;
  int rows = 0;
  int cols = 0;
};

// Patch rectangles on the 80x80 image, in feature order:
//   halves_vertical   - left and right 80x40 halves
//   halves_horizontal - top and bottom 40x80 halves
//   grid10            - 2 rows x 5 columns of 40x16 patches, row-major
std::vector<PatchRect> entropy_patches(EntropyStrategyId id);

struct EntropyStrategy {
  EntropyStrategyId id = EntropyStrategyId::grid10;
  int bins = 32;

  std::size_t feature_length() const { return entropy_patches(id).size(); }
  friend bool operator==(const EntropyStrategy&, const EntropyStrategy&) = default;
};

Vector extract_entropy_features(const Matrix& image, const EntropyStrategy& strategy);

}  // namespace dopclust
