#include "dopclust/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dopclust {

double entropy(const Eigen::Ref<const Matrix>& patch, int bins) {
  if (patch.size() == 0) throw InvalidArgument("entropy: empty patch");
  if (bins < 2) throw InvalidArgument("entropy: bins must be >= 2, got " + std::to_string(bins));

  std::vector<long long> counts(static_cast<std::size_t>(bins), 0);
  for (Eigen::Index j = 0; j < patch.cols(); ++j) {
    for (Eigen::Index i = 0; i < patch.rows(); ++i) {
      const double v = std::clamp(patch(i, j), 0.0, 1.0);
      const int b = std::min(static_cast<int>(v * bins), bins - 1);
      ++counts[static_cast<std::size_t>(b)];
    }
  }
  const double total = static_cast<double>(patch.size());
  double h = 0.0;
  for (long long c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log2(p);
  }
  return h;
}

double entropy(const Matrix& patch, int bins) { return entropy(Eigen::Ref<const Matrix>(patch), bins); }

std::string_view to_string(EntropyStrategyId id) {
  switch (id) {
    case EntropyStrategyId::halves_vertical: return "halves_vertical";
    case EntropyStrategyId::halves_horizontal: return "halves_horizontal";
    case EntropyStrategyId::grid10: return "grid10";
  }
  return "unknown";
}

EntropyStrategyId parse_entropy_strategy(std::string_view name) {
  for (auto id : kEntropyStrategies) {
    if (to_string(id) == name) return id;
  }
  throw InvalidArgument("unknown entropy strategy '" + std::string(name) +
                        "' (expected halves_vertical, halves_horizontal or grid10)");
}

std::vector<PatchRect> entropy_patches(EntropyStrategyId id) {
  switch (id) {
    case EntropyStrategyId::halves_vertical:
      return {{0, 0, 80, 40}, {0, 40, 80, 40}};
    case EntropyStrategyId::halves_horizontal:
      return {{0, 0, 40, 80}, {40, 0, 40, 80}};
    case EntropyStrategyId::grid10: {
      std::vector<PatchRect> rects;
      for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 5; ++c) rects.push_back({r * 40, c * 16, 40, 16});
      }
      return rects;
    }
  }
  return {};
}

Vector extract_entropy_features(const Matrix& image, const EntropyStrategy& strategy) {
  if (image.rows() != 80 || image.cols() != 80) throw InvalidArgument("extract_entropy_features: expected 80x80 image");
  const auto rects = entropy_patches(strategy.id);
  Vector out(static_cast<Eigen::Index>(rects.size()));
  for (std::size_t i = 0; i < rects.size(); ++i) {
    const auto& r = rects[i];
    out[static_cast<Eigen::Index>(i)] = entropy(Eigen::Ref<const Matrix>(image.block(r.row, r.col, r.rows, r.cols)), strategy.bins);
  }
  return out;
}

}  // namespace dopclust
