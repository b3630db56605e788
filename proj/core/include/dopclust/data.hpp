#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "dopclust/common.hpp"

namespace dopclust {

inline constexpr int kDirections = 2;
inline constexpr int kDopplerBins = 100;
inline constexpr int kTimeSteps = 32;
inline constexpr int kSampleSize = kDirections * kDopplerBins * kTimeSteps;  // 6400
inline constexpr int kImageSide = 80;

// Index of cube element (direction, bin, time) in the flattened 6400-vector:
// direction-major, then Doppler bin, then time.
constexpr int cube_index(int direction, int bin, int time) {
  return (direction * kDopplerBins + bin) * kTimeSteps + time;
}

// Row-major fill of an 80x80 image from the flattened vector.
Matrix reshape_to_image(std::span<const double> v);
Matrix reshape_to_image(const Vector& v);

// Inverse of reshape_to_image.
Vector flatten_image(const Matrix& image);

/// One activity recording: a 2x100x32 cube of normalized amplitudes.
class SpectrogramSample {
 public:
  // Throws DataError if values has the wrong length or any value is outside [0,1].
  SpectrogramSample(Vector values, int subject_id, std::optional<int> label = std::nullopt);

  const Vector& flat() const { return values_; }
  double at(int direction, int bin, int time) const { return values_[cube_index(direction, bin, time)]; }
  Matrix image() const { return reshape_to_image(values_); }

  int subject_id() const { return subject_id_; }
  const std::optional<int>& label() const { return label_; }

  friend bool operator==(const SpectrogramSample&, const SpectrogramSample&) = default;

 private:
  Vector values_;
  int subject_id_;
  std::optional<int> label_;
};

/// Ordered, immutable collection of samples.
class Dataset {
 public:
  Dataset() = default;
  // Validates that subject IDs form a contiguous range and that labels are
  // either present on every sample or on none.
  explicit Dataset(std::vector<SpectrogramSample> samples);

  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  const SpectrogramSample& operator[](std::size_t i) const { return samples_[i]; }
  const std::vector<SpectrogramSample>& samples() const { return samples_; }

  int subject_count() const { return subject_count_; }
  int activity_count() const { return activity_count_; }
  bool has_labels() const { return has_labels_; }

  // Sorted distinct subject IDs.
  std::vector<int> subjects() const;
  // Labels mapped to 0..activity_count()-1 in ascending order of the raw label.
  Labels class_indices() const;

  // n x 6400 matrix of flattened samples.
  Matrix vectors() const;
  std::vector<Matrix> images() const;

  Dataset subset(std::span<const std::size_t> indices) const;

  friend bool operator==(const Dataset& a, const Dataset& b) { return a.samples_ == b.samples_; }

 private:
  std::vector<SpectrogramSample> samples_;
  int subject_count_ = 0;
  int activity_count_ = 0;
  bool has_labels_ = false;
};

enum class Layout {
  vector6400,  // one row per sample: subject,label,f0..f6399
  cube,        // one row per (sample, direction, bin): subject,label,direction,bin,t0..t31
};

Dataset load_dataset(const std::filesystem::path& path, Layout layout = Layout::vector6400);
void save_dataset(const std::filesystem::path& path, const Dataset& ds, Layout layout = Layout::vector6400);

struct SynthConfig {
  int n_subjects = 4;
  int reps_per_activity = 10;
  int n_activities = 5;
  double noise_level = 0.05;
  std::uint64_t seed = 42;
};

// First and one-past-last Doppler bin of the energy band used by activity k.
std::pair<int, int> synthetic_band(int activity, int n_activities);

// Temporal modulation period (in time steps) of activity k's template.
int synthetic_period(int activity);

/// Deterministic labeled dataset with one micro-Doppler-like template per activity.
///
/// Activity k concentrates energy in Doppler band k (both directions, the
/// second one attenuated) with a class-specific temporal modulation period.
/// Each subject gets a gain in [0.8, 1.2]; each recording gets a random phase
/// and additive Gaussian noise of standard deviation noise_level, then the
/// result is clipped to [0, 1]. Samples are ordered subject, activity, rep.
Dataset generate_synthetic(const SynthConfig& config);

}  // namespace dopclust
