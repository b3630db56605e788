#include "dopclust/data.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <string>

#include "dopclust/io.hpp"
#include "dopclust/random.hpp"

namespace dopclust {

Matrix reshape_to_image(std::span<const double> v) {
  if (v.size() != static_cast<std::size_t>(kSampleSize)) {
    throw InvalidArgument("reshape_to_image: expected " + std::to_string(kSampleSize) + " values, got " +
                          std::to_string(v.size()));
  }
  Matrix image(kImageSide, kImageSide);
  for (int r = 0; r < kImageSide; ++r) {
    for (int c = 0; c < kImageSide; ++c) image(r, c) = v[static_cast<std::size_t>(r * kImageSide + c)];
  }
  return image;
}

Matrix reshape_to_image(const Vector& v) { return reshape_to_image(std::span<const double>(v.data(), v.size())); }

Vector flatten_image(const Matrix& image) {
  if (image.rows() != kImageSide || image.cols() != kImageSide) {
    throw InvalidArgument("flatten_image: expected 80x80 image, got " + std::to_string(image.rows()) + "x" +
                          std::to_string(image.cols()));
  }
  Vector v(kSampleSize);
  for (int r = 0; r < kImageSide; ++r) {
    for (int c = 0; c < kImageSide; ++c) v[r * kImageSide + c] = image(r, c);
  }
  return v;
}

SpectrogramSample::SpectrogramSample(Vector values, int subject_id, std::optional<int> label)
    : values_(std::move(values)), subject_id_(subject_id), label_(label) {
  if (values_.size() != kSampleSize) {
    throw DataError("sample must have " + std::to_string(kSampleSize) + " values, got " +
                    std::to_string(values_.size()));
  }
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    const double x = values_[i];
    if (!std::isfinite(x) || x < 0.0 || x > 1.0) {
      throw DataError("sample value f" + std::to_string(i) + " = " + io::format_double(x) + " outside [0,1]");
    }
  }
}

Dataset::Dataset(std::vector<SpectrogramSample> samples) : samples_(std::move(samples)) {
  if (samples_.empty()) return;

  std::set<int> subjects;
  std::set<int> labels;
  std::size_t labeled = 0;
  for (const auto& s : samples_) {
    subjects.insert(s.subject_id());
    if (s.label()) {
      ++labeled;
      labels.insert(*s.label());
    }
  }
  if (*subjects.rbegin() - *subjects.begin() + 1 != static_cast<int>(subjects.size())) {
    throw DataError("subject IDs must form a contiguous range");
  }
  if (labeled != 0 && labeled != samples_.size()) {
    throw DataError("labels must be present on every sample or on none");
  }
  subject_count_ = static_cast<int>(subjects.size());
  activity_count_ = static_cast<int>(labels.size());
  has_labels_ = labeled != 0;
}

std::vector<int> Dataset::subjects() const {
  std::set<int> ids;
  for (const auto& s : samples_) ids.insert(s.subject_id());
  return {ids.begin(), ids.end()};
}

Labels Dataset::class_indices() const {
  if (!has_labels_) throw DataError("dataset has no labels");
  std::map<int, int> index;
  for (const auto& s : samples_) index.emplace(*s.label(), 0);
  int next = 0;
  for (auto& [label, idx] : index) idx = next++;
  Labels out;
  out.reserve(samples_.size());
  for (const auto& s : samples_) out.push_back(index.at(*s.label()));
  return out;
}

Matrix Dataset::vectors() const {
  Matrix m(static_cast<Eigen::Index>(samples_.size()), kSampleSize);
  for (std::size_t i = 0; i < samples_.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = samples_[i].flat().transpose();
  return m;
}

std::vector<Matrix> Dataset::images() const {
  std::vector<Matrix> out;
  out.reserve(samples_.size());
  for (const auto& s : samples_) out.push_back(s.image());
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<SpectrogramSample> picked;
  picked.reserve(indices.size());
  for (auto i : indices) {
    if (i >= samples_.size()) throw InvalidArgument("subset index out of range");
    picked.push_back(samples_[i]);
  }
  return Dataset(std::move(picked));
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string cell_name(std::size_t line, std::size_t column, const std::vector<std::string_view>& header) {
  std::string name = column < header.size() ? std::string(header[column]) : "#" + std::to_string(column + 1);
  return "row " + std::to_string(line) + ", column " + std::to_string(column + 1) + " (" + name + ")";
}

int parse_subject(std::string_view field, std::size_t line, std::size_t col,
                  const std::vector<std::string_view>& header) {
  long long v = 0;
  if (!io::parse_int(field, v) || v < 1) {
    throw DataError("invalid subject id at " + cell_name(line, col, header));
  }
  return static_cast<int>(v);
}

std::optional<int> parse_label(std::string_view field, std::size_t line, std::size_t col,
                               const std::vector<std::string_view>& header) {
  while (!field.empty() && (field.back() == ' ' || field.back() == '\r')) field.remove_suffix(1);
  if (field.empty()) return std::nullopt;
  long long v = 0;
  if (!io::parse_int(field, v) || v < 1) {
    throw DataError("invalid label at " + cell_name(line, col, header));
  }
  return static_cast<int>(v);
}

double parse_value(std::string_view field, std::size_t line, std::size_t col,
                   const std::vector<std::string_view>& header) {
  double v = 0.0;
  if (!io::parse_double(field, v)) {
    throw DataError("malformed number at " + cell_name(line, col, header));
  }
  if (!std::isfinite(v)) throw DataError("non-finite value at " + cell_name(line, col, header));
  if (v < 0.0 || v > 1.0) {
    throw DataError("value " + io::format_double(v) + " outside [0,1] at " + cell_name(line, col, header));
  }
  return v;
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& path, Layout layout) {
  if (!std::filesystem::exists(path)) throw IoError("dataset file not found: " + path.string());
  const std::string text = io::read_text_file(path);

  std::vector<std::string_view> lines;
  {
    std::string_view rest(text);
    while (!rest.empty()) {
      const auto nl = rest.find('\n');
      std::string_view line = rest.substr(0, nl);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines.push_back(line);
      if (nl == std::string_view::npos) break;
      rest.remove_prefix(nl + 1);
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
  }
  if (lines.empty()) throw DataError("malformed dataset: file is empty: " + path.string());

  const auto header = io::split_csv_line(lines[0]);
  const std::size_t width = layout == Layout::vector6400 ? 2 + kSampleSize : 4 + kTimeSteps;
  if (header.size() != width || header[0] != "subject" || header[1] != "label") {
    throw DataError("malformed dataset header: expected " + std::to_string(width) +
                    " columns starting with subject,label; got " + std::to_string(header.size()));
  }
  if (lines.size() == 1) throw DataError("malformed dataset: header only, no samples: " + path.string());

  std::vector<SpectrogramSample> samples;
  if (layout == Layout::vector6400) {
    samples.reserve(lines.size() - 1);
    for (std::size_t li = 1; li < lines.size(); ++li) {
      const auto fields = io::split_csv_line(lines[li]);
      const std::size_t line_no = li + 1;
      if (fields.size() != width) {
        throw DataError("malformed row width at row " + std::to_string(line_no) + ": expected " +
                        std::to_string(width) + " columns, got " + std::to_string(fields.size()));
      }
      const int subject = parse_subject(fields[0], line_no, 0, header);
      const auto label = parse_label(fields[1], line_no, 1, header);
      Vector v(kSampleSize);
      for (int j = 0; j < kSampleSize; ++j) v[j] = parse_value(fields[2 + j], line_no, 2 + j, header);
      samples.emplace_back(std::move(v), subject, label);
    }
  } else {
    constexpr std::size_t rows_per_sample = kDirections * kDopplerBins;
    if ((lines.size() - 1) % rows_per_sample != 0) {
      throw DataError("malformed cube dataset: row count " + std::to_string(lines.size() - 1) +
                      " is not a multiple of " + std::to_string(rows_per_sample));
    }
    Vector v(kSampleSize);
    int subject = 0;
    std::optional<int> label;
    for (std::size_t li = 1; li < lines.size(); ++li) {
      const auto fields = io::split_csv_line(lines[li]);
      const std::size_t line_no = li + 1;
      if (fields.size() != width) {
        throw DataError("malformed row width at row " + std::to_string(line_no) + ": expected " +
                        std::to_string(width) + " columns, got " + std::to_string(fields.size()));
      }
      const std::size_t k = (li - 1) % rows_per_sample;
      const int s = parse_subject(fields[0], line_no, 0, header);
      const auto l = parse_label(fields[1], line_no, 1, header);
      long long direction = 0;
      long long bin = 0;
      if (!io::parse_int(fields[2], direction) || !io::parse_int(fields[3], bin) ||
          direction != static_cast<long long>(k / kDopplerBins) || bin != static_cast<long long>(k % kDopplerBins)) {
        throw DataError("cube rows out of order at row " + std::to_string(line_no) + ": expected direction " +
                        std::to_string(k / kDopplerBins) + ", bin " + std::to_string(k % kDopplerBins));
      }
      if (k == 0) {
        subject = s;
        label = l;
      } else if (s != subject || l != label) {
        throw DataError("subject/label changes inside a sample block at row " + std::to_string(line_no));
      }
      for (int t = 0; t < kTimeSteps; ++t) {
        v[cube_index(static_cast<int>(direction), static_cast<int>(bin), t)] =
            parse_value(fields[4 + t], line_no, 4 + t, header);
      }
      if (k + 1 == rows_per_sample) samples.emplace_back(v, subject, label);
    }
  }
  return Dataset(std::move(samples));
}

void save_dataset(const std::filesystem::path& path, const Dataset& ds, Layout layout) {
  std::string out;
  out.reserve(ds.size() * kSampleSize * 8);
  out += "subject,label";
  if (layout == Layout::vector6400) {
    for (int j = 0; j < kSampleSize; ++j) out += ",f" + std::to_string(j);
  } else {
    out += ",direction,bin";
    for (int t = 0; t < kTimeSteps; ++t) out += ",t" + std::to_string(t);
  }
  out += '\n';

  for (const auto& s : ds.samples()) {
    const std::string prefix =
        std::to_string(s.subject_id()) + "," + (s.label() ? std::to_string(*s.label()) : std::string());
    if (layout == Layout::vector6400) {
      out += prefix;
      for (int j = 0; j < kSampleSize; ++j) {
        out += ',';
        out += io::format_double(s.flat()[j]);
      }
      out += '\n';
    } else {
      for (int d = 0; d < kDirections; ++d) {
        for (int b = 0; b < kDopplerBins; ++b) {
          out += prefix + "," + std::to_string(d) + "," + std::to_string(b);
          for (int t = 0; t < kTimeSteps; ++t) {
            out += ',';
            out += io::format_double(s.at(d, b, t));
          }
          out += '\n';
        }
      }
    }
  }
  io::write_text_file(path, out);
}

// ---------------------------------------------------------------------------
// Synthetic data

std::pair<int, int> synthetic_band(int activity, int n_activities) {
  const int lo = activity * kDopplerBins / n_activities;
  const int hi = (activity + 1) * kDopplerBins / n_activities;
  return {lo, hi};
}

int synthetic_period(int activity) { return 4 + 2 * (activity % 8); }

Dataset generate_synthetic(const SynthConfig& config) {
  if (config.n_subjects < 1) throw InvalidArgument("generate_synthetic: n_subjects must be >= 1");
  if (config.reps_per_activity < 1) throw InvalidArgument("generate_synthetic: reps_per_activity must be >= 1");
  if (config.n_activities < 1 || config.n_activities > kDopplerBins) {
    throw InvalidArgument("generate_synthetic: n_activities must be in [1, 100]");
  }
  if (!(config.noise_level >= 0.0) || !std::isfinite(config.noise_level)) {
    throw InvalidArgument("generate_synthetic: noise_level must be finite and >= 0");
  }

  constexpr double kBackground = 0.05;
  constexpr double kPeak = 0.8;
  constexpr double kSecondDirection = 0.6;

  Rng subject_rng(derive_seed(config.seed, "subjects"));
  std::vector<double> gains(static_cast<std::size_t>(config.n_subjects));
  for (auto& g : gains) g = subject_rng.uniform(0.8, 1.2);

  std::vector<SpectrogramSample> samples;
  samples.reserve(static_cast<std::size_t>(config.n_subjects * config.n_activities * config.reps_per_activity));
  std::uint64_t recording = 0;
  for (int s = 0; s < config.n_subjects; ++s) {
    for (int k = 0; k < config.n_activities; ++k) {
      const auto [lo, hi] = synthetic_band(k, config.n_activities);
      const double width = std::max(1, hi - lo);
      const double period = synthetic_period(k);
      for (int r = 0; r < config.reps_per_activity; ++r, ++recording) {
        Rng rng(derive_seed(config.seed, recording));
        const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
        Vector v(kSampleSize);
        for (int d = 0; d < kDirections; ++d) {
          const double dir_gain = d == 0 ? 1.0 : kSecondDirection;
          for (int b = 0; b < kDopplerBins; ++b) {
            double profile = 0.0;
            if (b >= lo && b < hi) {
              const double x = (b - lo + 0.5) / width;
              profile = std::sin(std::numbers::pi * x);
            }
            for (int t = 0; t < kTimeSteps; ++t) {
              const double modulation = 0.5 + 0.5 * std::cos(2.0 * std::numbers::pi * t / period + phase);
              double value = gains[static_cast<std::size_t>(s)] *
                             (kBackground + kPeak * dir_gain * profile * modulation);
              if (config.noise_level > 0.0) value += config.noise_level * rng.normal();
              v[cube_index(d, b, t)] = std::clamp(value, 0.0, 1.0);
            }
          }
        }
        samples.emplace_back(std::move(v), s + 1, k + 1);
      }
    }
  }
  return Dataset(std::move(samples));
}

}  // namespace dopclust
