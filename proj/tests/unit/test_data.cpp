#include <doctest.h>

#include <filesystem>
#include <string>

#include "dopclust/data.hpp"
#include "dopclust/io.hpp"

using namespace dopclust;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "dopclust_test_data";
  fs::create_directories(dir);
  return dir / name;
}

std::string header() {
  std::string h = "subject,label";
  for (int i = 0; i < kSampleSize; ++i) h += ",f" + std::to_string(i);
  return h + "\n";
}

std::string row(int subject, int label, double value) {
  std::string r = std::to_string(subject) + "," + std::to_string(label);
  for (int i = 0; i < kSampleSize; ++i) r += "," + io::format_double(value);
  return r + "\n";
}

}  // namespace

TEST_CASE("reshape_to_image fills row-major") {
  Vector v(kSampleSize);
  for (int i = 0; i < kSampleSize; ++i) v[i] = i / 6399.0;
  const Matrix img = reshape_to_image(v);
  CHECK(img.rows() == 80);
  CHECK(img(0, 0) == 0.0);
  CHECK(img(0, 79) == 79 / 6399.0);
  CHECK(img(1, 0) == 80 / 6399.0);
  CHECK(flatten_image(img) == v);
  CHECK(reshape_to_image(Vector::Zero(kSampleSize)).isZero(0.0));
  CHECK_THROWS_AS(reshape_to_image(Vector::Zero(6399)), InvalidArgument);
}

TEST_CASE("flatten then reshape is the identity on images") {
  const Matrix img = Matrix::Random(80, 80);
  CHECK(reshape_to_image(flatten_image(img)) == img);
}

TEST_CASE("cube index is direction-major, then bin, then time") {
  CHECK(cube_index(0, 0, 0) == 0);
  CHECK(cube_index(0, 0, 31) == 31);
  CHECK(cube_index(0, 1, 0) == 32);
  CHECK(cube_index(1, 0, 0) == 3200);
  CHECK(cube_index(1, 99, 31) == 6399);
}

TEST_CASE("samples reject out-of-range values") {
  Vector v = Vector::Constant(kSampleSize, 0.5);
  CHECK_NOTHROW(SpectrogramSample(v, 1, 1));
  v[17] = 1.5;
  CHECK_THROWS_AS(SpectrogramSample(v, 1, 1), DataError);
  CHECK_THROWS_AS(SpectrogramSample(Vector::Zero(10), 1), DataError);
}

TEST_CASE("synthetic dataset shape and determinism") {
  const SynthConfig config{4, 10, 5, 0.05, 42};
  const Dataset a = generate_synthetic(config);
  const Dataset b = generate_synthetic(config);
  CHECK(a.size() == 200);
  CHECK(a.subject_count() == 4);
  CHECK(a.activity_count() == 5);
  CHECK(a == b);

  SynthConfig other = config;
  other.seed = 43;
  CHECK_FALSE(generate_synthetic(other) == a);

  const auto single = generate_synthetic({2, 3, 1, 0.05, 1});
  CHECK(single.activity_count() == 1);
  CHECK(single.size() == 6);
  CHECK_THROWS_AS(generate_synthetic({4, 0, 5, 0.05, 1}), InvalidArgument);
  CHECK_THROWS_AS(generate_synthetic({4, 10, 5, -1.0, 1}), InvalidArgument);
}

TEST_CASE("noise-free synthetic classes separate by band energy") {
  const Dataset ds = generate_synthetic({4, 10, 5, 0.0, 7});
  const Labels cls = ds.class_indices();
  const int k = 5;
  // Energy in each activity's Doppler band, both directions, all time steps.
  auto band_energy = [&](const SpectrogramSample& s) {
    Vector e = Vector::Zero(k);
    for (int band = 0; band < k; ++band) {
      const auto [lo, hi] = synthetic_band(band, k);
      for (int d = 0; d < kDirections; ++d)
        for (int b = lo; b < hi; ++b)
          for (int t = 0; t < kTimeSteps; ++t) e[band] += s.at(d, b, t);
    }
    return e;
  };
  std::vector<Vector> mean(k, Vector::Zero(k));
  std::vector<int> count(k, 0);
  std::vector<Vector> energies;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    energies.push_back(band_energy(ds[i]));
    mean[cls[i]] += energies.back();
    ++count[cls[i]];
  }
  for (int c = 0; c < k; ++c) mean[c] /= count[c];
  double spread = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) spread = std::max(spread, (energies[i] - mean[cls[i]]).norm());
  double separation = std::numeric_limits<double>::infinity();
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b) separation = std::min(separation, (mean[a] - mean[b]).norm());
  CHECK(separation >= 3.0 * spread);
}

TEST_CASE("dataset round-trips through CSV in both layouts") {
  const Dataset ds = generate_synthetic({2, 2, 3, 0.05, 5});
  for (Layout layout : {Layout::vector6400, Layout::cube}) {
    const fs::path p = scratch(layout == Layout::cube ? "cube.csv" : "flat.csv");
    save_dataset(p, ds, layout);
    CHECK(load_dataset(p, layout) == ds);
  }
}

TEST_CASE("load_dataset reads subjects and labels") {
  const fs::path p = scratch("small.csv");
  io::write_text_file(p, header() + row(1, 1, 0.1) + row(1, 2, 0.2) + row(2, 1, 0.3) + row(2, 2, 0.4));
  const Dataset ds = load_dataset(p);
  CHECK(ds.size() == 4);
  CHECK(ds.subject_count() == 2);
  CHECK(ds.activity_count() == 2);
  CHECK(ds[2].flat()[0] == doctest::Approx(0.3));
}

TEST_CASE("load_dataset error reporting") {
  CHECK_THROWS_AS(load_dataset(scratch("does_not_exist.csv")), IoError);

  const fs::path empty = scratch("empty.csv");
  io::write_text_file(empty, "");
  CHECK_THROWS_AS(load_dataset(empty), DataError);

  const fs::path only_header = scratch("header.csv");
  io::write_text_file(only_header, header());
  CHECK_THROWS_AS(load_dataset(only_header), DataError);

  std::string bad = row(1, 1, 0.5);
  const auto pos = bad.find(",0.5", bad.find(",0.5") + 1);
  bad.replace(pos, 4, ",1.5");
  const fs::path range = scratch("range.csv");
  io::write_text_file(range, header() + bad);
  try {
    load_dataset(range);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("1.5") != std::string::npos);
    CHECK(msg.find("f1") != std::string::npos);
    CHECK(msg.find("row") != std::string::npos);
  }

  const fs::path narrow = scratch("narrow.csv");
  io::write_text_file(narrow, header() + "1,1,0.5,0.5\n");
  CHECK_THROWS_AS(load_dataset(narrow), DataError);
}

TEST_CASE("dataset invariants") {
  const Vector v = Vector::Constant(kSampleSize, 0.5);
  CHECK_THROWS_AS(Dataset({SpectrogramSample(v, 1, 1), SpectrogramSample(v, 3, 1)}), DataError);
  CHECK_THROWS_AS(Dataset({SpectrogramSample(v, 1, 1), SpectrogramSample(v, 2)}), DataError);
  const Dataset ds({SpectrogramSample(v, 2, 7), SpectrogramSample(v, 3, 3)});
  CHECK(ds.class_indices() == Labels{1, 0});
  CHECK(ds.subjects() == std::vector<int>{2, 3});
}
