#include "dopclust/pca.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dopclust {

namespace {

// Flips column signs so each column's largest-magnitude entry is positive.
void canonicalize_signs(Matrix& basis) {
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    Eigen::Index arg = 0;
    basis.col(j).cwiseAbs().maxCoeff(&arg);
    if (basis(arg, j) < 0.0) basis.col(j) *= -1.0;
  }
}

Eigen::Index components_for_target(const Vector& eigenvalues, double total, double target) {
  double cumulative = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    cumulative += eigenvalues[i];
    if (cumulative / total >= target - 1e-12) return i + 1;
  }
  return eigenvalues.size();
}

void check_target(double target) {
  if (!(target > 0.0 && target <= 1.0)) {
    throw InvalidArgument("variance target must be in (0, 1], got " + std::to_string(target));
  }
}

void check_finite(const Matrix& X, const char* who) {
  if (!X.allFinite()) throw InvalidArgument(std::string(who) + ": input contains non-finite values");
}

}  // namespace

PcaModel pca_fit(const Matrix& X, double variance_target) {
  check_target(variance_target);
  if (X.rows() < 2) throw InvalidArgument("pca_fit: need at least 2 samples");
  if (X.cols() < 1) throw InvalidArgument("pca_fit: need at least 1 feature");
  check_finite(X, "pca_fit");

  PcaModel model;
  model.mean = X.colwise().mean().transpose();
  const Matrix centered = X.rowwise() - model.mean.transpose();
  const double total_ss = centered.squaredNorm();
  const bool identical = (X.rowwise() - X.row(0)).isZero(0.0);
  if (identical || total_ss <= 0.0) throw NumericalError("pca_fit: zero total variance (all rows identical)");

  Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinV);
  const double denom = static_cast<double>(X.rows() - 1);
  const Vector eigenvalues = svd.singularValues().array().square() / denom;
  const double total = total_ss / denom;
  const Eigen::Index s = components_for_target(eigenvalues, total, variance_target);

  model.basis = svd.matrixV().leftCols(s);
  canonicalize_signs(model.basis);
  model.explained_variance = eigenvalues.head(s);
  model.explained_variance_ratio = model.explained_variance / total;
  return model;
}

Matrix pca_transform(const PcaModel& model, const Matrix& X) {
  if (X.cols() != model.mean.size()) {
    throw InvalidArgument("pca_transform: expected " + std::to_string(model.mean.size()) + " columns, got " +
                          std::to_string(X.cols()));
  }
  return (X.rowwise() - model.mean.transpose()) * model.basis;
}

Vector covariance_spectrum(const Matrix& X) {
  if (X.rows() < 2) throw InvalidArgument("covariance_spectrum: need at least 2 samples");
  const Matrix centered = X.rowwise() - X.colwise().mean();
  Eigen::BDCSVD<Matrix> svd(centered);
  return svd.singularValues().array().square() / static_cast<double>(X.rows() - 1);
}

Matrix pca2d_covariance(const std::vector<Matrix>& images, const Matrix& mean_image) {
  Matrix v = Matrix::Zero(mean_image.cols(), mean_image.cols());
  for (const auto& img : images) {
    const Matrix d = img - mean_image;
    v.noalias() += d.transpose() * d;
  }
  return v / static_cast<double>(images.size());
}

Pca2dModel pca2d_fit(const std::vector<Matrix>& images, double variance_target) {
  check_target(variance_target);
  if (images.size() < 2) throw InvalidArgument("pca2d_fit: need at least 2 images");
  const auto rows = images.front().rows();
  const auto cols = images.front().cols();
  Matrix mean = Matrix::Zero(rows, cols);
  for (const auto& img : images) {
    if (img.rows() != rows || img.cols() != cols) throw InvalidArgument("pca2d_fit: images differ in shape");
    check_finite(img, "pca2d_fit");
    mean += img;
  }
  mean /= static_cast<double>(images.size());

  const Matrix cov = pca2d_covariance(images, mean);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  if (eig.info() != Eigen::Success) throw NumericalError("pca2d_fit: eigendecomposition failed");

  // Descending order, negatives from round-off clamped to zero.
  const Vector ascending = eig.eigenvalues();
  const Eigen::Index w = ascending.size();
  Vector eigenvalues(w);
  Matrix vectors(w, w);
  for (Eigen::Index i = 0; i < w; ++i) {
    eigenvalues[i] = std::max(0.0, ascending[w - 1 - i]);
    vectors.col(i) = eig.eigenvectors().col(w - 1 - i);
  }
  const double total = eigenvalues.sum();
  const bool identical =
      std::all_of(images.begin(), images.end(), [&](const Matrix& img) { return img == images.front(); });
  if (identical || total <= 0.0) throw NumericalError("pca2d_fit: zero total variance (all images identical)");
  const Eigen::Index d = components_for_target(eigenvalues, total, variance_target);

  Pca2dModel model;
  model.mean_image = std::move(mean);
  model.basis = vectors.leftCols(d);
  canonicalize_signs(model.basis);
  model.eigenvalues = eigenvalues.head(d);
  model.explained_variance_ratio = model.eigenvalues / total;
  return model;
}

Matrix pca2d_project(const Pca2dModel& model, const Matrix& image) {
  if (image.rows() != model.mean_image.rows() || image.cols() != model.mean_image.cols()) {
    throw InvalidArgument("pca2d_project: image shape does not match the model");
  }
  return (image - model.mean_image) * model.basis;
}

Vector pca2d_transform(const Pca2dModel& model, const Matrix& image) {
  const Matrix y = pca2d_project(model, image);
  // Eigen storage is column-major, which is the component-major order we want.
  return Eigen::Map<const Vector>(y.data(), y.size());
}

}  // namespace dopclust
