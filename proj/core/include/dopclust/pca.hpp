#pragma once

#include <vector>

#include "dopclust/common.hpp"

namespace dopclust {

/// Principal components of row-sample data.
struct PcaModel {
  Vector mean;                       // length m
  Matrix basis;                      // m x s, orthonormal columns
  Vector explained_variance;         // length s, sample-covariance eigenvalues
  Vector explained_variance_ratio;   // length s

  Eigen::Index components() const { return basis.cols(); }
};

// Keeps the smallest s whose cumulative explained-variance ratio reaches
// variance_target. Throws NumericalError when total variance is zero.
PcaModel pca_fit(const Matrix& X, double variance_target = 0.95);

// (X - mean) * basis, n x s.
Matrix pca_transform(const PcaModel& model, const Matrix& X);

// All eigenvalues of the sample covariance (1/(n-1) normalization), descending.
Vector covariance_spectrum(const Matrix& X);

/// Image-covariance (2D) PCA over a set of equally sized images.
struct Pca2dModel {
  Matrix mean_image;                // h x w
  Matrix basis;                     // w x d, orthonormal columns
  Vector eigenvalues;               // length d
  Vector explained_variance_ratio;  // length d

  Eigen::Index components() const { return basis.cols(); }
};

// V = 1/n sum_i (X_i - Xbar)^T (X_i - Xbar), a w x w matrix.
Matrix pca2d_covariance(const std::vector<Matrix>& images, const Matrix& mean_image);

Pca2dModel pca2d_fit(const std::vector<Matrix>& images, double variance_target = 0.95);

// (image - mean_image) * basis, an h x d matrix.
Matrix pca2d_project(const Pca2dModel& model, const Matrix& image);

// Projection flattened component-major (column 0 first), length h*d.
Vector pca2d_transform(const Pca2dModel& model, const Matrix& image);

}  // namespace dopclust
