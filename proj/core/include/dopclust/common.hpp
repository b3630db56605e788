#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dopclust {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Labels = std::vector<int>;

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on arguments was violated (bad shape, out-of-range parameter).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Input data is malformed or violates a domain invariant.
class DataError : public Error {
 public:
  using Error::Error;
};

// A numerical quantity is undefined for the given input (zero variance, zero spread, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Filesystem failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace dopclust
