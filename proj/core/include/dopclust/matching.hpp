#pragma once

#include <vector>

#include "dopclust/common.hpp"

namespace dopclust {

using CountMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

// counts(c, t) = number of samples with predicted cluster c and true class t.
CountMatrix contingency(const Labels& pred, const Labels& truth, int k);

// Cluster -> class bijection maximizing the matched count. Among optimal
// bijections the lexicographically smallest is returned. Exhaustive search
// is used for k <= 8, an assignment solver above. k > max_k is rejected.
std::vector<int> match_labels(const Labels& pred, const Labels& truth, int k, int max_k = 20);

// Both solvers over an explicit k x k contingency matrix.
std::vector<int> best_permutation_exhaustive(const CountMatrix& counts);
std::vector<int> best_permutation_assignment(const CountMatrix& counts);

// Maximum total weight of a perfect matching (Hungarian algorithm).
long long max_assignment_value(const CountMatrix& counts);

struct AccuracyResult {
  double accuracy = 0.0;
  CountMatrix confusion;  // rows: true class, cols: mapped prediction
};

// Applies mapping[cluster] to pred, then counts against truth.
AccuracyResult accuracy_and_confusion(const Labels& pred, const Labels& truth, const std::vector<int>& mapping);

}  // namespace dopclust
