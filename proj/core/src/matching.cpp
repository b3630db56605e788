#include "dopclust/matching.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

namespace dopclust {

CountMatrix contingency(const Labels& pred, const Labels& truth, int k) {
  if (pred.size() != truth.size()) {
    throw InvalidArgument("contingency: " + std::to_string(pred.size()) + " predictions for " +
                          std::to_string(truth.size()) + " truth labels");
  }
  if (k < 1) throw InvalidArgument("contingency: K must be >= 1");
  CountMatrix counts = CountMatrix::Zero(k, k);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] < 0 || pred[i] >= k || truth[i] < 0 || truth[i] >= k) {
      throw InvalidArgument("contingency: label at position " + std::to_string(i) + " outside 0.." +
                            std::to_string(k - 1));
    }
    ++counts(pred[i], truth[i]);
  }
  return counts;
}

namespace {

long long permutation_value(const CountMatrix& counts, const std::vector<int>& perm) {
  long long v = 0;
  for (std::size_t r = 0; r < perm.size(); ++r) v += counts(static_cast<Eigen::Index>(r), perm[r]);
  return v;
}

void check_square(const CountMatrix& counts, const char* who) {
  if (counts.rows() != counts.cols() || counts.rows() == 0) {
    throw InvalidArgument(std::string(who) + ": contingency matrix must be square and non-empty");
  }
}

}  // namespace

std::vector<int> best_permutation_exhaustive(const CountMatrix& counts) {
  check_square(counts, "best_permutation_exhaustive");
  std::vector<int> perm(static_cast<std::size_t>(counts.rows()));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  long long best_value = permutation_value(counts, perm);
  while (std::next_permutation(perm.begin(), perm.end())) {
    const long long v = permutation_value(counts, perm);
    if (v > best_value) {
      best_value = v;
      best = perm;
    }
  }
  return best;
}

long long max_assignment_value(const CountMatrix& counts) {
  check_square(counts, "max_assignment_value");
  // Hungarian algorithm (potentials form) minimizing -counts, 1-based arrays.
  const int n = static_cast<int>(counts.rows());
  constexpr long long inf = std::numeric_limits<long long>::max() / 4;
  std::vector<long long> u(static_cast<std::size_t>(n) + 1, 0), v(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> p(static_cast<std::size_t>(n) + 1, 0), way(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<long long> minv(static_cast<std::size_t>(n) + 1, inf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      long long delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const long long cur = -counts(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  long long total = 0;
  for (int j = 1; j <= n; ++j) total += counts(p[static_cast<std::size_t>(j)] - 1, j - 1);
  return total;
}

std::vector<int> best_permutation_assignment(const CountMatrix& counts) {
  check_square(counts, "best_permutation_assignment");
  const auto n = counts.rows();
  const long long optimum = max_assignment_value(counts);

  // Fix rows in order, each to the smallest column that keeps the optimum
  // reachable; this yields the lexicographically smallest optimal permutation.
  std::vector<int> perm;
  std::vector<char> col_used(static_cast<std::size_t>(n), 0);
  long long fixed_value = 0;
  for (Eigen::Index r = 0; r < n; ++r) {
    bool placed = false;
    for (Eigen::Index c = 0; c < n && !placed; ++c) {
      if (col_used[static_cast<std::size_t>(c)]) continue;
      const long long with = fixed_value + counts(r, c);
      long long rest = 0;
      const Eigen::Index remaining = n - r - 1;
      if (remaining > 0) {
        CountMatrix sub(remaining, remaining);
        Eigen::Index sc = 0;
        for (Eigen::Index cc = 0; cc < n; ++cc) {
          if (col_used[static_cast<std::size_t>(cc)] || cc == c) continue;
          for (Eigen::Index rr = 0; rr < remaining; ++rr) sub(rr, sc) = counts(r + 1 + rr, cc);
          ++sc;
        }
        rest = max_assignment_value(sub);
      }
      if (with + rest == optimum) {
        perm.push_back(static_cast<int>(c));
        col_used[static_cast<std::size_t>(c)] = 1;
        fixed_value = with;
        placed = true;
      }
    }
    if (!placed) throw NumericalError("best_permutation_assignment: no completion reaches the optimum");
  }
  return perm;
}

std::vector<int> match_labels(const Labels& pred, const Labels& truth, int k, int max_k) {
  if (k > max_k) {
    throw InvalidArgument("match_labels: K = " + std::to_string(k) + " exceeds the limit " + std::to_string(max_k));
  }
  const CountMatrix counts = contingency(pred, truth, k);
  return k <= 8 ? best_permutation_exhaustive(counts) : best_permutation_assignment(counts);
}

AccuracyResult accuracy_and_confusion(const Labels& pred, const Labels& truth, const std::vector<int>& mapping) {
  const int k = static_cast<int>(mapping.size());
  if (k == 0) throw InvalidArgument("accuracy_and_confusion: empty mapping");
  std::vector<char> seen(static_cast<std::size_t>(k), 0);
  for (int m : mapping) {
    if (m < 0 || m >= k || seen[static_cast<std::size_t>(m)]) {
      throw InvalidArgument("accuracy_and_confusion: mapping is not a bijection on 0.." + std::to_string(k - 1));
    }
    seen[static_cast<std::size_t>(m)] = 1;
  }
  if (pred.size() != truth.size()) throw InvalidArgument("accuracy_and_confusion: length mismatch");

  AccuracyResult result;
  result.confusion = CountMatrix::Zero(k, k);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] < 0 || pred[i] >= k || truth[i] < 0 || truth[i] >= k) {
      throw InvalidArgument("accuracy_and_confusion: label at position " + std::to_string(i) + " out of range");
    }
    ++result.confusion(truth[i], mapping[static_cast<std::size_t>(pred[i])]);
  }
  const long long total = result.confusion.sum();
  result.accuracy = total == 0 ? 0.0 : static_cast<double>(result.confusion.trace()) / static_cast<double>(total);
  return result;
}

}  // namespace dopclust
