#pragma once

// Slow, independent reference computations used to check the library.

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gaselect/gaselect.hpp"

namespace oracle {

/// Fraction of (positive, negative) pairs ranked correctly, ties counting half.
inline double pair_count_auc(const std::vector<double>& s, const std::vector<double>& y) {
  double good = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1.0) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0.0) continue;
      pairs += 1.0;
      if (s[i] > s[j]) good += 1.0;
      else if (s[i] == s[j]) good += 0.5;
    }
  }
  return good / pairs;
}

/// Rank of each |d| among nonzero |d|, ties averaged, by direct counting.
inline std::vector<double> counted_ranks(const std::vector<double>& absd) {
  std::vector<double> r(absd.size());
  for (std::size_t i = 0; i < absd.size(); ++i) {
    double below = 0.0, equal = 0.0;
    for (double v : absd) {
      if (v < absd[i]) below += 1.0;
      else if (v == absd[i]) equal += 1.0;
    }
    r[i] = below + (equal + 1.0) / 2.0;
  }
  return r;
}

/// Signed-rank p-value by enumerating all 2^m sign patterns of the nonzero
/// differences a - b. alt: 0 two-sided, 1 greater, 2 less.
inline double enumerated_wilcoxon(const std::vector<double>& a, const std::vector<double>& b, int alt) {
  std::vector<double> absd;
  double observed = 0.0;
  std::vector<bool> positive;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d == 0.0) continue;
    absd.push_back(std::fabs(d));
    positive.push_back(d > 0.0);
  }
  const auto r = counted_ranks(absd);
  double total = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    total += r[i];
    if (positive[i]) observed += r[i];
  }
  const std::size_t m = r.size();
  const std::uint64_t patterns = std::uint64_t{1} << m;
  std::uint64_t hits = 0;
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    double w = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      if (mask >> i & 1) w += r[i];
    bool extreme = false;
    if (alt == 1) extreme = w >= observed - 1e-9;
    else if (alt == 2) extreme = w <= observed + 1e-9;
    else extreme = std::fabs(2.0 * w - total) >= std::fabs(2.0 * observed - total) - 1e-9;
    if (extreme) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(patterns);
}

/// Bernoulli log-likelihood computed term by term.
inline double loglik(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& beta) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double eta = beta[0];
    for (Eigen::Index j = 0; j < x.cols(); ++j) eta += x(i, j) * beta[j + 1];
    const double p = 1.0 / (1.0 + std::exp(-eta));
    ll += y[i] == 1.0 ? std::log(p) : std::log1p(-p);
  }
  return ll;
}

/// Central-difference gradient of loglik.
inline Eigen::VectorXd fd_gradient(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& beta,
                                   double h = 1e-5) {
  Eigen::VectorXd g(beta.size());
  for (Eigen::Index k = 0; k < beta.size(); ++k) {
    Eigen::VectorXd hi = beta, lo = beta;
    hi[k] += h;
    lo[k] -= h;
    g[k] = (loglik(x, y, hi) - loglik(x, y, lo)) / (2.0 * h);
  }
  return g;
}

/// Inverse of the pair numbering by scanning every (i, j).
inline std::pair<int, int> scan_pair(int n_main, int v) {
  int k = n_main;
  for (int i = 1; i <= n_main; ++i)
    for (int j = i + 1; j <= n_main; ++j)
      if (++k == v) return {i, j};
  return {0, 0};
}

inline gaselect::Dataset parse(const std::string& csv, const std::vector<gaselect::ColumnSpec>& schema,
                               const std::string& missing = "") {
  std::istringstream in(csv);
  return gaselect::load_csv(in, schema, missing);
}

inline gaselect::ColumnSpec col(const std::string& name, gaselect::ColumnKind kind,
                                gaselect::ColumnRole role = gaselect::ColumnRole::predictor) {
  return {name, kind, {}, role, false};
}

}  // namespace oracle
