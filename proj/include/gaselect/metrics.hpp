#pragma once

// Fold construction, rank-based AUC, standardized mortality ratio and the
// Wilcoxon signed-rank test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "gaselect/common.hpp"

namespace gaselect {

inline constexpr int kFolds = 10;

/// Row-to-fold map with folds numbered 1..10.
struct FoldAssignment {
  std::size_t n = 0;
  std::vector<int> fold_of;
  std::uint64_t seed = 0;

  std::vector<std::size_t> test_rows(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < n; ++r)
      if (fold_of[r] == fold) out.push_back(r);
    return out;
  }
  std::vector<std::size_t> train_rows(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < n; ++r)
      if (fold_of[r] != fold) out.push_back(r);
    return out;
  }
  std::vector<std::size_t> fold_sizes() const {
    std::vector<std::size_t> sizes(kFolds, 0);
    for (int f : fold_of) ++sizes[static_cast<std::size_t>(f - 1)];
    return sizes;
  }
  bool operator==(const FoldAssignment&) const = default;
};

/// Random partition into ten folds: a seeded permutation of the rows is cut
/// so that folds 1-9 hold floor(n/10) rows each and fold 10 the rest.
inline FoldAssignment make_folds(std::size_t n, std::uint64_t seed) {
  if (n < 20) throw std::invalid_argument("make_folds: need at least 20 rows, got " + std::to_string(n));
  Rng rng(seed);
  auto perm = sample_without_replacement(rng, n, n);
  const std::size_t base = n / kFolds;
  FoldAssignment fa{n, std::vector<int>(n, kFolds), seed};
  for (std::size_t pos = 0; pos < base * (kFolds - 1); ++pos)
    fa.fold_of[perm[pos]] = static_cast<int>(pos / base) + 1;
  return fa;
}

namespace detail {

inline void check_labels(std::span<const double> labels, std::size_t& n_pos, std::size_t& n_neg) {
  n_pos = n_neg = 0;
  for (double l : labels) {
    if (l == 1.0) ++n_pos;
    else if (l == 0.0) ++n_neg;
    else throw std::invalid_argument("labels must be 0 or 1");
  }
}

/// 1-based ranks with ties sharing their average rank.
inline std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace detail

/// Mann-Whitney AUC: P(score_pos > score_neg) + 0.5 P(tie), via rank sums.
inline double auc(std::span<const double> scores, std::span<const double> labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("auc: length mismatch");
  std::size_t n_pos = 0, n_neg = 0;
  detail::check_labels(labels, n_pos, n_neg);
  if (n_pos == 0 || n_neg == 0) throw std::invalid_argument("auc: labels contain a single class");
  auto ranks = detail::average_ranks(scores);
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < ranks.size(); ++i)
    if (labels[i] == 1.0) rank_sum += ranks[i];
  const double np = static_cast<double>(n_pos);
  const double u = rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(n_neg));
}

struct SmrResult {
  double smr = 0.0;
  double low = 0.0;
  double high = 0.0;
  double observed = 0.0;
  double expected = 0.0;
};

/// Observed over expected events, with a 95% interval treating the observed
/// count as Poisson: (O -/+ 1.96 sqrt(O)) / E, lower end floored at 0.
inline SmrResult smr(std::span<const double> predicted, std::span<const double> labels) {
  if (predicted.size() != labels.size()) throw std::invalid_argument("smr: length mismatch");
  if (predicted.empty()) throw std::invalid_argument("smr: no observations");
  SmrResult r;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    r.observed += labels[i];
    r.expected += predicted[i];
  }
  if (!(r.expected > 0.0)) throw std::invalid_argument("smr: zero expected events");
  const double half = 1.96 * std::sqrt(r.observed);
  r.smr = r.observed / r.expected;
  r.low = std::max(0.0, r.observed - half) / r.expected;
  r.high = (r.observed + half) / r.expected;
  return r;
}

enum class Alternative { two_sided, greater, less };

/// Largest number of nonzero differences handled by exact enumeration.
inline constexpr std::size_t kWilcoxonExactLimit = 25;

/// Paired signed-rank test of a against b. Zero differences are dropped and
/// tied |differences| share average ranks. Up to 25 nonzero differences the
/// p-value is exact over all 2^m equally likely sign assignments (counted by
/// dynamic programming over doubled rank sums); beyond that a normal
/// approximation with tie and continuity corrections is used. `greater`
/// tests whether a tends to exceed b.
inline double wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                   Alternative alt = Alternative::two_sided) {
  if (a.size() != b.size()) throw std::invalid_argument("wilcoxon: length mismatch");
  std::vector<double> absdiff;
  std::vector<bool> positive;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d == 0.0) continue;
    absdiff.push_back(std::abs(d));
    positive.push_back(d > 0.0);
  }
  const std::size_t m = absdiff.size();
  if (m == 0) throw std::invalid_argument("wilcoxon: all paired differences are zero");

  auto ranks = detail::average_ranks(absdiff);
  // Average ranks are multiples of 1/2, so doubled ranks are integers.
  std::vector<long> r2(m);
  long total2 = 0, w2 = 0;
  for (std::size_t i = 0; i < m; ++i) {
    r2[i] = std::lround(2.0 * ranks[i]);
    total2 += r2[i];
    if (positive[i]) w2 += r2[i];
  }

  if (m > kWilcoxonExactLimit) {
    const double md = static_cast<double>(m);
    const double mean = md * (md + 1.0) / 4.0;
    double var = md * (md + 1.0) * (2.0 * md + 1.0) / 24.0;
    std::vector<double> sorted = absdiff;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < m;) {
      std::size_t j = i;
      while (j + 1 < m && sorted[j + 1] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i + 1);
      var -= (t * t * t - t) / 48.0;
      i = j + 1;
    }
    const double w = 0.5 * static_cast<double>(w2);
    const double sd = std::sqrt(var);
    switch (alt) {
      case Alternative::greater: return 1.0 - detail::normal_cdf((w - mean - 0.5) / sd);
      case Alternative::less: return detail::normal_cdf((w - mean + 0.5) / sd);
      case Alternative::two_sided: {
        const double z = (std::abs(w - mean) - 0.5) / sd;
        return std::min(1.0, 2.0 * (1.0 - detail::normal_cdf(std::max(z, 0.0))));
      }
    }
  }

  // counts[s] = number of sign assignments whose positive doubled-rank sum is s.
  std::vector<double> counts(static_cast<std::size_t>(total2) + 1, 0.0);
  counts[0] = 1.0;
  long reach = 0;
  for (long r : r2) {
    for (long s = reach; s >= 0; --s)
      if (counts[static_cast<std::size_t>(s)] != 0.0) counts[static_cast<std::size_t>(s + r)] += counts[static_cast<std::size_t>(s)];
    reach += r;
  }
  const double n_patterns = std::ldexp(1.0, static_cast<int>(m));
  double hits = 0.0;
  for (long s = 0; s <= total2; ++s) {
    const double c = counts[static_cast<std::size_t>(s)];
    if (c == 0.0) continue;
    bool extreme = false;
    switch (alt) {
      case Alternative::two_sided: extreme = std::labs(2 * s - total2) >= std::labs(2 * w2 - total2); break;
      case Alternative::greater: extreme = s >= w2; break;
      case Alternative::less: extreme = s <= w2; break;
    }
    if (extreme) hits += c;
  }
  return hits / n_patterns;
}

}  // namespace gaselect
