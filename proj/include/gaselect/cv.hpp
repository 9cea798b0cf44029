#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "gaselect/design.hpp"
#include "gaselect/logit.hpp"
#include "gaselect/metrics.hpp"

namespace gaselect {

struct FitnessReport {
  std::vector<int> selected;
  std::vector<double> fold_aucs;
  double mean_auc = 0.0;
  double smr = 0.0;
  double smr_low = 0.0;
  double smr_high = 0.0;
  bool operator==(const FitnessReport&) const = default;
};

struct CvOptions {
  /// Workers for the ten fold fits. Results do not depend on this.
  unsigned threads = 1;
  /// Start each fold fit from the full-data estimate, holding the
  /// information matrix at that point (full IRLS is the fallback). When
  /// off, every fold is fitted by IRLS from zero.
  bool warm_start = true;
  FitOptions fit;
};

/// Ten-fold evaluation of an already-expanded design: fit on nine folds,
/// score the held-out fold, repeat. SMR pools all out-of-fold predictions.
inline FitnessReport cross_validate(const DesignMatrix& design, const FoldAssignment& folds,
                                    const CvOptions& opt = {}) {
  if (static_cast<std::size_t>(design.n_rows()) != folds.n)
    throw std::invalid_argument("cross_validate: fold assignment does not match row count");

  FitOptions fit_opt = opt.fit;
  fit_opt.compute_std_errors = false;
  detail::check_inputs(design.x, design.y);
  const Eigen::MatrixXd xa = detail::with_intercept(design.x);

  Eigen::VectorXd start;
  Eigen::VectorXd p_full;
  Eigen::MatrixXd info_full;
  if (opt.warm_start) {
    start = detail::fit_augmented(xa, design.y, fit_opt).coefficients;
    p_full = detail::probabilities(xa, start);
    info_full = detail::information(xa, p_full, fit_opt.ridge);
  }

  FitnessReport report;
  report.fold_aucs.assign(kFolds, 0.0);
  Eigen::VectorXd oof(design.n_rows());
  parallel_for(kFolds, opt.threads, [&](std::size_t f) {
    const int fold = static_cast<int>(f) + 1;
    std::vector<Eigen::Index> train, test;
    for (std::size_t r = 0; r < folds.n; ++r)
      (folds.fold_of[r] == fold ? test : train).push_back(static_cast<Eigen::Index>(r));
    const Eigen::MatrixXd xa_train = xa(train, Eigen::all);
    const Eigen::VectorXd y_train = design.y(train);
    if (y_train.minCoeff() == y_train.maxCoeff())
      throw std::invalid_argument("cross_validate: training split for fold " + std::to_string(fold) +
                                  " has a single outcome class");
    const Eigen::MatrixXd xa_test = xa(test, Eigen::all);
    FittedModel m;
    if (opt.warm_start) {
      // Training information at the full-data estimate: the full matrix
      // minus the held-out rows' share.
      const Eigen::VectorXd p_test = p_full(test);
      Eigen::MatrixXd info = info_full - detail::information(xa_test, p_test, 0.0);
      m = detail::fit_fixed_information(xa_train, y_train, info, start, fit_opt);
      if (!m.converged) m = detail::fit_augmented(xa_train, y_train, fit_opt, &start);
    } else {
      m = detail::fit_augmented(xa_train, y_train, fit_opt);
    }
    const Eigen::VectorXd p = detail::probabilities(xa_test, m.coefficients);
    const Eigen::VectorXd y_test = design.y(test);
    for (std::size_t i = 0; i < test.size(); ++i) oof[test[i]] = p[static_cast<Eigen::Index>(i)];
    report.fold_aucs[f] = auc(std::span<const double>(p.data(), static_cast<std::size_t>(p.size())),
                              std::span<const double>(y_test.data(), static_cast<std::size_t>(y_test.size())));
  });

  double sum = 0.0;
  for (double a : report.fold_aucs) sum += a;
  report.mean_auc = sum / kFolds;
  auto s = smr(std::span<const double>(oof.data(), static_cast<std::size_t>(oof.size())),
               std::span<const double>(design.y.data(), static_cast<std::size_t>(design.y.size())));
  report.smr = s.smr;
  report.smr_low = s.low;
  report.smr_high = s.high;
  return report;
}

/// Cross-validated fitness of a non-empty, hierarchy-respecting variable set.
inline FitnessReport cv_fitness(const Dataset& d, const VariableSpace& space, const std::vector<int>& selected,
                                const FoldAssignment& folds, const CvOptions& opt = {}) {
  if (selected.empty()) throw std::invalid_argument("cv_fitness: empty variable set");
  FitnessReport r = cross_validate(expand(d, space, selected), folds, opt);
  r.selected = selected;
  std::sort(r.selected.begin(), r.selected.end());
  return r;
}

}  // namespace gaselect
