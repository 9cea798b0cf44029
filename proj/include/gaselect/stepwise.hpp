#pragma once

// Bidirectional stepwise selection over main effects by AIC, the baseline
// the GA is compared against.

#include <algorithm>
#include <limits>
#include <string_view>
#include <vector>

#include "gaselect/cv.hpp"
#include "gaselect/design.hpp"
#include "gaselect/logit.hpp"

namespace gaselect {

enum class StepAction { start, add, drop };

inline std::string_view to_string(StepAction a) {
  switch (a) {
    case StepAction::start: return "start";
    case StepAction::add: return "add";
    case StepAction::drop: return "drop";
  }
  return "?";
}

struct StepwiseStep {
  int step = 0;
  StepAction action = StepAction::start;
  int variable = 0;
  double aic = 0.0;
  bool operator==(const StepwiseStep&) const = default;
};

struct StepwiseResult {
  std::vector<int> selected;
  std::vector<StepwiseStep> trace;
  FitnessReport fitness;
  bool operator==(const StepwiseResult&) const = default;
};

struct StepwiseOptions {
  unsigned threads = 1;
  FitOptions fit;
  CvOptions cv;
};

namespace detail {

inline double aic_of(const Dataset& d, const VariableSpace& space, const std::vector<int>& vars, const FitOptions& f) {
  FitOptions opt = f;
  opt.compute_std_errors = false;
  const DesignMatrix m = vars.empty() ? intercept_only_design(d) : expand(d, space, vars);
  return aic(fit(m, opt));
}

}  // namespace detail

/// Starts from the intercept-only model; each step tries every single
/// addition and deletion of a main effect on the full data and commits the
/// lowest-AIC move if it strictly improves. The selected set is then scored
/// with the shared folds.
inline StepwiseResult stepwise_aic(const Dataset& d, const VariableSpace& space, const FoldAssignment& folds,
                                   const StepwiseOptions& opt = {}) {
  StepwiseResult res;
  std::vector<int> current;
  double current_aic = detail::aic_of(d, space, current, opt.fit);
  res.trace.push_back({0, StepAction::start, 0, current_aic});

  for (int step = 1;; ++step) {
    struct Move {
      StepAction action;
      int variable;
      std::vector<int> vars;
    };
    std::vector<Move> moves;
    for (int v = 1; v <= space.n_main(); ++v) {
      auto it = std::find(current.begin(), current.end(), v);
      std::vector<int> vars = current;
      if (it == current.end()) {
        vars.push_back(v);
        std::sort(vars.begin(), vars.end());
        moves.push_back({StepAction::add, v, std::move(vars)});
      } else {
        vars.erase(vars.begin() + (it - current.begin()));
        moves.push_back({StepAction::drop, v, std::move(vars)});
      }
    }
    std::vector<double> scores(moves.size());
    parallel_for(moves.size(), opt.threads,
                 [&](std::size_t k) { scores[k] = detail::aic_of(d, space, moves[k].vars, opt.fit); });

    std::size_t best = 0;
    for (std::size_t k = 1; k < scores.size(); ++k)
      if (scores[k] < scores[best]) best = k;
    if (moves.empty() || !(scores[best] < current_aic)) break;
    current = moves[best].vars;
    current_aic = scores[best];
    res.trace.push_back({step, moves[best].action, moves[best].variable, current_aic});
  }

  res.selected = current;
  if (current.empty()) {
    res.fitness = cross_validate(intercept_only_design(d), folds, opt.cv);
  } else {
    res.fitness = cv_fitness(d, space, current, folds, opt.cv);
  }
  res.fitness.selected = current;
  return res;
}

}  // namespace gaselect
