#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace gaselect;

namespace {

GenerativeSpec small_truth(std::size_t n, std::uint64_t seed) {
  GenerativeSpec s;
  s.predictors = {PredictorKind::numeric(), PredictorKind::binary(0.4), PredictorKind::numeric(),
                  PredictorKind::factor({0.5, 0.5})};
  s.mains = {{1, {1.0}}, {2, {0.8}}, {3, {-0.6}}};
  s.interactions = {{1, 3, {0.5}}};
  s.intercept = -1.0;
  s.n_rows = n;
  s.seed = seed;
  return s;
}

}  // namespace

TEST(CvFitness, TrueModelNearGenerativeAuc) {
  auto spec = small_truth(20000, 3);
  auto d = generate(spec);
  auto space = spec.space();
  auto folds = make_folds(d.n_rows(), 1);
  auto r = cv_fitness(d, space, spec.true_variables(), folds);
  EXPECT_NEAR(r.mean_auc, generative_auc(spec, 1000000), 0.02);
  EXPECT_EQ(r.fold_aucs.size(), 10u);
}

TEST(CvFitness, Deterministic) {
  auto spec = small_truth(2000, 4);
  auto d = generate(spec);
  auto folds = make_folds(d.n_rows(), 2);
  auto a = cv_fitness(d, spec.space(), {1, 3, 6}, folds);
  auto b = cv_fitness(d, spec.space(), {3, 6, 1}, folds);
  EXPECT_EQ(a, b);
  CvOptions threaded;
  threaded.threads = 4;
  EXPECT_EQ(a, cv_fitness(d, spec.space(), {1, 3, 6}, folds, threaded));
}

TEST(CvFitness, WarmStartDoesNotChangeResult) {
  auto spec = small_truth(3000, 5);
  auto d = generate(spec);
  auto folds = make_folds(d.n_rows(), 2);
  CvOptions cold;
  cold.warm_start = false;
  auto a = cv_fitness(d, spec.space(), spec.true_variables(), folds);
  auto b = cv_fitness(d, spec.space(), spec.true_variables(), folds, cold);
  for (std::size_t k = 0; k < a.fold_aucs.size(); ++k) EXPECT_NEAR(a.fold_aucs[k], b.fold_aucs[k], 1e-9);
}

TEST(CvFitness, RejectsEmptySelection) {
  auto spec = small_truth(200, 6);
  auto d = generate(spec);
  EXPECT_THROW(cv_fitness(d, spec.space(), {}, make_folds(200, 1)), std::invalid_argument);
}

TEST(CvFitness, SmrPooledOverFolds) {
  auto spec = small_truth(5000, 7);
  auto d = generate(spec);
  auto r = cv_fitness(d, spec.space(), spec.true_variables(), make_folds(5000, 3));
  EXPECT_LE(r.smr_low, r.smr);
  EXPECT_GE(r.smr_high, r.smr);
  EXPECT_NEAR(r.smr, 1.0, 0.1);
}
