#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/binomial.hpp>

#include "oracles.hpp"

using namespace gaselect;

namespace {

VariableSpace space_of(int n) {
  std::vector<std::string> names;
  for (int k = 1; k <= n; ++k) names.push_back("v" + std::to_string(k));
  return VariableSpace(names);
}

void expect_valid(const Chromosome& c, const VariableSpace& s, const GaConfig& cfg) {
  auto err = check_chromosome(c, s, cfg);
  EXPECT_FALSE(err) << *err;
}

}  // namespace

TEST(Schedules, Endpoints) {
  GaConfig cfg;
  EXPECT_NEAR(crossover_prob(cfg, 0), 0.5, 1e-12);
  EXPECT_NEAR(crossover_prob(cfg, 250), 0.2, 1e-12);
  EXPECT_NEAR(crossover_prob(cfg, 125), 0.35, 1e-12);
  EXPECT_NEAR(mutation_prob(cfg, 0), 0.01, 1e-12);
  EXPECT_NEAR(mutation_prob(cfg, 250), 0.2, 1e-12);
  EXPECT_NEAR(mutation_prob(cfg, 125), 0.105, 1e-12);
  for (int i = 1; i <= 250; ++i) {
    EXPECT_LE(crossover_prob(cfg, i), crossover_prob(cfg, i - 1));
    EXPECT_GE(mutation_prob(cfg, i), mutation_prob(cfg, i - 1));
  }
}

TEST(Init, ForcedCountMainsOnly) {
  auto s = space_of(29);
  GaConfig cfg;
  cfg.min_vars = cfg.max_vars = 3;
  Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    auto c = init_chromosome(s, cfg, rng, std::vector<int>{1, 2, 3});
    EXPECT_EQ(c.variables(), (std::vector<int>{1, 2, 3}));
  }
  for (int t = 0; t < 200; ++t) expect_valid(init_chromosome(s, cfg, rng), s, cfg);
}

TEST(Init, RepairInsertsMissingMains) {
  auto s = space_of(29);
  GaConfig cfg;
  cfg.min_vars = 1;
  cfg.max_vars = 5;
  Rng rng(2);
  const int v = s.index_of_pair(2, 4);
  auto c = init_chromosome(s, cfg, rng, std::vector<int>{v});
  EXPECT_TRUE(c.contains(2));
  EXPECT_TRUE(c.contains(4));
  EXPECT_TRUE(c.contains(v));
  expect_valid(c, s, cfg);
}

TEST(Init, CountsUniformAndBounded) {
  auto s = space_of(25);
  GaConfig cfg;
  Rng rng(3);
  const int lo = cfg.min_vars, hi = cfg.max_vars;
  std::vector<double> freq(static_cast<std::size_t>(hi - lo + 1), 0.0);
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    int drawn = 0;
    auto c = init_chromosome(s, cfg, rng, {}, &drawn);
    ASSERT_GE(drawn, lo);
    ASSERT_LE(drawn, hi);
    freq[static_cast<std::size_t>(drawn - lo)] += 1.0;
    expect_valid(c, s, cfg);
  }
  const double expected = static_cast<double>(trials) / static_cast<double>(freq.size());
  double chi2 = 0.0;
  for (double f : freq) chi2 += (f - expected) * (f - expected) / expected;
  boost::math::chi_squared dist(static_cast<double>(freq.size() - 1));
  EXPECT_GT(boost::math::cdf(boost::math::complement(dist, chi2)), 0.001);
}

TEST(Tournament, BestEntrantWins) {
  GaConfig cfg;
  cfg.population_size = 5;
  cfg.tournament_size = 5;
  std::vector<double> f{0.1, 0.9, 0.3, 0.9, 0.2};
  Rng rng(4);
  for (int t = 0; t < 20; ++t) EXPECT_EQ(tournament_select(f, cfg, rng), 1u);
  std::vector<double> flat(5, 0.7);
  EXPECT_EQ(tournament_select(flat, cfg, rng), 0u);
  cfg.tournament_size = 2;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng a(seed), b(seed);
    EXPECT_EQ(tournament_select(flat, cfg, a), tournament_select(flat, cfg, b));
  }
}

TEST(Tournament, FrequencyMonotoneInRank) {
  GaConfig cfg;
  const std::size_t n = 30, k = static_cast<std::size_t>(cfg.tournament_size);
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = static_cast<double>((i * 7) % n);
  std::vector<double> wins(n, 0.0);
  Rng rng(5);
  const int trials = 100000;
  for (int t = 0; t < trials; ++t) wins[static_cast<std::size_t>(f[tournament_select(f, cfg, rng)])] += 1.0;

  // Rank r (0 = worst) wins exactly when it is the best of its draw:
  // C(r, k-1) / C(n, k).
  double chi2 = 0.0;
  int cells = 0;
  for (std::size_t r = 0; r < n; ++r) {
    const double p = r + 1 < k ? 0.0
                               : boost::math::binomial_coefficient<double>(static_cast<unsigned>(r), static_cast<unsigned>(k - 1)) /
                                     boost::math::binomial_coefficient<double>(static_cast<unsigned>(n), static_cast<unsigned>(k));
    const double e = p * trials;
    if (e < 5.0) continue;
    chi2 += (wins[r] - e) * (wins[r] - e) / e;
    ++cells;
  }
  boost::math::chi_squared dist(cells - 1);
  EXPECT_GT(boost::math::cdf(boost::math::complement(dist, chi2)), 0.001);

  for (std::size_t block = 1; block < n / 5; ++block) {
    double lo = 0.0, hi = 0.0;
    for (std::size_t r = 0; r < 5; ++r) {
      lo += wins[(block - 1) * 5 + r];
      hi += wins[block * 5 + r];
    }
    EXPECT_GE(hi, lo);
  }
  for (std::size_t r = n - 5; r < n; ++r) EXPECT_GT(wins[r], wins[r - 1]);
}

TEST(Crossover, MidpointTrace) {
  auto s = space_of(5);
  GaConfig cfg;
  cfg.min_vars = 1;
  cfg.max_vars = 4;
  Chromosome a{{1, 2, 0, 0}}, b{{0, 0, 1, 3}};
  Rng rng(6);
  auto [c1, c2] = crossover(a, b, s, cfg, rng);
  EXPECT_EQ(c1.genes, (std::vector<int>{1, 2, 0, 3}));
  // The second child [0,0,0,0] is empty and gets padded back to min_vars.
  expect_valid(c2, s, cfg);
  auto [d1, d2] = crossover(a, a, s, cfg, rng);
  EXPECT_EQ(d1, a);
  EXPECT_EQ(d2, a);
}

TEST(Crossover, FuzzKeepsInvariants) {
  auto s = space_of(25);
  GaConfig cfg;
  Rng rng(7);
  for (int t = 0; t < 1000; ++t) {
    auto a = init_chromosome(s, cfg, rng), b = init_chromosome(s, cfg, rng);
    auto [c1, c2] = crossover(a, b, s, cfg, rng);
    expect_valid(c1, s, cfg);
    expect_valid(c2, s, cfg);
  }
}

TEST(Mutate, ZeroProbabilityIsIdentity) {
  auto s = space_of(25);
  GaConfig cfg;
  Rng rng(8);
  auto c = init_chromosome(s, cfg, rng);
  EXPECT_EQ(mutate(c, s, cfg, 0.0, 0.0, rng), c);
}

TEST(Mutate, DeletingMainCascades) {
  auto s = space_of(10);
  GaConfig cfg;
  cfg.min_vars = 1;
  cfg.max_vars = 3;
  const int v = s.index_of_pair(3, 7);
  // Keep drawing until the deletion lands on main 3.
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    MutationOutcome o;
    auto out = mutate(Chromosome{{3, 7, v}}, s, cfg, 0.0, 1.0, rng, &o);
    ASSERT_TRUE(o.deleted);
    if (!out.contains(3)) {
      EXPECT_EQ(out.variables(), (std::vector<int>{7}));
      return;
    }
  }
  FAIL() << "deletion never chose main 3";
}

TEST(Mutate, RatesAndInvariants) {
  auto s = space_of(25);
  GaConfig cfg;
  Rng rng(9);
  int del = 0, add = 0;
  std::vector<Chromosome> pool;
  for (int k = 0; k < 50; ++k) pool.push_back(init_chromosome(s, cfg, rng));
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    auto& c = pool[static_cast<std::size_t>(t % 50)];
    MutationOutcome o;
    c = mutate(c, s, cfg, 0.5, 0.5, rng, &o);
    del += o.deleted;
    add += o.added;
    expect_valid(c, s, cfg);
  }
  EXPECT_NEAR(del / static_cast<double>(trials), 0.5, 0.02);
  EXPECT_NEAR(add / static_cast<double>(trials), 0.5, 0.02);
}

namespace {

struct Bench {
  GenerativeSpec spec;
  Dataset data;
  VariableSpace space;
  FoldAssignment folds;
};

Bench small_bench() {
  GenerativeSpec s;
  for (int k = 0; k < 4; ++k) s.predictors.push_back(PredictorKind::binary(0.4));
  for (int k = 0; k < 4; ++k) s.predictors.push_back(PredictorKind::numeric());
  s.mains = {{1, {0.7}}, {5, {0.9}}, {6, {-0.7}}};
  s.interactions = {{5, 6, {0.8}}};
  s.intercept = -1.2;
  s.n_rows = 1500;
  s.seed = 77;
  Dataset d = generate(s);
  auto space = s.space();
  auto folds = make_folds(d.n_rows(), 5);
  return {s, d, space, folds};
}

GaConfig small_cfg() {
  GaConfig cfg;
  cfg.population_size = 10;
  cfg.min_vars = 2;
  cfg.max_vars = 12;
  cfg.max_generations = 6;
  cfg.tournament_size = 4;
  cfg.seed = 3;
  cfg.n_restarts = 2;
  return cfg;
}

}  // namespace

TEST(Evolve, ZeroGenerationsIsBestInitial) {
  auto b = small_bench();
  auto cfg = small_cfg();
  cfg.max_generations = 0;
  double best_seen = -1.0;
  EvolveOptions opt;
  opt.observer = [&](int, const std::vector<Chromosome>&, const std::vector<double>& f) {
    best_seen = *std::max_element(f.begin(), f.end());
  };
  auto r = evolve(b.data, b.space, cfg, b.folds, opt);
  EXPECT_EQ(r.history.size(), 1u);
  EXPECT_EQ(r.best_fitness.mean_auc, best_seen);
}

TEST(Evolve, EliteNonDecreasingAndInvariants) {
  auto b = small_bench();
  auto cfg = small_cfg();
  int violations = 0;
  EvolveOptions opt;
  opt.observer = [&](int, const std::vector<Chromosome>& pop, const std::vector<double>&) {
    for (const auto& c : pop) violations += check_chromosome(c, b.space, cfg).has_value();
  };
  auto r = evolve(b.data, b.space, cfg, b.folds, opt);
  EXPECT_EQ(violations, 0);
  ASSERT_EQ(r.history.size(), 7u);
  for (std::size_t g = 1; g < r.history.size(); ++g) EXPECT_GE(r.history[g].best_auc, r.history[g - 1].best_auc);
  EXPECT_EQ(r.best_fitness.mean_auc, r.history.back().best_auc);
}

TEST(Evolve, DeterministicAcrossThreads) {
  auto b = small_bench();
  auto cfg = small_cfg();
  EvolveOptions one, four;
  four.threads = 4;
  EXPECT_EQ(evolve(b.data, b.space, cfg, b.folds, one), evolve(b.data, b.space, cfg, b.folds, four));
}

TEST(MultiStart, SingleRestartEqualsEvolve) {
  auto b = small_bench();
  auto cfg = small_cfg();
  cfg.n_restarts = 1;
  EXPECT_EQ(multi_start(b.data, b.space, cfg, b.folds), evolve(b.data, b.space, cfg, b.folds));
}

TEST(MultiStart, ReturnsBestOfSeeds) {
  auto b = small_bench();
  auto cfg = small_cfg();
  cfg.n_restarts = 3;
  auto r = multi_start(b.data, b.space, cfg, b.folds);
  double best = -1.0;
  for (int k = 0; k < 3; ++k) {
    auto c = cfg;
    c.seed = cfg.seed + static_cast<std::uint64_t>(k);
    best = std::max(best, evolve(b.data, b.space, c, b.folds).best_fitness.mean_auc);
  }
  EXPECT_EQ(r.best_fitness.mean_auc, best);
  EXPECT_EQ(r, multi_start(b.data, b.space, cfg, b.folds));
}
