#pragma once

// Genetic-algorithm variable selection over main effects and pairwise
// interactions.
//
// A chromosome is a fixed-length vector of slots; a slot holds a variable
// index from the VariableSpace or 0 (a "dummy" slot reserving room for a
// future variable). Every operator leaves chromosomes with distinct
// variables, between min_vars and max_vars of them, and strong hierarchy
// (an interaction is present only together with both of its main effects).
//
// All randomness comes from one Rng per run, consumed in this order:
//   init:       count, slot positions, variables, hierarchy-repair slots,
//               padding additions
//   generation: forced elite mutation; then per fill step tournament A,
//               tournament B (one redraw of B if it equals A), crossover
//               coin, crossover repairs/padding; then mutation of members
//               2..P-1 in order
//   mutate:     deletion coin, addition coin, deletion slot, addition slot,
//               addition variable, parent slots
// Fitness evaluation draws nothing, so parallel evaluation cannot change a
// run.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gaselect/common.hpp"
#include "gaselect/cv.hpp"
#include "gaselect/design.hpp"

namespace gaselect {

struct GaConfig {
  int population_size = 30;
  int min_vars = 5;
  int max_vars = 100;
  int max_generations = 250;
  double p_c_max = 0.5;
  double p_c_min = 0.2;
  double p_m_min = 0.01;
  double p_m_max = 0.2;
  int tournament_size = 10;
  std::uint64_t seed = 1;
  int n_restarts = 5;

  void validate() const {
    if (population_size < 2) throw std::invalid_argument("GaConfig: population_size must be >= 2");
    if (min_vars < 1 || min_vars > max_vars) throw std::invalid_argument("GaConfig: need 1 <= min_vars <= max_vars");
    if (max_generations < 0) throw std::invalid_argument("GaConfig: max_generations must be >= 0");
    if (!(0.0 <= p_c_min && p_c_min <= p_c_max && p_c_max <= 1.0))
      throw std::invalid_argument("GaConfig: need 0 <= p_c_min <= p_c_max <= 1");
    if (!(0.0 <= p_m_min && p_m_min <= p_m_max && p_m_max <= 1.0))
      throw std::invalid_argument("GaConfig: need 0 <= p_m_min <= p_m_max <= 1");
    if (tournament_size < 1 || tournament_size > population_size)
      throw std::invalid_argument("GaConfig: need 1 <= tournament_size <= population_size");
    if (n_restarts < 1) throw std::invalid_argument("GaConfig: n_restarts must be >= 1");
  }

  void validate(const VariableSpace& space) const {
    validate();
    if (space.total() < min_vars)
      throw std::invalid_argument("GaConfig: min_vars exceeds the number of candidate variables");
  }
};

/// Crossover probability for generation i: linear from p_c_max down to p_c_min.
inline double crossover_prob(const GaConfig& cfg, int i) {
  if (cfg.max_generations == 0) return cfg.p_c_max;
  const double t = static_cast<double>(i) / static_cast<double>(cfg.max_generations);
  return cfg.p_c_max - t * (cfg.p_c_max - cfg.p_c_min);
}

/// Mutation probability for generation i: linear from p_m_min up to p_m_max.
/// Used for both addition and deletion.
inline double mutation_prob(const GaConfig& cfg, int i) {
  if (cfg.max_generations == 0) return cfg.p_m_min;
  const double t = static_cast<double>(i) / static_cast<double>(cfg.max_generations);
  return cfg.p_m_min + t * (cfg.p_m_max - cfg.p_m_min);
}

struct Chromosome {
  std::vector<int> genes;

  int count() const {
    return static_cast<int>(std::count_if(genes.begin(), genes.end(), [](int g) { return g != 0; }));
  }
  bool contains(int v) const { return std::find(genes.begin(), genes.end(), v) != genes.end(); }
  /// Included variables in ascending order; equal sets compare equal no
  /// matter which slots hold them.
  std::vector<int> variables() const {
    std::vector<int> out;
    for (int g : genes)
      if (g != 0) out.push_back(g);
    std::sort(out.begin(), out.end());
    return out;
  }
  bool operator==(const Chromosome&) const = default;
};

/// Describes the first invariant violation, or nullopt when c is valid.
inline std::optional<std::string> check_chromosome(const Chromosome& c, const VariableSpace& space,
                                                   const GaConfig& cfg) {
  if (static_cast<int>(c.genes.size()) != cfg.max_vars) return "length differs from max_vars";
  std::set<int> seen;
  for (int g : c.genes) {
    if (g == 0) continue;
    if (!space.contains(g)) return "unknown variable index " + std::to_string(g);
    if (!seen.insert(g).second) return "duplicate variable " + std::to_string(g);
  }
  const int n = c.count();
  if (n < cfg.min_vars || n > cfg.max_vars) return "variable count " + std::to_string(n) + " out of bounds";
  for (int g : seen) {
    if (!space.is_interaction(g)) continue;
    auto [i, j] = space.pair_of(g);
    if (!seen.count(i) || !seen.count(j)) return "interaction " + std::to_string(g) + " lacks a main effect";
  }
  return std::nullopt;
}

namespace detail {

inline std::vector<std::size_t> dummy_slots(const Chromosome& c) {
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < c.genes.size(); ++s)
    if (c.genes[s] == 0) out.push_back(s);
  return out;
}

inline std::vector<int> missing_parents(const Chromosome& c, const VariableSpace& space, int v) {
  std::vector<int> out;
  if (!space.is_interaction(v)) return out;
  auto [i, j] = space.pair_of(v);
  if (!c.contains(i)) out.push_back(i);
  if (!c.contains(j)) out.push_back(j);
  return out;
}

/// Puts each of `mains` into a uniformly chosen dummy slot. Caller checks
/// that enough dummy slots exist.
inline void insert_mains(Chromosome& c, const std::vector<int>& mains, Rng& rng) {
  for (int m : mains) {
    auto dummies = dummy_slots(c);
    c.genes[dummies[uniform_index(rng, dummies.size())]] = m;
  }
}

/// Left-to-right pass inserting missing main effects for every interaction.
/// An interaction whose parents do not fit in the remaining dummy slots is
/// removed instead. Returns the number of interactions removed.
inline int repair_hierarchy(Chromosome& c, const VariableSpace& space, Rng& rng) {
  int rolled_back = 0;
  for (std::size_t s = 0; s < c.genes.size(); ++s) {
    const int g = c.genes[s];
    if (!space.is_interaction(g)) continue;
    auto missing = missing_parents(c, space, g);
    if (missing.empty()) continue;
    if (missing.size() > dummy_slots(c).size()) {
      c.genes[s] = 0;
      ++rolled_back;
      continue;
    }
    insert_mains(c, missing, rng);
  }
  return rolled_back;
}

/// Addition mutation. Returns false (leaving c unchanged) when there is no
/// dummy slot, no absent variable, or the drawn interaction's parents do not
/// fit.
inline bool add_variable(Chromosome& c, const VariableSpace& space, Rng& rng) {
  auto dummies = dummy_slots(c);
  if (dummies.empty()) return false;
  const std::size_t slot = dummies[uniform_index(rng, dummies.size())];
  std::set<int> present(c.genes.begin(), c.genes.end());
  std::vector<int> absent;
  for (int v = 1; v <= space.total(); ++v)
    if (!present.count(v)) absent.push_back(v);
  if (absent.empty()) return false;
  const int v = absent[uniform_index(rng, absent.size())];
  auto missing = missing_parents(c, space, v);
  if (missing.size() > dummies.size() - 1) return false;
  c.genes[slot] = v;
  insert_mains(c, missing, rng);
  return true;
}

/// Deletion mutation. Deleting a main effect also deletes every interaction
/// that contains it; the deletion is skipped if the result would fall below
/// min_vars.
inline bool delete_variable(Chromosome& c, const VariableSpace& space, const GaConfig& cfg, Rng& rng) {
  std::vector<std::size_t> filled;
  for (std::size_t s = 0; s < c.genes.size(); ++s)
    if (c.genes[s] != 0) filled.push_back(s);
  if (filled.empty()) return false;
  const std::size_t slot = filled[uniform_index(rng, filled.size())];
  const int v = c.genes[slot];
  std::vector<std::size_t> doomed{slot};
  if (space.is_main(v)) {
    for (std::size_t s : filled) {
      const int g = c.genes[s];
      if (!space.is_interaction(g)) continue;
      auto [i, j] = space.pair_of(g);
      if (i == v || j == v) doomed.push_back(s);
    }
  }
  if (c.count() - static_cast<int>(doomed.size()) < cfg.min_vars) return false;
  for (auto s : doomed) c.genes[s] = 0;
  return true;
}

inline void pad_to_min(Chromosome& c, const VariableSpace& space, const GaConfig& cfg, Rng& rng) {
  for (int attempts = 0; c.count() < cfg.min_vars; ++attempts) {
    if (attempts > 100000) throw std::logic_error("pad_to_min: cannot reach min_vars");
    add_variable(c, space, rng);
  }
}

inline void drop_duplicates(Chromosome& c) {
  std::set<int> seen;
  for (int& g : c.genes)
    if (g != 0 && !seen.insert(g).second) g = 0;
}

}  // namespace detail

/// New random chromosome. The drawn variable count is uniform on
/// [min_vars, min(max_vars, total)]; hierarchy repair may then add main
/// effects (or drop interactions that cannot fit). A non-empty `preseed`
/// replaces the random variable draw. `drawn_count`, when given, receives
/// the pre-repair count.
inline Chromosome init_chromosome(const VariableSpace& space, const GaConfig& cfg, Rng& rng,
                                  std::span<const int> preseed = {}, int* drawn_count = nullptr) {
  cfg.validate(space);
  const auto len = static_cast<std::size_t>(cfg.max_vars);
  Chromosome c{std::vector<int>(len, 0)};
  std::vector<int> vars;
  if (!preseed.empty()) {
    std::set<int> uniq(preseed.begin(), preseed.end());
    if (uniq.size() != preseed.size()) throw std::invalid_argument("init_chromosome: duplicate pre-seeded variable");
    for (int v : preseed)
      if (!space.contains(v)) throw std::invalid_argument("init_chromosome: unknown pre-seeded variable");
    if (preseed.size() > len) throw std::invalid_argument("init_chromosome: pre-seed exceeds max_vars");
    vars.assign(preseed.begin(), preseed.end());
  } else {
    const int hi = std::min(cfg.max_vars, space.total());
    const int count = cfg.min_vars + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(hi - cfg.min_vars + 1)));
    vars.resize(static_cast<std::size_t>(count));
    auto slots = sample_without_replacement(rng, len, vars.size());
    auto picks = sample_without_replacement(rng, static_cast<std::size_t>(space.total()), vars.size());
    for (std::size_t k = 0; k < vars.size(); ++k) c.genes[slots[k]] = static_cast<int>(picks[k]) + 1;
    if (drawn_count) *drawn_count = count;
    detail::repair_hierarchy(c, space, rng);
    detail::pad_to_min(c, space, cfg, rng);
    return c;
  }
  if (drawn_count) *drawn_count = static_cast<int>(vars.size());
  auto slots = sample_without_replacement(rng, len, vars.size());
  for (std::size_t k = 0; k < vars.size(); ++k) c.genes[slots[k]] = vars[k];
  if (detail::repair_hierarchy(c, space, rng) > 0)
    throw std::invalid_argument("init_chromosome: pre-seed exceeds max_vars after hierarchy repair");
  detail::pad_to_min(c, space, cfg, rng);
  return c;
}

/// Index of the fittest of tournament_size members sampled without
/// replacement; ties go to the lower population index.
inline std::size_t tournament_select(std::span<const double> fitness, const GaConfig& cfg, Rng& rng) {
  if (fitness.empty()) throw std::invalid_argument("tournament_select: empty population");
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(cfg.tournament_size), fitness.size());
  auto entrants = sample_without_replacement(rng, fitness.size(), k);
  std::size_t best = entrants.front();
  for (auto e : entrants)
    if (fitness[e] > fitness[best] || (fitness[e] == fitness[best] && e < best)) best = e;
  return best;
}

/// Single-point crossover at slot floor(L/2). Within each child the later
/// copy of a duplicated variable becomes a dummy; hierarchy is then repaired
/// and children below min_vars are padded with addition mutations.
inline std::pair<Chromosome, Chromosome> crossover(const Chromosome& a, const Chromosome& b,
                                                   const VariableSpace& space, const GaConfig& cfg, Rng& rng) {
  if (a.genes.size() != b.genes.size()) throw std::invalid_argument("crossover: length mismatch");
  const std::size_t point = a.genes.size() / 2;
  Chromosome c1 = a, c2 = b;
  std::copy(b.genes.begin() + static_cast<std::ptrdiff_t>(point), b.genes.end(),
            c1.genes.begin() + static_cast<std::ptrdiff_t>(point));
  std::copy(a.genes.begin() + static_cast<std::ptrdiff_t>(point), a.genes.end(),
            c2.genes.begin() + static_cast<std::ptrdiff_t>(point));
  for (Chromosome* c : {&c1, &c2}) {
    detail::drop_duplicates(*c);
    detail::repair_hierarchy(*c, space, rng);
    detail::pad_to_min(*c, space, cfg, rng);
  }
  return {std::move(c1), std::move(c2)};
}

struct MutationOutcome {
  bool deleted = false;
  bool added = false;
};

/// Deletion with probability p_del, then addition with probability p_add;
/// both may happen, swapping one variable for another.
inline Chromosome mutate(const Chromosome& c, const VariableSpace& space, const GaConfig& cfg, double p_add,
                         double p_del, Rng& rng, MutationOutcome* outcome = nullptr) {
  const bool try_delete = uniform01(rng) < p_del;
  const bool try_add = uniform01(rng) < p_add;
  Chromosome out = c;
  MutationOutcome o;
  if (try_delete) o.deleted = detail::delete_variable(out, space, cfg, rng);
  if (try_add) o.added = detail::add_variable(out, space, rng);
  if (outcome) *outcome = o;
  return out;
}

struct GenerationRecord {
  int generation = 0;
  double best_auc = 0.0;
  double mean_auc = 0.0;
  double p_c = 0.0;
  double p_m = 0.0;
  std::vector<int> best_variables;
  bool operator==(const GenerationRecord&) const = default;
};

struct GaResult {
  Chromosome best;
  FitnessReport best_fitness;
  std::vector<GenerationRecord> history;
  std::uint64_t seed_used = 0;
  bool operator==(const GaResult&) const = default;
};

/// Memo of fitness by sorted variable set. Valid for one (dataset, folds) pair.
using FitnessCache = std::map<std::vector<int>, FitnessReport>;

struct EvolveOptions {
  /// Workers for fitness evaluation within a generation.
  unsigned threads = 1;
  /// Optional shared memo; a private one is used when null.
  FitnessCache* cache = nullptr;
  /// Called once per generation with the evaluated population.
  std::function<void(int, const std::vector<Chromosome>&, const std::vector<double>&)> observer;
  /// Variables for the first member of the initial population.
  std::vector<int> preseed;
  CvOptions cv;
};

namespace detail {

inline std::vector<double> evaluate_population(const std::vector<Chromosome>& pop, const Dataset& d,
                                               const VariableSpace& space, const FoldAssignment& folds,
                                               FitnessCache& cache, const EvolveOptions& opt) {
  std::vector<std::vector<int>> pending;
  std::set<std::vector<int>> queued;
  for (const auto& c : pop) {
    auto key = c.variables();
    if (!cache.count(key) && queued.insert(key).second) pending.push_back(std::move(key));
  }
  std::vector<FitnessReport> fresh(pending.size());
  CvOptions cv = opt.cv;
  cv.threads = 1;
  parallel_for(pending.size(), opt.threads,
               [&](std::size_t k) { fresh[k] = cv_fitness(d, space, pending[k], folds, cv); });
  for (std::size_t k = 0; k < pending.size(); ++k) cache.emplace(pending[k], std::move(fresh[k]));

  std::vector<double> fitness;
  fitness.reserve(pop.size());
  for (const auto& c : pop) fitness.push_back(cache.at(c.variables()).mean_auc);
  return fitness;
}

inline std::size_t argmax(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

}  // namespace detail

/// One GA run seeded with cfg.seed. Each generation: evaluate (memoized),
/// record history, then build the next population from the elite, one
/// forced mutation of the elite, and tournament-selected parent pairs that
/// undergo crossover with probability p_c(i); every member after the first
/// two is then mutated with p_add = p_del = p_m(i).
inline GaResult evolve(const Dataset& d, const VariableSpace& space, const GaConfig& cfg,
                       const FoldAssignment& folds, const EvolveOptions& opt = {}) {
  cfg.validate(space);
  Rng rng(cfg.seed);
  FitnessCache local_cache;
  FitnessCache& cache = opt.cache ? *opt.cache : local_cache;

  std::vector<Chromosome> pop;
  pop.reserve(static_cast<std::size_t>(cfg.population_size));
  for (int k = 0; k < cfg.population_size; ++k)
    pop.push_back(init_chromosome(space, cfg, rng, k == 0 ? std::span<const int>(opt.preseed) : std::span<const int>{}));

  GaResult result;
  result.seed_used = cfg.seed;
  for (int gen = 0;; ++gen) {
    auto fitness = detail::evaluate_population(pop, d, space, folds, cache, opt);
    const std::size_t best = detail::argmax(fitness);
    GenerationRecord rec;
    rec.generation = gen;
    rec.best_auc = fitness[best];
    double sum = 0.0;
    for (double f : fitness) sum += f;
    rec.mean_auc = sum / static_cast<double>(fitness.size());
    rec.p_c = crossover_prob(cfg, gen);
    rec.p_m = mutation_prob(cfg, gen);
    rec.best_variables = pop[best].variables();
    result.history.push_back(rec);
    if (opt.observer) opt.observer(gen, pop, fitness);

    if (gen == cfg.max_generations) {
      result.best = pop[best];
      result.best_fitness = cache.at(rec.best_variables);
      break;
    }

    const double p_c = crossover_prob(cfg, gen);
    const double p_m = mutation_prob(cfg, gen);
    std::vector<Chromosome> next;
    next.reserve(pop.size());
    next.push_back(pop[best]);
    next.push_back(mutate(pop[best], space, cfg, 1.0, 1.0, rng));
    while (next.size() < pop.size()) {
      const std::size_t ia = tournament_select(fitness, cfg, rng);
      std::size_t ib = tournament_select(fitness, cfg, rng);
      if (ib == ia) ib = tournament_select(fitness, cfg, rng);
      std::pair<Chromosome, Chromosome> kids;
      if (uniform01(rng) < p_c)
        kids = crossover(pop[ia], pop[ib], space, cfg, rng);
      else
        kids = {pop[ia], pop[ib]};
      next.push_back(std::move(kids.first));
      if (next.size() < pop.size()) next.push_back(std::move(kids.second));
    }
    for (std::size_t k = 2; k < next.size(); ++k) next[k] = mutate(next[k], space, cfg, p_m, p_m, rng);
    pop = std::move(next);
  }
  return result;
}

/// n_restarts runs with seeds cfg.seed, cfg.seed+1, ... on the same folds;
/// returns the run with the highest best mean AUC (earliest on ties).
inline GaResult multi_start(const Dataset& d, const VariableSpace& space, const GaConfig& cfg,
                            const FoldAssignment& folds, const EvolveOptions& opt = {}) {
  cfg.validate(space);
  FitnessCache shared;
  EvolveOptions run_opt = opt;
  if (!run_opt.cache) run_opt.cache = &shared;
  std::optional<GaResult> best;
  for (int r = 0; r < cfg.n_restarts; ++r) {
    GaConfig run_cfg = cfg;
    run_cfg.seed = cfg.seed + static_cast<std::uint64_t>(r);
    GaResult res = evolve(d, space, run_cfg, folds, run_opt);
    if (!best || res.best_fitness.mean_auc > best->best_fitness.mean_auc) best = std::move(res);
  }
  return std::move(*best);
}

}  // namespace gaselect
