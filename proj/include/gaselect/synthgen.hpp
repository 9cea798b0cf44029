#pragma once

// Synthetic binary-outcome data from a known logistic model with planted
// main effects and pairwise interactions.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "gaselect/common.hpp"
#include "gaselect/design.hpp"
#include "gaselect/logit.hpp"
#include "gaselect/metrics.hpp"
#include "gaselect/tabular.hpp"

namespace gaselect {

/// How one predictor is drawn: binary ~ Bernoulli(p); factor with
/// level probabilities `probs`; numeric ~ N(0, 1).
struct PredictorKind {
  ColumnKind kind = ColumnKind::numeric;
  double p = 0.5;
  std::vector<double> probs;

  static PredictorKind binary(double p) { return {ColumnKind::binary, p, {}}; }
  static PredictorKind factor(std::vector<double> probs) { return {ColumnKind::factor, 0.0, std::move(probs)}; }
  static PredictorKind numeric() { return {ColumnKind::numeric, 0.0, {}}; }
};

/// Coefficients for one planted term, one per design column of the term
/// (a single value is broadcast across all of the term's columns).
struct PlantedMain {
  int variable = 0;
  std::vector<double> coefficients;
};

struct PlantedInteraction {
  int first = 0;
  int second = 0;
  std::vector<double> coefficients;
};

struct GenerativeSpec {
  std::vector<PredictorKind> predictors;
  std::vector<PlantedMain> mains;
  std::vector<PlantedInteraction> interactions;
  double intercept = 0.0;
  std::size_t n_rows = 1000;
  std::uint64_t seed = 1;
  /// Equicorrelation among numeric predictors (Gaussian copula), in [0, 1).
  double numeric_correlation = 0.0;

  int n_main() const { return static_cast<int>(predictors.size()); }

  std::string name(int main) const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "x%02d", main);
    return buf;
  }

  std::vector<ColumnSpec> schema() const {
    std::vector<ColumnSpec> out;
    for (int k = 1; k <= n_main(); ++k) {
      const auto& p = predictors[static_cast<std::size_t>(k - 1)];
      ColumnSpec s{name(k), p.kind, {}, ColumnRole::predictor, false};
      if (p.kind == ColumnKind::factor)
        for (std::size_t l = 0; l < p.probs.size(); ++l) s.levels.push_back(std::string(1, static_cast<char>('A' + l)));
      out.push_back(std::move(s));
    }
    out.push_back({"y", ColumnKind::binary, {}, ColumnRole::outcome, false});
    return out;
  }

  VariableSpace space() const {
    std::vector<std::string> names;
    for (int k = 1; k <= n_main(); ++k) names.push_back(name(k));
    return VariableSpace(std::move(names));
  }

  /// Variable indices of every planted term, ascending.
  std::vector<int> true_variables() const {
    const auto sp = space();
    std::vector<int> out;
    for (const auto& m : mains) out.push_back(m.variable);
    for (const auto& t : interactions) out.push_back(sp.index_of_pair(std::min(t.first, t.second), std::max(t.first, t.second)));
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<int> planted_interaction_indices() const {
    const auto sp = space();
    std::vector<int> out;
    for (const auto& t : interactions) out.push_back(sp.index_of_pair(std::min(t.first, t.second), std::max(t.first, t.second)));
    return out;
  }

  void validate() const {
    if (predictors.empty()) throw std::invalid_argument("GenerativeSpec: no predictors");
    for (const auto& p : predictors) {
      if (p.kind == ColumnKind::binary && !(p.p >= 0.0 && p.p <= 1.0))
        throw std::invalid_argument("GenerativeSpec: binary probability outside [0,1]");
      if (p.kind == ColumnKind::factor) {
        if (p.probs.size() < 2 || p.probs.size() > 26) throw std::invalid_argument("GenerativeSpec: factor needs 2..26 levels");
        double s = 0.0;
        for (double q : p.probs) {
          if (!(q >= 0.0)) throw std::invalid_argument("GenerativeSpec: negative level probability");
          s += q;
        }
        if (std::abs(s - 1.0) > 1e-9) throw std::invalid_argument("GenerativeSpec: level probabilities must sum to 1");
      }
    }
    if (!(numeric_correlation >= 0.0 && numeric_correlation < 1.0))
      throw std::invalid_argument("GenerativeSpec: numeric_correlation must lie in [0, 1)");
    if (!std::isfinite(intercept)) throw std::invalid_argument("GenerativeSpec: non-finite intercept");
    std::vector<int> main_vars;
    for (const auto& m : mains) {
      if (m.variable < 1 || m.variable > n_main()) throw std::invalid_argument("GenerativeSpec: main index out of range");
      main_vars.push_back(m.variable);
    }
    for (const auto& t : interactions) {
      if (t.first == t.second) throw std::invalid_argument("GenerativeSpec: interaction of a variable with itself");
      for (int parent : {t.first, t.second})
        if (std::find(main_vars.begin(), main_vars.end(), parent) == main_vars.end())
          throw std::invalid_argument("GenerativeSpec: planted interaction parent is not a planted main effect");
    }
    auto vars = true_variables();
    if (std::adjacent_find(vars.begin(), vars.end()) != vars.end())
      throw std::invalid_argument("GenerativeSpec: term planted twice");
    auto finite = [](const std::vector<double>& c) {
      if (c.empty()) return false;
      for (double x : c)
        if (!std::isfinite(x)) return false;
      return true;
    };
    for (const auto& m : mains)
      if (!finite(m.coefficients)) throw std::invalid_argument("GenerativeSpec: bad main coefficients");
    for (const auto& t : interactions)
      if (!finite(t.coefficients)) throw std::invalid_argument("GenerativeSpec: bad interaction coefficients");
  }
};

struct Simulation {
  Dataset data;
  Eigen::VectorXd linear_predictor;
};

namespace detail {

inline Eigen::VectorXd planted_coefficients(const GenerativeSpec& spec, const DesignMatrix& m) {
  const auto sp = spec.space();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(m.n_cols());
  auto assign = [&](int v, const std::vector<double>& coefs) {
    const auto& group = m.column_groups.at(v);
    if (coefs.size() != 1 && coefs.size() != group.size())
      throw std::invalid_argument("GenerativeSpec: term " + sp.label(v) + " needs 1 or " +
                                  std::to_string(group.size()) + " coefficients");
    for (std::size_t k = 0; k < group.size(); ++k) beta[group[k]] = coefs.size() == 1 ? coefs[0] : coefs[k];
  };
  for (const auto& mn : spec.mains) assign(mn.variable, mn.coefficients);
  for (const auto& t : spec.interactions)
    assign(sp.index_of_pair(std::min(t.first, t.second), std::max(t.first, t.second)), t.coefficients);
  return beta;
}

}  // namespace detail

/// Draws predictors row by row (predictors in index order), computes the
/// true linear predictor through the same dummy coding used for fitting,
/// then draws every outcome. Deterministic per spec.seed.
inline Simulation simulate(const GenerativeSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto schema = spec.schema();
  Dataset d;
  for (const auto& s : schema) d.columns.push_back(Column{s, {}, {}});
  const double rho = spec.numeric_correlation;
  for (std::size_t r = 0; r < spec.n_rows; ++r) {
    const double common = rho > 0.0 ? normal(rng) : 0.0;
    for (std::size_t k = 0; k < spec.predictors.size(); ++k) {
      const auto& p = spec.predictors[k];
      auto& col = d.columns[k];
      switch (p.kind) {
        case ColumnKind::binary: col.values.push_back(uniform01(rng) < p.p ? 1.0 : 0.0); break;
        case ColumnKind::numeric: {
          const double e = normal(rng);
          col.values.push_back(rho > 0.0 ? std::sqrt(rho) * common + std::sqrt(1.0 - rho) * e : e);
          break;
        }
        case ColumnKind::factor: {
          const double u = uniform01(rng);
          double acc = 0.0;
          int level = static_cast<int>(p.probs.size()) - 1;
          for (std::size_t l = 0; l < p.probs.size(); ++l) {
            acc += p.probs[l];
            if (u < acc) {
              level = static_cast<int>(l);
              break;
            }
          }
          col.codes.push_back(level);
          break;
        }
      }
    }
  }
  auto& outcome = d.columns.back().values;
  outcome.assign(spec.n_rows, 0.0);

  Eigen::VectorXd lp = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(spec.n_rows), spec.intercept);
  const auto vars = spec.true_variables();
  if (!vars.empty() && spec.n_rows > 0) {
    DesignMatrix m = expand(d, spec.space(), vars);
    lp += m.x * detail::planted_coefficients(spec, m);
  }
  for (std::size_t r = 0; r < spec.n_rows; ++r)
    outcome[r] = uniform01(rng) < logistic(lp[static_cast<Eigen::Index>(r)]) ? 1.0 : 0.0;
  return {std::move(d), std::move(lp)};
}

inline Dataset generate(const GenerativeSpec& spec) { return simulate(spec).data; }

inline constexpr std::uint64_t kMonteCarloSeedOffset = 0x9E3779B97F4A7C15ULL;

/// AUC of the true linear predictor against freshly drawn outcomes: the
/// discrimination ceiling for any model of this spec.
inline double generative_auc(const GenerativeSpec& spec, std::size_t n_mc) {
  if (n_mc < 100000) throw std::invalid_argument("generative_auc: need at least 1e5 Monte-Carlo rows");
  GenerativeSpec fresh = spec;
  fresh.n_rows = n_mc;
  fresh.seed = spec.seed ^ kMonteCarloSeedOffset;
  auto sim = simulate(fresh);
  const auto& y = sim.data.columns.back().values;
  return auc(std::span<const double>(sim.linear_predictor.data(), n_mc), y);
}

/// Intercept giving the requested mean event probability, by bisection on
/// a Monte-Carlo sample of the predictors.
inline double calibrate_intercept(const GenerativeSpec& spec, double target_rate, std::size_t n_mc = 200000) {
  if (!(target_rate > 0.0 && target_rate < 1.0)) throw std::invalid_argument("calibrate_intercept: rate must be in (0,1)");
  GenerativeSpec probe = spec;
  probe.intercept = 0.0;
  probe.n_rows = n_mc;
  probe.seed = spec.seed ^ kMonteCarloSeedOffset;
  const Eigen::VectorXd lp = simulate(probe).linear_predictor;
  auto rate = [&](double b0) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < lp.size(); ++i) s += logistic(lp[i] + b0);
    return s / static_cast<double>(lp.size());
  };
  double lo = -30.0, hi = 30.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    (rate(mid) < target_rate ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Benchmark used by the acceptance suite: 25 predictors (15 binary with
/// p = 0.3, two 3-level factors, 8 standard-normal numerics), 8 planted main
/// effects, 4 planted interactions, intercept tuned to a 15% event rate.
inline GenerativeSpec default_benchmark(std::size_t n_rows = 20000, std::uint64_t seed = 20240601) {
  GenerativeSpec s;
  for (int k = 0; k < 15; ++k) s.predictors.push_back(PredictorKind::binary(0.3));
  s.predictors.push_back(PredictorKind::factor({0.5, 0.3, 0.2}));
  s.predictors.push_back(PredictorKind::factor({0.4, 0.35, 0.25}));
  for (int k = 0; k < 8; ++k) s.predictors.push_back(PredictorKind::numeric());
  // 1-15 binary, 16-17 factor, 18-25 numeric.
  s.mains = {
      {1, {0.6}}, {2, {-0.5}}, {3, {0.7}}, {16, {0.4, 0.8}}, {18, {0.8}}, {19, {-0.6}}, {20, {0.5}}, {21, {0.4}},
  };
  s.interactions = {
      {18, 19, {0.6}},
      {1, 20, {0.9}},
      {3, 21, {-0.8}},
      {16, 18, {0.7, -0.7}},
  };
  s.n_rows = n_rows;
  s.seed = seed;
  s.intercept = calibrate_intercept(s, 0.15);
  return s;
}

inline nlohmann::json manifest_json(const GenerativeSpec& spec) {
  using nlohmann::json;
  const auto sp = spec.space();
  json j;
  j["n_main"] = spec.n_main();
  j["n_rows"] = spec.n_rows;
  j["seed"] = spec.seed;
  j["intercept"] = spec.intercept;
  j["numeric_correlation"] = spec.numeric_correlation;
  json preds = json::array();
  for (int k = 1; k <= spec.n_main(); ++k) {
    const auto& p = spec.predictors[static_cast<std::size_t>(k - 1)];
    json e{{"index", k}, {"name", spec.name(k)}, {"kind", std::string(to_string(p.kind))}};
    if (p.kind == ColumnKind::binary) e["p"] = p.p;
    if (p.kind == ColumnKind::factor) e["probs"] = p.probs;
    preds.push_back(std::move(e));
  }
  j["predictors"] = std::move(preds);
  json mains = json::array();
  for (const auto& m : spec.mains)
    mains.push_back({{"index", m.variable}, {"label", sp.label(m.variable)}, {"coefficients", m.coefficients}});
  j["true_mains"] = std::move(mains);
  json inter = json::array();
  for (const auto& t : spec.interactions) {
    const int v = sp.index_of_pair(std::min(t.first, t.second), std::max(t.first, t.second));
    inter.push_back({{"index", v}, {"pair", {t.first, t.second}}, {"label", sp.label(v)}, {"coefficients", t.coefficients}});
  }
  j["true_interactions"] = std::move(inter);
  return j;
}

}  // namespace gaselect
