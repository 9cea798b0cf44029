#pragma once

// Per-category model summaries: which main effects are in the model and
// which pairs have significant interactions, plus CV performance and the
// comparison against the stepwise baseline.

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "gaselect/cv.hpp"
#include "gaselect/design.hpp"
#include "gaselect/logit.hpp"
#include "gaselect/metrics.hpp"

namespace gaselect {

struct MainEffectRow {
  int index = 0;
  std::string name;
  bool included = false;
  /// Smallest Wald p over the term's design columns; empty when excluded.
  std::optional<double> wald_p;
  /// Main effects this one has a significant pairwise interaction with.
  std::vector<int> partners;
  bool operator==(const MainEffectRow&) const = default;
};

/// One coefficient of the full-data refit.
struct TermRow {
  std::string label;
  int variable = 0;  // 0 for the intercept
  double coefficient = 0.0;
  double std_error = 0.0;
  double p_value = 1.0;
  bool operator==(const TermRow&) const = default;
};

struct BaselineComparison {
  std::string method = "stepwise AIC (main effects only)";
  std::vector<int> selected;
  std::vector<double> fold_aucs;
  double mean_auc = 0.0;
  /// Wilcoxon signed-rank over paired fold AUCs; empty when every pair ties.
  std::optional<double> p_two_sided;
  std::optional<double> p_ga_greater;
  bool operator==(const BaselineComparison&) const = default;
};

struct ModelSummary {
  std::string category;
  std::size_t n_rows = 0;
  double alpha = 0.05;
  std::vector<int> selected;
  std::vector<MainEffectRow> rows;
  std::vector<TermRow> terms;
  bool refit_converged = true;
  std::vector<double> fold_aucs;
  double mean_auc = 0.0;
  double smr = 0.0;
  double smr_low = 0.0;
  double smr_high = 0.0;
  std::optional<BaselineComparison> baseline;
  bool operator==(const ModelSummary&) const = default;
};

/// Refits the selected set on the whole subset and marks a predictor pair
/// significant when any of its interaction columns has Wald p < alpha.
inline ModelSummary summarize(const std::string& category, const Dataset& d, const VariableSpace& space,
                              const FitnessReport& ga, const std::optional<FitnessReport>& baseline,
                              double alpha, const FitOptions& fit_opt = {}) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("summarize: alpha must lie in (0,1)");
  ModelSummary s;
  s.category = category;
  s.n_rows = d.n_rows();
  s.alpha = alpha;
  s.selected = ga.selected;
  std::sort(s.selected.begin(), s.selected.end());
  s.fold_aucs = ga.fold_aucs;
  s.mean_auc = ga.mean_auc;
  s.smr = ga.smr;
  s.smr_low = ga.smr_low;
  s.smr_high = ga.smr_high;

  const DesignMatrix design = expand(d, space, s.selected);
  FitOptions opt = fit_opt;
  opt.compute_std_errors = true;
  const FittedModel model = fit(design, opt);
  s.refit_converged = model.converged;
  const auto p = wald_p_values(model);
  s.terms.push_back({"(intercept)", 0, model.coefficients[0], model.std_errors[0], p[0]});
  for (std::size_t k = 0; k < design.columns.size(); ++k) {
    const auto e = static_cast<Eigen::Index>(k + 1);
    s.terms.push_back({design.columns[k].label, design.columns[k].variable, model.coefficients[e], model.std_errors[e], p[k + 1]});
  }

  std::map<int, double> min_p;
  for (std::size_t k = 0; k < design.columns.size(); ++k) {
    const int v = design.columns[k].variable;
    auto it = min_p.find(v);
    if (it == min_p.end() || p[k + 1] < it->second) min_p[v] = p[k + 1];
  }
  std::map<int, std::set<int>> partners;
  for (const auto& [v, pv] : min_p) {
    if (!space.is_interaction(v) || !(pv < alpha)) continue;
    auto [i, j] = space.pair_of(v);
    partners[i].insert(j);
    partners[j].insert(i);
  }
  const std::set<int> chosen(s.selected.begin(), s.selected.end());
  for (int k = 1; k <= space.n_main(); ++k) {
    MainEffectRow row;
    row.index = k;
    row.name = space.name(k);
    row.included = chosen.count(k) > 0;
    if (auto it = min_p.find(k); it != min_p.end()) row.wald_p = it->second;
    if (auto it = partners.find(k); it != partners.end()) row.partners.assign(it->second.begin(), it->second.end());
    s.rows.push_back(std::move(row));
  }

  if (baseline) {
    BaselineComparison b;
    b.selected = baseline->selected;
    b.fold_aucs = baseline->fold_aucs;
    b.mean_auc = baseline->mean_auc;
    try {
      b.p_two_sided = wilcoxon_signed_rank(ga.fold_aucs, baseline->fold_aucs, Alternative::two_sided);
      b.p_ga_greater = wilcoxon_signed_rank(ga.fold_aucs, baseline->fold_aucs, Alternative::greater);
    } catch (const std::invalid_argument&) {
      // every fold tied
    }
    s.baseline = std::move(b);
  }
  return s;
}

namespace detail {

inline void opt_to_json(nlohmann::json& j, const char* key, const std::optional<double>& v) {
  j[key] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

inline std::optional<double> opt_from_json(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

}  // namespace detail

inline void to_json(nlohmann::json& j, const MainEffectRow& r) {
  j = {{"index", r.index}, {"name", r.name}, {"included", r.included}, {"partners", r.partners}};
  detail::opt_to_json(j, "wald_p", r.wald_p);
}

inline void from_json(const nlohmann::json& j, MainEffectRow& r) {
  j.at("index").get_to(r.index);
  j.at("name").get_to(r.name);
  j.at("included").get_to(r.included);
  j.at("partners").get_to(r.partners);
  r.wald_p = detail::opt_from_json(j, "wald_p");
}

inline void to_json(nlohmann::json& j, const TermRow& t) {
  j = {{"label", t.label}, {"variable", t.variable}, {"coefficient", t.coefficient},
       {"std_error", t.std_error}, {"p_value", t.p_value}};
}

inline void from_json(const nlohmann::json& j, TermRow& t) {
  j.at("label").get_to(t.label);
  j.at("variable").get_to(t.variable);
  j.at("coefficient").get_to(t.coefficient);
  j.at("std_error").get_to(t.std_error);
  j.at("p_value").get_to(t.p_value);
}

inline void to_json(nlohmann::json& j, const BaselineComparison& b) {
  j = {{"method", b.method}, {"selected", b.selected}, {"fold_aucs", b.fold_aucs}, {"mean_auc", b.mean_auc}};
  detail::opt_to_json(j, "p_two_sided", b.p_two_sided);
  detail::opt_to_json(j, "p_ga_greater", b.p_ga_greater);
}

inline void from_json(const nlohmann::json& j, BaselineComparison& b) {
  j.at("method").get_to(b.method);
  j.at("selected").get_to(b.selected);
  j.at("fold_aucs").get_to(b.fold_aucs);
  j.at("mean_auc").get_to(b.mean_auc);
  b.p_two_sided = detail::opt_from_json(j, "p_two_sided");
  b.p_ga_greater = detail::opt_from_json(j, "p_ga_greater");
}

inline void to_json(nlohmann::json& j, const ModelSummary& s) {
  j = {{"category", s.category}, {"n_rows", s.n_rows},           {"alpha", s.alpha},
       {"selected", s.selected}, {"main_effects", s.rows},       {"terms", s.terms},
       {"refit_converged", s.refit_converged},                   {"fold_aucs", s.fold_aucs},
       {"mean_auc", s.mean_auc}, {"smr", s.smr},                 {"smr_low", s.smr_low},
       {"smr_high", s.smr_high}};
  j["baseline"] = s.baseline ? nlohmann::json(*s.baseline) : nlohmann::json(nullptr);
}

inline void from_json(const nlohmann::json& j, ModelSummary& s) {
  j.at("category").get_to(s.category);
  j.at("n_rows").get_to(s.n_rows);
  j.at("alpha").get_to(s.alpha);
  j.at("selected").get_to(s.selected);
  j.at("main_effects").get_to(s.rows);
  j.at("terms").get_to(s.terms);
  j.at("refit_converged").get_to(s.refit_converged);
  j.at("fold_aucs").get_to(s.fold_aucs);
  j.at("mean_auc").get_to(s.mean_auc);
  j.at("smr").get_to(s.smr);
  j.at("smr_low").get_to(s.smr_low);
  j.at("smr_high").get_to(s.smr_high);
  if (j.at("baseline").is_null()) s.baseline.reset();
  else s.baseline = j.at("baseline").get<BaselineComparison>();
}

namespace detail {

inline std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? "," : "") + std::to_string(v[k]);
  return out;
}

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace detail

/// Fixed-width table: one row per main effect, '*' when included, and the
/// indices of significant interaction partners; performance footer below.
inline std::string render_summary(const ModelSummary& s) {
  std::size_t width = 9;
  for (const auto& r : s.rows) width = std::max(width, r.name.size());
  auto pad = [](std::string t, std::size_t w) {
    if (t.size() < w) t.append(w - t.size(), ' ');
    return t;
  };

  std::string out;
  out += "Model summary: " + s.category + "  (N = " + std::to_string(s.n_rows) + ", alpha = " +
         detail::fmt("%.3g", s.alpha) + ")\n\n";
  out += "  #  " + pad("predictor", width) + "  in  significant interactions\n";
  for (const auto& r : s.rows) {
    char idx[16];
    std::snprintf(idx, sizeof idx, "%3d", r.index);
    std::string line = std::string(idx) + "  " + pad(r.name, width) + "  " + (r.included ? "* " : "  ") + "  " +
                       detail::join_ints(r.partners);
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  out += "\n";
  out += "GA mean CV AUC      " + detail::fmt("%.4f", s.mean_auc) + "\n";
  out += "fold AUCs          ";
  for (double a : s.fold_aucs) out += " " + detail::fmt("%.4f", a);
  out += "\n";
  out += "SMR                 " + detail::fmt("%.4f", s.smr) + "  (95% CI " + detail::fmt("%.4f", s.smr_low) + " - " +
         detail::fmt("%.4f", s.smr_high) + ")\n";
  out += "terms in model      " + std::to_string(s.selected.size()) + (s.refit_converged ? "" : "  (refit did not converge)") + "\n";
  if (s.baseline) {
    const auto& b = *s.baseline;
    out += "baseline            " + b.method + "\n";
    out += "baseline CV AUC     " + detail::fmt("%.4f", b.mean_auc) + "\n";
    out += "Wilcoxon p (GA vs baseline, two-sided)  " + (b.p_two_sided ? detail::fmt("%.4f", *b.p_two_sided) : "n/a") + "\n";
    out += "Wilcoxon p (GA > baseline, one-sided)   " + (b.p_ga_greater ? detail::fmt("%.4f", *b.p_ga_greater) : "n/a") + "\n";
  }
  return out;
}

/// Size-weighted mean of per-category mean AUCs.
inline double weighted_average_auc(const std::vector<std::pair<std::size_t, double>>& size_auc) {
  double num = 0.0, den = 0.0;
  for (const auto& [n, a] : size_auc) {
    num += static_cast<double>(n) * a;
    den += static_cast<double>(n);
  }
  if (den == 0.0) throw std::invalid_argument("weighted_average_auc: no categories");
  return num / den;
}

}  // namespace gaselect
