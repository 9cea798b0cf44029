#pragma once

// End-to-end orchestration: preprocessing, per-category GA and stepwise
// runs, paired comparison and summary output. Each stage reads and writes
// files under the output directory so the CLI verbs compose:
//
//   <out>/scaling.json
//   <out>/<category>/data.csv           preprocess
//   <out>/<category>/ga_result.json     ga
//   <out>/<category>/ga_history.jsonl   ga
//   <out>/<category>/stepwise.json      stepwise
//   <out>/<category>/comparison.json    compare
//   <out>/<category>/summary.json       report
//   <out>/<category>/summary.txt        report
//   <out>/overall.json                  report

#include <cctype>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gaselect/config.hpp"
#include "gaselect/ga.hpp"
#include "gaselect/serialize.hpp"
#include "gaselect/stepwise.hpp"
#include "gaselect/summary.hpp"
#include "gaselect/tabular.hpp"

namespace gaselect {

struct PipelineOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> category;
  unsigned threads = 1;
  std::ostream* log = nullptr;
};

struct CategoryData {
  std::string label;
  Dataset data;
};

/// Label used for the single subset when no category column is configured.
inline const std::string kAllCategory = "all";

inline RunConfig apply_overrides(RunConfig cfg, const PipelineOptions& opt) {
  if (opt.seed) cfg.ga.seed = *opt.seed;
  if (opt.out_dir) cfg.output_dir = *opt.out_dir;
  return cfg;
}

/// load -> row filters -> missing handling -> factor collapse ->
/// standardization -> per-category subsets.
inline std::vector<CategoryData> preprocess(const RunConfig& cfg) {
  Dataset d = load_csv(cfg.data_path, cfg.schema, cfg.missing_token, cfg.delimiter);
  for (const auto& f : cfg.drop_rows) d = drop_rows_where(d, f.column, f.value);
  d = handle_missing(d);
  for (const auto& [column, mapping] : cfg.collapses) d = collapse_factor(d, column, mapping);
  d = standardize(d);
  std::vector<CategoryData> out;
  if (d.category_index()) {
    for (auto& [label, sub] : subset_by_category(d)) out.push_back({label, std::move(sub)});
  } else {
    out.push_back({kAllCategory, std::move(d)});
  }
  return out;
}

inline std::string category_dirname(const std::string& label) {
  std::string out;
  for (char c : label) out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_');
  return out.empty() ? "_" : out;
}

namespace detail {

inline std::filesystem::path category_dir(const RunConfig& cfg, const std::string& label) {
  auto dir = std::filesystem::path(cfg.output_dir) / category_dirname(label);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void log_line(const PipelineOptions& opt, const std::string& msg) {
  if (opt.log) *opt.log << msg << std::endl;
}

struct Stage {
  std::vector<CategoryData> categories;
  std::vector<std::pair<std::string, std::string>> failures;
};

inline Stage select_categories(const RunConfig& cfg, const PipelineOptions& opt) {
  Stage s;
  s.categories = preprocess(cfg);
  if (opt.category) {
    std::erase_if(s.categories, [&](const CategoryData& c) { return c.label != *opt.category; });
    if (s.categories.empty()) throw DataError("no category named '" + *opt.category + "'");
  }
  return s;
}

/// Runs fn per category; an exception aborts only that category.
inline int for_each_category(const RunConfig& cfg, const PipelineOptions& opt, const char* stage,
                             const std::function<void(const CategoryData&, const std::filesystem::path&)>& fn,
                             std::vector<std::pair<std::string, std::string>>* failures = nullptr) {
  auto s = select_categories(cfg, opt);
  int status = 0;
  for (const auto& c : s.categories) {
    try {
      log_line(opt, std::string(stage) + ": " + c.label + " (N = " + std::to_string(c.data.n_rows()) + ")");
      fn(c, category_dir(cfg, c.label));
    } catch (const std::exception& e) {
      status = 1;
      log_line(opt, std::string(stage) + ": " + c.label + " failed: " + e.what());
      if (failures) failures->emplace_back(c.label, e.what());
    }
  }
  return status;
}

}  // namespace detail

inline int run_preprocess(const RunConfig& cfg, const PipelineOptions& opt = {}) {
  std::filesystem::create_directories(cfg.output_dir);
  auto s = detail::select_categories(cfg, opt);
  nlohmann::json scaling = nlohmann::json::object();
  for (const auto& c : s.categories) {
    write_csv((detail::category_dir(cfg, c.label) / "data.csv").string(), c.data, cfg.missing_token, cfg.delimiter);
    for (const auto& [name, st] : c.data.scaling_stats) scaling[name] = {{"mean", st.mean}, {"sd", st.sd}};
    detail::log_line(opt, "preprocess: " + c.label + " (N = " + std::to_string(c.data.n_rows()) + ")");
  }
  write_json((std::filesystem::path(cfg.output_dir) / "scaling.json").string(), scaling);
  return 0;
}

inline GaResult run_ga_category(const RunConfig& cfg, const CategoryData& c, const std::filesystem::path& dir,
                                const PipelineOptions& opt) {
  const auto space = VariableSpace::from_dataset(c.data);
  const auto folds = make_folds(c.data.n_rows(), cfg.effective_fold_seed());
  EvolveOptions eo;
  eo.threads = opt.threads;
  GaResult res = multi_start(c.data, space, cfg.ga, folds, eo);
  write_json((dir / "ga_result.json").string(), res);
  std::ofstream hist(dir / "ga_history.jsonl");
  for (const auto& g : res.history) hist << history_line(g) << '\n';
  return res;
}

inline StepwiseResult run_stepwise_category(const RunConfig& cfg, const CategoryData& c,
                                            const std::filesystem::path& dir, const PipelineOptions& opt) {
  const auto space = VariableSpace::from_dataset(c.data);
  const auto folds = make_folds(c.data.n_rows(), cfg.effective_fold_seed());
  StepwiseOptions so;
  so.threads = opt.threads;
  StepwiseResult res = stepwise_aic(c.data, space, folds, so);
  write_json((dir / "stepwise.json").string(), res);
  return res;
}

inline int run_ga(const RunConfig& cfg, const PipelineOptions& opt = {}) {
  return detail::for_each_category(cfg, opt, "ga", [&](const CategoryData& c, const std::filesystem::path& dir) {
    run_ga_category(cfg, c, dir, opt);
  });
}

inline int run_stepwise(const RunConfig& cfg, const PipelineOptions& opt = {}) {
  return detail::for_each_category(cfg, opt, "stepwise", [&](const CategoryData& c, const std::filesystem::path& dir) {
    run_stepwise_category(cfg, c, dir, opt);
  });
}

inline nlohmann::json comparison_json(const FitnessReport& ga, const FitnessReport& baseline) {
  nlohmann::json j{{"ga_mean_auc", ga.mean_auc},
                   {"baseline_mean_auc", baseline.mean_auc},
                   {"ga_fold_aucs", ga.fold_aucs},
                   {"baseline_fold_aucs", baseline.fold_aucs}};
  try {
    j["p_two_sided"] = wilcoxon_signed_rank(ga.fold_aucs, baseline.fold_aucs, Alternative::two_sided);
    j["p_ga_greater"] = wilcoxon_signed_rank(ga.fold_aucs, baseline.fold_aucs, Alternative::greater);
  } catch (const std::invalid_argument&) {
    j["p_two_sided"] = nullptr;
    j["p_ga_greater"] = nullptr;
  }
  return j;
}

/// Paired fold-AUC comparison from existing ga_result.json and stepwise.json.
inline int run_compare(const RunConfig& cfg, const PipelineOptions& opt = {}) {
  return detail::for_each_category(cfg, opt, "compare", [&](const CategoryData&, const std::filesystem::path& dir) {
    auto ga = read_json((dir / "ga_result.json").string()).get<GaResult>();
    auto sw = read_json((dir / "stepwise.json").string()).get<StepwiseResult>();
    write_json((dir / "comparison.json").string(), comparison_json(ga.best_fitness, sw.fitness));
  });
}

namespace detail {

inline void write_summary(const RunConfig& cfg, const CategoryData& c, const std::filesystem::path& dir,
                          const GaResult& ga, const std::optional<StepwiseResult>& sw,
                          std::vector<std::pair<std::size_t, double>>& weights, nlohmann::json& cats) {
  const auto space = VariableSpace::from_dataset(c.data);
  std::optional<FitnessReport> base;
  if (sw) base = sw->fitness;
  ModelSummary s = summarize(c.label, c.data, space, ga.best_fitness, base, cfg.alpha);
  write_json((dir / "summary.json").string(), s);
  std::ofstream txt(dir / "summary.txt");
  txt << render_summary(s);
  weights.emplace_back(c.data.n_rows(), s.mean_auc);
  cats.push_back({{"category", c.label}, {"n_rows", c.data.n_rows()}, {"status", "ok"}, {"mean_auc", s.mean_auc}});
}

inline int write_overall(const RunConfig& cfg, int status, const std::vector<std::pair<std::size_t, double>>& weights,
                         nlohmann::json cats, const std::vector<std::pair<std::string, std::string>>& failures) {
  for (const auto& [label, msg] : failures)
    cats.push_back({{"category", label}, {"status", "error"}, {"message", msg}});
  nlohmann::json overall{{"categories", cats}};
  overall["weighted_average_auc"] = weights.empty() ? nlohmann::json(nullptr) : nlohmann::json(weighted_average_auc(weights));
  write_json((std::filesystem::path(cfg.output_dir) / "overall.json").string(), overall);
  return status;
}

}  // namespace detail

/// Summaries from existing stage outputs (stepwise.json is optional).
inline int run_report(const RunConfig& cfg, const PipelineOptions& opt = {}) {
  std::vector<std::pair<std::size_t, double>> weights;
  nlohmann::json cats = nlohmann::json::array();
  std::vector<std::pair<std::string, std::string>> failures;
  int status = detail::for_each_category(
      cfg, opt, "report",
      [&](const CategoryData& c, const std::filesystem::path& dir) {
        auto ga = read_json((dir / "ga_result.json").string()).get<GaResult>();
        std::optional<StepwiseResult> sw;
        if (std::filesystem::exists(dir / "stepwise.json"))
          sw = read_json((dir / "stepwise.json").string()).get<StepwiseResult>();
        detail::write_summary(cfg, c, dir, ga, sw, weights, cats);
      },
      &failures);
  return detail::write_overall(cfg, status, weights, std::move(cats), failures);
}

/// Every stage for every category. Returns 0 only if all categories succeed.
inline int run_pipeline(const RunConfig& cfg, const PipelineOptions& opt = {}) {
  run_preprocess(cfg, opt);
  std::vector<std::pair<std::size_t, double>> weights;
  nlohmann::json cats = nlohmann::json::array();
  std::vector<std::pair<std::string, std::string>> failures;
  int status = detail::for_each_category(
      cfg, opt, "run",
      [&](const CategoryData& c, const std::filesystem::path& dir) {
        GaResult ga = run_ga_category(cfg, c, dir, opt);
        std::optional<StepwiseResult> sw;
        if (cfg.stepwise) {
          sw = run_stepwise_category(cfg, c, dir, opt);
          write_json((dir / "comparison.json").string(), comparison_json(ga.best_fitness, sw->fitness));
        }
        detail::write_summary(cfg, c, dir, ga, sw, weights, cats);
      },
      &failures);
  return detail::write_overall(cfg, status, weights, std::move(cats), failures);
}

}  // namespace gaselect
