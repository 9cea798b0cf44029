#pragma once

// JSON encodings of results exchanged between CLI stages.

#include <fstream>
#include <string>

#include "json.hpp"

#include "gaselect/ga.hpp"
#include "gaselect/stepwise.hpp"

namespace gaselect {

inline void to_json(nlohmann::json& j, const FitnessReport& r) {
  j = {{"selected", r.selected}, {"fold_aucs", r.fold_aucs}, {"mean_auc", r.mean_auc},
       {"smr", r.smr},           {"smr_low", r.smr_low},     {"smr_high", r.smr_high}};
}

inline void from_json(const nlohmann::json& j, FitnessReport& r) {
  j.at("selected").get_to(r.selected);
  j.at("fold_aucs").get_to(r.fold_aucs);
  j.at("mean_auc").get_to(r.mean_auc);
  j.at("smr").get_to(r.smr);
  j.at("smr_low").get_to(r.smr_low);
  j.at("smr_high").get_to(r.smr_high);
}

inline void to_json(nlohmann::json& j, const GenerationRecord& g) {
  j = {{"generation", g.generation}, {"best_auc", g.best_auc}, {"mean_auc", g.mean_auc},
       {"p_c", g.p_c},               {"p_m", g.p_m},           {"best_variables", g.best_variables}};
}

inline void from_json(const nlohmann::json& j, GenerationRecord& g) {
  j.at("generation").get_to(g.generation);
  j.at("best_auc").get_to(g.best_auc);
  j.at("mean_auc").get_to(g.mean_auc);
  j.at("p_c").get_to(g.p_c);
  j.at("p_m").get_to(g.p_m);
  j.at("best_variables").get_to(g.best_variables);
}

inline void to_json(nlohmann::json& j, const GaResult& r) {
  j = {{"best_genes", r.best.genes}, {"best_fitness", r.best_fitness}, {"history", r.history}, {"seed_used", r.seed_used}};
}

inline void from_json(const nlohmann::json& j, GaResult& r) {
  j.at("best_genes").get_to(r.best.genes);
  j.at("best_fitness").get_to(r.best_fitness);
  j.at("history").get_to(r.history);
  j.at("seed_used").get_to(r.seed_used);
}

inline void to_json(nlohmann::json& j, const StepwiseStep& s) {
  j = {{"step", s.step}, {"action", std::string(to_string(s.action))}, {"variable", s.variable}, {"aic", s.aic}};
}

inline void from_json(const nlohmann::json& j, StepwiseStep& s) {
  j.at("step").get_to(s.step);
  const auto a = j.at("action").get<std::string>();
  s.action = a == "add" ? StepAction::add : a == "drop" ? StepAction::drop : StepAction::start;
  j.at("variable").get_to(s.variable);
  j.at("aic").get_to(s.aic);
}

inline void to_json(nlohmann::json& j, const StepwiseResult& r) {
  j = {{"selected", r.selected}, {"trace", r.trace}, {"fitness", r.fitness},
       {"scope", "main effects only"}};
}

inline void from_json(const nlohmann::json& j, StepwiseResult& r) {
  j.at("selected").get_to(r.selected);
  j.at("trace").get_to(r.trace);
  j.at("fitness").get_to(r.fitness);
}

/// One line of the GA monitoring stream.
inline std::string history_line(const GenerationRecord& g) { return nlohmann::json(g).dump(); }

inline void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

inline nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("'" + path + "': " + e.what());
  }
}

}  // namespace gaselect
