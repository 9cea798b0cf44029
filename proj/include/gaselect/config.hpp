#pragma once

// Run configuration, read from an INI-style file:
//
//   [data]     path, delimiter (a character or "tab"), missing_token,
//              drop_rows ("col=value; col2=value2": rows matching any rule
//              are removed before missing-value handling)
//   [columns]  name = <binary|factor|numeric> <predictor|outcome|category|ignore>
//              in file column order
//   [levels]   name = l1, l2, ...   (declared factor levels; closed)
//   [collapse] name = from:to, from:to, ...
//   [ga]       population_size, min_vars, max_vars, max_generations, p_c_max,
//              p_c_min, p_m_min, p_m_max, tournament_size, seed, n_restarts
//   [folds]    seed (defaults to the GA seed)
//   [stepwise] enabled
//   [report]   alpha
//   [output]   dir

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gaselect/ga.hpp"
#include "gaselect/tabular.hpp"

namespace gaselect {

struct RowFilter {
  std::string column;
  std::string value;
  bool operator==(const RowFilter&) const = default;
};

struct RunConfig {
  std::string data_path;
  char delimiter = ',';
  std::string missing_token;
  std::vector<ColumnSpec> schema;
  std::vector<RowFilter> drop_rows;
  std::vector<std::pair<std::string, std::map<std::string, std::string>>> collapses;
  GaConfig ga;
  std::optional<std::uint64_t> fold_seed;
  bool stepwise = true;
  double alpha = 0.05;
  std::string output_dir = "out";

  std::uint64_t effective_fold_seed() const { return fold_seed.value_or(ga.seed); }
};

namespace detail {

inline std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    auto t = trim(cur);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

template <class T>
T ini_get(const boost::property_tree::ptree& section, const char* key, T fallback) {
  auto v = section.get_optional<std::string>(key);
  if (!v) return fallback;
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
      if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
      throw std::invalid_argument(*v);
    } else if constexpr (std::is_floating_point_v<T>) {
      std::size_t used = 0;
      double d = std::stod(*v, &used);
      if (used != v->size()) throw std::invalid_argument(*v);
      return static_cast<T>(d);
    } else {
      std::size_t used = 0;
      long long n = std::stoll(*v, &used);
      if (used != v->size()) throw std::invalid_argument(*v);
      return static_cast<T>(n);
    }
  } catch (const std::exception&) {
    throw DataError(std::string("config: bad value '") + *v + "' for '" + key + "'");
  }
}

inline const boost::property_tree::ptree* section(const boost::property_tree::ptree& root, const char* name) {
  auto it = root.find(name);
  return it == root.not_found() ? nullptr : &it->second;
}

}  // namespace detail

/// Parses a configuration; a relative data path is resolved against base_dir.
inline RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {}) {
  namespace pt = boost::property_tree;
  pt::ptree root;
  try {
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw DataError(std::string("config: ") + e.what());
  }

  RunConfig cfg;
  const auto* data = detail::section(root, "data");
  if (!data) throw DataError("config: missing [data] section");
  auto path = data->get_optional<std::string>("path");
  if (!path || path->empty()) throw DataError("config: [data] path is required");
  std::filesystem::path p(*path);
  cfg.data_path = (p.is_relative() && !base_dir.empty() ? base_dir / p : p).string();
  auto delim = data->get<std::string>("delimiter", ",");
  if (delim == "tab") cfg.delimiter = '\t';
  else if (delim.size() == 1) cfg.delimiter = delim[0];
  else throw DataError("config: delimiter must be one character or 'tab'");
  cfg.missing_token = data->get<std::string>("missing_token", "");
  for (const auto& rule : detail::split_list(data->get<std::string>("drop_rows", ""), ';')) {
    auto eq = rule.find('=');
    if (eq == std::string::npos) throw DataError("config: drop_rows rule '" + rule + "' needs column=value");
    cfg.drop_rows.push_back({std::string(detail::trim(rule.substr(0, eq))), std::string(detail::trim(rule.substr(eq + 1)))});
  }

  const auto* columns = detail::section(root, "columns");
  if (!columns || columns->empty()) throw DataError("config: missing [columns] section");
  for (const auto& [name, node] : *columns) {
    std::istringstream words(node.get_value<std::string>());
    std::string kind, role, extra;
    if (!(words >> kind >> role) || (words >> extra))
      throw DataError("config: column '" + name + "' needs '<kind> <role>'");
    cfg.schema.push_back({name, parse_column_kind(kind), {}, parse_column_role(role), false});
  }

  if (const auto* levels = detail::section(root, "levels")) {
    for (const auto& [name, node] : *levels) {
      auto it = std::find_if(cfg.schema.begin(), cfg.schema.end(), [&](const ColumnSpec& c) { return c.name == name; });
      if (it == cfg.schema.end() || it->kind != ColumnKind::factor)
        throw DataError("config: [levels] entry '" + name + "' is not a factor column");
      it->levels = detail::split_list(node.get_value<std::string>(), ',');
      it->closed_levels = true;
    }
  }

  if (const auto* collapse = detail::section(root, "collapse")) {
    for (const auto& [name, node] : *collapse) {
      std::map<std::string, std::string> mapping;
      for (const auto& pair : detail::split_list(node.get_value<std::string>(), ',')) {
        auto colon = pair.find(':');
        if (colon == std::string::npos) throw DataError("config: collapse entry '" + pair + "' needs from:to");
        mapping[std::string(detail::trim(pair.substr(0, colon)))] = std::string(detail::trim(pair.substr(colon + 1)));
      }
      cfg.collapses.emplace_back(name, std::move(mapping));
    }
  }

  if (const auto* ga = detail::section(root, "ga")) {
    auto& g = cfg.ga;
    g.population_size = detail::ini_get(*ga, "population_size", g.population_size);
    g.min_vars = detail::ini_get(*ga, "min_vars", g.min_vars);
    g.max_vars = detail::ini_get(*ga, "max_vars", g.max_vars);
    g.max_generations = detail::ini_get(*ga, "max_generations", g.max_generations);
    g.p_c_max = detail::ini_get(*ga, "p_c_max", g.p_c_max);
    g.p_c_min = detail::ini_get(*ga, "p_c_min", g.p_c_min);
    g.p_m_min = detail::ini_get(*ga, "p_m_min", g.p_m_min);
    g.p_m_max = detail::ini_get(*ga, "p_m_max", g.p_m_max);
    g.tournament_size = detail::ini_get(*ga, "tournament_size", g.tournament_size);
    g.seed = detail::ini_get<std::uint64_t>(*ga, "seed", g.seed);
    g.n_restarts = detail::ini_get(*ga, "n_restarts", g.n_restarts);
  }
  try {
    cfg.ga.validate();
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("config: ") + e.what());
  }
  if (const auto* folds = detail::section(root, "folds"))
    if (folds->get_optional<std::string>("seed")) cfg.fold_seed = detail::ini_get<std::uint64_t>(*folds, "seed", 0);
  if (const auto* sw = detail::section(root, "stepwise")) cfg.stepwise = detail::ini_get(*sw, "enabled", cfg.stepwise);
  if (const auto* rep = detail::section(root, "report")) cfg.alpha = detail::ini_get(*rep, "alpha", cfg.alpha);
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw DataError("config: alpha must lie in (0,1)");
  if (const auto* out = detail::section(root, "output")) cfg.output_dir = out->get<std::string>("dir", cfg.output_dir);
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config '" + path + "'");
  return parse_config(in, std::filesystem::path(path).parent_path());
}

}  // namespace gaselect
