#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gaselect/tabular.hpp"

namespace gaselect {

/// Canonical indexing of n main effects (1..n) followed by every unordered
/// pair of mains (n+1..total), pairs enumerated row-major: (1,2), (1,3), ...,
/// (1,n), (2,3), ...
class VariableSpace {
 public:
  VariableSpace() = default;
  explicit VariableSpace(std::vector<std::string> names) : names_(std::move(names)) {}

  static VariableSpace from_dataset(const Dataset& d) {
    std::vector<std::string> names;
    for (auto i : d.predictor_indices()) names.push_back(d.columns[i].spec.name);
    return VariableSpace(std::move(names));
  }

  int n_main() const { return static_cast<int>(names_.size()); }
  int total() const { return n_main() + n_main() * (n_main() - 1) / 2; }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(int main) const { return names_.at(static_cast<std::size_t>(main - 1)); }

  bool contains(int v) const { return v >= 1 && v <= total(); }
  bool is_main(int v) const { return v >= 1 && v <= n_main(); }
  bool is_interaction(int v) const { return v > n_main() && v <= total(); }

  int index_of_pair(int i, int j) const {
    const int n = n_main();
    if (i < 1 || j > n || i >= j)
      throw std::invalid_argument("index_of_pair: need 1 <= i < j <= " + std::to_string(n) +
                                  ", got (" + std::to_string(i) + "," + std::to_string(j) + ")");
    return n + (i - 1) * n - i * (i - 1) / 2 + (j - i);
  }

  std::pair<int, int> pair_of(int v) const {
    if (!is_interaction(v))
      throw std::invalid_argument("pair_of: " + std::to_string(v) + " is not an interaction index");
    const int n = n_main();
    int offset = v - n;
    for (int i = 1; i < n; ++i) {
      const int row = n - i;
      if (offset <= row) return {i, i + offset};
      offset -= row;
    }
    throw std::logic_error("pair_of: unreachable");
  }

  std::string label(int v) const {
    if (is_main(v)) return name(v);
    auto [i, j] = pair_of(v);
    return name(i) + ":" + name(j);
  }

 private:
  std::vector<std::string> names_;
};

/// True when every interaction in `vars` has both parents in `vars`.
inline bool satisfies_hierarchy(const VariableSpace& space, const std::vector<int>& vars) {
  std::set<int> s(vars.begin(), vars.end());
  for (int v : vars) {
    if (!space.is_interaction(v)) continue;
    auto [i, j] = space.pair_of(v);
    if (!s.count(i) || !s.count(j)) return false;
  }
  return true;
}

struct DesignColumn {
  int variable = 0;
  std::string label;
  bool operator==(const DesignColumn&) const = default;
};

/// Numeric expansion of a variable set. The intercept is implicit: `x` holds
/// only the selected terms' columns.
struct DesignMatrix {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  std::vector<DesignColumn> columns;
  std::map<int, std::vector<int>> column_groups;

  Eigen::Index n_rows() const { return y.size(); }
  Eigen::Index n_cols() const { return x.cols(); }
};

namespace detail {

struct ColumnBlock {
  std::vector<std::string> labels;
  std::vector<Eigen::VectorXd> values;
};

inline ColumnBlock main_block(const Dataset& d, std::size_t col_index) {
  const Column& c = d.columns[col_index];
  const auto n = static_cast<Eigen::Index>(d.n_rows());
  ColumnBlock b;
  if (c.spec.kind == ColumnKind::factor) {
    for (std::size_t k = 1; k < c.spec.levels.size(); ++k) {
      Eigen::VectorXd v(n);
      for (Eigen::Index r = 0; r < n; ++r) {
        int code = c.codes[static_cast<std::size_t>(r)];
        if (code < 0) throw std::invalid_argument("expand: missing cell in '" + c.spec.name + "'");
        v[r] = code == static_cast<int>(k) ? 1.0 : 0.0;
      }
      b.labels.push_back(c.spec.name + "=" + c.spec.levels[k]);
      b.values.push_back(std::move(v));
    }
  } else {
    Eigen::VectorXd v(n);
    for (Eigen::Index r = 0; r < n; ++r) {
      double x = c.values[static_cast<std::size_t>(r)];
      if (!std::isfinite(x)) throw std::invalid_argument("expand: non-finite cell in '" + c.spec.name + "'");
      v[r] = x;
    }
    b.labels.push_back(c.spec.name);
    b.values.push_back(std::move(v));
  }
  return b;
}

inline Eigen::VectorXd outcome_vector(const Dataset& d) {
  const Column& c = d.columns[d.outcome_index()];
  Eigen::VectorXd y(static_cast<Eigen::Index>(d.n_rows()));
  for (std::size_t r = 0; r < d.n_rows(); ++r) {
    if (std::isnan(c.values[r])) throw std::invalid_argument("expand: missing outcome");
    y[static_cast<Eigen::Index>(r)] = c.values[r];
  }
  return y;
}

}  // namespace detail

/// Design with no terms (intercept-only model).
inline DesignMatrix intercept_only_design(const Dataset& d) {
  DesignMatrix m;
  m.y = detail::outcome_vector(d);
  m.x.resize(m.y.size(), 0);
  return m;
}

/// Expands `selected` (which must respect strong hierarchy) into design
/// columns in ascending variable-index order. Factors use treatment coding
/// against their first level; an interaction contributes the product of every
/// column of its first parent with every column of its second parent.
inline DesignMatrix expand(const Dataset& d, const VariableSpace& space, const std::vector<int>& selected) {
  if (selected.empty()) throw std::invalid_argument("expand: empty variable set");
  std::vector<int> vars(selected.begin(), selected.end());
  std::sort(vars.begin(), vars.end());
  if (std::adjacent_find(vars.begin(), vars.end()) != vars.end())
    throw std::invalid_argument("expand: duplicate variable index");
  for (int v : vars)
    if (!space.contains(v)) throw std::invalid_argument("expand: unknown variable index " + std::to_string(v));
  if (!satisfies_hierarchy(space, vars))
    throw std::invalid_argument("expand: variable set violates strong hierarchy");

  const auto predictors = d.predictor_indices();
  if (static_cast<int>(predictors.size()) != space.n_main())
    throw std::invalid_argument("expand: dataset predictors do not match the variable space");

  std::map<int, detail::ColumnBlock> blocks;
  for (int v : vars)
    if (space.is_main(v)) blocks.emplace(v, detail::main_block(d, predictors[static_cast<std::size_t>(v - 1)]));

  DesignMatrix m;
  m.y = detail::outcome_vector(d);
  std::vector<Eigen::VectorXd> cols;
  for (int v : vars) {
    auto& group = m.column_groups[v];
    if (space.is_main(v)) {
      const auto& b = blocks.at(v);
      for (std::size_t k = 0; k < b.values.size(); ++k) {
        group.push_back(static_cast<int>(cols.size()));
        cols.push_back(b.values[k]);
        m.columns.push_back({v, b.labels[k]});
      }
    } else {
      auto [i, j] = space.pair_of(v);
      const auto& a = blocks.at(i);
      const auto& b = blocks.at(j);
      for (std::size_t ka = 0; ka < a.values.size(); ++ka)
        for (std::size_t kb = 0; kb < b.values.size(); ++kb) {
          group.push_back(static_cast<int>(cols.size()));
          cols.push_back(a.values[ka].cwiseProduct(b.values[kb]));
          m.columns.push_back({v, a.labels[ka] + ":" + b.labels[kb]});
        }
    }
  }
  m.x.resize(m.y.size(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) m.x.col(static_cast<Eigen::Index>(k)) = cols[k];
  return m;
}

}  // namespace gaselect
