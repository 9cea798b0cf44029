#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace gaselect;
using oracle::col;

namespace {

VariableSpace space_of(int n) {
  std::vector<std::string> names;
  for (int k = 1; k <= n; ++k) names.push_back("v" + std::to_string(k));
  return VariableSpace(names);
}

}  // namespace

TEST(VariableSpace, PairNumbering) {
  auto s = space_of(5);
  EXPECT_EQ(s.index_of_pair(1, 2), 6);
  EXPECT_EQ(s.index_of_pair(4, 5), 15);
  EXPECT_EQ(s.total(), 15);
  EXPECT_EQ(s.pair_of(6), (std::pair<int, int>{1, 2}));
  EXPECT_EQ(s.pair_of(15), (std::pair<int, int>{4, 5}));
  EXPECT_THROW(s.index_of_pair(2, 2), std::invalid_argument);
  EXPECT_THROW(s.index_of_pair(3, 1), std::invalid_argument);
}

TEST(VariableSpace, TotalMatchesBinomial) {
  for (int n = 1; n <= 40; ++n) EXPECT_EQ(space_of(n).total(), n + n * (n - 1) / 2);
  EXPECT_EQ(space_of(29).total(), 435);
}

TEST(VariableSpace, ExhaustiveRoundTrip) {
  for (int n : {2, 3, 10, 29}) {
    auto s = space_of(n);
    for (int v = n + 1; v <= s.total(); ++v) {
      auto p = s.pair_of(v);
      EXPECT_EQ(p, oracle::scan_pair(n, v));
      EXPECT_EQ(s.index_of_pair(p.first, p.second), v);
    }
  }
}

TEST(VariableSpace, Hierarchy) {
  auto s = space_of(5);
  EXPECT_TRUE(satisfies_hierarchy(s, {1, 2, 6}));
  EXPECT_FALSE(satisfies_hierarchy(s, {1, 6}));
  EXPECT_TRUE(satisfies_hierarchy(s, {3}));
}

namespace {

Dataset clinical() {
  std::vector<ColumnSpec> schema{col("age", ColumnKind::numeric), col("diabetic", ColumnKind::binary),
                                 col("ethnic", ColumnKind::factor), col("died", ColumnKind::binary, ColumnRole::outcome)};
  schema[2].levels = {"e1", "e2", "e3", "e4", "e5", "e6"};
  schema[2].closed_levels = true;
  std::string csv = "age,diabetic,ethnic,died\n";
  for (int r = 0; r < 12; ++r)
    csv += std::to_string(20 + 3 * r) + "," + std::to_string(r % 2) + ",e" + std::to_string(r % 6 + 1) + "," +
           std::to_string(r % 3 == 0) + "\n";
  return standardize(oracle::parse(csv, schema));
}

}  // namespace

TEST(Expand, SingleNumeric) {
  auto d = clinical();
  auto s = VariableSpace::from_dataset(d);
  auto m = expand(d, s, {1});
  ASSERT_EQ(m.n_cols(), 1);
  for (Eigen::Index r = 0; r < m.n_rows(); ++r) EXPECT_EQ(m.x(r, 0), d.column("age").values[static_cast<std::size_t>(r)]);
  EXPECT_EQ(m.columns[0].label, "age");
}

TEST(Expand, FactorTreatmentCoding) {
  auto d = clinical();
  auto s = VariableSpace::from_dataset(d);
  auto m = expand(d, s, {3});
  ASSERT_EQ(m.n_cols(), 5);
  EXPECT_EQ(m.columns[0].label, "ethnic=e2");
  for (Eigen::Index r = 0; r < m.n_rows(); ++r) {
    const int code = d.column("ethnic").codes[static_cast<std::size_t>(r)];
    for (int k = 0; k < 5; ++k) EXPECT_EQ(m.x(r, k), code == k + 1 ? 1.0 : 0.0);
  }
}

TEST(Expand, InteractionIsProduct) {
  auto d = clinical();
  auto s = VariableSpace::from_dataset(d);
  auto m = expand(d, s, {1, 2, s.index_of_pair(1, 2)});
  ASSERT_EQ(m.n_cols(), 3);
  for (Eigen::Index r = 0; r < m.n_rows(); ++r) EXPECT_EQ(m.x(r, 2), m.x(r, 0) * m.x(r, 1));
  EXPECT_EQ(m.columns[2].label, "age:diabetic");
}

TEST(Expand, FactorInteractionCartesian) {
  auto d = clinical();
  auto s = VariableSpace::from_dataset(d);
  auto m = expand(d, s, {1, 3, s.index_of_pair(1, 3)});
  EXPECT_EQ(m.n_cols(), 1 + 5 + 5);
  EXPECT_EQ(m.column_groups.at(s.index_of_pair(1, 3)).size(), 5u);
}

TEST(Expand, RejectsBadSelections) {
  auto d = clinical();
  auto s = VariableSpace::from_dataset(d);
  EXPECT_THROW(expand(d, s, {}), std::invalid_argument);
  EXPECT_THROW(expand(d, s, {1, 1}), std::invalid_argument);
  EXPECT_THROW(expand(d, s, {1, s.index_of_pair(1, 2)}), std::invalid_argument);
  EXPECT_THROW(expand(d, s, {99}), std::invalid_argument);
}
