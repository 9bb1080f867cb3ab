#include <gtest/gtest.h>

#include "oracles.hpp"
#include "posh/coarse.hpp"
#include "posh/common.hpp"

namespace posh {
namespace {

TEST(Coarse, CellCount) {
  EXPECT_EQ(coarse_cell_count(1), 1U);
  EXPECT_EQ(coarse_cell_count(1000), 1U);
  EXPECT_EQ(coarse_cell_count(1001), 2U);
  EXPECT_EQ(coarse_cell_count(10000), 10U);
}

TEST(Coarse, ListsPartitionAndAssignmentsAreNearest) {
  const Matrix x = oracle::random_matrix(3500, 4, 1);
  const CoarseQuantizer q = coarse_fit(x, 2);
  ASSERT_EQ(q.cells(), 4U);
  std::vector<int> seen(3500, 0);
  for (const auto& list : q.lists) {
    EXPECT_TRUE(std::is_sorted(list.begin(), list.end()));
    for (auto id : list) ++seen[id];
  }
  for (int s : seen) EXPECT_EQ(s, 1);
  for (Eigen::Index i = 0; i < x.rows(); i += 37) {
    const auto a = q.assignments[static_cast<std::size_t>(i)];
    for (Eigen::Index c = 0; c < q.centroids.rows(); ++c) {
      EXPECT_LE((q.centroids.row(a) - x.row(i)).squaredNorm(),
                (q.centroids.row(c) - x.row(i)).squaredNorm());
    }
  }
}

TEST(Coarse, FullProbeReturnsEveryId) {
  const Matrix x = oracle::random_matrix(2100, 3, 3);
  std::vector<std::uint64_t> ids(2100);
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = 5000 + 2 * i;
  const CoarseQuantizer q = coarse_fit(x, 4, ids);
  const std::vector<double> query = {0.1, 0.2, 0.3};
  EXPECT_EQ(coarse_probe(q, query, 3), ids);
  EXPECT_EQ(coarse_probe(q, query, 99), ids);  // clamped
  EXPECT_LT(coarse_probe(q, query, 1).size(), ids.size());
  EXPECT_THROW(coarse_probe(q, query, 0), ArgumentError);
  EXPECT_THROW(coarse_fit(x, 1, std::span<const std::uint64_t>(ids).first(5)), ArgumentError);
}

}  // namespace
}  // namespace posh
