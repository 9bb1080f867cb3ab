#include <gtest/gtest.h>

#include "oracles.hpp"
#include "posh/codes.hpp"
#include "posh/common.hpp"
#include "posh/rng.hpp"

namespace posh {
namespace {

TEST(Wta, MatchesExhaustiveMinimizer) {
  Rng rng(42);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t D = 1 + rng.below(10);
    const std::size_t alpha = 1 + rng.below(D);
    std::vector<double> y(D);
    for (auto& v : y) v = rng.normal() * 2.0;
    EXPECT_EQ(wta(y, alpha).indices, oracle::exhaustive_wta(y, alpha)) << "trial " << trial;
  }
}

TEST(Wta, SmallExamples) {
  EXPECT_EQ(wta(std::vector<double>{0.1, 0.9, 0.5, 0.7}, 2).indices,
            (std::vector<std::uint32_t>{1, 3}));
  EXPECT_EQ(wta(std::vector<double>{3.0}, 1).indices, (std::vector<std::uint32_t>{0}));
  EXPECT_EQ(wta(std::vector<double>{-1, -2, -3}, 3).indices,
            (std::vector<std::uint32_t>{0, 1, 2}));
}

TEST(Wta, TiesBreakTowardLowerIndex) {
  EXPECT_EQ(wta(std::vector<double>{1, 1, 1, 1}, 2).indices, (std::vector<std::uint32_t>{0, 1}));
  EXPECT_EQ(wta(std::vector<double>{0, 2, 1, 2, 1}, 3).indices,
            (std::vector<std::uint32_t>{1, 2, 3}));
  // integer-valued inputs keep every candidate loss exact, so the oracle agrees
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t D = 2 + rng.below(9);
    const std::size_t alpha = 1 + rng.below(D);
    std::vector<double> y(D);
    for (auto& v : y) v = static_cast<double>(rng.below(3));
    EXPECT_EQ(wta(y, alpha).indices, oracle::exhaustive_wta(y, alpha));
  }
}

TEST(Wta, ScaleInvariance) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> y(64);
    for (auto& v : y) v = rng.normal();
    const double beta = 0.01 + rng.uniform() * 100.0;
    EXPECT_TRUE(scale_invariance_check(y, beta, 8));
  }
  EXPECT_THROW(scale_invariance_check(std::vector<double>{1, 2}, 0.0, 1), ArgumentError);
}

TEST(Wta, RejectsBadAlpha) {
  EXPECT_THROW(wta(std::vector<double>{1, 2}, 0), ArgumentError);
  EXPECT_THROW(wta(std::vector<double>{1, 2}, 3), ArgumentError);
}

TEST(SignCode, BitsFollowStrictPositivity) {
  const std::vector<double> y = {1.0, -1.0, 0.0, 2.5, -0.0};
  const DenseCode c = sign_code(y);
  EXPECT_EQ(c.dim, 5U);
  EXPECT_TRUE(c.bit(0));
  EXPECT_FALSE(c.bit(1));
  EXPECT_FALSE(c.bit(2));
  EXPECT_TRUE(c.bit(3));
  EXPECT_FALSE(c.bit(4));
}

TEST(DenseHamming, MatchesBitLoop) {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(130), b(130);
    for (auto& v : a) v = rng.normal();
    for (auto& v : b) v = rng.normal();
    const DenseCode ca = sign_code(a), cb = sign_code(b);
    std::uint32_t expected = 0;
    for (std::size_t i = 0; i < 130; ++i) expected += (a[i] > 0) != (b[i] > 0) ? 1U : 0U;
    EXPECT_EQ(dense_hamming(ca, cb), expected);
  }
}

TEST(ValidateCode, RejectsMalformed) {
  EXPECT_NO_THROW(validate_code(SparseCode{8, {0, 3, 7}}));
  EXPECT_THROW(validate_code(SparseCode{8, {3, 3}}), ArgumentError);
  EXPECT_THROW(validate_code(SparseCode{8, {4, 2}}), ArgumentError);
  EXPECT_THROW(validate_code(SparseCode{8, {8}}), ArgumentError);
  EXPECT_THROW(validate_code(SparseCode{8, {}}), ArgumentError);
}

}  // namespace
}  // namespace posh
