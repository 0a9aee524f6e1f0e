#include <gtest/gtest.h>

#include <vector>

#include "asyncrev/training/metrics.hpp"

using namespace asyncrev;

using V = std::vector<int>;

TEST(EditDistance, Basics) {
  EXPECT_EQ(edit_distance(V{}, V{}), 0u);
  EXPECT_EQ(edit_distance(V{1, 2, 3}, V{1, 2, 3}), 0u);
  EXPECT_EQ(edit_distance(V{1, 2, 3}, V{}), 3u);
  EXPECT_EQ(edit_distance(V{}, V{4, 5}), 2u);
  EXPECT_EQ(edit_distance(V{1, 2, 3}, V{1, 9, 3}), 1u);
  EXPECT_EQ(edit_distance(V{1, 2, 3, 4}, V{2, 3, 4, 5}), 2u);
  EXPECT_EQ(edit_distance(V{1, 2}, V{2, 1}), 2u);
}

TEST(Cer, Examples) {
  EXPECT_EQ(cer(V{1, 2, 3}, V{1, 2, 3}), 0.0);
  EXPECT_DOUBLE_EQ(cer(V{1, 2, 3}, V{1, 7, 3}), 1.0 / 3.0);
  EXPECT_EQ(cer(V{1}, V{}), 1.0);
  EXPECT_EQ(cer(V{}, V{}), 0.0);
  EXPECT_EQ(cer(V{}, V{1, 2}), 2.0);
  EXPECT_EQ(cer(V{1, 2}, V{1, 2, 3, 4}), 1.0);
}
