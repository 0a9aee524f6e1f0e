#include <gtest/gtest.h>

#include "asyncrev/core/errors.hpp"
#include "asyncrev/model/encoder.hpp"
#include "asyncrev/stream/session.hpp"
#include "crop_oracle.hpp"
#include "test_util.hpp"

using namespace asyncrev;
using namespace asyncrev::testutil;

TEST(CropMask, SegmentOfCountsBoundariesAtOrBefore) {
  const CropMask mask{{3, 7}};
  EXPECT_EQ(mask.segment_of(0), 0u);
  EXPECT_EQ(mask.segment_of(2), 0u);
  EXPECT_EQ(mask.segment_of(3), 1u);
  EXPECT_EQ(mask.segment_of(6), 1u);
  EXPECT_EQ(mask.segment_of(7), 2u);
  EXPECT_EQ(mask.segment_of(100), 2u);
}

TEST(CropMask, ValidateRejectsBadBoundaries) {
  EXPECT_NO_THROW(CropMask{}.validate(5));
  EXPECT_NO_THROW((CropMask{{1, 4}}.validate(5)));
  EXPECT_THROW((CropMask{{0}}.validate(5)), ConfigError);
  EXPECT_THROW((CropMask{{5}}.validate(5)), ConfigError);
  EXPECT_THROW((CropMask{{3, 3}}.validate(5)), ConfigError);
  EXPECT_THROW((CropMask{{4, 2}}.validate(5)), ConfigError);
}

TEST(CropMask, GateComparesSegmentsAtFrameRate) {
  const CropMask mask{{4}};
  const auto g1 = crop_gate(mask, 1);
  EXPECT_TRUE(g1(2, 3));
  EXPECT_FALSE(g1(3, 4));
  const auto g2 = crop_gate(mask, 2);
  EXPECT_TRUE(g2(0, 1));   // frames 0 and 2
  EXPECT_FALSE(g2(1, 2));  // frames 2 and 4
}

TEST(CropOracle, EmptyMaskIsTheUnmaskedForward) {
  SeededRng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const auto cfg = random_config(rng);
    const auto m = random_model(cfg, rng);
    const auto x = random_tensor(rng, static_cast<std::size_t>(draw(rng, 1, 30)),
                                 static_cast<std::size_t>(cfg.encoder.feature_dim));
    const CropMask empty;
    EXPECT_TRUE(bit_equal(encoder_forward(x, cfg.encoder, m->params.encoder, &empty),
                          encoder_forward(x, cfg.encoder, m->params.encoder)));
  }
}

TEST(CropOracle, MaskedForwardMatchesFrozenHistoryOnRandomConfigs) {
  SeededRng rng(12);
  int nontrivial = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto cfg = random_config(rng);
    const auto m = random_model(cfg, rng);
    const int t = draw(rng, 2, 40);
    const auto x = random_tensor(rng, static_cast<std::size_t>(t),
                                 static_cast<std::size_t>(cfg.encoder.feature_dim));
    const auto mask = random_mask(rng, t);
    const auto masked = encoder_forward(x, cfg.encoder, m->params.encoder, &mask);
    const auto oracle = frozen_history_oracle(x, *m, mask);
    ASSERT_TRUE(bit_equal(masked, oracle)) << "trial " << trial;
    if (!mask.boundaries.empty() && right_context_frames(cfg.encoder) > 0 &&
        !bit_equal(masked, encoder_forward(x, cfg.encoder, m->params.encoder)))
      ++nontrivial;
  }
  // The masks must actually bite for the comparison to mean anything.
  EXPECT_GT(nontrivial, 20);
}

TEST(CropOracle, ChunkBoundariesReproduceStreamingWithoutRevision) {
  SeededRng rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    const auto cfg = random_config(rng);
    const auto m = random_model(cfg, rng);
    const int stride = total_stride(cfg.encoder);
    const int chunk = stride * draw(rng, 1, 3);
    const int t = draw(rng, 1, 40);
    const auto x = random_tensor(rng, static_cast<std::size_t>(t),
                                 static_cast<std::size_t>(cfg.encoder.feature_dim));
    StreamSession session(m, {chunk, 0, 0});
    for (int at = 0; at < t; at += chunk)
      session.push_chunk(x.slice_rows(static_cast<std::size_t>(at),
                                      static_cast<std::size_t>(std::min(t, at + chunk))));
    session.finish();
    CropMask mask;
    for (int b = chunk; b < t; b += chunk) mask.boundaries.push_back(b);
    ASSERT_TRUE(bit_equal(session.encoder_output(),
                          encoder_forward(x, cfg.encoder, m->params.encoder, &mask)))
        << "trial " << trial;
  }
}
