#include <gtest/gtest.h>

#include "asyncrev/model/encoder.hpp"
#include "asyncrev/transducer/greedy.hpp"
#include "test_util.hpp"

using namespace asyncrev;
using namespace asyncrev::testutil;

TEST(Greedy, SplitAndResumeEqualsFullDecode) {
  SeededRng rng(51);
  int nonempty = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const auto cfg = random_config(rng);
    const auto m = random_model(cfg, rng);
    const auto x = random_tensor(rng, static_cast<std::size_t>(draw(rng, 1, 40)),
                                 static_cast<std::size_t>(cfg.encoder.feature_dim));
    const auto enc = encoder_forward(x, cfg.encoder, m->params.encoder);
    const auto full = greedy_decode(enc, *m);
    nonempty += !full.tokens.empty();
    const auto split = static_cast<std::size_t>(draw(rng, 0, static_cast<int>(enc.rows())));
    const auto start = initial_pred_state(cfg.prediction, m->params.prediction);
    const auto head = greedy_decode_rows(enc, 0, split, *m, start, 0);
    const auto tail = greedy_decode_resume(enc.slice_rows(split, enc.rows()), *m, head.state,
                                           static_cast<long>(split));
    auto joined = head.delta;
    joined.append(tail.delta);
    ASSERT_EQ(joined, full) << "trial " << trial;
    EXPECT_EQ(full, offline_decode(x, *m));
    for (std::size_t i = 1; i < full.emit_frame.size(); ++i)
      EXPECT_LE(full.emit_frame[i - 1], full.emit_frame[i]);
  }
  EXPECT_GT(nonempty, 15);
}

TEST(Greedy, TiesGoToLowestIndexAndMaxEmitForcesAdvance) {
  SeededRng rng(52);
  const auto cfg = desk_default_config();
  Model m = Model::zeros(cfg);
  // Constant logits: blank 0, tokens 0 and 1 tied at 5.
  m.params.joint.b_out.value[1] = 5.0f;
  m.params.joint.b_out.value[2] = 5.0f;
  const auto enc = random_tensor(rng, 3, 32);
  const auto hyp = greedy_decode(enc, m, GreedyOptions{4});
  EXPECT_EQ(hyp.tokens, std::vector<int>(12, 0));
  EXPECT_EQ(hyp.emit_frame, (std::vector<long>{0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2}));

  // A blank tie goes to blank.
  m.params.joint.b_out.value[0] = 5.0f;
  EXPECT_TRUE(greedy_decode(enc, m).tokens.empty());
}

TEST(Greedy, EmptyInputGivesEmptyHypothesis) {
  SeededRng rng(53);
  const auto m = random_model(desk_default_config(), rng);
  EXPECT_EQ(offline_decode(Tensor::matrix(0, 8), *m), Hypothesis{});
  EXPECT_EQ(greedy_decode(Tensor::matrix(0, 32), *m), Hypothesis{});
}
