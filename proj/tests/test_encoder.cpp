#include <gtest/gtest.h>

#include "asyncrev/core/errors.hpp"
#include "asyncrev/core/ops.hpp"
#include "asyncrev/model/encoder.hpp"
#include "test_util.hpp"

using namespace asyncrev;
using namespace asyncrev::testutil;

namespace {

bool rows_equal(const Tensor& a, std::size_t ra, const Tensor& b, std::size_t rb) {
  const auto x = a.row(ra), y = b.row(rb);
  return std::equal(x.begin(), x.end(), y.begin(), y.end());
}

}  // namespace

TEST(Subsampler, OutputLengthIsCeilHalf) {
  SeededRng rng(1);
  ModelConfig cfg = desk_default_config();
  cfg.encoder.feature_dim = 3;
  const auto m = Model::initialize(cfg, rng);
  for (std::size_t t = 1; t <= 9; ++t) {
    const auto x = random_tensor(rng, t, 3);
    const auto y = subsample_forward(x, cfg.encoder.subsamplers[0], m.params.encoder.subsamplers[0]);
    EXPECT_EQ(y.rows(), (t + 1) / 2);
  }
  EXPECT_THROW(subsample_forward(Tensor::matrix(0, 3), cfg.encoder.subsamplers[0],
                                 m.params.encoder.subsamplers[0]),
               DimensionError);
}

TEST(Encoder, OutputLengthFollowsTotalStride) {
  SeededRng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto cfg = random_config(rng);
    const auto m = Model::initialize(cfg, rng);
    const auto t = static_cast<std::size_t>(draw(rng, 1, 30));
    const auto y = encoder_forward(random_tensor(rng, t, cfg.encoder.feature_dim), cfg.encoder,
                                   m.params.encoder);
    long expect = static_cast<long>(t);
    for (std::size_t i = 0; i < cfg.encoder.subsamplers.size(); ++i)
      expect = strided_length(expect, 2);
    EXPECT_EQ(static_cast<long>(y.rows()), expect);
    EXPECT_EQ(static_cast<int>(y.cols()), layer_plan(cfg.encoder).back().out_dim);
  }
}

TEST(Encoder, WrongFeatureWidthThrows) {
  SeededRng rng(3);
  const auto cfg = desk_default_config();
  const auto m = Model::initialize(cfg, rng);
  EXPECT_THROW(encoder_forward(Tensor::matrix(5, 3), cfg.encoder, m.params.encoder),
               DimensionError);
  EXPECT_THROW(encoder_forward(Tensor::matrix(0, 8), cfg.encoder, m.params.encoder),
               DimensionError);
}

// Perturbing input frame f may change output s only inside
// [s*S - left_context_frames, s*S + right_context_frames], and the right edge
// of that window is really read.
TEST(Encoder, ReceptiveFieldLocality) {
  SeededRng rng(4);
  int right_edge_checks = 0, right_edge_hits = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const auto cfg = random_config(rng);
    const auto m = Model::initialize(cfg, rng);
    const int S = total_stride(cfg.encoder);
    const long L = left_context_frames(cfg.encoder), R = right_context_frames(cfg.encoder);
    const auto t = static_cast<std::size_t>(draw(rng, 8, 40));
    const auto x = random_tensor(rng, t, cfg.encoder.feature_dim);
    const auto base = encoder_forward(x, cfg.encoder, m.params.encoder);
    std::vector<bool> edge_seen(base.rows(), false);
    for (std::size_t f = 0; f < t; ++f) {
      auto xp = x;
      for (auto& v : xp.row(f)) v += 3.0f;
      const auto y = encoder_forward(xp, cfg.encoder, m.params.encoder);
      for (std::size_t s = 0; s < y.rows(); ++s) {
        const long lo = static_cast<long>(s) * S - L, hi = static_cast<long>(s) * S + R;
        const bool changed = !rows_equal(base, s, y, s);
        const long fl = static_cast<long>(f);
        if (fl < lo || fl > hi) {
          ASSERT_FALSE(changed) << "frame " << f << " leaked into output " << s;
        }
        if (R > 0 && fl == hi && changed) edge_seen[s] = true;
      }
    }
    if (R > 0) {
      for (std::size_t s = 0; s < base.rows(); ++s) {
        if (static_cast<long>(s) * S + R < static_cast<long>(t)) {
          ++right_edge_checks;
          right_edge_hits += edge_seen[s];
        }
      }
    }
  }
  ASSERT_GT(right_edge_checks, 50);
  EXPECT_GT(right_edge_hits, right_edge_checks * 8 / 10);
}

TEST(MemoryLayer, RangeForwardMatchesFullForwardGivenContext) {
  SeededRng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const LayerContext ctx{draw(rng, 0, 4), draw(rng, 0, 4), 1};
    ModelConfig cfg = desk_default_config();
    cfg.encoder.memory_layers = {ctx};
    const auto m = Model::initialize(cfg, rng);
    const auto& p = m.params.encoder.memory_layers[0];
    const long t = draw(rng, 1, 25);
    const auto x = random_tensor(rng, static_cast<std::size_t>(t), 32);
    const auto full = memory_layer_forward(x, ctx, p);
    const long b = draw(rng, 0, static_cast<int>(t - 1));
    const long e = draw(rng, static_cast<int>(b + 1), static_cast<int>(t));
    const long lo = std::max(0L, b - ctx.left_taps), hi = std::min(t, e + ctx.right_taps);
    const auto window = x.slice_rows(static_cast<std::size_t>(lo), static_cast<std::size_t>(hi));
    const auto part = memory_range(window, lo, b, e, ctx, p, TapGate{});
    for (long r = b; r < e; ++r)
      ASSERT_TRUE(rows_equal(full, static_cast<std::size_t>(r), part,
                             static_cast<std::size_t>(r - b)));
  }
}

TEST(MemoryLayer, NoTapsIsResidualPlusProjection) {
  SeededRng rng(6);
  ModelConfig cfg = desk_default_config();
  cfg.encoder.memory_layers = {{0, 0, 1}};
  const auto m = Model::initialize(cfg, rng);
  const auto& p = m.params.encoder.memory_layers[0];
  const auto x = random_tensor(rng, 4, 32);
  const auto y = memory_layer_forward(x, {0, 0, 1}, p);
  auto h = Tensor::matrix(4, 32);
  for (std::size_t r = 0; r < 4; ++r) std::copy(p.b_hidden.value.values().begin(), p.b_hidden.value.values().end(), h.row(r).begin());
  matmul_acc(x, p.w_hidden.value, h);
  for (auto& v : h.values()) v = std::max(v, 0.0f);
  const auto proj = matmul(h, p.w_proj.value);
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_EQ(y[i], x[i] + proj[i]);
}

TEST(MemoryLayer, RangeErrors) {
  SeededRng rng(7);
  const auto cfg = desk_default_config();
  const auto m = Model::initialize(cfg, rng);
  const auto& p = m.params.encoder.memory_layers[0];
  const LayerContext ctx = cfg.encoder.memory_layers[0];
  const auto x = random_tensor(rng, 10, 32);
  // Input window starts after the left context the outputs need.
  EXPECT_THROW(memory_range(x, 3, 4, 8, ctx, p, TapGate{}), DimensionError);
  // Outputs beyond the input window.
  EXPECT_THROW(memory_range(x, 0, 5, 12, ctx, p, TapGate{}), DimensionError);
  EXPECT_THROW(memory_range(Tensor::matrix(4, 7), 0, 0, 4, ctx, p, TapGate{}), DimensionError);
}

TEST(Subsampler, RangeForwardMatchesFullForward) {
  SeededRng rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    const LayerContext ctx{draw(rng, 0, 3), draw(rng, 0, 2), 2};
    ModelConfig cfg = desk_default_config();
    cfg.encoder.subsamplers = {ctx};
    const auto m = Model::initialize(cfg, rng);
    const auto& p = m.params.encoder.subsamplers[0];
    const long t = draw(rng, 1, 25);
    const auto x = random_tensor(rng, static_cast<std::size_t>(t), 8);
    const auto full = subsample_forward(x, ctx, p);
    const long n = static_cast<long>(full.rows());
    const long b = draw(rng, 0, static_cast<int>(n - 1));
    const long e = draw(rng, static_cast<int>(b + 1), static_cast<int>(n));
    const long lo = std::max(0L, 2 * b - ctx.left_taps);
    const long hi = std::min(t, 2 * (e - 1) + ctx.right_taps + 1);
    const auto window = x.slice_rows(static_cast<std::size_t>(lo), static_cast<std::size_t>(hi));
    const auto part = subsample_range(window, lo, b, e, ctx, p, TapGate{});
    for (long r = b; r < e; ++r)
      ASSERT_TRUE(rows_equal(full, static_cast<std::size_t>(r), part,
                             static_cast<std::size_t>(r - b)));
  }
}
