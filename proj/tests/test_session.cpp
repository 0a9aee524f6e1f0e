#include <gtest/gtest.h>

#include <algorithm>

#include "asyncrev/core/errors.hpp"
#include "asyncrev/model/encoder.hpp"
#include "asyncrev/stream/session.hpp"
#include "test_util.hpp"

using namespace asyncrev;
using namespace asyncrev::testutil;

namespace {

struct Case {
  std::shared_ptr<const Model> model;
  Tensor features;
  int chunk = 0;
};

Case random_case(SeededRng& rng, int max_chunks = 12) {
  const auto cfg = random_config(rng);
  Case c;
  c.model = random_model(cfg, rng);
  c.chunk = total_stride(cfg.encoder) * draw(rng, 1, 3);
  const int t = draw(rng, 1, max_chunks * c.chunk);
  c.features = random_tensor(rng, static_cast<std::size_t>(t),
                             static_cast<std::size_t>(cfg.encoder.feature_dim));
  return c;
}

Tensor chunk_of(const Tensor& x, int chunk, int i) {
  const auto b = static_cast<std::size_t>(i * chunk);
  return x.slice_rows(b, std::min(x.rows(), b + static_cast<std::size_t>(chunk)));
}

int num_chunks(const Tensor& x, int chunk) {
  return static_cast<int>((x.rows() + static_cast<std::size_t>(chunk) - 1) / static_cast<std::size_t>(chunk));
}

bool bit_equal(const Tensor& a, const Tensor& b) {
  return a.shape() == b.shape() &&
         std::equal(a.values().begin(), a.values().end(), b.values().begin());
}

}  // namespace

TEST(Policy, Validation) {
  const auto enc = desk_default_config().encoder;
  EXPECT_NO_THROW(validate(RevisionPolicy{4, 0, 0}, enc));
  EXPECT_THROW(validate(RevisionPolicy{3, 0, 0}, enc), ConfigError);
  EXPECT_THROW(validate(RevisionPolicy{0, 0, 0}, enc), ConfigError);
  EXPECT_THROW(validate(RevisionPolicy{4, -1, 0}, enc), ConfigError);
  EXPECT_THROW(validate(RevisionPolicy{4, 0, -1}, enc), ConfigError);
}

TEST(Session, NoRevisionCommitsEveryChunkImmediately) {
  SeededRng rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = random_case(rng);
    StreamSession s(c.model, {c.chunk, 0, 0});
    Hypothesis streamed;
    for (int i = 0; i < num_chunks(c.features, c.chunk); ++i) {
      const auto r = s.push_chunk(chunk_of(c.features, c.chunk, i));
      EXPECT_TRUE(r.temporary.tokens.empty());
      EXPECT_EQ(s.checkpoint().boundary_chunk, i);
      EXPECT_EQ(s.chunks()[static_cast<std::size_t>(i)].status, ChunkStatus::kFinalized);
      streamed.append(r.newly_committed);
    }
    EXPECT_EQ(s.finish(), streamed);
    EXPECT_EQ(streamed, greedy_decode(s.encoder_output(), *c.model));
  }
}

// One chunk of right context: chunk 0 is first computed blind to chunk 1,
// then revised once chunk 1 arrives, and only then finalized.
TEST(Session, TwoPieceRevision) {
  SeededRng rng(62);
  ModelConfig cfg = desk_default_config();
  cfg.encoder.subsamplers.clear();
  cfg.encoder.memory_layers = {{2, 2, 1}};
  const auto m = random_model(cfg, rng);
  const auto x = random_tensor(rng, 8, 8);
  StreamSession s(m, {4, 1, 1});
  const auto first = s.push_chunk(x.slice_rows(0, 4));
  EXPECT_EQ(s.chunks()[0].status, ChunkStatus::kTemporary);
  EXPECT_TRUE(first.newly_committed.tokens.empty());
  EXPECT_EQ(s.checkpoint().boundary_chunk, -1);
  const Tensor blind = s.chunks()[0].activations.back();
  const auto second = s.push_chunk(x.slice_rows(4, 8));
  EXPECT_EQ(s.chunks()[0].status, ChunkStatus::kFinalized);
  EXPECT_EQ(s.chunks()[1].status, ChunkStatus::kTemporary);
  EXPECT_EQ(s.checkpoint().boundary_chunk, 0);
  const Tensor revised = s.chunks()[0].activations.back();
  EXPECT_FALSE(bit_equal(blind, revised));
  const auto offline = encoder_forward(x, cfg.encoder, m->params.encoder);
  EXPECT_TRUE(bit_equal(revised, offline.slice_rows(0, 4)));
  // The first push's temporary tokens are superseded, not kept.
  Hypothesis all = second.newly_committed;
  all.append(second.temporary);
  EXPECT_EQ(s.finish(), all);
  EXPECT_EQ(all, offline_decode(x, *m));
  ASSERT_EQ(s.trace().size(), 3u);
  EXPECT_EQ(s.trace()[1].revised_begin, 0);
  EXPECT_EQ(s.trace()[1].revised_end, 2);
  EXPECT_EQ(s.trace()[1].finalized, std::vector<int>{0});
}

TEST(Session, ExactRevisionDepthReproducesOffline) {
  SeededRng rng(63);
  for (int trial = 0; trial < 40; ++trial) {
    const auto c = random_case(rng);
    const int re = exact_revision_depth(c.model->config.encoder, c.chunk);
    const int rd = re + draw(rng, 0, 2);
    StreamSession s(c.model, {c.chunk, re, rd});
    for (int i = 0; i < num_chunks(c.features, c.chunk); ++i)
      s.push_chunk(chunk_of(c.features, c.chunk, i));
    const auto hyp = s.finish();
    ASSERT_EQ(hyp, offline_decode(c.features, *c.model)) << "trial " << trial;
    ASSERT_TRUE(bit_equal(s.encoder_output(), encoder_forward(c.features, c.model->config.encoder,
                                                              c.model->params.encoder)));
  }
}

TEST(Session, DecoderLagAtLeastEncoderLagDecodesFinalActivations) {
  SeededRng rng(64);
  for (int trial = 0; trial < 40; ++trial) {
    const auto c = random_case(rng);
    const int re = draw(rng, 0, 3);
    const int rd = re + draw(rng, 0, 2);
    StreamSession s(c.model, {c.chunk, re, rd});
    for (int i = 0; i < num_chunks(c.features, c.chunk); ++i)
      s.push_chunk(chunk_of(c.features, c.chunk, i));
    ASSERT_EQ(s.finish(), greedy_decode(s.encoder_output(), *c.model)) << "trial " << trial;
  }
}

TEST(Session, CommittedPrefixIsStableAndLagsByDecoderRevision) {
  SeededRng rng(65);
  for (int trial = 0; trial < 40; ++trial) {
    const auto c = random_case(rng);
    const int stride = total_stride(c.model->config.encoder);
    const RevisionPolicy p{c.chunk, draw(rng, 0, 3), draw(rng, 0, 3)};
    StreamSession s(c.model, p);
    Hypothesis committed;
    std::vector<Hypothesis> snapshots;
    for (int i = 0; i < num_chunks(c.features, c.chunk); ++i) {
      const auto r = s.push_chunk(chunk_of(c.features, c.chunk, i));
      committed.append(r.newly_committed);
      ASSERT_EQ(committed, s.checkpoint().committed);
      const long limit = static_cast<long>(std::max(0, i - p.decoder_revise + 1)) * c.chunk / stride;
      for (long f : r.newly_committed.emit_frame) ASSERT_LT(f, limit);
      snapshots.push_back(committed);
    }
    const auto final_hyp = s.finish();
    for (const auto& snap : snapshots) {
      ASSERT_LE(snap.size(), final_hyp.size());
      ASSERT_TRUE(std::equal(snap.tokens.begin(), snap.tokens.end(), final_hyp.tokens.begin()));
    }
  }
}

TEST(Session, FinalizedActivationsNeverChange) {
  SeededRng rng(66);
  for (int trial = 0; trial < 30; ++trial) {
    const auto c = random_case(rng);
    const RevisionPolicy p{c.chunk, draw(rng, 0, 3), draw(rng, 0, 3)};
    StreamSession s(c.model, p);
    std::vector<std::uint64_t> digest_at_finalize;
    auto check = [&] {
      for (const auto& ev : s.trace()) {
        for (std::size_t k = 0; k < ev.finalized.size(); ++k) {
          const auto idx = static_cast<std::size_t>(ev.finalized[k]);
          ASSERT_EQ(s.chunks()[idx].status, ChunkStatus::kFinalized);
          ASSERT_EQ(activation_digest(s.chunks()[idx]), ev.finalized_digest[k]);
        }
      }
    };
    for (int i = 0; i < num_chunks(c.features, c.chunk); ++i) {
      s.push_chunk(chunk_of(c.features, c.chunk, i));
      check();
      for (int j = 0; j <= i; ++j) {
        const bool fin = j <= i - p.encoder_revise;
        EXPECT_EQ(s.chunks()[static_cast<std::size_t>(j)].status,
                  fin ? ChunkStatus::kFinalized : ChunkStatus::kTemporary);
      }
    }
    s.finish();
    check();
    std::vector<int> all_finalized;
    for (const auto& ev : s.trace())
      all_finalized.insert(all_finalized.end(), ev.finalized.begin(), ev.finalized.end());
    std::vector<int> expect(static_cast<std::size_t>(num_chunks(c.features, c.chunk)));
    for (std::size_t i = 0; i < expect.size(); ++i) expect[i] = static_cast<int>(i);
    EXPECT_EQ(all_finalized, expect);
  }
}

TEST(Session, FinishIsIdempotentAndBlocksPushes) {
  SeededRng rng(67);
  const auto m = random_model(desk_default_config(), rng);
  StreamSession s(m, {4, 1, 1});
  s.push_chunk(random_tensor(rng, 4, 8));
  s.push_chunk(random_tensor(rng, 4, 8));
  const auto a = s.finish();
  const auto trace_len = s.trace().size();
  EXPECT_TRUE(s.finished());
  EXPECT_EQ(s.finish(), a);
  EXPECT_EQ(s.trace().size(), trace_len);
  EXPECT_THROW(s.push_chunk(random_tensor(rng, 4, 8)), StateError);

  StreamSession empty(m, {4, 1, 1});
  EXPECT_EQ(empty.finish(), Hypothesis{});
  EXPECT_EQ(empty.encoder_output().rows(), 0u);
}

TEST(Session, PushErrors) {
  SeededRng rng(68);
  const auto m = random_model(desk_default_config(), rng);
  StreamSession s(m, {4, 0, 0});
  EXPECT_THROW(s.push_chunk(random_tensor(rng, 4, 7)), DimensionError);
  EXPECT_THROW(s.push_chunk(Tensor::matrix(0, 8)), DimensionError);
  EXPECT_THROW(s.push_chunk(random_tensor(rng, 5, 8)), DimensionError);
  EXPECT_TRUE(s.chunks().empty());
  s.push_chunk(random_tensor(rng, 3, 8));
  EXPECT_THROW(s.push_chunk(random_tensor(rng, 4, 8)), StateError);
  EXPECT_THROW(StreamSession(m, {3, 0, 0}), ConfigError);
  EXPECT_THROW(StreamSession(nullptr, {4, 0, 0}), ConfigError);
}

TEST(Session, StreamDecodeHandlesShortTail) {
  SeededRng rng(69);
  const auto m = random_model(desk_default_config(), rng);
  const auto x = random_tensor(rng, 17, 8);
  const RevisionPolicy p{4, exact_revision_depth(m->config.encoder, 4),
                         exact_revision_depth(m->config.encoder, 4)};
  std::vector<TraceEvent> trace;
  EXPECT_EQ(stream_decode(m, x, p, {}, &trace), offline_decode(x, *m));
  EXPECT_EQ(trace.size(), 6u);
  EXPECT_EQ(trace.back().kind, TraceEvent::Kind::kFinish);
}

TEST(Session, TraceJson) {
  SeededRng rng(70);
  const auto m = random_model(desk_default_config(), rng);
  std::vector<TraceEvent> trace;
  stream_decode(m, random_tensor(rng, 12, 8), {4, 1, 2}, {}, &trace);
  ASSERT_EQ(trace.size(), 4u);
  const auto j = to_json(trace[1]);
  EXPECT_EQ(j.at("event"), "push");
  EXPECT_EQ(j.at("chunk"), 1);
  EXPECT_EQ(j.at("revised"), nlohmann::json::array({0, 2}));
  EXPECT_EQ(j.at("finalized"), nlohmann::json::array({0}));
  ASSERT_EQ(j.at("digests").size(), 1u);
  EXPECT_EQ(j.at("digests")[0].get<std::string>().size(), 16u);
  EXPECT_EQ(j.at("checkpoint"), -1);
  const auto f = to_json(trace.back());
  EXPECT_EQ(f.at("event"), "finish");
  EXPECT_EQ(f.at("checkpoint"), 2);
}

TEST(Latency, MillisecondsAndExactDepth) {
  EXPECT_EQ(algorithmic_latency_ms({40, 3, 1}), 400);
  EXPECT_EQ(algorithmic_latency_ms({40, 0, 3}), 1200);
  EXPECT_EQ(algorithmic_latency_ms({40, 0, 0}), 0);
  const auto desk = desk_default_config().encoder;  // 12 frames of right context
  EXPECT_EQ(exact_revision_depth(desk, 4), 3);
  EXPECT_EQ(exact_revision_depth(desk, 12), 1);
  EXPECT_EQ(exact_revision_depth(desk, 8), 2);
  EXPECT_THROW(exact_revision_depth(desk, 0), ConfigError);
}
