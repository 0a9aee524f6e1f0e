#include "asyncrev/stream/session.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <string>

#include "asyncrev/core/errors.hpp"

namespace asyncrev {

void validate(const RevisionPolicy& policy, const EncoderConfig& encoder) {
  if (policy.chunk_frames < 1) throw ConfigError("chunk_frames must be at least 1");
  if (policy.encoder_revise < 0 || policy.decoder_revise < 0)
    throw ConfigError("revision depths must be non-negative");
  const int stride = total_stride(encoder);
  if (policy.chunk_frames % stride != 0)
    throw ConfigError("chunk_frames " + std::to_string(policy.chunk_frames) +
                      " is not a multiple of the encoder stride " + std::to_string(stride));
}

long algorithmic_latency_ms(const RevisionPolicy& policy) {
  return static_cast<long>(policy.decoder_revise) * policy.chunk_frames * kFrameShiftMs;
}

int exact_revision_depth(const EncoderConfig& encoder, int chunk_frames) {
  if (chunk_frames < 1) throw ConfigError("chunk_frames must be at least 1");
  const int w = right_context_frames(encoder);
  return (w + chunk_frames - 1) / chunk_frames;
}

std::uint64_t activation_digest(const ChunkRecord& chunk) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& a : chunk.activations) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(a.data());
    for (std::size_t i = 0; i < a.size() * sizeof(float); ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  }
  return h;
}

nlohmann::json to_json(const TraceEvent& e) {
  nlohmann::json j;
  j["event"] = e.kind == TraceEvent::Kind::kPush ? "push" : "finish";
  j["chunk"] = e.chunk;
  j["revised"] = {e.revised_begin, e.revised_end};
  j["finalized"] = e.finalized;
  std::vector<std::string> digests;
  for (auto d : e.finalized_digest) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(d));
    digests.emplace_back(buf);
  }
  j["digests"] = digests;
  j["committed"] = e.committed;
  j["temporary"] = e.temporary;
  j["committed_total"] = e.committed_total;
  j["checkpoint"] = e.checkpoint_boundary;
  return j;
}

StreamSession::StreamSession(std::shared_ptr<const Model> model, RevisionPolicy policy,
                             GreedyOptions greedy)
    : model_(std::move(model)), policy_(policy), greedy_(greedy) {
  if (!model_) throw ConfigError("stream session needs a model");
  validate(model_->config);
  validate(policy_, model_->config.encoder);
  plan_ = layer_plan(model_->config.encoder);
  total_stride_ = total_stride(model_->config.encoder);
  checkpoint_.pred_state =
      initial_pred_state(model_->config.prediction, model_->params.prediction);
}

// Chunk c covers input frames [c*C, c*C + n_c); at a layer with stride S that
// is rows [c*C/S, ceil((c*C + n_c)/S)).
long StreamSession::span_begin(int chunk, int stride) const {
  return static_cast<long>(chunk) * policy_.chunk_frames / stride;
}

long StreamSession::span_end(int chunk, int stride) const {
  const long end = static_cast<long>(chunk) * policy_.chunk_frames +
                   static_cast<long>(chunks_[chunk].input_frames.rows());
  return strided_length(end, stride);
}

// Rows [lo, hi) of the input to layer `layer_input` (0 = raw frames), pieced
// together from the chunk records.
Tensor StreamSession::gather(std::size_t layer_input, int stride, long lo, long hi) const {
  const std::size_t cols = layer_input == 0
                               ? static_cast<std::size_t>(model_->config.encoder.feature_dim)
                               : static_cast<std::size_t>(plan_[layer_input - 1].out_dim);
  Tensor out = Tensor::matrix(static_cast<std::size_t>(hi - lo), cols);
  const int first = static_cast<int>(lo * stride / policy_.chunk_frames);
  for (int c = first; c < static_cast<int>(chunks_.size()); ++c) {
    const long b = span_begin(c, stride);
    if (b >= hi) break;
    const Tensor& src = layer_input == 0 ? chunks_[c].input_frames
                                         : chunks_[c].activations[layer_input - 1];
    for (long q = std::max(lo, b); q < std::min(hi, b + static_cast<long>(src.rows())); ++q) {
      const auto row = src.row(static_cast<std::size_t>(q - b));
      std::copy(row.begin(), row.end(), out.row(static_cast<std::size_t>(q - lo)).begin());
    }
  }
  return out;
}

void StreamSession::revise_encoder(int window_begin, int newest) {
  const auto& params = model_->params.encoder;
  std::size_t sub_i = 0, mem_i = 0;
  for (std::size_t l = 0; l < plan_.size(); ++l) {
    const auto& layer = plan_[l];
    const long out_begin = span_begin(window_begin, layer.out_stride);
    const long out_end = span_end(newest, layer.out_stride);
    const long first_read = layer.kind == LayerKind::kSubsample
                                ? out_begin * layer.context.stride - layer.context.left_taps
                                : out_begin - layer.context.left_taps;
    const long in_lo = std::max(0L, first_read);
    const long in_hi = span_end(newest, layer.in_stride);
    const Tensor input = gather(l, layer.in_stride, in_lo, in_hi);
    Tensor out;
    if (layer.kind == LayerKind::kSubsample) {
      out = subsample_range(input, in_lo, out_begin, out_end, layer.context,
                            params.subsamplers[sub_i++], TapGate{});
    } else {
      out = memory_range(input, in_lo, out_begin, out_end, layer.context,
                         params.memory_layers[mem_i++], TapGate{});
    }
    for (int c = window_begin; c <= newest; ++c) {
      const long b = span_begin(c, layer.out_stride) - out_begin;
      const long e = span_end(c, layer.out_stride) - out_begin;
      chunks_[c].activations[l] =
          out.slice_rows(static_cast<std::size_t>(b), static_cast<std::size_t>(e));
    }
  }
}

Tensor StreamSession::top_rows(int first_chunk, int last_chunk) const {
  std::vector<Tensor> parts;
  for (int c = first_chunk; c <= last_chunk; ++c) parts.push_back(chunks_[c].activations.back());
  return concat_rows<float>(parts, static_cast<std::size_t>(plan_.back().out_dim));
}

std::vector<int> StreamSession::finalize(int chunk) {
  std::vector<int> done;
  for (int c = 0; c <= chunk; ++c) {
    if (chunks_[c].status == ChunkStatus::kFinalized) continue;
    chunks_[c].status = ChunkStatus::kFinalized;
    done.push_back(c);
  }
  return done;
}

IncrementalResult StreamSession::push_chunk(const Tensor& frames) {
  if (finished_) throw StateError("push_chunk after finish");
  if (tail_pushed_) throw StateError("push_chunk after a short final chunk");
  const auto feat = static_cast<std::size_t>(model_->config.encoder.feature_dim);
  if (frames.rank() != 2 || frames.cols() != feat)
    throw DimensionError("push_chunk: expected [n x " + std::to_string(feat) + "], got " +
                         shape_string(frames.shape()));
  const auto n = frames.rows();
  if (n == 0 || n > static_cast<std::size_t>(policy_.chunk_frames))
    throw DimensionError("push_chunk: chunk of " + std::to_string(n) + " frames, expected 1.." +
                         std::to_string(policy_.chunk_frames));
  if (n < static_cast<std::size_t>(policy_.chunk_frames)) tail_pushed_ = true;

  const int t = static_cast<int>(chunks_.size());
  ChunkRecord rec;
  rec.index = t;
  rec.input_frames = frames;
  rec.activations.resize(plan_.size());
  chunks_.push_back(std::move(rec));

  TraceEvent ev;
  ev.kind = TraceEvent::Kind::kPush;
  ev.chunk = t;

  // Encoder: recompute the window, freeze its oldest chunk.
  const int window_begin = std::max(0, t - policy_.encoder_revise);
  revise_encoder(window_begin, t);
  ev.revised_begin = window_begin;
  ev.revised_end = t + 1;
  if (t - policy_.encoder_revise >= 0) {
    ev.finalized = finalize(t - policy_.encoder_revise);
    for (int c : ev.finalized) ev.finalized_digest.push_back(activation_digest(chunks_[c]));
  }

  // Decoder: everything after the checkpoint is re-decoded from its state.
  const int b = checkpoint_.boundary_chunk;
  const int commit_to = t - policy_.decoder_revise;
  const Tensor enc = top_rows(b + 1, t);
  const long offset = checkpoint_.frame_cursor;
  IncrementalResult result;
  result.chunk_index = t;
  std::size_t split = 0;
  if (commit_to > b) {
    split = static_cast<std::size_t>(span_end(commit_to, total_stride_) - offset);
    auto head = greedy_decode_rows(enc, 0, split, *model_, checkpoint_.pred_state, offset, greedy_);
    checkpoint_.pred_state = std::move(head.state);
    checkpoint_.boundary_chunk = commit_to;
    checkpoint_.frame_cursor = offset + static_cast<long>(split);
    checkpoint_.committed.append(head.delta);
    result.newly_committed = std::move(head.delta);
  }
  result.temporary = greedy_decode_rows(enc, split, enc.rows(), *model_, checkpoint_.pred_state,
                                        offset + static_cast<long>(split), greedy_)
                         .delta;

  ev.committed = result.newly_committed.tokens;
  ev.temporary = result.temporary.tokens;
  ev.committed_total = checkpoint_.committed.size();
  ev.checkpoint_boundary = checkpoint_.boundary_chunk;
  trace_.push_back(std::move(ev));
  return result;
}

Hypothesis StreamSession::finish() {
  if (finished_) return final_;
  finished_ = true;
  TraceEvent ev;
  ev.kind = TraceEvent::Kind::kFinish;
  const int last = static_cast<int>(chunks_.size()) - 1;
  ev.chunk = last;
  if (last < 0) {
    trace_.push_back(std::move(ev));
    return final_;
  }
  // The last push already ran the encoder with the true utterance end as the
  // right edge, so temporary chunks hold their final values.
  ev.revised_begin = ev.revised_end = last + 1;
  ev.finalized = finalize(last);
  for (int c : ev.finalized) ev.finalized_digest.push_back(activation_digest(chunks_[c]));

  const int b = checkpoint_.boundary_chunk;
  if (b < last) {
    const Tensor enc = top_rows(b + 1, last);
    auto tail = greedy_decode_rows(enc, 0, enc.rows(), *model_, checkpoint_.pred_state,
                                   checkpoint_.frame_cursor, greedy_);
    checkpoint_.pred_state = std::move(tail.state);
    checkpoint_.boundary_chunk = last;
    checkpoint_.frame_cursor += static_cast<long>(enc.rows());
    checkpoint_.committed.append(tail.delta);
    ev.committed = tail.delta.tokens;
  }
  ev.committed_total = checkpoint_.committed.size();
  ev.checkpoint_boundary = checkpoint_.boundary_chunk;
  trace_.push_back(std::move(ev));
  final_ = checkpoint_.committed;
  return final_;
}

Tensor StreamSession::encoder_output() const {
  if (chunks_.empty()) return Tensor::matrix(0, static_cast<std::size_t>(plan_.back().out_dim));
  return top_rows(0, static_cast<int>(chunks_.size()) - 1);
}

Hypothesis stream_decode(const std::shared_ptr<const Model>& model, const Tensor& features,
                         const RevisionPolicy& policy, const GreedyOptions& greedy,
                         std::vector<TraceEvent>* trace) {
  StreamSession session(model, policy, greedy);
  const std::size_t c = static_cast<std::size_t>(policy.chunk_frames);
  for (std::size_t at = 0; at < features.rows(); at += c)
    session.push_chunk(features.slice_rows(at, std::min(features.rows(), at + c)));
  auto hyp = session.finish();
  if (trace) *trace = session.trace();
  return hyp;
}

}  // namespace asyncrev
