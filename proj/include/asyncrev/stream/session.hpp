#pragma once

// Chunked streaming decoder with asynchronous revision.
//
// Every push recomputes the encoder over the newest R_e + 1 chunks, layer by
// layer, reading finalized activations to the left as fixed memory and
// treating anything right of the newest chunk as absent. The oldest chunk of
// that window is then finalized and never touched again. The decoder restores
// its checkpoint, re-decodes every frame after it, commits the tokens of chunks
// at least R_d behind the newest one and moves the checkpoint there. The rest
// is returned as a temporary suffix that the next push replaces.
//
// With R_e * chunk_frames >= right_context_frames and R_d >= R_e, every
// committed token is computed from fully-contexted encoder frames, so the
// final output equals offline greedy decoding exactly.

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "json.hpp"

#include "asyncrev/model/model.hpp"
#include "asyncrev/transducer/greedy.hpp"

namespace asyncrev {

inline constexpr int kFrameShiftMs = 10;

struct RevisionPolicy {
  int chunk_frames = 40;
  int encoder_revise = 0;  // R_e, in chunks
  int decoder_revise = 0;  // R_d, in chunks

  bool operator==(const RevisionPolicy&) const = default;
};

// Throws ConfigError: chunk_frames >= 1 and divisible by the encoder's total
// stride, revision depths non-negative.
void validate(const RevisionPolicy& policy, const EncoderConfig& encoder);

// Delay between a chunk's arrival and the commit of its tokens.
long algorithmic_latency_ms(const RevisionPolicy& policy);

// Smallest R_e for which finalized chunks always carry full right context.
int exact_revision_depth(const EncoderConfig& encoder, int chunk_frames);

enum class ChunkStatus { kTemporary, kFinalized };

struct ChunkRecord {
  int index = 0;
  Tensor input_frames;              // [n x feature_dim], n <= chunk_frames
  std::vector<Tensor> activations;  // per encoder layer, rows of this chunk's span
  ChunkStatus status = ChunkStatus::kTemporary;
};

// FNV-1a over the raw bytes of every activation tensor.
std::uint64_t activation_digest(const ChunkRecord& chunk);

struct DecoderCheckpoint {
  int boundary_chunk = -1;  // chunks <= boundary are committed
  PredState<float> pred_state;
  Hypothesis committed;
  long frame_cursor = 0;  // first encoder frame after the boundary
};

struct IncrementalResult {
  Hypothesis newly_committed;
  Hypothesis temporary;
  int chunk_index = -1;
};

struct TraceEvent {
  enum class Kind { kPush, kFinish } kind = Kind::kPush;
  int chunk = -1;
  int revised_begin = 0;  // encoder chunks recomputed: [begin, end)
  int revised_end = 0;
  std::vector<int> finalized;
  std::vector<std::uint64_t> finalized_digest;
  std::vector<int> committed;  // tokens committed at this step
  std::vector<int> temporary;
  std::size_t committed_total = 0;
  int checkpoint_boundary = -1;
};

nlohmann::json to_json(const TraceEvent& event);

class StreamSession {
 public:
  StreamSession(std::shared_ptr<const Model> model, RevisionPolicy policy,
                GreedyOptions greedy = {});

  // Full chunks of exactly chunk_frames rows. A single shorter chunk is
  // accepted as the end of the utterance; after it only finish() is allowed.
  IncrementalResult push_chunk(const Tensor& frames);

  // Finalizes everything and returns committed prefix ++ flushed suffix.
  // Idempotent.
  Hypothesis finish();

  bool finished() const { return finished_; }
  const RevisionPolicy& policy() const { return policy_; }
  const std::vector<ChunkRecord>& chunks() const { return chunks_; }
  const DecoderCheckpoint& checkpoint() const { return checkpoint_; }
  const std::vector<TraceEvent>& trace() const { return trace_; }

  // Top-layer activations of every chunk so far, in order.
  Tensor encoder_output() const;

 private:
  long span_begin(int chunk, int stride) const;
  long span_end(int chunk, int stride) const;
  Tensor gather(std::size_t layer_input, int stride, long lo, long hi) const;
  void revise_encoder(int window_begin, int newest);
  Tensor top_rows(int first_chunk, int last_chunk) const;
  std::vector<int> finalize(int chunk);

  std::shared_ptr<const Model> model_;
  RevisionPolicy policy_;
  GreedyOptions greedy_;
  std::vector<LayerPlan> plan_;
  int total_stride_ = 1;

  std::vector<ChunkRecord> chunks_;
  DecoderCheckpoint checkpoint_;
  std::vector<TraceEvent> trace_;
  bool tail_pushed_ = false;
  bool finished_ = false;
  Hypothesis final_;
};

// Streams a whole utterance through a fresh session: full chunks, then the
// remainder as a short chunk, then finish().
Hypothesis stream_decode(const std::shared_ptr<const Model>& model, const Tensor& features,
                         const RevisionPolicy& policy, const GreedyOptions& greedy = {},
                         std::vector<TraceEvent>* trace = nullptr);

}  // namespace asyncrev
