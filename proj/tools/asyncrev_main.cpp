// asyncrev: data generation, training, decoding and revision sweeps.

#include <iostream>

#include "CLI11.hpp"

#include "asyncrev/core/errors.hpp"
#include "asyncrev/harness/commands.hpp"

using namespace asyncrev;

int main(int argc, char** argv) {
  CLI::App app{"Chunked streaming transducer with asynchronous revision"};
  app.require_subcommand(1);
  app.set_version_flag("--version", code_version());

  GenDataOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Generate a synthetic dataset");
  gen_cmd->add_option("-n,--count", gen.count, "Number of utterances")->required();
  gen_cmd->add_option("--seed", gen.seed, "Utterance seed");
  gen_cmd->add_option("--out", gen.out, "Output dataset file")->required();
  gen_cmd->add_option("--vocab", gen.spec.vocab_size, "Vocabulary size");
  gen_cmd->add_option("--frames-per-token", gen.spec.frames_per_token, "Frames per token");
  gen_cmd->add_option("--feature-dim", gen.spec.feature_dim, "Feature dimension");
  gen_cmd->add_option("--noise", gen.spec.noise_sigma, "Gaussian noise sigma");
  gen_cmd->add_option("--min-len", gen.spec.min_label_length, "Minimum label length");
  gen_cmd->add_option("--max-len", gen.spec.max_label_length, "Maximum label length");
  gen_cmd->add_flag("--allow-repeats", gen.spec.allow_repeats, "Allow adjacent equal tokens");
  gen_cmd->add_option("--prototype-seed", gen.spec.prototype_seed, "Token embedding seed");

  TrainOptions tr;
  auto* train_cmd = app.add_subcommand("train", "Train a model");
  train_cmd->add_option("--data", tr.data, "Training dataset")->required();
  train_cmd->add_option("--out", tr.out_checkpoint, "Output checkpoint")->required();
  train_cmd->add_option("--loss-log", tr.loss_log, "Loss curve CSV");
  train_cmd->add_option("--preset", tr.model_preset, "Model preset")
      ->check(CLI::IsMember(preset_names()));
  train_cmd->add_option("--model-config", tr.model_config, "Model config JSON");
  train_cmd->add_option("--steps", tr.train.steps, "Optimizer steps");
  train_cmd->add_option("--batch", tr.train.batch_size, "Utterances per step");
  train_cmd->add_option("--lr", tr.train.adam.learning_rate, "Learning rate");
  train_cmd->add_option("--clip", tr.train.adam.clip_norm, "Gradient norm clip (0 = off)");
  train_cmd->add_option("--segments", tr.train.num_segments, "Segment cropping k (0 = off)");
  train_cmd->add_option("--min-segment", tr.train.min_segment, "Minimum segment frames");
  train_cmd->add_option("--seed", tr.train.seed, "Training seed");
  train_cmd->add_option("--log-every", tr.log_every, "Print loss every N steps");

  DecodeOptions dec;
  auto* decode_cmd = app.add_subcommand("decode", "Offline greedy decoding");
  decode_cmd->add_option("--checkpoint", dec.checkpoint, "Model checkpoint")->required();
  decode_cmd->add_option("--data", dec.data, "Dataset")->required();
  decode_cmd->add_option("--out", dec.out, "Results file");
  decode_cmd->add_option("--threads", dec.threads, "Worker threads");

  StreamOptions st;
  auto* stream_cmd = app.add_subcommand("stream", "Streaming decoding with revision");
  stream_cmd->add_option("--checkpoint", st.checkpoint, "Model checkpoint")->required();
  stream_cmd->add_option("--data", st.data, "Dataset")->required();
  stream_cmd->add_option("--chunk-frames", st.policy.chunk_frames, "Frames per chunk");
  stream_cmd->add_option("--encoder-revise", st.policy.encoder_revise, "Encoder revision depth");
  stream_cmd->add_option("--decoder-revise", st.policy.decoder_revise, "Decoder revision depth");
  stream_cmd->add_flag("--trace", st.trace, "Print the committed-token timeline");
  stream_cmd->add_option("--out", st.out, "Results file");
  stream_cmd->add_option("--threads", st.threads, "Worker threads");

  SweepOptions sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate a grid of revision policies");
  sweep_cmd->add_option("--config", sw.config, "Experiment config JSON")->required();
  sweep_cmd->add_option("--out-dir", sw.output_dir, "Output directory override");

  ReportOptions rep;
  auto* report_cmd = app.add_subcommand("report", "Compare sweep reports by latency");
  report_cmd->add_option("files", rep.files, "Report files; the first is the baseline")
      ->required();
  report_cmd->add_option("--out", rep.out, "Write the table here too");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) cmd_gen_data(gen, std::cout);
    else if (*train_cmd) cmd_train(tr, std::cout);
    else if (*decode_cmd) cmd_decode(dec, std::cout);
    else if (*stream_cmd) cmd_stream(st, std::cout);
    else if (*sweep_cmd) cmd_sweep(sw, std::cout);
    else if (*report_cmd) cmd_report(rep, std::cout);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}
