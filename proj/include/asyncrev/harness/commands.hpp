#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "asyncrev/harness/report.hpp"
#include "asyncrev/model/model.hpp"
#include "asyncrev/stream/session.hpp"
#include "asyncrev/training/synthetic.hpp"
#include "asyncrev/training/trainer.hpp"

namespace asyncrev {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumeric = 2;

std::string code_version();

// Maps a library exception to an exit code: NumericError -> 2, the rest -> 1.
int exit_code_for(const std::exception& e);

struct GenDataOptions {
  SyntheticTaskSpec spec;
  std::size_t count = 0;
  std::uint64_t seed = 1;
  std::string out;
};
void cmd_gen_data(const GenDataOptions& opt, std::ostream& log);

struct TrainOptions {
  std::string data;
  std::string out_checkpoint;
  std::string loss_log;      // "step,loss" CSV; empty skips
  std::string model_preset = "desk";
  std::string model_config;  // JSON file; overrides the preset when set
  TrainConfig train;
  int log_every = 0;         // progress lines on the log stream; 0 = quiet
};

// Model config for a dataset: the preset (or file) with feature_dim and
// vocab_size taken from the dataset's task spec.
ModelConfig model_config_for(const std::string& preset, const std::string& config_path,
                             const SyntheticTaskSpec& task);
void cmd_train(const TrainOptions& opt, std::ostream& log);

struct DecodeOptions {
  std::string checkpoint;
  std::string data;
  std::string out;  // results file; empty skips
  int threads = 1;
};
void cmd_decode(const DecodeOptions& opt, std::ostream& log);

struct StreamOptions {
  std::string checkpoint;
  std::string data;
  RevisionPolicy policy;
  bool trace = false;  // print every push of every utterance
  std::string out;
  int threads = 1;
};
void cmd_stream(const StreamOptions& opt, std::ostream& log);

// Sweep configuration (JSON):
//   {"name": "cropped", "checkpoint": "m.ckpt", "dataset": "test.jsonl",
//    "chunk_frames": [40], "encoder_revise": [1, 3, 6], "decoder_revise": [1, 3, 6],
//    "tied": true, "points": [[1, 0], [1, 1]], "seed": 1, "threads": 1,
//    "output_dir": "out"}
// "points" lists explicit (R_e, R_d) pairs and replaces the grid; otherwise the
// grid is the product of the two lists, or their diagonal when "tied". Relative
// paths are resolved against the config file's directory.
struct ExperimentConfig {
  std::string name = "model";
  std::string checkpoint;
  std::string dataset;
  std::vector<int> chunk_frames{40};
  std::vector<int> encoder_revise;
  std::vector<int> decoder_revise;
  bool tied = false;
  std::vector<std::pair<int, int>> points;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string output_dir = ".";
  nlohmann::json source;  // config as read, for hashing
};

ExperimentConfig load_experiment(const std::string& path);
std::vector<RevisionPolicy> sweep_grid(const ExperimentConfig& cfg);

SweepReport run_sweep(const ExperimentConfig& cfg);
struct SweepOptions {
  std::string config;
  std::string output_dir;  // overrides the config's
};
void cmd_sweep(const SweepOptions& opt, std::ostream& log);

struct ReportOptions {
  std::vector<std::string> files;  // first is the baseline
  std::string out;
};
void cmd_report(const ReportOptions& opt, std::ostream& log);

}  // namespace asyncrev
