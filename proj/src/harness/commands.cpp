#include "asyncrev/harness/commands.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>

#include <fmt/format.h>

#include "asyncrev/core/errors.hpp"
#include "asyncrev/model/checkpoint.hpp"
#include "asyncrev/training/dataset_io.hpp"
#include "asyncrev/training/evaluate.hpp"

#ifndef ASYNCREV_VERSION
#define ASYNCREV_VERSION "dev"
#endif

namespace asyncrev {

namespace fs = std::filesystem;
using nlohmann::json;

std::string code_version() { return ASYNCREV_VERSION; }

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const NumericError*>(&e)) return kExitNumeric;
  return kExitUsage;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a_hex(bytes);
}

void write_results(const std::string& path, json meta, const EvalResult& r,
                   std::optional<long> latency_ms) {
  auto out = open_out(path);
  meta["type"] = "meta";
  meta["code_version"] = code_version();
  out << meta.dump() << '\n';
  for (const auto& u : r.utterances) {
    json j = {{"type", "utterance"},
              {"id", u.id},
              {"hyp", u.hypothesis.tokens},
              {"emit_frames", u.hypothesis.emit_frame},
              {"ref", u.reference},
              {"edits", u.edits},
              {"cer", u.cer}};
    out << j.dump() << '\n';
  }
  json s = {{"type", "summary"},
            {"cer", r.cer},
            {"mean_utterance_cer", r.mean_utterance_cer},
            {"edits", r.edits},
            {"reference_tokens", r.reference_tokens},
            {"utterances", r.utterances.size()}};
  if (latency_ms) s["latency_ms"] = *latency_ms;
  out << s.dump() << '\n';
  if (!out) throw IoError("write failed: " + path);
}

std::string join_tokens(const std::vector<int>& t) {
  return fmt::format("[{}]", fmt::join(t, " "));
}

}  // namespace

void cmd_gen_data(const GenDataOptions& opt, std::ostream& log) {
  if (opt.count == 0) throw ConfigError("gen-data: -n must be at least 1");
  if (opt.out.empty()) throw ConfigError("gen-data: --out is required");
  const auto data = gen_synthetic(opt.spec, opt.count, opt.seed);
  DatasetHeader header;
  header.count = data.size();
  header.seed = opt.seed;
  header.spec = opt.spec;
  save_dataset(opt.out, header, data);
  double frames = 0.0;
  for (const auto& u : data) frames += static_cast<double>(u.features.rows());
  log << fmt::format("wrote {} utterances to {}: mean T {:.1f} frames, vocab {}, noise {}\n",
                     data.size(), opt.out, frames / static_cast<double>(data.size()),
                     opt.spec.vocab_size, opt.spec.noise_sigma);
}

ModelConfig model_config_for(const std::string& preset, const std::string& config_path,
                             const SyntheticTaskSpec& task) {
  ModelConfig cfg = config_path.empty() ? preset_config(preset)
                                        : read_json_file(config_path).get<ModelConfig>();
  cfg.encoder.feature_dim = task.feature_dim;
  cfg.prediction.vocab_size = task.vocab_size;
  validate(cfg);
  return cfg;
}

void cmd_train(const TrainOptions& opt, std::ostream& log) {
  if (opt.out_checkpoint.empty()) throw ConfigError("train: --out is required");
  validate(opt.train);
  const auto data = load_dataset(opt.data);
  const auto cfg = model_config_for(opt.model_preset, opt.model_config, data.header.spec);
  SeededRng init = init_rng_for(opt.train.seed);
  Model model = Model::initialize(cfg, init);
  log << fmt::format("training {} parameters on {} utterances: {} steps, batch {}, k={}\n",
                     model.parameter_count(), data.utterances.size(), opt.train.steps,
                     opt.train.batch_size, opt.train.num_segments);
  TrainProgress progress;
  if (opt.log_every > 0) {
    progress = [&](int step, double loss) {
      if ((step + 1) % opt.log_every == 0)
        log << fmt::format("step {:6d}  loss {:.4f}\n", step + 1, loss);
    };
  }
  const auto result = train(model, data.utterances, opt.train, progress);
  save_checkpoint(opt.out_checkpoint, model);
  if (!opt.loss_log.empty()) {
    auto out = open_out(opt.loss_log);
    out << "step,loss\n";
    for (std::size_t i = 0; i < result.loss_curve.size(); ++i)
      out << fmt::format("{},{:.9g}\n", i + 1, result.loss_curve[i]);
  }
  if (!result.loss_curve.empty())
    log << fmt::format("final loss {:.4f}; checkpoint {}\n", result.loss_curve.back(),
                       opt.out_checkpoint);
}

void cmd_decode(const DecodeOptions& opt, std::ostream& log) {
  auto model = std::make_shared<const Model>(load_checkpoint(opt.checkpoint));
  const auto data = load_dataset(opt.data);
  const auto r = evaluate(model, data.utterances, std::nullopt, opt.threads);
  log << fmt::format("offline: CER {:.2f}% over {} utterances\n", 100.0 * r.cer,
                     r.utterances.size());
  if (!opt.out.empty()) {
    json meta = {{"mode", "offline"},
                 {"checkpoint_hash", file_hash(opt.checkpoint)},
                 {"dataset_hash", file_hash(opt.data)}};
    write_results(opt.out, meta, r, std::nullopt);
  }
}

void cmd_stream(const StreamOptions& opt, std::ostream& log) {
  auto model = std::make_shared<const Model>(load_checkpoint(opt.checkpoint));
  validate(opt.policy, model->config.encoder);
  const auto data = load_dataset(opt.data);
  const long latency = algorithmic_latency_ms(opt.policy);
  if (opt.trace) {
    // Sequential replay just for the timeline; the scored pass is below.
    auto sorted = data.utterances;
    std::sort(sorted.begin(), sorted.end(),
              [](const Utterance& a, const Utterance& b) { return a.id < b.id; });
    for (const auto& u : sorted) {
      std::vector<TraceEvent> trace;
      stream_decode(model, u.features, opt.policy, {}, &trace);
      for (const auto& ev : trace) {
        log << fmt::format("{} {} chunk {:3d} committed {} temporary {}\n", u.id,
                           ev.kind == TraceEvent::Kind::kPush ? "push  " : "finish", ev.chunk,
                           join_tokens(ev.committed), join_tokens(ev.temporary));
      }
    }
  }
  const auto r = evaluate(model, data.utterances, opt.policy, opt.threads);
  log << fmt::format("stream chunk={} R_e={} R_d={} latency={}ms: CER {:.2f}% over {} "
                     "utterances\n",
                     opt.policy.chunk_frames, opt.policy.encoder_revise,
                     opt.policy.decoder_revise, latency, 100.0 * r.cer, r.utterances.size());
  if (!opt.out.empty()) {
    json meta = {{"mode", "stream"},
                 {"chunk_frames", opt.policy.chunk_frames},
                 {"encoder_revise", opt.policy.encoder_revise},
                 {"decoder_revise", opt.policy.decoder_revise},
                 {"checkpoint_hash", file_hash(opt.checkpoint)},
                 {"dataset_hash", file_hash(opt.data)}};
    write_results(opt.out, meta, r, latency);
  }
}

ExperimentConfig load_experiment(const std::string& path) {
  const json j = read_json_file(path);
  const fs::path base = fs::path(path).parent_path();
  auto resolve = [&](const std::string& p) {
    if (p.empty() || fs::path(p).is_absolute()) return p;
    return (base / p).string();
  };
  ExperimentConfig c;
  try {
    c.name = j.value("name", c.name);
    c.checkpoint = resolve(j.at("checkpoint").get<std::string>());
    c.dataset = resolve(j.at("dataset").get<std::string>());
    c.chunk_frames = j.value("chunk_frames", c.chunk_frames);
    c.encoder_revise = j.value("encoder_revise", std::vector<int>{});
    c.decoder_revise = j.value("decoder_revise", std::vector<int>{});
    c.tied = j.value("tied", false);
    c.points = j.value("points", std::vector<std::pair<int, int>>{});
    c.seed = j.value("seed", std::uint64_t{0});
    c.threads = j.value("threads", 1);
    c.output_dir = resolve(j.value("output_dir", std::string(".")));
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  c.source = j;
  if (!fs::exists(c.checkpoint)) throw ConfigError(path + ": checkpoint not found: " + c.checkpoint);
  if (!fs::exists(c.dataset)) throw ConfigError(path + ": dataset not found: " + c.dataset);
  return c;
}

std::vector<RevisionPolicy> sweep_grid(const ExperimentConfig& c) {
  if (c.chunk_frames.empty()) throw ConfigError("sweep: chunk_frames is empty");
  std::vector<std::pair<int, int>> pairs = c.points;
  if (pairs.empty()) {
    if (c.encoder_revise.empty() && c.decoder_revise.empty())
      throw ConfigError("sweep: empty revision grid");
    if (c.tied) {
      const auto& rs = c.decoder_revise.empty() ? c.encoder_revise : c.decoder_revise;
      for (int r : rs) pairs.emplace_back(r, r);
    } else {
      if (c.encoder_revise.empty() || c.decoder_revise.empty())
        throw ConfigError("sweep: both encoder_revise and decoder_revise are needed");
      for (int re : c.encoder_revise)
        for (int rd : c.decoder_revise) pairs.emplace_back(re, rd);
    }
  }
  std::vector<RevisionPolicy> grid;
  for (int chunk : c.chunk_frames)
    for (auto [re, rd] : pairs) grid.push_back({chunk, re, rd});
  return grid;
}

SweepReport run_sweep(const ExperimentConfig& c) {
  const auto grid = sweep_grid(c);
  auto model = std::make_shared<const Model>(load_checkpoint(c.checkpoint));
  const auto data = load_dataset(c.dataset);
  SweepReport report;
  report.meta.name = c.name;
  report.meta.config_hash = config_hash(c.source);
  report.meta.seed = c.seed;
  report.meta.code_version = code_version();
  for (const auto& policy : grid) {
    ReportRow row;
    row.encoder_revise = policy.encoder_revise;
    row.decoder_revise = policy.decoder_revise;
    row.chunk_frames = policy.chunk_frames;
    row.latency_ms = algorithmic_latency_ms(policy);
    try {
      const auto t0 = std::chrono::steady_clock::now();
      const auto r = evaluate(model, data.utterances, policy, c.threads);
      row.decode_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      row.cer = r.cer;
      row.utterances = r.utterances.size();
    } catch (const Error& e) {
      row.error = e.what();
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

void cmd_sweep(const SweepOptions& opt, std::ostream& log) {
  auto cfg = load_experiment(opt.config);
  if (!opt.output_dir.empty()) cfg.output_dir = opt.output_dir;
  const auto report = run_sweep(cfg);
  fs::create_directories(cfg.output_dir);
  const fs::path dir(cfg.output_dir);
  save_report((dir / "report.jsonl").string(), report);

  // One "revisions,cer" series per chunk size and encoder depth; tied grids
  // collapse into a single series over R.
  std::map<std::string, std::vector<std::pair<int, double>>> series;
  for (const auto& row : report.rows) {
    if (!row.error.empty()) continue;
    const std::string key =
        cfg.tied ? fmt::format("series_c{}_tied.csv", row.chunk_frames)
                 : fmt::format("series_c{}_re{}.csv", row.chunk_frames, row.encoder_revise);
    series[key].emplace_back(row.decoder_revise, row.cer);
  }
  for (const auto& [name, points] : series) {
    auto out = open_out((dir / name).string());
    out << "revisions,cer\n";
    for (auto [r, cer] : points) out << fmt::format("{},{:.6f}\n", r, cer);
  }

  log << fmt::format("{:<6} {:<6} {:<7} {:<11} {:<9} {}\n", "R_e", "R_d", "chunk", "latency_ms",
                     "cer_%", "note");
  for (const auto& row : report.rows) {
    log << fmt::format("{:<6} {:<6} {:<7} {:<11} {:<9.2f} {}\n", row.encoder_revise,
                       row.decoder_revise, row.chunk_frames, row.latency_ms, 100.0 * row.cer,
                       row.error);
  }
  log << fmt::format("report: {}  config_hash {}\n", (dir / "report.jsonl").string(),
                     report.meta.config_hash);
}

void cmd_report(const ReportOptions& opt, std::ostream& log) {
  if (opt.files.empty()) throw ConfigError("report: need at least one report file");
  std::vector<SweepReport> reports;
  for (const auto& f : opt.files) reports.push_back(load_report(f));
  std::string text;
  if (reports.size() == 1) {
    text = format_comparison(reports[0].meta.name, reports[0].meta.name,
                             compare_reports(reports[0], reports[0]));
  }
  for (std::size_t i = 1; i < reports.size(); ++i) {
    text += format_comparison(reports[0].meta.name, reports[i].meta.name,
                              compare_reports(reports[0], reports[i]));
  }
  log << text;
  if (!opt.out.empty()) {
    auto out = open_out(opt.out);
    out << text;
  }
}

}  // namespace asyncrev
