#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string output;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(ASYNCREV_CLI_PATH) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<nlohmann::json> jsonl(const fs::path& p) {
  std::vector<nlohmann::json> out;
  std::istringstream in(slurp(p));
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) out.push_back(nlohmann::json::parse(line));
  return out;
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / ("asyncrev_cli_" + std::to_string(getpid()));
    fs::create_directories(dir_);
    // Shared fixtures: a small noisy dataset and a briefly trained model.
    ASSERT_EQ(run("gen-data -n 40 --seed 3 --noise 0.3 --out " + p("data.jsonl")).code, 0);
    ASSERT_EQ(run("train --data " + p("data.jsonl") + " --out " + p("model.ckpt") +
                  " --steps 60 --batch 4 --segments 3 --seed 5 --loss-log " + p("loss.csv"))
                  .code,
              0);
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }
  static std::string p(const std::string& name) { return (dir_ / name).string(); }
  static fs::path dir_;
};

fs::path Cli::dir_;

}  // namespace

TEST_F(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(run("--help").code, 0);
  EXPECT_EQ(run("stream --help").code, 0);
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("no-such-command").code, 1);
  EXPECT_EQ(run("stream --checkpoint " + p("model.ckpt")).code, 1);  // --data missing
}

TEST_F(Cli, GenDataIsByteIdenticalAndRejectsZero) {
  ASSERT_EQ(run("gen-data -n 100 --seed 11 --noise 0.5 --out " + p("a.jsonl")).code, 0);
  ASSERT_EQ(run("gen-data -n 100 --seed 11 --noise 0.5 --out " + p("b.jsonl")).code, 0);
  EXPECT_EQ(slurp(p("a.jsonl")), slurp(p("b.jsonl")));
  const auto header = jsonl(p("a.jsonl")).front();
  EXPECT_EQ(header.at("count"), 100);
  EXPECT_EQ(header.at("spec").at("noise_sigma"), 0.5);
  const auto r = run("gen-data -n 0 --seed 11 --out " + p("empty.jsonl"));
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(fs::exists(p("empty.jsonl")));
}

TEST_F(Cli, TrainIsReproducible) {
  ASSERT_EQ(run("train --data " + p("data.jsonl") + " --out " + p("again.ckpt") +
                " --steps 60 --batch 4 --segments 3 --seed 5 --loss-log " + p("again.csv"))
                .code,
            0);
  EXPECT_EQ(slurp(p("model.ckpt")), slurp(p("again.ckpt")));
  EXPECT_EQ(slurp(p("loss.csv")), slurp(p("again.csv")));
  const auto csv = slurp(p("loss.csv"));
  EXPECT_EQ(csv.rfind("step,loss\n", 0), 0u);
}

TEST_F(Cli, DivergenceExitsWithNumericCode) {
  const auto r = run("train --data " + p("data.jsonl") + " --out " + p("bad.ckpt") +
                     " --steps 200 --lr 1e30");
  EXPECT_EQ(r.code, 2) << r.output;
}

TEST_F(Cli, ExactStreamingEqualsOfflineDecode) {
  const auto ckpt_before = slurp(p("model.ckpt"));
  ASSERT_EQ(run("decode --checkpoint " + p("model.ckpt") + " --data " + p("data.jsonl") +
                " --out " + p("offline.jsonl"))
                .code,
            0);
  ASSERT_EQ(run("stream --checkpoint " + p("model.ckpt") + " --data " + p("data.jsonl") +
                " --chunk-frames 4 --encoder-revise 50 --decoder-revise 50 --threads 2 --out " +
                p("stream.jsonl"))
                .code,
            0);
  const auto off = jsonl(p("offline.jsonl")), str = jsonl(p("stream.jsonl"));
  ASSERT_EQ(off.size(), str.size());
  for (std::size_t i = 1; i < off.size(); ++i) {
    if (off[i].at("type") == "summary") {
      EXPECT_EQ(off[i].at("cer"), str[i].at("cer"));
    } else {
      EXPECT_EQ(off[i], str[i]);
    }
  }
  EXPECT_EQ(str.back().at("latency_ms"), 50 * 4 * 10);
  EXPECT_EQ(slurp(p("model.ckpt")), ckpt_before);
}

TEST_F(Cli, StreamTraceAndConfigErrors) {
  const auto r = run("stream --checkpoint " + p("model.ckpt") + " --data " + p("data.jsonl") +
                     " --chunk-frames 4 --encoder-revise 1 --decoder-revise 1 --trace");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.output.find("utt000000 push   chunk   0 committed"), std::string::npos);
  EXPECT_NE(r.output.find("finish"), std::string::npos);
  EXPECT_NE(r.output.find("latency=40ms"), std::string::npos);
  EXPECT_EQ(run("stream --checkpoint " + p("model.ckpt") + " --data " + p("data.jsonl") +
                " --chunk-frames 3")
                .code,
            1);
  EXPECT_EQ(run("decode --checkpoint " + p("missing.ckpt") + " --data " + p("data.jsonl")).code,
            1);
}

TEST_F(Cli, SweepIsReproducibleAndMatchesStream) {
  {
    std::ofstream cfg(p("sweep.json"));
    cfg << R"({"name": "toy", "checkpoint": "model.ckpt", "dataset": "data.jsonl",
               "chunk_frames": [4], "decoder_revise": [1, 3, 6], "tied": true,
               "seed": 5, "output_dir": "sweep_a"})";
  }
  ASSERT_EQ(run("sweep --config " + p("sweep.json")).code, 0);
  ASSERT_EQ(run("sweep --config " + p("sweep.json") + " --out-dir " + p("sweep_b")).code, 0);
  auto a = jsonl(dir_ / "sweep_a" / "report.jsonl");
  auto b = jsonl(dir_ / "sweep_b" / "report.jsonl");
  ASSERT_EQ(a.size(), 4u);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i].erase("decode_ms");
    b[i].erase("decode_ms");
    EXPECT_EQ(a[i], b[i]);
  }
  EXPECT_EQ(a[0].at("config_hash").get<std::string>().size(), 16u);
  EXPECT_EQ(a[1].at("latency_ms"), 40);
  EXPECT_EQ(a[2].at("latency_ms"), 120);
  EXPECT_EQ(a[3].at("latency_ms"), 240);
  EXPECT_EQ(slurp(dir_ / "sweep_a" / "series_c4_tied.csv"),
            slurp(dir_ / "sweep_b" / "series_c4_tied.csv"));
  EXPECT_EQ(slurp(dir_ / "sweep_a" / "series_c4_tied.csv").rfind("revisions,cer\n1,", 0), 0u);

  ASSERT_EQ(run("stream --checkpoint " + p("model.ckpt") + " --data " + p("data.jsonl") +
                " --chunk-frames 4 --encoder-revise 3 --decoder-revise 3 --out " + p("r3.jsonl"))
                .code,
            0);
  EXPECT_EQ(jsonl(p("r3.jsonl")).back().at("cer"), a[2].at("cer"));
}

TEST_F(Cli, ReportPrintsRelativeImprovements) {
  const std::string fx = ASYNCREV_FIXTURE_DIR;
  const auto r = run("report " + fx + "/streaming_baseline.jsonl " + fx +
                     "/cropped_dynamic.jsonl --out " + p("table.txt"));
  ASSERT_EQ(r.code, 0);
  for (const char* pct : {"13.76%", "10.16%", "8.14%"})
    EXPECT_NE(r.output.find(pct), std::string::npos) << r.output;
  EXPECT_EQ(slurp(p("table.txt")), r.output);
}
