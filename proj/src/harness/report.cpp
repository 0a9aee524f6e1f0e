#include "asyncrev/harness/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "asyncrev/core/errors.hpp"

namespace asyncrev {

using nlohmann::json;

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const json& config) { return fnv1a_hex(config.dump()); }

void write_report(std::ostream& out, const SweepReport& r) {
  json meta = {{"type", "meta"},
               {"name", r.meta.name},
               {"config_hash", r.meta.config_hash},
               {"seed", r.meta.seed},
               {"code_version", r.meta.code_version}};
  out << meta.dump() << '\n';
  for (const auto& row : r.rows) {
    json j = {{"type", "row"},
              {"encoder_revise", row.encoder_revise},
              {"decoder_revise", row.decoder_revise},
              {"chunk_frames", row.chunk_frames},
              {"latency_ms", row.latency_ms},
              {"cer", row.cer},
              {"utterances", row.utterances},
              {"decode_ms", row.decode_ms},
              {"error", row.error}};
    out << j.dump() << '\n';
  }
}

SweepReport read_report(std::istream& in) {
  SweepReport r;
  bool have_meta = false;
  std::string line;
  try {
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto j = json::parse(line);
      const auto type = j.value("type", "");
      if (type == "meta") {
        r.meta.name = j.value("name", "");
        r.meta.config_hash = j.value("config_hash", "");
        r.meta.seed = j.value("seed", std::uint64_t{0});
        r.meta.code_version = j.value("code_version", "");
        have_meta = true;
      } else if (type == "row") {
        ReportRow row;
        row.encoder_revise = j.value("encoder_revise", 0);
        row.decoder_revise = j.value("decoder_revise", 0);
        row.chunk_frames = j.value("chunk_frames", 0);
        row.latency_ms = j.at("latency_ms").get<long>();
        row.cer = j.at("cer").get<double>();
        row.utterances = j.value("utterances", std::size_t{0});
        row.decode_ms = j.value("decode_ms", 0.0);
        row.error = j.value("error", "");
        r.rows.push_back(std::move(row));
      } else {
        throw IoError("report: unknown record type '" + type + "'");
      }
    }
  } catch (const json::exception& e) {
    throw IoError(std::string("report: malformed record: ") + e.what());
  }
  if (!have_meta) throw IoError("report: missing meta record");
  return r;
}

void save_report(const std::string& path, const SweepReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_report(out, report);
  if (!out) throw IoError("write failed: " + path);
}

SweepReport load_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  try {
    return read_report(in);
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

double relative_improvement(double base, double value) {
  if (base == 0.0) return value == 0.0 ? 0.0 : -value;
  return (base - value) / base;
}

std::vector<ComparisonRow> compare_reports(const SweepReport& base, const SweepReport& other) {
  std::map<long, std::pair<const ReportRow*, const ReportRow*>> joined;
  for (const auto& r : base.rows)
    if (r.error.empty()) joined[r.latency_ms].first = &r;
  for (const auto& r : other.rows)
    if (r.error.empty()) joined[r.latency_ms].second = &r;
  std::vector<ComparisonRow> out;
  for (const auto& [latency, pair] : joined) {
    ComparisonRow c;
    c.latency_ms = latency;
    c.in_base = pair.first != nullptr;
    c.in_other = pair.second != nullptr;
    c.matched = c.in_base && c.in_other;
    if (pair.first) c.base_cer = pair.first->cer;
    if (pair.second) c.cer = pair.second->cer;
    if (c.matched) c.relative_improvement = relative_improvement(c.base_cer, c.cer);
    out.push_back(c);
  }
  return out;
}

std::string format_comparison(const std::string& base_name, const std::string& name,
                              const std::vector<ComparisonRow>& rows) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-12s %-10s %-10s %s\n", "latency_ms", "base_cer", "cer",
                "rel_improvement");
  os << "# base: " << base_name << "  vs: " << name << '\n' << buf;
  for (const auto& r : rows) {
    if (!r.matched) {
      std::snprintf(buf, sizeof buf, "%-12ld unmatched (present in %s only)\n", r.latency_ms,
                    r.in_base ? "base" : "comparison");
    } else {
      std::snprintf(buf, sizeof buf, "%-12ld %-10.2f %-10.2f %.2f%%\n", r.latency_ms,
                    100.0 * r.base_cer, 100.0 * r.cer, 100.0 * r.relative_improvement);
    }
    os << buf;
  }
  return os.str();
}

}  // namespace asyncrev
