#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace asyncrev {

// 64-bit FNV-1a of the compact JSON dump, as 16 hex digits. nlohmann orders
// object keys, so equal configs hash equally whatever the source key order.
std::string config_hash(const nlohmann::json& config);
std::string fnv1a_hex(const std::string& bytes);

struct ReportMeta {
  std::string name;  // model / experiment label
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string code_version;

  bool operator==(const ReportMeta&) const = default;
};

struct ReportRow {
  int encoder_revise = 0;
  int decoder_revise = 0;
  int chunk_frames = 0;
  long latency_ms = 0;
  double cer = 0.0;  // fraction, not percent
  std::size_t utterances = 0;
  double decode_ms = 0.0;  // wall clock; the only non-reproducible field
  std::string error;        // non-empty when the grid point failed

  bool operator==(const ReportRow&) const = default;
};

// Line-delimited: {"type":"meta",...} then one {"type":"row",...} per point.
struct SweepReport {
  ReportMeta meta;
  std::vector<ReportRow> rows;
};

void write_report(std::ostream& out, const SweepReport& report);
SweepReport read_report(std::istream& in);
void save_report(const std::string& path, const SweepReport& report);
SweepReport load_report(const std::string& path);

// (base - value) / base.
double relative_improvement(double base, double value);

struct ComparisonRow {
  long latency_ms = 0;
  bool in_base = false;
  bool in_other = false;
  bool matched = false;  // both reports have a row at this latency
  double base_cer = 0.0;
  double cer = 0.0;
  double relative_improvement = 0.0;
};

// Joins error-free rows by latency; latencies present on one side only are
// returned with matched = false. Sorted by latency.
std::vector<ComparisonRow> compare_reports(const SweepReport& base, const SweepReport& other);

// Fixed-width text table; CER and improvement as percentages, two decimals.
std::string format_comparison(const std::string& base_name, const std::string& name,
                              const std::vector<ComparisonRow>& rows);

}  // namespace asyncrev
