#include "asyncrev/training/dataset_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"

#include "asyncrev/core/errors.hpp"

namespace asyncrev {

using nlohmann::json;

void write_dataset(std::ostream& out, const DatasetHeader& header, const Dataset& data) {
  json h = {{"format", "asyncrev-dataset"},
            {"version", header.version},
            {"count", data.size()},
            {"seed", header.seed},
            {"spec", header.spec}};
  out << h.dump() << '\n';
  for (const auto& u : data) {
    json r = {{"id", u.id},
              {"labels", u.labels},
              {"frames", u.features.rows()},
              {"dim", u.features.cols()},
              {"features", std::vector<float>(u.features.values().begin(),
                                              u.features.values().end())}};
    out << r.dump() << '\n';
  }
}

LoadedDataset read_dataset(std::istream& in) {
  LoadedDataset out;
  std::string line;
  if (!std::getline(in, line)) throw IoError("dataset: missing header line");
  try {
    const auto h = json::parse(line);
    if (h.value("format", "") != "asyncrev-dataset") throw IoError("dataset: bad format tag");
    out.header.version = h.at("version").get<int>();
    if (out.header.version != kDatasetFormatVersion)
      throw IoError("dataset: unsupported version " + std::to_string(out.header.version));
    out.header.count = h.at("count").get<std::size_t>();
    out.header.seed = h.at("seed").get<std::uint64_t>();
    out.header.spec = h.at("spec").get<SyntheticTaskSpec>();
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      const auto r = json::parse(line);
      Utterance u;
      u.id = r.at("id").get<std::string>();
      u.labels = r.at("labels").get<std::vector<int>>();
      const auto frames = r.at("frames").get<std::size_t>();
      const auto dim = r.at("dim").get<std::size_t>();
      auto values = r.at("features").get<std::vector<float>>();
      if (values.size() != frames * dim)
        throw IoError("dataset line " + std::to_string(lineno) + ": feature count mismatch");
      u.features = Tensor({frames, dim}, std::move(values));
      out.utterances.push_back(std::move(u));
    }
  } catch (const json::exception& e) {
    throw IoError(std::string("dataset: malformed record: ") + e.what());
  }
  if (out.utterances.size() != out.header.count)
    throw IoError("dataset: header says " + std::to_string(out.header.count) +
                  " utterances, found " + std::to_string(out.utterances.size()));
  return out;
}

void save_dataset(const std::string& path, const DatasetHeader& header, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_dataset(out, header, data);
  if (!out) throw IoError("write failed: " + path);
}

LoadedDataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  try {
    return read_dataset(in);
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

}  // namespace asyncrev
