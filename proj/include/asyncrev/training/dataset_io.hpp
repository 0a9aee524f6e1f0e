#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "asyncrev/training/synthetic.hpp"

namespace asyncrev {

inline constexpr int kDatasetFormatVersion = 1;

// Line-delimited JSON. Line 1 is a header:
//   {"format":"asyncrev-dataset","version":1,"count":N,"seed":S,"spec":{...}}
// then one record per utterance:
//   {"id":..,"labels":[..],"frames":T,"dim":D,"features":[T*D floats, row-major]}
// Floats are written in shortest round-trip form, so a load restores them
// bit-exactly.
struct DatasetHeader {
  int version = kDatasetFormatVersion;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  SyntheticTaskSpec spec;
};

struct LoadedDataset {
  DatasetHeader header;
  Dataset utterances;
};

void write_dataset(std::ostream& out, const DatasetHeader& header, const Dataset& data);
LoadedDataset read_dataset(std::istream& in);

// Path forms; IoError messages carry the path.
void save_dataset(const std::string& path, const DatasetHeader& header, const Dataset& data);
LoadedDataset load_dataset(const std::string& path);

}  // namespace asyncrev
