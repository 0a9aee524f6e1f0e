#pragma once

#include <filesystem>
#include <iosfwd>

#include "asyncrev/model/model.hpp"

namespace asyncrev {

// Checkpoint layout, all integers little-endian:
//
//   magic        8 bytes  "ASRVCKPT"
//   version      u32      = 1
//   config_len   u32      number of i32 values that follow
//   config       i32[]    feature_dim, hidden_dim, projection_dim,
//                         n_sub, (left, right, stride) * n_sub,
//                         n_mem, (left, right, stride) * n_mem,
//                         vocab_size, embed_dim, layers, units, joint_dim
//   n_tensors    u32
//   tensor[]     name_len u32, name bytes, rank u32, dims u32[rank],
//                data f32[prod(dims)] (IEEE-754 binary32)
//
// Tensors appear in for_each_parameter order; loading checks names and shapes.
inline constexpr char kCheckpointMagic[8] = {'A', 'S', 'R', 'V', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(std::ostream& out, const Model& model);
Model read_checkpoint(std::istream& in);

// Throw IoError with the path in the message.
void save_checkpoint(const std::filesystem::path& path, const Model& model);
Model load_checkpoint(const std::filesystem::path& path);

}  // namespace asyncrev
