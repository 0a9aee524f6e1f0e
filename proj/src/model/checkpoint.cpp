#include "asyncrev/model/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "asyncrev/core/errors.hpp"

namespace asyncrev {
namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                         static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
  out.write(bytes, 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4)) throw IoError("checkpoint: truncated");
  return static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) | (static_cast<std::uint32_t>(bytes[3]) << 24);
}

std::vector<std::int32_t> encode_config(const ModelConfig& c) {
  std::vector<std::int32_t> v{c.encoder.feature_dim, c.encoder.hidden_dim,
                              c.encoder.projection_dim};
  v.push_back(static_cast<std::int32_t>(c.encoder.subsamplers.size()));
  for (const auto& l : c.encoder.subsamplers) v.insert(v.end(), {l.left_taps, l.right_taps, l.stride});
  v.push_back(static_cast<std::int32_t>(c.encoder.memory_layers.size()));
  for (const auto& l : c.encoder.memory_layers) v.insert(v.end(), {l.left_taps, l.right_taps, l.stride});
  v.insert(v.end(), {c.prediction.vocab_size, c.prediction.embed_dim, c.prediction.layers,
                     c.prediction.units, c.joint_dim});
  return v;
}

ModelConfig decode_config(const std::vector<std::int32_t>& v) {
  std::size_t at = 0;
  auto next = [&]() {
    if (at >= v.size()) throw IoError("checkpoint: config block too short");
    return v[at++];
  };
  ModelConfig c;
  c.encoder.feature_dim = next();
  c.encoder.hidden_dim = next();
  c.encoder.projection_dim = next();
  auto read_layers = [&](std::vector<LayerContext>& layers) {
    const int n = next();
    if (n < 0) throw IoError("checkpoint: negative layer count");
    for (int i = 0; i < n; ++i) {
      LayerContext l;
      l.left_taps = next();
      l.right_taps = next();
      l.stride = next();
      layers.push_back(l);
    }
  };
  read_layers(c.encoder.subsamplers);
  read_layers(c.encoder.memory_layers);
  c.prediction.vocab_size = next();
  c.prediction.embed_dim = next();
  c.prediction.layers = next();
  c.prediction.units = next();
  c.joint_dim = next();
  if (at != v.size()) throw IoError("checkpoint: trailing config values");
  return c;
}

}  // namespace

void write_checkpoint(std::ostream& out, const Model& model) {
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  put_u32(out, kCheckpointVersion);
  const auto cfg = encode_config(model.config);
  put_u32(out, static_cast<std::uint32_t>(cfg.size()));
  for (auto v : cfg) put_u32(out, static_cast<std::uint32_t>(v));

  std::uint32_t count = 0;
  for_each_parameter(model.params, [&](const std::string&, const Parameter<float>&) { ++count; });
  put_u32(out, count);
  for_each_parameter(model.params, [&](const std::string& name, const Parameter<float>& p) {
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_u32(out, static_cast<std::uint32_t>(p.value.rank()));
    for (auto d : p.value.shape()) put_u32(out, static_cast<std::uint32_t>(d));
    for (float v : p.value.values()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  });
  if (!out) throw IoError("checkpoint: write failed");
}

Model read_checkpoint(std::istream& in) {
  char magic[sizeof(kCheckpointMagic)];
  if (!in.read(magic, sizeof(magic)) ||
      std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0)
    throw IoError("checkpoint: bad magic");
  const auto version = get_u32(in);
  if (version != kCheckpointVersion)
    throw IoError("checkpoint: unsupported version " + std::to_string(version));
  const auto cfg_len = get_u32(in);
  if (cfg_len > 1u << 20) throw IoError("checkpoint: config block too large");
  std::vector<std::int32_t> cfg(cfg_len);
  for (auto& v : cfg) v = static_cast<std::int32_t>(get_u32(in));
  ModelConfig config = decode_config(cfg);
  Model model = Model::zeros(config);

  auto expected = model.named_parameters();
  const auto count = get_u32(in);
  if (count != expected.size())
    throw IoError("checkpoint: expected " + std::to_string(expected.size()) + " tensors, found " +
                  std::to_string(count));
  for (auto& slot : expected) {
    const auto name_len = get_u32(in);
    if (name_len > 4096) throw IoError("checkpoint: tensor name too long");
    std::string name(name_len, '\0');
    if (!in.read(name.data(), name_len)) throw IoError("checkpoint: truncated");
    if (name != slot.name)
      throw IoError("checkpoint: expected tensor '" + slot.name + "', found '" + name + "'");
    const auto rank = get_u32(in);
    std::vector<std::size_t> shape(rank);
    for (auto& d : shape) d = get_u32(in);
    if (shape != slot.param->value.shape())
      throw IoError("checkpoint: shape mismatch for '" + name + "'");
    for (auto& v : slot.param->value.values()) v = std::bit_cast<float>(get_u32(in));
  }
  return model;
}

void save_checkpoint(const std::filesystem::path& path, const Model& model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  try {
    write_checkpoint(out, model);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

Model load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path.string() + "'");
  try {
    return read_checkpoint(in);
  } catch (const Error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace asyncrev
