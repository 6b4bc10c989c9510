#include "sgf/params_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace sgf::net {

namespace {

constexpr char kMagic[8] = {'S', 'G', 'F', 'P', 'A', 'R', 'M', '1'};

static_assert(std::endian::native == std::endian::little,
              "params_io assumes a little-endian host");

}  // namespace

void save_params(const std::filesystem::path& path, const NetworkSpec& spec,
                 const ParamStore& params) {
  nlohmann::json manifest;
  manifest["format_version"] = 1;
  manifest["variant"] = variant_name(spec.variant);
  manifest["input_channels"] = spec.input_channels;
  manifest["scale"] = {{"input_side", spec.scale.input_side},
                       {"block_widths", spec.scale.block_widths}};
  nlohmann::json tensors = nlohmann::json::array();
  int64_t offset = 0;
  for (size_t i = 0; i < params.names.size(); ++i) {
    tensors.push_back({{"name", params.names[i]},
                       {"shape", params.tensors[i].shape},
                       {"offset", offset}});
    offset += params.tensors[i].size();
  }
  manifest["tensors"] = tensors;

  const std::string mtext = manifest.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(kMagic, sizeof(kMagic));
  const uint64_t mlen = mtext.size();
  out.write(reinterpret_cast<const char*>(&mlen), sizeof(mlen));
  out.write(mtext.data(), static_cast<std::streamsize>(mtext.size()));
  for (const auto& t : params.tensors)
    out.write(reinterpret_cast<const char*>(t.data.data()),
              static_cast<std::streamsize>(t.data.size() * sizeof(double)));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

LoadedParams load_params(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (in.gcount() != sizeof(magic) || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
    throw std::runtime_error("params: " + path.string() + ": bad magic");
  uint64_t mlen = 0;
  in.read(reinterpret_cast<char*>(&mlen), sizeof(mlen));
  if (!in || mlen > (1ull << 30)) throw std::runtime_error("params: bad manifest length");
  std::string mtext(mlen, '\0');
  in.read(mtext.data(), static_cast<std::streamsize>(mlen));
  if (in.gcount() != static_cast<std::streamsize>(mlen))
    throw std::runtime_error("params: truncated manifest");

  nlohmann::json manifest = nlohmann::json::parse(mtext);
  if (manifest.at("format_version").get<int>() != 1)
    throw std::runtime_error("params: unsupported format version");

  NetworkScale scale;
  scale.input_side = manifest.at("scale").at("input_side").get<int>();
  auto widths = manifest.at("scale").at("block_widths").get<std::vector<int>>();
  if (widths.size() != 5) throw std::runtime_error("params: bad block widths");
  std::copy(widths.begin(), widths.end(), scale.block_widths.begin());

  LoadedParams out;
  out.spec = build_sgf(variant_from_name(manifest.at("variant").get<std::string>()), scale);
  if (out.spec.input_channels != manifest.at("input_channels").get<int>())
    throw std::runtime_error("params: input channel mismatch");

  for (const auto& entry : manifest.at("tensors")) {
    Tensor t(entry.at("shape").get<std::vector<int>>());
    in.read(reinterpret_cast<char*>(t.data.data()),
            static_cast<std::streamsize>(t.data.size() * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(t.data.size() * sizeof(double)))
      throw std::runtime_error("params: truncated tensor data");
    out.params.add(entry.at("name").get<std::string>(), std::move(t));
  }

  // The layer map of the rebuilt spec must agree with the stored tensors.
  ParamStore expected = init_params(out.spec, 0);
  if (expected.names != out.params.names)
    throw std::runtime_error("params: tensor names do not match the declared variant/scale");
  for (size_t i = 0; i < expected.names.size(); ++i)
    if (expected.tensors[i].shape != out.params.tensors[i].shape)
      throw std::runtime_error("params: shape mismatch for " + expected.names[i]);
  return out;
}

}  // namespace sgf::net
