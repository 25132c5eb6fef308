#include "casimir/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "casimir/errors.hpp"

namespace casimir {

static_assert(std::endian::native == std::endian::little, "model files are written in host byte order");

namespace {

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw ModelFormatError("model file is truncated");
  return v;
}

}  // namespace

FeatureMap SavedModel::feature_map() const {
  return FeatureMap(alphabet.size(), static_cast<std::size_t>(num_attributes), features);
}

void write_model(std::ostream& out, const SavedModel& m) {
  out.write(kModelMagic, sizeof kModelMagic);
  put<std::uint32_t>(out, kModelVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(m.features.hash_bits));
  put<std::uint64_t>(out, m.features.hash_seed);
  put<std::int32_t>(out, m.features.window);
  put<std::uint64_t>(out, m.num_attributes);
  put<std::uint64_t>(out, m.alphabet.size());
  for (const auto& tag : m.alphabet) {
    put<std::uint64_t>(out, tag.size());
    out.write(tag.data(), static_cast<std::streamsize>(tag.size()));
  }
  put<std::uint64_t>(out, static_cast<std::uint64_t>(m.w.size()));
  out.write(reinterpret_cast<const char*>(m.w.data()), static_cast<std::streamsize>(m.w.size() * sizeof(double)));
  if (!out) throw Error("failed to write model");
}

SavedModel read_model(std::istream& in) {
  char magic[sizeof kModelMagic] = {};
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kModelMagic, sizeof magic) != 0)
    throw ModelFormatError("not a model file: bad magic number");
  const auto version = get<std::uint32_t>(in);
  if (version != kModelVersion)
    throw ModelFormatError("model format version " + std::to_string(version) + " is not supported (expected " +
                           std::to_string(kModelVersion) + ")");
  SavedModel m;
  m.features.hash_bits = static_cast<int>(get<std::uint32_t>(in));
  m.features.hash_seed = get<std::uint64_t>(in);
  m.features.window = get<std::int32_t>(in);
  m.num_attributes = get<std::uint64_t>(in);
  const auto tags = get<std::uint64_t>(in);
  if (tags == 0 || tags > (1u << 20)) throw ModelFormatError("implausible tag count");
  for (std::uint64_t k = 0; k < tags; ++k) {
    const auto len = get<std::uint64_t>(in);
    if (len > (1u << 16)) throw ModelFormatError("implausible tag length");
    std::string tag(len, '\0');
    if (!in.read(tag.data(), static_cast<std::streamsize>(len))) throw ModelFormatError("model file is truncated");
    m.alphabet.push_back(std::move(tag));
  }
  const auto d = get<std::uint64_t>(in);
  FeatureMap fm = [&] {
    try {
      return m.feature_map();
    } catch (const ConfigError& e) {
      throw ModelFormatError(std::string("bad feature settings: ") + e.what());
    }
  }();
  if (d != fm.dim()) throw ModelFormatError("weight dimension does not match the feature settings");
  m.w.resize(static_cast<Eigen::Index>(d));
  if (!in.read(reinterpret_cast<char*>(m.w.data()), static_cast<std::streamsize>(d * sizeof(double))))
    throw ModelFormatError("model file is truncated");
  return m;
}

void save_model(const std::string& path, const SavedModel& model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  write_model(out, model);
}

SavedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  return read_model(in);
}

}  // namespace casimir
