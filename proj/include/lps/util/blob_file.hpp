#pragma once

// Container for bit-exact numeric files: a fixed header, a JSON manifest and
// raw little-endian float64 blocks.
//
//   bytes 0..7   magic "LPSBLOB\0"
//   bytes 8..11  format version (uint32 LE)
//   bytes 12..19 manifest length in bytes (uint64 LE)
//   manifest     UTF-8 JSON; manifest["blocks"] lists {name, offset, count, fnv1a}
//   blocks       float64 LE, offsets relative to the end of the manifest

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace lps::io {

using json = nlohmann::json;

inline constexpr char kMagic[8] = {'L', 'P', 'S', 'B', 'L', 'O', 'B', '\0'};
inline constexpr std::uint32_t kBlobVersion = 1;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::uint64_t fnv1a(const unsigned char* p, std::size_t n) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace detail {

template <class U>
U to_le(U v) {
  if constexpr (std::endian::native == std::endian::big) {
    U r;
    auto* s = reinterpret_cast<const unsigned char*>(&v);
    auto* d = reinterpret_cast<unsigned char*>(&r);
    for (std::size_t i = 0; i < sizeof(U); ++i) d[i] = s[sizeof(U) - 1 - i];
    return r;
  } else {
    return v;
  }
}

inline std::vector<unsigned char> encode(std::span<const double> xs) {
  std::vector<unsigned char> out(xs.size() * 8);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const std::uint64_t u = to_le(std::bit_cast<std::uint64_t>(xs[i]));
    std::memcpy(out.data() + 8 * i, &u, 8);
  }
  return out;
}

}  // namespace detail

// Named float64 blocks plus free-form metadata.
struct Blob {
  json meta = json::object();
  std::map<std::string, std::vector<double>> blocks;

  const std::vector<double>& block(const std::string& name) const {
    auto it = blocks.find(name);
    if (it == blocks.end()) throw FormatError("missing block '" + name + "'");
    return it->second;
  }
};

inline std::string serialize(const Blob& blob) {
  json manifest = blob.meta;
  json index = json::array();
  std::string payload;
  for (const auto& [name, xs] : blob.blocks) {
    const auto bytes = detail::encode(xs);
    index.push_back({{"name", name},
                     {"offset", payload.size()},
                     {"count", xs.size()},
                     {"fnv1a", fnv1a(bytes.data(), bytes.size())}});
    payload.append(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  }
  manifest["blocks"] = index;
  const std::string text = manifest.dump(2);

  std::string out(kMagic, 8);
  const std::uint32_t version = detail::to_le(kBlobVersion);
  const std::uint64_t len = detail::to_le(static_cast<std::uint64_t>(text.size()));
  out.append(reinterpret_cast<const char*>(&version), 4);
  out.append(reinterpret_cast<const char*>(&len), 8);
  out += text;
  out += payload;
  return out;
}

inline Blob deserialize(const std::string& bytes) {
  if (bytes.size() < 20 || std::memcmp(bytes.data(), kMagic, 8) != 0) throw FormatError("not a blob file (bad magic)");
  std::uint32_t version;
  std::uint64_t len;
  std::memcpy(&version, bytes.data() + 8, 4);
  std::memcpy(&len, bytes.data() + 12, 8);
  version = detail::to_le(version);
  len = detail::to_le(len);
  if (version != kBlobVersion)
    throw FormatError("unsupported blob version " + std::to_string(version) + " (expected " +
                      std::to_string(kBlobVersion) + ")");
  if (len > bytes.size() - 20) throw FormatError("truncated manifest");

  Blob blob;
  try {
    blob.meta = json::parse(bytes.begin() + 20, bytes.begin() + 20 + static_cast<std::ptrdiff_t>(len));
  } catch (const json::exception& e) {
    throw FormatError(std::string("corrupt manifest: ") + e.what());
  }
  if (!blob.meta.contains("blocks") || !blob.meta["blocks"].is_array()) throw FormatError("manifest has no block index");
  const std::size_t base = 20 + len;
  for (const auto& entry : blob.meta["blocks"]) {
    const std::string name = entry.at("name");
    const std::size_t offset = entry.at("offset");
    const std::size_t count = entry.at("count");
    if (offset > bytes.size() - base || count > (bytes.size() - base - offset) / 8)
      throw FormatError("truncated block '" + name + "'");
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + base + offset);
    if (fnv1a(p, count * 8) != entry.at("fnv1a").get<std::uint64_t>())
      throw FormatError("checksum mismatch in block '" + name + "'");
    std::vector<double> xs(count);
    for (std::size_t i = 0; i < count; ++i) {
      std::uint64_t u;
      std::memcpy(&u, p + 8 * i, 8);
      xs[i] = std::bit_cast<double>(detail::to_le(u));
    }
    blob.blocks.emplace(name, std::move(xs));
  }
  blob.meta.erase("blocks");
  return blob;
}

inline void write_file(const std::string& path, const std::string& bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + tmp + "' for writing");
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw std::runtime_error("write failed for '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw std::runtime_error("cannot move '" + tmp + "' to '" + path + "'");
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

inline void save_blob(const std::string& path, const Blob& blob) { write_file(path, serialize(blob)); }
inline Blob load_blob(const std::string& path) { return deserialize(read_file(path)); }

}  // namespace lps::io
