#pragma once

// Little-endian scalar encoding, CRC-32 and whole-file helpers shared by the
// library and checkpoint containers.

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "fcg/errors.hpp"

namespace fcg::io {

using Bytes = std::vector<unsigned char>;

inline void put_u32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFFU));
}
inline void put_f32(Bytes& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

inline std::uint32_t get_u32(std::span<const unsigned char> in, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[offset + static_cast<std::size_t>(i)]) << (8 * i);
  return v;
}
inline float get_f32(std::span<const unsigned char> in, std::size_t offset) {
  return std::bit_cast<float>(get_u32(in, offset));
}

inline std::uint32_t crc32(std::span<const unsigned char> data) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  std::size_t pos = 0;
  while (pos < data.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(data.size() - pos, 1U << 30));
    crc = ::crc32(crc, data.data() + pos, chunk);
    pos += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}
inline std::uint32_t crc32(const std::string& s) {
  return crc32(std::span(reinterpret_cast<const unsigned char*>(s.data()), s.size()));
}

inline std::string hex32(std::uint32_t v) {
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", v);
  return buf;
}

inline void write_file(const std::filesystem::path& p, std::span<const unsigned char> data) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + p.string() + "' for writing");
  f.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!f) throw IoError("write failed for '" + p.string() + "'");
}
inline void write_file(const std::filesystem::path& p, const std::string& text) {
  write_file(p, std::span(reinterpret_cast<const unsigned char*>(text.data()), text.size()));
}

inline Bytes read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw IoError("cannot open '" + p.string() + "'");
  return Bytes(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

inline std::string read_text(const std::filesystem::path& p) {
  const Bytes b = read_file(p);
  return std::string(b.begin(), b.end());
}

inline void ensure_directory(const std::filesystem::path& p) {
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec || !std::filesystem::is_directory(p))
    throw IoError("cannot create directory '" + p.string() + "'");
}

}  // namespace fcg::io
