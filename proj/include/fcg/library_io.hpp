#pragma once

// On-disk digital library:
//
//   <dir>/manifest.json       specs, split, sample index, format version, checksums
//   <dir>/samples/<id>.bin    "FCGL" | u32 version | u32 rows | u32 cols | u32 n_frames
//                             | n_frames*rows*cols f32 frames | n_frames f32 remaining life
//
// All integers and floats are little-endian. Each .bin file's CRC-32 is
// recorded in the manifest.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fcg/binary_io.hpp"
#include "fcg/errors.hpp"
#include "fcg/library.hpp"
#include "fcg/spec_json.hpp"

namespace fcg {

inline constexpr std::uint32_t kLibraryFormatVersion = 1;
inline constexpr char kLibraryMagic[4] = {'F', 'C', 'G', 'L'};
inline constexpr std::size_t kLibraryHeaderBytes = 20;

inline io::Bytes encode_sample_blob(const LibrarySample& s) {
  if (s.frames.empty()) throw DomainError("encode_sample_blob: sample has no frames");
  const Resolution res = s.frames.front().resolution;
  io::Bytes out;
  out.reserve(kLibraryHeaderBytes + 4 * s.frames.size() * (res.rows * res.cols + 1));
  out.insert(out.end(), std::begin(kLibraryMagic), std::end(kLibraryMagic));
  io::put_u32(out, kLibraryFormatVersion);
  io::put_u32(out, static_cast<std::uint32_t>(res.rows));
  io::put_u32(out, static_cast<std::uint32_t>(res.cols));
  io::put_u32(out, static_cast<std::uint32_t>(s.frames.size()));
  for (const auto& f : s.frames) {
    if (f.resolution != res) throw ShapeError("encode_sample_blob: frames differ in resolution");
    for (float v : f.values) io::put_f32(out, v);
  }
  for (double r : s.remaining_life) io::put_f32(out, static_cast<float>(r));
  return out;
}

inline json schedule_to_json(const LoadSchedule& s) {
  json flags = json::array();
  for (bool b : s.rare_flags) flags.push_back(b);
  return {{"slice_bounds", s.slice_bounds}, {"tensions", s.tensions}, {"shears", s.shears}, {"rare_flags", flags}};
}

inline json path_to_json(const CrackPath& p) {
  json pts = json::array();
  for (const auto& q : p.points) pts.push_back({q.x, q.y});
  return {{"points", pts}, {"step_cycles", p.step_cycles}, {"total_life", p.total_life}};
}

inline json library_manifest(const Library& lib, const std::vector<std::uint32_t>& checksums) {
  json samples = json::array();
  for (std::size_t i = 0; i < lib.samples.size(); ++i) {
    const auto& s = lib.samples[i];
    samples.push_back({{"id", s.sample_id},
                       {"file", "samples/" + s.sample_id + ".bin"},
                       {"crc32", io::hex32(checksums[i])},
                       {"seed", s.seed},
                       {"rare", s.rare},
                       {"n_frames", s.frames.size()},
                       {"schedule", schedule_to_json(s.schedule)},
                       {"path", path_to_json(s.path)}});
  }
  return {{"format", "fcg-library"},
          {"format_version", kLibraryFormatVersion},
          {"seed", lib.seed},
          {"config_hash", lib.config_hash},
          {"specs",
           {{"plate", to_json(lib.specs.plate)},
            {"material", to_json(lib.specs.material)},
            {"noise", to_json(lib.specs.noise)},
            {"n_slices", lib.specs.n_slices},
            {"resolution", to_json(lib.specs.resolution)},
            {"test_fraction", lib.specs.test_fraction}}},
          {"split", {{"train", lib.train_ids}, {"test", lib.test_ids}}},
          {"samples", samples}};
}

/// Writes the library under `dir`, creating it if needed. Output is a pure
/// function of the library contents, so equal libraries give identical bytes.
inline void save_library(const Library& lib, const std::filesystem::path& dir) {
  io::ensure_directory(dir / "samples");
  std::vector<std::uint32_t> checksums;
  checksums.reserve(lib.samples.size());
  for (const auto& s : lib.samples) {
    const io::Bytes blob = encode_sample_blob(s);
    checksums.push_back(io::crc32(blob));
    io::write_file(dir / "samples" / (s.sample_id + ".bin"), blob);
  }
  io::write_file(dir / "manifest.json", library_manifest(lib, checksums).dump(1) + "\n");
}

namespace detail {

[[noreturn]] inline void malformed(const std::string& what) {
  throw LoadError(LoadError::Kind::malformed, "malformed library: " + what);
}

inline LoadSchedule schedule_from_json(const json& j) {
  LoadSchedule s;
  s.slice_bounds = j.at("slice_bounds").get<std::vector<double>>();
  s.tensions = j.at("tensions").get<std::vector<double>>();
  s.shears = j.at("shears").get<std::vector<double>>();
  for (const auto& b : j.at("rare_flags")) s.rare_flags.push_back(b.get<bool>());
  if (s.slice_bounds.size() != s.tensions.size() + 1 || s.shears.size() != s.tensions.size() ||
      s.rare_flags.size() != s.tensions.size())
    malformed("inconsistent schedule lengths");
  return s;
}

inline CrackPath path_from_json(const json& j) {
  CrackPath p;
  for (const auto& q : j.at("points")) p.points.push_back({q.at(0).get<double>(), q.at(1).get<double>()});
  p.step_cycles = j.at("step_cycles").get<std::vector<double>>();
  p.total_life = j.at("total_life").get<double>();
  if (p.points.size() != p.step_cycles.size() + 1) malformed("path point/step count mismatch");
  return p;
}

inline LibrarySample decode_sample(const json& entry, const std::filesystem::path& dir, const LibrarySpecs& specs) {
  LibrarySample s;
  s.sample_id = entry.at("id").get<std::string>();
  const auto file = dir / entry.at("file").get<std::string>();
  if (!std::filesystem::is_regular_file(file))
    throw LoadError(LoadError::Kind::missing_part,
                    "sample '" + s.sample_id + "': missing tensor file " + file.string());
  const io::Bytes blob = io::read_file(file);
  const auto n_frames = entry.at("n_frames").get<std::size_t>();
  const Resolution res = specs.resolution;
  const std::size_t expected = kLibraryHeaderBytes + 4 * n_frames * (res.rows * res.cols + 1);
  if (blob.size() < expected)
    throw LoadError(LoadError::Kind::truncated, "sample '" + s.sample_id + "': file truncated (" +
                                                    std::to_string(blob.size()) + " of " +
                                                    std::to_string(expected) + " bytes)");
  if (io::hex32(io::crc32(blob)) != entry.at("crc32").get<std::string>())
    throw LoadError(LoadError::Kind::checksum, "sample '" + s.sample_id + "': checksum mismatch");
  if (!std::equal(std::begin(kLibraryMagic), std::end(kLibraryMagic), blob.begin()))
    malformed("sample '" + s.sample_id + "': bad magic");
  if (io::get_u32(blob, 4) != kLibraryFormatVersion)
    throw LoadError(LoadError::Kind::version_mismatch,
                    "sample '" + s.sample_id + "': blob version " + std::to_string(io::get_u32(blob, 4)));
  if (io::get_u32(blob, 8) != res.rows || io::get_u32(blob, 12) != res.cols || io::get_u32(blob, 16) != n_frames ||
      blob.size() != expected)
    malformed("sample '" + s.sample_id + "': header disagrees with manifest");

  s.seed = entry.at("seed").get<std::uint64_t>();
  s.rare = entry.at("rare").get<bool>();
  s.schedule = schedule_from_json(entry.at("schedule"));
  s.path = path_from_json(entry.at("path"));
  if (s.path.points.size() != n_frames) malformed("sample '" + s.sample_id + "': frame count mismatch");

  std::size_t off = kLibraryHeaderBytes;
  const double dx = specs.plate.width / static_cast<double>(res.cols);
  const double dy = specs.plate.height / static_cast<double>(res.rows);
  s.frames.reserve(n_frames);
  for (std::size_t t = 0; t < n_frames; ++t) {
    VoxelGrid g(res, dx, dy);
    for (auto& v : g.values) {
      v = io::get_f32(blob, off);
      off += 4;
    }
    s.frames.push_back(std::move(g));
  }
  // Life is stored as f32 for consumers of the blob; the exact series is
  // rebuilt from the manifest's step cycles and must agree with it.
  s.remaining_life = remaining_life_series(s.path);
  for (std::size_t t = 0; t < n_frames; ++t, off += 4) {
    if (io::get_f32(blob, off) != static_cast<float>(s.remaining_life[t]))
      malformed("sample '" + s.sample_id + "': remaining life disagrees with path");
  }
  return s;
}

}  // namespace detail

inline Library load_library(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  if (!std::filesystem::is_regular_file(manifest_path))
    throw LoadError(LoadError::Kind::missing_part, "missing manifest " + manifest_path.string());
  json m;
  try {
    m = json::parse(io::read_text(manifest_path));
  } catch (const json::exception& e) {
    detail::malformed(std::string("manifest is not valid JSON: ") + e.what());
  }
  try {
    if (m.at("format").get<std::string>() != "fcg-library") detail::malformed("not a library manifest");
    const auto version = m.at("format_version").get<std::uint32_t>();
    if (version != kLibraryFormatVersion)
      throw LoadError(LoadError::Kind::version_mismatch,
                      "library format version " + std::to_string(version) + ", expected " +
                          std::to_string(kLibraryFormatVersion));
    Library lib;
    const json& sp = m.at("specs");
    lib.specs.plate = read_plate(sp.at("plate"), "specs.plate");
    lib.specs.material = read_material(sp.at("material"), "specs.material");
    lib.specs.noise = read_noise(sp.at("noise"), "specs.noise");
    lib.specs.n_slices = sp.at("n_slices").get<std::size_t>();
    lib.specs.resolution = read_resolution(sp.at("resolution"), "specs.resolution");
    lib.specs.test_fraction = sp.at("test_fraction").get<double>();
    lib.seed = m.at("seed").get<std::uint64_t>();
    lib.config_hash = m.at("config_hash").get<std::string>();
    lib.train_ids = m.at("split").at("train").get<std::vector<std::string>>();
    lib.test_ids = m.at("split").at("test").get<std::vector<std::string>>();
    for (const auto& entry : m.at("samples")) lib.samples.push_back(detail::decode_sample(entry, dir, lib.specs));
    if (lib.train_ids.size() + lib.test_ids.size() != lib.samples.size())
      detail::malformed("split does not cover the samples");
    return lib;
  } catch (const json::exception& e) {
    detail::malformed(std::string("manifest: ") + e.what());
  } catch (const ConfigError& e) {
    detail::malformed(std::string("manifest: ") + e.what());
  }
}

}  // namespace fcg
