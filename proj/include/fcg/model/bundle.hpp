#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "fcg/binary_io.hpp"
#include "fcg/config.hpp"
#include "fcg/errors.hpp"
#include "fcg/model/training.hpp"

namespace fcg::model {

inline constexpr std::uint32_t kBundleFormatVersion = 1;
inline constexpr char kBundleMagic[4] = {'F', 'C', 'G', 'M'};

namespace detail {

/// "FCGM", u32 version, u32 block count, then per block u32 rows, u32 cols
/// and the row-major float32 values. Little-endian throughout.
inline io::Bytes encode_blocks(const nn::ParamList<Real>& params) {
  io::Bytes out(kBundleMagic, kBundleMagic + 4);
  io::put_u32(out, kBundleFormatVersion);
  io::put_u32(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    io::put_u32(out, static_cast<std::uint32_t>(p.value->rows()));
    io::put_u32(out, static_cast<std::uint32_t>(p.value->cols()));
    for (Eigen::Index i = 0; i < p.value->size(); ++i) io::put_f32(out, p.value->data()[i]);
  }
  return out;
}

inline json describe_blocks(const nn::ParamList<Real>& params) {
  json blocks = json::array();
  for (const auto& p : params) blocks.push_back({{"name", p.name}, {"shape", {p.value->rows(), p.value->cols()}}});
  return blocks;
}

[[noreturn]] inline void bad_bundle(const std::string& what) {
  throw LoadError(LoadError::Kind::malformed, "malformed model bundle: " + what);
}

inline void decode_blocks(const io::Bytes& blob, const std::string& part, const nn::ParamList<Real>& params) {
  if (blob.size() < 12) throw LoadError(LoadError::Kind::truncated, "model part '" + part + "': file truncated");
  if (!std::equal(kBundleMagic, kBundleMagic + 4, blob.begin())) bad_bundle("part '" + part + "': bad magic");
  if (io::get_u32(blob, 4) != kBundleFormatVersion)
    throw LoadError(LoadError::Kind::version_mismatch,
                    "model part '" + part + "': blob version " + std::to_string(io::get_u32(blob, 4)));
  if (io::get_u32(blob, 8) != params.size()) bad_bundle("part '" + part + "': block count differs from manifest");
  std::size_t off = 12;
  for (const auto& p : params) {
    if (off + 8 > blob.size()) throw LoadError(LoadError::Kind::truncated, "model part '" + part + "': file truncated");
    const auto rows = io::get_u32(blob, off), cols = io::get_u32(blob, off + 4);
    off += 8;
    if (rows != p.value->rows() || cols != p.value->cols())
      bad_bundle("block '" + p.name + "' has shape " + std::to_string(rows) + "x" + std::to_string(cols));
    if (off + 4 * static_cast<std::size_t>(p.value->size()) > blob.size())
      throw LoadError(LoadError::Kind::truncated, "model part '" + part + "': file truncated");
    for (Eigen::Index i = 0; i < p.value->size(); ++i, off += 4) p.value->data()[i] = io::get_f32(blob, off);
  }
  if (off != blob.size()) bad_bundle("part '" + part + "': trailing bytes");
}

}  // namespace detail

/// Writes manifest.json plus vae.bin, seq.bin and life.bin under `dir`.
inline void save_bundle(ModelBundle& b, const std::filesystem::path& dir) {
  io::ensure_directory(dir);
  json parts = json::object();
  const auto write_part = [&](const std::string& name, const nn::ParamList<Real>& params) {
    const io::Bytes blob = detail::encode_blocks(params);
    io::write_file(dir / (name + ".bin"), blob);
    parts[name] = {{"file", name + ".bin"}, {"crc32", io::hex32(io::crc32(blob))}, {"blocks", detail::describe_blocks(params)}};
  };
  write_part("vae", b.vae.parameters());
  write_part("seq", b.seq.parameters());
  write_part("life", b.life.parameters());
  const json m = {{"format", "fcg-model"},
                  {"format_version", kBundleFormatVersion},
                  {"config_hash", b.config_hash},
                  {"seed", b.seed},
                  {"training", to_json(b.config)},
                  {"input_dim", b.vae.input_dim()},
                  {"latent_dim", b.vae.latent_dim()},
                  {"max_frames", b.max_frames},
                  {"life_normalization", {{"mean", b.life.target_mean()}, {"std", b.life.target_std()}}},
                  {"n_rare_train", b.n_rare_train},
                  {"loss_traces", {{"vae", b.vae_trace}, {"seq", b.seq_trace}, {"life", b.life_trace}}},
                  {"parts", parts}};
  io::write_file(dir / "manifest.json", m.dump(1) + "\n");
}

inline ModelBundle load_bundle(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  if (!std::filesystem::is_regular_file(manifest_path))
    throw LoadError(LoadError::Kind::missing_part, "missing bundle manifest " + manifest_path.string());
  json m;
  try {
    m = json::parse(io::read_text(manifest_path));
  } catch (const json::exception& e) {
    detail::bad_bundle(std::string("manifest is not valid JSON: ") + e.what());
  }
  try {
    if (m.at("format").get<std::string>() != "fcg-model") detail::bad_bundle("not a model manifest");
    const auto version = m.at("format_version").get<std::uint32_t>();
    if (version != kBundleFormatVersion)
      throw LoadError(LoadError::Kind::version_mismatch, "model bundle format version " + std::to_string(version) +
                                                             ", expected " + std::to_string(kBundleFormatVersion));
    ModelBundle b;
    b.config = read_training(m.at("training"), "training");
    b.config_hash = m.at("config_hash").get<std::string>();
    b.seed = m.at("seed").get<std::uint64_t>();
    b.max_frames = m.at("max_frames").get<std::size_t>();
    b.n_rare_train = m.at("n_rare_train").get<std::size_t>();
    b.vae_trace = m.at("loss_traces").at("vae").get<std::vector<double>>();
    b.seq_trace = m.at("loss_traces").at("seq").get<std::vector<double>>();
    b.life_trace = m.at("loss_traces").at("life").get<std::vector<double>>();
    const auto input_dim = m.at("input_dim").get<std::size_t>();
    if (m.at("latent_dim").get<std::size_t>() != b.config.latent_dim) detail::bad_bundle("latent_dim disagrees with training config");

    std::mt19937_64 scratch(0);
    b.vae = Vae<Real>(input_dim, b.config.latent_dim, b.config.vae_hidden, scratch);
    b.seq = SeqModel<Real>(b.config.latent_dim, b.config.seq_hidden, scratch);
    b.life = LifeModel<Real>(b.config.latent_dim, b.config.life_hidden, scratch);
    b.life.set_normalization(m.at("life_normalization").at("mean").get<double>(),
                             m.at("life_normalization").at("std").get<double>());

    const auto read_part = [&](const std::string& name, const nn::ParamList<Real>& params) {
      const json& part = m.at("parts").at(name);
      const auto file = dir / part.at("file").get<std::string>();
      if (!std::filesystem::is_regular_file(file))
        throw LoadError(LoadError::Kind::missing_part, "model part '" + name + "': missing file " + file.string());
      const json& blocks = part.at("blocks");
      if (blocks.size() != params.size()) detail::bad_bundle("part '" + name + "': block list differs");
      for (std::size_t i = 0; i < params.size(); ++i)
        if (blocks[i].at("name").get<std::string>() != params[i].name)
          detail::bad_bundle("part '" + name + "': unexpected block '" + blocks[i].at("name").get<std::string>() + "'");
      const io::Bytes blob = io::read_file(file);
      if (io::hex32(io::crc32(blob)) != part.at("crc32").get<std::string>())
        throw LoadError(LoadError::Kind::checksum, "model part '" + name + "': checksum mismatch");
      detail::decode_blocks(blob, name, params);
    };
    read_part("vae", b.vae.parameters());
    read_part("seq", b.seq.parameters());
    read_part("life", b.life.parameters());
    return b;
  } catch (const json::exception& e) {
    detail::bad_bundle(std::string("manifest: ") + e.what());
  } catch (const ConfigError& e) {
    detail::bad_bundle(std::string("manifest: ") + e.what());
  }
}

}  // namespace fcg::model
