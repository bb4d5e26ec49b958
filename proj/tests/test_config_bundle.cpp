#include <gtest/gtest.h>

#include <filesystem>
#include <string>

#include <unistd.h>

#include "fcg/config.hpp"
#include "fcg/model/bundle.hpp"

namespace {

using namespace fcg;
namespace fs = std::filesystem;

std::string failing_field(const std::string& text) {
  try {
    read_config(json::parse(text));
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<accepted>";
}

TEST(Config, DefaultsRoundTrip) {
  const ToolkitConfig c;
  const ToolkitConfig back = read_config(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_EQ(config_hash(back), config_hash(c));
  EXPECT_EQ(config_hash(c).size(), 8u);
}

TEST(Config, EmptyDocumentTakesDefaults) {
  EXPECT_EQ(to_json(read_config(json::object())), to_json(ToolkitConfig{}));
}

TEST(Config, FieldPathsInErrors) {
  EXPECT_EQ(failing_field(R"({"slicing": {"n_slices": 0}})"), "slicing.n_slices");
  EXPECT_EQ(failing_field(R"({"plate": {"width": -1}})"), "plate.width");
  EXPECT_EQ(failing_field(R"({"noise": {"rare_rel_prob": 1.5}})"), "noise.rare_rel_prob");
  EXPECT_EQ(failing_field(R"({"library": {"resolution": {"rows": 4}}})"), "library.resolution.rows");
  EXPECT_EQ(failing_field(R"({"training": {"lambda": -3}})"), "training.lambda");
  EXPECT_EQ(failing_field(R"({"training": {"latent_dim": "two"}})"), "training.latent_dim");
  EXPECT_EQ(failing_field(R"({"evaluation": {"t_obs": [0.5, 1.5]}})"), "evaluation.t_obs");
  EXPECT_EQ(failing_field(R"({"plate": {"widht": 0.01}})"), "plate.widht");
  EXPECT_EQ(failing_field(R"({"extra": 1})"), "extra");
}

TEST(Config, HashTracksContent) {
  ToolkitConfig a, b;
  b.training.lambda = 0.0;
  EXPECT_NE(config_hash(a), config_hash(b));
}

class BundleFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    LibrarySpecs specs;
    specs.resolution = {16, 16};
    Library lib = generate_library(12, specs, 2);
    lib.config_hash = "12345678";
    model::TrainingConfig cfg;
    cfg.vae_hidden = {16, 8};
    cfg.seq_hidden = 8;
    cfg.life_hidden = {8};
    cfg.vae_epochs = cfg.seq_epochs = cfg.life_epochs = 2;
    bundle_ = model::train_bundle(lib, cfg, 5);
    dir_ = fs::temp_directory_path() / ("fcg_bundle_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    model::save_bundle(bundle_, dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  LoadError::Kind kind() {
    try {
      model::load_bundle(dir_);
    } catch (const LoadError& e) {
      return e.kind();
    }
    ADD_FAILURE() << "load_bundle did not throw";
    return LoadError::Kind::malformed;
  }

  model::ModelBundle bundle_;
  fs::path dir_;
};

TEST_F(BundleFiles, RoundTripPreservesParametersAndOutputs) {
  model::ModelBundle back = model::load_bundle(dir_);
  const auto a = bundle_.vae.parameters(), b = back.vae.parameters();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(*a[i].value, *b[i].value) << a[i].name;
  const model::Matrix z = model::Matrix::Random(3, static_cast<Eigen::Index>(bundle_.seq.latent_dim()));
  EXPECT_EQ(bundle_.seq.forecast(z, 4), back.seq.forecast(z, 4));
  EXPECT_EQ(bundle_.life.predict(z), back.life.predict(z));
  EXPECT_EQ(back.config_hash, "12345678");
  EXPECT_EQ(back.max_frames, bundle_.max_frames);
  EXPECT_EQ(back.seq_trace, bundle_.seq_trace);
}

TEST_F(BundleFiles, MissingPart) {
  fs::remove(dir_ / "seq.bin");
  EXPECT_EQ(kind(), LoadError::Kind::missing_part);
}

TEST_F(BundleFiles, CorruptPart) {
  auto bytes = io::read_file(dir_ / "life.bin");
  bytes[bytes.size() - 3] ^= 0x40;
  io::write_file(dir_ / "life.bin", bytes);
  EXPECT_EQ(kind(), LoadError::Kind::checksum);
}

TEST_F(BundleFiles, VersionMismatch) {
  auto m = json::parse(io::read_text(dir_ / "manifest.json"));
  m["format_version"] = 7;
  io::write_file(dir_ / "manifest.json", m.dump());
  EXPECT_EQ(kind(), LoadError::Kind::version_mismatch);
}

TEST_F(BundleFiles, ShapeDisagreement) {
  auto m = json::parse(io::read_text(dir_ / "manifest.json"));
  m["training"]["seq_hidden"] = 9;
  io::write_file(dir_ / "manifest.json", m.dump());
  EXPECT_EQ(kind(), LoadError::Kind::malformed);
}

}  // namespace
