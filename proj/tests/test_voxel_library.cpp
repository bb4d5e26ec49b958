#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "fcg/binary_io.hpp"
#include "fcg/library.hpp"
#include "fcg/library_io.hpp"
#include "fcg/voxel.hpp"

namespace {

using namespace fcg;
namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fcg_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

TEST(Rasterize, HorizontalCrackFillsRowPrefix) {
  const PlateSpec plate;
  const Resolution res;
  const std::vector<Point2> pts{{0.001, 0.005}, {0.004, 0.005}};
  const VoxelGrid g = rasterize(pts, plate, res);
  const std::size_t row = 32, tip_col = static_cast<std::size_t>(std::floor(0.004 / plate.width * 64));
  for (std::size_t r = 0; r < 64; ++r)
    for (std::size_t c = 0; c < 64; ++c) EXPECT_EQ(g.at(r, c), (r == row && c <= tip_col) ? 1.0F : 0.0F);
}

TEST(Rasterize, NotchOnlyCellCount) {
  const PlateSpec plate;
  const std::vector<Point2> pts{{0.001, 0.005}};
  const VoxelGrid g = rasterize(pts, plate, Resolution{});
  const auto expected = static_cast<long>(std::ceil(64 * 0.1));
  EXPECT_LE(std::labs(static_cast<long>(g.count_set()) - expected), 1);
}

TEST(Rasterize, DiagonalIsConnected) {
  const PlateSpec plate;
  const std::vector<Point2> pts{{0.001, 0.005}, {0.004, 0.0075}};
  const VoxelGrid g = rasterize(pts, plate, Resolution{});
  const auto path = extract_path(g);
  EXPECT_EQ(path.size(), static_cast<std::size_t>(std::floor(0.004 / plate.width * 64)) + 1);
}

TEST(Rasterize, OutsidePointThrows) {
  const PlateSpec plate;
  const std::vector<Point2> pts{{0.011, 0.005}};
  EXPECT_THROW(rasterize(pts, plate, Resolution{}), DomainError);
}

TEST(ExtractPath, FollowsHorizontalCrack) {
  const PlateSpec plate;
  const std::vector<Point2> pts{{0.001, 0.005}, {0.003, 0.005}};
  const auto path = extract_path(rasterize(pts, plate, Resolution{}));
  ASSERT_FALSE(path.empty());
  for (const auto& p : path) EXPECT_NEAR(p.y, (32 + 0.5) * plate.height / 64, 1e-12);
}

TEST(Library, NoNoiseGivesIdenticalSamples) {
  LibrarySpecs specs;
  specs.noise.tension_std = 0.0;
  specs.noise.shear_std = 0.0;
  const Library lib = generate_library(10, specs, 3);
  for (const auto& s : lib.samples) {
    EXPECT_EQ(s.frames, lib.samples.front().frames);
    EXPECT_EQ(s.path, lib.samples.front().path);
  }
}

TEST(Library, SplitAndFrames) {
  const Library lib = generate_library(50, LibrarySpecs{}, 8);
  EXPECT_EQ(lib.train_ids.size(), 40u);
  EXPECT_EQ(lib.test_ids.size(), 10u);
  for (const auto& s : lib.samples) {
    EXPECT_EQ(s.frames.size(), s.path.points.size());
    EXPECT_EQ(s.remaining_life.size(), s.frames.size());
    EXPECT_EQ(s.remaining_life.back(), 0.0);
    EXPECT_NEAR(s.remaining_life.front(), s.path.total_life, 1e-9 * s.path.total_life);
    for (std::size_t t = 1; t < s.frames.size(); ++t) EXPECT_GE(s.frames[t].count_set(), s.frames[t - 1].count_set());
  }
}

TEST(Library, RareFractionMatchesBinomial) {
  const LibrarySpecs specs;
  const Library lib = generate_library(1000, specs, 21);
  const double p_slice = std::erfc(rare_z_threshold(specs.noise.rare_rel_prob) / std::sqrt(2.0));
  const double expected = 1.0 - std::pow(1.0 - p_slice, 2.0 * static_cast<double>(specs.n_slices));
  EXPECT_GE(lib.rare_fraction(), 0.5 * expected);
  EXPECT_LE(lib.rare_fraction(), 2.0 * expected);
}

class LibraryFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    lib_ = generate_library(10, LibrarySpecs{}, 17);
    lib_.config_hash = "0badf00d";
    dir_ = scratch(::testing::UnitTest::GetInstance()->current_test_info()->name());
    save_library(lib_, dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path blob(std::size_t i) const { return dir_ / "samples" / (lib_.samples[i].sample_id + ".bin"); }

  Library lib_;
  fs::path dir_;
};

TEST_F(LibraryFiles, RoundTrip) {
  const Library back = load_library(dir_);
  EXPECT_EQ(back, lib_);
}

TEST_F(LibraryFiles, SameSeedSameBytes) {
  const fs::path again = scratch("again");
  Library other = generate_library(10, LibrarySpecs{}, 17);
  other.config_hash = lib_.config_hash;
  save_library(other, again);
  EXPECT_EQ(io::read_file(again / "manifest.json"), io::read_file(dir_ / "manifest.json"));
  for (const auto& s : lib_.samples) {
    const auto rel = fs::path("samples") / (s.sample_id + ".bin");
    EXPECT_EQ(io::read_file(again / rel), io::read_file(dir_ / rel));
  }
  fs::remove_all(again);
}

LoadError::Kind load_kind(const fs::path& dir) {
  try {
    load_library(dir);
  } catch (const LoadError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "load_library did not throw";
  return LoadError::Kind::malformed;
}

TEST_F(LibraryFiles, FlippedByteIsChecksumError) {
  auto bytes = io::read_file(blob(3));
  bytes[bytes.size() / 2] ^= 0x01;
  io::write_file(blob(3), bytes);
  EXPECT_EQ(load_kind(dir_), LoadError::Kind::checksum);
}

TEST_F(LibraryFiles, TruncatedBlob) {
  auto bytes = io::read_file(blob(0));
  bytes.resize(bytes.size() - 10);
  io::write_file(blob(0), bytes);
  EXPECT_EQ(load_kind(dir_), LoadError::Kind::truncated);
}

TEST_F(LibraryFiles, MissingBlobNamesSample) {
  fs::remove(blob(4));
  try {
    load_library(dir_);
    FAIL() << "expected a missing-part error";
  } catch (const LoadError& e) {
    EXPECT_EQ(e.kind(), LoadError::Kind::missing_part);
    EXPECT_NE(std::string(e.what()).find(lib_.samples[4].sample_id), std::string::npos);
  }
}

TEST_F(LibraryFiles, VersionMismatch) {
  auto m = json::parse(io::read_text(dir_ / "manifest.json"));
  m["format_version"] = 99;
  io::write_file(dir_ / "manifest.json", m.dump());
  EXPECT_EQ(load_kind(dir_), LoadError::Kind::version_mismatch);
}

TEST_F(LibraryFiles, MissingManifest) {
  fs::remove(dir_ / "manifest.json");
  EXPECT_EQ(load_kind(dir_), LoadError::Kind::missing_part);
}

TEST_F(LibraryFiles, GarbageManifest) {
  io::write_file(dir_ / "manifest.json", std::string("{not json"));
  EXPECT_EQ(load_kind(dir_), LoadError::Kind::malformed);
}

}  // namespace
