#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "ggea/dataset.hpp"
#include "ggea/image_io.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;

namespace {

struct TempTree {
  fs::path root;
  explicit TempTree(const std::string& name) : root(fs::temp_directory_path() / name) {
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~TempTree() { fs::remove_all(root); }
};

void touch_png(const fs::path& path, std::uint64_t seed = 0) {
  fs::create_directories(path.parent_path());
  ggea::save_image(oracle::random_image(1, 3, 8, 8, seed), path);
}

}  // namespace

TEST_CASE("scan_flat_pairs: pairing, warnings, missing dirs") {
  TempTree tree("ggea_flat_pairs");
  touch_png(tree.root / "GT_all" / "00001.jpg", 1);
  touch_png(tree.root / "GT_all" / "00002.jpg", 2);
  touch_png(tree.root / "GT_all" / "gt_only.jpg", 3);
  touch_png(tree.root / "LQ_all" / "00001.jpg", 4);
  touch_png(tree.root / "LQ_all" / "00002.jpg", 5);
  touch_png(tree.root / "LQ_all" / "lq_only.jpg", 6);

  const auto result = ggea::scan_flat_pairs(tree.root);
  REQUIRE(result.pairs.size() == 2);
  CHECK(result.pairs[0].id == "00001");
  CHECK(result.pairs[1].id == "00002");
  CHECK(result.warnings.size() == 2);

  CHECK_THROWS(ggea::scan_flat_pairs(tree.root / "nope"));
}

TEST_CASE("scan_flat_pairs: empty directories give empty list") {
  TempTree tree("ggea_flat_empty");
  fs::create_directories(tree.root / "GT_all");
  fs::create_directories(tree.root / "LQ_all");
  const auto result = ggea::scan_flat_pairs(tree.root);
  CHECK(result.pairs.empty());
  CHECK(result.warnings.empty());
}

TEST_CASE("scan_scenes: categories, skips, numeric frame order") {
  TempTree tree("ggea_scenes");
  touch_png(tree.root / "rain" / "2_0_0_9_30" / "gt.png", 1);
  touch_png(tree.root / "rain" / "2_0_0_9_30" / "degraded_0.png", 2);
  touch_png(tree.root / "rain" / "2_0_0_9_30" / "degraded_2.png", 3);
  touch_png(tree.root / "rain" / "2_0_0_9_30" / "degraded_10.png", 4);
  touch_png(tree.root / "snow" / "11_0_0" / "gt.png", 5);
  touch_png(tree.root / "snow" / "11_0_0" / "degraded_1.png", 6);
  // invalid scenes
  touch_png(tree.root / "snow" / "no_gt" / "degraded_0.png", 7);
  touch_png(tree.root / "snow" / "no_frames" / "gt.png", 8);

  const auto result = ggea::scan_scenes(tree.root);
  REQUIRE(result.scenes.size() == 2);
  CHECK(result.scenes[0].scene_id == "2_0_0_9_30");
  CHECK(result.scenes[0].category == ggea::SceneCategory::rain);
  REQUIRE(result.scenes[0].degraded_paths.size() == 3);
  CHECK(result.scenes[0].degraded_paths[0].filename() == "degraded_0.png");
  CHECK(result.scenes[0].degraded_paths[1].filename() == "degraded_2.png");
  CHECK(result.scenes[0].degraded_paths[2].filename() == "degraded_10.png");
  CHECK(result.scenes[1].category == ggea::SceneCategory::snow);
  CHECK(result.warnings.size() == 2);
}

TEST_CASE("scan_scenes: empty root gives empty list") {
  TempTree tree("ggea_scenes_empty");
  CHECK(ggea::scan_scenes(tree.root).scenes.empty());
}

TEST_CASE("load/save PNG: round trip at 8-bit precision, scaling") {
  TempTree tree("ggea_io");
  const fs::path path = tree.root / "img.png";

  ggea::ImageTensor black(1, 3, 4, 4, 0.0f);
  ggea::save_image(black, path);
  for (float v : ggea::load_image(path).data) CHECK(v == 0.0f);

  ggea::ImageTensor mid(1, 3, 4, 4, 128.0f / 255.0f);
  ggea::save_image(mid, path);
  for (float v : ggea::load_image(path).data) CHECK(v == doctest::Approx(128.0 / 255.0));

  const auto img = oracle::random_image(1, 3, 16, 16, 9);
  ggea::save_image(img, path);
  const auto once = ggea::load_image(path);
  ggea::save_image(once, path);
  CHECK(ggea::load_image(path).data == once.data);  // idempotent at 8 bits

  CHECK_THROWS(ggea::load_image(tree.root / "missing.png"));
}

TEST_CASE("PFM: header, round trip") {
  TempTree tree("ggea_pfm");
  const fs::path path = tree.root / "map.pfm";
  const auto img = oracle::random_image(1, 1, 5, 7, 10);
  ggea::save_pfm(img, path);

  std::ifstream in(path, std::ios::binary);
  std::string magic, dims1, dims2, scale;
  in >> magic >> dims1 >> dims2 >> scale;
  CHECK(magic == "Pf");
  CHECK(dims1 == "7");
  CHECK(dims2 == "5");
  CHECK(scale == "-1.0");

  const auto back = ggea::load_pfm(path);
  CHECK(back.h == 5);
  CHECK(back.w == 7);
  CHECK(back.data == img.data);
}
