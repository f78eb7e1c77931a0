#pragma once

#include <algorithm>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ggea {

namespace fs = std::filesystem;

// One clean/degraded pair from a flat GT_all / LQ_all tree, matched by stem.
struct PairedSample {
  std::string id;
  fs::path gt_path;
  fs::path lq_path;
};

enum class SceneCategory { rain, snow, other };

inline const char* to_string(SceneCategory c) {
  switch (c) {
    case SceneCategory::rain: return "rain";
    case SceneCategory::snow: return "snow";
    default: return "other";
  }
}

// One scene folder: a single gt.png plus degraded_*.png frames sorted by
// numeric suffix.
struct SceneRecord {
  std::string scene_id;
  fs::path gt_path;
  std::vector<fs::path> degraded_paths;
  SceneCategory category = SceneCategory::other;
};

struct ScanResult {
  std::vector<PairedSample> pairs;
  std::vector<SceneRecord> scenes;
  std::vector<std::string> warnings;
};

namespace detail {

inline bool is_image_file(const fs::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

// "degraded_12.png" -> 12; nullopt if the name does not match.
inline std::optional<long> degraded_index(const fs::path& p) {
  const std::string stem = p.stem().string();
  constexpr const char* prefix = "degraded_";
  if (stem.rfind(prefix, 0) != 0) return std::nullopt;
  const std::string suffix = stem.substr(9);
  if (suffix.empty() ||
      !std::all_of(suffix.begin(), suffix.end(), [](unsigned char c) { return std::isdigit(c); }))
    return std::nullopt;
  return std::stol(suffix);
}

}  // namespace detail

// Scans a FoundIR-style tree (root/GT_all, root/LQ_all) for stems present in
// both directories. One-sided stems are reported as warnings.
inline ScanResult scan_flat_pairs(const fs::path& root) {
  ScanResult result;
  const fs::path gt_dir = root / "GT_all", lq_dir = root / "LQ_all";
  for (const auto& dir : {gt_dir, lq_dir})
    if (!fs::is_directory(dir))
      throw std::runtime_error("scan_flat_pairs: missing directory " + dir.string());

  auto collect = [](const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.is_regular_file() && detail::is_image_file(entry.path()))
        files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    return files;
  };
  const auto gt_files = collect(gt_dir);
  const auto lq_files = collect(lq_dir);

  auto stem_of = [](const fs::path& p) { return p.stem().string(); };
  for (const auto& gt : gt_files) {
    const auto it = std::find_if(lq_files.begin(), lq_files.end(),
                                 [&](const fs::path& lq) { return stem_of(lq) == stem_of(gt); });
    if (it != lq_files.end())
      result.pairs.push_back({stem_of(gt), gt, *it});
    else
      result.warnings.push_back("unpaired GT file: " + gt.string());
  }
  for (const auto& lq : lq_files)
    if (std::none_of(gt_files.begin(), gt_files.end(),
                     [&](const fs::path& gt) { return stem_of(gt) == stem_of(lq); }))
      result.warnings.push_back("unpaired LQ file: " + lq.string());
  return result;
}

// Scans all frames of one scene directory (gt.png + degraded_*.png).
// Returns nullopt with a warning string appended when the folder is not a
// valid scene.
inline std::optional<SceneRecord> scan_scene_dir(const fs::path& dir, SceneCategory category,
                                                 std::vector<std::string>& warnings) {
  SceneRecord record;
  record.scene_id = dir.filename().string();
  record.category = category;
  record.gt_path = dir / "gt.png";
  if (!fs::is_regular_file(record.gt_path)) {
    warnings.push_back("scene without gt.png skipped: " + dir.string());
    return std::nullopt;
  }
  std::vector<std::pair<long, fs::path>> frames;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file())
      if (auto idx = detail::degraded_index(entry.path()))
        frames.emplace_back(*idx, entry.path());
  if (frames.empty()) {
    warnings.push_back("scene without degraded frames skipped: " + dir.string());
    return std::nullopt;
  }
  std::sort(frames.begin(), frames.end());
  for (auto& [idx, path] : frames) record.degraded_paths.push_back(path);
  return record;
}

// Scans a WeatherStream-style tree: root/<category>/<scene>/{gt.png,
// degraded_*.png}. Category is inferred from the top-level folder name;
// ordering is deterministic (category dir, then scene id).
inline ScanResult scan_scenes(const fs::path& root) {
  ScanResult result;
  if (!fs::is_directory(root))
    throw std::runtime_error("scan_scenes: not a directory: " + root.string());

  std::vector<fs::path> category_dirs;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory()) category_dirs.push_back(entry.path());
  std::sort(category_dirs.begin(), category_dirs.end());

  for (const auto& cat_dir : category_dirs) {
    const std::string name = cat_dir.filename().string();
    const SceneCategory cat = name == "rain"   ? SceneCategory::rain
                              : name == "snow" ? SceneCategory::snow
                                               : SceneCategory::other;
    std::vector<fs::path> scene_dirs;
    for (const auto& entry : fs::directory_iterator(cat_dir))
      if (entry.is_directory()) scene_dirs.push_back(entry.path());
    std::sort(scene_dirs.begin(), scene_dirs.end());
    for (const auto& scene_dir : scene_dirs)
      if (auto record = scan_scene_dir(scene_dir, cat, result.warnings))
        result.scenes.push_back(std::move(*record));
  }
  return result;
}

}  // namespace ggea
