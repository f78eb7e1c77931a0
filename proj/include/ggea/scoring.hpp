#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ggea/image_io.hpp"
#include "ggea/metrics.hpp"

namespace ggea {

struct ScoreRecord {
  std::string scene_id;
  double psnr_db = 0.0;
  double ssim = 0.0;
  bool ok = true;
  std::string error;
};

struct ScoreSummary {
  std::vector<ScoreRecord> records;
  double mean_psnr = 0.0;
  double mean_ssim = 0.0;
  std::vector<std::string> warnings;
};

// Scores filename-paired images (matched by stem) in two directories.
// Unreadable or mismatched-size pairs are flagged per record; aggregates
// cover the remaining records. Ordering is lexicographic by stem.
inline ScoreSummary score_directory(const std::filesystem::path& restored_dir,
                                    const std::filesystem::path& gt_dir,
                                    bool luminance_only = false) {
  namespace fs = std::filesystem;
  for (const auto& dir : {restored_dir, gt_dir})
    if (!fs::is_directory(dir))
      throw std::runtime_error("score_directory: not a directory: " + dir.string());

  std::map<std::string, fs::path> restored, gt;
  for (const auto& entry : fs::directory_iterator(restored_dir))
    if (entry.is_regular_file()) restored[entry.path().stem().string()] = entry.path();
  for (const auto& entry : fs::directory_iterator(gt_dir))
    if (entry.is_regular_file()) gt[entry.path().stem().string()] = entry.path();

  ScoreSummary summary;
  for (const auto& [stem, path] : restored)
    if (!gt.count(stem)) summary.warnings.push_back("no ground truth for " + path.string());
  for (const auto& [stem, path] : gt)
    if (!restored.count(stem)) summary.warnings.push_back("no restored image for " + path.string());

  double psnr_acc = 0.0, ssim_acc = 0.0;
  int scored = 0;
  for (const auto& [stem, gt_path] : gt) {
    const auto it = restored.find(stem);
    if (it == restored.end()) continue;
    ScoreRecord record;
    record.scene_id = stem;
    try {
      const ImageTensor pred = load_image(it->second);
      const ImageTensor truth = load_image(gt_path);
      record.psnr_db = psnr(pred, truth);
      record.ssim = ssim(pred, truth, 11, 1.0, luminance_only);
      psnr_acc += record.psnr_db;
      ssim_acc += record.ssim;
      ++scored;
    } catch (const std::exception& e) {
      record.ok = false;
      record.error = e.what();
    }
    summary.records.push_back(std::move(record));
  }
  if (summary.records.empty())
    throw std::runtime_error("score_directory: no filename-paired images found");
  if (scored > 0) {
    summary.mean_psnr = psnr_acc / scored;
    summary.mean_ssim = ssim_acc / scored;
  }
  return summary;
}

inline std::string format_metric(double v) {
  if (std::isinf(v)) return "inf";
  std::ostringstream out;
  out << std::setprecision(10) << v;
  return out.str();
}

// CSV with header scene_id,psnr_db,ssim; infinite PSNR serialized as "inf".
inline std::string score_csv(const ScoreSummary& summary) {
  std::ostringstream out;
  out << "scene_id,psnr_db,ssim\n";
  for (const auto& r : summary.records) {
    if (!r.ok) continue;
    out << r.scene_id << "," << format_metric(r.psnr_db) << "," << format_metric(r.ssim) << "\n";
  }
  return out.str();
}

}  // namespace ggea
