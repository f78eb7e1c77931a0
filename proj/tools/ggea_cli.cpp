// Command-line surface over the ggea library. Machine-readable results go to
// stdout, diagnostics to stderr. Exit codes: 0 success, 1 usage error,
// 2 data error.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ggea/dataset.hpp"
#include "ggea/edge_weight.hpp"
#include "ggea/gradcheck.hpp"
#include "ggea/image_io.hpp"
#include "ggea/losses.hpp"
#include "ggea/pipeline.hpp"
#include "ggea/report.hpp"
#include "ggea/scoring.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

// Weight maps carry c=1; reuse the PNG writer by scaling [0,1) to 8 bits.
int cmd_weightmap(const std::string& gt_path, const std::string& out_path,
                  const std::string& variant, const std::string& format) {
  const ggea::ImageTensor gt = ggea::load_image(gt_path);
  const ggea::WeightMap map =
      variant == "diffbir" ? ggea::diffbir_weight_map(gt) : ggea::ggea_weight_map(gt);
  if (format == "png")
    ggea::save_image(map, out_path);
  else
    ggea::save_pfm(map, out_path);
  return kExitOk;
}

int cmd_loss(const std::string& pred_path, const std::string& gt_path, double lambda_ssim,
             int ms_kernel, bool no_ms_ssim, bool divide_by_channels) {
  const ggea::ImageTensor pred = ggea::load_image(pred_path);
  const ggea::ImageTensor gt = ggea::load_image(gt_path);
  ggea::LossConfig cfg;
  cfg.lambda_ssim = lambda_ssim;
  cfg.ms_ssim_kernel = ms_kernel;
  cfg.divide_by_channels = divide_by_channels;
  const ggea::LossReport report = ggea::total_loss(pred, gt, cfg, !no_ms_ssim);
  std::cout << ggea::loss_report_json(report) << "\n";
  return kExitOk;
}

int cmd_score(const std::string& restored_dir, const std::string& gt_dir,
              const std::string& csv_path, bool luminance_only) {
  const ggea::ScoreSummary summary = ggea::score_directory(restored_dir, gt_dir, luminance_only);
  for (const auto& w : summary.warnings) std::cerr << "warning: " << w << "\n";
  for (const auto& r : summary.records)
    if (!r.ok) std::cerr << "warning: " << r.scene_id << ": " << r.error << "\n";
  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot write " + csv_path);
    out << ggea::score_csv(summary);
  }
  std::cout << ggea::score_summary_json(summary) << "\n";
  return kExitOk;
}

std::map<std::string, fs::path> image_stems(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir.string());
  std::map<std::string, fs::path> stems;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file()) stems[entry.path().stem().string()] = entry.path();
  return stems;
}

int cmd_ensemble(const std::string& dir_a, const std::string& dir_b, double w_a, double w_b,
                 const std::string& out_dir) {
  const ggea::EnsembleConfig cfg{w_a, w_b};
  cfg.validate();
  const auto a = image_stems(dir_a), b = image_stems(dir_b);
  std::vector<std::string> extras;
  for (const auto& [stem, path] : a)
    if (!b.count(stem)) extras.push_back(path.string());
  for (const auto& [stem, path] : b)
    if (!a.count(stem)) extras.push_back(path.string());
  if (!extras.empty()) {
    std::cerr << "error: unmatched filenames:\n";
    for (const auto& e : extras) std::cerr << "  " << e << "\n";
    return kExitData;
  }
  if (a.empty()) throw std::runtime_error("no images to ensemble");
  fs::create_directories(out_dir);
  for (const auto& [stem, path_a] : a) {
    try {
      const ggea::ImageTensor fused =
          ggea::ensemble(ggea::load_image(path_a), ggea::load_image(b.at(stem)), cfg);
      ggea::save_image(fused, fs::path(out_dir) / (stem + ".png"));
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(stem + ": " + e.what());  // bad pair is a data error
    }
  }
  return kExitOk;
}

int cmd_avg(const std::string& scene_dir, const std::string& out_path, int pad_multiple) {
  if (!fs::is_directory(scene_dir)) throw std::runtime_error("not a directory: " + scene_dir);
  std::vector<std::pair<long, fs::path>> degraded;
  std::vector<fs::path> all;
  for (const auto& entry : fs::directory_iterator(scene_dir))
    if (entry.is_regular_file() && ggea::detail::is_image_file(entry.path())) {
      all.push_back(entry.path());
      if (auto idx = ggea::detail::degraded_index(entry.path()))
        degraded.emplace_back(*idx, entry.path());
    }
  std::vector<fs::path> frames;
  if (!degraded.empty()) {
    std::sort(degraded.begin(), degraded.end());
    for (auto& [idx, path] : degraded) frames.push_back(path);
  } else {
    std::sort(all.begin(), all.end());
    frames = all;
  }
  if (frames.empty()) throw std::runtime_error("no frames in " + scene_dir);

  std::vector<ggea::ImageTensor> tensors;
  ggea::PadSpec spec;
  try {
    for (const auto& frame : frames) {
      auto [padded, s] = ggea::pad_to_multiple(ggea::load_image(frame), pad_multiple);
      spec = s;
      tensors.push_back(std::move(padded));
    }
    ggea::save_image(ggea::unpad(ggea::average_frames(tensors), spec), out_path);
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(e.what());  // inconsistent frames are a data error
  }
  return kExitOk;
}

int cmd_gradcheck(int size, std::uint64_t seed, double eps) {
  const auto report = ggea::run_gradcheck(size, seed, eps);
  constexpr double threshold = 1e-5;
  std::cout << ggea::gradcheck_json(report, threshold) << "\n";
  return report.max_abs_error < threshold ? kExitOk : kExitData;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edge-aware restoration losses, metrics and ensembling toolkit"};
  app.require_subcommand(1);

  std::string gt, pred, out, variant = "ggea", format = "pfm";
  std::string restored_dir, gt_dir, csv_path, dir_a, dir_b, scene_dir;
  double lambda_ssim = 1.0, w_a = 0.4, w_b = 0.6, eps = 1e-3;
  int ms_kernel = 7, pad_multiple = 8, size = 16;
  std::uint64_t seed = 1;
  bool no_ms_ssim = false, divide_by_channels = false, luminance_only = false;

  auto* weightmap = app.add_subcommand("weightmap", "Write an edge weight map for an image");
  weightmap->add_option("--gt", gt, "source image")->required();
  weightmap->add_option("--out", out, "output file")->required();
  weightmap->add_option("--variant", variant)->check(CLI::IsMember({"ggea", "diffbir"}));
  weightmap->add_option("--format", format)->check(CLI::IsMember({"pfm", "png"}));

  auto* loss = app.add_subcommand("loss", "Print the loss report for a prediction/gt pair");
  loss->add_option("--pred", pred)->required();
  loss->add_option("--gt", gt)->required();
  loss->add_option("--lambda-ssim", lambda_ssim);
  loss->add_option("--ms-kernel", ms_kernel);
  loss->add_flag("--no-ms-ssim", no_ms_ssim, "skip the MS-SSIM term");
  loss->add_flag("--divide-by-channels", divide_by_channels,
                 "include channels in the weighted-loss denominator");

  auto* score = app.add_subcommand("score", "Score a directory of restored images against gt");
  score->add_option("--restored", restored_dir)->required();
  score->add_option("--gt", gt_dir)->required();
  score->add_option("--csv", csv_path, "also write a CSV report");
  score->add_flag("--luminance", luminance_only, "SSIM on luminance instead of channel average");

  auto* ens = app.add_subcommand("ensemble", "Fuse two directories of filename-paired images");
  ens->add_option("--a", dir_a)->required();
  ens->add_option("--b", dir_b)->required();
  ens->add_option("--wa", w_a);
  ens->add_option("--wb", w_b);
  ens->add_option("--out", out)->required();

  auto* avg = app.add_subcommand("avg", "Average all frames of one scene directory");
  avg->add_option("--scene", scene_dir)->required();
  avg->add_option("--out", out)->required();
  avg->add_option("--pad", pad_multiple);

  auto* gradcheck = app.add_subcommand("gradcheck", "Verify the analytic loss gradient");
  gradcheck->add_option("--size", size);
  gradcheck->add_option("--seed", seed);
  gradcheck->add_option("--eps", eps);

  try {
    app.parse(argc, argv);
    if (*weightmap) return cmd_weightmap(gt, out, variant, format);
    if (*loss) return cmd_loss(pred, gt, lambda_ssim, ms_kernel, no_ms_ssim, divide_by_channels);
    if (*score) return cmd_score(restored_dir, gt_dir, csv_path, luminance_only);
    if (*ens) return cmd_ensemble(dir_a, dir_b, w_a, w_b, out);
    if (*avg) return cmd_avg(scene_dir, out, pad_multiple);
    if (*gradcheck) return cmd_gradcheck(size, seed, eps);
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
