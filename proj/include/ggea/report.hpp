#pragma once

#include <string>

#include <json.hpp>

#include "ggea/losses.hpp"
#include "ggea/scoring.hpp"

namespace ggea {

// Shared serialization so CLI output and library results compare
// byte-for-byte.

inline std::string loss_report_json(const LossReport& report) {
  nlohmann::ordered_json j;
  j["l1"] = report.l1;
  j["ms_ssim_loss"] = report.ms_ssim_loss;
  j["ggea"] = report.ggea;
  j["total"] = report.total;
  return j.dump();
}

inline std::string score_summary_json(const ScoreSummary& summary) {
  nlohmann::ordered_json j;
  j["records"] = nlohmann::ordered_json::array();
  for (const auto& r : summary.records) {
    nlohmann::ordered_json rec;
    rec["scene_id"] = r.scene_id;
    if (r.ok) {
      rec["psnr_db"] = format_metric(r.psnr_db);
      rec["ssim"] = format_metric(r.ssim);
    } else {
      rec["error"] = r.error;
    }
    j["records"].push_back(std::move(rec));
  }
  j["mean_psnr_db"] = format_metric(summary.mean_psnr);
  j["mean_ssim"] = format_metric(summary.mean_ssim);
  return j.dump();
}

}  // namespace ggea
