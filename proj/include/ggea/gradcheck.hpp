#pragma once

#include <cstdint>
#include <random>
#include <string>

#include <json.hpp>

#include "ggea/losses.hpp"

namespace ggea {

struct GradCheckReport {
  int size = 0;
  std::uint64_t seed = 0;
  double eps = 0.0;
  double max_abs_error = 0.0;
  long long checked = 0;
  long long skipped = 0;  // pixels within 2*eps of the |.| kink
};

// Compares the analytic weighted-L1 gradient against central finite
// differences of the loss on a random 1x3xSxS instance. Pixels whose
// residual sits within 2*eps of the absolute-value kink are excluded.
inline GradCheckReport run_gradcheck(int size, std::uint64_t seed, double eps) {
  if (size < 2) throw std::invalid_argument("run_gradcheck: size must be >= 2");
  if (eps <= 0.0) throw std::invalid_argument("run_gradcheck: eps must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> uni(0.0f, 1.0f);
  ImageTensor pred(1, 3, size, size), gt(1, 3, size, size);
  for (auto& v : pred.data) v = uni(rng);
  for (auto& v : gt.data) v = uni(rng);

  const WeightMap weights = ggea_weight_map(gt);
  const ImageTensor analytic = ggea_grad(pred, gt, weights);

  GradCheckReport report{size, seed, eps, 0.0, 0, 0};
  ImageTensor probe = pred;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (std::abs(static_cast<double>(pred.data[i]) - gt.data[i]) < 2.0 * eps) {
      ++report.skipped;
      continue;
    }
    const float orig = probe.data[i];
    probe.data[i] = static_cast<float>(orig + eps);
    const double up = ggea_loss(probe, gt, weights);
    probe.data[i] = static_cast<float>(orig - eps);
    const double down = ggea_loss(probe, gt, weights);
    probe.data[i] = orig;
    const double fd = (up - down) / (2.0 * eps);
    report.max_abs_error = std::max(report.max_abs_error, std::abs(fd - analytic.data[i]));
    ++report.checked;
  }
  return report;
}

inline std::string gradcheck_json(const GradCheckReport& r, double threshold) {
  nlohmann::ordered_json j;
  j["size"] = r.size;
  j["seed"] = r.seed;
  j["eps"] = r.eps;
  j["max_abs_error"] = r.max_abs_error;
  j["checked"] = r.checked;
  j["skipped"] = r.skipped;
  j["pass"] = r.max_abs_error < threshold;
  return j.dump();
}

}  // namespace ggea
