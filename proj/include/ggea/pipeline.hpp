#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "ggea/tensor.hpp"

namespace ggea {

struct RestorerOutput {
  ImageTensor residual;
  // Present only for "plus"-style models; 1 or 3 channels, broadcast over
  // image channels when single.
  std::optional<ImageTensor> scale_map;
};

// Pluggable forward pass. Implementations must be safe for concurrent calls.
class Restorer {
 public:
  virtual ~Restorer() = default;
  virtual RestorerOutput forward(const ImageTensor& input) const = 0;
};

struct EnsembleConfig {
  double w_a = 0.4;
  double w_b = 0.6;

  void validate() const {
    if (w_a < 0.0 || w_b < 0.0 || std::abs(w_a + w_b - 1.0) > 1e-9)
      throw std::invalid_argument("EnsembleConfig: weights must be nonnegative and sum to 1");
  }
};

inline ImageTensor combine_base(const ImageTensor& input, const ImageTensor& residual) {
  require_same_shape(input, residual, "combine_base");
  ImageTensor out = input;
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] += residual.data[i];
  return out;
}

// out = scale_map * input + residual; a single-channel scale map broadcasts
// over image channels. No clamping.
inline ImageTensor combine_plus(const ImageTensor& input, const ImageTensor& residual,
                                const ImageTensor& scale_map) {
  require_same_shape(input, residual, "combine_plus");
  if (scale_map.n != input.n || scale_map.h != input.h || scale_map.w != input.w ||
      (scale_map.c != 1 && scale_map.c != input.c))
    throw std::invalid_argument("combine_plus: scale map not broadcastable");
  ImageTensor out(input.n, input.c, input.h, input.w);
  for (int ni = 0; ni < input.n; ++ni)
    for (int ci = 0; ci < input.c; ++ci) {
      const int sc = scale_map.c == 1 ? 0 : ci;
      for (int y = 0; y < input.h; ++y)
        for (int x = 0; x < input.w; ++x)
          out.at(ni, ci, y, x) = scale_map.at(ni, sc, y, x) * input.at(ni, ci, y, x) +
                                 residual.at(ni, ci, y, x);
    }
  return out;
}

// Pad to a multiple, run the model, combine (plus when a scale map is
// produced, base otherwise), unpad. Output shape equals input shape.
inline ImageTensor restore_one(const Restorer& model, const ImageTensor& img, int pad_multiple) {
  auto [padded, spec] = pad_to_multiple(img, pad_multiple);
  const RestorerOutput result = model.forward(padded);
  const ImageTensor combined = result.scale_map
                                   ? combine_plus(padded, result.residual, *result.scale_map)
                                   : combine_base(padded, result.residual);
  return unpad(combined, spec);
}

inline ImageTensor ensemble(const ImageTensor& out_a, const ImageTensor& out_b,
                            const EnsembleConfig& cfg = {}) {
  require_same_shape(out_a, out_b, "ensemble");
  cfg.validate();
  ImageTensor out(out_a.n, out_a.c, out_a.h, out_a.w);
  for (std::size_t i = 0; i < out.size(); ++i)
    out.data[i] = static_cast<float>(cfg.w_a * out_a.data[i] + cfg.w_b * out_b.data[i]);
  return out;
}

// Pixel-wise mean, double accumulation.
inline ImageTensor average_frames(const std::vector<ImageTensor>& frames) {
  if (frames.empty()) throw std::invalid_argument("average_frames: empty frame list");
  for (const auto& f : frames) require_same_shape(frames.front(), f, "average_frames");
  const auto& first = frames.front();
  ImageTensor out(first.n, first.c, first.h, first.w);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double acc = 0.0;
    for (const auto& f : frames) acc += f.data[i];
    out.data[i] = static_cast<float>(acc / static_cast<double>(frames.size()));
  }
  return out;
}

using WeightedModel = std::pair<std::shared_ptr<const Restorer>, double>;

enum class FusionOrder { ensemble_then_average, average_then_ensemble };

// Restores every frame with every model and fuses: per-frame weighted
// ensemble then frame averaging, or the transposed order. The two commute
// for linear fusion.
inline ImageTensor run_scene(const std::vector<WeightedModel>& models,
                             const std::vector<ImageTensor>& frames, int pad_multiple,
                             FusionOrder order = FusionOrder::ensemble_then_average) {
  if (models.empty()) throw std::invalid_argument("run_scene: no models");
  double weight_sum = 0.0;
  for (const auto& [model, weight] : models) weight_sum += weight;
  if (std::abs(weight_sum - 1.0) > 1e-9)
    throw std::invalid_argument("run_scene: model weights must sum to 1");

  auto weighted_sum = [](const std::vector<ImageTensor>& imgs,
                         const std::vector<double>& weights) {
    ImageTensor out(imgs.front().n, imgs.front().c, imgs.front().h, imgs.front().w);
    for (std::size_t i = 0; i < out.size(); ++i) {
      double acc = 0.0;
      for (std::size_t m = 0; m < imgs.size(); ++m) acc += weights[m] * imgs[m].data[i];
      out.data[i] = static_cast<float>(acc);
    }
    return out;
  };
  std::vector<double> weights;
  for (const auto& [model, weight] : models) weights.push_back(weight);

  if (order == FusionOrder::ensemble_then_average) {
    std::vector<ImageTensor> fused;
    for (const auto& frame : frames) {
      std::vector<ImageTensor> per_model;
      for (const auto& [model, weight] : models)
        per_model.push_back(restore_one(*model, frame, pad_multiple));
      fused.push_back(weighted_sum(per_model, weights));
    }
    return average_frames(fused);
  }
  std::vector<ImageTensor> per_model;
  for (const auto& [model, weight] : models) {
    std::vector<ImageTensor> restored;
    for (const auto& frame : frames) restored.push_back(restore_one(*model, frame, pad_multiple));
    per_model.push_back(average_frames(restored));
  }
  return weighted_sum(per_model, weights);
}

// --- deterministic reference restorers for tests and dry runs ---

class IdentityRestorer final : public Restorer {
 public:
  RestorerOutput forward(const ImageTensor& input) const override {
    return {ImageTensor(input.n, input.c, input.h, input.w, 0.0f), std::nullopt};
  }
};

class ConstantShiftRestorer final : public Restorer {
 public:
  explicit ConstantShiftRestorer(float delta) : delta_(delta) {}
  RestorerOutput forward(const ImageTensor& input) const override {
    return {ImageTensor(input.n, input.c, input.h, input.w, delta_), std::nullopt};
  }

 private:
  float delta_;
};

// residual = box_blur(input) - input, so the combined output is the blur.
class BlurRestorer final : public Restorer {
 public:
  explicit BlurRestorer(int k) : kernel_(k, std::vector<float>(static_cast<std::size_t>(k) * k,
                                                               1.0f / static_cast<float>(k * k))) {}
  RestorerOutput forward(const ImageTensor& input) const override {
    ImageTensor residual(input.n, input.c, input.h, input.w);
    for (int ci = 0; ci < input.c; ++ci) {
      ImageTensor channel(input.n, 1, input.h, input.w);
      for (int ni = 0; ni < input.n; ++ni)
        for (int y = 0; y < input.h; ++y)
          for (int x = 0; x < input.w; ++x) channel.at(ni, 0, y, x) = input.at(ni, ci, y, x);
      const ImageTensor blurred = conv2d_replicate(channel, kernel_);
      for (int ni = 0; ni < input.n; ++ni)
        for (int y = 0; y < input.h; ++y)
          for (int x = 0; x < input.w; ++x)
            residual.at(ni, ci, y, x) = blurred.at(ni, 0, y, x) - input.at(ni, ci, y, x);
    }
    return {std::move(residual), std::nullopt};
  }

 private:
  Kernel2D kernel_;
};

}  // namespace ggea
