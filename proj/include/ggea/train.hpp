#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ggea/dataset.hpp"
#include "ggea/tensor.hpp"

namespace ggea {

// Cosine annealing with a linear warmup ramping from 0 to lr_init.
struct ScheduleConfig {
  double lr_init = 3e-4;
  double lr_min = 1e-6;
  double warmup_epochs = 1.0;
  int total_epochs = 40;
  int steps_per_epoch = 1000;

  long long warmup_steps() const {
    return std::llround(warmup_epochs * steps_per_epoch);
  }
  long long total_steps() const {
    return static_cast<long long>(total_epochs) * steps_per_epoch;
  }

  void validate() const {
    if (!(lr_init > lr_min && lr_min > 0.0))
      throw std::invalid_argument("ScheduleConfig: need lr_init > lr_min > 0");
    if (warmup_epochs < 0.0 || warmup_epochs >= total_epochs)
      throw std::invalid_argument("ScheduleConfig: need 0 <= warmup_epochs < total_epochs");
    if (steps_per_epoch < 1 || total_epochs < 1)
      throw std::invalid_argument("ScheduleConfig: need positive step counts");
  }
};

inline double lr_at(long long step, const ScheduleConfig& cfg) {
  cfg.validate();
  const long long warmup = cfg.warmup_steps();
  const long long total = cfg.total_steps();
  if (step < 0 || step > total)
    throw std::invalid_argument("lr_at: step " + std::to_string(step) + " out of [0, " +
                                std::to_string(total) + "]");
  if (step < warmup)
    return cfg.lr_init * static_cast<double>(step) / static_cast<double>(warmup);
  const double progress =
      static_cast<double>(step - warmup) / static_cast<double>(total - warmup);
  return cfg.lr_min + 0.5 * (cfg.lr_init - cfg.lr_min) * (1.0 + std::cos(M_PI * progress));
}

using FrameRef = std::pair<std::string, int>;  // (scene_id, frame index)

// One epoch of batches covering every frame exactly once. Scenes within a
// batch are pairwise distinct whenever enough scenes remain; with fewer
// scenes than batch_size, per-scene duplication within a batch is minimized
// by round-robin passes. Pure function of (scenes, batch_size, seed).
inline std::vector<std::vector<FrameRef>> scene_diverse_batches(
    const std::vector<SceneRecord>& scenes, int batch_size, std::uint64_t seed) {
  if (batch_size < 1) throw std::invalid_argument("scene_diverse_batches: batch_size >= 1");
  std::mt19937_64 rng(seed);

  // Per-scene queues of frame indices, each in shuffled order.
  struct Queue {
    const SceneRecord* scene;
    std::vector<int> frames;
  };
  std::vector<Queue> queues;
  for (const auto& scene : scenes) {
    Queue q{&scene, {}};
    q.frames.resize(scene.degraded_paths.size());
    std::iota(q.frames.begin(), q.frames.end(), 0);
    std::shuffle(q.frames.begin(), q.frames.end(), rng);
    queues.push_back(std::move(q));
  }

  std::vector<std::vector<FrameRef>> batches;
  std::size_t remaining = 0;
  for (const auto& q : queues) remaining += q.frames.size();
  while (remaining > 0) {
    std::vector<FrameRef> batch;
    while (static_cast<int>(batch.size()) < batch_size && remaining > 0) {
      // One pass picks at most one frame per scene, largest backlog first.
      std::vector<std::size_t> order;
      for (std::size_t i = 0; i < queues.size(); ++i)
        if (!queues[i].frames.empty()) order.push_back(i);
      if (order.empty()) break;
      std::shuffle(order.begin(), order.end(), rng);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return queues[a].frames.size() > queues[b].frames.size();
      });
      for (std::size_t i : order) {
        if (static_cast<int>(batch.size()) == batch_size) break;
        batch.emplace_back(queues[i].scene->scene_id, queues[i].frames.back());
        queues[i].frames.pop_back();
        --remaining;
      }
    }
    if (!batch.empty()) batches.push_back(std::move(batch));
  }
  return batches;
}

struct AugmentConfig {
  int crop = 128;
  double rotation_sigma_deg = 13.0;
  double flip_h_prob = 0.5;
  double flip_v_prob = 0.5;
  double mixup_prob = 0.5;
  double mixup_alpha = 1.0;
  bool mixup_per_sample = false;
  std::uint64_t seed = 0;
};

// Full training recipe. The optimizer constants (AdamW, weight decay,
// gradient accumulation) are carried for documentation and config
// round-tripping; no optimizer runs here.
struct TrainConfig {
  ScheduleConfig schedule;
  AugmentConfig augment;
  int batch_size = 18;
  int grad_accum_steps = 4;
  double weight_decay = 1e-4;
};

// Plain key=value text, one entry per line, '#' starts a comment.
inline TrainConfig parse_train_config(std::istream& in) {
  TrainConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw std::invalid_argument("train config: bad line " + std::to_string(lineno));
      continue;
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "lr_init") cfg.schedule.lr_init = std::stod(value);
    else if (key == "lr_min") cfg.schedule.lr_min = std::stod(value);
    else if (key == "warmup_epochs") cfg.schedule.warmup_epochs = std::stod(value);
    else if (key == "total_epochs") cfg.schedule.total_epochs = std::stoi(value);
    else if (key == "steps_per_epoch") cfg.schedule.steps_per_epoch = std::stoi(value);
    else if (key == "crop") cfg.augment.crop = std::stoi(value);
    else if (key == "rotation_sigma_deg") cfg.augment.rotation_sigma_deg = std::stod(value);
    else if (key == "flip_h_prob") cfg.augment.flip_h_prob = std::stod(value);
    else if (key == "flip_v_prob") cfg.augment.flip_v_prob = std::stod(value);
    else if (key == "mixup_prob") cfg.augment.mixup_prob = std::stod(value);
    else if (key == "mixup_alpha") cfg.augment.mixup_alpha = std::stod(value);
    else if (key == "mixup_per_sample") cfg.augment.mixup_per_sample = value == "true";
    else if (key == "seed") cfg.augment.seed = std::stoull(value);
    else if (key == "batch_size") cfg.batch_size = std::stoi(value);
    else if (key == "grad_accum_steps") cfg.grad_accum_steps = std::stoi(value);
    else if (key == "weight_decay") cfg.weight_decay = std::stod(value);
    else throw std::invalid_argument("train config: unknown key '" + key + "'");
  }
  return cfg;
}

inline void write_train_config(const TrainConfig& cfg, std::ostream& out) {
  out << "lr_init = " << cfg.schedule.lr_init << "\n"
      << "lr_min = " << cfg.schedule.lr_min << "\n"
      << "warmup_epochs = " << cfg.schedule.warmup_epochs << "\n"
      << "total_epochs = " << cfg.schedule.total_epochs << "\n"
      << "steps_per_epoch = " << cfg.schedule.steps_per_epoch << "\n"
      << "crop = " << cfg.augment.crop << "\n"
      << "rotation_sigma_deg = " << cfg.augment.rotation_sigma_deg << "\n"
      << "flip_h_prob = " << cfg.augment.flip_h_prob << "\n"
      << "flip_v_prob = " << cfg.augment.flip_v_prob << "\n"
      << "mixup_prob = " << cfg.augment.mixup_prob << "\n"
      << "mixup_alpha = " << cfg.augment.mixup_alpha << "\n"
      << "mixup_per_sample = " << (cfg.augment.mixup_per_sample ? "true" : "false") << "\n"
      << "seed = " << cfg.augment.seed << "\n"
      << "batch_size = " << cfg.batch_size << "\n"
      << "grad_accum_steps = " << cfg.grad_accum_steps << "\n"
      << "weight_decay = " << cfg.weight_decay << "\n";
}

namespace detail {

// Mirror index into [0, n): reflection without repeating the border pixel.
inline int reflect_index(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i = std::abs(i) % period;
  return i < n ? i : period - i;
}

}  // namespace detail

// Rotation about the image center, inverse-mapped bilinear resampling with
// reflect fill. Zero angle is an exact identity.
inline ImageTensor rotate_bilinear(const ImageTensor& img, double angle_deg) {
  if (angle_deg == 0.0) return img;
  const double rad = angle_deg * M_PI / 180.0;
  const double cs = std::cos(rad), sn = std::sin(rad);
  const double cy = (img.h - 1) / 2.0, cx = (img.w - 1) / 2.0;
  ImageTensor out(img.n, img.c, img.h, img.w);
  for (int ni = 0; ni < img.n; ++ni)
    for (int ci = 0; ci < img.c; ++ci)
      for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < img.w; ++x) {
          const double dy = y - cy, dx = x - cx;
          const double sy = cs * dy + sn * dx + cy;
          const double sx = -sn * dy + cs * dx + cx;
          const int y0 = static_cast<int>(std::floor(sy));
          const int x0 = static_cast<int>(std::floor(sx));
          const double fy = sy - y0, fx = sx - x0;
          double acc = 0.0;
          for (int m = 0; m < 2; ++m)
            for (int nn = 0; nn < 2; ++nn) {
              const double wgt = (m ? fy : 1.0 - fy) * (nn ? fx : 1.0 - fx);
              acc += wgt * img.at(ni, ci, detail::reflect_index(y0 + m, img.h),
                                  detail::reflect_index(x0 + nn, img.w));
            }
          out.at(ni, ci, y, x) = static_cast<float>(acc);
        }
  return out;
}

inline ImageTensor crop(const ImageTensor& img, int top, int left, int size) {
  if (top < 0 || left < 0 || top + size > img.h || left + size > img.w)
    throw std::invalid_argument("crop: window out of bounds");
  ImageTensor out(img.n, img.c, size, size);
  for (int ni = 0; ni < img.n; ++ni)
    for (int ci = 0; ci < img.c; ++ci)
      for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x)
          out.at(ni, ci, y, x) = img.at(ni, ci, top + y, left + x);
  return out;
}

inline ImageTensor flip_h(const ImageTensor& img) {
  ImageTensor out(img.n, img.c, img.h, img.w);
  for (int ni = 0; ni < img.n; ++ni)
    for (int ci = 0; ci < img.c; ++ci)
      for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < img.w; ++x) out.at(ni, ci, y, x) = img.at(ni, ci, y, img.w - 1 - x);
  return out;
}

inline ImageTensor flip_v(const ImageTensor& img) {
  ImageTensor out(img.n, img.c, img.h, img.w);
  for (int ni = 0; ni < img.n; ++ni)
    for (int ci = 0; ci < img.c; ++ci)
      for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < img.w; ++x) out.at(ni, ci, y, x) = img.at(ni, ci, img.h - 1 - y, x);
  return out;
}

// Applies identical rotation (Normal(0, sigma) degrees), crop window and
// flip decisions to both images. Deterministic given the rng state.
inline std::pair<ImageTensor, ImageTensor> augment_pair(const ImageTensor& lq,
                                                        const ImageTensor& gt,
                                                        const AugmentConfig& cfg,
                                                        std::mt19937_64& rng) {
  require_same_shape(lq, gt, "augment_pair");
  if (cfg.crop > std::min(lq.h, lq.w))
    throw std::invalid_argument("augment_pair: crop larger than image");

  ImageTensor a = lq, b = gt;
  if (cfg.rotation_sigma_deg > 0.0) {
    std::normal_distribution<double> angle(0.0, cfg.rotation_sigma_deg);
    const double deg = angle(rng);
    a = rotate_bilinear(a, deg);
    b = rotate_bilinear(b, deg);
  }
  std::uniform_int_distribution<int> top_dist(0, a.h - cfg.crop);
  std::uniform_int_distribution<int> left_dist(0, a.w - cfg.crop);
  const int top = top_dist(rng), left = left_dist(rng);
  a = crop(a, top, left, cfg.crop);
  b = crop(b, top, left, cfg.crop);

  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < cfg.flip_h_prob) {
    a = flip_h(a);
    b = flip_h(b);
  }
  if (coin(rng) < cfg.flip_v_prob) {
    a = flip_v(a);
    b = flip_v(b);
  }
  return {std::move(a), std::move(b)};
}

struct MixupResult {
  std::vector<ImageTensor> lq;
  std::vector<ImageTensor> gt;
  double lambda = 1.0;
};

// Blends the batch with a shuffled copy of itself, lambda ~ Beta(alpha,
// alpha), identically for lq and gt. Batches smaller than 2 pass through.
inline MixupResult mixup(const std::vector<ImageTensor>& batch_lq,
                         const std::vector<ImageTensor>& batch_gt, const AugmentConfig& cfg,
                         std::mt19937_64& rng) {
  if (batch_lq.size() != batch_gt.size())
    throw std::invalid_argument("mixup: lq/gt batch sizes differ");
  MixupResult out{batch_lq, batch_gt, 1.0};
  if (batch_lq.size() < 2) return out;

  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (!cfg.mixup_per_sample && coin(rng) >= cfg.mixup_prob) return out;

  std::gamma_distribution<double> gamma(cfg.mixup_alpha, 1.0);
  const double g1 = gamma(rng), g2 = gamma(rng);
  const double lambda = g1 / (g1 + g2);
  std::vector<std::size_t> perm(batch_lq.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);

  auto blend = [lambda](const ImageTensor& x, const ImageTensor& y) {
    ImageTensor mixed = x;
    for (std::size_t i = 0; i < mixed.size(); ++i)
      mixed.data[i] = static_cast<float>(lambda * x.data[i] + (1.0 - lambda) * y.data[i]);
    return mixed;
  };
  for (std::size_t i = 0; i < batch_lq.size(); ++i) {
    if (cfg.mixup_per_sample && coin(rng) >= cfg.mixup_prob) continue;
    out.lq[i] = blend(batch_lq[i], batch_lq[perm[i]]);
    out.gt[i] = blend(batch_gt[i], batch_gt[perm[i]]);
  }
  out.lambda = lambda;
  return out;
}

}  // namespace ggea
