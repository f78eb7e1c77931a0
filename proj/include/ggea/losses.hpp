#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ggea/edge_weight.hpp"
#include "ggea/tensor.hpp"

namespace ggea {

struct LossConfig {
  double lambda_ssim = 1.0;
  int ms_ssim_kernel = 7;
  int ms_ssim_levels = 5;
  std::vector<double> ms_ssim_scale_weights = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
  double ms_ssim_sigma = 1.5;
  // Weighted-loss denominator is N*H*W; set true to divide by channels too.
  bool divide_by_channels = false;
};

struct LossReport {
  double l1 = 0.0;
  double ms_ssim_loss = 0.0;
  double ggea = 0.0;
  double total = 0.0;
};

inline double l1_loss(const ImageTensor& pred, const ImageTensor& gt) {
  require_same_shape(pred, gt, "l1_loss");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    acc += std::abs(static_cast<double>(pred.data[i]) - gt.data[i]);
  return acc / static_cast<double>(pred.size());
}

// Weighted L1 with a per-pixel weight shared across channels. The channel
// dimension is summed but excluded from the denominator unless
// divide_by_channels is set.
inline double ggea_loss(const ImageTensor& pred, const ImageTensor& gt,
                        const WeightMap& weights, bool divide_by_channels = false) {
  require_same_shape(pred, gt, "ggea_loss");
  if (weights.n != pred.n || weights.c != 1 || weights.h != pred.h || weights.w != pred.w)
    throw std::invalid_argument("ggea_loss: weight map shape mismatch");
  double acc = 0.0;
  for (int ni = 0; ni < pred.n; ++ni)
    for (int ci = 0; ci < pred.c; ++ci)
      for (int y = 0; y < pred.h; ++y)
        for (int x = 0; x < pred.w; ++x)
          acc += static_cast<double>(weights.at(ni, 0, y, x)) *
                 std::abs(static_cast<double>(pred.at(ni, ci, y, x)) - gt.at(ni, ci, y, x));
  double denom = static_cast<double>(pred.n) * pred.h * pred.w;
  if (divide_by_channels) denom *= pred.c;
  return acc / denom;
}

// Analytic gradient of ggea_loss w.r.t. pred. sign(0) := 0.
inline ImageTensor ggea_grad(const ImageTensor& pred, const ImageTensor& gt,
                             const WeightMap& weights, bool divide_by_channels = false) {
  require_same_shape(pred, gt, "ggea_grad");
  if (weights.n != pred.n || weights.c != 1 || weights.h != pred.h || weights.w != pred.w)
    throw std::invalid_argument("ggea_grad: weight map shape mismatch");
  double denom = static_cast<double>(pred.n) * pred.h * pred.w;
  if (divide_by_channels) denom *= pred.c;
  ImageTensor grad(pred.n, pred.c, pred.h, pred.w);
  for (int ni = 0; ni < pred.n; ++ni)
    for (int ci = 0; ci < pred.c; ++ci)
      for (int y = 0; y < pred.h; ++y)
        for (int x = 0; x < pred.w; ++x) {
          const double d = static_cast<double>(pred.at(ni, ci, y, x)) - gt.at(ni, ci, y, x);
          const double s = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
          grad.at(ni, ci, y, x) = static_cast<float>(weights.at(ni, 0, y, x) * s / denom);
        }
  return grad;
}

// Inverted-weight squared-error variant: weight map comes from the
// prediction (detached), error is squared.
inline double diffbir_weighted_loss(const ImageTensor& pred, const ImageTensor& gt,
                                    bool divide_by_channels = false) {
  require_same_shape(pred, gt, "diffbir_weighted_loss");
  const WeightMap weights = diffbir_weight_map(pred);
  double acc = 0.0;
  for (int ni = 0; ni < pred.n; ++ni)
    for (int ci = 0; ci < pred.c; ++ci)
      for (int y = 0; y < pred.h; ++y)
        for (int x = 0; x < pred.w; ++x) {
          const double d = static_cast<double>(pred.at(ni, ci, y, x)) - gt.at(ni, ci, y, x);
          acc += static_cast<double>(weights.at(ni, 0, y, x)) * d * d;
        }
  double denom = static_cast<double>(pred.n) * pred.h * pred.w;
  if (divide_by_channels) denom *= pred.c;
  return acc / denom;
}

namespace detail {

inline std::vector<double> gaussian_window(int k, double sigma) {
  std::vector<double> win(k);
  const int r = k / 2;
  double sum = 0.0;
  for (int i = 0; i < k; ++i) {
    const double d = i - r;
    win[i] = std::exp(-d * d / (2.0 * sigma * sigma));
    sum += win[i];
  }
  for (double& v : win) v /= sum;
  return win;
}

// Separable valid-region Gaussian filter on one channel plane.
inline std::vector<double> gauss_filter_valid(const std::vector<double>& plane, int h, int w,
                                              const std::vector<double>& win) {
  const int k = static_cast<int>(win.size());
  const int oh = h - k + 1, ow = w - k + 1;
  std::vector<double> tmp(static_cast<std::size_t>(h) * ow);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < k; ++i) acc += win[i] * plane[static_cast<std::size_t>(y) * w + x + i];
      tmp[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  std::vector<double> out(static_cast<std::size_t>(oh) * ow);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < k; ++i) acc += win[i] * tmp[static_cast<std::size_t>(y + i) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  return out;
}

struct SsimStats {
  double luminance_cs_mean = 0.0;  // mean of l*cs (full SSIM map)
  double cs_mean = 0.0;            // mean of the contrast-structure term
};

// Mean SSIM statistics over all valid windows and channels.
inline SsimStats ssim_stats(const ImageTensor& a, const ImageTensor& b, int kernel,
                            double sigma, double peak = 1.0) {
  const double c1 = (0.01 * peak) * (0.01 * peak);
  const double c2 = (0.03 * peak) * (0.03 * peak);
  const auto win = gaussian_window(kernel, sigma);
  const int oh = a.h - kernel + 1, ow = a.w - kernel + 1;
  const std::size_t plane_sz = static_cast<std::size_t>(a.h) * a.w;

  double ssim_acc = 0.0, cs_acc = 0.0;
  std::size_t count = 0;
  std::vector<double> px(plane_sz), py(plane_sz), pxx(plane_sz), pyy(plane_sz), pxy(plane_sz);
  for (int ni = 0; ni < a.n; ++ni)
    for (int ci = 0; ci < a.c; ++ci) {
      for (int y = 0; y < a.h; ++y)
        for (int x = 0; x < a.w; ++x) {
          const double va = a.at(ni, ci, y, x), vb = b.at(ni, ci, y, x);
          const std::size_t i = static_cast<std::size_t>(y) * a.w + x;
          px[i] = va;
          py[i] = vb;
          pxx[i] = va * va;
          pyy[i] = vb * vb;
          pxy[i] = va * vb;
        }
      const auto mx = gauss_filter_valid(px, a.h, a.w, win);
      const auto my = gauss_filter_valid(py, a.h, a.w, win);
      const auto mxx = gauss_filter_valid(pxx, a.h, a.w, win);
      const auto myy = gauss_filter_valid(pyy, a.h, a.w, win);
      const auto mxy = gauss_filter_valid(pxy, a.h, a.w, win);
      for (std::size_t i = 0; i < static_cast<std::size_t>(oh) * ow; ++i) {
        const double mu_x = mx[i], mu_y = my[i];
        const double sx = mxx[i] - mu_x * mu_x;
        const double sy = myy[i] - mu_y * mu_y;
        const double sxy = mxy[i] - mu_x * mu_y;
        const double cs = (2.0 * sxy + c2) / (sx + sy + c2);
        const double lum = (2.0 * mu_x * mu_y + c1) / (mu_x * mu_x + mu_y * mu_y + c1);
        cs_acc += cs;
        ssim_acc += lum * cs;
        ++count;
      }
    }
  return {ssim_acc / static_cast<double>(count), cs_acc / static_cast<double>(count)};
}

// Factor-2 average pooling; odd dims replicate-padded by one row/column.
inline ImageTensor downsample2(const ImageTensor& img) {
  const int oh = (img.h + 1) / 2, ow = (img.w + 1) / 2;
  ImageTensor out(img.n, img.c, oh, ow);
  for (int ni = 0; ni < img.n; ++ni)
    for (int ci = 0; ci < img.c; ++ci)
      for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
          double acc = 0.0;
          for (int m = 0; m < 2; ++m)
            for (int nn = 0; nn < 2; ++nn)
              acc += img.at(ni, ci, std::min(2 * y + m, img.h - 1),
                            std::min(2 * x + nn, img.w - 1));
          out.at(ni, ci, y, x) = static_cast<float>(acc / 4.0);
        }
  return out;
}

}  // namespace detail

inline int ms_ssim_min_size(const LossConfig& cfg) {
  return (cfg.ms_ssim_kernel - 1) * (1 << (cfg.ms_ssim_levels - 1)) + 1;
}

// Multi-scale structural similarity in [0,1]; contrast-structure at every
// level, luminance folded in at the coarsest, combined by scale-weight
// exponents. Scales produced by factor-2 average pooling.
inline double ms_ssim(const ImageTensor& pred, const ImageTensor& gt, const LossConfig& cfg = {}) {
  require_same_shape(pred, gt, "ms_ssim");
  if (cfg.ms_ssim_kernel % 2 == 0)
    throw std::invalid_argument("ms_ssim: kernel size must be odd");
  if (static_cast<int>(cfg.ms_ssim_scale_weights.size()) != cfg.ms_ssim_levels)
    throw std::invalid_argument("ms_ssim: scale weights must match level count");
  const int min_size = ms_ssim_min_size(cfg);
  if (std::min(pred.h, pred.w) < min_size)
    throw std::invalid_argument(
        "ms_ssim: image too small; min(H, W) must satisfy img_size >= (kernel_size - 1) * 16 + 1"
        " = " + std::to_string(min_size) + " for kernel " + std::to_string(cfg.ms_ssim_kernel));

  ImageTensor a = pred, b = gt;
  double result = 1.0;
  for (int level = 0; level < cfg.ms_ssim_levels; ++level) {
    const auto stats = detail::ssim_stats(a, b, cfg.ms_ssim_kernel, cfg.ms_ssim_sigma);
    const bool last = level == cfg.ms_ssim_levels - 1;
    const double term = std::max(last ? stats.luminance_cs_mean : stats.cs_mean, 0.0);
    result *= std::pow(term, cfg.ms_ssim_scale_weights[level]);
    if (!last) {
      a = detail::downsample2(a);
      b = detail::downsample2(b);
    }
  }
  return result;
}

inline double ms_ssim_loss(const ImageTensor& pred, const ImageTensor& gt,
                           const LossConfig& cfg = {}) {
  return 1.0 - ms_ssim(pred, gt, cfg);
}

// Combined objective: L1 + lambda_ssim * (1 - MS-SSIM) + weighted edge loss,
// with the edge weight map computed from the ground truth.
inline LossReport total_loss(const ImageTensor& pred, const ImageTensor& gt,
                             const LossConfig& cfg = {}, bool with_ms_ssim = true) {
  LossReport report;
  report.l1 = l1_loss(pred, gt);
  report.ms_ssim_loss = with_ms_ssim ? ms_ssim_loss(pred, gt, cfg) : 0.0;
  report.ggea = ggea_loss(pred, gt, ggea_weight_map(gt), cfg.divide_by_channels);
  report.total = report.l1 + cfg.lambda_ssim * report.ms_ssim_loss + report.ggea;
  return report;
}

}  // namespace ggea
