#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ggea/losses.hpp"
#include "ggea/tensor.hpp"

namespace ggea {

// 10*log10(peak^2 / MSE), MSE accumulated in double over all elements.
// Identical inputs yield +infinity, never clipped.
inline double psnr(const ImageTensor& pred, const ImageTensor& gt, double peak = 1.0) {
  require_same_shape(pred, gt, "psnr");
  if (peak <= 0.0) throw std::invalid_argument("psnr: peak must be positive");
  double mse = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = static_cast<double>(pred.data[i]) - gt.data[i];
    mse += d * d;
  }
  mse /= static_cast<double>(pred.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

// Mean single-scale SSIM, Gaussian window (sigma 1.5), computed per channel
// and averaged. luminance_only converts to grayscale first.
inline double ssim(const ImageTensor& pred, const ImageTensor& gt, int kernel = 11,
                   double peak = 1.0, bool luminance_only = false) {
  require_same_shape(pred, gt, "ssim");
  if (kernel % 2 == 0 || kernel < 1) throw std::invalid_argument("ssim: kernel must be odd");
  if (std::min(pred.h, pred.w) < kernel)
    throw std::invalid_argument("ssim: image smaller than window (" + std::to_string(kernel) +
                                ")");
  if (luminance_only && pred.c == 3)
    return detail::ssim_stats(to_grayscale(pred), to_grayscale(gt), kernel, 1.5, peak)
        .luminance_cs_mean;
  return detail::ssim_stats(pred, gt, kernel, 1.5, peak).luminance_cs_mean;
}

}  // namespace ggea
