#pragma once

#include <cmath>

#include "ggea/tensor.hpp"

namespace ggea {

// N x 1 x H x W spatial supervision weights, constant on aligned 2x2 blocks.
using WeightMap = ImageTensor;
// N x 1 x H x W nonnegative Sobel magnitudes.
using GradientMagnitude = ImageTensor;

// Luma conversion, R/G/B channel order. Coefficients applied in double.
inline ImageTensor to_grayscale(const ImageTensor& img) {
  if (img.c != 3) throw std::invalid_argument("to_grayscale: expects 3 channels");
  ImageTensor out(img.n, 1, img.h, img.w);
  for (int ni = 0; ni < img.n; ++ni)
    for (int y = 0; y < img.h; ++y)
      for (int x = 0; x < img.w; ++x)
        out.at(ni, 0, y, x) = static_cast<float>(0.2989 * img.at(ni, 0, y, x) +
                                                 0.5870 * img.at(ni, 1, y, x) +
                                                 0.1140 * img.at(ni, 2, y, x));
  return out;
}

inline GradientMagnitude sobel_magnitude(const ImageTensor& gray) {
  if (gray.c != 1) throw std::invalid_argument("sobel_magnitude: expects 1 channel");
  const ImageTensor gx = conv2d_replicate(gray, sobel_x());
  const ImageTensor gy = conv2d_replicate(gray, sobel_y());
  GradientMagnitude out(gray.n, 1, gray.h, gray.w);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double a = gx.data[i], b = gy.data[i];
    out.data[i] = static_cast<float>(std::sqrt(a * a + b * b));
  }
  return out;
}

// Sums non-overlapping 2x2 blocks, applies tanh, replicates back to full
// resolution. Odd H or W: magnitudes replicate-padded by one row/column on
// bottom/right before blocking, result cropped back.
inline WeightMap block_aggregate_tanh(const GradientMagnitude& mag, bool invert = false) {
  WeightMap out(mag.n, 1, mag.h, mag.w);
  const int bh = (mag.h + 1) / 2, bw = (mag.w + 1) / 2;
  for (int ni = 0; ni < mag.n; ++ni)
    for (int by = 0; by < bh; ++by)
      for (int bx = 0; bx < bw; ++bx) {
        double sum = 0.0;
        for (int m = 0; m < 2; ++m)
          for (int nn = 0; nn < 2; ++nn) {
            const int y = std::min(2 * by + m, mag.h - 1);
            const int x = std::min(2 * bx + nn, mag.w - 1);
            sum += mag.at(ni, 0, y, x);
          }
        const double t = std::tanh(sum);
        // keep the bounds open after the float cast: [0,1) resp. (0,1]
        float v = static_cast<float>(invert ? 1.0 - t : t);
        if (!invert && v >= 1.0f) v = std::nextafter(1.0f, 0.0f);
        if (invert && v <= 0.0f) v = std::nextafter(0.0f, 1.0f);
        for (int m = 0; m < 2; ++m)
          for (int nn = 0; nn < 2; ++nn) {
            const int y = 2 * by + m, x = 2 * bx + nn;
            if (y < mag.h && x < mag.w) out.at(ni, 0, y, x) = v;
          }
      }
  return out;
}

// Edge-emphasizing weight map from the ground truth: grayscale -> Sobel
// magnitude -> 2x2 block sum -> tanh. Values in [0,1). Pure function of the
// pixels, carries no gradient.
inline WeightMap ggea_weight_map(const ImageTensor& gt) {
  return block_aggregate_tanh(sobel_magnitude(to_grayscale(gt)));
}

// Inverted variant computed from the prediction: W = 1 - tanh(B), de-
// emphasizing edges. Values in (0,1].
inline WeightMap diffbir_weight_map(const ImageTensor& pred) {
  return block_aggregate_tanh(sobel_magnitude(to_grayscale(pred)), /*invert=*/true);
}

}  // namespace ggea
