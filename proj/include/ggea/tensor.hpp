#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ggea {

// Batched NCHW image data, row-major, 32-bit floats.
struct ImageTensor {
  int n = 0, c = 0, h = 0, w = 0;
  std::vector<float> data;

  ImageTensor() = default;
  ImageTensor(int n_, int c_, int h_, int w_, float fill = 0.0f)
      : n(n_), c(c_), h(h_), w(w_),
        data(static_cast<std::size_t>(n_) * c_ * h_ * w_, fill) {
    if (n < 1 || h < 1 || w < 1 || (c != 1 && c != 3))
      throw std::invalid_argument("ImageTensor: bad shape n=" + std::to_string(n_) +
                                  " c=" + std::to_string(c_) + " h=" + std::to_string(h_) +
                                  " w=" + std::to_string(w_));
  }

  std::size_t size() const { return data.size(); }

  float& at(int ni, int ci, int y, int x) {
    return data[((static_cast<std::size_t>(ni) * c + ci) * h + y) * w + x];
  }
  float at(int ni, int ci, int y, int x) const {
    return data[((static_cast<std::size_t>(ni) * c + ci) * h + y) * w + x];
  }

  bool same_shape(const ImageTensor& o) const {
    return n == o.n && c == o.c && h == o.h && w == o.w;
  }

  bool is_finite() const {
    for (float v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

inline void require_same_shape(const ImageTensor& a, const ImageTensor& b,
                               const char* who) {
  if (!a.same_shape(b))
    throw std::invalid_argument(std::string(who) + ": shape mismatch");
}

// Square odd-sided convolution kernel.
struct Kernel2D {
  int k = 0;
  std::vector<float> data;

  Kernel2D() = default;
  Kernel2D(int k_, std::vector<float> d) : k(k_), data(std::move(d)) {
    if (k < 1 || k % 2 == 0)
      throw std::invalid_argument("Kernel2D: side must be odd and positive");
    if (data.size() != static_cast<std::size_t>(k) * k)
      throw std::invalid_argument("Kernel2D: data size != k*k");
  }

  float at(int i, int j) const { return data[static_cast<std::size_t>(i) * k + j]; }
};

inline Kernel2D sobel_x() {
  return Kernel2D(3, {1, 0, -1, 2, 0, -2, 1, 0, -1});
}

inline Kernel2D sobel_y() {
  return Kernel2D(3, {1, 2, 1, 0, 0, 0, -1, -2, -1});
}

// True convolution (kernel flipped, not cross-correlation) with replicate
// border handling. Single-channel input, output has identical shape.
// Accumulates in double, stores float.
inline ImageTensor conv2d_replicate(const ImageTensor& img, const Kernel2D& kernel) {
  if (img.c != 1)
    throw std::invalid_argument("conv2d_replicate: expects single-channel input");
  const int r = kernel.k / 2;
  ImageTensor out(img.n, 1, img.h, img.w);
  for (int ni = 0; ni < img.n; ++ni) {
    for (int y = 0; y < img.h; ++y) {
      for (int x = 0; x < img.w; ++x) {
        double acc = 0.0;
        for (int dy = -r; dy <= r; ++dy) {
          int sy = y - dy;
          sy = sy < 0 ? 0 : (sy >= img.h ? img.h - 1 : sy);
          for (int dx = -r; dx <= r; ++dx) {
            int sx = x - dx;
            sx = sx < 0 ? 0 : (sx >= img.w ? img.w - 1 : sx);
            acc += static_cast<double>(kernel.at(r + dy, r + dx)) * img.at(ni, 0, sy, sx);
          }
        }
        out.at(ni, 0, y, x) = static_cast<float>(acc);
      }
    }
  }
  return out;
}

// Bottom/right padding amounts recorded by pad_to_multiple so unpad is exact.
struct PadSpec {
  int bottom = 0;
  int right = 0;
};

// Reflect-pads (mirror, edge not repeated) on bottom/right until h and w are
// multiples of m. Reflection of width p requires p <= dim-1.
inline std::pair<ImageTensor, PadSpec> pad_to_multiple(const ImageTensor& img, int m) {
  if (m < 1) throw std::invalid_argument("pad_to_multiple: m must be positive");
  const int th = (img.h + m - 1) / m * m;
  const int tw = (img.w + m - 1) / m * m;
  const PadSpec spec{th - img.h, tw - img.w};
  if (spec.bottom > img.h - 1 || spec.right > img.w - 1)
    throw std::invalid_argument("pad_to_multiple: reflect pad of " +
                                std::to_string(std::max(spec.bottom, spec.right)) +
                                " undefined for dims " + std::to_string(img.h) + "x" +
                                std::to_string(img.w));
  if (spec.bottom == 0 && spec.right == 0) return {img, spec};

  ImageTensor out(img.n, img.c, th, tw);
  for (int ni = 0; ni < img.n; ++ni)
    for (int ci = 0; ci < img.c; ++ci)
      for (int y = 0; y < th; ++y) {
        const int sy = y < img.h ? y : 2 * (img.h - 1) - y;
        for (int x = 0; x < tw; ++x) {
          const int sx = x < img.w ? x : 2 * (img.w - 1) - x;
          out.at(ni, ci, y, x) = img.at(ni, ci, sy, sx);
        }
      }
  return {out, spec};
}

inline ImageTensor unpad(const ImageTensor& img, const PadSpec& spec) {
  if (spec.bottom < 0 || spec.right < 0 || spec.bottom >= img.h || spec.right >= img.w)
    throw std::invalid_argument("unpad: spec exceeds image dims");
  if (spec.bottom == 0 && spec.right == 0) return img;
  ImageTensor out(img.n, img.c, img.h - spec.bottom, img.w - spec.right);
  for (int ni = 0; ni < img.n; ++ni)
    for (int ci = 0; ci < img.c; ++ci)
      for (int y = 0; y < out.h; ++y)
        for (int x = 0; x < out.w; ++x)
          out.at(ni, ci, y, x) = img.at(ni, ci, y, x);
  return out;
}

}  // namespace ggea
