#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include <opencv2/imgcodecs.hpp>

#include "ggea/tensor.hpp"

namespace ggea {

// Decodes an 8-bit PNG/JPEG into a 1x3xHxW tensor scaled to [0,1], RGB order.
inline ImageTensor load_image(const std::filesystem::path& path) {
  cv::Mat mat = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (mat.empty())
    throw std::runtime_error("load_image: failed to decode " + path.string());
  ImageTensor out(1, 3, mat.rows, mat.cols);
  for (int y = 0; y < mat.rows; ++y) {
    const cv::Vec3b* row = mat.ptr<cv::Vec3b>(y);  // BGR
    for (int x = 0; x < mat.cols; ++x) {
      out.at(0, 0, y, x) = row[x][2] / 255.0f;
      out.at(0, 1, y, x) = row[x][1] / 255.0f;
      out.at(0, 2, y, x) = row[x][0] / 255.0f;
    }
  }
  return out;
}

// Clamps to [0,1], quantizes round-half-up to 8 bits, writes PNG.
inline void save_image(const ImageTensor& img, const std::filesystem::path& path) {
  if (img.n != 1) throw std::invalid_argument("save_image: expects batch size 1");
  cv::Mat mat(img.h, img.w, img.c == 3 ? CV_8UC3 : CV_8UC1);
  auto quantize = [](float v) {
    const double clamped = std::min(std::max(static_cast<double>(v), 0.0), 1.0);
    return static_cast<std::uint8_t>(std::floor(clamped * 255.0 + 0.5));
  };
  for (int y = 0; y < img.h; ++y)
    for (int x = 0; x < img.w; ++x) {
      if (img.c == 3) {
        mat.at<cv::Vec3b>(y, x) = cv::Vec3b(quantize(img.at(0, 2, y, x)),
                                            quantize(img.at(0, 1, y, x)),
                                            quantize(img.at(0, 0, y, x)));
      } else {
        mat.at<std::uint8_t>(y, x) = quantize(img.at(0, 0, y, x));
      }
    }
  if (!cv::imwrite(path.string(), mat))
    throw std::runtime_error("save_image: failed to write " + path.string());
}

// Grayscale PFM: "Pf\n<w> <h>\n-1.0\n" then little-endian float rows,
// bottom-to-top.
inline void save_pfm(const ImageTensor& img, const std::filesystem::path& path) {
  if (img.n != 1 || img.c != 1)
    throw std::invalid_argument("save_pfm: expects a 1x1xHxW tensor");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_pfm: cannot open " + path.string());
  out << "Pf\n" << img.w << " " << img.h << "\n-1.0\n";
  for (int y = img.h - 1; y >= 0; --y)
    out.write(reinterpret_cast<const char*>(&img.data[static_cast<std::size_t>(y) * img.w]),
              static_cast<std::streamsize>(img.w) * sizeof(float));
  if (!out) throw std::runtime_error("save_pfm: write failed for " + path.string());
}

inline ImageTensor load_pfm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_pfm: cannot open " + path.string());
  std::string magic;
  int w = 0, h = 0;
  double scale = 0.0;
  in >> magic >> w >> h >> scale;
  if (magic != "Pf" || w < 1 || h < 1 || scale >= 0.0)
    throw std::runtime_error("load_pfm: unsupported header in " + path.string());
  in.get();  // single whitespace after the scale line
  ImageTensor img(1, 1, h, w);
  for (int y = h - 1; y >= 0; --y)
    in.read(reinterpret_cast<char*>(&img.data[static_cast<std::size_t>(y) * w]),
            static_cast<std::streamsize>(w) * sizeof(float));
  if (!in) throw std::runtime_error("load_pfm: truncated data in " + path.string());
  return img;
}

}  // namespace ggea
