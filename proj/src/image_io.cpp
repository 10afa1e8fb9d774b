// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#include "facever/image_io.hpp"

#include "facever/error.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <vector>

namespace facever {

RawImage read_image(const std::filesystem::path& path) {
  cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (bgr.empty() || bgr.depth() != CV_8U)
    throw Error(ErrorKind::kIo, "cannot read image '" + path.string() + "'");
  RawImage img(bgr.cols, bgr.rows);
  for (int r = 0; r < bgr.rows; ++r) {
    const auto* row = bgr.ptr<cv::Vec3b>(r);
    for (int c = 0; c < bgr.cols; ++c) {
      img.at(r, c, 0) = row[c][2];
      img.at(r, c, 1) = row[c][1];
      img.at(r, c, 2) = row[c][0];
    }
  }
  return img;
}

void write_ppm(const std::filesystem::path& path, const RawImage& img) {
  if (!img.valid()) throw Error(ErrorKind::kInvalidArgument, "cannot write an invalid image");
  cv::Mat bgr(img.height, img.width, CV_8UC3);
  for (int r = 0; r < img.height; ++r) {
    auto* row = bgr.ptr<cv::Vec3b>(r);
    for (int c = 0; c < img.width; ++c)
      row[c] = cv::Vec3b(img.at(r, c, 2), img.at(r, c, 1), img.at(r, c, 0));
  }
  const std::vector<int> params{cv::IMWRITE_PXM_BINARY, 1};
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), bgr, params);
  } catch (const cv::Exception&) {
    ok = false;
  }
  if (!ok) throw Error(ErrorKind::kIo, "cannot write image '" + path.string() + "'");
}

}  // namespace facever
