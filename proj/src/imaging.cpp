// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#include "facever/imaging.hpp"

#include "facever/error.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

namespace facever {

namespace {

double clamp255(double v) { return std::clamp(v, 0.0, 255.0); }

bool inside_unit(PixelPoint p) {
  return p.row >= 0.0 && p.row <= 1.0 && p.col >= 0.0 && p.col <= 1.0;
}

// Bilinear sample at (row, col); returns false if the point lies outside the
// pixel-centre extent of the plane.
bool bilinear(const Matrix& plane, double row, double col, double& out) {
  constexpr double kEps = 1e-9;
  const auto h = static_cast<double>(plane.rows());
  const auto w = static_cast<double>(plane.cols());
  if (row < -kEps || col < -kEps || row > h - 1.0 + kEps || col > w - 1.0 + kEps) return false;
  row = std::clamp(row, 0.0, h - 1.0);
  col = std::clamp(col, 0.0, w - 1.0);

  auto r0 = static_cast<Eigen::Index>(std::floor(row));
  auto c0 = static_cast<Eigen::Index>(std::floor(col));
  if (r0 >= plane.rows() - 1) r0 = std::max<Eigen::Index>(plane.rows() - 2, 0);
  if (c0 >= plane.cols() - 1) c0 = std::max<Eigen::Index>(plane.cols() - 2, 0);
  const Eigen::Index r1 = std::min<Eigen::Index>(r0 + 1, plane.rows() - 1);
  const Eigen::Index c1 = std::min<Eigen::Index>(c0 + 1, plane.cols() - 1);
  const double fr = row - static_cast<double>(r0);
  const double fc = col - static_cast<double>(c0);

  // Skip zero-weight taps so exact grid positions reproduce the pixel value.
  double acc = 0.0;
  const double w00 = (1.0 - fr) * (1.0 - fc);
  const double w01 = (1.0 - fr) * fc;
  const double w10 = fr * (1.0 - fc);
  const double w11 = fr * fc;
  if (w00 != 0.0) acc += w00 * plane(r0, c0);
  if (w01 != 0.0) acc += w01 * plane(r0, c1);
  if (w10 != 0.0) acc += w10 * plane(r1, c0);
  if (w11 != 0.0) acc += w11 * plane(r1, c1);
  out = acc;
  return true;
}

}  // namespace

RawImage::RawImage(int w, int h)
    : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0) {}

void GeometryConfig::validate() const {
  if (rows < 2 || cols < 2) {
    std::ostringstream os;
    os << "geometry must be at least 2x2, got " << rows << "x" << cols;
    throw Error(ErrorKind::kBadConfig, os.str());
  }
  if (!inside_unit(left_eye_target) || !inside_unit(right_eye_target))
    throw Error(ErrorKind::kBadConfig, "eye targets must lie inside the unit square");
  if (!(left_eye_target.col < right_eye_target.col))
    throw Error(ErrorKind::kBadConfig, "left eye target column must be left of the right eye target");
}

PixelPoint GeometryConfig::left_target_px() const {
  return {left_eye_target.row * (rows - 1), left_eye_target.col * (cols - 1)};
}

PixelPoint GeometryConfig::right_target_px() const {
  return {right_eye_target.row * (rows - 1), right_eye_target.col * (cols - 1)};
}

Ycc rgb_to_ycbcr(double r, double g, double b) {
  const double y = 0.299 * r + 0.587 * g + 0.114 * b;
  const double cb = 128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b;
  const double cr = 128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b;
  return {clamp255(y), clamp255(cr), clamp255(cb)};
}

void ycbcr_to_rgb(double y, double cr, double cb, double& r, double& g, double& b) {
  const double dr = cr - 128.0;
  const double db = cb - 128.0;
  r = y + 1.402 * dr;
  g = y - 0.344136 * db - 0.714136 * dr;
  b = y + 1.772 * db;
}

AlignResult align_and_crop(const RawImage& img, PixelPoint left_eye, PixelPoint right_eye,
                           const GeometryConfig& geo) {
  geo.validate();
  if (!img.valid()) throw Error(ErrorKind::kInvalidArgument, "image buffer does not match its dimensions");
  auto inside = [&](PixelPoint p) {
    return p.row >= 0.0 && p.col >= 0.0 && p.row <= img.height - 1.0 && p.col <= img.width - 1.0;
  };
  if (!inside(left_eye) || !inside(right_eye))
    throw Error(ErrorKind::kInvalidArgument, "eye annotation lies outside the image");

  using C = std::complex<double>;
  const C s1(left_eye.col, left_eye.row);
  const C s2(right_eye.col, right_eye.row);
  if (std::abs(s2 - s1) < 1e-9)
    throw Error(ErrorKind::kAlignmentDegenerate, "eye annotations coincide; alignment is undefined");
  const PixelPoint lt = geo.left_target_px();
  const PixelPoint rt = geo.right_target_px();
  const C t1(lt.col, lt.row);
  const C t2(rt.col, rt.row);
  // Forward map source -> crop is p -> a*p + b; we need its inverse.
  const C a = (t2 - t1) / (s2 - s1);

  Matrix y(img.height, img.width), cr(img.height, img.width), cb(img.height, img.width);
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      const Ycc v = rgb_to_ycbcr(img.at(r, c, 0), img.at(r, c, 1), img.at(r, c, 2));
      y(r, c) = v.y;
      cr(r, c) = v.cr;
      cb(r, c) = v.cb;
    }
  }
  const double y_mean = y.mean();
  const double cr_mean = cr.mean();
  const double cb_mean = cb.mean();

  AlignResult out;
  out.sample.grey.resize(geo.rows, geo.cols);
  out.sample.cr.resize(geo.rows, geo.cols);
  out.sample.cb.resize(geo.rows, geo.cols);
  for (int r = 0; r < geo.rows; ++r) {
    for (int c = 0; c < geo.cols; ++c) {
      const C src = s1 + (C(c, r) - t1) / a;
      double vy, vcr, vcb;
      if (bilinear(y, src.imag(), src.real(), vy)) {
        bilinear(cr, src.imag(), src.real(), vcr);
        bilinear(cb, src.imag(), src.real(), vcb);
      } else {
        vy = y_mean;
        vcr = cr_mean;
        vcb = cb_mean;
        ++out.out_of_bounds;
      }
      out.sample.grey(r, c) = std::clamp(vy / 255.0, 0.0, 1.0);
      out.sample.cr(r, c) = clamp255(vcr);
      out.sample.cb(r, c) = clamp255(vcb);
    }
  }
  return out;
}

void SkinBounds::validate() const {
  if (cr_lo > cr_hi || cb_lo > cb_hi)
    throw Error(ErrorKind::kBadConfig, "skin bounds are empty (lo > hi)");
}

BoolMatrix skin_mask(const Matrix& cr, const Matrix& cb, const SkinBounds& bounds) {
  if (cr.rows() != cb.rows() || cr.cols() != cb.cols())
    throw Error(ErrorKind::kShapeMismatch, "chroma planes differ in shape");
  return (cr.array() >= bounds.cr_lo && cr.array() <= bounds.cr_hi &&
          cb.array() >= bounds.cb_lo && cb.array() <= bounds.cb_hi);
}

}  // namespace facever
