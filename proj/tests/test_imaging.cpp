// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#include "facever/error.hpp"
#include "facever/imaging.hpp"

#include <doctest.h>

#include <random>

using namespace facever;

namespace {

RawImage random_image(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> u(0, 255);
  RawImage img(w, h);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(u(rng));
  return img;
}

}  // namespace

TEST_SUITE("imaging") {

TEST_CASE("full-range conversion of reference colours") {
  const Ycc black = rgb_to_ycbcr(0, 0, 0);
  CHECK(black.y == 0.0);
  CHECK(black.cr == 128.0);
  CHECK(black.cb == 128.0);
  const Ycc white = rgb_to_ycbcr(255, 255, 255);
  CHECK(white.y == doctest::Approx(255.0).epsilon(1e-12));
  CHECK(white.cr == doctest::Approx(128.0).epsilon(1e-12));
  CHECK(white.cb == doctest::Approx(128.0).epsilon(1e-12));
  const Ycc red = rgb_to_ycbcr(255, 0, 0);
  CHECK(red.y == doctest::Approx(76.245).epsilon(1e-12));
  CHECK(red.cr == 255.0);
  CHECK(red.cb == doctest::Approx(84.97232).epsilon(1e-12));
}

TEST_CASE("grey inputs have neutral chroma and luma is monotone") {
  for (int v = 0; v <= 255; v += 5) {
    const Ycc c = rgb_to_ycbcr(v, v, v);
    CHECK(c.cr == doctest::Approx(128.0).epsilon(1e-12));
    CHECK(c.cb == doctest::Approx(128.0).epsilon(1e-12));
  }
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> u(0, 254);
  for (int i = 0; i < 200; ++i) {
    const int r = u(rng), g = u(rng), b = u(rng);
    const double y = rgb_to_ycbcr(r, g, b).y;
    CHECK(rgb_to_ycbcr(r + 1, g, b).y >= y);
    CHECK(rgb_to_ycbcr(r, g + 1, b).y >= y);
    CHECK(rgb_to_ycbcr(r, g, b + 1).y >= y);
  }
}

TEST_CASE("eyes at the targets give the identity warp") {
  GeometryConfig geo;
  const RawImage img = random_image(geo.cols, geo.rows, 1);
  const AlignResult out = align_and_crop(img, geo.left_target_px(), geo.right_target_px(), geo);
  CHECK(out.out_of_bounds == 0);
  double worst = 0.0;
  for (int r = 0; r < geo.rows; ++r)
    for (int c = 0; c < geo.cols; ++c) {
      const Ycc v = rgb_to_ycbcr(img.at(r, c, 0), img.at(r, c, 1), img.at(r, c, 2));
      worst = std::max({worst, std::abs(out.sample.grey(r, c) - v.y / 255.0),
                        std::abs(out.sample.cr(r, c) - v.cr) / 255.0,
                        std::abs(out.sample.cb(r, c) - v.cb) / 255.0});
    }
  CHECK(worst <= 1e-9);
}

TEST_CASE("swapped eyes rotate by half a turn and twice restores the crop") {
  GeometryConfig geo;
  geo.left_eye_target = {0.5, 0.3};
  geo.right_eye_target = {0.5, 0.7};
  const RawImage img = random_image(geo.cols, geo.rows, 2);
  const PixelPoint l = geo.left_target_px(), r = geo.right_target_px();
  const AlignResult once = align_and_crop(img, r, l, geo);
  // Rebuild an RGB image from the flipped crop's luma to apply the op again.
  RawImage flipped(geo.cols, geo.rows);
  for (int row = 0; row < geo.rows; ++row)
    for (int col = 0; col < geo.cols; ++col) {
      const auto v = static_cast<std::uint8_t>(std::lround(once.sample.grey(row, col) * 255.0));
      for (int ch = 0; ch < 3; ++ch) flipped.at(row, col, ch) = v;
      const int sr = geo.rows - 1 - row, sc = geo.cols - 1 - col;
      const double y = rgb_to_ycbcr(img.at(sr, sc, 0), img.at(sr, sc, 1), img.at(sr, sc, 2)).y;
      CHECK(once.sample.grey(row, col) == doctest::Approx(y / 255.0).epsilon(1e-9));
    }
  const AlignResult twice = align_and_crop(flipped, r, l, geo);
  for (int row = 0; row < geo.rows; ++row)
    for (int col = 0; col < geo.cols; ++col) {
      const double y = rgb_to_ycbcr(img.at(row, col, 0), img.at(row, col, 1), img.at(row, col, 2)).y;
      CHECK(std::abs(twice.sample.grey(row, col) - std::lround(y) / 255.0) <= 1.0 / 255.0 + 1e-9);
    }
}

TEST_CASE("a marker at the left eye lands on the left target") {
  GeometryConfig geo;
  RawImage img(160, 120);
  const PixelPoint left{52.0, 61.0}, right{40.0, 103.0};
  for (int dr = -1; dr <= 1; ++dr)
    for (int dc = -1; dc <= 1; ++dc)
      for (int ch = 0; ch < 3; ++ch)
        img.at(static_cast<int>(left.row) + dr, static_cast<int>(left.col) + dc, ch) = 255;
  const AlignResult out = align_and_crop(img, left, right, geo);
  Eigen::Index r = 0, c = 0;
  out.sample.grey.maxCoeff(&r, &c);
  const PixelPoint t = geo.left_target_px();
  CHECK(std::abs(r - t.row) <= 1.0);
  CHECK(std::abs(c - t.col) <= 1.0);
}

TEST_CASE("output shape is fixed and out-of-bounds pixels are counted") {
  GeometryConfig geo;
  const RawImage img = random_image(20, 16, 4);
  const AlignResult out = align_and_crop(img, {8.0, 5.0}, {8.0, 14.0}, geo);
  CHECK(out.sample.grey.rows() == geo.rows);
  CHECK(out.sample.grey.cols() == geo.cols);
  CHECK(out.out_of_bounds > 0);
  CHECK(out.sample.grey.minCoeff() >= 0.0);
  CHECK(out.sample.grey.maxCoeff() <= 1.0);
}

TEST_CASE("coincident or outside eyes are rejected") {
  GeometryConfig geo;
  const RawImage img = random_image(geo.cols, geo.rows, 5);
  try {
    align_and_crop(img, {10.0, 10.0}, {10.0, 10.0}, geo);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kAlignmentDegenerate);
  }
  CHECK_THROWS_AS(align_and_crop(img, {-1.0, 10.0}, {10.0, 20.0}, geo), Error);
}

TEST_CASE("geometry validation") {
  GeometryConfig geo;
  CHECK_NOTHROW(geo.validate());
  geo.left_eye_target = {0.4, 0.8};
  CHECK_THROWS_AS(geo.validate(), Error);
  geo = {};
  geo.rows = 1;
  CHECK_THROWS_AS(geo.validate(), Error);
}

TEST_CASE("skin mask with default bounds") {
  const Matrix neutral = Matrix::Constant(3, 4, 128.0);
  CHECK(!skin_mask(neutral, neutral).any());
  const Matrix cr = Matrix::Constant(3, 4, 150.0), cb = Matrix::Constant(3, 4, 100.0);
  const BoolMatrix m = skin_mask(cr, cb);
  CHECK(m.all());
  CHECK(m.rows() == 3);
  CHECK(m.cols() == 4);
  CHECK((skin_mask(cr, cb) == m).all());
}

TEST_CASE("skin mask is pointwise") {
  Matrix cr = Matrix::Constant(2, 2, 150.0), cb = Matrix::Constant(2, 2, 100.0);
  cr(0, 1) = 120.0;
  cb(1, 0) = 130.0;
  const BoolMatrix m = skin_mask(cr, cb);
  CHECK(m(0, 0));
  CHECK(!m(0, 1));
  CHECK(!m(1, 0));
  CHECK(m(1, 1));
}

TEST_CASE("empty skin bounds are a configuration error") {
  SkinBounds b;
  b.cr_lo = 180.0;
  try {
    b.validate();
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kBadConfig);
  }
}

}
