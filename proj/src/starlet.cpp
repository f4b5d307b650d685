#include "sbss/starlet.hpp"

#include <string>

namespace sbss {

namespace {

constexpr double kTaps[5] = {1.0 / 16.0, 1.0 / 4.0, 3.0 / 8.0, 1.0 / 4.0, 1.0 / 16.0};

// Separable smoothing with taps at offsets {-2, -1, 0, 1, 2} * step.
void smoothPass(const Vec& in, Vec& out, Vec& tmp, int width, int height, int step) {
  // Horizontal.
  for (int y = 0; y < height; ++y) {
    const double* row = in.data() + static_cast<size_t>(y) * width;
    double* trow = tmp.data() + static_cast<size_t>(y) * width;
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int k = -2; k <= 2; ++k) acc += kTaps[k + 2] * row[mirrorIndex(x + k * step, width)];
      trow[x] = acc;
    }
  }
  // Vertical.
  for (int y = 0; y < height; ++y) {
    double* orow = out.data() + static_cast<size_t>(y) * width;
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int k = -2; k <= 2; ++k)
        acc += kTaps[k + 2] * tmp[static_cast<size_t>(mirrorIndex(y + k * step, height)) * width + x];
      orow[x] = acc;
    }
  }
}

}  // namespace

int mirrorIndex(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

void Geometry::validate() const {
  if (width < 2 || height < 2) throw SolverError("geometry: width and height must be >= 2");
  if (n_scales < 1) throw SolverError("geometry: n_scales must be >= 1");
  if (width < (1 << n_scales) || height < (1 << n_scales))
    throw SolverError("geometry: image too small for requested scales");
}

void Geometry::requireSourceShape(const Mat& s, const char* what) const {
  if (s.cols() != pixels())
    throw SolverError(std::string(what) + ": source row length " + std::to_string(s.cols()) +
                      " does not match " + std::to_string(width) + "x" + std::to_string(height) +
                      " geometry");
}

StarletPyramid starletForward(const Vec& image, int width, int height, int n_scales) {
  Geometry geom{width, height, n_scales};
  geom.validate();
  if (image.size() != geom.pixels()) throw SolverError("starletForward: image size mismatch");

  StarletPyramid p;
  p.width = width;
  p.height = height;
  p.details.reserve(n_scales);

  Vec current = image;
  Vec smooth(image.size());
  Vec tmp(image.size());
  for (int s = 0; s < n_scales; ++s) {
    smoothPass(current, smooth, tmp, width, height, 1 << s);
    p.details.push_back(current - smooth);
    current = smooth;
  }
  p.coarse = std::move(current);
  return p;
}

Vec starletInverse(const StarletPyramid& pyramid) {
  if (pyramid.coarse.size() == 0) throw SolverError("starletInverse: empty pyramid");
  Vec out = pyramid.coarse;
  for (const Vec& d : pyramid.details) {
    if (d.size() != out.size()) throw SolverError("starletInverse: plane size mismatch");
    out += d;
  }
  return out;
}

std::vector<StarletPyramid> analyzeSources(const Mat& s, const Geometry& geom) {
  geom.validate();
  geom.requireSourceShape(s, "analyzeSources");
  std::vector<StarletPyramid> out;
  out.reserve(s.rows());
  Vec row(s.cols());
  for (Index i = 0; i < s.rows(); ++i) {
    row = s.row(i);
    out.push_back(starletForward(row, geom.width, geom.height, geom.n_scales));
  }
  return out;
}

Mat synthesizeSources(const std::vector<StarletPyramid>& pyramids) {
  if (pyramids.empty()) throw SolverError("synthesizeSources: no pyramids");
  const Index cols = pyramids.front().coarse.size();
  Mat out(static_cast<Index>(pyramids.size()), cols);
  for (size_t i = 0; i < pyramids.size(); ++i) {
    Vec row = starletInverse(pyramids[i]);
    if (row.size() != cols) throw SolverError("synthesizeSources: inconsistent geometry");
    out.row(static_cast<Index>(i)) = row;
  }
  return out;
}

}  // namespace sbss
