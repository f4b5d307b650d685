#pragma once

#include <vector>

#include "sbss/mat.hpp"

namespace sbss {

// Image geometry shared by every operation that flattens 2-D sources into
// matrix rows.
struct Geometry {
  int width = 0;
  int height = 0;
  int n_scales = 0;

  int pixels() const { return width * height; }
  int detailCount() const { return n_scales * pixels(); }
  void validate() const;
  void requireSourceShape(const Mat& s, const char* what) const;
};

// Undecimated isotropic wavelet decomposition: n_scales detail planes plus a
// coarse residual, every plane the size of the input image.
struct StarletPyramid {
  int width = 0;
  int height = 0;
  std::vector<Vec> details;
  Vec coarse;

  int nScales() const { return static_cast<int>(details.size()); }
};

// A trous decomposition with the separable B3 spline kernel
// (1/16, 1/4, 3/8, 1/4, 1/16), taps dilated by 2^j at pass j, and mirror
// (symmetric, non-repeating edge) boundary handling. detail_j is the
// difference of successive smooths; the final smooth is the coarse plane.
StarletPyramid starletForward(const Vec& image, int width, int height, int n_scales);

// Plain additive inverse: coarse + sum of detail planes.
Vec starletInverse(const StarletPyramid& pyramid);

// Row-wise decomposition of a source matrix (one image per row).
std::vector<StarletPyramid> analyzeSources(const Mat& s, const Geometry& geom);

// Row-wise additive reconstruction.
Mat synthesizeSources(const std::vector<StarletPyramid>& pyramids);

// Mirror boundary index fold into [0, n).
int mirrorIndex(int i, int n);

}  // namespace sbss
