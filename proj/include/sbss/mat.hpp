#pragma once

#include <span>

#include <Eigen/Dense>

#include "sbss/error.hpp"

namespace sbss {

// Dense double matrix, row major so that one source (one row) is a
// contiguous pixel buffer.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

inline std::span<const double> rowSpan(const Mat& m, Index i) {
  return {m.data() + static_cast<size_t>(i) * m.cols(), static_cast<size_t>(m.cols())};
}

void requireFinite(const Mat& m, const char* what);
void requireFinite(const Vec& v, const char* what);

inline void requireNonEmpty(const Mat& m, const char* what) {
  if (m.size() == 0) throw SolverError(std::string(what) + ": empty matrix");
}

inline void requireSameShape(const Mat& a, const Mat& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw SolverError(std::string(what) + ": shape mismatch (" + std::to_string(a.rows()) + "x" +
                      std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                      std::to_string(b.cols()) + ")");
}

}  // namespace sbss
