#pragma once

#include <vector>

#include "sbss/mat.hpp"

namespace sbss {

struct AlignmentReport {
  std::vector<int> permutation;  // aligned column i comes from estimate column permutation[i]
  Vec signs;                     // sign applied to each aligned column
  Mat aligned;                   // permuted, sign-fixed, unit-column estimate
  Mat aligned_error;             // |aligned^+ A_true_normalized - I|
  double c_a_db = 0.0;
  bool capped = false;
};

// Matches estimate columns to reference columns by exhaustive permutation
// search (n <= 8) over normalized columns, maximizing the total absolute
// inner product, then fixes signs to make the matched products nonnegative.
AlignmentReport align(const Mat& a_est, const Mat& a_true);

// Mixing-matrix criterion in dB: -10 log10 of the mean absolute off-diagonal
// entry of aligned^+ A_true_normalized, capped at +60 when that mean drops
// below 1e-6.
AlignmentReport mixingCriterion(const Mat& a_est, const Mat& a_true);
double caDb(const Mat& a_est, const Mat& a_true);

// 10 log10(||signal||_F^2 / ||noise||_F^2); +inf for zero noise.
double snrDb(const Mat& signal, const Mat& noise);

}  // namespace sbss
