#include "sbss/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sbss/numkernel.hpp"

namespace sbss {

namespace {

Mat normalizedOrThrow(const Mat& a, const char* what) {
  ColumnNormalization norm = normalizeColumnsSphere(a);
  if (!norm.degenerate_columns.empty())
    throw SolverError(std::string(what) + ": all-zero column, cannot align");
  return std::move(norm.matrix);
}

}  // namespace

AlignmentReport align(const Mat& a_est, const Mat& a_true) {
  requireSameShape(a_est, a_true, "align");
  requireNonEmpty(a_est, "align");
  const Index n = a_est.cols();
  if (n > 8) throw SolverError("align: exhaustive search limited to 8 sources");

  Mat est = normalizedOrThrow(a_est, "align: estimate");
  Mat ref = normalizedOrThrow(a_true, "align: reference");

  // Absolute inner products between every estimate/reference column pair.
  Mat overlap = (est.transpose() * ref).cwiseAbs();

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_score = -1.0;
  do {
    double score = 0.0;
    for (Index i = 0; i < n; ++i) score += overlap(perm[i], i);
    if (score > best_score) {
      best_score = score;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  AlignmentReport report;
  report.permutation = best;
  report.signs = Vec::Ones(n);
  report.aligned.resize(est.rows(), n);
  for (Index i = 0; i < n; ++i) {
    double dot = est.col(best[i]).dot(ref.col(i));
    double sign = dot < 0.0 ? -1.0 : 1.0;
    report.signs[i] = sign;
    report.aligned.col(i) = sign * est.col(best[i]);
  }
  report.aligned_error = (pseudoInverse(report.aligned) * ref - Mat::Identity(n, n)).cwiseAbs();
  return report;
}

AlignmentReport mixingCriterion(const Mat& a_est, const Mat& a_true) {
  AlignmentReport report = align(a_est, a_true);
  const Index n = report.aligned_error.rows();
  const Index off_count = n * n - n;
  double mean = 0.0;
  if (off_count > 0) {
    double sum = report.aligned_error.sum() - report.aligned_error.diagonal().cwiseAbs().sum();
    mean = sum / static_cast<double>(off_count);
  }
  if (mean < 1e-6) {
    report.c_a_db = 60.0;
    report.capped = true;
  } else {
    report.c_a_db = -10.0 * std::log10(mean);
  }
  return report;
}

double caDb(const Mat& a_est, const Mat& a_true) { return mixingCriterion(a_est, a_true).c_a_db; }

double snrDb(const Mat& signal, const Mat& noise) {
  requireSameShape(signal, noise, "snrDb");
  requireNonEmpty(signal, "snrDb");
  double ns = noise.squaredNorm();
  if (ns == 0.0) return std::numeric_limits<double>::infinity();
  double ss = signal.squaredNorm();
  return 10.0 * std::log10(ss / ns);
}

}  // namespace sbss
