#include "sbss/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sbss {

namespace {

// Median of a scratch buffer, destroying its order.
double medianInPlace(std::vector<double>& buf) {
  const size_t n = buf.size();
  const size_t hi = n / 2;
  std::nth_element(buf.begin(), buf.begin() + hi, buf.end());
  double upper = buf[hi];
  if (n % 2 == 1) return upper;
  double lower = *std::max_element(buf.begin(), buf.begin() + hi);
  return 0.5 * (lower + upper);
}

}  // namespace

double mad(std::span<const double> v) {
  if (v.empty()) throw SolverError("mad: empty input");
  std::vector<double> buf(v.begin(), v.end());
  double med = medianInPlace(buf);
  for (size_t i = 0; i < v.size(); ++i) buf[i] = std::abs(v[i] - med);
  return medianInPlace(buf);
}

double mad(const Vec& v) { return mad(std::span<const double>(v.data(), static_cast<size_t>(v.size()))); }

Vec madRows(const Mat& m) {
  requireNonEmpty(m, "madRows");
  Vec out(m.rows());
  for (Index i = 0; i < m.rows(); ++i) out[i] = mad(rowSpan(m, i));
  return out;
}

double softThresholdScalar(double x, double t) {
  double mag = std::abs(x) - t;
  if (mag <= 0.0) return 0.0;
  return x < 0.0 ? -mag : mag;
}

Mat softThreshold(const Mat& m, const Mat& thresholds) {
  requireSameShape(m, thresholds, "softThreshold");
  if ((thresholds.array() < 0.0).any()) throw SolverError("softThreshold: negative threshold");
  Mat out(m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) out(i, j) = softThresholdScalar(m(i, j), thresholds(i, j));
  return out;
}

Mat projectColumnsBall(const Mat& a) {
  requireNonEmpty(a, "projectColumnsBall");
  Mat out = a;
  for (Index j = 0; j < out.cols(); ++j) {
    double nrm = out.col(j).norm();
    if (nrm > 1.0) out.col(j) /= nrm;
  }
  return out;
}

ColumnNormalization normalizeColumnsSphere(const Mat& a) {
  requireNonEmpty(a, "normalizeColumnsSphere");
  ColumnNormalization result;
  result.matrix = a;
  result.scales = Vec::Ones(a.cols());
  for (Index j = 0; j < a.cols(); ++j) {
    double nrm = result.matrix.col(j).norm();
    if (nrm == 0.0) {
      result.degenerate_columns.push_back(j);
    } else {
      result.matrix.col(j) /= nrm;
      result.scales[j] = nrm;
    }
  }
  return result;
}

SpectralNormResult spectralNorm(const Mat& m, double tol, int max_iters, const Vec* warm_start) {
  requireNonEmpty(m, "spectralNorm");
  if (tol <= 0.0) throw SolverError("spectralNorm: tol must be positive");
  if (max_iters < 1) throw SolverError("spectralNorm: max_iters must be >= 1");

  // Iterate in the smaller dimension so the vector lives on the short side.
  const bool flip = m.rows() < m.cols();
  const Index dim = flip ? m.rows() : m.cols();

  // Every column and row norm is a certified lower bound on the top singular
  // value.  A stable estimate below this floor means the start vector sits in
  // a subdominant invariant subspace (the all-ones vector does exactly that
  // for any 2x2 Gram matrix with negative off-diagonal), so such plateaus are
  // rejected and the iteration restarts from a canonical axis.
  double floor_bound = 0.0;
  for (Index c = 0; c < m.cols(); ++c) floor_bound = std::max(floor_bound, m.col(c).norm());
  for (Index r = 0; r < m.rows(); ++r) floor_bound = std::max(floor_bound, m.row(r).norm());
  const double floor_ok = floor_bound * (1.0 - 1e-9);

  SpectralNormResult res;
  Vec v;
  if (warm_start != nullptr && warm_start->size() == dim && warm_start->norm() > 0.0)
    v = *warm_start / warm_start->norm();
  else
    v = Vec::Constant(dim, 1.0 / std::sqrt(static_cast<double>(dim)));

  double prev = -1.0;
  double best = 0.0;
  Index fallback = 0;
  for (int it = 0; it < max_iters; ++it) {
    res.iterations = it + 1;
    Vec y = flip ? Vec(m.transpose() * v) : Vec(m * v);
    double est = y.norm();
    if (est == 0.0) {
      if (m.isZero(0.0)) {
        res.value = 0.0;
        res.converged = true;
        res.top_vector = v;
        return res;
      }
      // Start vector happened to be orthogonal to every left image; restart
      // from canonical basis vectors, cycling deterministically.
      v = Vec::Zero(dim);
      v[fallback % dim] = 1.0;
      ++fallback;
      prev = -1.0;
      continue;
    }
    Vec w = flip ? Vec(m * y) : Vec(m.transpose() * y);
    double wn = w.norm();
    if (wn == 0.0) {
      res.value = est;
      res.top_vector = v;
      return res;  // not converged
    }
    v = w / wn;
    res.value = est;
    best = std::max(best, est);
    if (prev >= 0.0 && std::abs(est - prev) <= tol * est) {
      if (est >= floor_ok) {
        res.converged = true;
        res.top_vector = v;
        return res;
      }
      if (fallback < dim) {
        v = Vec::Zero(dim);
        v[fallback] = 1.0;
        ++fallback;
        prev = -1.0;
        continue;
      }
      // All axes tried and still below the floor; fall through and report
      // the best estimate without claiming convergence.
      res.value = best;
      res.top_vector = v;
      return res;
    }
    prev = est;
  }
  res.top_vector = v;
  return res;  // best estimate, not converged
}

namespace {

Mat pseudoInverseImpl(const Mat& m, double ridge) {
  requireNonEmpty(m, "pseudoInverse");
  if (ridge < 0.0) throw SolverError("pseudoInverse: ridge must be nonnegative");
  const bool tall = m.rows() >= m.cols();
  Mat gram = tall ? Mat(m.transpose() * m) : Mat(m * m.transpose());
  if (ridge > 0.0) gram.diagonal().array() += ridge;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
  if (!lu.isInvertible()) throw SolverError("pseudoInverse: rank deficient; supply ridge");
  if (tall) return lu.solve(Eigen::MatrixXd(m.transpose()));
  // Wide: M^+ = M^T (M M^T + ridge I)^-1, and the Gram is symmetric.
  return Mat(lu.solve(Eigen::MatrixXd(m)).transpose());
}

}  // namespace

Mat pseudoInverse(const Mat& m, double ridge) { return pseudoInverseImpl(m, ridge); }

Mat pseudoInverseAuto(const Mat& m, double ridge_rel) {
  requireNonEmpty(m, "pseudoInverseAuto");
  if (ridge_rel < 0.0) throw SolverError("pseudoInverseAuto: ridge_rel must be nonnegative");
  const bool tall = m.rows() >= m.cols();
  double peak = 0.0;
  if (tall) {
    for (Index j = 0; j < m.cols(); ++j) peak = std::max(peak, m.col(j).squaredNorm());
  } else {
    for (Index i = 0; i < m.rows(); ++i) peak = std::max(peak, m.row(i).squaredNorm());
  }
  return pseudoInverseImpl(m, ridge_rel * peak);
}

}  // namespace sbss
