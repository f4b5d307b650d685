#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "sbss/hybrid.hpp"
#include "sbss/metrics.hpp"
#include "sbss/numkernel.hpp"

using namespace sbss;

namespace {

// Rotation by theta: unit columns, identity alignment for small angles,
// inverse equal to the transpose.
Mat rotation2(double theta) {
  Mat a(2, 2);
  a << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return a;
}

}  // namespace

TEST_CASE("perfect estimate aligns to the identity and caps the score") {
  Mat a = drawInitialMixing(4, 3, 901);
  AlignmentReport rep = mixingCriterion(a, a);
  CHECK(rep.capped);
  CHECK(rep.c_a_db == 60.0);
  for (int i = 0; i < 3; ++i) CHECK(rep.permutation[i] == i);
  CHECK(rep.aligned_error.maxCoeff() < 1e-9);
}

TEST_CASE("column swap, sign flip and rescaling are undone") {
  Mat a_true = drawInitialMixing(5, 2, 902);
  Mat a_est(5, 2);
  a_est.col(0) = -3.0 * a_true.col(1);
  a_est.col(1) = 0.25 * a_true.col(0);

  AlignmentReport rep = mixingCriterion(a_est, a_true);
  // Aligned column 0 is rebuilt from estimate column 1, which already points
  // the right way; aligned column 1 comes from the flipped column 0.
  CHECK(rep.permutation[0] == 1);
  CHECK(rep.permutation[1] == 0);
  CHECK(rep.signs[0] == 1.0);
  CHECK(rep.signs[1] == -1.0);
  CHECK((rep.aligned - a_true).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(rep.capped);
}

TEST_CASE("matching agrees with a brute-force enumeration of permutations") {
  Rng rng(903);
  for (int trial = 0; trial < 10; ++trial) {
    Mat est = rng.normalMat(6, 4);
    Mat ref = rng.normalMat(6, 4);
    AlignmentReport rep = align(est, ref);

    Mat en = normalizeColumnsSphere(est).matrix;
    Mat rn = normalizeColumnsSphere(ref).matrix;
    Mat overlap = (en.transpose() * rn).cwiseAbs();

    std::vector<int> perm(4);
    std::iota(perm.begin(), perm.end(), 0);
    double best = -1.0;
    do {
      double score = 0.0;
      for (Index i = 0; i < 4; ++i) score += overlap(perm[i], i);
      best = std::max(best, score);
    } while (std::next_permutation(perm.begin(), perm.end()));

    double got = 0.0;
    for (Index i = 0; i < 4; ++i) got += overlap(rep.permutation[i], i);
    CHECK(got == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("two-source score matches the closed form for a rotated estimate") {
  // A rotation against the identity leaves |inv(A) - I| with both
  // off-diagonal entries equal to sin(theta), so the score is
  // -10 log10(sin(theta)).
  Mat eye = Mat::Identity(2, 2);
  double theta = std::asin(0.1);
  double ca = caDb(rotation2(theta), eye);
  CHECK(ca == doctest::Approx(10.0).epsilon(1e-10));

  double theta2 = 0.08;
  double expect = -10.0 * std::log10(std::sin(theta2));
  CHECK(caDb(rotation2(theta2), eye) == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("score increases monotonically as the estimate improves") {
  Mat eye = Mat::Identity(2, 2);
  std::vector<double> deltas{0.2, 0.1, 0.05, 0.02, 0.01};
  double prev = -std::numeric_limits<double>::infinity();
  for (double d : deltas) {
    double ca = caDb(rotation2(std::asin(d)), eye);
    CHECK(ca > prev);
    prev = ca;
  }
}

TEST_CASE("score is invariant to permutation, sign and positive scaling") {
  Rng rng(904);
  Mat a_true = drawInitialMixing(6, 3, 905);
  Mat a_est = a_true + 0.05 * rng.normalMat(6, 3);
  double base = caDb(a_est, a_true);

  std::vector<int> perm{0, 1, 2};
  for (int trial = 0; trial < 100; ++trial) {
    for (int i = 2; i > 0; --i)
      std::swap(perm[i], perm[static_cast<int>(rng.uniform() * (i + 1))]);
    Mat shuffled(6, 3);
    for (int i = 0; i < 3; ++i) {
      double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
      double scale = 0.1 + 5.0 * rng.uniform();
      shuffled.col(i) = sign * scale * a_est.col(perm[i]);
    }
    CHECK(std::abs(caDb(shuffled, a_true) - base) < 1e-9);
  }
}

TEST_CASE("alignment input validation") {
  Mat ok = Mat::Identity(3, 3);
  Mat wide(3, 9);
  wide.setOnes();
  Mat big = Mat::Identity(9, 9);
  CHECK_THROWS_WITH_AS(align(big, big), "align: exhaustive search limited to 8 sources",
                       SolverError);
  CHECK_THROWS_AS(align(ok, Mat::Identity(4, 4)), SolverError);

  Mat zero_col = ok;
  zero_col.col(1).setZero();
  CHECK_THROWS_AS(align(zero_col, ok), SolverError);
  CHECK_THROWS_AS(align(ok, zero_col), SolverError);
}

TEST_CASE("snr in dB") {
  Mat s(1, 1), n(1, 1);
  s << 10.0;
  n << 1.0;
  CHECK(snrDb(s, n) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(snrDb(s, s) == 0.0);

  Rng rng(906);
  Mat sig = rng.normalMat(4, 9);
  Mat noi = rng.normalMat(4, 9);
  double base = snrDb(sig, noi);
  CHECK(snrDb(Mat(3.0 * sig), Mat(3.0 * noi)) == doctest::Approx(base).epsilon(1e-12));

  Mat zero = Mat::Zero(4, 9);
  CHECK(std::isinf(snrDb(sig, zero)));
  CHECK_THROWS_AS(snrDb(sig, Mat::Zero(2, 2)), SolverError);
}
