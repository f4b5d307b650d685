#include "sbss/mat.hpp"

namespace sbss {

void requireFinite(const Mat& m, const char* what) {
  if (!m.allFinite()) throw SolverError(std::string(what) + ": non-finite entries");
}

void requireFinite(const Vec& v, const char* what) {
  if (!v.allFinite()) throw SolverError(std::string(what) + ": non-finite entries");
}

}  // namespace sbss
