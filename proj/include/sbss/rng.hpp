#pragma once

#include <cstdint>
#include <random>

#include "sbss/mat.hpp"

namespace sbss {

// SplitMix64 step; used to derive independent sub-stream seeds from a base
// seed without correlated low bits.
std::uint64_t splitmix64(std::uint64_t& state);

std::uint64_t deriveSeed(std::uint64_t base, std::uint64_t stream);

// Deterministic random stream. mt19937_64 output is fully specified by the
// standard, and uniform/normal transforms are done by hand here because the
// std distributions are free to differ between library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; consumes two uniforms per pair.
  double normal();

  // Fills in row-major order; the fill order is part of the determinism
  // contract.
  Mat normalMat(Index rows, Index cols);
  Vec normalVec(Index n);

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace sbss
