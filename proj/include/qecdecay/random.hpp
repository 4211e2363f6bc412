/*******************************************************************************
 * Copyright (c) 2026 The qecdecay Authors.                                    *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#pragma once

#include "qecdecay/tensor_core.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace qecdecay {

/// Seeded generator with per-task streams. The stream for (seed, task) is
/// fixed regardless of how many workers run, so sweeps stay reproducible.
///
/// Distributions are implemented here rather than taken from <random> since
/// the standard ones are not bit-identical across library vendors.
class Rng {
public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : engine_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0)
      u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  /// Standard complex Gaussian, E|z|^2 = 1.
  cplx complex_normal() {
    const double re = normal();
    const double im = normal();
    return cplx{re, im} / std::sqrt(2.0);
  }

  Rng split(std::uint64_t stream) { return Rng(engine_(), stream); }

private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline Matrix random_complex_matrix(Rng &rng, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i)
      m(i, j) = rng.complex_normal();
  return m;
}

/// (G + G^dagger)/2 with i.i.d. complex Gaussian G.
inline Matrix random_hermitian(Rng &rng, Index dim) {
  const Matrix g = random_complex_matrix(rng, dim, dim);
  return 0.5 * (g + g.adjoint());
}

/// Haar-distributed unitary (QR of a Ginibre matrix with phase fix).
inline Matrix random_unitary(Rng &rng, Index dim) {
  const Matrix g = random_complex_matrix(rng, dim, dim);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < dim; ++j) {
    const double a = std::abs(r(j, j));
    if (a > 0)
      q.col(j) *= r(j, j) / a;
  }
  return q;
}

inline Vector random_state(Rng &rng, Index dim) {
  Vector v(dim);
  for (Index i = 0; i < dim; ++i)
    v(i) = rng.complex_normal();
  return v / v.norm();
}

} // namespace qecdecay
