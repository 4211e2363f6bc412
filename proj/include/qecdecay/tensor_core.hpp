/*******************************************************************************
 * Copyright (c) 2026 The qecdecay Authors.                                    *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#pragma once

#include "qecdecay/errors.hpp"
#include "qecdecay/tolerances.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

namespace qecdecay {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Tensor-factor dimensions of a composite space, outermost factor first.
using Dims = std::vector<std::size_t>;

inline constexpr cplx kI{0.0, 1.0};

inline std::size_t product(const Dims &dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                         std::multiplies<>());
}

/// Largest absolute entry. Zero for an empty matrix.
template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived> &m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_defect(const Matrix &m) {
  return max_abs(m - m.adjoint());
}

inline double unitarity_defect(const Matrix &u) {
  return max_abs(u.adjoint() * u - Matrix::Identity(u.cols(), u.cols()));
}

inline bool is_hermitian(const Matrix &m, double tolerance = tol::hermitian) {
  return m.rows() == m.cols() && hermiticity_defect(m) <= tolerance;
}

inline bool is_unitary(const Matrix &u, double tolerance = tol::unitary) {
  return u.rows() == u.cols() && unitarity_defect(u) <= tolerance;
}

/// Square complex matrix, optionally tagged with the tensor-factor
/// dimensions of the space it acts on.
class ComplexMatrix {
public:
  ComplexMatrix() = default;

  explicit ComplexMatrix(Matrix m, Dims factor_dims = {})
      : mat_(std::move(m)), dims_(std::move(factor_dims)) {
    if (mat_.rows() != mat_.cols())
      throw StructuralError("ComplexMatrix must be square, got " +
                            std::to_string(mat_.rows()) + "x" +
                            std::to_string(mat_.cols()));
    if (!dims_.empty() &&
        product(dims_) != static_cast<std::size_t>(mat_.rows()))
      throw StructuralError(
          "factor_dims product does not match the matrix dimension");
  }

  const Matrix &mat() const { return mat_; }
  const Dims &factor_dims() const { return dims_; }
  bool has_factor_dims() const { return !dims_.empty(); }
  Index dim() const { return mat_.rows(); }

private:
  Matrix mat_;
  Dims dims_;
};

/// Unit vector over a composite space.
class StateVector {
public:
  StateVector() = default;

  explicit StateVector(Vector amplitudes, Dims factor_dims = {})
      : amp_(std::move(amplitudes)), dims_(std::move(factor_dims)) {
    if (std::abs(amp_.squaredNorm() - 1.0) > tol::state_norm)
      throw ValidationError("state vector is not normalized (|psi|^2 = " +
                            std::to_string(amp_.squaredNorm()) + ")");
    if (!dims_.empty() && product(dims_) != static_cast<std::size_t>(amp_.size()))
      throw StructuralError(
          "factor_dims product does not match the state dimension");
  }

  const Vector &amplitudes() const { return amp_; }
  const Dims &factor_dims() const { return dims_; }
  Index dim() const { return amp_.size(); }

  Matrix projector() const { return amp_ * amp_.adjoint(); }

private:
  Vector amp_;
  Dims dims_;
};

/// Hermitian, unit-trace, positive semidefinite operator.
class DensityMatrix {
public:
  DensityMatrix() = default;

  explicit DensityMatrix(Matrix m, Dims factor_dims = {})
      : m_(std::move(m), std::move(factor_dims)) {
    const Matrix &a = m_.mat();
    if (!is_hermitian(a, tol::hermitian))
      throw ValidationError("density matrix is not Hermitian (defect " +
                            std::to_string(hermiticity_defect(a)) + ")");
    if (std::abs(a.trace() - cplx{1.0}) > tol::trace)
      throw ValidationError("density matrix trace differs from 1");
    if (a.rows() > 0) {
      const Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < tol::eigenvalue_floor)
        throw ValidationError("density matrix has a negative eigenvalue " +
                              std::to_string(es.eigenvalues().minCoeff()));
    }
  }

  static DensityMatrix pure(const StateVector &psi) {
    return DensityMatrix(psi.projector(), psi.factor_dims());
  }

  const Matrix &mat() const { return m_.mat(); }
  const Dims &factor_dims() const { return m_.factor_dims(); }
  bool has_factor_dims() const { return m_.has_factor_dims(); }
  Index dim() const { return m_.dim(); }

private:
  ComplexMatrix m_;
};

// --- tensor products ---------------------------------------------------------

inline Matrix kron(const Matrix &a, const Matrix &b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Vector kron(const Vector &a, const Vector &b) {
  Vector out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

/// Operands without factor_dims count as a single factor of their dimension.
inline ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
  Dims dims = a.has_factor_dims() ? a.factor_dims()
                                  : Dims{static_cast<std::size_t>(a.dim())};
  if (b.has_factor_dims())
    dims.insert(dims.end(), b.factor_dims().begin(), b.factor_dims().end());
  else
    dims.push_back(static_cast<std::size_t>(b.dim()));
  return ComplexMatrix(kron(a.mat(), b.mat()), std::move(dims));
}

inline Matrix kron_all(const std::vector<Matrix> &factors) {
  Matrix out = Matrix::Identity(1, 1);
  for (const auto &f : factors)
    out = kron(out, f);
  return out;
}

// --- partial trace -----------------------------------------------------------

/// Traces out every factor not listed in `keep`. Kept factors retain their
/// original order. Works on any square matrix, not only density matrices.
inline Matrix partial_trace(const Matrix &m, const Dims &dims,
                            std::vector<std::size_t> keep) {
  if (dims.empty())
    throw StructuralError("partial_trace requires factor_dims");
  if (product(dims) != static_cast<std::size_t>(m.rows()) || m.rows() != m.cols())
    throw StructuralError("partial_trace: factor_dims do not match matrix");
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  if (keep.empty())
    throw StructuralError("partial_trace: keep set must be non-empty");
  if (keep.back() >= dims.size())
    throw StructuralError("partial_trace: keep index out of range");

  const std::size_t nf = dims.size();
  std::vector<bool> kept(nf, false);
  for (auto k : keep)
    kept[k] = true;

  std::size_t keep_dim = 1, trace_dim = 1;
  for (std::size_t f = 0; f < nf; ++f)
    (kept[f] ? keep_dim : trace_dim) *= dims[f];

  // Split every flat index into (kept index, traced index), row-major.
  const std::size_t total = product(dims);
  std::vector<std::vector<Index>> groups(trace_dim,
                                         std::vector<Index>(keep_dim));
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat, ki = 0, ti = 0, kstride = 1, tstride = 1;
    for (std::size_t f = nf; f-- > 0;) {
      const std::size_t digit = rem % dims[f];
      rem /= dims[f];
      if (kept[f]) {
        ki += digit * kstride;
        kstride *= dims[f];
      } else {
        ti += digit * tstride;
        tstride *= dims[f];
      }
    }
    groups[ti][ki] = static_cast<Index>(flat);
  }

  Matrix out = Matrix::Zero(static_cast<Index>(keep_dim),
                            static_cast<Index>(keep_dim));
  for (const auto &g : groups)
    out += m(g, g);
  return out;
}

inline DensityMatrix partial_trace(const DensityMatrix &d,
                                   const std::vector<std::size_t> &keep) {
  if (!d.has_factor_dims())
    throw StructuralError("partial_trace requires factor_dims");
  Matrix reduced = partial_trace(d.mat(), d.factor_dims(), keep);
  std::vector<std::size_t> sorted = keep;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  Dims kept_dims;
  for (auto k : sorted)
    kept_dims.push_back(d.factor_dims()[k]);
  // Symmetrize away rounding noise before re-validating.
  reduced = 0.5 * (reduced + reduced.adjoint()).eval();
  return DensityMatrix(std::move(reduced), std::move(kept_dims));
}

// --- spectral functions ------------------------------------------------------

/// exp(-i h t) for Hermitian h, via eigendecomposition.
inline Matrix expm_hermitian(const Matrix &h, double t) {
  if (h.rows() != h.cols())
    throw StructuralError("expm_hermitian: matrix must be square");
  const double defect = hermiticity_defect(h);
  if (defect > tol::hermitian_input)
    throw ValidationError("expm_hermitian: generator is not Hermitian (defect " +
                          std::to_string(defect) + ")");
  if (t == 0.0)
    return Matrix::Identity(h.rows(), h.cols());
  const Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const Eigen::VectorXd &lambda = es.eigenvalues();
  Vector phases(lambda.size());
  for (Index i = 0; i < lambda.size(); ++i)
    phases(i) = std::exp(-kI * (lambda(i) * t));
  const Matrix &q = es.eigenvectors();
  return q * phases.asDiagonal() * q.adjoint();
}

/// Largest singular value.
inline double operator_norm(const Matrix &a) {
  if (a.size() == 0)
    return 0.0;
  const Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

inline double trace_distance(const Matrix &a, const Matrix &b) {
  const Matrix diff = a - b;
  const Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (diff + diff.adjoint()),
                                                 Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

inline Vector basis_vector(Index dim, Index index) {
  Vector v = Vector::Zero(dim);
  v(index) = 1.0;
  return v;
}

} // namespace qecdecay
