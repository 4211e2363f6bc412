/*******************************************************************************
 * Copyright (c) 2026 The qecdecay Authors.                                    *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#pragma once

#include "qecdecay/csv.hpp"
#include "qecdecay/tensor_core.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace qecdecay::pauli {

/// Single-qubit operator index: 0 = identity, 1 = sigma_x, 2 = sigma_y,
/// 3 = sigma_z.
using Mu = std::uint8_t;

/// One Pauli index per qubit. Qubit 1 is the leftmost (most significant)
/// tensor factor.
class PauliIndexVector {
public:
  PauliIndexVector() = default;

  explicit PauliIndexVector(std::vector<Mu> indices) : idx_(std::move(indices)) {
    for (Mu m : idx_)
      if (m > 3)
        throw ValidationError("Pauli index out of range: " + std::to_string(m));
  }

  /// Parses "IXYZ"-style words.
  static PauliIndexVector from_word(std::string_view word) {
    std::vector<Mu> idx;
    idx.reserve(word.size());
    for (char c : word) {
      switch (c) {
      case 'I': idx.push_back(0); break;
      case 'X': idx.push_back(1); break;
      case 'Y': idx.push_back(2); break;
      case 'Z': idx.push_back(3); break;
      default:
        throw ValidationError(std::string("invalid Pauli letter '") + c + "'");
      }
    }
    return PauliIndexVector(std::move(idx));
  }

  /// Decodes the base-4 integer `code` into n indices, qubit 1 most
  /// significant, so integer order equals lexicographic order.
  static PauliIndexVector from_code(std::uint64_t code, std::size_t n) {
    std::vector<Mu> idx(n);
    for (std::size_t q = n; q-- > 0;) {
      idx[q] = static_cast<Mu>(code & 3u);
      code >>= 2;
    }
    return PauliIndexVector(std::move(idx));
  }

  std::string word() const {
    static constexpr char letters[] = {'I', 'X', 'Y', 'Z'};
    std::string w;
    for (Mu m : idx_)
      w += letters[m];
    return w;
  }

  std::size_t size() const { return idx_.size(); }
  Mu operator[](std::size_t i) const { return idx_[i]; }
  const std::vector<Mu> &indices() const { return idx_; }

  auto operator<=>(const PauliIndexVector &) const = default;

private:
  std::vector<Mu> idx_;
};

inline Matrix sigma(Mu mu) {
  Matrix s(2, 2);
  switch (mu) {
  case 0: s << 1, 0, 0, 1; break;
  case 1: s << 0, 1, 1, 0; break;
  case 2: s << 0, -kI, kI, 0; break;
  case 3: s << 1, 0, 0, -1; break;
  default: throw ValidationError("Pauli index out of range");
  }
  return s;
}

/// sigma_mu acting on qubit k (1-based) of an n-qubit register.
inline Matrix embed(Mu mu, std::size_t k, std::size_t n) {
  if (k < 1 || k > n)
    throw ValidationError("embed: qubit position " + std::to_string(k) +
                          " outside 1.." + std::to_string(n));
  const Index left = Index{1} << (k - 1);
  const Index right = Index{1} << (n - k);
  return kron(kron(Matrix::Identity(left, left), sigma(mu)),
              Matrix::Identity(right, right));
}

/// Column action of a Pauli string: sigma|j> = phase[j] |target[j]>.
struct SparsePauli {
  std::vector<Index> target;
  std::vector<cplx> phase;
};

inline SparsePauli sparse(const PauliIndexVector &v) {
  const std::size_t n = v.size();
  const Index dim = Index{1} << n;
  SparsePauli sp{std::vector<Index>(dim), std::vector<cplx>(dim)};
  for (Index j = 0; j < dim; ++j) {
    Index t = j;
    cplx ph{1.0};
    for (std::size_t q = 0; q < n; ++q) {
      const Index mask = Index{1} << (n - 1 - q);
      const bool bit = (j & mask) != 0;
      switch (v[q]) {
      case 1: t ^= mask; break;
      case 2:
        t ^= mask;
        ph *= bit ? -kI : kI;
        break;
      case 3:
        if (bit)
          ph = -ph;
        break;
      default: break;
      }
    }
    sp.target[j] = t;
    sp.phase[j] = ph;
  }
  return sp;
}

inline Matrix pauli_string(const PauliIndexVector &v) {
  const SparsePauli sp = sparse(v);
  const Index dim = static_cast<Index>(sp.target.size());
  Matrix m = Matrix::Zero(dim, dim);
  for (Index j = 0; j < dim; ++j)
    m(sp.target[j], j) = sp.phase[j];
  return m;
}

inline std::size_t error_rank(const PauliIndexVector &v) {
  std::size_t r = 0;
  for (Mu m : v.indices())
    r += (m != 0);
  return r;
}

/// Environment operators U_v with u = sum_v U_v (x) sigma_v, keyed in
/// lexicographic index order.
using Decomposition = std::map<PauliIndexVector, Matrix>;

/// Inverts u = sum_v U_v (x) sigma_v through
/// U_v = 2^-n Tr_c(u (1 (x) sigma_v)). All 4^n components are present;
/// components with Frobenius norm below tol::component_zero are exact zeros.
inline Decomposition decompose(const Matrix &u, std::size_t d_e, std::size_t n) {
  if (n > tol::max_decompose_qubits)
    throw StructuralError("decompose: at most " +
                          std::to_string(tol::max_decompose_qubits) +
                          " qubits supported");
  const Index dc = Index{1} << n;
  const Index de = static_cast<Index>(d_e);
  if (u.rows() != de * dc || u.cols() != de * dc)
    throw StructuralError("decompose: matrix dimension " +
                          std::to_string(u.rows()) + " != d_e * 2^n = " +
                          std::to_string(de * dc));

  const double scale = 1.0 / static_cast<double>(dc);
  const std::uint64_t count = std::uint64_t{1} << (2 * n);
  Decomposition out;
  for (std::uint64_t code = 0; code < count; ++code) {
    PauliIndexVector v = PauliIndexVector::from_code(code, n);
    const SparsePauli sp = sparse(v);
    Matrix comp = Matrix::Zero(de, de);
    for (Index a = 0; a < de; ++a)
      for (Index b = 0; b < de; ++b) {
        cplx acc{0.0};
        for (Index i = 0; i < dc; ++i)
          acc += u(a * dc + i, b * dc + sp.target[i]) * sp.phase[i];
        comp(a, b) = acc * scale;
      }
    if (comp.norm() < tol::component_zero)
      comp.setZero();
    out.emplace(std::move(v), std::move(comp));
  }
  return out;
}

/// sum_v U_v (x) sigma_v.
inline Matrix reconstruct(const Decomposition &parts, std::size_t d_e,
                          std::size_t n) {
  const Index dim = static_cast<Index>(d_e) << n;
  Matrix u = Matrix::Zero(dim, dim);
  for (const auto &[v, comp] : parts) {
    if (comp.isZero(0.0))
      continue;
    u += kron(comp, pauli_string(v));
  }
  return u;
}

/// Normalized Frobenius weight per error rank, indexed 0..n.
struct ErrorRankSpectrum {
  std::vector<double> weights;

  double total() const {
    double s = 0.0;
    for (double w : weights)
      s += w;
    return s;
  }

  std::size_t max_rank_with_weight(double threshold) const {
    std::size_t r = 0;
    for (std::size_t i = 0; i < weights.size(); ++i)
      if (weights[i] > threshold)
        r = i;
    return r;
  }

  csv::Table to_csv() const {
    csv::Table t({"rank", "weight"});
    for (std::size_t r = 0; r < weights.size(); ++r)
      t.add_row({std::to_string(r), csv::real(weights[r])});
    return t;
  }
};

/// Sums squared Frobenius norms of the components by error rank, divided by
/// d_e. For unitary input the weights sum to 1.
inline ErrorRankSpectrum rank_spectrum(const Matrix &u, std::size_t d_e,
                                       std::size_t n) {
  const double defect = unitarity_defect(u);
  if (defect > tol::unitary_input)
    throw ValidationError("rank_spectrum: operator is not unitary (defect " +
                          std::to_string(defect) + ")");
  const Decomposition parts = decompose(u, d_e, n);
  ErrorRankSpectrum s{std::vector<double>(n + 1, 0.0)};
  for (const auto &[v, comp] : parts)
    s.weights[error_rank(v)] += comp.squaredNorm() / static_cast<double>(d_e);
  return s;
}

} // namespace qecdecay::pauli
