/*******************************************************************************
 * Copyright (c) 2026 The qecdecay Authors.                                    *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#pragma once

#include "qecdecay/pauli.hpp"
#include "qecdecay/random.hpp"
#include "qecdecay/tensor_core.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

/// Hamiltonians and exact joint evolution of environment (x) register.
/// Units: hbar = 1. The environment is always the leftmost tensor factor.
namespace qecdecay::dynamics {

/// Per-qubit coupling operators h[l][mu-1] for mu = x, y, z.
using CouplingTable = std::vector<std::array<Matrix, 3>>;

class EnvironmentModel {
public:
  EnvironmentModel(DensityMatrix rho0, Matrix h_env, CouplingTable couplings)
      : rho0_(std::move(rho0)), h_env_(std::move(h_env)),
        couplings_(std::move(couplings)) {
    const Index de = rho0_.dim();
    if (h_env_.rows() != de || h_env_.cols() != de)
      throw StructuralError("h_env dimension differs from rho0_e");
    if (!is_hermitian(h_env_))
      throw ValidationError("h_env is not Hermitian");
    for (const auto &row : couplings_)
      for (const auto &h : row) {
        if (h.rows() != de || h.cols() != de)
          throw StructuralError("coupling dimension differs from rho0_e");
        if (!is_hermitian(h))
          throw ValidationError("coupling operator is not Hermitian");
        coupling_bound_ = std::max(coupling_bound_, operator_norm(h));
      }
  }

  std::size_t d_e() const { return static_cast<std::size_t>(rho0_.dim()); }
  std::size_t qubits() const { return couplings_.size(); }
  const DensityMatrix &rho0() const { return rho0_; }
  const Matrix &h_env() const { return h_env_; }
  const CouplingTable &couplings() const { return couplings_; }

  /// h for qubit l (1-based) and mu in 1..3.
  const Matrix &coupling(std::size_t l, int mu) const {
    return couplings_.at(l - 1).at(static_cast<std::size_t>(mu - 1));
  }

  /// C = max over l, mu of ||h[l][mu]||.
  double coupling_bound() const { return coupling_bound_; }

private:
  DensityMatrix rho0_;
  Matrix h_env_;
  CouplingTable couplings_;
  double coupling_bound_ = 0.0;
};

/// Diagonal environment state with weights w_i proportional to
/// exp(-i * beta). beta = 0 is maximally mixed.
inline DensityMatrix gibbs_like_state(std::size_t d_e, double beta) {
  Eigen::VectorXd w(static_cast<Index>(d_e));
  for (Index i = 0; i < w.size(); ++i)
    w(i) = std::exp(-static_cast<double>(i) * beta);
  w /= w.sum();
  return DensityMatrix(Matrix(w.cast<cplx>().asDiagonal()));
}

struct RandomEnvironmentOptions {
  std::size_t d_e = 2;
  std::size_t qubits = 1;
  std::uint64_t seed = 42;
  double coupling_bound = 1.0; // every coupling is rescaled to this norm
  double beta = 0.0;
  double h_env_scale = 1.0; // operator norm of the free environment term
};

/// Generic environment: each coupling is (G + G^dagger)/2 for a complex
/// Gaussian G, rescaled so its operator norm equals coupling_bound.
inline EnvironmentModel random_environment(const RandomEnvironmentOptions &opt) {
  if (opt.d_e == 0)
    throw StructuralError("environment dimension must be positive");
  if (!(opt.coupling_bound > 0.0))
    throw ValidationError("coupling bound must be positive");
  Rng rng(opt.seed);
  const Index de = static_cast<Index>(opt.d_e);
  auto scaled = [&](double target) {
    Matrix h = random_hermitian(rng, de);
    const double norm = operator_norm(h);
    if (norm > 0.0)
      h *= target / norm;
    return Matrix(0.5 * (h + h.adjoint()));
  };
  Matrix h_env = opt.h_env_scale > 0.0 ? scaled(opt.h_env_scale)
                                       : Matrix(Matrix::Zero(de, de));
  CouplingTable couplings(opt.qubits);
  for (auto &row : couplings)
    for (auto &h : row)
      h = scaled(opt.coupling_bound);
  return EnvironmentModel(gibbs_like_state(opt.d_e, opt.beta), std::move(h_env),
                          std::move(couplings));
}

/// H0 = h_env (x) 1 + sum_l 1 (x) q_l, no inter-qubit terms.
class FreeHamiltonian {
public:
  FreeHamiltonian(Matrix h_env, std::vector<Matrix> qubit_terms)
      : h_env_(std::move(h_env)), qubit_terms_(std::move(qubit_terms)) {
    if (!is_hermitian(h_env_))
      throw ValidationError("free environment term is not Hermitian");
    for (const auto &q : qubit_terms_)
      if (q.rows() != 2 || q.cols() != 2 || !is_hermitian(q))
        throw ValidationError("single-qubit free term must be 2x2 Hermitian");
  }

  /// Environment-only free part, no qubit drift.
  static FreeHamiltonian environment_only(const Matrix &h_env, std::size_t n) {
    return FreeHamiltonian(h_env,
                           std::vector<Matrix>(n, Matrix::Zero(2, 2)));
  }

  static FreeHamiltonian zero(std::size_t d_e, std::size_t n) {
    const Index de = static_cast<Index>(d_e);
    return environment_only(Matrix::Zero(de, de), n);
  }

  std::size_t d_e() const { return static_cast<std::size_t>(h_env_.rows()); }
  std::size_t qubits() const { return qubit_terms_.size(); }
  const Matrix &h_env() const { return h_env_; }
  const std::vector<Matrix> &qubit_terms() const { return qubit_terms_; }

  bool has_qubit_drift() const {
    for (const auto &q : qubit_terms_)
      if (!q.isZero(0.0))
        return true;
    return false;
  }

  Matrix matrix() const {
    const std::size_t n = qubits();
    const Index dc = Index{1} << n;
    Matrix h = kron(h_env_, Matrix::Identity(dc, dc));
    const Matrix id_e = Matrix::Identity(h_env_.rows(), h_env_.rows());
    for (std::size_t l = 1; l <= n; ++l) {
      const Index left = Index{1} << (l - 1);
      const Index right = Index{1} << (n - l);
      h += kron(id_e, kron(kron(Matrix::Identity(left, left), qubit_terms_[l - 1]),
                           Matrix::Identity(right, right)));
    }
    return h;
  }

private:
  Matrix h_env_;
  std::vector<Matrix> qubit_terms_;
};

// --- interactions ------------------------------------------------------------

/// V = sum_l sum_{mu=1..3} h[l][mu] (x) sigma_mu^l.
inline Matrix build_noncontact(const EnvironmentModel &env, std::size_t n) {
  if (env.qubits() != n)
    throw StructuralError("build_noncontact: couplings sized for " +
                          std::to_string(env.qubits()) + " qubits, not " +
                          std::to_string(n));
  const Index de = static_cast<Index>(env.d_e());
  const Index dim = de << n;
  Matrix v = Matrix::Zero(dim, dim);
  for (std::size_t l = 1; l <= n; ++l)
    for (int mu = 1; mu <= 3; ++mu) {
      const Matrix &h = env.coupling(l, mu);
      if (h.isZero(0.0))
        continue;
      v += kron(h, pauli::embed(static_cast<pauli::Mu>(mu), l, n));
    }
  return v;
}

/// omega * [env_factor (x)] sigma_string.
struct ContactTerm {
  double omega = 0.0;
  pauli::PauliIndexVector string;
  std::optional<Matrix> env_factor;
};

struct NonContact {};
struct Contact {
  std::vector<ContactTerm> terms;
};

/// Either the environment's rank-1 couplings or an explicit list of
/// multi-qubit terms.
using InteractionSpec = std::variant<NonContact, Contact>;

inline bool is_non_contact(const InteractionSpec &spec) {
  return std::holds_alternative<NonContact>(spec);
}

inline Matrix build_interaction(const InteractionSpec &spec,
                                const EnvironmentModel &env, std::size_t n) {
  if (is_non_contact(spec))
    return build_noncontact(env, n);
  const Index de = static_cast<Index>(env.d_e());
  const Index dim = de << n;
  Matrix v = Matrix::Zero(dim, dim);
  for (const auto &term : std::get<Contact>(spec).terms) {
    if (term.string.size() != n)
      throw StructuralError("contact term length differs from register size");
    const Matrix e = term.env_factor.value_or(Matrix::Identity(de, de));
    if (e.rows() != de || !is_hermitian(e))
      throw ValidationError("contact environment factor must be Hermitian d_e x d_e");
    v += term.omega * kron(e, pauli::pauli_string(term.string));
  }
  return v;
}

/// sum_l omega_l sigma_x^l.
inline Matrix build_intro_h1(const std::vector<double> &omegas) {
  const std::size_t n = omegas.size();
  if (n < 1)
    throw ValidationError("build_intro_h1 needs at least one qubit");
  const Index dim = Index{1} << n;
  Matrix h = Matrix::Zero(dim, dim);
  for (std::size_t l = 1; l <= n; ++l)
    h += omegas[l - 1] * pauli::embed(1, l, n);
  return h;
}

/// Square table of pair frequencies; entry (k, l) with k != l contributes
/// omega_kl sigma_x^k sigma_x^l. The diagonal is ignored.
using PairTable = std::vector<std::vector<double>>;

inline std::size_t pair_table_size(const PairTable &w) {
  for (const auto &row : w)
    if (row.size() != w.size())
      throw StructuralError("pair frequency table must be square");
  return w.size();
}

inline Matrix build_intro_h2(const PairTable &omega_pairs) {
  const std::size_t n = pair_table_size(omega_pairs);
  if (n < 2)
    throw ValidationError("build_intro_h2 needs at least two qubits");
  const Index dim = Index{1} << n;
  Matrix h = Matrix::Zero(dim, dim);
  for (std::size_t k = 1; k <= n; ++k)
    for (std::size_t l = 1; l <= n; ++l)
      if (k != l && omega_pairs[k - 1][l - 1] != 0.0)
        h += omega_pairs[k - 1][l - 1] * pauli::embed(1, k, n) *
             pauli::embed(1, l, n);
  return h;
}

/// prod_l [cos(omega_l t) + i sigma_x^l sin(omega_l t)], i.e. exp(+i H1 t).
inline Matrix closed_form_u1(const std::vector<double> &omegas, double t) {
  const std::size_t n = omegas.size();
  const Index dim = Index{1} << n;
  Matrix u = Matrix::Identity(dim, dim);
  for (std::size_t l = 1; l <= n; ++l) {
    const double a = omegas[l - 1] * t;
    u = u * (std::cos(a) * Matrix::Identity(dim, dim) +
             kI * std::sin(a) * pauli::embed(1, l, n));
  }
  return u;
}

/// prod_{k != l} [cos(omega_kl t) + i sigma_x^k sigma_x^l sin(omega_kl t)].
inline Matrix closed_form_u2(const PairTable &omega_pairs, double t) {
  const std::size_t n = pair_table_size(omega_pairs);
  const Index dim = Index{1} << n;
  Matrix u = Matrix::Identity(dim, dim);
  for (std::size_t k = 1; k <= n; ++k)
    for (std::size_t l = 1; l <= n; ++l) {
      if (k == l || omega_pairs[k - 1][l - 1] == 0.0)
        continue;
      const double a = omega_pairs[k - 1][l - 1] * t;
      u = u * (std::cos(a) * Matrix::Identity(dim, dim) +
               kI * std::sin(a) * pauli::embed(1, k, n) * pauli::embed(1, l, n));
    }
  return u;
}

// --- evolution ---------------------------------------------------------------

inline void check_dims(const FreeHamiltonian &h0, const Matrix &v) {
  const Index dim = static_cast<Index>(h0.d_e()) << h0.qubits();
  if (v.rows() != dim || v.cols() != dim)
    throw StructuralError("interaction dimension " + std::to_string(v.rows()) +
                          " differs from free Hamiltonian dimension " +
                          std::to_string(dim));
}

/// V(t) = exp(i H0 t) V exp(-i H0 t).
inline Matrix interaction_picture_v(const FreeHamiltonian &h0, const Matrix &v,
                                    double t) {
  check_dims(h0, v);
  const Matrix u0 = expm_hermitian(h0.matrix(), t);
  const Matrix out = u0.adjoint() * v * u0;
  return 0.5 * (out + out.adjoint());
}

/// Exact Schroedinger-picture U(t) = exp(-i (H0 + V) t).
inline Matrix evolve(const FreeHamiltonian &h0, const Matrix &v, double t) {
  check_dims(h0, v);
  return expm_hermitian(h0.matrix() + v, t);
}

/// Interaction-picture propagator exp(i H0 t) exp(-i (H0 + V) t), which
/// solves i dU/dt = V(t) U.
inline Matrix interaction_picture_evolution(const FreeHamiltonian &h0,
                                            const Matrix &v, double t) {
  check_dims(h0, v);
  const Matrix h0m = h0.matrix();
  return expm_hermitian(h0m, -t) * expm_hermitian(h0m + v, t);
}

namespace detail {

// Time-ordered partial sum on a uniform grid. Level l is the cumulative
// trapezoid integral of V(s) W_{l-1}(s); all levels share the node values.
inline Matrix dyson_on_grid(const std::function<Matrix(double)> &v_of_t,
                            double t, int order, int steps) {
  const double h = t / steps;
  std::vector<Matrix> vs;
  vs.reserve(static_cast<std::size_t>(steps) + 1);
  for (int j = 0; j <= steps; ++j)
    vs.push_back(v_of_t(j * h));
  const Index dim = vs.front().rows();

  std::vector<Matrix> prev(static_cast<std::size_t>(steps) + 1,
                           Matrix::Identity(dim, dim));
  Matrix total = Matrix::Identity(dim, dim);
  for (int l = 1; l <= order; ++l) {
    std::vector<Matrix> cur(prev.size(), Matrix::Zero(dim, dim));
    Matrix f_prev = vs[0] * prev[0];
    for (std::size_t j = 0; j + 1 < vs.size(); ++j) {
      Matrix f_next = vs[j + 1] * prev[j + 1];
      cur[j + 1] = cur[j] - kI * (0.5 * h) * (f_prev + f_next);
      f_prev = std::move(f_next);
    }
    total += cur.back();
    prev = std::move(cur);
  }
  return total;
}

} // namespace detail

/// sum_{l=0}^{order} (1/l!) T(-i int_0^t V(s) ds)^l, by nested trapezoid
/// quadrature at `steps` and 2*steps intervals combined with one Richardson
/// step. Deterministic for fixed `steps`.
inline Matrix dyson_truncated(const std::function<Matrix(double)> &v_of_t,
                              double t, int order, int steps) {
  if (order < 0)
    throw ValidationError("dyson_truncated: order must be non-negative");
  if (steps < 16)
    throw ValidationError("dyson_truncated: need at least 16 quadrature steps");
  if (order == 0 || t == 0.0) {
    const Index dim = v_of_t(0.0).rows();
    return Matrix::Identity(dim, dim);
  }
  const Matrix coarse = detail::dyson_on_grid(v_of_t, t, order, steps);
  const Matrix fine = detail::dyson_on_grid(v_of_t, t, order, 2 * steps);
  return (4.0 * fine - coarse) / 3.0;
}

/// rho_t = Tr_e[U(t) (rho0_e (x) rho0) U(t)^dagger].
inline DensityMatrix decoherence_chain(const DensityMatrix &rho0,
                                       const EnvironmentModel &env,
                                       const FreeHamiltonian &h0,
                                       const Matrix &v, double t) {
  const std::size_t n = h0.qubits();
  if (rho0.dim() != (Index{1} << n))
    throw StructuralError("decoherence_chain: register state dimension mismatch");
  if (env.d_e() != h0.d_e())
    throw StructuralError("decoherence_chain: environment dimension mismatch");
  const Matrix u = evolve(h0, v, t);
  const Matrix d0 = kron(env.rho0().mat(), rho0.mat());
  const Matrix dt = u * d0 * u.adjoint();
  Dims dims{env.d_e()};
  std::vector<std::size_t> keep;
  for (std::size_t q = 0; q < n; ++q) {
    dims.push_back(2);
    keep.push_back(q + 1);
  }
  Matrix reduced = partial_trace(dt, dims, keep);
  reduced = 0.5 * (reduced + reduced.adjoint()).eval();
  return DensityMatrix(std::move(reduced), Dims(n, 2));
}

} // namespace qecdecay::dynamics
