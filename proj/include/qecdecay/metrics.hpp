/*******************************************************************************
 * Copyright (c) 2026 The qecdecay Authors.                                    *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#pragma once

#include "qecdecay/codes.hpp"
#include "qecdecay/dynamics.hpp"
#include "qecdecay/tensor_core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace qecdecay::metrics {

/// Logical input alpha|0> + beta|1>.
struct LogicalState {
  cplx alpha{1.0};
  cplx beta{0.0};

  /// cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>.
  static LogicalState bloch(double theta, double phi) {
    return {cplx{std::cos(0.5 * theta)},
            std::polar(std::sin(0.5 * theta), phi)};
  }
};

/// Environment (x) register (x) ancilla vectors for both logical basis
/// inputs at one instant, after evolution and unitary recovery:
///   y[i][a] = (1 (x) R) (U(t) |e_i>|a_bar> (x) |A>)
/// where |e_i> are the eigenvectors of rho0_e with weights w_i.
class ErrorSlice {
public:
  ErrorSlice(std::vector<double> weights, std::vector<std::array<Vector, 2>> y,
             Matrix encoder, Index d_e, Index d_c, Index d_a)
      : weights_(std::move(weights)), y_(std::move(y)),
        encoder_(std::move(encoder)), de_(d_e), dc_(d_c), da_(d_a) {}

  /// F_psi = sum_i w_i || P_psi R U |e_i psi A> ||^2.
  double fidelity(const LogicalState &psi) const { return split(psi).first; }

  /// E_psi from the (1 - P_psi) projector directly. Numerically preferable
  /// to 1 - F when E is tiny.
  double error(const LogicalState &psi) const { return split(psi).second; }

  /// (F_psi, E_psi).
  std::pair<double, double> split(const LogicalState &psi) const {
    const Vector target = psi.alpha * encoder_.col(0) + psi.beta * encoder_.col(1);
    double fid = 0.0, err = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      const Vector y = psi.alpha * y_[i][0] + psi.beta * y_[i][1];
      double f = 0.0, e = 0.0;
      for (Index ae = 0; ae < de_; ++ae)
        for (Index anc = 0; anc < da_; ++anc) {
          const Eigen::Map<const Vector, 0, Eigen::InnerStride<>> seg(
              y.data() + ae * dc_ * da_ + anc, dc_, Eigen::InnerStride<>(da_));
          const cplx ov = target.dot(seg);
          f += std::norm(ov);
          e += (seg - ov * target).squaredNorm();
        }
      fid += weights_[i] * f;
      err += weights_[i] * e;
    }
    check_range(fid, "fidelity");
    check_range(err, "error functional");
    return {fid, err};
  }

private:
  static void check_range(double v, const char *what) {
    if (v < -tol::fidelity_range || v > 1.0 + tol::fidelity_range)
      throw ValidationError(std::string(what) + " out of [0,1]: " +
                            std::to_string(v));
  }

  std::vector<double> weights_;
  std::vector<std::array<Vector, 2>> y_;
  Matrix encoder_;
  Index de_, dc_, da_;
};

/// Code, environment, free Hamiltonian and interaction bundled for repeated
/// evaluation. The spectral decomposition of H0 + V is computed once, so
/// sweeps over t cost one matrix product per sample.
class ChannelModel {
public:
  ChannelModel(codes::CodeSpec code, dynamics::EnvironmentModel env,
               dynamics::FreeHamiltonian h0, Matrix v)
      : code_(std::move(code)), env_(std::move(env)), h0_(std::move(h0)),
        v_(std::move(v)) {
    if (h0_.qubits() != code_.n())
      throw StructuralError("free Hamiltonian register size differs from code length");
    if (h0_.d_e() != env_.d_e())
      throw StructuralError("free Hamiltonian environment dimension differs");
    dynamics::check_dims(h0_, v_);
    const Matrix h = h0_.matrix() + v_;
    if (hermiticity_defect(h) > tol::hermitian_input)
      throw ValidationError("H0 + V is not Hermitian");
    eig_.compute(h);

    const Eigen::SelfAdjointEigenSolver<Matrix> rho(env_.rho0().mat());
    for (Index i = 0; i < rho.eigenvalues().size(); ++i)
      if (rho.eigenvalues()(i) > 0.0) {
        weights_.push_back(rho.eigenvalues()(i));
        env_states_.push_back(rho.eigenvectors().col(i));
      }

    // R restricted to ancilla input |0...0>: column c maps |c>|0>.
    const Matrix r = codes::recovery_unitary(code_);
    const Index dc = Index{1} << code_.n();
    const Index da = code_.ancilla().dim();
    r_first_.resize(dc * da, dc);
    for (Index c = 0; c < dc; ++c)
      r_first_.col(c) = r.col(c * da);
  }

  const codes::CodeSpec &code() const { return code_; }
  const dynamics::EnvironmentModel &env() const { return env_; }
  const dynamics::FreeHamiltonian &h0() const { return h0_; }
  const Matrix &v() const { return v_; }

  /// exp(-i (H0 + V) t).
  Matrix propagator(double t) const {
    const Eigen::VectorXd &lambda = eig_.eigenvalues();
    Vector phases(lambda.size());
    for (Index i = 0; i < lambda.size(); ++i)
      phases(i) = std::exp(-kI * (lambda(i) * t));
    const Matrix &q = eig_.eigenvectors();
    return q * phases.asDiagonal() * q.adjoint();
  }

  ErrorSlice at(double t) const {
    const Matrix u = propagator(t);
    const Index de = static_cast<Index>(env_.d_e());
    const Index dc = Index{1} << code_.n();
    const Index da = code_.ancilla().dim();
    std::vector<std::array<Vector, 2>> y(weights_.size());
    for (std::size_t i = 0; i < weights_.size(); ++i)
      for (int a = 0; a < 2; ++a) {
        const Vector chi = u * kron(env_states_[i], Vector(code_.encoder().col(a)));
        Vector out(de * dc * da);
        for (Index ae = 0; ae < de; ++ae)
          out.segment(ae * dc * da, dc * da) = r_first_ * chi.segment(ae * dc, dc);
        y[i][static_cast<std::size_t>(a)] = std::move(out);
      }
    return ErrorSlice(weights_, std::move(y), code_.encoder(), de, dc, da);
  }

  /// d_e * 2^n * 2^ancillas.
  std::size_t joint_dimension() const {
    return env_.d_e() * (std::size_t{1} << code_.n()) * code_.ancilla().dim();
  }

private:
  codes::CodeSpec code_;
  dynamics::EnvironmentModel env_;
  dynamics::FreeHamiltonian h0_;
  Matrix v_;
  Eigen::SelfAdjointEigenSolver<Matrix> eig_;
  std::vector<double> weights_;
  std::vector<Vector> env_states_;
  Matrix r_first_;
};

/// F_psi(t) = Tr[R U (P_psi (x) rho0_e (x) P_A) U^dagger R^dagger P_psi].
inline double fidelity(const codes::CodeSpec &code,
                       const dynamics::EnvironmentModel &env,
                       const dynamics::FreeHamiltonian &h0, const Matrix &v,
                       const LogicalState &psi, double t) {
  return ChannelModel(code, env, h0, v).at(t).fidelity(psi);
}

/// E_psi(t), the same trace with the last projector replaced by 1 - P_psi.
inline double error_functional(const codes::CodeSpec &code,
                               const dynamics::EnvironmentModel &env,
                               const dynamics::FreeHamiltonian &h0,
                               const Matrix &v, const LogicalState &psi,
                               double t) {
  return ChannelModel(code, env, h0, v).at(t).error(psi);
}

struct StateGrid {
  std::size_t n_theta = 8;
  std::size_t n_phi = 8;
};

struct SupResult {
  double value = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};

/// sup over the logical Bloch sphere of E_psi, from a (theta, phi) grid plus
/// one 3x-finer local pass around the grid maximum.
inline SupResult code_error(const ErrorSlice &slice, const StateGrid &grid) {
  if (grid.n_theta < 8 || grid.n_phi < 8)
    throw ValidationError("code_error: state grid must be at least 8 x 8");
  const double pi = std::numbers::pi;
  const double d_theta = pi / static_cast<double>(grid.n_theta - 1);
  const double d_phi = 2.0 * pi / static_cast<double>(grid.n_phi);
  SupResult best{-1.0, 0.0, 0.0};
  auto consider = [&](double theta, double phi) {
    const double e = slice.error(LogicalState::bloch(theta, phi));
    if (e > best.value)
      best = {e, theta, phi};
  };
  for (std::size_t i = 0; i < grid.n_theta; ++i)
    for (std::size_t j = 0; j < grid.n_phi; ++j)
      consider(d_theta * static_cast<double>(i), d_phi * static_cast<double>(j));

  const SupResult coarse = best;
  for (int i = -3; i <= 3; ++i)
    for (int j = -3; j <= 3; ++j) {
      if (i == 0 && j == 0)
        continue;
      const double theta = coarse.theta + i * d_theta / 3.0;
      if (theta < 0.0 || theta > pi)
        continue;
      double phi = std::fmod(coarse.phi + j * d_phi / 3.0, 2.0 * pi);
      if (phi < 0.0)
        phi += 2.0 * pi;
      consider(theta, phi);
    }
  best.value = std::max(best.value, 0.0);
  return best;
}

inline SupResult code_error(const codes::CodeSpec &code,
                            const dynamics::EnvironmentModel &env,
                            const dynamics::FreeHamiltonian &h0,
                            const Matrix &v, double t, const StateGrid &grid) {
  return code_error(ChannelModel(code, env, h0, v).at(t), grid);
}

// --- short-time power laws -------------------------------------------------------

struct Sample {
  double t = 0.0;
  double value = 0.0;
};

/// Samples of a fidelity or error functional against time, plus provenance.
struct FidelityCurve {
  std::vector<Sample> samples;
  std::string code_id;
  std::string interaction_id;
  std::uint64_t seed = 0;
};

struct PowerLawFit {
  double exponent = 0.0;
  double log_coefficient = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  double max_residual = 0.0;
  std::size_t samples_used = 0;

  double coefficient() const { return std::exp(log_coefficient); }
};

namespace detail {

struct LineFit {
  double slope, intercept, max_residual;
};

inline LineFit fit_line(const std::vector<double> &x, const std::vector<double> &y,
                        std::size_t begin, std::size_t end) {
  const double m = static_cast<double>(end - begin);
  double sx = 0, sy = 0;
  for (std::size_t i = begin; i < end; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = begin; i < end; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double worst = 0;
  for (std::size_t i = begin; i < end; ++i)
    worst = std::max(worst, std::abs(y[i] - (intercept + slope * x[i])));
  return {slope, intercept, worst};
}

} // namespace detail

/// Least-squares line through (log t, log E) on the largest window of
/// consecutive low-t samples whose max residual stays within
/// tol::fit_residual. Samples with E <= tol::error_floor or t <= 0 are
/// discarded as numerically zero.
inline PowerLawFit fit_power_law(std::vector<Sample> samples) {
  std::sort(samples.begin(), samples.end(),
            [](const Sample &a, const Sample &b) { return a.t < b.t; });
  std::vector<double> x, y, ts;
  for (const auto &s : samples)
    if (s.t > 0.0 && s.value > tol::error_floor) {
      x.push_back(std::log(s.t));
      y.push_back(std::log(s.value));
      ts.push_back(s.t);
    }
  const std::size_t min_n = tol::fit_min_samples;
  if (x.size() < min_n)
    throw FitError("power-law fit needs at least " + std::to_string(min_n) +
                   " samples with E > " + csv::real(tol::error_floor) + ", got " +
                   std::to_string(x.size()) +
                   "; extend the time range to larger t");

  std::size_t best_end = 0;
  detail::LineFit best{};
  for (std::size_t end = min_n; end <= x.size(); ++end) {
    const detail::LineFit f = detail::fit_line(x, y, 0, end);
    if (f.max_residual <= tol::fit_residual) {
      best_end = end;
      best = f;
    }
  }
  if (best_end == 0)
    throw FitError("no low-t window of " + std::to_string(min_n) +
                   " samples follows a power law within residual " +
                   csv::real(tol::fit_residual) +
                   "; sample more densely at small t");
  return {best.slope, best.intercept, ts.front(), ts[best_end - 1],
          best.max_residual, best_end};
}

inline PowerLawFit fit_power_law(const FidelityCurve &error_curve) {
  return fit_power_law(error_curve.samples);
}

/// c in E_psi(t) = c t^(2k+2) + O(t^(2k+3)) for a non-contact interaction:
///   c = sum_i w_i ||(1 - P_psi) R (phi_i (x) |A>)||^2 / (k+1)!^2,
///   phi_i = sum over ordered (k+1)-tuples of distinct qubits l_1..l_{k+1}
///           of V^{l_1} ... V^{l_{k+1}} |e_i>|psi>,
/// with V^l = sum_mu h^l_mu (x) sigma^l_mu. Describes E_psi only when every
/// error of rank <= k that V produces lies in the code's error class.
inline double leading_coefficient(const codes::CodeSpec &code,
                                  const dynamics::EnvironmentModel &env,
                                  const dynamics::InteractionSpec &interaction,
                                  const LogicalState &psi, std::size_t k) {
  if (!dynamics::is_non_contact(interaction))
    throw UnsupportedError(
        "leading_coefficient is defined for non-contact interactions only");
  if (k != code.k_corr())
    throw ValidationError("leading_coefficient: k must equal the code's k_corr");
  const std::size_t n = code.n();
  if (env.qubits() != n)
    throw StructuralError("environment couplings sized for a different register");
  const Index de = static_cast<Index>(env.d_e());

  std::vector<Matrix> vl;
  for (std::size_t l = 1; l <= n; ++l) {
    Matrix m = Matrix::Zero(de << n, de << n);
    for (int mu = 1; mu <= 3; ++mu)
      m += kron(env.coupling(l, mu), pauli::embed(static_cast<pauli::Mu>(mu), l, n));
    vl.push_back(std::move(m));
  }
  if (k + 1 > n)
    return 0.0;

  // Sum over ordered tuples of distinct sites; applied right to left.
  std::function<Vector(const Vector &, std::size_t, std::uint32_t)> chains =
      [&](const Vector &x, std::size_t depth, std::uint32_t used) -> Vector {
    if (depth == 0)
      return x;
    Vector acc = Vector::Zero(x.size());
    for (std::size_t l = 0; l < n; ++l)
      if (!(used & (1u << l)))
        acc += chains(vl[l] * x, depth - 1, used | (1u << l));
    return acc;
  };

  const StateVector encoded = codes::encode_logical(code, psi.alpha, psi.beta);
  const Vector &target = encoded.amplitudes();
  const Eigen::SelfAdjointEigenSolver<Matrix> rho(env.rho0().mat());
  const Matrix r = codes::recovery_unitary(code);
  const Index dc = Index{1} << n;
  const Index da = code.ancilla().dim();
  double total = 0.0;
  for (Index i = 0; i < rho.eigenvalues().size(); ++i) {
    const double w = rho.eigenvalues()(i);
    if (w <= 0.0)
      continue;
    const Vector phi =
        chains(kron(Vector(rho.eigenvectors().col(i)), target), k + 1, 0u);
    for (Index ae = 0; ae < de; ++ae) {
      const Vector out =
          r * kron(Vector(phi.segment(ae * dc, dc)), code.ancilla().initial_state());
      for (Index anc = 0; anc < da; ++anc) {
        const Eigen::Map<const Vector, 0, Eigen::InnerStride<>> seg(
            out.data() + anc, dc, Eigen::InnerStride<>(da));
        const cplx ov = target.dot(seg);
        total += w * (seg - ov * target).squaredNorm();
      }
    }
  }
  double fact = 1.0;
  for (std::size_t j = 2; j <= k + 1; ++j)
    fact *= static_cast<double>(j);
  return total / (fact * fact);
}

// --- bounds ------------------------------------------------------------------

/// t^(2k+2) / (k+1)!^2 * ||V||^(2k+2).
inline double error_bound(double t, std::size_t k, double v_norm) {
  if (t < 0.0)
    throw ValidationError("error_bound: t must be non-negative");
  double fact = 1.0;
  for (std::size_t j = 2; j <= k + 1; ++j)
    fact *= static_cast<double>(j);
  const double p = static_cast<double>(2 * k + 2);
  return std::pow(t * v_norm, p) / (fact * fact);
}

/// [t C e / x0]^(2 x0 n), with the O(1) prefactor set to 1.
inline double stabilization_bound(double t, double coupling_bound, std::size_t n,
                                  double x0) {
  if (!(coupling_bound > 0.0))
    throw ValidationError("stabilization_bound: C must be positive");
  return std::pow(t * coupling_bound * std::numbers::e / x0,
                  2.0 * x0 * static_cast<double>(n));
}

/// Below this time the stabilization bound shrinks exponentially in n.
inline double threshold_time(double coupling_bound, double x0) {
  if (!(coupling_bound > 0.0))
    throw ValidationError("threshold_time: C must be positive");
  return x0 / (coupling_bound * std::numbers::e);
}

struct BoundRow {
  double t = 0.0;
  double measured_e = 0.0;
  double bound_eq14 = 0.0;
  double stab_bound_eq15 = 0.0;
};

struct BoundReport {
  std::vector<BoundRow> rows;
  double threshold_time = 0.0;
  double prefactor = 1.0; // O(1) constant of the stabilization estimate

  /// Rows where the measured error exceeds the bound by more than `slack`,
  /// considering only rows whose bound is at most 1.
  std::vector<BoundRow> violations(double slack) const {
    std::vector<BoundRow> out;
    for (const auto &r : rows)
      if (r.bound_eq14 <= 1.0 && r.measured_e > r.bound_eq14 + slack)
        out.push_back(r);
    return out;
  }
};

inline BoundReport bound_report(std::vector<Sample> measured, std::size_t k,
                                double v_norm, double coupling_bound,
                                std::size_t n, double x0) {
  std::sort(measured.begin(), measured.end(),
            [](const Sample &a, const Sample &b) { return a.t < b.t; });
  BoundReport rep;
  rep.threshold_time = threshold_time(coupling_bound, x0);
  for (const auto &s : measured)
    rep.rows.push_back({s.t, s.value, error_bound(s.t, k, v_norm),
                        stabilization_bound(s.t, coupling_bound, n, x0)});
  return rep;
}

// --- periodic correction ---------------------------------------------------------

struct PeriodicOptions {
  bool recover = true;
  bool reset_environment = false;
};

struct PeriodicSample {
  std::size_t cycle = 0;
  double total_t = 0.0;
  double fidelity = 1.0;
};

struct PeriodicResult {
  double rate = 0.0;
  std::vector<PeriodicSample> trace;
};

/// Repeats [evolve dt, recover with a fresh ancilla] on the joint
/// environment (x) register state and fits log F against total time. The
/// decay rate is minus the least-squares slope.
inline PeriodicResult periodic_correction_decay(
    const codes::CodeSpec &code, const dynamics::EnvironmentModel &env,
    const dynamics::FreeHamiltonian &h0, const Matrix &v, double dt,
    std::size_t cycles, const LogicalState &psi, const PeriodicOptions &opt = {}) {
  if (cycles < 10)
    throw ValidationError("periodic_correction_decay needs at least 10 cycles");
  if (!(dt > 0.0))
    throw ValidationError("cycle period must be positive");
  if (h0.qubits() != code.n() || h0.d_e() != env.d_e())
    throw StructuralError("periodic_correction_decay: dimension mismatch");
  const std::size_t n = code.n();
  const Index de = static_cast<Index>(env.d_e());
  const StateVector encoded = codes::encode_logical(code, psi.alpha, psi.beta);
  const Matrix u = dynamics::evolve(h0, v, dt);
  const codes::RecoveryChannel channel(code);
  std::vector<Matrix> big_kraus;
  for (const auto &k : channel.kraus())
    big_kraus.push_back(kron(Matrix::Identity(de, de), k));

  Dims dims{env.d_e()};
  std::vector<std::size_t> keep;
  for (std::size_t q = 0; q < n; ++q) {
    dims.push_back(2);
    keep.push_back(q + 1);
  }

  Matrix joint = kron(env.rho0().mat(), encoded.projector());
  PeriodicResult res;
  std::vector<double> xs, ys;
  for (std::size_t c = 1; c <= cycles; ++c) {
    joint = u * joint * u.adjoint();
    if (opt.recover) {
      Matrix next = Matrix::Zero(joint.rows(), joint.cols());
      for (const auto &k : big_kraus)
        next += k * joint * k.adjoint();
      joint = std::move(next);
    }
    const Matrix reg = partial_trace(joint, dims, keep);
    if (opt.reset_environment)
      joint = kron(env.rho0().mat(), reg);
    const double f = std::real(encoded.amplitudes().dot(reg * encoded.amplitudes()));
    if (f < -tol::fidelity_range || f > 1.0 + tol::fidelity_range)
      throw ValidationError("periodic fidelity out of range");
    const double total = dt * static_cast<double>(c);
    res.trace.push_back({c, total, f});
    xs.push_back(total);
    ys.push_back(std::log(std::max(f, 1e-300)));
  }
  const detail::LineFit line = detail::fit_line(xs, ys, 0, xs.size());
  res.rate = -line.slope;
  return res;
}

} // namespace qecdecay::metrics
