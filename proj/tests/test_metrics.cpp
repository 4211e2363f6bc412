/*******************************************************************************
 * Copyright (c) 2026 The qecdecay Authors.                                    *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#include "oracles.hpp"
#include "qecdecay/codes.hpp"
#include "qecdecay/dynamics.hpp"
#include "qecdecay/metrics.hpp"
#include "qecdecay/random.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace qecdecay;
using namespace qecdecay::metrics;

namespace {

struct Scene {
  codes::CodeSpec code;
  dynamics::EnvironmentModel env;
  dynamics::FreeHamiltonian h0;
  Matrix v;
};

Scene make_setup(const std::string &id, std::size_t de, std::uint64_t seed) {
  auto code = codes::build_code(id);
  dynamics::RandomEnvironmentOptions o;
  o.d_e = de;
  o.qubits = code.n();
  o.seed = seed;
  auto env = dynamics::random_environment(o);
  auto h0 = dynamics::FreeHamiltonian::environment_only(env.h_env(), code.n());
  Matrix v = dynamics::build_noncontact(env, code.n());
  return {std::move(code), std::move(env), std::move(h0), std::move(v)};
}

// Environment with an arbitrary (non-diagonal) initial state.
dynamics::EnvironmentModel with_state(const dynamics::EnvironmentModel &env, const Matrix &rho) {
  return dynamics::EnvironmentModel(DensityMatrix(rho), env.h_env(), env.couplings());
}

// <psi| Tr_{e,anc}[(1 (x) R) U (rho_e (x) P_psi (x) |0><0|) U^+ (1 (x) R)^+] |psi>,
// evaluated with dense matrices and explicit traces.
double fidelity_full_trace(const Scene &s, const dynamics::EnvironmentModel &env,
                           const LogicalState &psi, double t) {
  const Index de = static_cast<Index>(env.d_e());
  const Index dc = Index{1} << s.code.n();
  const Index da = s.code.ancilla().dim();
  const Vector target = psi.alpha * s.code.encoder().col(0) + psi.beta * s.code.encoder().col(1);
  Matrix anc = Matrix::Zero(da, da);
  anc(0, 0) = 1.0;
  const Matrix u = oracle::kron(oracle::expm(s.h0.matrix() + s.v, t), Matrix::Identity(da, da));
  const Matrix r = oracle::kron(Matrix::Identity(de, de), codes::recovery_unitary(s.code));
  const Matrix rho0 = oracle::kron(oracle::kron(env.rho0().mat(), Matrix(target * target.adjoint())), anc);
  const Matrix out = r * u * rho0 * u.adjoint() * r.adjoint();
  const Matrix reg = oracle::trace_right(oracle::trace_left(out, de, dc * da), dc, da);
  return std::real(target.dot(reg * target));
}

// Same quantity through the Kraus channel on the register, no ancilla.
double fidelity_channel_route(const Scene &s, const dynamics::EnvironmentModel &env,
                              const LogicalState &psi, double t) {
  const Index de = static_cast<Index>(env.d_e());
  const Index dc = Index{1} << s.code.n();
  const Vector target = psi.alpha * s.code.encoder().col(0) + psi.beta * s.code.encoder().col(1);
  const Matrix u = oracle::expm(s.h0.matrix() + s.v, t);
  const Matrix joint = u * oracle::kron(env.rho0().mat(), Matrix(target * target.adjoint())) * u.adjoint();
  const Matrix reg = codes::recovery_channel(s.code).apply(oracle::trace_left(joint, de, dc));
  return std::real(target.dot(reg * target));
}

} // namespace

TEST(Metrics, FidelityMatchesFullTrace) {
  Rng rng(3);
  for (const char *id : {"identity", "repetition3", "five_qubit"}) {
    const Scene s = make_setup(id, 2, 17);
    const Vector e = random_state(rng, 2);
    Matrix rho = 0.7 * e * e.adjoint() + 0.3 * Matrix::Identity(2, 2) * 0.5;
    const auto env = with_state(s.env, rho);
    const ChannelModel model(s.code, env, s.h0, s.v);
    const std::vector<double> times = s.code.n() == 5 ? std::vector<double>{0.3}
                                                       : std::vector<double>{0.05, 0.3, 1.2};
    for (double t : times) {
      const auto psi = LogicalState::bloch(0.9, 2.1);
      const auto [f, err] = model.at(t).split(psi);
      EXPECT_NEAR(f, fidelity_full_trace(s, env, psi, t), 1e-12) << id << " t=" << t;
      EXPECT_NEAR(f, fidelity_channel_route(s, env, psi, t), 1e-12) << id << " t=" << t;
      EXPECT_NEAR(err, 1.0 - f, 1e-10);
      EXPECT_GE(err, -1e-15);
    }
  }
}

TEST(Metrics, FreeFunctionsAgreeWithModel) {
  const Scene s = make_setup("repetition3", 3, 5);
  const auto psi = LogicalState::bloch(0.4, 0.2);
  const double t = 0.2;
  const auto slice = ChannelModel(s.code, s.env, s.h0, s.v).at(t);
  EXPECT_DOUBLE_EQ(fidelity(s.code, s.env, s.h0, s.v, psi, t), slice.fidelity(psi));
  EXPECT_DOUBLE_EQ(error_functional(s.code, s.env, s.h0, s.v, psi, t), slice.error(psi));
}

TEST(Metrics, ErrorVanishesAtTimeZero) {
  const Scene s = make_setup("five_qubit", 2, 4);
  const auto slice = ChannelModel(s.code, s.env, s.h0, s.v).at(0.0);
  const auto psi = LogicalState::bloch(1.3, 0.4);
  EXPECT_NEAR(slice.fidelity(psi), 1.0, 1e-12);
  EXPECT_LT(slice.error(psi), 1e-14);
}

TEST(Metrics, ModelValidatesDimensions) {
  const Scene s = make_setup("repetition3", 2, 1);
  const auto h0_wrong = dynamics::FreeHamiltonian::zero(2, 2);
  EXPECT_THROW(ChannelModel(s.code, s.env, h0_wrong, s.v), StructuralError);
  EXPECT_THROW(ChannelModel(s.code, s.env, s.h0, Matrix::Zero(4, 4)), StructuralError);
  Matrix bad = s.v;
  bad(0, 1) += 1.0;
  EXPECT_THROW(ChannelModel(s.code, s.env, s.h0, bad), ValidationError);
  EXPECT_EQ(ChannelModel(s.code, s.env, s.h0, s.v).joint_dimension(), 2u * 8u * 4u);
}

TEST(Metrics, CodeErrorGridIsConverged) {
  const Scene s = make_setup("five_qubit", 2, 2);
  const ChannelModel model(s.code, s.env, s.h0, s.v);
  for (double t : {0.01, 0.05}) {
    const auto slice = model.at(t);
    const auto coarse = code_error(slice, {8, 8});
    const auto fine = code_error(slice, {16, 16});
    EXPECT_LT(std::abs(coarse.value - fine.value) / fine.value, 0.02) << t;
    Rng rng(9);
    for (int i = 0; i < 20; ++i) {
      const auto psi = LogicalState::bloch(std::acos(rng.uniform(-1, 1)), rng.uniform(0, 6.28));
      EXPECT_LE(slice.error(psi), fine.value * 1.02);
    }
  }
  EXPECT_THROW(code_error(model.at(0.1), {4, 8}), ValidationError);
}

TEST(Metrics, EnergyScaleEquivariance) {
  // Scaling H0 and V by lambda is the same as scaling t by lambda.
  const Scene s = make_setup("repetition3", 2, 6);
  const double lambda = 2.5;
  const dynamics::FreeHamiltonian h0s(lambda * s.env.h_env(), std::vector<Matrix>(3, Matrix::Zero(2, 2)));
  const ChannelModel base(s.code, s.env, s.h0, s.v);
  const ChannelModel scaled(s.code, s.env, h0s, lambda * s.v);
  const auto psi = LogicalState::bloch(2.0, 1.0);
  for (double t : {0.02, 0.1, 0.4})
    EXPECT_NEAR(scaled.at(t).error(psi), base.at(lambda * t).error(psi), 1e-12);
}

TEST(Metrics, PowerLawFitRecoversSyntheticLaw) {
  std::vector<Sample> s;
  for (int i = 0; i < 30; ++i) {
    const double t = 1e-3 * std::pow(100.0, i / 29.0);
    s.push_back({t, 3.0 * std::pow(t, 4) * (1.0 + 0.05 * t)});
  }
  const auto fit = fit_power_law(s);
  EXPECT_NEAR(fit.exponent, 4.0, 1e-2);
  EXPECT_NEAR(fit.coefficient(), 3.0, 0.03);
  EXPECT_EQ(fit.t_min, s.front().t);
  EXPECT_GE(fit.samples_used, 8u);
  EXPECT_LE(fit.max_residual, 0.01);
}

TEST(Metrics, PowerLawFitWindowStopsAtCurvature) {
  // Pure t^2 at small t, saturating at large t: the window must exclude the
  // saturated tail.
  std::vector<Sample> s;
  for (int i = 0; i < 40; ++i) {
    const double t = 1e-3 * std::pow(1000.0, i / 39.0);
    s.push_back({t, std::sin(t) * std::sin(t)});
  }
  const auto fit = fit_power_law(s);
  EXPECT_NEAR(fit.exponent, 2.0, 0.01);
  EXPECT_LT(fit.t_max, 1.0);
}

TEST(Metrics, PowerLawFitErrors) {
  std::vector<Sample> few;
  for (int i = 1; i <= 7; ++i)
    few.push_back({0.01 * i, 1e-3 * i * i});
  EXPECT_THROW(fit_power_law(few), FitError);
  std::vector<Sample> floor;
  for (int i = 1; i <= 20; ++i)
    floor.push_back({0.01 * i, 1e-15});
  EXPECT_THROW(fit_power_law(floor), FitError);
  std::vector<Sample> noisy;
  Rng rng(1);
  for (int i = 1; i <= 20; ++i)
    noisy.push_back({0.01 * i, std::exp(rng.normal())});
  EXPECT_THROW(fit_power_law(noisy), FitError);
}

TEST(Metrics, ExponentsOfShippedScenarios) {
  auto sweep = [](const Scene &s, double t0, double t1) {
    const ChannelModel m(s.code, s.env, s.h0, s.v);
    std::vector<Sample> out;
    for (int i = 0; i < 40; ++i) {
      const double t = t0 * std::pow(t1 / t0, i / 39.0);
      out.push_back({t, code_error(m.at(t), {8, 8}).value});
    }
    return fit_power_law(out);
  };
  EXPECT_NEAR(sweep(make_setup("identity", 2, 42), 1e-4, 0.1).exponent, 2.0, 0.05);
  EXPECT_NEAR(sweep(make_setup("repetition3", 2, 42), 1e-3, 0.1).exponent, 2.0, 0.1);
  EXPECT_NEAR(sweep(make_setup("five_qubit", 2, 42), 1e-3, 0.1).exponent, 4.0, 0.1);
}

TEST(Metrics, RepetitionCodeUnderAmplitudeFlips) {
  // Only sigma_x couplings: the repetition code's error class.
  auto code = codes::build_repetition_code(3);
  const Matrix zero = Matrix::Zero(1, 1), one = Matrix::Identity(1, 1);
  const dynamics::EnvironmentModel env(DensityMatrix(one), zero,
                                       dynamics::CouplingTable(3, {one, zero, zero}));
  const auto h0 = dynamics::FreeHamiltonian::zero(1, 3);
  const ChannelModel m(code, env, h0, dynamics::build_noncontact(env, 3));
  std::vector<Sample> s;
  for (int i = 0; i < 40; ++i) {
    const double t = 1e-3 * std::pow(300.0, i / 39.0);
    s.push_back({t, code_error(m.at(t), {8, 8}).value});
  }
  EXPECT_NEAR(fit_power_law(s).exponent, 4.0, 0.1);
}

TEST(Metrics, ContactInteractionBreaksTheExponent) {
  // A rank-2 contact term is outside what [[5,1,3]] corrects; the error
  // falls back to t^2 and the non-contact coefficient formula is refused.
  Scene s = make_setup("five_qubit", 2, 3);
  dynamics::Contact c;
  c.terms.push_back({1.0, pauli::PauliIndexVector::from_word("XXIII"), std::nullopt});
  s.v = dynamics::build_interaction(c, s.env, 5);
  const ChannelModel m(s.code, s.env, s.h0, s.v);
  std::vector<Sample> samples;
  for (int i = 0; i < 40; ++i) {
    const double t = 1e-3 * std::pow(100.0, i / 39.0);
    samples.push_back({t, code_error(m.at(t), {8, 8}).value});
  }
  EXPECT_NEAR(fit_power_law(samples).exponent, 2.0, 0.1);
  EXPECT_THROW(leading_coefficient(s.code, s.env, c, LogicalState{}, 1), UnsupportedError);
}

TEST(Metrics, LeadingCoefficientMatchesSmallTimeLimit) {
  // Repetition code with sigma_x couplings only, the others with generic ones.
  Scene rep = make_setup("repetition3", 2, 8);
  dynamics::CouplingTable flips = rep.env.couplings();
  for (auto &row : flips)
    row[1] = row[2] = Matrix::Zero(2, 2);
  rep.env = dynamics::EnvironmentModel(rep.env.rho0(), rep.env.h_env(), flips);
  rep.v = dynamics::build_noncontact(rep.env, 3);

  const std::vector<std::pair<Scene, double>> cases{
      {make_setup("identity", 2, 8), 1e-4}, {rep, 2e-3}, {make_setup("five_qubit", 2, 8), 2e-3}};
  for (const auto &[s, t] : cases) {
    const auto psi = LogicalState::bloch(1.0, 0.7);
    const std::size_t k = s.code.k_corr();
    const double c = leading_coefficient(s.code, s.env, dynamics::NonContact{}, psi, k);
    const ChannelModel m(s.code, s.env, s.h0, s.v);
    // E(t)/t^p = c + O(t); extrapolate linearly from t and t/2.
    const double p = static_cast<double>(2 * k + 2);
    const double r1 = m.at(t).error(psi) / std::pow(t, p);
    const double r2 = m.at(0.5 * t).error(psi) / std::pow(0.5 * t, p);
    EXPECT_NEAR(2.0 * r2 - r1, c, 0.01 * c) << s.code.id();
  }
}

TEST(Metrics, LeadingCoefficientSingleQubitDephasing) {
  // k = 0, V = h (x) sigma_z, psi = |+>: c = Tr(rho_e h^2).
  Rng rng(77);
  const Matrix h = random_hermitian(rng, 3);
  const Vector e = random_state(rng, 3);
  const Matrix rho = 0.6 * e * e.adjoint() + 0.4 * Matrix::Identity(3, 3) / 3.0;
  const Matrix zero = Matrix::Zero(3, 3);
  const dynamics::EnvironmentModel env(DensityMatrix(rho), zero,
                                       dynamics::CouplingTable(1, {zero, zero, h}));
  const auto code = codes::build_identity_code();
  const auto plus = LogicalState::bloch(std::numbers::pi / 2, 0.0);
  EXPECT_NEAR(leading_coefficient(code, env, dynamics::NonContact{}, plus, 0),
              std::real((rho * h * h).trace()), 1e-12);

  const dynamics::EnvironmentModel quiet(DensityMatrix(rho), zero,
                                         dynamics::CouplingTable(1, {zero, zero, zero}));
  EXPECT_EQ(leading_coefficient(code, quiet, dynamics::NonContact{}, plus, 0), 0.0);
}

TEST(Metrics, LeadingCoefficientPreconditions) {
  const Scene s = make_setup("five_qubit", 2, 8);
  EXPECT_THROW(leading_coefficient(s.code, s.env, dynamics::NonContact{}, LogicalState{}, 2),
               ValidationError);
  // A toy one-qubit "code" claiming k = 1 has no rank-2 errors at all.
  const codes::CodeSpec toy("toy", 1, 1, codes::ErrorClass::full_pauli, Matrix::Identity(2, 2), {},
                            {pauli::PauliIndexVector::from_word("I")});
  const Scene one = make_setup("identity", 2, 8);
  EXPECT_EQ(leading_coefficient(toy, one.env, dynamics::NonContact{}, LogicalState{}, 1), 0.0);
}

TEST(Metrics, BoundFormulas) {
  EXPECT_NEAR(error_bound(0.1, 1, 2.0), std::pow(0.2, 4) / 4.0, 1e-18);
  EXPECT_NEAR(error_bound(0.1, 0, 3.0), 0.09, 1e-15);
  EXPECT_EQ(error_bound(0.0, 2, 5.0), 0.0);
  EXPECT_THROW(error_bound(-1.0, 1, 1.0), ValidationError);
  const double x0 = codes::asymptotic_x0();
  EXPECT_NEAR(threshold_time(1.0, x0), 0.0348179, 1e-6);
  EXPECT_NEAR(stabilization_bound(threshold_time(1.0, x0), 1.0, 50, x0), 1.0, 1e-12);
  EXPECT_LT(stabilization_bound(0.5 * threshold_time(1.0, x0), 1.0, 50, x0),
            stabilization_bound(0.5 * threshold_time(1.0, x0), 1.0, 25, x0));
  EXPECT_THROW(threshold_time(0.0, x0), ValidationError);
  EXPECT_THROW(stabilization_bound(0.1, -1.0, 5, x0), ValidationError);
}

TEST(Metrics, BoundReport) {
  // Bounds with ||V|| = 1, k = 1: t^4 / 4.
  const std::vector<Sample> measured{{0.2, 0.5}, {0.1, 1e-6}, {3.0, 50.0}};
  const auto rep = bound_report(measured, 1, 1.0, 1.0, 5, codes::asymptotic_x0());
  ASSERT_EQ(rep.rows.size(), 3u);
  EXPECT_EQ(rep.rows.front().t, 0.1);
  EXPECT_NEAR(rep.rows.front().bound_eq14, 2.5e-5, 1e-18);
  EXPECT_EQ(rep.prefactor, 1.0);
  EXPECT_NEAR(rep.threshold_time, threshold_time(1.0, codes::asymptotic_x0()), 1e-15);
  const auto v = rep.violations(1e-12);
  ASSERT_EQ(v.size(), 1u); // t = 3 has bound > 1 and is not checked
  EXPECT_EQ(v[0].t, 0.2);
}

TEST(Metrics, PeriodicCorrectionReducesDecayRate) {
  const Scene s = make_setup("five_qubit", 2, 42);
  const auto psi = LogicalState::bloch(1.0, 0.7);
  double prev = std::numeric_limits<double>::infinity();
  for (double dt : {0.1, 0.05, 0.025}) {
    const auto with = periodic_correction_decay(s.code, s.env, s.h0, s.v, dt, 12, psi);
    const auto without = periodic_correction_decay(s.code, s.env, s.h0, s.v, dt, 12, psi, {false, false});
    EXPECT_LT(with.rate, without.rate) << dt;
    EXPECT_LT(with.rate, prev) << dt;
    prev = with.rate;
    ASSERT_EQ(with.trace.size(), 12u);
    EXPECT_NEAR(with.trace.back().total_t, 12 * dt, 1e-12);
  }
  const auto reset = periodic_correction_decay(s.code, s.env, s.h0, s.v, 0.1, 10, psi, {true, true});
  EXPECT_GT(reset.rate, 0.0);
  EXPECT_THROW(periodic_correction_decay(s.code, s.env, s.h0, s.v, 0.1, 9, psi), ValidationError);
  EXPECT_THROW(periodic_correction_decay(s.code, s.env, s.h0, s.v, 0.0, 10, psi), ValidationError);
}
