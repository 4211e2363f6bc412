/*******************************************************************************
 * Copyright (c) 2026 The qecdecay Authors.                                    *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#pragma once

#include <cstddef>

/// Every numerical tolerance used by the library lives here.
namespace qecdecay::tol {

// Structural checks on operators and states.
inline constexpr double hermitian = 1e-12;       // builders, density matrices
inline constexpr double hermitian_input = 1e-10; // expm_hermitian precondition
inline constexpr double trace = 1e-12;
inline constexpr double eigenvalue_floor = -1e-10;
inline constexpr double state_norm = 1e-12;
inline constexpr double logical_norm = 1e-10;
inline constexpr double unitary = 1e-10;
inline constexpr double unitary_input = 1e-8; // rank_spectrum precondition
inline constexpr double orthonormal = 1e-12;

// Pauli decomposition.
inline constexpr double component_zero = 1e-14; // Frobenius norm reported as 0
inline constexpr double reconstruction = 1e-10;
inline constexpr double weight_sum = 1e-10;

// Fidelity range and fits.
inline constexpr double fidelity_range = 1e-10;
inline constexpr double error_floor = 1e-13; // E below this is numerically 0
inline constexpr double fit_residual = 0.01; // max |log E - line| in a window
inline constexpr std::size_t fit_min_samples = 8;

inline constexpr std::size_t max_decompose_qubits = 7;
inline constexpr std::size_t dimension_cap = 4096;

} // namespace qecdecay::tol
