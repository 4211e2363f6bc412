/*******************************************************************************
 * Copyright (c) 2026 The qecdecay Authors.                                    *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#pragma once

#include "qecdecay/csv.hpp"
#include "qecdecay/pauli.hpp"
#include "qecdecay/tensor_core.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qecdecay::codes {

enum class ErrorClass { amplitude_only, full_pauli };

inline std::string to_string(ErrorClass c) {
  return c == ErrorClass::amplitude_only ? "amplitude_only" : "full_pauli";
}

/// Ancilla register for unitary recovery, prepared in |0...0>.
struct AncillaSpec {
  std::size_t qubits = 0;

  Index dim() const { return Index{1} << qubits; }
  Vector initial_state() const { return basis_vector(dim(), 0); }
};

/// A stabilizer-style code: syndrome bit i is the (-1)-outcome of
/// generator i, and every syndrome value maps to one Pauli correction.
class CodeSpec {
public:
  CodeSpec(std::string id, std::size_t n, std::size_t k_corr,
           ErrorClass error_class, Matrix encoder,
           std::vector<pauli::PauliIndexVector> stabilizers,
           std::vector<pauli::PauliIndexVector> corrections)
      : id_(std::move(id)), n_(n), k_corr_(k_corr), class_(error_class),
        encoder_(std::move(encoder)), stabilizers_(std::move(stabilizers)),
        corrections_(std::move(corrections)) {
    const Index dc = Index{1} << n_;
    if (encoder_.rows() != dc || encoder_.cols() != 2)
      throw StructuralError("encoder must be a 2^n x 2 isometry");
    const double gram = max_abs(encoder_.adjoint() * encoder_ -
                                Matrix::Identity(2, 2));
    if (gram > tol::orthonormal)
      throw ValidationError("encoder columns are not orthonormal");
    for (const auto &g : stabilizers_)
      if (g.size() != n_)
        throw StructuralError("stabilizer length differs from n");
    if (corrections_.size() != (std::size_t{1} << stabilizers_.size()))
      throw StructuralError("syndrome table needs one entry per syndrome value");
    for (const auto &c : corrections_)
      if (c.size() != n_)
        throw StructuralError("correction length differs from n");

    const Matrix eye = Matrix::Identity(dc, dc);
    std::vector<Matrix> gens;
    for (const auto &g : stabilizers_)
      gens.push_back(pauli::pauli_string(g));
    for (std::size_t s = 0; s < corrections_.size(); ++s) {
      Matrix p = eye;
      for (std::size_t i = 0; i < gens.size(); ++i) {
        const double sign = ((s >> i) & 1u) ? -1.0 : 1.0;
        p = p * (0.5 * (eye + sign * gens[i]));
      }
      projectors_.push_back(p);
      kraus_.push_back(pauli::pauli_string(corrections_[s]) * p);
    }
  }

  const std::string &id() const { return id_; }
  std::size_t n() const { return n_; }
  std::size_t k_corr() const { return k_corr_; }
  ErrorClass error_class() const { return class_; }
  const Matrix &encoder() const { return encoder_; }
  const std::vector<pauli::PauliIndexVector> &stabilizers() const {
    return stabilizers_;
  }
  AncillaSpec ancilla() const { return {stabilizers_.size()}; }
  std::size_t ancilla_count() const { return stabilizers_.size(); }

  std::size_t syndrome_count() const { return corrections_.size(); }
  const pauli::PauliIndexVector &correction(std::size_t syndrome) const {
    return corrections_.at(syndrome);
  }
  /// Projector onto the joint eigenspace with the given syndrome bits.
  const Matrix &syndrome_projector(std::size_t syndrome) const {
    return projectors_.at(syndrome);
  }
  /// correction(s) * projector(s), one per syndrome value.
  const std::vector<Matrix> &kraus() const { return kraus_; }

  /// Syndrome bits of a Pauli error: bit i set iff it anticommutes with
  /// generator i.
  std::size_t syndrome_of(const pauli::PauliIndexVector &e) const {
    std::size_t s = 0;
    for (std::size_t i = 0; i < stabilizers_.size(); ++i) {
      std::size_t clashes = 0;
      for (std::size_t q = 0; q < n_; ++q) {
        const auto a = stabilizers_[i][q], b = e[q];
        clashes += (a != 0 && b != 0 && a != b);
      }
      if (clashes & 1u)
        s |= std::size_t{1} << i;
    }
    return s;
  }

  /// True when the Pauli error lies in the class this code targets.
  bool covers(const pauli::PauliIndexVector &e) const {
    if (class_ == ErrorClass::full_pauli)
      return true;
    for (auto m : e.indices())
      if (m != 0 && m != 1)
        return false;
    return true;
  }

private:
  std::string id_;
  std::size_t n_;
  std::size_t k_corr_;
  ErrorClass class_;
  Matrix encoder_;
  std::vector<pauli::PauliIndexVector> stabilizers_;
  std::vector<pauli::PauliIndexVector> corrections_;
  std::vector<Matrix> projectors_;
  std::vector<Matrix> kraus_;
};

/// All Pauli strings in the code's error class with rank <= k_corr.
inline std::vector<pauli::PauliIndexVector>
covered_errors(const CodeSpec &code) {
  std::vector<pauli::PauliIndexVector> out;
  const std::uint64_t count = std::uint64_t{1} << (2 * code.n());
  for (std::uint64_t c = 0; c < count; ++c) {
    auto v = pauli::PauliIndexVector::from_code(c, code.n());
    if (pauli::error_rank(v) <= code.k_corr() && code.covers(v))
      out.push_back(std::move(v));
  }
  return out;
}

/// Checks that correction(syndrome(E)) * E is a phase times identity on the
/// code space for every covered E. Returns the worst defect.
inline double correction_defect(const CodeSpec &code) {
  double worst = 0.0;
  const Matrix &enc = code.encoder();
  for (const auto &e : covered_errors(code)) {
    const Matrix fixed = pauli::pauli_string(code.correction(code.syndrome_of(e))) *
                         pauli::pauli_string(e) * enc;
    const Matrix overlap = enc.adjoint() * fixed;
    const cplx phase = overlap(0, 0);
    if (std::abs(std::abs(phase) - 1.0) > 1e-9)
      return 1.0;
    worst = std::max(worst, max_abs(fixed - phase * enc));
  }
  return worst;
}

/// Identity "code" on one qubit: nothing is encoded and nothing is
/// corrected (k = 0). Serves as the no-correction baseline.
inline CodeSpec build_identity_code() {
  return CodeSpec("identity", 1, 0, ErrorClass::full_pauli,
                  Matrix::Identity(2, 2), {},
                  {pauli::PauliIndexVector(std::vector<pauli::Mu>{0})});
}

/// |0> -> |0...0>, |1> -> |1...1>, syndromes are neighbour parities
/// Z_i Z_{i+1}, correction flips every bit that disagrees with the
/// majority. Corrects amplitude (sigma_x) errors up to rank (n-1)/2.
inline CodeSpec build_repetition_code(std::size_t n) {
  if (n < 3 || n % 2 == 0)
    throw ValidationError("repetition code needs odd n >= 3, got " +
                          std::to_string(n));
  const Index dc = Index{1} << n;
  Matrix enc = Matrix::Zero(dc, 2);
  enc(0, 0) = 1.0;
  enc(dc - 1, 1) = 1.0;

  std::vector<pauli::PauliIndexVector> stabs;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::vector<pauli::Mu> g(n, 0);
    g[i] = g[i + 1] = 3;
    stabs.emplace_back(std::move(g));
  }

  std::vector<pauli::PauliIndexVector> corr;
  for (std::size_t s = 0; s < (std::size_t{1} << (n - 1)); ++s) {
    // Bit pattern consistent with the parities, first bit 0.
    std::vector<int> bits(n, 0);
    for (std::size_t i = 0; i + 1 < n; ++i)
      bits[i + 1] = bits[i] ^ static_cast<int>((s >> i) & 1u);
    std::size_t ones = 0;
    for (int b : bits)
      ones += static_cast<std::size_t>(b);
    const int minority = (2 * ones > n) ? 0 : 1;
    std::vector<pauli::Mu> c(n, 0);
    for (std::size_t q = 0; q < n; ++q)
      if (bits[q] == minority)
        c[q] = 1;
    corr.emplace_back(std::move(c));
  }
  return CodeSpec("repetition" + std::to_string(n), n, (n - 1) / 2,
                  ErrorClass::amplitude_only, std::move(enc), std::move(stabs),
                  std::move(corr));
}

/// The [[5,1,3]] code with cyclic generators XZZXI, IXZZX, XIXZZ, ZXIXZ.
/// |0bar> is the stabilized projection of |00000>, |1bar> = XXXXX |0bar>.
inline CodeSpec build_five_qubit_code() {
  constexpr std::size_t n = 5;
  const std::vector<pauli::PauliIndexVector> stabs = {
      pauli::PauliIndexVector::from_word("XZZXI"),
      pauli::PauliIndexVector::from_word("IXZZX"),
      pauli::PauliIndexVector::from_word("XIXZZ"),
      pauli::PauliIndexVector::from_word("ZXIXZ")};
  const Index dc = Index{1} << n;
  const Matrix id = Matrix::Identity(dc, dc);
  Matrix code_proj = id;
  for (const auto &g : stabs)
    code_proj = code_proj * (0.5 * (id + pauli::pauli_string(g)));
  Vector zero = code_proj.col(0);
  zero /= zero.norm();
  const Vector one = pauli::pauli_string(pauli::PauliIndexVector::from_word("XXXXX")) * zero;
  Matrix enc(dc, 2);
  enc.col(0) = zero;
  enc.col(1) = one;

  // Every single-qubit Pauli has its own syndrome.
  std::vector<pauli::PauliIndexVector> corr(
      16, pauli::PauliIndexVector(std::vector<pauli::Mu>(n, 0)));
  CodeSpec probe("five_qubit", n, 1, ErrorClass::full_pauli, enc, stabs, corr);
  std::vector<bool> seen(16, false);
  seen[0] = true;
  for (std::size_t q = 0; q < n; ++q)
    for (pauli::Mu mu = 1; mu <= 3; ++mu) {
      std::vector<pauli::Mu> e(n, 0);
      e[q] = mu;
      pauli::PauliIndexVector err(std::move(e));
      const std::size_t s = probe.syndrome_of(err);
      if (seen[s])
        throw ValidationError("five-qubit syndromes are not distinct");
      seen[s] = true;
      corr[s] = err;
    }
  return CodeSpec("five_qubit", n, 1, ErrorClass::full_pauli, std::move(enc),
                  stabs, std::move(corr));
}

/// Register and ancilla sizes of a shipped code, without building it.
struct CodeShape {
  std::size_t n = 0;
  std::size_t ancillas = 0;
};

inline std::optional<CodeShape> code_shape(const std::string &id) {
  if (id == "identity")
    return CodeShape{1, 0};
  if (id == "five_qubit")
    return CodeShape{5, 4};
  const std::string prefix = "repetition";
  if (id.rfind(prefix, 0) == 0 && id.size() > prefix.size() && id.size() < prefix.size() + 4) {
    const std::string digits = id.substr(prefix.size());
    if (digits.find_first_not_of("0123456789") == std::string::npos) {
      const std::size_t n = std::stoul(digits);
      if (n >= 3 && n % 2 == 1)
        return CodeShape{n, n - 1};
    }
  }
  return std::nullopt;
}

inline bool is_known_code(const std::string &id) { return code_shape(id).has_value(); }

/// Looks up a shipped code by id: identity, repetition<odd n>, five_qubit.
inline CodeSpec build_code(const std::string &id) {
  if (id == "identity")
    return build_identity_code();
  if (id == "five_qubit")
    return build_five_qubit_code();
  const std::string prefix = "repetition";
  if (id.rfind(prefix, 0) == 0 && id.size() > prefix.size()) {
    const std::string digits = id.substr(prefix.size());
    if (digits.find_first_not_of("0123456789") == std::string::npos && digits.size() < 4)
      return build_repetition_code(std::stoul(digits));
  }
  throw ValidationError("unknown code id '" + id + "'");
}

/// alpha |0bar> + beta |1bar>.
inline StateVector encode_logical(const CodeSpec &code, cplx alpha, cplx beta) {
  const double norm = std::norm(alpha) + std::norm(beta);
  if (std::abs(norm - 1.0) > tol::logical_norm)
    throw ValidationError("logical amplitudes are not normalized (|a|^2+|b|^2 = " +
                          std::to_string(norm) + ")");
  Vector psi = alpha * code.encoder().col(0) + beta * code.encoder().col(1);
  return StateVector(psi / psi.norm(), Dims(code.n(), 2));
}

/// Syndrome measurement followed by the table's Pauli correction, as an
/// explicit Kraus family (one operator per syndrome value).
class RecoveryChannel {
public:
  explicit RecoveryChannel(const CodeSpec &code) : kraus_(code.kraus()) {}

  const std::vector<Matrix> &kraus() const { return kraus_; }

  Matrix apply(const Matrix &rho) const {
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    for (const auto &k : kraus_)
      out += k * rho * k.adjoint();
    return out;
  }

  /// Applies the channel on the register factor of an environment (x)
  /// register operator, environment dimension d_e.
  Matrix apply_on_register(const Matrix &joint, std::size_t d_e) const {
    const Index de = static_cast<Index>(d_e);
    Matrix out = Matrix::Zero(joint.rows(), joint.cols());
    for (const auto &k : kraus_) {
      const Matrix big = kron(Matrix::Identity(de, de), k);
      out += big * joint * big.adjoint();
    }
    return out;
  }

  double completeness_defect() const {
    const Index dim = kraus_.front().cols();
    Matrix sum = Matrix::Zero(dim, dim);
    for (const auto &k : kraus_)
      sum += k.adjoint() * k;
    return max_abs(sum - Matrix::Identity(dim, dim));
  }

private:
  std::vector<Matrix> kraus_;
};

inline RecoveryChannel recovery_channel(const CodeSpec &code) {
  return RecoveryChannel(code);
}

/// Unitary R on register (x) ancilla: first copies the syndrome into the
/// ancilla (|a> -> |a xor s>), then applies correction(ancilla value).
/// With the ancilla starting in |0...0>, R|psi>|0> = sum_s C_s P_s|psi>|s>.
inline Matrix recovery_unitary(const CodeSpec &code) {
  const Index dc = Index{1} << code.n();
  const Index da = code.ancilla().dim();
  const std::size_t ns = code.syndrome_count();
  Matrix r = Matrix::Zero(dc * da, dc * da);
  std::vector<Matrix> corr;
  for (std::size_t s = 0; s < ns; ++s)
    corr.push_back(pauli::pauli_string(code.correction(s)));
  for (Index a = 0; a < da; ++a)
    for (std::size_t s = 0; s < ns; ++s) {
      const Index b = a ^ static_cast<Index>(s);
      const Matrix block = corr[static_cast<std::size_t>(b)] * code.syndrome_projector(s);
      for (Index i = 0; i < dc; ++i)
        for (Index j = 0; j < dc; ++j)
          if (block(i, j) != cplx{0.0})
            r(i * da + b, j * da + a) += block(i, j);
    }
  return r;
}

// --- Hamming / Gilbert-Varshamov bounds ----------------------------------------

using u128 = unsigned __int128;

inline constexpr std::size_t kMaxBoundsLength = 62;

/// sum_{l=0}^{m} C(n,l) 3^l in exact integers.
inline u128 weighted_ball(std::size_t n, std::size_t m) {
  if (n > kMaxBoundsLength)
    throw ValidationError("bounds arithmetic supports n <= " +
                          std::to_string(kMaxBoundsLength));
  u128 total = 0, binom = 1, pow3 = 1;
  for (std::size_t l = 0; l <= std::min(m, n); ++l) {
    if (l > 0) {
      binom = binom * (n - l + 1) / l;
      pow3 *= 3;
    }
    total += binom * pow3;
  }
  return total;
}

inline std::string to_string(u128 v) {
  if (v == 0)
    return "0";
  std::string s;
  while (v > 0) {
    s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return s;
}

struct BoundsRow {
  std::size_t n = 0;
  std::size_t k = 0;
  bool hamming_ok = false;
  bool gv_ok = false;

  bool operator==(const BoundsRow &) const = default;
};

/// hamming_ok: sum_{l<=k} C(n,l)3^l <= 2^(n-1);
/// gv_ok: 2^(n-1) <= sum_{l<=2k} C(n,l)3^l.
inline BoundsRow hamming_gv_check(std::size_t n, std::size_t k) {
  if (n < 1 || k > n)
    throw ValidationError("hamming_gv_check needs 0 <= k <= n, n >= 1");
  const u128 half = u128{1} << (n - 1);
  return {n, k, weighted_ball(n, k) <= half, half <= weighted_ball(n, 2 * k)};
}

/// Smallest n satisfying the Hamming bound for correctable rank k.
inline std::size_t min_code_length(std::size_t k) {
  for (std::size_t n = std::max<std::size_t>(k, 1); n <= kMaxBoundsLength; ++n)
    if (hamming_gv_check(n, k).hamming_ok)
      return n;
  throw ValidationError("no code length up to " +
                        std::to_string(kMaxBoundsLength) + " for k = " +
                        std::to_string(k));
}

inline csv::Table bounds_table(std::size_t k_min, std::size_t k_max,
                               std::size_t n_min, std::size_t n_max) {
  csv::Table t({"n", "k", "hamming_ok", "gv_ok"});
  for (std::size_t k = k_min; k <= k_max; ++k)
    for (std::size_t n = std::max(n_min, std::max<std::size_t>(k, 1)); n <= n_max; ++n) {
      const BoundsRow row = hamming_gv_check(n, k);
      t.add_row({std::to_string(row.n), std::to_string(row.k),
                 csv::boolean(row.hamming_ok), csv::boolean(row.gv_ok)});
    }
  return t;
}

// --- asymptotic rate window ------------------------------------------------------

/// x ln 3 - ln[x^x (1-x)^(1-x)], the large-n Hamming exponent.
inline double hamming_exponent(double x) {
  auto xlogx = [](double v) { return v > 0.0 ? v * std::log(v) : 0.0; };
  return x * std::log(3.0) - (xlogx(x) + xlogx(1.0 - x));
}

/// 2x ln 3 - ln[(2x)^(2x) (1-2x)^(1-2x)], the large-n GV exponent.
inline double gv_exponent(double x) { return hamming_exponent(2.0 * x); }

/// Lower end x0 of the window [x0, 2 x0] of admissible k/n: half of the
/// root y in (0, 1/2) of hamming_exponent(y) = ln 2, found by bisection.
inline double asymptotic_x0() {
  double lo = 0.0, hi = 0.5;
  const double ln2 = std::log(2.0);
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (hamming_exponent(mid) < ln2 ? lo : hi) = mid;
  }
  return 0.25 * (lo + hi);
}

} // namespace qecdecay::codes
