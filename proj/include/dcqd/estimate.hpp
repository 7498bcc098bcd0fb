#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dcqd/dynamics.hpp"
#include "dcqd/protocol.hpp"

namespace dcqd {

// Estimators inverting Bell-statistics records into Hamiltonian couplings and
// relaxation rates. Exact records (probabilities) invert with zero reported
// uncertainty; sampled records (counts) carry first-order delta-method
// standard errors. Branch choices are always the principal ones; alias lists
// enumerate the other branches compatible with the data.

// ---------------------------------------------------------------------------
// Single-qubit direction magnitudes.

struct DirectionEstimate {
  std::array<double, 3> components;  // |n_alpha|, unit direction magnitudes
  std::array<double, 3> stderrs;     // per-component standard errors
  double p_identity = 0.0;           // identity-outcome fraction cos^2(J t)
  double denominator = 0.0;          // 1 - p_identity
  double j_magnitude = 0.0;          // arccos(sqrt(p_identity)) / t, principal
  double stderr_j = 0.0;
  double t = 0.0;
  bool sampled = false;
  std::int64_t n_shots = 0;
};

// Inverts a maximally-entangled-probe record: outcome fractions are the chi
// diagonal, so n_alpha^2 = p_alpha / (1 - p_identity). Requires the
// denominator to clear a noise floor (1e-6 exact, max(1e-6, 10/N) sampled);
// below it the evolution window carries no direction information and the
// call fails with DEGENERATE_TIME.
DirectionEstimate estimate_direction_magnitudes(const MeasurementRecord& rec);

// ---------------------------------------------------------------------------
// Off-diagonal chi recovery from one non-maximal probe configuration.

struct OffdiagonalSolve {
  ProbeConfig config = ProbeConfig::nonmax_z;
  int direct_index = 0;                  // Pauli axis whose Im chi(0, i) is read
  std::pair<int, int> product_pair{0, 0};  // pair whose Re chi(j, k) is read
  std::array<double, 4> diag{};          // least-squares refined chi diagonal
  std::optional<double> direct;          // Im chi(0, direct_index)
  std::optional<double> product;         // Re chi(product_pair)
  double condition_number = 0.0;
  double noise_scale = 0.0;  // rough one-sigma scale of the solved values
};

// Stacks the Bell-diagonal readings with one configuration's branch
// probabilities and signed normalizer combinations, and solves the joint
// linear system for the chi diagonal plus the two off-diagonal values that
// configuration exposes. A branch whose probability vanished contributes no
// equation, so the corresponding off-diagonal stays unset. Fails with
// CONDITIONING if the stacked system's condition number exceeds 1e6.
OffdiagonalSolve solve_offdiagonal(const std::array<double, 4>& bell_diag,
                                   const NormalizerStats& st);

// ---------------------------------------------------------------------------
// Component sign reconstruction.

struct SignReconstruction {
  std::array<int, 3> signs{0, 0, 0};  // per axis x, y, z: -1, 0, +1
  bool global_sign_fixed = false;     // all three configurations contributed
  std::vector<std::string> notes;
};

// Reads component signs from the imaginary first-row chi entries (valid for
// 0 < J t < pi/2) and cross-checks them against the real pairwise entries,
// whose signs equal the products of the component signs. A product reading
// can fill in a sign whose direct reading is missing. Material
// contradictions raise MODEL_VIOLATION. A component whose magnitude is
// consistent with zero keeps sign 0 and is excluded from the checks.
SignReconstruction reconstruct_direction_signs(
    const std::vector<OffdiagonalSolve>& solves, const DirectionEstimate& mags);

// Full single-qubit pipeline: magnitudes from the maximally entangled probe,
// signs from the non-maximal configurations, combined into signed couplings
// J_alpha = sign * |J| * n_alpha.
struct SingleQubitEstimate {
  DirectionEstimate magnitudes;
  SignReconstruction signs;
  std::vector<OffdiagonalSolve> solves;
  std::array<double, 3> couplings{0.0, 0.0, 0.0};
};

SingleQubitEstimate estimate_single_qubit(
    const MeasurementRecord& bell_record,
    const std::vector<MeasurementRecord>& nonmax_records);

// ---------------------------------------------------------------------------
// Relaxation rates.

struct RelaxationEstimate {
  double rate1 = 0.0;  // 1/T1
  double rate2 = 0.0;  // 1/T2
  double stderr_rate1 = 0.0;
  double stderr_rate2 = 0.0;
  double t1 = 0.0;  // infinity when the rate vanishes
  double t2 = 0.0;
  bool sampled = false;
  std::int64_t n_shots = 0;
  std::vector<std::string> notes;
};

// Reads both rates from one maximally-entangled-probe record:
//   1/T2 = -ln(f_{Phi+} - f_{Phi-}) / t
//   1/T1 = -ln(1 - 2 f_{Psi+} - 2 f_{Psi-}) / t
// Both logarithm arguments are decaying exponentials, so they must stay in
// (0, 1]; a non-positive argument (evolution too long, or sampling noise at
// long times) fails with DEGENERATE_TIME. An argument above 1 can only come
// from sampling noise near t = 0 and is clamped to rate 0 with a note.
RelaxationEstimate estimate_relaxation(const MeasurementRecord& rec);

// ---------------------------------------------------------------------------
// Two-qubit exchange couplings from double-probe joint statistics.

struct IsotropicEstimate {
  double v = 0.0;  // sin(2 |J| t), inverse-variance weighted over channels
  double stderr_v = 0.0;
  double j_principal = 0.0;  // asin(v) / (2 t)
  double stderr_j = 0.0;
  std::vector<double> j_aliases;  // ascending, includes the principal value
  double identity_residual = 0.0;  // |f_II - (1 - 3 v^2 / 4)|
  bool sampled = false;
  std::int64_t n_shots = 0;
  std::vector<std::string> notes;
};

// Isotropic-exchange magnitude from the three same-label joint outcomes,
// each of which measures sin^2(2 J t) / 4. Refuses with MODEL_VIOLATION if
// mixed-label outcomes carry material weight, if the three channels disagree
// materially, or if the identity-outcome cross-check fails on exact data.
IsotropicEstimate estimate_isotropic_coupling(const MeasurementRecord& rec,
                                              int alias_branches = 3);

struct AnisotropicEstimate {
  double v_xy = 0.0;  // sin(2 |Jx| t)
  double stderr_v_xy = 0.0;
  double j_xy = 0.0;  // |Jx| = |Jy|, principal branch
  double stderr_j_xy = 0.0;
  std::vector<double> j_xy_aliases;
  double w_z = 0.0;  // |cos(|Jz| t)|, recovered from the identity outcome
  double j_z = 0.0;  // |Jz|, principal branch
  double stderr_j_z = 0.0;
  std::vector<double> j_z_aliases;
  double zz_residual = 0.0;  // same-label ZZ outcome vs its prediction
  bool sampled = false;
  std::int64_t n_shots = 0;
  std::vector<std::string> notes;
};

// Axially symmetric exchange (Jx = Jy != Jz). The XX and YY joint outcomes
// give sin(2 |Jx| t); the identity outcome then isolates
//   cos(|Jz| t) = sqrt((f_II - s^4) / (c^4 - s^4)),  s = sin|Jx|t, c = cos|Jx|t.
// Fails with MODEL_VIOLATION when f_XX and f_YY differ materially (the x and
// y couplings are then not equal and this model does not apply) or when the
// radicand falls outside [0, 1] beyond noise; fails with DEGENERATE_TIME when
// cos(2 |Jx| t) is too small to divide by (the xy rotation sits at 45 degrees
// and hides the z coupling).
AnisotropicEstimate estimate_anisotropic_couplings(const MeasurementRecord& rec,
                                                   int alias_branches = 3);

// ---------------------------------------------------------------------------
// Alias resolution against a declared coupling bound.

struct AliasResolution {
  std::optional<double> value;     // set iff exactly one candidate survives
  std::vector<double> survivors;   // all candidates within the bound
  bool unique = false;
};

// Keeps the alias candidates at or below the declared bound. The value is
// set only when exactly one survives; zero or several survivors leave it
// unset so that nothing is chosen silently.
AliasResolution resolve_alias(const std::vector<double>& aliases, double j_max);

// ---------------------------------------------------------------------------
// Exchange coupling signs and Bell spectrum.

struct ExchangeSigns {
  std::array<int, 3> sign{0, 0, 0};  // per axis; 0 = vanishing coupling
  std::vector<std::string> notes;
};

// Reads the three coupling signs from the first-row chi entries of a
// two-qubit process matrix: Im chi(II, XX) carries sign(Jx), Im chi(II, YY)
// carries sign(Jy), Im chi(II, ZZ) carries sign(Jz), while the real parts
// carry the complementary pairwise products, used as consistency checks.
// Valid while 2 |J_alpha| t < pi/2 for every axis, enforced through the
// caller-declared bound j_max. Material contradictions raise MODEL_VIOLATION.
ExchangeSigns derive_exchange_signs(const ChiMatrix& chi, double t, double j_max);

struct SpectrumCandidate {
  std::array<double, 3> couplings{};  // one representative (Jx, Jy, Jz)
  std::array<double, 4> energies{};   // Bell-basis energies, basis order
};

// Enumerates the Bell-spectrum candidates compatible with estimated coupling
// magnitudes. The class restricts the allowed sign patterns (isotropic: one
// common sign; axial: one xy sign and one z sign). Candidates that produce
// the same energy multiset are merged. When signs are supplied the patterns
// are filtered accordingly; a fully determined sign vector leaves exactly
// one candidate.
std::vector<SpectrumCandidate> exchange_spectrum_candidates(
    ExchangeClass cls, const std::array<double, 3>& magnitudes,
    const std::optional<ExchangeSigns>& signs = std::nullopt);

}  // namespace dcqd
