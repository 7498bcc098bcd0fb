#pragma once

#include <array>
#include <vector>

#include "dcqd/qcore.hpp"

namespace dcqd {

// ---------------------------------------------------------------------------
// Hamiltonians
// ---------------------------------------------------------------------------

// H = J . sigma on one qubit.
struct SingleQubitHamiltonian {
  double jx = 0.0, jy = 0.0, jz = 0.0;

  double magnitude() const;
  // Unit direction (jx, jy, jz)/J; the zero Hamiltonian has direction (0,0,0).
  std::array<double, 3> direction() const;
  Mat matrix() const;
};

// H = sum_a J_a sigma_a (x) sigma_a on a qubit pair.
enum class ExchangeClass { isotropic, xy, xxz, xyz };
const char* exchange_class_name(ExchangeClass c);

struct ExchangeHamiltonian {
  double jx = 0.0, jy = 0.0, jz = 0.0;

  ExchangeClass classify(double tol = 1e-12) const;
  Mat matrix() const;
  // Energies of (Phi+, Psi+, Psi-, Phi-) in Bell order:
  // Jx-Jy+Jz, Jx+Jy-Jz, -Jx-Jy-Jz, -Jx+Jy+Jz.
  std::array<double, 4> bell_energies() const;
};

// T1/T2 relaxation toward population a_inf of |0>. Physicality: T2 <= 2*T1.
struct RelaxationParams {
  double t1 = 1.0, t2 = 1.0, a_inf = 1.0;

  static RelaxationParams make(double t1, double t2, double a_inf);
};

// ---------------------------------------------------------------------------
// Unitaries
// ---------------------------------------------------------------------------

// Closed form cos(Jt) I - i sin(Jt) (Jhat . sigma).
Mat single_qubit_unitary(const SingleQubitHamiltonian& h, double t);

// Spectral form over the Bell eigenbasis of the exchange coupling.
Mat exchange_unitary(const ExchangeHamiltonian& h, double t);

// ---------------------------------------------------------------------------
// Channels
// ---------------------------------------------------------------------------

// Completely positive trace-preserving map stored as a Kraus list.
struct Channel {
  std::vector<Mat> kraus;

  int dim() const { return kraus.empty() ? 0 : static_cast<int>(kraus.front().rows()); }
  // Kraus action on an arbitrary operator (not just density matrices), so the
  // oracle can push matrix units through the map.
  Mat apply(const Mat& m) const;

  static Channel unitary(const Mat& u);
  // Generalized amplitude damping toward diag(a_inf, 1-a_inf) composed with
  // pure dephasing so total coherence decay is exp(-t/T2).
  static Channel relaxation(const RelaxationParams& p, double t);
  static Channel compose(const Channel& outer, const Channel& inner);

  Channel embed_on_qubit(int n_qubits, int pos) const;
  Channel embed_on_pair(int n_qubits, int a, int b) const;
};

// One-step relaxation of a 2- or 4-dimensional state; `target` picks the qubit
// the noise acts on (must be 0 for a single qubit).
DensityMatrix relaxation_apply(const DensityMatrix& rho, const RelaxationParams& p,
                               double t, int target = 0);

// ---------------------------------------------------------------------------
// Process (chi) matrices over the unnormalized Pauli product basis
// ---------------------------------------------------------------------------

struct ChiMatrix {
  int n_qubits = 1;
  Mat m;  // 4x4 (one qubit) or 16x16 (two qubits)

  bool hermitian(double tol = kStructuralTol) const { return is_hermitian(m, tol); }
  bool psd(double tol = kStructuralTol) const { return is_psd(m, tol); }
  double diag_sum() const { return m.diagonal().real().sum(); }
  // Full trace-preservation residual: || sum_mn chi_mn s_n† s_m - I ||_max.
  double trace_preservation_residual() const;
};

// chi = a a† with a_m = tr(sigma_m† U)/d. Requires U unitary.
ChiMatrix chi_from_unitary(const Mat& u);

// Brute-force reconstruction: propagate all d^2 matrix units through the
// channel, assemble the superoperator, and project it onto the Pauli-pair
// basis (the linear relation E(M) = sum_ij chi_ij s_i M s_j†). Independent of
// chi_from_unitary; ground truth for everything downstream.
ChiMatrix process_oracle(const Channel& e);

// Choi matrix (E (x) id)(|Omega><Omega|), unnormalized; PSD iff E is CP.
Mat choi_matrix(const Channel& e);

}  // namespace dcqd
