#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "dcqd/error.hpp"

namespace dcqd {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Two tolerance tiers used throughout: structural invariants (hermiticity,
// trace, positivity, unitarity) and analytic round-trips on exact inputs.
inline constexpr double kStructuralTol = 1e-10;
inline constexpr double kAnalyticTol = 1e-9;

// ---------------------------------------------------------------------------
// Predicates
// ---------------------------------------------------------------------------

bool is_hermitian(const Mat& m, double tol = kStructuralTol);
bool is_unitary(const Mat& m, double tol = kStructuralTol);
// Positive semidefinite within tol on the smallest eigenvalue of (M+M†)/2.
bool is_psd(const Mat& m, double tol = kStructuralTol);
bool is_trace_one(const Mat& m, double tol = kStructuralTol);

// Global-phase-invariant distance between unitaries: 1 - |tr(U†V)|/d.
double phase_distance(const Mat& u, const Mat& v);

// ---------------------------------------------------------------------------
// Density matrices
// ---------------------------------------------------------------------------

// Validated density matrix: square, hermitian, unit trace, PSD (structural tol).
struct DensityMatrix {
  Mat m;

  static DensityMatrix from(const Mat& candidate);
  static DensityMatrix pure(const Vec& ket);
  int dim() const { return static_cast<int>(m.rows()); }
};

// ---------------------------------------------------------------------------
// Pauli basis
// ---------------------------------------------------------------------------

Mat pauli_i();
Mat pauli_x();
Mat pauli_y();
Mat pauli_z();

// Unnormalized Pauli product basis. One qubit: (I, X, Y, Z) indexed 0..3.
// Two qubits: lexicographic pairs, index 4*i + j for sigma_i (x) sigma_j,
// placing the symmetric products XX, YY, ZZ at 5, 10, 15.
class PauliBasis {
 public:
  explicit PauliBasis(int n_qubits);

  int n_qubits() const { return n_qubits_; }
  int size() const { return static_cast<int>(ops_.size()); }
  int dim() const { return dim_; }
  const Mat& op(int index) const { return ops_.at(index); }
  const std::string& label(int index) const { return labels_.at(index); }

 private:
  int n_qubits_;
  int dim_;
  std::vector<Mat> ops_;
  std::vector<std::string> labels_;
};

// ---------------------------------------------------------------------------
// Bell basis
// ---------------------------------------------------------------------------

// Fixed Bell order used everywhere: 0 Phi+, 1 Psi+, 2 Psi-, 3 Phi-. This
// mirrors the Pauli order (I, X, Y, Z): (sigma_m (x) I)|Phi+> is Bell state m
// up to a phase, so Bell outcome m reads off Pauli index m.
Vec bell_ket(int index);
const char* bell_label(int index);

// ---------------------------------------------------------------------------
// Tensor algebra
// ---------------------------------------------------------------------------

// Kronecker product, row-major index convention: (a,b) -> a*dimB + b.
Mat tensor(const Mat& a, const Mat& b);

// Trace out every subsystem not listed in `keep` (indices into `dims`,
// strictly increasing). Keeping nothing yields the 1x1 matrix [tr m].
Mat partial_trace(const Mat& m, const std::vector<int>& keep,
                  const std::vector<int>& dims);

// Lift a single-qubit operator onto qubit `pos` of an n-qubit register.
Mat embed_single(const Mat& op, int n_qubits, int pos);

// Lift a two-qubit operator onto qubits (a, b) of an n-qubit register,
// with the operator's first factor acting on qubit a.
Mat embed_pair(const Mat& op, int n_qubits, int a, int b);

// ---------------------------------------------------------------------------
// Matrix exponential
// ---------------------------------------------------------------------------

// exp(sign * (-i) * t * H) for hermitian H via spectral decomposition.
Mat matexp_hermitian(const Mat& h, double t, double sign = 1.0);

}  // namespace dcqd
