#include "dcqd/qcore.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace dcqd {

const char* error_category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::config: return "CONFIG";
    case ErrorCategory::degenerate_time: return "DEGENERATE_TIME";
    case ErrorCategory::model_violation: return "MODEL_VIOLATION";
    case ErrorCategory::conditioning: return "CONDITIONING";
    case ErrorCategory::no_signal: return "NO_SIGNAL";
    case ErrorCategory::structural: return "STRUCTURAL";
    case ErrorCategory::internal: return "INTERNAL";
  }
  return "INTERNAL";
}

// ---------------------------------------------------------------------------
// Predicates
// ---------------------------------------------------------------------------

bool is_hermitian(const Mat& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_unitary(const Mat& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const Mat gram = m.adjoint() * m;
  return (gram - Mat::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() <= tol;
}

bool is_psd(const Mat& m, double tol) {
  if (!is_hermitian(m, tol)) return false;
  const Mat h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

bool is_trace_one(const Mat& m, double tol) {
  return std::abs(m.trace() - Complex(1.0, 0.0)) <= tol;
}

double phase_distance(const Mat& u, const Mat& v) {
  const double d = static_cast<double>(u.rows());
  return 1.0 - std::abs((u.adjoint() * v).trace()) / d;
}

// ---------------------------------------------------------------------------
// Density matrices
// ---------------------------------------------------------------------------

DensityMatrix DensityMatrix::from(const Mat& candidate) {
  if (candidate.rows() != candidate.cols())
    fail(ErrorCategory::structural, "density matrix must be square");
  if (!is_hermitian(candidate))
    fail(ErrorCategory::structural, "density matrix must be hermitian");
  if (!is_trace_one(candidate))
    fail(ErrorCategory::structural, "density matrix must have unit trace");
  if (!is_psd(candidate))
    fail(ErrorCategory::structural, "density matrix must be positive semidefinite");
  return DensityMatrix{candidate};
}

DensityMatrix DensityMatrix::pure(const Vec& ket) {
  const double norm = ket.norm();
  if (std::abs(norm - 1.0) > kStructuralTol)
    fail(ErrorCategory::structural, "pure-state ket must be normalized");
  return DensityMatrix{ket * ket.adjoint()};
}

// ---------------------------------------------------------------------------
// Pauli basis
// ---------------------------------------------------------------------------

Mat pauli_i() { return Mat::Identity(2, 2); }

Mat pauli_x() {
  Mat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Mat pauli_y() {
  Mat m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

Mat pauli_z() {
  Mat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

PauliBasis::PauliBasis(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits != 1 && n_qubits != 2)
    fail(ErrorCategory::config, "pauli basis supports 1 or 2 qubits");
  const Mat singles[4] = {pauli_i(), pauli_x(), pauli_y(), pauli_z()};
  const char* names[4] = {"I", "X", "Y", "Z"};
  if (n_qubits == 1) {
    dim_ = 2;
    for (int i = 0; i < 4; ++i) {
      ops_.push_back(singles[i]);
      labels_.push_back(names[i]);
    }
  } else {
    dim_ = 4;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        ops_.push_back(tensor(singles[i], singles[j]));
        labels_.push_back(std::string(names[i]) + names[j]);
      }
  }
}

// ---------------------------------------------------------------------------
// Bell basis
// ---------------------------------------------------------------------------

Vec bell_ket(int index) {
  const double r = 1.0 / std::sqrt(2.0);
  Vec v = Vec::Zero(4);
  switch (index) {
    case 0: v(0) = r; v(3) = r; break;    // Phi+ = (|00> + |11>)/sqrt2
    case 1: v(1) = r; v(2) = r; break;    // Psi+ = (|01> + |10>)/sqrt2
    case 2: v(1) = r; v(2) = -r; break;   // Psi- = (|01> - |10>)/sqrt2
    case 3: v(0) = r; v(3) = -r; break;   // Phi- = (|00> - |11>)/sqrt2
    default: fail(ErrorCategory::config, "bell_ket: index must be 0..3");
  }
  return v;
}

const char* bell_label(int index) {
  switch (index) {
    case 0: return "Phi+";
    case 1: return "Psi+";
    case 2: return "Psi-";
    case 3: return "Phi-";
  }
  fail(ErrorCategory::config, "bell_label: index must be 0..3");
}

// ---------------------------------------------------------------------------
// Tensor algebra
// ---------------------------------------------------------------------------

Mat tensor(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Mat partial_trace(const Mat& m, const std::vector<int>& keep,
                  const std::vector<int>& dims) {
  const int n = static_cast<int>(dims.size());
  Eigen::Index total = 1;
  for (int d : dims) {
    if (d < 1) fail(ErrorCategory::config, "partial_trace: dims must be positive");
    total *= d;
  }
  if (m.rows() != total || m.cols() != total)
    fail(ErrorCategory::config, "partial_trace: dims do not match matrix size");
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] < 0 || keep[i] >= n)
      fail(ErrorCategory::config, "partial_trace: keep index out of range");
    if (i > 0 && keep[i] <= keep[i - 1])
      fail(ErrorCategory::config, "partial_trace: keep indices must be increasing");
  }

  std::vector<bool> kept(n, false);
  for (int k : keep) kept[k] = true;
  Eigen::Index keep_dim = 1, trace_dim = 1;
  for (int s = 0; s < n; ++s) (kept[s] ? keep_dim : trace_dim) *= dims[s];

  // Strides of each subsystem in the row-major composite index.
  std::vector<Eigen::Index> stride(n, 1);
  for (int s = n - 2; s >= 0; --s) stride[s] = stride[s + 1] * dims[s + 1];

  std::vector<int> keep_subs, trace_subs;
  for (int s = 0; s < n; ++s) (kept[s] ? keep_subs : trace_subs).push_back(s);

  auto composite = [&](Eigen::Index keep_idx, Eigen::Index trace_idx) {
    Eigen::Index idx = 0;
    for (int s = static_cast<int>(keep_subs.size()) - 1; s >= 0; --s) {
      const int sub = keep_subs[s];
      idx += (keep_idx % dims[sub]) * stride[sub];
      keep_idx /= dims[sub];
    }
    for (int s = static_cast<int>(trace_subs.size()) - 1; s >= 0; --s) {
      const int sub = trace_subs[s];
      idx += (trace_idx % dims[sub]) * stride[sub];
      trace_idx /= dims[sub];
    }
    return idx;
  };

  Mat out = Mat::Zero(keep_dim, keep_dim);
  for (Eigen::Index r = 0; r < keep_dim; ++r)
    for (Eigen::Index c = 0; c < keep_dim; ++c)
      for (Eigen::Index t = 0; t < trace_dim; ++t)
        out(r, c) += m(composite(r, t), composite(c, t));
  return out;
}

Mat embed_single(const Mat& op, int n_qubits, int pos) {
  if (op.rows() != 2 || op.cols() != 2)
    fail(ErrorCategory::config, "embed_single expects a 2x2 operator");
  if (pos < 0 || pos >= n_qubits)
    fail(ErrorCategory::config, "embed_single: position out of range");
  Mat out = pos == 0 ? op : Mat::Identity(2, 2);
  for (int q = 1; q < n_qubits; ++q)
    out = tensor(out, q == pos ? op : Mat::Identity(2, 2));
  return out;
}

Mat embed_pair(const Mat& op, int n_qubits, int a, int b) {
  if (op.rows() != 4 || op.cols() != 4)
    fail(ErrorCategory::config, "embed_pair expects a 4x4 operator");
  if (a == b || a < 0 || b < 0 || a >= n_qubits || b >= n_qubits)
    fail(ErrorCategory::config, "embed_pair: invalid qubit positions");
  const Eigen::Index dim = Eigen::Index(1) << n_qubits;
  auto bit = [&](Eigen::Index idx, int q) { return (idx >> (n_qubits - 1 - q)) & 1; };
  Mat out = Mat::Zero(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r)
    for (Eigen::Index c = 0; c < dim; ++c) {
      bool spectator_match = true;
      for (int q = 0; q < n_qubits; ++q)
        if (q != a && q != b && bit(r, q) != bit(c, q)) {
          spectator_match = false;
          break;
        }
      if (!spectator_match) continue;
      const Eigen::Index op_r = 2 * bit(r, a) + bit(r, b);
      const Eigen::Index op_c = 2 * bit(c, a) + bit(c, b);
      out(r, c) = op(op_r, op_c);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Matrix exponential
// ---------------------------------------------------------------------------

Mat matexp_hermitian(const Mat& h, double t, double sign) {
  if (!is_hermitian(h))
    fail(ErrorCategory::structural, "matexp_hermitian requires a hermitian matrix");
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  if (es.info() != Eigen::Success)
    fail(ErrorCategory::internal, "eigendecomposition failed");
  const auto& vals = es.eigenvalues();
  const Mat& vecs = es.eigenvectors();
  Vec phases(vals.size());
  for (Eigen::Index k = 0; k < vals.size(); ++k)
    phases(k) = std::exp(Complex(0.0, -sign * t * vals(k)));
  return vecs * phases.asDiagonal() * vecs.adjoint();
}

}  // namespace dcqd
