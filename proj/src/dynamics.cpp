#include "dcqd/dynamics.hpp"

#include <cmath>
#include <limits>

namespace dcqd {

// ---------------------------------------------------------------------------
// Hamiltonians
// ---------------------------------------------------------------------------

double SingleQubitHamiltonian::magnitude() const {
  return std::sqrt(jx * jx + jy * jy + jz * jz);
}

std::array<double, 3> SingleQubitHamiltonian::direction() const {
  const double j = magnitude();
  if (j == 0.0) return {0.0, 0.0, 0.0};
  return {jx / j, jy / j, jz / j};
}

Mat SingleQubitHamiltonian::matrix() const {
  return jx * pauli_x() + jy * pauli_y() + jz * pauli_z();
}

const char* exchange_class_name(ExchangeClass c) {
  switch (c) {
    case ExchangeClass::isotropic: return "isotropic";
    case ExchangeClass::xy: return "XY";
    case ExchangeClass::xxz: return "XXZ";
    case ExchangeClass::xyz: return "XYZ";
  }
  return "XYZ";
}

ExchangeClass ExchangeHamiltonian::classify(double tol) const {
  const bool xy_equal = std::abs(jx - jy) <= tol;
  if (xy_equal && std::abs(jx - jz) <= tol) return ExchangeClass::isotropic;
  if (xy_equal && std::abs(jz) <= tol) return ExchangeClass::xy;
  if (xy_equal) return ExchangeClass::xxz;
  return ExchangeClass::xyz;
}

Mat ExchangeHamiltonian::matrix() const {
  return jx * tensor(pauli_x(), pauli_x()) + jy * tensor(pauli_y(), pauli_y()) +
         jz * tensor(pauli_z(), pauli_z());
}

std::array<double, 4> ExchangeHamiltonian::bell_energies() const {
  return {jx - jy + jz,      // Phi+
          jx + jy - jz,      // Psi+
          -jx - jy - jz,     // Psi-
          -jx + jy + jz};    // Phi-
}

RelaxationParams RelaxationParams::make(double t1, double t2, double a_inf) {
  if (!(t1 > 0.0) || !(t2 > 0.0))
    fail(ErrorCategory::config, "relaxation: T1 and T2 must be positive");
  if (t2 > 2.0 * t1 + 1e-15 * t1)
    fail(ErrorCategory::config, "relaxation: T2 <= 2*T1 required for a physical channel");
  if (!(a_inf >= 0.0 && a_inf <= 1.0))
    fail(ErrorCategory::config, "relaxation: a_inf must lie in [0, 1]");
  return RelaxationParams{t1, t2, a_inf};
}

// ---------------------------------------------------------------------------
// Unitaries
// ---------------------------------------------------------------------------

Mat single_qubit_unitary(const SingleQubitHamiltonian& h, double t) {
  const double j = h.magnitude();
  if (j == 0.0) return Mat::Identity(2, 2);
  const auto n = h.direction();
  const double c = std::cos(j * t);
  const double s = std::sin(j * t);
  const Mat axis = n[0] * pauli_x() + n[1] * pauli_y() + n[2] * pauli_z();
  return c * Mat::Identity(2, 2) - Complex(0.0, s) * axis;
}

Mat exchange_unitary(const ExchangeHamiltonian& h, double t) {
  const auto energies = h.bell_energies();
  Mat u = Mat::Zero(4, 4);
  for (int b = 0; b < 4; ++b) {
    const Vec ket = bell_ket(b);
    u += std::exp(Complex(0.0, -energies[b] * t)) * (ket * ket.adjoint());
  }
  return u;
}

// ---------------------------------------------------------------------------
// Channels
// ---------------------------------------------------------------------------

namespace {

void check_completeness(const std::vector<Mat>& kraus) {
  if (kraus.empty()) fail(ErrorCategory::structural, "channel needs at least one Kraus term");
  const Eigen::Index d = kraus.front().rows();
  Mat sum = Mat::Zero(d, d);
  for (const Mat& k : kraus) {
    if (k.rows() != d || k.cols() != d)
      fail(ErrorCategory::structural, "Kraus terms must share one square dimension");
    sum += k.adjoint() * k;
  }
  if ((sum - Mat::Identity(d, d)).cwiseAbs().maxCoeff() > kStructuralTol)
    fail(ErrorCategory::structural, "Kraus terms must satisfy sum K†K = I");
}

}  // namespace

Mat Channel::apply(const Mat& m) const {
  Mat out = Mat::Zero(m.rows(), m.cols());
  for (const Mat& k : kraus) out += k * m * k.adjoint();
  return out;
}

Channel Channel::unitary(const Mat& u) {
  if (!is_unitary(u)) fail(ErrorCategory::structural, "Channel::unitary requires a unitary");
  Channel e{{u}};
  return e;
}

Channel Channel::relaxation(const RelaxationParams& p, double t) {
  if (t < 0.0) fail(ErrorCategory::config, "relaxation channel: t must be nonnegative");
  const double gamma = 1.0 - std::exp(-t / p.t1);
  const double keep = std::sqrt(1.0 - gamma);   // exp(-t / (2 T1))
  // Extra dephasing so the total coherence factor is exp(-t/T2).
  const double extra = std::exp(-t * (1.0 / p.t2 - 0.5 / p.t1));
  const double q = 0.5 * (1.0 - extra);
  if (q < -kStructuralTol)
    fail(ErrorCategory::config, "relaxation channel: T2 > 2*T1 is unphysical");

  const double pop = p.a_inf;
  std::vector<Mat> kraus;
  auto push = [&](const Mat& k) {
    if (k.cwiseAbs().maxCoeff() > 1e-15) kraus.push_back(k);
  };
  Mat k1 = Mat::Zero(2, 2), k2 = Mat::Zero(2, 2), k3 = Mat::Zero(2, 2), k4 = Mat::Zero(2, 2);
  k1(0, 0) = 1.0;
  k1(1, 1) = keep;
  k2(0, 1) = std::sqrt(gamma);
  k3(0, 0) = keep;
  k3(1, 1) = 1.0;
  k4(1, 0) = std::sqrt(gamma);
  const double qc = q < 0.0 ? 0.0 : q;
  const Mat d1 = std::sqrt(1.0 - qc) * Mat::Identity(2, 2);
  const Mat d2 = std::sqrt(qc) * pauli_z();
  const std::vector<Mat> damping = {std::sqrt(pop) * k1, std::sqrt(pop) * k2,
                                    std::sqrt(1.0 - pop) * k3, std::sqrt(1.0 - pop) * k4};
  for (const Mat& g : damping) {
    push(d1 * g);
    push(d2 * g);
  }
  check_completeness(kraus);
  return Channel{kraus};
}

Channel Channel::compose(const Channel& outer, const Channel& inner) {
  if (outer.dim() != inner.dim())
    fail(ErrorCategory::structural, "composed channels must share a dimension");
  std::vector<Mat> kraus;
  for (const Mat& a : outer.kraus)
    for (const Mat& b : inner.kraus) kraus.push_back(a * b);
  check_completeness(kraus);
  return Channel{kraus};
}

Channel Channel::embed_on_qubit(int n_qubits, int pos) const {
  std::vector<Mat> out;
  for (const Mat& k : kraus) out.push_back(embed_single(k, n_qubits, pos));
  return Channel{out};
}

Channel Channel::embed_on_pair(int n_qubits, int a, int b) const {
  std::vector<Mat> out;
  for (const Mat& k : kraus) out.push_back(embed_pair(k, n_qubits, a, b));
  return Channel{out};
}

DensityMatrix relaxation_apply(const DensityMatrix& rho, const RelaxationParams& p,
                               double t, int target) {
  Channel e = Channel::relaxation(p, t);
  if (rho.dim() == 2) {
    if (target != 0) fail(ErrorCategory::config, "relaxation_apply: target must be 0");
  } else if (rho.dim() == 4) {
    if (target != 0 && target != 1)
      fail(ErrorCategory::config, "relaxation_apply: target must be 0 or 1");
    e = e.embed_on_qubit(2, target);
  } else {
    fail(ErrorCategory::config, "relaxation_apply supports 2- or 4-dimensional states");
  }
  return DensityMatrix::from(e.apply(rho.m));
}

// ---------------------------------------------------------------------------
// Process matrices
// ---------------------------------------------------------------------------

double ChiMatrix::trace_preservation_residual() const {
  PauliBasis basis(n_qubits);
  const int d = basis.dim();
  Mat sum = Mat::Zero(d, d);
  for (int i = 0; i < basis.size(); ++i)
    for (int j = 0; j < basis.size(); ++j)
      sum += m(i, j) * basis.op(j).adjoint() * basis.op(i);
  return (sum - Mat::Identity(d, d)).cwiseAbs().maxCoeff();
}

ChiMatrix chi_from_unitary(const Mat& u) {
  if (!is_unitary(u)) fail(ErrorCategory::structural, "chi_from_unitary requires a unitary");
  const int n = u.rows() == 2 ? 1 : u.rows() == 4 ? 2 : 0;
  if (n == 0) fail(ErrorCategory::config, "chi_from_unitary supports 1 or 2 qubits");
  PauliBasis basis(n);
  const double d = basis.dim();
  Vec a(basis.size());
  for (int k = 0; k < basis.size(); ++k)
    a(k) = (basis.op(k).adjoint() * u).trace() / d;
  return ChiMatrix{n, a * a.adjoint()};
}

ChiMatrix process_oracle(const Channel& e) {
  const int d = e.dim();
  const int n = d == 2 ? 1 : d == 4 ? 2 : 0;
  if (n == 0) fail(ErrorCategory::config, "process_oracle supports 1 or 2 qubits");
  PauliBasis basis(n);

  // Superoperator in the column-major vec convention:
  // vec(E(M)) = S vec(M), column b*d+a holds vec(E(|a><b|)).
  Mat s = Mat::Zero(d * d, d * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      Mat unit = Mat::Zero(d, d);
      unit(a, b) = 1.0;
      const Mat out = e.apply(unit);
      s.col(b * d + a) = Eigen::Map<const Vec>(out.data(), d * d);
    }

  // E(M) = sum_ij chi_ij s_i M s_j† reads S = sum_ij chi_ij conj(s_j) (x) s_i,
  // and the Kronecker factors are Hilbert-Schmidt orthogonal, so chi follows
  // by projection.
  const int nb = basis.size();
  Mat chi(nb, nb);
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < nb; ++j) {
      const Mat k = tensor(basis.op(j).conjugate(), basis.op(i));
      chi(i, j) = (k.adjoint() * s).trace() / static_cast<double>(d * d);
    }
  return ChiMatrix{n, chi};
}

Mat choi_matrix(const Channel& e) {
  const int d = e.dim();
  Mat choi = Mat::Zero(d * d, d * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      Mat unit = Mat::Zero(d, d);
      unit(a, b) = 1.0;
      choi += tensor(e.apply(unit), unit);
    }
  return choi;
}

}  // namespace dcqd
