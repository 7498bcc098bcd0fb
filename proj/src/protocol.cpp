#include "dcqd/protocol.hpp"

#include <cmath>

#include "dcqd/rng.hpp"

namespace dcqd {

const char* probe_config_name(ProbeConfig c) {
  switch (c) {
    case ProbeConfig::bell_z: return "BellZ";
    case ProbeConfig::nonmax_z: return "NonMaxZ";
    case ProbeConfig::nonmax_x: return "NonMaxX";
    case ProbeConfig::nonmax_y: return "NonMaxY";
    case ProbeConfig::double_bell: return "DoubleBell";
  }
  return "?";
}

int probe_config_id(ProbeConfig c) { return static_cast<int>(c); }

// ---------------------------------------------------------------------------
// Dynamics
// ---------------------------------------------------------------------------

Dynamics Dynamics::of(const SingleQubitHamiltonian& h) {
  Dynamics d;
  d.kind = Kind::single_qubit;
  d.single = h;
  return d;
}

Dynamics Dynamics::of(const ExchangeHamiltonian& h) {
  Dynamics d;
  d.kind = Kind::exchange;
  d.exchange = h;
  return d;
}

Dynamics Dynamics::of(const RelaxationParams& p) {
  Dynamics d;
  d.kind = Kind::relaxation;
  d.relax = p;
  return d;
}

Channel Dynamics::channel_at(double t) const {
  switch (kind) {
    case Kind::single_qubit: return Channel::unitary(single_qubit_unitary(single, t));
    case Kind::exchange: return Channel::unitary(exchange_unitary(exchange, t));
    case Kind::relaxation: return Channel::relaxation(relax, t);
  }
  fail(ErrorCategory::internal, "unknown dynamics kind");
}

// ---------------------------------------------------------------------------
// Probe preparation
// ---------------------------------------------------------------------------

ProbeAmplitudes ProbeAmplitudes::validated(Complex alpha, Complex beta) {
  constexpr double margin = 1e-6;
  const double norm = std::norm(alpha) + std::norm(beta);
  if (std::abs(norm - 1.0) > 1e-12)
    fail(ErrorCategory::config, "probe amplitudes must satisfy |alpha|^2 + |beta|^2 = 1");
  if (std::abs(alpha) < margin || std::abs(beta) < margin)
    fail(ErrorCategory::config, "probe amplitudes must both be nonzero");
  if (std::abs(std::abs(alpha) - std::abs(beta)) < margin)
    fail(ErrorCategory::config,
         "probe must be non-maximal: | |alpha| - |beta| | >= 1e-6 required");
  if (std::abs(std::imag(std::conj(alpha) * beta)) < margin)
    fail(ErrorCategory::config,
         "probe needs a complex relative phase: |Im(conj(alpha) beta)| >= 1e-6 required");
  return ProbeAmplitudes{alpha, beta};
}

ProbeAmplitudes ProbeAmplitudes::preset() {
  return validated(Complex(0.8, 0.0), 0.6 * std::exp(Complex(0.0, M_PI / 4.0)));
}

double ProbeAmplitudes::a_constant() const {
  return 2.0 * std::real(std::conj(alpha) * beta);
}

double ProbeAmplitudes::b_constant() const {
  return -4.0 * std::imag(std::conj(alpha) * beta);
}

namespace {

Vec basis_ket(int axis, int sign) {
  // axis: 0 = z, 1 = x, 2 = y; sign 0/1 -> +/- eigenket of that Pauli.
  Vec v(2);
  const double r = 1.0 / std::sqrt(2.0);
  switch (axis) {
    case 0:  // z
      v << (sign == 0 ? 1.0 : 0.0), (sign == 0 ? 0.0 : 1.0);
      return v;
    case 1:  // x
      v << r, (sign == 0 ? r : -r);
      return v;
    case 2:  // y
      v << Complex(r, 0.0), (sign == 0 ? Complex(0.0, r) : Complex(0.0, -r));
      return v;
  }
  fail(ErrorCategory::internal, "bad axis");
}

Vec nonmax_ket(int axis, const ProbeAmplitudes& amp) {
  const Vec up = basis_ket(axis, 0);
  const Vec dn = basis_ket(axis, 1);
  Vec v = Vec::Zero(4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      v(2 * i + j) = amp.alpha * up(i) * up(j) + amp.beta * dn(i) * dn(j);
  return v;
}

}  // namespace

DensityMatrix prepare_input(ProbeConfig config, const ProbeAmplitudes& amp) {
  switch (config) {
    case ProbeConfig::bell_z:
      return DensityMatrix::pure(bell_ket(0));
    case ProbeConfig::nonmax_z:
      return DensityMatrix::pure(nonmax_ket(0, amp));
    case ProbeConfig::nonmax_x:
      return DensityMatrix::pure(nonmax_ket(1, amp));
    case ProbeConfig::nonmax_y:
      return DensityMatrix::pure(nonmax_ket(2, amp));
    case ProbeConfig::double_bell: {
      const Mat pair = bell_ket(0) * bell_ket(0).adjoint();
      return DensityMatrix::from(tensor(pair, pair));
    }
  }
  fail(ErrorCategory::internal, "unknown probe config");
}

const std::array<Mat, 4>& bell_projectors() {
  static const std::array<Mat, 4> projectors = [] {
    std::array<Mat, 4> p;
    for (int b = 0; b < 4; ++b) {
      const Vec ket = bell_ket(b);
      p[b] = ket * ket.adjoint();
    }
    return p;
  }();
  return projectors;
}

// ---------------------------------------------------------------------------
// Measurement records
// ---------------------------------------------------------------------------

std::vector<double> MeasurementRecord::fractions() const {
  if (!sampled) return probabilities;
  std::vector<double> f(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    f[i] = static_cast<double>(counts[i]) / static_cast<double>(n_shots);
  return f;
}

std::string MeasurementRecord::outcome_label(int index) const {
  if (config == ProbeConfig::double_bell)
    return std::string(bell_label(index / 4)) + ":" + bell_label(index % 4);
  return bell_label(index);
}

MeasurementRecord outcome_probabilities(ProbeConfig config, const Dynamics& dyn, double t,
                                        const ProbeAmplitudes& amp) {
  if (t < 0.0) fail(ErrorCategory::config, "evolution time must be nonnegative");
  const bool pair_config = config != ProbeConfig::double_bell;
  if (pair_config && dyn.system_qubits() != 1)
    fail(ErrorCategory::config, "single-qubit probe configs need single-qubit dynamics");
  if (!pair_config && dyn.system_qubits() != 2)
    fail(ErrorCategory::config, "the double-Bell config needs two-qubit dynamics");

  const DensityMatrix input = prepare_input(config, amp);
  MeasurementRecord rec;
  rec.config = config;
  rec.amp = amp;
  rec.t = t;

  const auto& bells = bell_projectors();
  if (pair_config) {
    // Register (A, B): channel on A, ancilla B idle.
    const Channel e = dyn.channel_at(t).embed_on_qubit(2, 0);
    const Mat out = e.apply(input.m);
    rec.probabilities.resize(4);
    for (int k = 0; k < 4; ++k)
      rec.probabilities[k] = std::real((bells[k] * out).trace());
  } else {
    // Register (A1, B1, A2, B2): channel on (A1, A2), joint BSM on both pairs.
    const Channel e = dyn.channel_at(t).embed_on_pair(4, 0, 2);
    const Mat out = e.apply(input.m);
    rec.probabilities.resize(16);
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) {
        const Mat joint = tensor(bells[j], bells[k]);
        rec.probabilities[4 * j + k] = std::real((joint * out).trace());
      }
  }

  double sum = 0.0;
  for (double& p : rec.probabilities) {
    if (p < -kStructuralTol)
      fail(ErrorCategory::internal, "negative outcome probability");
    if (p < 0.0) p = 0.0;
    sum += p;
  }
  if (std::abs(sum - 1.0) > kStructuralTol)
    fail(ErrorCategory::internal, "outcome probabilities must sum to one");
  return rec;
}

MeasurementRecord sample_outcomes(const MeasurementRecord& exact, std::int64_t n_shots,
                                  std::uint64_t seed, std::uint64_t time_index) {
  if (exact.sampled) fail(ErrorCategory::config, "sample_outcomes needs an exact record");
  if (n_shots < 1) fail(ErrorCategory::config, "n_shots must be at least 1");
  MeasurementRecord rec = exact;
  rec.sampled = true;
  rec.n_shots = n_shots;
  rec.seed = seed;
  rec.time_index = time_index;
  CounterRng rng(mix_key(seed, static_cast<std::uint64_t>(probe_config_id(exact.config)),
                         time_index));
  rec.counts = multinomial_sample(exact.probabilities, n_shots, rng);
  return rec;
}

// ---------------------------------------------------------------------------
// Normalizer statistics
// ---------------------------------------------------------------------------

namespace {

struct GroupingTable {
  // Bell indices in the +1 / -1 stabilizer branches, ordered so the first
  // entry carries normalizer eigenvalue +1 within its branch.
  int plus[2];
  int minus[2];
};

// Derived per config from the stabilizer of the probe and the Bell-basis
// eigenvalues of the normalizer (X (x) X for the z config, Z (x) Z otherwise).
GroupingTable grouping_for(ProbeConfig config) {
  switch (config) {
    case ProbeConfig::nonmax_z: return {{0, 3}, {1, 2}};  // c+ = f(Phi+)-f(Phi-)
    case ProbeConfig::nonmax_x: return {{0, 1}, {3, 2}};  // c+ = f(Phi+)-f(Psi+)
    case ProbeConfig::nonmax_y: return {{3, 1}, {0, 2}};  // c+ = f(Phi-)-f(Psi+)
    default:
      fail(ErrorCategory::config, "normalizer statistics need a non-maximal config");
  }
}

}  // namespace

NormalizerStats normalizer_statistics(const MeasurementRecord& record) {
  const GroupingTable g = grouping_for(record.config);
  const std::vector<double> f = record.fractions();
  if (f.size() != 4)
    fail(ErrorCategory::config, "normalizer statistics need a 4-outcome record");

  NormalizerStats st;
  st.config = record.config;
  st.sampled = record.sampled;
  st.n_shots = record.n_shots;
  st.a = record.amp.a_constant();
  st.b = record.amp.b_constant();
  st.p_plus = f[g.plus[0]] + f[g.plus[1]];
  st.p_minus = f[g.minus[0]] + f[g.minus[1]];
  if (st.p_plus >= 1e-12) st.c_plus = f[g.plus[0]] - f[g.plus[1]];
  if (st.p_minus >= 1e-12) st.c_minus = f[g.minus[0]] - f[g.minus[1]];
  return st;
}

}  // namespace dcqd
