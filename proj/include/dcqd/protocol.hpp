#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dcqd/dynamics.hpp"

namespace dcqd {

// ---------------------------------------------------------------------------
// Probe configurations
// ---------------------------------------------------------------------------

// bell_z:      maximally entangled |Phi+> probe, BSM reads the chi diagonal.
// nonmax_z/x/y: non-maximal pair alpha|00>+beta|11> in the z, x, or y product
//              basis; grouped BSM plus a Bell-diagonal normalizer reads one
//              imaginary first-row element and one real off-diagonal element.
// double_bell: two |Phi+> pairs probing a two-qubit exchange channel through a
//              joint BSM on both pairs.
enum class ProbeConfig { bell_z, nonmax_z, nonmax_x, nonmax_y, double_bell };

const char* probe_config_name(ProbeConfig c);
int probe_config_id(ProbeConfig c);

// ---------------------------------------------------------------------------
// Dynamics under test
// ---------------------------------------------------------------------------

struct Dynamics {
  enum class Kind { single_qubit, exchange, relaxation };
  Kind kind = Kind::single_qubit;
  SingleQubitHamiltonian single{};
  ExchangeHamiltonian exchange{};
  RelaxationParams relax{};

  static Dynamics of(const SingleQubitHamiltonian& h);
  static Dynamics of(const ExchangeHamiltonian& h);
  static Dynamics of(const RelaxationParams& p);

  // Channel on the probed system (2-dim for single-qubit kinds, 4-dim for
  // exchange) after evolution time t.
  Channel channel_at(double t) const;
  int system_qubits() const { return kind == Kind::exchange ? 2 : 1; }
};

// ---------------------------------------------------------------------------
// Probe preparation
// ---------------------------------------------------------------------------

// Amplitudes of the non-maximal probe. Validation margins: |alpha|, |beta|,
// | |alpha|-|beta| | and |Im(conj(alpha) beta)| all at least 1e-6, norm 1.
struct ProbeAmplitudes {
  Complex alpha{1.0, 0.0};
  Complex beta{0.0, 0.0};

  static ProbeAmplitudes validated(Complex alpha, Complex beta);
  // Default probe used by the CLI: alpha = 0.8, beta = 0.6 exp(i pi/4).
  static ProbeAmplitudes preset();

  double a_constant() const;  // tr(N rho)            = 2 Re(conj(alpha) beta)
  double b_constant() const;  // 2i tr(diag-axis N rho) = -4 Im(conj(alpha) beta)
};

// Input state: 2 qubits (probed A, ancilla B) for Bell/NonMax configs, 4
// qubits ordered A1, B1, A2, B2 for double_bell. bell_z and double_bell ignore
// the amplitudes.
DensityMatrix prepare_input(ProbeConfig config, const ProbeAmplitudes& amp);

// Bell projectors on a pair, Bell order (Phi+, Psi+, Psi-, Phi-).
const std::array<Mat, 4>& bell_projectors();

// ---------------------------------------------------------------------------
// Measurement records
// ---------------------------------------------------------------------------

struct MeasurementRecord {
  ProbeConfig config = ProbeConfig::bell_z;
  ProbeAmplitudes amp{};
  double t = 0.0;
  bool sampled = false;
  std::vector<double> probabilities;  // 4 Bell outcomes, or 16 joint (4*j + k)
  std::vector<std::int64_t> counts;   // empty in exact mode
  std::int64_t n_shots = 0;
  std::uint64_t seed = 0;
  std::uint64_t time_index = 0;

  // Outcome fractions: exact probabilities, or counts/N when sampled.
  std::vector<double> fractions() const;
  std::string outcome_label(int index) const;
};

// Exact BSM outcome distribution for a config at time t. The ancilla qubits
// evolve trivially.
MeasurementRecord outcome_probabilities(ProbeConfig config, const Dynamics& dyn,
                                        double t,
                                        const ProbeAmplitudes& amp = ProbeAmplitudes::preset());

// Multinomial draw from an exact record. The generator is keyed by
// (seed, config id, time index): identical inputs give identical counts
// independent of call order.
MeasurementRecord sample_outcomes(const MeasurementRecord& exact, std::int64_t n_shots,
                                  std::uint64_t seed, std::uint64_t time_index = 0);

// ---------------------------------------------------------------------------
// Normalizer statistics (non-maximal configs)
// ---------------------------------------------------------------------------

// Grouped branch probabilities p_± and the signed normalizer combinations c_±.
// Every config's normalizer is diagonal in the Bell basis, so c_± reduce to
// signed Bell-count combinations; a and b depend only on the preparation and
// are exact. A branch with probability below 1e-12 leaves its c unset.
struct NormalizerStats {
  ProbeConfig config = ProbeConfig::nonmax_z;
  double p_plus = 0.0, p_minus = 0.0;
  std::optional<double> c_plus, c_minus;
  double a = 0.0, b = 0.0;
  bool sampled = false;
  std::int64_t n_shots = 0;
};

NormalizerStats normalizer_statistics(const MeasurementRecord& record);

}  // namespace dcqd
