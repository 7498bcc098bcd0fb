#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dcqd/dynamics.hpp"

namespace dcqd {

// Time-sampling schedules, periodogram frequency extraction, and the
// Monte Carlo precision study. Measured Bell fractions oscillate at angular
// frequency 2J (cos^2/sin^2 forms), so all band-limit bookkeeping uses the
// doubled frequency 2J / 2 pi.

struct SamplingSchedule {
  double j_max = 0.0;      // declared coupling bound the schedule protects
  double oversample = 0.0; // sampling rate over the doubled band edge
  double tau = 0.0;        // sampling interval
  std::vector<double> times;  // t_k = k tau, k = 1..n
  bool nyquist_critical = false;  // oversample at the minimum allowed value

  int size() const { return static_cast<int>(times.size()); }
};

// tau = pi / (oversample * j_max): the sampling rate 1/tau is `oversample`
// times the highest signal frequency 2 j_max / 2 pi. Requires j_max > 0,
// n_samples >= 4, oversample >= 2; the minimum oversample emits the schedule
// with the nyquist_critical warning flag set.
SamplingSchedule make_schedule(double j_max, int n_samples, double oversample);

struct FrequencyEstimate {
  double f = 0.0;        // cycles per unit time
  double delta_f = 0.0;  // shot-noise model standard error, always > 0
  bool aliased = false;  // declared band limit exceeds the schedule's Nyquist rate
  double peak_power = 0.0;  // detrended periodogram peak (diagnostic)
};

// Dominant-frequency readout: remove the mean, zero-pad eightfold, take the
// direct DFT (series here are dozens of points, so no transform library is
// warranted), and refine the dominant peak with quadratic interpolation of
// the three surrounding bins. delta_f follows the shot-noise resolution
// model 2 sigma_bar / (n tau), which reduces to 1 / (n tau sqrt(N)) for
// binomial per-point errors sigma_bar ~ 1/(2 sqrt(N)). A flat series, or a
// peak indistinguishable from the noise floor implied by the per-point
// standard errors, fails with NO_SIGNAL. Passing the declared coupling bound
// raises `aliased` when that bound lies beyond what the sampling rate can
// represent, i.e. declared_j_max / pi > 1 / (2 tau).
FrequencyEstimate extract_frequency(
    const std::vector<double>& times, const std::vector<double>& values,
    const std::vector<double>& stderrs = {},
    std::optional<double> declared_j_max = std::nullopt);

// ---------------------------------------------------------------------------
// Monte Carlo precision study.

enum class Exec { serial, parallel };

struct ScalingStudyConfig {
  SingleQubitHamiltonian h{1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0};
  double j_max = 1.0;  // declared bound; sets the schedule and the probe time
  double oversample = 4.0;
  std::vector<int> n_samples_grid;          // schedule lengths
  std::vector<std::int64_t> n_shots_grid;   // shots per time point
  int repeats = 50;
  std::uint64_t seed = 1;
};

struct ScalingCellResult {
  int n_samples = 0;
  std::int64_t n_shots = 0;
  int repeats = 0;
  double rmse_coupling = 0.0;  // RMSE of |J_alpha| over repeats and axes
  double mean_rel_df_model = 0.0;  // mean reported delta_f / f
  double mean_rel_df_emp = 0.0;    // mean |f_hat - f_true| / f_true
};

// One row per (cell, repeat), in grid order; feeds the per-repeat CSV.
struct ScalingItemResult {
  int n_samples = 0;
  std::int64_t n_shots = 0;
  int repeat = 0;
  double f_estimate = 0.0;
  double delta_f = 0.0;          // reported resolution
  double rel_err_f = 0.0;        // |f_estimate - f_true| / f_true
  double sq_err_coupling = 0.0;  // squared coupling error summed over axes
};

// Full simulate-sample-estimate pipelines over the (n_samples, n_shots)
// grid. Each repeat samples every schedule point, extracts the oscillation
// frequency from the Phi+ fraction series, and inverts the coupling
// magnitudes at the schedule point closest to j_max t = pi/4. Cells and
// repeats are independent; the generator is keyed by
// (seed, n_samples, n_shots, repeat), so serial and parallel execution
// produce bit-identical tables.
std::vector<ScalingCellResult> scaling_study(
    const ScalingStudyConfig& cfg, Exec exec,
    std::vector<ScalingItemResult>* item_rows = nullptr);

// Least-squares slope of log y against log x. Requires positive entries and
// at least two distinct x values.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace dcqd
