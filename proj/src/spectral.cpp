#include "dcqd/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "dcqd/error.hpp"
#include "dcqd/estimate.hpp"
#include "dcqd/protocol.hpp"
#include "dcqd/rng.hpp"

namespace dcqd {

SamplingSchedule make_schedule(double j_max, int n_samples, double oversample) {
  if (!(j_max > 0.0))
    fail(ErrorCategory::config, "make_schedule: the coupling bound must be positive");
  if (n_samples < 4)
    fail(ErrorCategory::config, "make_schedule: at least 4 samples are required");
  if (!(oversample >= 2.0))
    fail(ErrorCategory::config,
         "make_schedule: oversample below 2 cannot satisfy the sampling "
         "criterion for the doubled signal frequency");

  SamplingSchedule s;
  s.j_max = j_max;
  s.oversample = oversample;
  s.tau = M_PI / (oversample * j_max);
  s.nyquist_critical = oversample < 2.0 + 1e-12;
  s.times.reserve(n_samples);
  for (int k = 1; k <= n_samples; ++k) s.times.push_back(k * s.tau);
  return s;
}

FrequencyEstimate extract_frequency(const std::vector<double>& times,
                                    const std::vector<double>& values,
                                    const std::vector<double>& stderrs,
                                    std::optional<double> declared_j_max) {
  const int n = static_cast<int>(values.size());
  if (n < 4 || times.size() != values.size())
    fail(ErrorCategory::config,
         "extract_frequency: need at least 4 equally many times and values");
  if (!stderrs.empty() && stderrs.size() != values.size())
    fail(ErrorCategory::config,
         "extract_frequency: per-point errors must match the series length");
  const double tau = times[1] - times[0];
  if (!(tau > 0.0))
    fail(ErrorCategory::config, "extract_frequency: times must increase");
  for (int k = 1; k + 1 < n; ++k)
    if (std::abs((times[k + 1] - times[k]) - tau) > 1e-9 * tau)
      fail(ErrorCategory::config, "extract_frequency: time grid is not uniform");

  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  std::vector<double> centered(n);
  double scale = 0.0;
  for (int k = 0; k < n; ++k) {
    centered[k] = values[k] - mean;
    scale = std::max(scale, std::abs(centered[k]));
  }
  if (scale <= 1e-12 * (std::abs(mean) + 1.0))
    fail(ErrorCategory::no_signal, "extract_frequency: the series is constant");

  // Direct DFT of the zero-padded series over the positive-frequency bins.
  // Padding refines the grid the quadratic interpolation works on.
  const int m = 8 * n;
  const int half = m / 2;
  std::vector<double> amp(half + 1, 0.0);
  std::vector<double> power(half + 1, 0.0);
  for (int j = 1; j <= half; ++j) {
    std::complex<double> acc(0.0, 0.0);
    const double w = -2.0 * M_PI * j / m;
    for (int k = 0; k < n; ++k)
      acc += centered[k] * std::complex<double>(std::cos(w * k), std::sin(w * k));
    amp[j] = std::abs(acc);
    power[j] = std::norm(acc);
  }

  int peak = 1;
  for (int j = 2; j <= half; ++j)
    if (power[j] > power[peak]) peak = j;

  std::vector<double> sorted(power.begin() + 1, power.end());
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double median = sorted[sorted.size() / 2];
  if (power[peak] <= 3.0 * median)
    fail(ErrorCategory::no_signal,
         "extract_frequency: no dominant peak rises above the spectrum's "
         "median level");
  if (!stderrs.empty()) {
    // Expected white-noise power per bin is the summed per-point variance.
    double noise_power = 0.0;
    for (double s : stderrs) noise_power += s * s;
    if (power[peak] <= 9.0 * noise_power)
      fail(ErrorCategory::no_signal,
           "extract_frequency: the peak is consistent with shot noise alone");
  }

  // Quadratic refinement on the amplitude of the three bins around the peak.
  double delta = 0.0;
  if (peak > 1 && peak < half) {
    const double a = amp[peak - 1], b = amp[peak], c = amp[peak + 1];
    const double denom = a - 2.0 * b + c;
    if (denom < 0.0) delta = 0.5 * (a - c) / denom;
    delta = std::max(-0.5, std::min(0.5, delta));
  }

  FrequencyEstimate est;
  est.f = (peak + delta) / (m * tau);
  est.peak_power = power[peak];

  double sigma_bar = 0.0;
  if (!stderrs.empty())
    sigma_bar = std::accumulate(stderrs.begin(), stderrs.end(), 0.0) / n;
  est.delta_f = 2.0 * std::max(sigma_bar, 1e-15) / (n * tau);

  if (declared_j_max)
    est.aliased = *declared_j_max / M_PI > 1.0 / (2.0 * tau) * (1.0 + 1e-12);
  return est;
}

// ---------------------------------------------------------------------------

namespace {

struct RepeatOutcome {
  double sq_err[3] = {0.0, 0.0, 0.0};  // per-axis squared coupling error
  double f = 0.0;
  double delta_f = 0.0;
  double rel_df_model = 0.0;
  double rel_df_emp = 0.0;
  bool failed = false;  // captured error; rethrown after the parallel region
  ErrorCategory category = ErrorCategory::internal;
  std::string message;
};

}  // namespace

std::vector<ScalingCellResult> scaling_study(const ScalingStudyConfig& cfg,
                                             Exec exec,
                                             std::vector<ScalingItemResult>* item_rows) {
  if (cfg.n_samples_grid.empty() || cfg.n_shots_grid.empty())
    fail(ErrorCategory::config, "scaling_study: the grid must be non-empty");
  if (cfg.repeats < 1)
    fail(ErrorCategory::config, "scaling_study: at least one repeat is required");

  const double j_true = cfg.h.magnitude();
  if (!(j_true > 0.0))
    fail(ErrorCategory::config, "scaling_study: the coupling must not vanish");
  const double f_true = j_true / M_PI;
  const auto dir = cfg.h.direction();
  const auto dyn = Dynamics::of(cfg.h);

  struct Cell {
    SamplingSchedule schedule;
    std::vector<MeasurementRecord> exact;  // one per schedule point
    int probe_index = 0;                   // point closest to j_max t = pi/4
    int n_samples = 0;
    std::int64_t n_shots = 0;
  };

  // Exact records are shared by every repeat of a cell.
  std::vector<Cell> cells;
  for (int ns : cfg.n_samples_grid) {
    Cell cell;
    cell.schedule = make_schedule(cfg.j_max, ns, cfg.oversample);
    cell.n_samples = ns;
    for (double t : cell.schedule.times)
      cell.exact.push_back(outcome_probabilities(ProbeConfig::bell_z, dyn, t));
    double best = 1e300;
    for (int k = 0; k < ns; ++k) {
      const double d = std::abs(cfg.j_max * cell.schedule.times[k] - M_PI / 4.0);
      if (d < best) {
        best = d;
        cell.probe_index = k;
      }
    }
    cells.push_back(std::move(cell));
  }

  // Flatten (cell, shots, repeat) into independent work items.
  struct Item {
    int cell = 0;
    std::int64_t n_shots = 0;
    int repeat = 0;
  };
  std::vector<Item> items;
  for (int c = 0; c < static_cast<int>(cells.size()); ++c)
    for (std::int64_t ne : cfg.n_shots_grid)
      for (int r = 0; r < cfg.repeats; ++r) items.push_back({c, ne, r});

  std::vector<RepeatOutcome> outcomes(items.size());

  const auto run_item = [&](int idx) {
    const Item& it = items[idx];
    const Cell& cell = cells[it.cell];
    const int ns = cell.n_samples;
    const std::uint64_t key =
        mix_key(cfg.seed, static_cast<std::uint64_t>(ns),
                static_cast<std::uint64_t>(it.n_shots),
                static_cast<std::uint64_t>(it.repeat));

    std::vector<double> series(ns), errs(ns);
    MeasurementRecord probe_sample;
    for (int k = 0; k < ns; ++k) {
      const auto rec = sample_outcomes(cell.exact[k], it.n_shots, key,
                                       static_cast<std::uint64_t>(k));
      const auto f = rec.fractions();
      series[k] = f[0];
      errs[k] = std::sqrt(f[0] * (1.0 - f[0]) / static_cast<double>(it.n_shots));
      if (k == cell.probe_index) probe_sample = rec;
    }

    RepeatOutcome& out = outcomes[idx];
    const auto fe =
        extract_frequency(cell.schedule.times, series, errs, cfg.j_max);
    out.f = fe.f;
    out.delta_f = fe.delta_f;
    out.rel_df_model = fe.delta_f / fe.f;
    out.rel_df_emp = std::abs(fe.f - f_true) / f_true;

    const auto mag = estimate_direction_magnitudes(probe_sample);
    for (int a = 0; a < 3; ++a) {
      const double est = mag.j_magnitude * mag.components[a];
      const double err = est - j_true * std::abs(dir[a]);
      out.sq_err[a] = err * err;
    }
  };

  // Exceptions must not escape the parallel region; capture per item and
  // rethrow the first one (in grid order) afterwards.
  const auto run_item_guarded = [&](int idx) {
    try {
      run_item(idx);
    } catch (const Error& e) {
      outcomes[idx].failed = true;
      outcomes[idx].category = e.category();
      outcomes[idx].message = e.what();
    } catch (const std::exception& e) {
      outcomes[idx].failed = true;
      outcomes[idx].message = e.what();
    }
  };

  const int total = static_cast<int>(items.size());
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < total; ++i) run_item_guarded(i);
  } else {
    for (int i = 0; i < total; ++i) run_item_guarded(i);
  }
  for (const RepeatOutcome& o : outcomes)
    if (o.failed) throw Error(o.category, o.message);

  // Deterministic reduction in grid order.
  if (item_rows) item_rows->clear();
  std::vector<ScalingCellResult> table;
  int idx = 0;
  for (int c = 0; c < static_cast<int>(cells.size()); ++c) {
    for (std::int64_t ne : cfg.n_shots_grid) {
      ScalingCellResult row;
      row.n_samples = cells[c].n_samples;
      row.n_shots = ne;
      row.repeats = cfg.repeats;
      double sq = 0.0;
      for (int r = 0; r < cfg.repeats; ++r, ++idx) {
        const RepeatOutcome& o = outcomes[idx];
        sq += o.sq_err[0] + o.sq_err[1] + o.sq_err[2];
        row.mean_rel_df_model += o.rel_df_model;
        row.mean_rel_df_emp += o.rel_df_emp;
        if (item_rows) {
          ScalingItemResult item;
          item.n_samples = row.n_samples;
          item.n_shots = ne;
          item.repeat = r;
          item.f_estimate = o.f;
          item.delta_f = o.delta_f;
          item.rel_err_f = o.rel_df_emp;
          item.sq_err_coupling = o.sq_err[0] + o.sq_err[1] + o.sq_err[2];
          item_rows->push_back(item);
        }
      }
      row.rmse_coupling = std::sqrt(sq / (3.0 * cfg.repeats));
      row.mean_rel_df_model /= cfg.repeats;
      row.mean_rel_df_emp /= cfg.repeats;
      table.push_back(row);
    }
  }
  return table;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    fail(ErrorCategory::config, "loglog_slope: need matching series, length >= 2");
  const int n = static_cast<int>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      fail(ErrorCategory::config, "loglog_slope: entries must be positive");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-12)
    fail(ErrorCategory::config, "loglog_slope: x values do not vary");
  return (n * sxy - sx * sy) / denom;
}

}  // namespace dcqd
