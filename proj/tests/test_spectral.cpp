#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dcqd/rng.hpp"
#include "dcqd/spectral.hpp"

using namespace dcqd;

namespace {

std::vector<double> cos2_series(const SamplingSchedule& s, double j) {
  std::vector<double> v;
  for (double t : s.times) v.push_back(std::cos(j * t) * std::cos(j * t));
  return v;
}

}  // namespace

TEST_CASE("make_schedule: interval formula and validation") {
  const auto s = make_schedule(1.0, 64, 4.0);
  CHECK(s.tau == doctest::Approx(M_PI / 4.0).epsilon(1e-12));
  REQUIRE(s.size() == 64);
  CHECK(s.times.front() == doctest::Approx(s.tau));
  CHECK(s.times.back() == doctest::Approx(64 * s.tau));
  for (int k = 1; k < s.size(); ++k) CHECK(s.times[k] > s.times[k - 1]);
  CHECK(!s.nyquist_critical);

  CHECK(make_schedule(1.0, 8, 2.0).nyquist_critical);
  CHECK(make_schedule(2.5, 16, 4.0).tau == doctest::Approx(M_PI / 10.0));

  CHECK_THROWS_AS(make_schedule(0.0, 16, 4.0), Error);
  CHECK_THROWS_AS(make_schedule(1.0, 3, 4.0), Error);
  CHECK_THROWS_AS(make_schedule(1.0, 16, 1.9), Error);
}

TEST_CASE("extract_frequency: exact series lands within half a percent") {
  for (double j : {0.4, 0.7, 1.0}) {
    const auto s = make_schedule(1.0, 128, 4.0);
    const auto est = extract_frequency(s.times, cos2_series(s, j));
    const double f_true = j / M_PI;  // cos^2 oscillates at angular frequency 2j
    CHECK(std::abs(est.f - f_true) / f_true < 0.005);
    CHECK(est.delta_f > 0.0);
    CHECK(!est.aliased);
  }
}

TEST_CASE("extract_frequency: peak location is scale and offset invariant") {
  const auto s = make_schedule(1.0, 64, 4.0);
  const auto base = cos2_series(s, 0.8);
  auto shifted = base;
  for (double& v : shifted) v = 3.0 * v + 0.7;
  const auto e1 = extract_frequency(s.times, base);
  const auto e2 = extract_frequency(s.times, shifted);
  CHECK(e1.f == doctest::Approx(e2.f).epsilon(1e-12));
}

TEST_CASE("extract_frequency: flat and noise-only series fail with NO_SIGNAL") {
  const auto s = make_schedule(1.0, 64, 4.0);
  const std::vector<double> flat(64, 0.37);
  try {
    extract_frequency(s.times, flat);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::no_signal);
  }

  // Small fluctuations below the per-point error bars carry no signal.
  CounterRng rng(mix_key(7, 7));
  std::vector<double> noisy(64), errs(64, 0.01);
  for (double& v : noisy) v = 0.5 + 1e-3 * (rng.uniform() - 0.5);
  try {
    extract_frequency(s.times, noisy, errs);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::no_signal);
  }
}

TEST_CASE("extract_frequency: input validation") {
  const auto s = make_schedule(1.0, 8, 4.0);
  CHECK_THROWS_AS(extract_frequency({0.1, 0.2, 0.3}, {1, 2, 3}), Error);
  auto warped = s.times;
  warped[4] += 0.1;
  CHECK_THROWS_AS(extract_frequency(warped, cos2_series(s, 1.0)), Error);
  CHECK_THROWS_AS(
      extract_frequency(s.times, cos2_series(s, 1.0), {0.1, 0.1}), Error);
}

TEST_CASE("extract_frequency: aliased flag follows the declared bound") {
  const auto s = make_schedule(1.0, 64, 4.0);  // Nyquist at 1/(2 tau) = 2/pi
  const auto series = cos2_series(s, 3.0);     // true frequency above Nyquist

  const auto honest = extract_frequency(s.times, series, {}, 3.0);
  CHECK(honest.aliased);
  // The folded peak sits inside the band, far from the true frequency.
  CHECK(std::abs(honest.f - 3.0 / M_PI) > 0.1);

  const auto unaware = extract_frequency(s.times, series, {}, 1.0);
  CHECK(!unaware.aliased);

  // In-band signal with an in-band declaration never raises the flag.
  const auto clean = extract_frequency(s.times, cos2_series(s, 1.0), {}, 1.0);
  CHECK(!clean.aliased);
}

TEST_CASE("extract_frequency: reported error follows the resolution model") {
  const auto s = make_schedule(1.0, 32, 4.0);
  const double n_shots = 1e4;
  const std::vector<double> errs(32, 0.5 / std::sqrt(n_shots));
  const auto est = extract_frequency(s.times, cos2_series(s, 1.0), errs);
  const double model = 1.0 / (32 * s.tau * std::sqrt(n_shots));
  CHECK(est.delta_f == doctest::Approx(model).epsilon(1e-12));
}

TEST_CASE("scaling_study: determinism and serial/parallel equivalence") {
  ScalingStudyConfig cfg;
  cfg.n_samples_grid = {8, 16};
  cfg.n_shots_grid = {2000};
  cfg.repeats = 3;
  cfg.seed = 99;

  const auto t1 = scaling_study(cfg, Exec::serial);
  const auto t2 = scaling_study(cfg, Exec::serial);
  const auto t3 = scaling_study(cfg, Exec::parallel);
  REQUIRE(t1.size() == 2);
  for (size_t i = 0; i < t1.size(); ++i) {
    CHECK(t1[i].rmse_coupling == t2[i].rmse_coupling);
    CHECK(t1[i].rmse_coupling == t3[i].rmse_coupling);
    CHECK(t1[i].mean_rel_df_model == t3[i].mean_rel_df_model);
    CHECK(t1[i].mean_rel_df_emp == t3[i].mean_rel_df_emp);
    CHECK(t1[i].rmse_coupling > 0.0);
    CHECK(t1[i].mean_rel_df_model > 0.0);
  }
  // Doubling the schedule halves the reported relative resolution.
  CHECK(t1[1].mean_rel_df_model ==
        doctest::Approx(t1[0].mean_rel_df_model / 2.0).epsilon(0.05));

  ScalingStudyConfig bad = cfg;
  bad.n_samples_grid.clear();
  CHECK_THROWS_AS(scaling_study(bad, Exec::serial), Error);
}

TEST_CASE("loglog_slope fits power laws exactly") {
  std::vector<double> x{10, 100, 1000, 10000};
  std::vector<double> y;
  for (double v : x) y.push_back(3.7 * std::pow(v, -1.5));
  CHECK(loglog_slope(x, y) == doctest::Approx(-1.5).epsilon(1e-12));
  CHECK_THROWS_AS(loglog_slope({1.0, 2.0}, {1.0, -2.0}), Error);
  CHECK_THROWS_AS(loglog_slope({1.0}, {1.0}), Error);
}
