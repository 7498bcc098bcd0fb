#include "dcqd/estimate.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "dcqd/error.hpp"

namespace dcqd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double fraction_variance(const MeasurementRecord& rec, double f) {
  if (!rec.sampled) return 0.0;
  return f * (1.0 - f) / static_cast<double>(rec.n_shots);
}

// Noise floor below which a denominator is treated as vanishing.
double denominator_floor(const MeasurementRecord& rec) {
  if (!rec.sampled) return 1e-6;
  return std::max(1e-6, 10.0 / static_cast<double>(rec.n_shots));
}

int sign_of(double value, double threshold) {
  if (value > threshold) return 1;
  if (value < -threshold) return -1;
  return 0;
}

void require_config(const MeasurementRecord& rec, ProbeConfig want,
                    const char* who) {
  if (rec.config != want)
    fail(ErrorCategory::config,
         std::string(who) + ": record comes from probe configuration '" +
             probe_config_name(rec.config) + "'");
}

}  // namespace

// ---------------------------------------------------------------------------

DirectionEstimate estimate_direction_magnitudes(const MeasurementRecord& rec) {
  require_config(rec, ProbeConfig::bell_z, "estimate_direction_magnitudes");
  const auto f = rec.fractions();
  const double n = static_cast<double>(rec.n_shots);

  DirectionEstimate est;
  est.t = rec.t;
  est.sampled = rec.sampled;
  est.n_shots = rec.n_shots;
  est.p_identity = f[0];
  est.denominator = 1.0 - f[0];

  if (est.denominator < denominator_floor(rec))
    fail(ErrorCategory::degenerate_time,
         "estimate_direction_magnitudes: identity outcome saturates "
         "(1 - p = " +
             std::to_string(est.denominator) +
             "); lengthen the evolution time or raise the shot count");

  const double d = est.denominator;
  const double var_p0 = fraction_variance(rec, f[0]);
  for (int k = 0; k < 3; ++k) {
    const double p = f[k + 1];
    const double g2 = p / d;
    const double g = std::sqrt(std::max(0.0, g2));
    est.components[k] = g;
    if (!rec.sampled || g2 == 0.0) {
      est.stderrs[k] = 0.0;
      continue;
    }
    // Delta method on g^2 = p / (1 - p0) with multinomial covariances.
    const double var_p = fraction_variance(rec, p);
    const double cov = -p * f[0] / n;  // Cov(p, p0)
    const double var_g2 = var_p / (d * d) + g2 * g2 * var_p0 / (d * d) +
                          2.0 * g2 * cov / (d * d);
    est.stderrs[k] = g > 0.0 ? std::sqrt(std::max(0.0, var_g2)) / (2.0 * g) : 0.0;
  }

  // |J| from the identity outcome, principal branch of cos^2(J t).
  const double root = std::sqrt(std::min(1.0, std::max(0.0, f[0])));
  est.j_magnitude = rec.t > 0.0 ? std::acos(root) / rec.t : 0.0;
  if (rec.sampled && rec.t > 0.0 && f[0] > 0.0 && f[0] < 1.0)
    est.stderr_j =
        std::sqrt(var_p0 / (4.0 * f[0] * (1.0 - f[0]))) / rec.t;
  return est;
}

// ---------------------------------------------------------------------------

namespace {

// Per-configuration coefficient tables for the stacked linear system. Rows
// are expressed over the unknown vector (chi00, chi11, chi22, chi33, u, v)
// where u is the imaginary first-row entry and v the real pairwise entry the
// configuration exposes.
struct ConfigTable {
  int direct_index;               // u = Im chi(0, direct_index)
  std::pair<int, int> pair;       // v = Re chi(pair)
  std::array<double, 4> plus;     // p_plus row over the diagonal
  std::array<double, 4> minus;    // p_minus row
  std::array<double, 4> c_plus;   // diagonal part of the c_plus row (times a)
  double u_coeff;                 // coefficient of u in the c_plus row (times b)
  std::array<double, 4> c_minus;  // diagonal part of the c_minus row (times a)
  double v_coeff;                 // coefficient of v in the c_minus row (times b)
};

ConfigTable config_table(ProbeConfig config) {
  switch (config) {
    case ProbeConfig::nonmax_z:
      return {3, {1, 2}, {1, 0, 0, 1}, {0, 1, 1, 0},
              {1, 0, 0, -1}, +1.0, {0, 1, -1, 0}, -1.0};
    case ProbeConfig::nonmax_x:
      return {1, {2, 3}, {1, 1, 0, 0}, {0, 0, 1, 1},
              {1, -1, 0, 0}, +1.0, {0, 0, -1, 1}, +1.0};
    case ProbeConfig::nonmax_y:
      return {2, {1, 3}, {1, 0, 1, 0}, {0, 1, 0, 1},
              {1, 0, -1, 0}, +1.0, {0, -1, 0, 1}, -1.0};
    default:
      fail(ErrorCategory::config,
           "solve_offdiagonal: statistics must come from a non-maximal probe "
           "configuration");
  }
}

}  // namespace

OffdiagonalSolve solve_offdiagonal(const std::array<double, 4>& bell_diag,
                                   const NormalizerStats& st) {
  const ConfigTable tab = config_table(st.config);
  if (std::abs(st.b) < 1e-6)
    fail(ErrorCategory::conditioning,
         "solve_offdiagonal: probe phase constant too small to separate the "
         "off-diagonal terms");

  OffdiagonalSolve out;
  out.config = st.config;
  out.direct_index = tab.direct_index;
  out.product_pair = tab.pair;
  // The c statistics are differences of outcome fractions scaled by 1/b, so
  // their sampling noise is at most ~sqrt(2/N) (1 + |a|) / |b|.
  out.noise_scale =
      st.sampled ? (1.0 + std::abs(st.a)) *
                       std::sqrt(2.0 / static_cast<double>(st.n_shots)) /
                       std::abs(st.b)
                 : 0.0;

  // Column layout: 4 diagonal entries, then u (if measured), then v.
  const bool has_u = st.c_plus.has_value();
  const bool has_v = st.c_minus.has_value();
  const int cols = 4 + (has_u ? 1 : 0) + (has_v ? 1 : 0);
  const int rows = 6 + (has_u ? 1 : 0) + (has_v ? 1 : 0);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
  Eigen::VectorXd rhs(rows);

  int r = 0;
  for (int k = 0; k < 4; ++k, ++r) {
    m(r, k) = 1.0;
    rhs(r) = bell_diag[k];
  }
  for (int k = 0; k < 4; ++k) m(r, k) = tab.plus[k];
  rhs(r++) = st.p_plus;
  for (int k = 0; k < 4; ++k) m(r, k) = tab.minus[k];
  rhs(r++) = st.p_minus;
  if (has_u) {
    for (int k = 0; k < 4; ++k) m(r, k) = st.a * tab.c_plus[k];
    m(r, 4) = st.b * tab.u_coeff;
    rhs(r++) = *st.c_plus;
  }
  if (has_v) {
    for (int k = 0; k < 4; ++k) m(r, k) = st.a * tab.c_minus[k];
    m(r, has_u ? 5 : 4) = st.b * tab.v_coeff;
    rhs(r++) = *st.c_minus;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  out.condition_number = smin > 0.0 ? sv(0) / smin : kInf;
  if (!(out.condition_number < 1e6))
    fail(ErrorCategory::conditioning,
         "solve_offdiagonal: stacked system condition number " +
             std::to_string(out.condition_number) + " exceeds 1e6");

  const Eigen::VectorXd x = svd.solve(rhs);
  for (int k = 0; k < 4; ++k) out.diag[k] = x(k);
  if (has_u) out.direct = x(4);
  if (has_v) out.product = x(has_u ? 5 : 4);
  return out;
}

// ---------------------------------------------------------------------------

SignReconstruction reconstruct_direction_signs(
    const std::vector<OffdiagonalSolve>& solves, const DirectionEstimate& mags) {
  SignReconstruction out;

  // A component is treated as absent when its magnitude is consistent with
  // zero; its sign stays 0 and it is excluded from all product checks.
  std::array<bool, 3> present{};
  for (int k = 0; k < 3; ++k)
    present[k] =
        mags.components[k] > std::max(1e-9, 3.0 * mags.stderrs[k]);

  double noise = 0.0;
  for (const auto& s : solves) noise = std::max(noise, s.noise_scale);
  const double threshold = std::max(1e-9, 3.0 * noise);

  bool seen[3] = {false, false, false};  // configs z, x, y by direct axis
  std::array<int, 3> product_sign{0, 0, 0};  // product over pair excluding axis k

  for (const auto& s : solves) {
    const int axis = s.direct_index - 1;  // Pauli index -> component index
    seen[axis] = true;
    if (s.direct && present[axis]) {
      const int sg = sign_of(*s.direct, threshold);
      if (sg != 0) {
        if (out.signs[axis] != 0 && out.signs[axis] != sg)
          fail(ErrorCategory::model_violation,
               "reconstruct_direction_signs: repeated configurations disagree "
               "on a component sign");
        out.signs[axis] = sg;
      }
    }
    if (s.product) {
      const int i = s.product_pair.first - 1;
      const int j = s.product_pair.second - 1;
      if (present[i] && present[j]) {
        const int sg = sign_of(*s.product, threshold);
        const int excluded = 3 - i - j;
        if (sg != 0) product_sign[excluded] = sg;
      }
    }
  }

  // Products fill in a missing direct reading and cross-check present ones.
  for (int excluded = 0; excluded < 3; ++excluded) {
    if (product_sign[excluded] == 0) continue;
    const int i = excluded == 0 ? 1 : 0;
    const int j = excluded == 2 ? 1 : 2;
    const int si = out.signs[i];
    const int sj = out.signs[j];
    if (si != 0 && sj != 0) {
      if (si * sj != product_sign[excluded])
        fail(ErrorCategory::model_violation,
             "reconstruct_direction_signs: pairwise chi entry contradicts the "
             "component signs");
    } else if (si != 0 && present[j]) {
      out.signs[j] = product_sign[excluded] * si;
      out.notes.push_back(std::string("sign of component ") +
                          "xyz"[j] + " inferred from a pairwise entry");
    } else if (sj != 0 && present[i]) {
      out.signs[i] = product_sign[excluded] * sj;
      out.notes.push_back(std::string("sign of component ") +
                          "xyz"[i] + " inferred from a pairwise entry");
    }
  }

  out.global_sign_fixed = seen[0] && seen[1] && seen[2];
  for (int k = 0; k < 3; ++k)
    if (present[k] && out.signs[k] == 0)
      out.notes.push_back(std::string("sign of component ") + "xyz"[k] +
                          " unresolved by the supplied configurations");
  return out;
}

SingleQubitEstimate estimate_single_qubit(
    const MeasurementRecord& bell_record,
    const std::vector<MeasurementRecord>& nonmax_records) {
  SingleQubitEstimate out;
  out.magnitudes = estimate_direction_magnitudes(bell_record);

  std::array<double, 4> diag{};
  const auto f = bell_record.fractions();
  for (int k = 0; k < 4; ++k) diag[k] = f[k];

  for (const auto& rec : nonmax_records)
    out.solves.push_back(solve_offdiagonal(diag, normalizer_statistics(rec)));
  out.signs = reconstruct_direction_signs(out.solves, out.magnitudes);

  for (int k = 0; k < 3; ++k)
    out.couplings[k] = out.signs.signs[k] * out.magnitudes.j_magnitude *
                       out.magnitudes.components[k];
  return out;
}

// ---------------------------------------------------------------------------

RelaxationEstimate estimate_relaxation(const MeasurementRecord& rec) {
  require_config(rec, ProbeConfig::bell_z, "estimate_relaxation");
  if (rec.t <= 0.0)
    fail(ErrorCategory::degenerate_time,
         "estimate_relaxation: rates need a positive evolution time");
  const auto f = rec.fractions();
  const double n = static_cast<double>(rec.n_shots);
  const double t = rec.t;

  RelaxationEstimate est;
  est.sampled = rec.sampled;
  est.n_shots = rec.n_shots;

  // Decoherence: f0 - f3 = exp(-t / T2).
  const double arg2 = f[0] - f[3];
  // Relaxation: 1 - 2 f1 - 2 f2 = exp(-t / T1).
  const double arg1 = 1.0 - 2.0 * (f[1] + f[2]);

  const auto invert = [&](double arg, double var_arg, const char* label,
                          double& rate, double& se) {
    if (arg <= 0.0)
      fail(ErrorCategory::degenerate_time,
           std::string("estimate_relaxation: ") + label +
               " decay argument is not positive (" + std::to_string(arg) +
               "); reduce the evolution time or increase the shot count");
    if (arg > 1.0) {
      est.notes.push_back(std::string(label) +
                          " decay argument exceeded 1; rate clamped to 0");
      rate = 0.0;
      se = rec.sampled ? std::sqrt(var_arg) / t : 0.0;
      return;
    }
    rate = -std::log(arg) / t;
    se = rec.sampled ? std::sqrt(var_arg) / (t * arg) : 0.0;
  };

  double var2 = 0.0, var1 = 0.0;
  if (rec.sampled) {
    // Multinomial: Var(fi - fj) and Var(1 - 2(fi + fj)).
    var2 = (f[0] * (1 - f[0]) + f[3] * (1 - f[3]) + 2 * f[0] * f[3]) / n;
    const double s = f[1] + f[2];
    var1 = 4.0 * s * (1.0 - s) / n;
  }
  invert(arg2, var2, "decoherence", est.rate2, est.stderr_rate2);
  invert(arg1, var1, "relaxation", est.rate1, est.stderr_rate1);

  est.t1 = est.rate1 > 0.0 ? 1.0 / est.rate1 : kInf;
  est.t2 = est.rate2 > 0.0 ? 1.0 / est.rate2 : kInf;
  if (est.rate2 + 3.0 * (est.stderr_rate1 / 2.0 + est.stderr_rate2) <
      est.rate1 / 2.0)
    est.notes.push_back(
        "estimated decoherence rate sits below half the relaxation rate, "
        "outside the physical region");
  return est;
}

// ---------------------------------------------------------------------------

namespace {

// Joint-outcome indices carrying exchange information: II, XX, YY, ZZ.
constexpr int kIdx[4] = {0, 5, 10, 15};

void check_exchange_support(const MeasurementRecord& rec,
                            const std::vector<double>& f, const char* who) {
  double off = 0.0;
  for (int m = 0; m < 16; ++m)
    if (m != 0 && m != 5 && m != 10 && m != 15) off += f[m];
  const double floor =
      rec.sampled ? std::max(1e-9, 25.0 / static_cast<double>(rec.n_shots))
                  : 1e-9;
  if (off > floor)
    fail(ErrorCategory::model_violation,
         std::string(who) +
             ": mixed-label joint outcomes carry weight " +
             std::to_string(off) +
             ", which no exchange interaction can produce");
}

// Aliases of sin(2 J t) = v: J = (k pi + (-1)^k asin v) / (2 t), k >= 0.
std::vector<double> sine_aliases(double v, double t, int branches) {
  std::vector<double> out;
  const double base = std::asin(std::min(1.0, std::max(-1.0, v)));
  for (int k = 0; k <= branches; ++k) {
    const double val = (k * M_PI + (k % 2 == 0 ? base : -base)) / (2.0 * t);
    if (val >= 0.0) out.push_back(val);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](double a, double b) { return std::abs(a - b) < 1e-12; }),
            out.end());
  return out;
}

// Aliases of cos^2(J t) = w^2: J = (k pi +/- arccos w) / t, k >= 0. Both
// cosine signs alias because the squared value is what the data determine.
std::vector<double> cosine_aliases(double w, double t, int branches) {
  std::vector<double> out;
  const double base = std::acos(std::min(1.0, std::max(-1.0, w)));
  for (int k = 0; k <= branches; ++k) {
    out.push_back((k * M_PI + base) / t);
    const double lower = (k * M_PI - base) / t;
    if (lower >= 0.0) out.push_back(lower);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](double a, double b) { return std::abs(a - b) < 1e-12; }),
            out.end());
  return out;
}

}  // namespace

IsotropicEstimate estimate_isotropic_coupling(const MeasurementRecord& rec,
                                              int alias_branches) {
  require_config(rec, ProbeConfig::double_bell, "estimate_isotropic_coupling");
  const auto f = rec.fractions();
  check_exchange_support(rec, f, "estimate_isotropic_coupling");
  const double n = static_cast<double>(rec.n_shots);
  const double t = rec.t;
  if (t <= 0.0)
    fail(ErrorCategory::degenerate_time,
         "estimate_isotropic_coupling: coupling needs a positive evolution time");

  IsotropicEstimate est;
  est.sampled = rec.sampled;
  est.n_shots = rec.n_shots;

  // The three same-label channels must agree: each reads sin^2(2 J t) / 4.
  const double p[3] = {f[kIdx[1]], f[kIdx[2]], f[kIdx[3]]};
  const double mean = (p[0] + p[1] + p[2]) / 3.0;
  const double agree_floor =
      rec.sampled
          ? 5.0 * std::sqrt(2.0 * std::max(mean, 1e-12) / n) + 20.0 / n
          : 1e-9;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (std::abs(p[i] - p[j]) > agree_floor)
        fail(ErrorCategory::model_violation,
             "estimate_isotropic_coupling: same-label outcome fractions "
             "disagree; the couplings are not isotropic, use the axial "
             "estimator");

  // Inverse-variance weighted probability, then v = 2 sqrt(p).
  double pbar = mean;
  double var_pbar = 0.0;
  if (rec.sampled) {
    double wsum = 0.0, acc = 0.0;
    for (double pk : p) {
      const double var = std::max(pk * (1.0 - pk) / n, 1.0 / (n * n));
      const double w = 1.0 / var;
      wsum += w;
      acc += w * pk;
    }
    pbar = acc / wsum;
    var_pbar = 1.0 / wsum;
  }
  pbar = std::max(0.0, pbar);
  double v = 2.0 * std::sqrt(pbar);
  est.stderr_v = pbar > 0.0 ? std::sqrt(var_pbar) / std::sqrt(pbar) : 0.0;
  if (v > 1.0) {
    if (v > 1.0 + 3.0 * est.stderr_v + 1e-12)
      fail(ErrorCategory::model_violation,
           "estimate_isotropic_coupling: same-label fractions exceed the "
           "sin^2/4 bound beyond noise");
    est.notes.push_back("amplitude clamped to 1 (sampling excursion)");
    v = 1.0;
  }
  est.v = v;

  est.identity_residual = std::abs(f[0] - (1.0 - 3.0 * v * v / 4.0));
  const double id_floor =
      rec.sampled ? 5.0 * std::sqrt(std::max(f[0] * (1 - f[0]), 1e-12) / n) +
                        3.0 * v * est.stderr_v + 20.0 / n
                  : 1e-9;
  if (est.identity_residual > id_floor)
    fail(ErrorCategory::model_violation,
         "estimate_isotropic_coupling: identity outcome is inconsistent with "
         "the same-label channels");

  est.j_principal = std::asin(v) / (2.0 * t);
  const double dvdj = std::sqrt(std::max(0.0, 1.0 - v * v));
  est.stderr_j = dvdj > 1e-12 ? est.stderr_v / (2.0 * t * dvdj) : kInf;
  est.j_aliases = sine_aliases(v, t, alias_branches);
  return est;
}

AnisotropicEstimate estimate_anisotropic_couplings(const MeasurementRecord& rec,
                                                   int alias_branches) {
  require_config(rec, ProbeConfig::double_bell, "estimate_anisotropic_couplings");
  const auto f = rec.fractions();
  check_exchange_support(rec, f, "estimate_anisotropic_couplings");
  const double n = static_cast<double>(rec.n_shots);
  const double t = rec.t;
  if (t <= 0.0)
    fail(ErrorCategory::degenerate_time,
         "estimate_anisotropic_couplings: couplings need a positive evolution "
         "time");

  AnisotropicEstimate est;
  est.sampled = rec.sampled;
  est.n_shots = rec.n_shots;

  const double pxx = f[kIdx[1]];
  const double pyy = f[kIdx[2]];
  const double mean = (pxx + pyy) / 2.0;
  const double agree_floor =
      rec.sampled
          ? 5.0 * std::sqrt(2.0 * std::max(mean, 1e-12) / n) + 20.0 / n
          : 1e-9;
  if (std::abs(pxx - pyy) > agree_floor)
    fail(ErrorCategory::model_violation,
         "estimate_anisotropic_couplings: XX and YY outcome fractions differ, "
         "so the x and y couplings are not equal and this inversion does not "
         "apply");

  double pbar = mean;
  double var_pbar = 0.0;
  if (rec.sampled) {
    double wsum = 0.0, acc = 0.0;
    for (double pk : {pxx, pyy}) {
      const double var = std::max(pk * (1.0 - pk) / n, 1.0 / (n * n));
      const double w = 1.0 / var;
      wsum += w;
      acc += w * pk;
    }
    pbar = acc / wsum;
    var_pbar = 1.0 / wsum;
  }
  pbar = std::max(0.0, pbar);
  double v = 2.0 * std::sqrt(pbar);
  est.stderr_v_xy = pbar > 0.0 ? std::sqrt(var_pbar) / std::sqrt(pbar) : 0.0;
  if (v > 1.0) {
    if (v > 1.0 + 3.0 * est.stderr_v_xy + 1e-12)
      fail(ErrorCategory::model_violation,
           "estimate_anisotropic_couplings: XX/YY fractions exceed the "
           "sin^2/4 bound beyond noise");
    est.notes.push_back("xy amplitude clamped to 1 (sampling excursion)");
    v = 1.0;
  }
  est.v_xy = v;
  est.j_xy = std::asin(v) / (2.0 * t);
  {
    const double dvdj = std::sqrt(std::max(0.0, 1.0 - v * v));
    est.stderr_j_xy = dvdj > 1e-12 ? est.stderr_v_xy / (2.0 * t * dvdj) : kInf;
  }
  est.j_xy_aliases = sine_aliases(v, t, alias_branches);

  // Identity outcome isolates the z coupling:
  //   f_II = s^4 + (c^4 - s^4) cos^2(|Jz| t),  s = sin|Jx|t, c = cos|Jx|t,
  // and c^4 - s^4 = cos(2|Jx|t) = sqrt(1 - v^2) on the principal branch.
  const double dd = std::sqrt(std::max(0.0, 1.0 - v * v));  // cos(2|Jx|t)
  const double floor = rec.sampled
                           ? std::max(1e-6, 10.0 / n)
                           : 1e-6;
  if (std::abs(dd) < floor)
    fail(ErrorCategory::degenerate_time,
         "estimate_anisotropic_couplings: the xy rotation sits at 45 degrees "
         "(cos(2|Jx|t) ~ 0), which hides the z coupling; change the evolution "
         "time");
  const double s2 = (1.0 - dd) / 2.0;  // sin^2(|Jx| t)
  const double s4 = s2 * s2;

  double r = (f[0] - s4) / dd;
  // First-order noise on the radicand from f_II and v.
  double var_r = 0.0;
  if (rec.sampled) {
    const double var_f0 = f[0] * (1.0 - f[0]) / n;
    const double dD_dv = -v / std::max(dd, 1e-12);
    const double dr_dD = ((1.0 - dd) / 2.0 * dd - (f[0] - s4)) / (dd * dd);
    const double dr_dv = dr_dD * dD_dv;
    var_r = var_f0 / (dd * dd) +
            dr_dv * dr_dv * est.stderr_v_xy * est.stderr_v_xy;
  }
  const double sigma_r = std::sqrt(var_r);
  const double slack = rec.sampled ? 3.0 * sigma_r + 1e-12 : 1e-12;
  if (r < -slack || r > 1.0 + slack)
    fail(ErrorCategory::model_violation,
         "estimate_anisotropic_couplings: z-channel radicand " +
             std::to_string(r) + " falls outside [0, 1] beyond noise");
  r = std::min(1.0, std::max(0.0, r));

  est.w_z = std::sqrt(r);
  est.j_z = std::acos(est.w_z) / t;
  {
    const double denom = 2.0 * std::sqrt(r * (1.0 - r));
    est.stderr_j_z = denom > 1e-12 ? sigma_r / (denom * t) : kInf;
  }
  est.j_z_aliases = cosine_aliases(est.w_z, t, alias_branches);

  // Cross-check: the ZZ outcome must match s^4 + (c^4 - s^4) sin^2(|Jz| t).
  const double predicted_zz = s4 + dd * (1.0 - r);
  est.zz_residual = std::abs(f[kIdx[3]] - predicted_zz);
  if (!rec.sampled && est.zz_residual > 1e-9)
    fail(ErrorCategory::model_violation,
         "estimate_anisotropic_couplings: ZZ outcome is inconsistent with the "
         "xy and identity channels");
  return est;
}

// ---------------------------------------------------------------------------

AliasResolution resolve_alias(const std::vector<double>& aliases, double j_max) {
  if (!(j_max > 0.0))
    fail(ErrorCategory::config, "resolve_alias: the coupling bound must be positive");
  AliasResolution out;
  for (double a : aliases)
    if (a <= j_max * (1.0 + 1e-12)) out.survivors.push_back(a);
  out.unique = out.survivors.size() == 1;
  if (out.unique) out.value = out.survivors.front();
  return out;
}

// ---------------------------------------------------------------------------

ExchangeSigns derive_exchange_signs(const ChiMatrix& chi, double t, double j_max) {
  if (chi.n_qubits != 2)
    fail(ErrorCategory::config,
         "derive_exchange_signs: needs a two-qubit process matrix");
  if (!(t > 0.0) || !(j_max > 0.0) || 2.0 * j_max * t >= M_PI / 2.0)
    fail(ErrorCategory::degenerate_time,
         "derive_exchange_signs: sign readout requires 2 j_max t < pi/2");

  // First-row entries against the same-label Pauli products. Within the
  // validity window Im chi(II, AA) has the sign of J_A and Re chi(II, AA)
  // has the sign of the product of the other two couplings.
  const Complex xs[3] = {chi.m(0, 5), chi.m(0, 10), chi.m(0, 15)};
  ExchangeSigns out;
  std::array<int, 3> prod{};  // product sign over the two axes other than k
  for (int k = 0; k < 3; ++k) {
    out.sign[k] = sign_of(xs[k].imag(), 1e-9);
    prod[k] = sign_of(xs[k].real(), 1e-9);
  }
  for (int k = 0; k < 3; ++k) {
    const int i = k == 0 ? 1 : 0;
    const int j = k == 2 ? 1 : 2;
    if (prod[k] != 0 && out.sign[i] != 0 && out.sign[j] != 0 &&
        prod[k] != out.sign[i] * out.sign[j])
      fail(ErrorCategory::model_violation,
           "derive_exchange_signs: pairwise entry contradicts the component "
           "signs");
    if (prod[k] != 0 && (out.sign[i] == 0 || out.sign[j] == 0))
      out.notes.push_back(
          "pairwise entry present for a component read as zero");
  }
  return out;
}

std::vector<SpectrumCandidate> exchange_spectrum_candidates(
    ExchangeClass cls, const std::array<double, 3>& magnitudes,
    const std::optional<ExchangeSigns>& signs) {
  for (double m : magnitudes)
    if (m < 0.0)
      fail(ErrorCategory::config,
           "exchange_spectrum_candidates: magnitudes must be non-negative");
  if ((cls == ExchangeClass::isotropic || cls == ExchangeClass::xxz) &&
      std::abs(magnitudes[0] - magnitudes[1]) > 1e-12)
    fail(ErrorCategory::config,
         "exchange_spectrum_candidates: this symmetry class requires equal x "
         "and y magnitudes");

  // Enumerate the sign patterns the symmetry class allows.
  std::vector<std::array<int, 3>> patterns;
  switch (cls) {
    case ExchangeClass::isotropic:
      patterns = {{1, 1, 1}, {-1, -1, -1}};
      break;
    case ExchangeClass::xxz:
    case ExchangeClass::xy:
      for (int sxy : {1, -1})
        for (int sz : {1, -1}) patterns.push_back({sxy, sxy, sz});
      break;
    case ExchangeClass::xyz:
      for (int sx : {1, -1})
        for (int sy : {1, -1})
          for (int sz : {1, -1}) patterns.push_back({sx, sy, sz});
      break;
  }

  std::vector<SpectrumCandidate> out;
  std::set<std::array<long long, 4>> seen;
  for (auto pat : patterns) {
    std::array<double, 3> j{};
    bool compatible = true;
    for (int k = 0; k < 3; ++k) {
      j[k] = pat[k] * magnitudes[k];
      if (magnitudes[k] == 0.0) continue;  // sign irrelevant on a dead axis
      if (signs && signs->sign[k] != 0 && signs->sign[k] != pat[k])
        compatible = false;
    }
    if (!compatible) continue;
    const ExchangeHamiltonian h{j[0], j[1], j[2]};
    SpectrumCandidate cand;
    cand.couplings = j;
    cand.energies = h.bell_energies();
    // Merge candidates whose energy multisets coincide.
    std::array<double, 4> sorted = cand.energies;
    std::sort(sorted.begin(), sorted.end());
    std::array<long long, 4> key{};
    for (int k = 0; k < 4; ++k)
      key[k] = static_cast<long long>(std::llround(sorted[k] * 1e12));
    if (seen.insert(key).second) out.push_back(cand);
  }
  return out;
}

}  // namespace dcqd
