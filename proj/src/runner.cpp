#include "dcqd/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <vector>

#include "dcqd/csv.hpp"
#include "dcqd/dynamics.hpp"
#include "dcqd/estimate.hpp"
#include "dcqd/protocol.hpp"
#include "dcqd/spectral.hpp"

namespace dcqd {

namespace fs = std::filesystem;

int exit_code_for(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::config: return 2;
    case ErrorCategory::degenerate_time: return 3;
    case ErrorCategory::model_violation: return 4;
    case ErrorCategory::conditioning: return 5;
    case ErrorCategory::no_signal: return 6;
    case ErrorCategory::structural:
    case ErrorCategory::internal: return 1;
  }
  return 1;
}

namespace {

const std::vector<std::string> kRecordHeader = {
    "experiment", "t", "outcome_label", "probability", "count", "N_E", "seed"};
const std::vector<std::string> kEstimateHeader = {
    "experiment", "parameter", "true_value", "estimate",
    "stderr",     "mode",      "N_E",        "N_S",
    "notes"};
const std::vector<std::string> kScalingHeader = {
    "experiment", "n_samples", "n_shots", "repeat",         "f_estimate",
    "delta_f",    "rel_err_f", "sq_err_coupling", "seed"};
const std::vector<std::string> kErrorHeader = {"experiment", "category",
                                               "message"};

struct Outputs {
  std::vector<std::vector<std::string>> records;
  std::vector<std::vector<std::string>> estimates;
  std::vector<std::vector<std::string>> scaling;
};

std::string join_notes(const std::vector<std::string>& notes,
                       const std::string& lead) {
  std::string out = lead;
  for (const auto& n : notes) {
    out += "; ";
    out += n;
  }
  return out;
}

void add_record_rows(Outputs& o, const ExperimentConfig& cfg,
                     const MeasurementRecord& rec) {
  const std::string kind = experiment_kind_name(cfg.kind);
  const std::string probe = probe_config_name(rec.config);
  const int n = static_cast<int>(rec.probabilities.size());
  for (int i = 0; i < n; ++i) {
    o.records.push_back({kind, csv_num(cfg.t),
                         probe + ":" + rec.outcome_label(i),
                         csv_num(rec.probabilities[i]),
                         csv_int(rec.sampled ? rec.counts[i] : 0),
                         csv_int(rec.sampled ? rec.n_shots : 0),
                         csv_uint(cfg.seed)});
  }
}

void add_estimate_row(Outputs& o, const ExperimentConfig& cfg,
                      const std::string& parameter,
                      std::optional<double> true_value, double estimate,
                      double stderr_value, std::int64_t n_samples,
                      const std::string& notes) {
  o.estimates.push_back(
      {experiment_kind_name(cfg.kind), parameter,
       true_value ? csv_num(*true_value) : std::string(), csv_num(estimate),
       csv_num(stderr_value), cfg.sampled ? "sampled" : "exact",
       csv_int(cfg.sampled ? cfg.n_shots : 0), csv_int(n_samples), notes});
}

MeasurementRecord make_record(const ExperimentConfig& cfg, ProbeConfig probe,
                              const Dynamics& dyn) {
  const MeasurementRecord exact = outcome_probabilities(probe, dyn, cfg.t);
  return cfg.sampled ? sample_outcomes(exact, cfg.n_shots, cfg.seed, 0) : exact;
}

std::string alias_note(const std::string& label,
                       const std::vector<double>& aliases) {
  std::string out = label + " alias candidates:";
  for (double a : aliases) {
    out += ' ';
    out += csv_num(a);
  }
  return out;
}

// Adds the principal-branch row, alias notes and, when a coupling bound is
// declared and exactly one candidate survives it, a resolved row.
void add_branch_rows(Outputs& o, const ExperimentConfig& cfg,
                     const std::string& stem, double truth, double principal,
                     double stderr_value, const std::vector<double>& aliases,
                     const std::string& seed_note) {
  std::string notes = seed_note + "; " + alias_note(stem, aliases);
  std::optional<AliasResolution> res;
  if (cfg.j_max) {
    res = resolve_alias(aliases, *cfg.j_max);
    if (!res->unique) {
      notes += "; the declared bound keeps " +
               std::to_string(res->survivors.size()) + " candidates";
    }
  } else {
    notes += "; no coupling bound declared, alias left unresolved";
  }
  add_estimate_row(o, cfg, stem + "_principal", truth, principal, stderr_value,
                   0, notes);
  if (res && res->unique)
    add_estimate_row(o, cfg, stem + "_resolved", truth, *res->value,
                     stderr_value, 0, seed_note + "; unique below the bound");
}

void run_single_qubit(const ExperimentConfig& cfg, Outputs& o) {
  const SingleQubitHamiltonian h{cfg.jx, cfg.jy, cfg.jz};
  const Dynamics dyn = Dynamics::of(h);
  const MeasurementRecord bell = make_record(cfg, ProbeConfig::bell_z, dyn);
  std::vector<MeasurementRecord> nonmax;
  for (ProbeConfig p : {ProbeConfig::nonmax_z, ProbeConfig::nonmax_x,
                        ProbeConfig::nonmax_y})
    nonmax.push_back(make_record(cfg, p, dyn));

  add_record_rows(o, cfg, bell);
  for (const auto& r : nonmax) add_record_rows(o, cfg, r);

  const SingleQubitEstimate est = estimate_single_qubit(bell, nonmax);
  const std::string seed_note = "seed=" + csv_uint(cfg.seed);
  const double truth[3] = {cfg.jx, cfg.jy, cfg.jz};
  const char* axis[3] = {"x", "y", "z"};

  const DirectionEstimate& m = est.magnitudes;
  for (int a = 0; a < 3; ++a) {
    const double mag = m.j_magnitude * m.components[a];
    const double se = std::sqrt(
        m.components[a] * m.components[a] * m.stderr_j * m.stderr_j +
        m.j_magnitude * m.j_magnitude * m.stderrs[a] * m.stderrs[a]);
    add_estimate_row(o, cfg, std::string("abs_j") + axis[a],
                     std::abs(truth[a]), mag, se, 0, seed_note);
  }
  add_estimate_row(o, cfg, "j_magnitude", h.magnitude(), m.j_magnitude,
                   m.stderr_j, 0, seed_note);

  const std::string sign_note = join_notes(
      est.signs.notes,
      seed_note + (est.signs.global_sign_fixed
                       ? "; signs corroborated by all three configurations"
                       : "; sign coverage incomplete"));
  for (int a = 0; a < 3; ++a) {
    const double mag = m.j_magnitude * m.components[a];
    const double se = std::sqrt(
        m.components[a] * m.components[a] * m.stderr_j * m.stderr_j +
        m.j_magnitude * m.j_magnitude * m.stderrs[a] * m.stderrs[a]);
    add_estimate_row(o, cfg, std::string("j") + axis[a], truth[a],
                     est.couplings[a], est.signs.signs[a] == 0 ? mag : se, 0,
                     sign_note);
  }
}

void run_relaxation(const ExperimentConfig& cfg, Outputs& o) {
  const RelaxationParams rp = RelaxationParams::make(cfg.t1, cfg.t2, cfg.a_inf);
  const Dynamics dyn = Dynamics::of(rp);
  const MeasurementRecord rec = make_record(cfg, ProbeConfig::bell_z, dyn);
  add_record_rows(o, cfg, rec);

  const RelaxationEstimate est = estimate_relaxation(rec);
  const std::string notes = join_notes(est.notes, "seed=" + csv_uint(cfg.seed));

  add_estimate_row(o, cfg, "rate1", 1.0 / cfg.t1, est.rate1, est.stderr_rate1,
                   0, notes);
  add_estimate_row(o, cfg, "rate2", 1.0 / cfg.t2, est.rate2, est.stderr_rate2,
                   0, notes);
  const auto time_stderr = [](double rate, double se) {
    if (se == 0.0) return 0.0;
    if (rate <= 0.0) return std::numeric_limits<double>::infinity();
    return se / (rate * rate);
  };
  add_estimate_row(o, cfg, "T1", cfg.t1, est.t1,
                   time_stderr(est.rate1, est.stderr_rate1), 0, notes);
  add_estimate_row(o, cfg, "T2", cfg.t2, est.t2,
                   time_stderr(est.rate2, est.stderr_rate2), 0, notes);
}

void run_exchange_iso(const ExperimentConfig& cfg, Outputs& o) {
  const ExchangeHamiltonian h{cfg.jx, cfg.jy, cfg.jz};
  const Dynamics dyn = Dynamics::of(h);
  const MeasurementRecord rec = make_record(cfg, ProbeConfig::double_bell, dyn);
  add_record_rows(o, cfg, rec);

  const IsotropicEstimate est = estimate_isotropic_coupling(rec);
  const std::string seed_note =
      join_notes(est.notes, "seed=" + csv_uint(cfg.seed));
  add_estimate_row(o, cfg, "sin_2jt", std::abs(std::sin(2.0 * cfg.jx * cfg.t)),
                   est.v, est.stderr_v, 0,
                   seed_note + "; identity_residual=" +
                       csv_num(est.identity_residual));
  add_branch_rows(o, cfg, "abs_j", std::abs(cfg.jx), est.j_principal,
                  est.stderr_j, est.j_aliases, seed_note);
}

void run_exchange_aniso(const ExperimentConfig& cfg, Outputs& o) {
  const ExchangeHamiltonian h{cfg.jx, cfg.jy, cfg.jz};
  const Dynamics dyn = Dynamics::of(h);
  const MeasurementRecord rec = make_record(cfg, ProbeConfig::double_bell, dyn);
  add_record_rows(o, cfg, rec);

  const AnisotropicEstimate est = estimate_anisotropic_couplings(rec);
  const std::string seed_note =
      join_notes(est.notes, "seed=" + csv_uint(cfg.seed));
  add_estimate_row(o, cfg, "sin_2jxy_t",
                   std::abs(std::sin(2.0 * cfg.jx * cfg.t)), est.v_xy,
                   est.stderr_v_xy, 0, seed_note);
  add_branch_rows(o, cfg, "abs_jxy", std::abs(cfg.jx), est.j_xy,
                  est.stderr_j_xy, est.j_xy_aliases, seed_note);
  add_estimate_row(o, cfg, "cos_jz_t", std::abs(std::cos(cfg.jz * cfg.t)),
                   est.w_z, 0.0, 0,
                   seed_note + "; zz_residual=" + csv_num(est.zz_residual));
  add_branch_rows(o, cfg, "abs_jz", std::abs(cfg.jz), est.j_z, est.stderr_j_z,
                  est.j_z_aliases, seed_note);
}

void run_scaling(const ExperimentConfig& cfg, Outputs& o) {
  std::vector<ScalingItemResult> items;
  const std::vector<ScalingCellResult> cells =
      scaling_study(cfg.scaling, Exec::parallel, &items);

  const std::string kind = experiment_kind_name(cfg.kind);
  for (const auto& it : items) {
    o.scaling.push_back({kind, csv_int(it.n_samples), csv_int(it.n_shots),
                         csv_int(it.repeat), csv_num(it.f_estimate),
                         csv_num(it.delta_f), csv_num(it.rel_err_f),
                         csv_num(it.sq_err_coupling), csv_uint(cfg.seed)});
  }

  const double f_true = cfg.scaling.h.magnitude() / M_PI;
  const std::string seed_note = "seed=" + csv_uint(cfg.seed);
  for (const auto& c : cells) {
    ExperimentConfig row_cfg = cfg;
    row_cfg.n_shots = c.n_shots;
    const std::string note =
        seed_note + "; aggregate over " + std::to_string(c.repeats) + " repeats";
    add_estimate_row(o, row_cfg, "rmse_coupling", std::nullopt, c.rmse_coupling,
                     0.0, c.n_samples, note);
    add_estimate_row(o, row_cfg, "mean_rel_df_model", std::nullopt,
                     c.mean_rel_df_model, 0.0, c.n_samples,
                     note + "; reported resolution over estimated frequency");
    add_estimate_row(o, row_cfg, "mean_rel_df_emp", std::nullopt,
                     c.mean_rel_df_emp, 0.0, c.n_samples,
                     note + "; true frequency " + csv_num(f_true));
  }
}

void write_error_file(const std::string& out_dir, const std::string& kind,
                      ErrorCategory category, const std::string& message) {
  try {
    write_csv((fs::path(out_dir) / "errors.csv").string(), kErrorHeader,
              {{kind, error_category_name(category), message}});
  } catch (const std::exception&) {
    // The error path must not mask the original failure.
  }
}

void write_config_echo(const std::string& out_dir, const ExperimentConfig& cfg) {
  std::ofstream out(fs::path(out_dir) / "config_echo.txt",
                    std::ios::binary | std::ios::trunc);
  char hash[32];
  std::snprintf(hash, sizeof(hash), "0x%016llx",
                static_cast<unsigned long long>(cfg.config_hash));
  out << "# experiment = " << experiment_kind_name(cfg.kind) << '\n'
      << "# mode = " << (cfg.sampled ? "sampled" : "exact") << '\n'
      << "# resolved_seed = " << cfg.seed << '\n'
      << "# config_hash = " << hash << '\n'
      << cfg.canonical;
}

}  // namespace

int run_subcommand(const std::string& subcommand, const std::string& config_path,
                   std::optional<std::uint64_t> seed_override,
                   const std::string& out_dir_in, std::ostream& out,
                   std::ostream& err) {
  const std::string out_dir = out_dir_in.empty() ? "." : out_dir_in;
  std::string kind_label = subcommand;
  try {
    fs::create_directories(out_dir);
  } catch (const std::exception& e) {
    err << "error [INTERNAL] cannot create output directory '" << out_dir
        << "': " << e.what() << '\n';
    return 1;
  }

  try {
    const ConfigMap cm = ConfigMap::load(config_path);
    if (cm.has("experiment", "kind"))
      kind_label = cm.get_string("experiment", "kind");
    const ExperimentConfig cfg = ExperimentConfig::from(cm, seed_override);
    kind_label = experiment_kind_name(cfg.kind);

    if (subcommand == "validate") {
      char hash[32];
      std::snprintf(hash, sizeof(hash), "0x%016llx",
                    static_cast<unsigned long long>(cfg.config_hash));
      out << "config valid: experiment=" << kind_label << " hash=" << hash
          << '\n';
      return 0;
    }
    if (subcommand != kind_label)
      fail(ErrorCategory::config, "subcommand '" + subcommand +
                                      "' does not match configured experiment "
                                      "kind '" +
                                      kind_label + "'");

    Outputs o;
    switch (cfg.kind) {
      case ExperimentKind::single_qubit: run_single_qubit(cfg, o); break;
      case ExperimentKind::relaxation: run_relaxation(cfg, o); break;
      case ExperimentKind::exchange_iso: run_exchange_iso(cfg, o); break;
      case ExperimentKind::exchange_aniso: run_exchange_aniso(cfg, o); break;
      case ExperimentKind::scaling: run_scaling(cfg, o); break;
    }

    const fs::path dir(out_dir);
    std::string wrote;
    if (!o.records.empty()) {
      write_csv((dir / "records.csv").string(), kRecordHeader, o.records);
      wrote += " records.csv";
    }
    write_csv((dir / "estimates.csv").string(), kEstimateHeader, o.estimates);
    wrote += " estimates.csv";
    if (!o.scaling.empty()) {
      write_csv((dir / "scaling.csv").string(), kScalingHeader, o.scaling);
      wrote += " scaling.csv";
    }
    write_config_echo(out_dir, cfg);
    wrote += " config_echo.txt";

    out << kind_label << ": wrote" << wrote << " (seed " << cfg.seed << ", "
        << (cfg.sampled ? "sampled" : "exact") << ")\n";
    return 0;
  } catch (const Error& e) {
    err << "error [" << error_category_name(e.category()) << "] " << e.what()
        << '\n';
    write_error_file(out_dir, kind_label, e.category(), e.what());
    return exit_code_for(e.category());
  } catch (const std::exception& e) {
    err << "error [INTERNAL] " << e.what() << '\n';
    write_error_file(out_dir, kind_label, ErrorCategory::internal, e.what());
    return 1;
  }
}

}  // namespace dcqd
