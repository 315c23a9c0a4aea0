#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>

#include <CLI11.hpp>

#include "slfv/cli.hpp"
#include "slfv/error.hpp"
#include "slfv/observables.hpp"
#include "slfv/theory.hpp"

namespace slfv::cli {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Options {
  std::string config_path;
  std::string out_dir;
  std::string trace_path;
  unsigned workers = 1;
  bool workers_set = false;
};

/// Comma-separated rows with a header; floats at full precision.
class CsvFile {
 public:
  CsvFile(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    row_strings(header);
  }

  template <class... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }

  void row_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }

 private:
  static std::string cell(double v) { return format_double(v); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(bool b) { return b ? "1" : "0"; }
  template <class Int>
    requires std::is_integral_v<Int>
  static std::string cell(Int v) { return std::to_string(v); }

  std::ofstream out_;
};

const std::vector<std::string> kSurvivalHeader{"t_exponent", "threshold_time", "survival", "ci_lo", "ci_hi", "n",
                                               "censored"};

void write_survival(const fs::path& dir, const std::string& stem, const SurvivalCurve& curve) {
  auto emit = [](CsvFile& csv, const SurvivalPoint& p) {
    csv.row(p.t_exponent, p.threshold, p.survival.estimate, p.survival.ci_lo, p.survival.ci_hi, p.survival.n,
            p.survival.censored);
  };
  CsvFile csv(dir / (stem + ".csv"), kSurvivalHeader);
  for (const auto& p : curve.points) emit(csv, p);
  if (!curve.phase2_points.empty()) {
    CsvFile phase2(dir / (stem + "_phase2.csv"), kSurvivalHeader);
    for (const auto& p : curve.phase2_points) emit(phase2, p);
  }
}

void write_sidecar(const fs::path& dir, const std::string& stem, const std::string& command, const RunConfig& config) {
  json meta;
  meta["command"] = command;
  meta["config"] = config.raw;
  meta["seed"] = config.estimator.seed;
  meta["replicates"] = config.estimator.replicates;
  meta["horizon"] = config.estimator.horizon;
  meta["version"] = SLFV_VERSION;
  std::ofstream(dir / (stem + ".meta.json")) << meta.dump(2) << '\n';
}

struct Context {
  RunConfig config;
  fs::path dir;
  std::string prefix;
  DerivedScales scales;
  std::ostream& out;
  std::ostream& err;
};

Context prepare(const Options& opts, std::ostream& out, std::ostream& err) {
  RunConfig config = load_config(opts.config_path);
  if (const char* env = std::getenv("SLFV_SEED")) {
    char* end = nullptr;
    const unsigned long long seed = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') throw ConfigFieldError("SLFV_SEED", "expected an unsigned integer");
    config.estimator.seed = seed;
    config.raw["estimator"]["seed"] = seed;
  }
  if (opts.workers_set) config.estimator.workers = opts.workers;
  const auto report = validate(config.model);
  for (const auto& w : report.warnings) err << "warning: model: " << w << '\n';
  if (!report.ok()) throw ConfigFieldError("model", report.violations.front());

  Context ctx{config, opts.out_dir.empty() ? fs::path(config.output.directory) : fs::path(opts.out_dir),
              config.output.prefix, derive_scales(config.model), out, err};
  ctx.config.estimator.horizon = config.horizon_multiplier * ctx.scales.timescale(1.0);
  fs::create_directories(ctx.dir);
  return ctx;
}

void write_ibd(const fs::path& path, const std::vector<IbdEstimate>& rows) {
  CsvFile csv(path, {"theta", "estimate", "upper", "ci_lo", "ci_hi", "n", "censored"});
  for (const auto& r : rows) csv.row(r.theta, r.estimate, r.upper, r.ci_lo, r.ci_hi, r.n, r.censored);
}

void maybe_trace(const Options& opts, const Context& ctx, AncestryState initial) {
  if (opts.trace_path.empty()) return;
  const EventStream stream(ctx.config.model);
  RandomStream rng(ctx.config.estimator.seed, 0);
  std::ofstream trace(opts.trace_path);
  trace_trajectory(std::move(initial), stream, rng, 10'000, ctx.config.estimator.horizon, trace);
}

int sim_pair(const Options& opts, Context& ctx) {
  const auto& cfg = ctx.config;
  const auto separation = sampling_separation(cfg.model);
  maybe_trace(opts, ctx, init_single_locus_pair(separation, cfg.model.side));
  const auto runs = simulate_pairs(cfg.model, separation, cfg.estimator);
  const auto times = coalescence_times(runs);
  const std::string stem = ctx.prefix + "_pair";
  write_survival(ctx.dir, stem + "_survival", survival_curve("single", times, ctx.scales, cfg.estimator));

  CsvFile records(ctx.dir / (stem + "_records.csv"),
                  {"replicate", "tau", "tau_censored", "gather", "gather_censored", "events"});
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    records.row(i, r.coalescence.value, r.coalescence.censored, r.gathering.value, r.gathering.censored, r.events);
  }
  if (!cfg.ibd_thetas.empty()) {
    std::vector<IbdEstimate> ibd;
    for (double theta : cfg.ibd_thetas) ibd.push_back(ibd_from_times(times, theta, cfg.estimator.confidence));
    write_ibd(ctx.dir / (stem + "_ibd.csv"), ibd);
  }
  write_sidecar(ctx.dir, stem, "sim pair", cfg);
  ctx.out << "wrote " << (ctx.dir / (stem + "_survival.csv")).string() << '\n';
  return kOk;
}

int sim_two_locus(const Options& opts, Context& ctx) {
  const auto& cfg = ctx.config;
  const auto separation = sampling_separation(cfg.model);
  maybe_trace(opts, ctx, init_two_individuals(separation, cfg.model.side));
  const auto records = simulate_two_locus(cfg.model, separation, cfg.estimator);
  const std::string stem = ctx.prefix + "_two_locus";
  const auto tau_aa = locus_times(records, 1);
  const auto tau_bb = locus_times(records, 2);
  write_survival(ctx.dir, stem + "_joint_min",
                 survival_curve("joint_min", first_coalescence_times(records), ctx.scales, cfg.estimator));
  write_survival(ctx.dir, stem + "_locus_Aa", survival_curve("locus_Aa", tau_aa, ctx.scales, cfg.estimator));
  write_survival(ctx.dir, stem + "_locus_Bb", survival_curve("locus_Bb", tau_bb, ctx.scales, cfg.estimator));

  CsvFile csv(ctx.dir / (stem + "_records.csv"),
              {"replicate", "tau_Aa", "tau_Aa_censored", "tau_Bb", "tau_Bb_censored", "gather_Aa", "gather_Aa_censored",
               "gather_Bb", "gather_Bb_censored", "equal_coalescence", "events"});
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    csv.row(i, r.tau_Aa.value, r.tau_Aa.censored, r.tau_Bb.value, r.tau_Bb.censored, r.gather_Aa.value,
            r.gather_Aa.censored, r.gather_Bb.value, r.gather_Bb.censored, r.equal_coalescence, r.events);
  }

  CsvFile summary(ctx.dir / (stem + "_summary.csv"), {"quantity", "theta", "value", "ci_lo", "ci_hi", "n", "censored"});
  const auto eq = equal_coalescence(records, cfg.estimator.confidence);
  summary.row("equal_coalescence", 0.0, eq.estimate, eq.ci_lo, eq.ci_hi, eq.n, eq.censored);
  for (double theta : cfg.ibd_thetas) {
    const auto joint = joint_ibd(records, theta, theta, cfg.estimator.confidence);
    const auto a = ibd_from_times(tau_aa, theta, cfg.estimator.confidence);
    const auto b = ibd_from_times(tau_bb, theta, cfg.estimator.confidence);
    summary.row("ibd_joint", theta, joint.estimate, joint.ci_lo, joint.ci_hi, joint.n, joint.censored);
    summary.row("ibd_Aa", theta, a.estimate, a.ci_lo, a.ci_hi, a.n, a.censored);
    summary.row("ibd_Bb", theta, b.estimate, b.ci_lo, b.ci_hi, b.n, b.censored);
    summary.row("ibd_product", theta, a.estimate * b.estimate, a.ci_lo * b.ci_lo, a.ci_hi * b.ci_hi, a.n,
                std::max(a.censored, b.censored));
  }
  write_sidecar(ctx.dir, stem, "sim two-locus", cfg);
  ctx.out << "equal coalescence " << format_double(eq.estimate) << '\n';
  return kOk;
}

int sim_recomb(const Options& opts, Context& ctx) {
  const auto& cfg = ctx.config;
  maybe_trace(opts, ctx, init_same_individual());
  const EventStream stream(cfg.model);
  const double horizon = cfg.estimator.horizon;
  struct Row {
    StoppingTime effective;
    StoppingTime exit;
  };
  const auto rows = run_replicates(cfg.estimator.replicates, cfg.estimator.seed, cfg.estimator.workers,
                                   [&](RandomStream& rng, std::size_t) {
                                     Row row;
                                     row.effective = run_effective_recombination(stream, horizon, rng);
                                     row.exit = run_separation_exit(stream, horizon, rng);
                                     return row;
                                   });
  const std::string stem = ctx.prefix + "_recomb";
  CsvFile csv(ctx.dir / (stem + "_records.csv"), {"replicate", "S", "S_censored", "exit_time", "exit_censored"});
  double sum_s = 0.0;
  double sum_exit = 0.0;
  std::size_t n_s = 0;
  std::size_t n_exit = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    csv.row(i, r.effective.value, r.effective.censored, r.exit.value, r.exit.censored);
    if (!r.effective.censored) sum_s += r.effective.value, ++n_s;
    if (!r.exit.censored) sum_exit += r.exit.value, ++n_exit;
  }
  CsvFile summary(ctx.dir / (stem + "_summary.csv"), {"quantity", "mean_uncensored", "n", "censored"});
  summary.row("effective_recombination", n_s ? sum_s / n_s : std::nan(""), rows.size(), rows.size() - n_s);
  summary.row("separation_exit", n_exit ? sum_exit / n_exit : std::nan(""), rows.size(), rows.size() - n_exit);
  write_sidecar(ctx.dir, stem, "sim recomb", cfg);
  return kOk;
}

int sim_kingman(const Options& opts, Context& ctx) {
  const auto& cfg = ctx.config;
  const auto& k = cfg.kingman;
  if (!opts.trace_path.empty()) {
    RandomStream rng(cfg.estimator.seed, 0);
    const auto marks = k.layout == PairingLayout::square ? square_marks(k.scale, cfg.model.side)
                                                         : far_random_marks(k.scale, cfg.model.side, rng);
    maybe_trace(opts, ctx, init_singletons(marks));
  }
  const auto dist = estimate_pairing_distribution(cfg.model, k.layout, k.scale, cfg.estimator);
  const std::string stem = ctx.prefix + "_kingman";
  CsvFile csv(ctx.dir / (stem + ".csv"), {"pair", "labels", "count", "frequency"});
  const auto freq = dist.frequencies();
  for (int p = 0; p < 6; ++p) {
    const auto [i, j] = kLineagePairs[p];
    const auto labels = (LabelSet(kLabelOrder[i]) | kLabelOrder[j]).to_string();
    csv.row(p, labels, dist.counts[p], freq[p]);
  }
  CsvFile summary(ctx.dir / (stem + "_summary.csv"), {"statistic", "value"});
  summary.row("replicates", static_cast<double>(dist.replicates));
  summary.row("multiple_mergers", static_cast<double>(dist.multiple));
  summary.row("censored", static_cast<double>(dist.censored));
  summary.row("chi2_uniform", dist.chi2_uniform);
  summary.row("p_uniform", dist.p_uniform);
  summary.row("chi2_sides", dist.chi2_sides);
  summary.row("p_sides", dist.p_sides);
  summary.row("chi2_diagonals", dist.chi2_diagonals);
  summary.row("p_diagonals", dist.p_diagonals);
  write_sidecar(ctx.dir, stem, "sim kingman", cfg);
  return kOk;
}

int sim_decorr(const Options& opts, Context& ctx) {
  const auto& cfg = ctx.config;
  maybe_trace(opts, ctx, init_same_individual());
  const EventStream stream(cfg.model);
  const double log_side = std::log(cfg.model.side);
  double snapshot = cfg.decorr_snapshot;
  if (snapshot == 0.0) {
    snapshot = std::pow(log_side, 5) * (1.0 + std::log(cfg.model.rho) / (cfg.model.recombination * cfg.model.rho));
  }
  const auto separations =
      run_replicates(cfg.estimator.replicates, cfg.estimator.seed, cfg.estimator.workers,
                     [&](RandomStream& rng, std::size_t) { return run_decorrelation_snapshot(stream, snapshot, rng); });
  const std::string stem = ctx.prefix + "_decorr";
  CsvFile csv(ctx.dir / (stem + ".csv"), {"replicate", "separation"});
  const double lo = std::sqrt(snapshot) / log_side;
  const double hi = std::sqrt(snapshot) * log_side;
  std::size_t inside = 0;
  for (std::size_t i = 0; i < separations.size(); ++i) {
    csv.row(i, separations[i]);
    if (separations[i] >= lo && separations[i] <= hi) ++inside;
  }
  const auto frac = wilson_interval(inside, separations.size(), cfg.estimator.confidence);
  CsvFile summary(ctx.dir / (stem + "_summary.csv"),
                  {"snapshot", "window_lo", "window_hi", "fraction_inside", "ci_lo", "ci_hi", "n"});
  summary.row(snapshot, lo, hi, frac.estimate, frac.ci_lo, frac.ci_hi, frac.n);
  write_sidecar(ctx.dir, stem, "sim decorr", cfg);
  return kOk;
}

theory::IbdModel ibd_model(const Context& ctx) {
  const auto& m = ctx.config.model;
  theory::IbdModel model;
  model.side = m.side;
  model.alpha = m.alpha;
  model.c_ratio = ctx.config.theory.c_ratio.value_or(m.rho / std::pow(m.side, 2.0 * m.alpha));
  return model;
}

int theory_ibd1(Context& ctx) {
  const auto& th = ctx.config.theory;
  const auto model = ibd_model(ctx);
  const auto betas = theory::beta_grid(model.alpha + 1e-3, 1.0, th.beta_points);
  const auto rows = theory::ibd_single_curve(betas, th.theta, model,
                                             th.full_terms ? theory::IbdTerms::full : theory::IbdTerms::leading);
  const std::string stem = ctx.prefix + "_ibd1";
  CsvFile csv(ctx.dir / (stem + ".csv"), {"beta", "value_large", "value_small"});
  for (const auto& r : rows) csv.row(r.beta, r.value_large, r.value_small);

  CsvFile vanish(ctx.dir / (stem + "_vanishing.csv"), {"curve", "threshold", "beta_star"});
  for (bool large : {true, false}) {
    theory::IbdModel m = model;
    m.large_events = large;
    const double lo = m.effective_alpha() + 1e-9;
    const auto beta_star = theory::vanishing_point(
        [&](double b) { return theory::ibd_decay_factor(b, th.theta, m); }, th.threshold, lo, 1.0);
    const char* name = large ? "value_large" : "value_small";
    vanish.row(name, th.threshold, beta_star ? format_double(*beta_star) : std::string("none"));
    ctx.out << name << " vanishes at beta = " << (beta_star ? format_double(*beta_star) : "none in range") << '\n';
  }
  write_sidecar(ctx.dir, stem, "theory ibd1", ctx.config);
  return kOk;
}

int theory_ibd2(Context& ctx) {
  const auto& th = ctx.config.theory;
  const auto model = ibd_model(ctx);
  const auto betas = theory::beta_grid(model.alpha + 1e-3, 1.0, th.beta_points);
  const double g_star = ctx.scales.gamma_star;
  const auto rows = theory::ibd_double_curve(betas, th.theta1, th.theta2, th.gamma_mid, g_star, model);
  const std::string stem = ctx.prefix + "_ibd2";
  CsvFile csv(ctx.dir / (stem + ".csv"), {"beta", "v_gamma_ge1", "v_gamma_mid", "v_gamma_le_alpha", "v_no_large"});
  for (const auto& r : rows) csv.row(r.beta, r.v_gamma_ge1, r.v_gamma_mid, r.v_gamma_le_alpha, r.v_no_large);
  ctx.out << "gamma_mid = " << format_double(th.gamma_mid) << ", gamma_star = " << format_double(g_star) << '\n';
  write_sidecar(ctx.dir, stem, "theory ibd2", ctx.config);
  return kOk;
}

int theory_survival(Context& ctx) {
  const auto& m = ctx.config.model;
  if (!m.beta) throw ConfigFieldError("model.beta", "missing required field for theory survival");
  const double alpha = m.alpha;
  const double beta = *m.beta;
  const double gamma = ctx.scales.gamma_finite;
  auto t_grid = ctx.config.estimator.t_grid;
  if (t_grid.empty()) t_grid = theory::beta_grid(beta, 1.0, 21);
  auto phase2 = ctx.config.estimator.phase2_grid;
  if (phase2.empty()) phase2 = {0.25, 0.5, 1.0, 2.0};
  const std::string stem = ctx.prefix + "_survival_theory";
  CsvFile csv(ctx.dir / (stem + ".csv"), {"phase", "t", "threshold_time", "single", "joint_fast", "joint_slow"});
  const bool slow = gamma > beta && gamma < 1.0;
  const double nan = std::nan("");
  for (double t : t_grid) {
    csv.row(1, t, ctx.scales.timescale(t), theory::single_locus_survival_phase1(t, alpha, beta),
            theory::joint_survival_fast_phase1(t, alpha, beta),
            gamma > beta ? theory::joint_survival_slow_phase1(t, alpha, beta, gamma) : nan);
  }
  for (double t : phase2) {
    csv.row(2, t, t * ctx.scales.equilibrium_scale, theory::single_locus_survival_phase2(t, alpha, beta),
            theory::joint_survival_fast_phase2(t, alpha, beta),
            slow ? theory::joint_survival_slow_phase2(t, alpha, beta, gamma) : nan);
  }
  write_sidecar(ctx.dir, stem, "theory survival", ctx.config);
  return kOk;
}

int theory_scales(Context& ctx) {
  const auto& s = ctx.scales;
  const auto& m = ctx.config.model;
  std::vector<std::pair<std::string, double>> rows{
      {"sigma2", s.sigma2},
      {"gamma_finite", s.gamma_finite},
      {"gamma_star", s.gamma_star},
      {"d_star", s.d_star},
      {"c_L", m.rho / std::pow(m.side, 2.0 * m.alpha)},
      {"large_radius", s.large_radius},
      {"small_rate_per_block", s.small_rate_per_block},
      {"large_rate_per_block", s.large_rate_per_block},
      {"timescale_alpha", s.timescale(m.alpha)},
      {"timescale_1", s.timescale(1.0)},
      {"equilibrium_scale", s.equilibrium_scale},
  };
  if (m.beta) rows.insert(rows.begin() + 9, {"timescale_beta", s.timescale(*m.beta)});
  const std::string stem = ctx.prefix + "_scales";
  CsvFile csv(ctx.dir / (stem + ".csv"), {"quantity", "value"});
  for (const auto& [name, value] : rows) {
    csv.row(name, value);
    ctx.out << name << " = " << format_double(value) << '\n';
  }
  write_sidecar(ctx.dir, stem, "theory scales", ctx.config);
  return kOk;
}

int validate_command(std::ostream& out) {
  const auto results = run_oracles(1.0);
  bool all = true;
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": measured " << format_double(r.measured) << ", expected "
        << format_double(r.expected) << ", tolerance " << format_double(r.tolerance) << " (relative)\n";
    all = all && r.passed;
  }
  return all ? kOk : kValidationFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spatial Lambda-Fleming-Viot genealogies with recombination", "slfv"};
  app.require_subcommand(1);
  Options opts;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("-c,--config", opts.config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    cmd->add_option("-o,--out", opts.out_dir, "Output directory (overrides output.directory)");
  };

  auto* theory_cmd = app.add_subcommand("theory", "Closed-form curves and derived scales");
  std::string theory_target;
  theory_cmd->add_option("target", theory_target, "ibd1 | ibd2 | survival | scales")
      ->required()
      ->check(CLI::IsMember({"ibd1", "ibd2", "survival", "scales"}));
  add_common(theory_cmd);

  auto* sim_cmd = app.add_subcommand("sim", "Monte Carlo estimation");
  std::string sim_target;
  sim_cmd->add_option("target", sim_target, "pair | two-locus | recomb | kingman | decorr")
      ->required()
      ->check(CLI::IsMember({"pair", "two-locus", "recomb", "kingman", "decorr"}));
  add_common(sim_cmd);
  sim_cmd->add_option("-w,--workers", opts.workers, "Worker threads (0 = all cores)");
  sim_cmd->add_option("--trace", opts.trace_path, "Write the trajectory of replicate 0 as CSV");

  app.add_subcommand("validate", "Run the built-in oracle suite");

  std::vector<const char*> argv{"slfv"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }
  opts.workers_set = sim_cmd->count("--workers") > 0;

  try {
    if (app.got_subcommand("validate")) return validate_command(out);
    Context ctx = prepare(opts, out, err);
    if (app.got_subcommand("theory")) {
      if (theory_target == "ibd1") return theory_ibd1(ctx);
      if (theory_target == "ibd2") return theory_ibd2(ctx);
      if (theory_target == "survival") return theory_survival(ctx);
      return theory_scales(ctx);
    }
    if (sim_target == "pair") return sim_pair(opts, ctx);
    if (sim_target == "two-locus") return sim_two_locus(opts, ctx);
    if (sim_target == "recomb") return sim_recomb(opts, ctx);
    if (sim_target == "kingman") return sim_kingman(opts, ctx);
    return sim_decorr(opts, ctx);
  } catch (const ConfigFieldError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return kRuntimeError;
  }
}

}  // namespace slfv::cli
