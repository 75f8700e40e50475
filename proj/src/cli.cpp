#include "imreg/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>

#include "imreg/csv.hpp"
#include "imreg/freqdomain.hpp"
#include "imreg/parallel.hpp"
#include "imreg/verify.hpp"

namespace imreg::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kGolden = std::numbers::phi;

std::ofstream open_out(const std::string& dir, const std::string& file) {
  fs::create_directories(dir);
  const fs::path p = fs::path(dir) / file;
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write '" + p.string() + "'");
  return os;
}

std::string line(const char* fmt, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

double rel_err(double got, double ref) { return std::abs(got - ref) / std::abs(ref); }

// Runs `fn` and maps library exceptions onto exit codes.
template <typename F>
int guarded(std::ostream& err, F&& fn) {
  try {
    return fn();
  } catch (const SimulationOverflow& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  } catch (const TrajectoryTooShort& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ScenarioError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  }
}

}  // namespace

void apply(Scenario& s, const Overrides& o) {
  if (o.dt) s.sim.dt = *o.dt;
  if (o.t_end) s.sim.t_end = *o.t_end;
  if (o.seed) s.sim.seed = *o.seed;
  s.validate();
}

Evaluation evaluate(const Scenario& s) {
  Evaluation ev;
  ev.traj = run(make_plant(s), make_controller(s), s.sim, s.noise);
  const double period = s.period();
  const SteadyWindow w =
      s.noise.enabled
          ? random_period_window(ev.traj, period, s.analysis.noise_tail,
                                 s.sim.seed ^ 0x9e3779b97f4a7c15ULL)
          : steady_window(ev.traj, period, s.analysis.n_periods,
                          s.analysis.settle_fraction);
  ev.norms = norms(w);
  ev.spectrum = fourier_at(w, harmonic_grid(period, s.analysis.max_harmonic));
  ev.window_start = w.t_start();
  ev.window_end = w.t_end();
  return ev;
}

NormsRecord norms_record(const Scenario& s, const Norms& n) {
  NormsRecord r;
  r.scenario = s.name;
  r.sigma = s.regulator.sigma;
  r.noisy = s.noise.enabled;
  r.norms = n;
  if (s.controller == ControllerKind::InternalModel) {
    r.mu = s.regulator.mu;
    r.n_o = s.regulator.n_o;
    r.omega_hat = s.regulator.omega_hat;
  }
  return r;
}

Scenario with_axis_value(const Scenario& base, const std::string& axis, double value) {
  Scenario s = base;
  if (axis == "sigma") {
    s.regulator.sigma = value;
  } else if (axis == "omega_hat") {
    if (s.regulator.frequency_override) {
      throw ScenarioError("omega_hat sweep conflicts with explicit regulator.frequencies");
    }
    s.regulator.omega_hat = value;
  } else if (axis == "n_o") {
    if (value < 0 || value != std::floor(value)) {
      throw ScenarioError("n_o values must be non-negative integers");
    }
    const auto& c = base.regulator.coefficients;
    if (c.rule() != TailRule::CanonicalEpsilon) {
      throw ScenarioError("n_o sweep needs a canonical coefficient sequence");
    }
    if (s.regulator.frequency_override) {
      throw ScenarioError("n_o sweep conflicts with explicit regulator.frequencies");
    }
    s.regulator.n_o = static_cast<int>(value);
    s.regulator.coefficients = CoefficientSequence::canonical(s.regulator.n_o, c.epsilon(), c[0]);
    if (!s.sim.z0.empty()) s.sim.z0.assign(2 * s.regulator.n_o + 1, 0.0);
  } else {
    throw ScenarioError("unknown sweep axis '" + axis + "' (use sigma, n_o or omega_hat)");
  }
  s.name = base.name + "_" + axis + "_" + csv::fmt(value);
  s.validate();
  return s;
}

RegulatorConfig RegulatorFlags::config() const {
  RegulatorConfig c;
  c.n_o = n_o;
  c.sigma = sigma;
  c.mu = mu;
  c.omega_hat = omega_hat;
  c.coefficients = coefficients.empty()
                       ? CoefficientSequence::canonical(std::max(n_o, 0), epsilon)
                       : CoefficientSequence::explicit_values(coefficients);
  return c;
}

int cmd_simulate(Scenario s, const std::string& out_dir, std::ostream& out,
                 std::ostream& err) {
  return guarded(err, [&] {
    const Evaluation ev = evaluate(s);
    {
      auto os = open_out(out_dir, s.name + "_trajectory.csv");
      write_trajectory_csv(os, ev.traj);
    }
    {
      auto os = open_out(out_dir, s.name + "_norms.csv");
      const NormsRecord rec = norms_record(s, ev.norms);
      write_norms_csv(os, std::span(&rec, 1));
    }
    {
      auto os = open_out(out_dir, s.name + "_spectrum.csv");
      write_spectrum_csv(os, ev.spectrum);
    }
    out << s.name << ": sup=" << csv::fmt(ev.norms.sup) << " L2=" << csv::fmt(ev.norms.rms)
        << " window=[" << csv::fmt(ev.window_start) << ", " << csv::fmt(ev.window_end)
        << "]\n";
    return kOk;
  });
}

int cmd_sweep(const Scenario& base, const std::string& axis,
              const std::vector<double>& values, int workers, const std::string& out_dir,
              std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
    std::vector<Scenario> jobs;
    for (double v : values) jobs.push_back(with_axis_value(base, axis, v));
    const auto rows = parallel_map<NormsRecord>(jobs.size(), workers, [&](std::size_t i) {
      return norms_record(jobs[i], evaluate(jobs[i]).norms);
    });
    auto os = open_out(out_dir, base.name + "_sweep_" + axis + ".csv");
    write_norms_csv(os, rows);
    write_norms_csv(out, rows);
    return kOk;
  });
}

int cmd_analyze(const std::string& trajectory_path, double period, int n_periods,
                double settle_fraction, int max_harmonic, const std::string& out_dir,
                std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::ifstream in(trajectory_path);
    if (!in) throw std::invalid_argument("cannot open '" + trajectory_path + "'");
    const Trajectory traj = read_trajectory_csv(in);
    const SteadyWindow w = steady_window(traj, period, n_periods, settle_fraction);
    const Norms n = norms(w);
    const HarmonicSpectrum spec = fourier_at(w, harmonic_grid(period, max_harmonic));
    const std::string stem = fs::path(trajectory_path).stem().string();
    {
      auto os = open_out(out_dir, stem + "_spectrum.csv");
      write_spectrum_csv(os, spec);
    }
    NormsRecord rec;
    rec.scenario = stem;
    rec.norms = n;
    {
      auto os = open_out(out_dir, stem + "_norms.csv");
      write_norms_csv(os, std::span(&rec, 1));
    }
    out << stem << ": sup=" << csv::fmt(n.sup) << " L2=" << csv::fmt(n.rms)
        << " periodicity_residual=" << csv::fmt(periodicity_residual(w)) << '\n';
    return kOk;
  });
}

namespace {

struct NotchRow {
  int l;
  double omega;
  double depth_db;  // high-gain dB minus internal-model dB
};

struct BodeSummary {
  std::vector<NotchRow> notches;
  double hf_max_rel_dev = 0.0;  // over grid points above 100 omega_hat
};

BodeSummary bode_files(const RegulatorConfig& cfg, const std::string& out_dir) {
  const auto grid = log_grid(0.1, 1000.0, 2000);
  const BodeCurve hg = bode_high_gain(cfg.sigma, grid);
  const BodeCurve im = bode_internal_model(cfg, grid);
  {
    auto os = open_out(out_dir, "bode_high_gain.csv");
    write_bode_csv(os, hg);
  }
  {
    auto os = open_out(out_dir, "bode_internal_model.csv");
    write_bode_csv(os, im);
  }
  BodeSummary s;
  std::vector<double> freqs{0.0};
  for (double w : cfg.frequencies()) freqs.push_back(w);
  for (std::size_t l = 0; l < freqs.size(); ++l) {
    const double w = freqs[l];
    s.notches.push_back({static_cast<int>(l), w,
                         to_db(closed_loop_gain_high_gain(cfg.sigma, w)) -
                             to_db(closed_loop_gain_internal_model(cfg, w))});
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] > 100.0 * cfg.omega_hat) {
      s.hf_max_rel_dev =
          std::max(s.hf_max_rel_dev, rel_err(im.magnitude[i], hg.magnitude[i]));
    }
  }
  return s;
}

void print_bode_summary(std::ostream& out, const BodeSummary& s) {
  out << "notch depth relative to high-gain loop:\n";
  for (const auto& n : s.notches) {
    out << line("  l=%-3d omega=%-10.5g depth=%.1f dB\n", n.l, n.omega, n.depth_db);
  }
  out << line("max relative deviation above 100 omega_hat: %.3g\n", s.hf_max_rel_dev);
}

}  // namespace

int cmd_bode(const RegulatorFlags& flags, const std::string& out_dir, std::ostream& out,
             std::ostream& err) {
  return guarded(err, [&] {
    const RegulatorConfig cfg = flags.config();
    cfg.validate();
    print_bode_summary(out, bode_files(cfg, out_dir));
    return kOk;
  });
}

int cmd_verify(const RegulatorFlags& flags, const std::string& out_dir, std::ostream& out,
               std::ostream& err) {
  return guarded(err, [&] {
    const CertificationReport rep = certify(flags.config());
    write_report_text(out, rep);
    if (!out_dir.empty()) {
      auto os = open_out(out_dir, "certification.csv");
      write_report_csv(os, rep);
    }
    return rep.passed() ? kOk : kCheckFailed;
  });
}

namespace {

struct Comparison {
  std::string label;
  Scenario scenario;
  std::optional<double> sup_ref;
  std::optional<double> l2_ref;
  double tol = 0.1;
  // Used instead of the references when set: absolute upper bounds.
  std::optional<double> sup_max;
  std::optional<double> l2_max;
};

Scenario tuned(int n_o, double omega_hat, const Overrides& o) {
  Scenario s = example_scenario(n_o, omega_hat);
  apply(s, o);
  return s;
}

std::vector<Evaluation> run_all(const std::vector<Scenario>& jobs, int workers) {
  return parallel_map<Evaluation>(jobs.size(), workers,
                                  [&](std::size_t i) { return evaluate(jobs[i]); });
}

bool check_value(std::ostream& out, const std::string& label, const char* what, double got,
                 std::optional<double> ref, double tol, std::optional<double> max) {
  bool ok = true;
  if (max) {
    ok = got < *max;
    out << line("%-26s %-4s %12.5g  < %-10.3g %9s %s\n", label.c_str(), what, got, *max, "",
                ok ? "ok" : "FAIL");
  } else if (ref) {
    const double e = rel_err(got, *ref);
    ok = e <= tol;
    out << line("%-26s %-4s %12.5g %12.5g %8.2f%% %s\n", label.c_str(), what, got, *ref,
                100.0 * e, ok ? "ok" : "FAIL");
  }
  return ok;
}

bool compare_all(std::ostream& out, const std::vector<Comparison>& rows,
                 const std::vector<Evaluation>& evs) {
  out << line("%-26s %-4s %12s %12s %9s\n", "run", "norm", "computed", "reference", "rel.err");
  bool ok = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    ok &= check_value(out, r.label, "sup", evs[i].norms.sup, r.sup_ref, r.tol, r.sup_max);
    ok &= check_value(out, r.label, "L2", evs[i].norms.rms, r.l2_ref, r.tol, r.l2_max);
  }
  return ok;
}

void write_records(const std::string& out_dir, const std::string& file,
                   const std::vector<Scenario>& jobs, const std::vector<Evaluation>& evs) {
  std::vector<NormsRecord> recs;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    recs.push_back(norms_record(jobs[i], evs[i].norms));
  }
  auto os = open_out(out_dir, file);
  write_norms_csv(os, recs);
}

int reproduce_table1(const ReproduceOptions& opts, std::ostream& out) {
  const double sigmas[] = {2, 5, 10, 20, 40};
  const double sup_ref[] = {1.2555, 0.6577, 0.400, 0.2248, 0.1181};
  const double l2_ref[] = {0.9657, 0.4083, 0.2166, 0.1126, 0.0572};
  std::vector<Comparison> rows;
  for (int i = 0; i < 5; ++i) {
    Scenario s = high_gain_scenario(sigmas[i]);
    s.name = "high_gain_sigma" + csv::fmt(sigmas[i]);
    apply(s, opts.overrides);
    rows.push_back({"high-gain sigma=" + csv::fmt(sigmas[i]), s, sup_ref[i], l2_ref[i], 0.05,
                    {}, {}});
  }
  std::vector<Scenario> jobs;
  for (const auto& r : rows) jobs.push_back(r.scenario);
  const auto evs = run_all(jobs, opts.workers);
  write_records(opts.out_dir, "reproduce_high_gain.csv", jobs, evs);
  return compare_all(out, rows, evs) ? kOk : kCheckFailed;
}

int reproduce_table2(const ReproduceOptions& opts, std::ostream& out) {
  const auto& o = opts.overrides;
  std::vector<Comparison> rows;
  auto add = [&](const std::string& label, int n_o, double w, double sup, double l2) {
    Scenario s = tuned(n_o, w, o);
    rows.push_back({label, s, sup, l2, 0.10, {}, {}});
  };
  const double tuned_sup[] = {0.3074, 0.0917, 0.0178, 0.0049};
  const double tuned_l2[] = {0.1777, 0.0549, 0.0099, 0.0035};
  for (int n = 0; n <= 3; ++n) {
    add("n_o=" + std::to_string(n) + " w=2pi", n, kTwoPi, tuned_sup[n], tuned_l2[n]);
  }
  rows.push_back({"n_o=4 w=2pi", tuned(4, kTwoPi, o), {}, {}, 0.10, 1e-3, 1e-4});
  const struct {
    const char* tag;
    double w;
    double sup[3];
    double l2[3];
  } detuned[] = {
      {"0.99*2pi", 0.99 * kTwoPi, {0.1145, 0.0835, 0.0837}, {0.0587, 0.0371, 0.0369}},
      {"0.95*2pi", 0.95 * kTwoPi, {0.2045, 0.2038, 0.2041}, {0.0996, 0.0980, 0.0982}},
      {"golden*2pi", kGolden * kTwoPi, {0.2915, 0.2928, 0.2929}, {0.1788, 0.1790, 0.1790}},
  };
  for (const auto& d : detuned) {
    for (int n = 1; n <= 3; ++n) {
      add("n_o=" + std::to_string(n) + " w=" + d.tag, n, d.w, d.sup[n - 1], d.l2[n - 1]);
    }
  }

  // Noisy runs: only the ordering against the high-gain loop is checked.
  std::vector<Scenario> noisy;
  Scenario hg = high_gain_scenario(2.0);
  hg.noise.enabled = true;
  if (!o.seed) hg.sim.seed = 1;
  apply(hg, o);
  noisy.push_back(hg);
  for (int n = 0; n <= 4; ++n) {
    Scenario s = tuned(n, kTwoPi, o);
    s.noise.enabled = true;
    s.sim.seed = hg.sim.seed;
    noisy.push_back(s);
  }

  std::vector<Scenario> jobs;
  for (const auto& r : rows) jobs.push_back(r.scenario);
  jobs.insert(jobs.end(), noisy.begin(), noisy.end());
  const auto all = run_all(jobs, opts.workers);
  const std::vector<Evaluation> evs(all.begin(), all.begin() + rows.size());
  write_records(opts.out_dir, "reproduce_internal_model.csv", jobs, all);

  bool ok = compare_all(out, rows, evs);

  // Golden-ratio detuning: adding oscillators barely changes L2.
  const std::size_t g1 = rows.size() - 3;
  const double change = rel_err(evs[g1 + 2].norms.rms, evs[g1].norms.rms);
  const bool flat = change < 0.05;
  out << line("golden*2pi L2 change n_o=1->3: %.2f%% (< 5%%) %s\n", 100.0 * change,
              flat ? "ok" : "FAIL");
  ok &= flat;

  const double hg_l2 = all[rows.size()].norms.rms;
  out << line("noisy high-gain sigma=2: L2=%.5g (seed %llu)\n", hg_l2,
              static_cast<unsigned long long>(hg.sim.seed));
  for (int n = 0; n <= 4; ++n) {
    const double l2 = all[rows.size() + 1 + n].norms.rms;
    const bool better = l2 < hg_l2;
    out << line("noisy n_o=%d w=2pi: L2=%.5g below high-gain %s\n", n, l2,
                better ? "ok" : "FAIL");
    ok &= better;
  }
  return ok ? kOk : kCheckFailed;
}

int reproduce_fig1(const ReproduceOptions& opts, std::ostream& out) {
  const RegulatorConfig cfg = RegulatorConfig::canonical(10, 2.0, 1.0, kTwoPi, 0.5);
  const BodeSummary s = bode_files(cfg, opts.out_dir);
  print_bode_summary(out, s);
  bool ok = s.hf_max_rel_dev <= 0.01;
  for (const auto& n : s.notches) ok &= n.depth_db >= 60.0;
  out << (ok ? "notches >= 60 dB and high-frequency agreement within 1%: ok\n"
             : "Bode property check: FAIL\n");
  return ok ? kOk : kCheckFailed;
}

int reproduce_fft(const ReproduceOptions& opts, std::ostream& out) {
  struct Job {
    std::string file;
    Scenario s;
  };
  std::vector<Job> jobs;
  {
    Scenario s = high_gain_scenario(2.0);
    apply(s, opts.overrides);
    jobs.push_back({"fft_high_gain_sigma2.csv", s});
  }
  for (int n = 0; n <= 4; ++n) {
    jobs.push_back({"fft_tuned_no" + std::to_string(n) + ".csv", tuned(n, kTwoPi, opts.overrides)});
  }
  for (const auto& [tag, w] : {std::pair{"0.99", 0.99}, std::pair{"0.95", 0.95}}) {
    for (int n = 0; n <= 2; ++n) {
      jobs.push_back({std::string("fft_detuned") + tag + "_no" + std::to_string(n) + ".csv",
                      tuned(n, w * kTwoPi, opts.overrides)});
    }
  }
  const auto spectra = parallel_map<HarmonicSpectrum>(
      jobs.size(), opts.workers, [&](std::size_t i) {
        const Scenario& s = jobs[i].s;
        const Trajectory traj = run(make_plant(s), make_controller(s), s.sim, s.noise);
        const SteadyWindow w = steady_window(traj, s.period(), s.analysis.n_periods,
                                             s.analysis.settle_fraction);
        // Bins up to 20 harmonics of the plant frequency.
        return dft_spectrum(w, static_cast<std::size_t>(20 * s.analysis.n_periods + 1));
      });
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    auto os = open_out(opts.out_dir, jobs[i].file);
    write_spectrum_csv(os, spectra[i]);
    out << jobs[i].file << ": peak " << csv::fmt(spectra[i].max_magnitude()) << '\n';
  }
  return kOk;
}

}  // namespace

int cmd_reproduce(const std::string& table, const ReproduceOptions& opts, std::ostream& out,
                  std::ostream& err) {
  return guarded(err, [&] {
    if (table == "1") return reproduce_table1(opts, out);
    if (table == "2") return reproduce_table2(opts, out);
    if (table == "fig1") return reproduce_fig1(opts, out);
    if (table == "fft") return reproduce_fft(opts, out);
    throw std::invalid_argument("unknown table '" + table + "'");
  });
}

namespace {

void add_regulator_flags(CLI::App* sub, RegulatorFlags& f) {
  sub->add_option("--sigma", f.sigma, "high-gain coefficient")->capture_default_str();
  sub->add_option("--mu", f.mu, "internal-model gain")->capture_default_str();
  sub->add_option("--epsilon", f.epsilon, "canonical weight exponent")->capture_default_str();
  sub->add_option("--omega-hat", f.omega_hat, "base frequency (rad/s)")->capture_default_str();
  sub->add_option("--n-o", f.n_o, "number of oscillators")->capture_default_str();
  sub->add_option("--coefficients", f.coefficients, "explicit n_z0..n_z(n_o)")
      ->delimiter(',');
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Periodic output regulation with a truncated internal model"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir, table, axis, traj_path;
  Overrides ov;
  double dt = 0, t_end = 0;
  std::uint64_t seed = 0;
  int workers = default_workers();
  std::string values_text;
  RegulatorFlags reg;
  double period = 1.0, settle = 0.5;
  int n_periods = 20, max_harmonic = 10;

  auto add_run_flags = [&](CLI::App* sub) {
    sub->add_option("--dt", dt, "integration step (s)");
    sub->add_option("--t-end", t_end, "simulated time (s)");
    sub->add_option("--seed", seed, "noise seed");
  };

  auto* sim = app.add_subcommand("simulate", "simulate one scenario");
  sim->add_option("--scenario", scenario_path)->required();
  sim->add_option("--out", out_dir, "output directory (default: scenario outputs)");
  add_run_flags(sim);

  auto* sweep = app.add_subcommand("sweep", "sweep one regulator parameter");
  sweep->add_option("--scenario", scenario_path)->required();
  sweep->add_option("--axis", axis)->required()->check(CLI::IsMember({"sigma", "n_o", "omega_hat"}));
  sweep->add_option("--values", values_text, "comma-separated list")->required();
  sweep->add_option("--workers", workers)->check(CLI::PositiveNumber);
  sweep->add_option("--out", out_dir);
  add_run_flags(sweep);

  auto* analyze = app.add_subcommand("analyze", "steady-state norms of a trajectory CSV");
  analyze->add_option("--trajectory", traj_path)->required();
  analyze->add_option("--period", period)->capture_default_str();
  analyze->add_option("--periods", n_periods)->capture_default_str();
  analyze->add_option("--settle-fraction", settle)->capture_default_str();
  analyze->add_option("--max-harmonic", max_harmonic)->capture_default_str();
  analyze->add_option("--out", out_dir);

  auto* bode = app.add_subcommand("bode", "closed-loop e/q magnitude for both controllers");
  add_regulator_flags(bode, reg);
  bode->add_option("--out", out_dir);

  auto* verify = app.add_subcommand("verify", "structural checks on a regulator");
  add_regulator_flags(verify, reg);
  verify->add_option("--out", out_dir, "also write certification.csv here");

  auto* repro = app.add_subcommand("reproduce", "reference tables and figure data");
  repro->add_option("--table", table)->required()->check(CLI::IsMember({"1", "2", "fig1", "fft"}));
  repro->add_option("--workers", workers)->check(CLI::PositiveNumber);
  repro->add_option("--out", out_dir);
  add_run_flags(repro);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  auto collect = [&](CLI::App* sub) {
    if (sub->count("--dt")) ov.dt = dt;
    if (sub->count("--t-end")) ov.t_end = t_end;
    if (sub->count("--seed")) ov.seed = seed;
  };
  auto load = [&](CLI::App* sub) {
    collect(sub);
    Scenario s = load_scenario(scenario_path);
    apply(s, ov);
    return s;
  };

  return guarded(err, [&]() -> int {
    if (*sim) {
      Scenario s = load(sim);
      return cmd_simulate(s, out_dir.empty() ? s.outputs : out_dir, out, err);
    }
    if (*sweep) {
      Scenario s = load(sweep);
      std::vector<double> values;
      if (!values_text.empty()) {
        for (const auto& cell : csv::split(values_text)) values.push_back(csv::parse_double(cell));
      }
      return cmd_sweep(s, axis, values, workers, out_dir.empty() ? s.outputs : out_dir, out,
                       err);
    }
    if (*analyze) {
      return cmd_analyze(traj_path, period, n_periods, settle, max_harmonic,
                         out_dir.empty() ? "." : out_dir, out, err);
    }
    if (*bode) return cmd_bode(reg, out_dir.empty() ? "." : out_dir, out, err);
    if (*verify) return cmd_verify(reg, out_dir, out, err);
    collect(repro);
    return cmd_reproduce(table, {ov, workers, out_dir.empty() ? "." : out_dir}, out, err);
  });
}

}  // namespace imreg::cli
