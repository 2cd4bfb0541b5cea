#include "spinjj/cli/cli.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "spinjj/analysis.hpp"
#include "spinjj/cli/figures.hpp"
#include "spinjj/cli/io.hpp"
#include "spinjj/cli/svg.hpp"
#include "spinjj/version.hpp"
#include "spinjj/wellmodes.hpp"

namespace spinjj::cli {

namespace {

// ---------------------------------------------------------------------------
// Config files: "key=value" lines become "--key=value" arguments placed
// right after the subcommand, so explicit flags (parsed later) win.

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> config_arguments(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config file " + path);
  std::vector<std::string> out;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    std::replace(key.begin(), key.end(), '_', '-');
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    out.push_back("--" + key + "=" + value);
  }
  return out;
}

std::vector<std::string> expand_config(std::vector<std::string> args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    std::size_t consumed = 0;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      consumed = 2;
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      consumed = 1;
    } else {
      continue;
    }
    const std::vector<std::string> extra = config_arguments(path);
    args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + consumed));
    // Subcommand is the first argument (figure takes its number too).
    std::size_t at = args.empty() ? 0 : 1;
    if (!args.empty() && args[0] == "figure" && args.size() > 1) at = 2;
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), extra.begin(), extra.end());
    break;
  }
  return args;
}

// ---------------------------------------------------------------------------
// Shared option bundles

struct SystemOptions {
  double eps = 1.0;
  double lambda_s = 1.0;
  double lambda_a = -0.01;
  double j = 0.001;
  std::optional<double> eps_right;
  std::optional<double> lambda_s_right;
  std::optional<double> lambda_a_right;

  SystemParams params() const {
    SystemParams p = SystemParams::symmetric(eps, lambda_s, lambda_a, j);
    if (eps_right) p.eps_right = *eps_right;
    if (lambda_s_right) p.lambda_s_right = *lambda_s_right;
    if (lambda_a_right) p.lambda_a_right = *lambda_a_right;
    p.validate();
    return p;
  }
};

void add_system_options(CLI::App* app, SystemOptions& o) {
  app->add_option("--eps", o.eps, "On-site energy (both wells)")->capture_default_str();
  app->add_option("--lambda-s", o.lambda_s, "Spin-symmetric interaction (both wells)")->capture_default_str();
  app->add_option("--lambda-a", o.lambda_a, "Spin-asymmetric interaction (both wells)")->capture_default_str();
  app->add_option("--j", o.j, "Tunnelling coefficient")->capture_default_str();
  app->add_option("--eps-right", o.eps_right, "Right-well on-site energy override");
  app->add_option("--lambda-s-right", o.lambda_s_right, "Right-well lambda_S override");
  app->add_option("--lambda-a-right", o.lambda_a_right, "Right-well lambda_A override");
}

void add_tolerance_options(CLI::App* app, IntegratorConfig& cfg) {
  app->add_option("--rtol", cfg.rtol, "Relative tolerance")->capture_default_str();
  app->add_option("--atol", cfg.atol, "Absolute tolerance")->capture_default_str();
  app->add_option("--dt-init", cfg.dt_init, "Initial step")->capture_default_str();
  app->add_option("--dt-min", cfg.dt_min, "Smallest allowed step")->capture_default_str();
}

void add_time_options(CLI::App* app, IntegratorConfig& cfg) {
  app->add_option("--tmax", cfg.t_max, "End time")->capture_default_str();
  app->add_option("--sample-dt", cfg.sample_dt, "Output grid spacing")->capture_default_str();
}

struct OutputOptions {
  std::string out;
  std::string format = "csv";
  std::string plot;

  Format parsed_format() const {
    const auto f = parse_format(format);
    if (!f) throw std::invalid_argument("unknown format '" + format + "' (csv, jsonl)");
    return *f;
  }
};

void add_output_options(CLI::App* app, OutputOptions& o, bool with_plot = true) {
  app->add_option("--out", o.out, "Output file (stdout when omitted)");
  app->add_option("--format", o.format, "csv or jsonl")->capture_default_str()->check(CLI::IsMember({"csv", "jsonl"}));
  if (with_plot) app->add_option("--plot", o.plot, "Also write an SVG line chart to this path");
}

void add_config_option(CLI::App* app) {
  app->add_option("--config", "Flat key=value file; keys are option names");
}

// Twelve reals: re/im of xi_+, xi_0, xi_-, eta_+, eta_0, eta_-.
SpinorPair parse_state(const std::string& text, bool normalize, const char* what) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw std::invalid_argument(std::string(what) + ": not a number: '" + item + "'");
    v.push_back(x);
  }
  if (v.size() != 12) {
    throw std::invalid_argument(std::string(what) + " needs 12 comma-separated reals (re,im of xi+,xi0,xi-,eta+,eta0,eta-), got " +
                                std::to_string(v.size()));
  }
  SpinorPair s;
  for (std::size_t c = 0; c < 3; ++c) {
    s.left[c] = {v[2 * c], v[2 * c + 1]};
    s.right[c] = {v[6 + 2 * c], v[7 + 2 * c]};
  }
  if (!s.is_finite()) throw std::invalid_argument(std::string(what) + " contains non-finite values");
  if (normalize) {
    s.left = s.left.normalized();
    s.right = s.right.normalized();
  }
  for (const auto& [name, f] : {std::pair{"left", &s.left}, std::pair{"right", &s.right}}) {
    const double n = f->norm_squared();
    if (std::abs(n - 1.0) > 1e-9) {
      throw std::invalid_argument(std::string(what) + ": " + name + " spinor has squared norm " + format_value(n) +
                                  ", expected 1 within 1e-9 (pass --normalize to rescale)");
    }
  }
  return s;
}

std::string state_text(const SpinorPair& s) {
  std::string out;
  for (const Spinor* f : {&s.left, &s.right}) {
    for (std::size_t c = 0; c < 3; ++c) {
      for (double x : {(*f)[c].real(), (*f)[c].imag()}) {
        if (!out.empty()) out += ',';
        out += format_param(x);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Output helpers

struct Context {
  std::ostream& out;
  std::ostream& err;
  bool colour = false;
  std::ostream* summary = nullptr;  // err when data goes to stdout
};

void emit(Context& ctx, const OutputOptions& o, const Table& t, const Metadata& meta) {
  const Format f = o.parsed_format();
  if (o.out.empty()) {
    write_table(ctx.out, t, meta, f);
    ctx.summary = &ctx.err;
  } else {
    write_table_file(o.out, t, meta, f);
  }
}

void summary_line(Context& ctx, const std::string& text) {
  std::ostream& os = ctx.summary ? *ctx.summary : ctx.out;
  if (ctx.colour && &os == &std::cout) {
    os << "\033[1m" << text << "\033[0m\n";
  } else {
    os << text << '\n';
  }
}

void plot_if_requested(Context& ctx, const OutputOptions& o, const PlotSpec& spec) {
  if (o.plot.empty()) return;
  if (!write_svg(o.plot, spec)) ctx.err << "warning: could not write plot " << o.plot << '\n';
}

Metadata command_meta(const std::string& command) {
  Metadata m;
  m.add("tool", std::string("spinjj ") + kVersion);
  m.add("command", command);
  return m;
}

std::optional<ReducedParams> reduced_params_of(const SystemParams& p) {
  if (!p.is_symmetric() || !(p.j > 0.0)) return std::nullopt;
  return ReducedParams{p.j, p.lambda_a_left};
}

std::string fmt(double v) { return format_param(v); }

std::string short_fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Subcommands

struct SimulateCmd {
  SystemOptions sys;
  IntegratorConfig cfg;
  OutputOptions io;
  std::string init = "1,0,0,0,0,0,0,0,0,0,0,1";
  bool normalize = false;
  std::string method = "adaptive";
  double dt = 0.05;
  std::string observable = "M_left";

  SimulateCmd() {
    cfg.t_max = 2500.0;
    cfg.sample_dt = 0.5;
  }

  void attach(CLI::App* app) {
    add_system_options(app, sys);
    add_tolerance_options(app, cfg);
    add_time_options(app, cfg);
    add_output_options(app, io);
    add_config_option(app);
    app->add_option("--init", init, "Initial state: 12 reals, re/im of xi+,xi0,xi-,eta+,eta0,eta-")
        ->capture_default_str();
    app->add_flag("--normalize", normalize, "Rescale each initial spinor to unit norm");
    app->add_option("--method", method, "adaptive (Dormand-Prince 5(4)) or rk4")
        ->capture_default_str()
        ->check(CLI::IsMember({"adaptive", "rk4"}));
    app->add_option("--dt", dt, "Step for --method rk4")->capture_default_str();
    app->add_option("--observable", observable, "Observable for the period in the summary")->capture_default_str();
  }

  int operator()(Context& ctx) const {
    const SystemParams p = sys.params();
    const SpinorPair s0 = parse_state(init, normalize, "--init");
    cfg.validate();
    const Trajectory tr =
        method == "rk4" ? integrate_fixed(s0, p, dt, cfg.t_max, cfg.sample_dt) : integrate(s0, p, cfg);

    Metadata meta = command_meta("simulate");
    meta.add_params(p);
    meta.add("init", state_text(s0));
    meta.add("method", method);
    if (method == "rk4") meta.add("dt", dt);
    meta.add_integrator(cfg);
    emit(ctx, io, trajectory_table(tr), meta);

    PlotSpec spec{"simulate", "t", observable, {{observable, tr.times, observable_series(tr, observable)}}};
    plot_if_requested(ctx, io, spec);

    std::ostringstream os;
    const auto rp = reduced_params_of(p);
    os << "regime=";
    try {
      os << (rp ? to_string(classify_regime(*rp)) : std::string_view("n/a"));
    } catch (const std::exception&) {
      os << "n/a";
    }
    try {
      const PeriodEstimate pe = measure_period(tr, observable);
      os << " period(" << observable << ")=" << short_fmt(pe.period);
      os << " self_trapped=" << (detect_self_trapping(tr) ? "yes" : "no");
    } catch (const InsufficientCyclesError&) {
      os << " period(" << observable << ")=n/a";
    }
    os << " max_drift=" << short_fmt(ledger_drift(tr).max()) << " samples=" << tr.size();
    summary_line(ctx, os.str());
    return kExitOk;
  }
};

struct ReducedCmd {
  double j = 0.0051;
  double lambda_a = -0.01;
  ReducedState s0{1.0, 0.0, 0.0};
  IntegratorConfig cfg;
  OutputOptions io;

  ReducedCmd() {
    cfg.t_max = 2500.0;
    cfg.sample_dt = 0.5;
  }

  void attach(CLI::App* app) {
    app->add_option("--j", j, "Tunnelling coefficient")->capture_default_str();
    app->add_option("--lambda-a", lambda_a, "Spin-asymmetric interaction")->capture_default_str();
    app->add_option("--m0", s0.m, "Initial M")->capture_default_str();
    app->add_option("--r0", s0.r0, "Initial R0")->capture_default_str();
    app->add_option("--i0", s0.i0, "Initial I0")->capture_default_str();
    add_tolerance_options(app, cfg);
    add_time_options(app, cfg);
    add_output_options(app, io);
    add_config_option(app);
  }

  int operator()(Context& ctx) const {
    const ReducedParams p{j, lambda_a};
    p.validate();
    cfg.validate();
    const ReducedTrajectory tr = integrate_reduced(s0, p, cfg);

    Table t{{"t", "M", "R0", "I0", "theta", "C"}, {}};
    std::vector<double> ms;
    double c_drift = 0.0;
    const double c0 = conserved_quantity(s0);
    const std::vector<PortraitPoint> portrait = phase_portrait(tr);
    for (std::size_t i = 0; i < tr.states.size(); ++i) {
      const ReducedState& s = tr.states[i];
      const double c = conserved_quantity(s);
      c_drift = std::max(c_drift, std::abs(c - c0));
      t.rows.push_back({tr.times[i], s.m, s.r0, s.i0, portrait[i].theta, c});
      ms.push_back(s.m);
    }
    Metadata meta = command_meta("reduced");
    meta.add("j", j);
    meta.add("lambda_a", lambda_a);
    meta.add("m0", s0.m);
    meta.add("r0", s0.r0);
    meta.add("i0", s0.i0);
    meta.add_integrator(cfg);
    emit(ctx, io, t, meta);
    plot_if_requested(ctx, io, {"reduced", "t", "M", {{"M", tr.times, ms}}});

    std::ostringstream os;
    const Regime regime = classify_regime(p);
    os << "regime=" << to_string(regime);
    if (regime != Regime::Critical && s0 == ReducedState{1.0, 0.0, 0.0}) os << " tau_analytic=" << short_fmt(analytic_period(p));
    try {
      os << " period(M)=" << short_fmt(measure_period(tr.times, ms).period);
    } catch (const InsufficientCyclesError&) {
      os << " period(M)=n/a";
    }
    os << " C_drift=" << short_fmt(c_drift) << " samples=" << tr.times.size();
    summary_line(ctx, os.str());
    return kExitOk;
  }
};

struct PeriodCmd {
  double j = 0.001;
  double lambda_a = -0.01;
  std::string from;
  std::string observable = "M_left";
  std::string method = "extrema";
  bool physical = false;
  double a0_bohr = 101.8;
  double a2_bohr = 100.4;
  double n_atoms = 1e7;
  std::optional<double> sigma;
  double density_cm3 = 1.7e13;

  void attach(CLI::App* app) {
    app->add_option("--j", j, "Tunnelling coefficient")->capture_default_str();
    app->add_option("--lambda-a", lambda_a, "Spin-asymmetric interaction")->capture_default_str();
    app->add_option("--from", from, "Measure the period of a trajectory CSV instead")->check(CLI::ExistingFile);
    app->add_option("--observable", observable, "Column measured with --from")->capture_default_str();
    app->add_option("--method", method, "extrema or autocorrelation (with --from)")
        ->capture_default_str()
        ->check(CLI::IsMember({"extrema", "autocorrelation"}));
    app->add_flag("--physical", physical, "Also print phase-diffusion times and number sensitivity");
    app->add_option("--a0", a0_bohr, "Spin-0 scattering length (Bohr radii)")->capture_default_str();
    app->add_option("--a2", a2_bohr, "Spin-2 scattering length (Bohr radii)")->capture_default_str();
    app->add_option("--n-atoms", n_atoms, "Atom number")->capture_default_str();
    app->add_option("--sigma", sigma, "Atom-number standard deviation (default sqrt(N))");
    app->add_option("--density", density_cm3, "Mean density (cm^-3)")->capture_default_str();
    add_config_option(app);
  }

  int operator()(Context& ctx) const {
    if (!from.empty()) {
      const LoadedTrajectory loaded = read_trajectory_csv(std::filesystem::path(from));
      const std::vector<double> v = observable_series(loaded.traj, observable);
      const PeriodEstimate pe = method == "autocorrelation" ? measure_period_autocorrelation(loaded.traj.times, v)
                                                            : measure_period(loaded.traj.times, v);
      ctx.out << "period=" << format_value(pe.period) << " uncertainty=" << format_value(pe.uncertainty)
              << " cycles=" << pe.n_cycles_used << " method=" << to_string(pe.method) << " observable=" << observable
              << '\n';
      return kExitOk;
    }
    const ReducedParams p{j, lambda_a};
    p.validate();
    const Regime regime = classify_regime(p);
    const double ratio = lambda_a == 0.0 ? 0.0 : 2.0 * j / std::abs(lambda_a);
    ctx.out << "regime=" << to_string(regime) << " ratio_2J_over_abs_lambda_a=" << fmt(ratio);
    if (regime == Regime::Critical) {
      ctx.out << " tau=inf\n";
    } else {
      ctx.out << " tau=" << format_value(analytic_period(p)) << '\n';
    }
    if (physical) print_physical(ctx);
    return kExitOk;
  }

  void print_physical(Context& ctx) const {
    const CouplingConstants cc = CouplingConstants::from_scattering_lengths(
        a0_bohr * si::kBohrRadius, a2_bohr * si::kBohrRadius, si::kRb87Mass);
    PhysicalEstimateInputs in =
        PhysicalEstimateInputs::with_poisson_sigma(n_atoms, cc.c_s, cc.c_a, density_cm3 * 1e6);
    if (sigma) in.sigma_n = *sigma;
    const PhaseDiffusionTimes t = phase_diffusion_times(in);
    const double sens = period_sensitivity(n_atoms);
    ctx.out << "c_s=" << short_fmt(cc.c_s) << " J m^3 c_a=" << short_fmt(cc.c_a) << " J m^3\n";
    ctx.out << "tau_c_s=" << short_fmt(t.tau_c_s) << " s tau_c_a=" << short_fmt(t.tau_c_a)
            << " s ratio=" << short_fmt(t.tau_c_a / t.tau_c_s) << '\n';
    ctx.out << "period_sensitivity=" << short_fmt(sens) << " (" << short_fmt(100.0 * sens)
            << "%; 1/sqrt(N) scaling, ten times the 0.003% figure sometimes quoted for N=1e7)\n";
  }
};

struct ScanCmd {
  double lambda_a = -0.01;
  std::vector<double> j_list;
  double j_min = 0.001;
  double j_max = 0.02;
  int j_count = 0;
  PeriodScanOptions opt;
  bool serial = false;
  OutputOptions io;

  void attach(CLI::App* app) {
    app->add_option("--lambda-a", lambda_a, "Spin-asymmetric interaction")->capture_default_str();
    app->add_option("--j-list", j_list, "Comma-separated J values")->delimiter(',');
    app->add_option("--j-min", j_min, "Linear grid start (with --j-count)")->capture_default_str();
    app->add_option("--j-max", j_max, "Linear grid end (with --j-count)")->capture_default_str();
    app->add_option("--j-count", j_count, "Linear grid size");
    app->add_option("--eps", opt.eps, "On-site energy")->capture_default_str();
    app->add_option("--lambda-s", opt.lambda_s, "Spin-symmetric interaction")->capture_default_str();
    app->add_option("--periods", opt.periods, "Integration length in analytic periods")->capture_default_str();
    app->add_option("--samples-per-period", opt.samples_per_period, "Output samples per period")->capture_default_str();
    app->add_option("--critical-exclusion", opt.critical_exclusion, "Skip |2J/|lambda_A| - 1| below this")
        ->capture_default_str();
    add_tolerance_options(app, opt.integrator);
    app->add_flag("--serial", serial, "Evaluate points one after another");
    add_output_options(app, io);
    add_config_option(app);
  }

  std::vector<double> js() const {
    if (!j_list.empty()) return j_list;
    if (j_count == 0) return {0.001, 0.002, 0.003, 0.004, 0.0049, 0.0051, 0.006, 0.008, 0.01, 0.02};
    if (j_count < 2 || !(j_max > j_min)) throw std::invalid_argument("--j-count needs >= 2 and --j-max > --j-min");
    std::vector<double> out;
    for (int i = 0; i < j_count; ++i) out.push_back(j_min + (j_max - j_min) * i / (j_count - 1));
    return out;
  }

  int operator()(Context& ctx) {
    const std::vector<double> j = js();
    for (double v : j) {
      if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("J values must be positive");
    }
    opt.parallel = !serial;
    const std::vector<PeriodScanRow> rows = period_scan(j, lambda_a, opt);

    Table t{{"j", "ratio", "tau_analytic", "tau_measured", "uncertainty", "rel_error", "status"}, {}};
    int ok = 0;
    int failed = 0;
    double worst = 0.0;
    PlotSpec spec{"period scan", "2J/|lambda_A|", "tau", {{"analytic", {}, {}}, {"measured", {}, {}}}};
    for (const PeriodScanRow& r : rows) {
      const double rel = r.ok ? std::abs(r.tau_measured / r.tau_analytic - 1.0) : std::nan("");
      if (r.ok) {
        ++ok;
        worst = std::max(worst, rel);
        spec.series[1].x.push_back(r.ratio);
        spec.series[1].y.push_back(r.tau_measured);
      } else if (r.status.rfind("error", 0) == 0) {
        ++failed;
      }
      if (std::isfinite(r.tau_analytic)) {
        spec.series[0].x.push_back(r.ratio);
        spec.series[0].y.push_back(r.tau_analytic);
      }
      t.rows.push_back({r.j, r.ratio, r.tau_analytic, r.tau_measured, r.uncertainty, rel, r.status});
    }
    Metadata meta = command_meta("scan");
    meta.add("lambda_a", lambda_a);
    meta.add("eps", opt.eps);
    meta.add("lambda_s", opt.lambda_s);
    meta.add("init", "1,0,0,0,0,0,0,0,0,0,0,1");
    meta.add("periods", opt.periods);
    meta.add("samples_per_period", opt.samples_per_period);
    meta.add("rtol", opt.integrator.rtol);
    meta.add("atol", opt.integrator.atol);
    emit(ctx, io, t, meta);
    plot_if_requested(ctx, io, spec);

    std::ostringstream os;
    os << "rows=" << rows.size() << " ok=" << ok << " failed=" << failed << " max_rel_error=" << short_fmt(worst);
    summary_line(ctx, os.str());
    return failed > 0 ? kExitNumerical : kExitOk;
  }
};

struct PortraitCmd {
  std::string source = "reduced";
  double j = 0.0051;
  double lambda_a = -0.01;
  double eps = 1.0;
  double lambda_s = 1.0;
  ReducedState s0{1.0, 0.0, 0.0};
  std::string init = "1,0,0,0,0,0,0,0,0,0,0,1";
  bool normalize = false;
  IntegratorConfig cfg;
  OutputOptions io;

  PortraitCmd() {
    cfg.t_max = 3600.0;
    cfg.sample_dt = 0.5;
  }

  void attach(CLI::App* app) {
    app->add_option("--source", source, "reduced or full")->capture_default_str()->check(CLI::IsMember({"reduced", "full"}));
    app->add_option("--j", j, "Tunnelling coefficient")->capture_default_str();
    app->add_option("--lambda-a", lambda_a, "Spin-asymmetric interaction")->capture_default_str();
    app->add_option("--eps", eps, "On-site energy (full)")->capture_default_str();
    app->add_option("--lambda-s", lambda_s, "Spin-symmetric interaction (full)")->capture_default_str();
    app->add_option("--m0", s0.m, "Initial M (reduced)")->capture_default_str();
    app->add_option("--r0", s0.r0, "Initial R0 (reduced)")->capture_default_str();
    app->add_option("--i0", s0.i0, "Initial I0 (reduced)")->capture_default_str();
    app->add_option("--init", init, "Initial state (full)")->capture_default_str();
    app->add_flag("--normalize", normalize, "Rescale each initial spinor to unit norm");
    add_tolerance_options(app, cfg);
    add_time_options(app, cfg);
    add_output_options(app, io);
    add_config_option(app);
  }

  int operator()(Context& ctx) const {
    cfg.validate();
    std::vector<double> times;
    std::vector<PortraitPoint> pts;
    Metadata meta = command_meta("portrait");
    meta.add("source", source);
    if (source == "reduced") {
      const ReducedParams p{j, lambda_a};
      p.validate();
      const ReducedTrajectory tr = integrate_reduced(s0, p, cfg);
      times = tr.times;
      pts = phase_portrait(tr);
      meta.add("j", j);
      meta.add("lambda_a", lambda_a);
      meta.add("m0", s0.m);
      meta.add("r0", s0.r0);
      meta.add("i0", s0.i0);
    } else {
      const SystemParams p = SystemParams::symmetric(eps, lambda_s, lambda_a, j);
      const SpinorPair s = parse_state(init, normalize, "--init");
      const Trajectory tr = integrate(s, p, cfg);
      times = tr.times;
      pts = phase_portrait(tr);
      meta.add_params(p);
      meta.add("init", state_text(s));
    }
    meta.add_integrator(cfg);
    Table t{{"t", "theta", "M"}, {}};
    PlotSpec spec{"phase portrait", "theta_{+-}", "M", {{"", {}, {}}}};
    double th_lo = 0.0, th_hi = 0.0, m_lo = 0.0, m_hi = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      t.rows.push_back({times[i], pts[i].theta, pts[i].m});
      spec.series[0].x.push_back(pts[i].theta);
      spec.series[0].y.push_back(pts[i].m);
      if (i == 0) {
        th_lo = th_hi = pts[i].theta;
        m_lo = m_hi = pts[i].m;
      }
      th_lo = std::min(th_lo, pts[i].theta);
      th_hi = std::max(th_hi, pts[i].theta);
      m_lo = std::min(m_lo, pts[i].m);
      m_hi = std::max(m_hi, pts[i].m);
    }
    emit(ctx, io, t, meta);
    plot_if_requested(ctx, io, spec);
    std::ostringstream os;
    os << "points=" << pts.size() << " theta=[" << short_fmt(th_lo) << ", " << short_fmt(th_hi) << "] M=["
       << short_fmt(m_lo) << ", " << short_fmt(m_hi) << "]";
    summary_line(ctx, os.str());
    return kExitOk;
  }
};

struct ModesCmd {
  double v0 = 10.0;
  double a = 2.0;
  std::string potential_file;
  Grid1D grid;
  InteractionStrengths couplings;
  OutputOptions io;

  void attach(CLI::App* app) {
    app->add_option("--v0", v0, "Quartic barrier height")->capture_default_str();
    app->add_option("--a", a, "Quartic well half-separation")->capture_default_str();
    app->add_option("--potential-file", potential_file, "Two-column (x, V) table instead of the quartic")
        ->check(CLI::ExistingFile);
    app->add_option("--x-min", grid.x_min, "Grid start")->capture_default_str();
    app->add_option("--x-max", grid.x_max, "Grid end")->capture_default_str();
    app->add_option("--n", grid.n_points, "Grid points")->capture_default_str();
    app->add_option("--c-s", couplings.c_s, "1D spin-symmetric coupling")->capture_default_str();
    app->add_option("--c-a", couplings.c_a, "1D spin-asymmetric coupling")->capture_default_str();
    add_output_options(app, io);
    add_config_option(app);
  }

  int operator()(Context& ctx) const {
    grid.validate();
    DoubleWellPotential pot = DoubleWellPotential::quartic(v0, a);
    if (!potential_file.empty()) {
      std::ifstream is(potential_file);
      if (!is) throw IoError("cannot open " + potential_file);
      pot = DoubleWellPotential::from_table(is);
    }
    const WellModes modes = lowest_modes(pot, grid);
    const WellParameters wp = well_parameters(modes, pot, grid, couplings);
    if (!modes.warning.empty()) ctx.err << "warning: " << modes.warning << '\n';

    Table t{{"x", "V", "psi_s", "psi_a", "sqrt_n_left", "sqrt_n_right"}, {}};
    for (std::size_t i = 0; i < grid.n_points; ++i) {
      t.rows.push_back({modes.x[i], pot(modes.x[i]), modes.psi_s[i], modes.psi_a[i], modes.sqrt_n_left[i],
                        modes.sqrt_n_right[i]});
    }
    Metadata meta = command_meta("modes");
    meta.add("potential", pot.describe());
    meta.add("x_min", grid.x_min);
    meta.add("x_max", grid.x_max);
    meta.add("n_points", static_cast<double>(grid.n_points));
    meta.add("c_s", couplings.c_s);
    meta.add("c_a", couplings.c_a);
    meta.add("e_s", modes.e_s);
    meta.add("e_a", modes.e_a);
    meta.add("e_third", modes.e_third);
    meta.add("gap_ratio", modes.gap_ratio);
    meta.add_params(wp.params);
    meta.add("j_signed", wp.j_signed);
    meta.add("overlap", wp.overlap);
    emit(ctx, io, t, meta);
    plot_if_requested(ctx, io,
                      {"well modes", "x", "amplitude",
                       {{"sqrt n_L", modes.x, modes.sqrt_n_left}, {"sqrt n_R", modes.x, modes.sqrt_n_right}}});

    std::ostringstream os;
    os << "e_s=" << short_fmt(modes.e_s) << " e_a=" << short_fmt(modes.e_a) << " J=" << short_fmt(wp.params.j)
       << " (signed " << short_fmt(wp.j_signed) << ") half_splitting=" << short_fmt(0.5 * (modes.e_a - modes.e_s))
       << " eps_L=" << short_fmt(wp.params.eps_left) << " eps_R=" << short_fmt(wp.params.eps_right)
       << " lambda_S=" << short_fmt(wp.params.lambda_s_left) << " lambda_A=" << short_fmt(wp.params.lambda_a_left);
    summary_line(ctx, os.str());
    return kExitOk;
  }
};

struct StationaryCmd {
  SystemOptions sys;
  std::string seed = "1,0,0,0,0,0,0,0,0,0,0,1";
  bool normalize = false;
  double tol = 1e-10;
  StationaryOptions opt;
  OutputOptions io;

  void attach(CLI::App* app) {
    add_system_options(app, sys);
    app->add_option("--seed", seed, "Starting state: 12 reals")->capture_default_str();
    app->add_flag("--normalize", normalize, "Rescale each seed spinor to unit norm");
    app->add_option("--tol", tol, "Residual tolerance")->capture_default_str();
    app->add_option("--max-iterations", opt.max_iterations, "Newton iteration cap")->capture_default_str();
    add_output_options(app, io, false);
    add_config_option(app);
  }

  int operator()(Context& ctx) const {
    const SystemParams p = sys.params();
    const SpinorPair s0 = parse_state(seed, normalize, "--seed");
    if (!(tol > 0.0)) throw std::invalid_argument("--tol must be positive");
    const StationaryResult r = find_stationary(s0, p, tol, opt);

    Table t{{"mu", "residual", "iterations", "converged"}, {}};
    const auto& names = trajectory_columns();
    t.columns.insert(t.columns.end(), names.begin() + 1, names.begin() + 13);
    std::vector<Cell> row{r.mu, r.residual, static_cast<double>(r.iterations), r.converged ? 1.0 : 0.0};
    for (const Spinor* f : {&r.state.left, &r.state.right}) {
      for (std::size_t c = 0; c < 3; ++c) {
        row.emplace_back((*f)[c].real());
        row.emplace_back((*f)[c].imag());
      }
    }
    t.rows.push_back(std::move(row));
    Metadata meta = command_meta("stationary");
    meta.add_params(p);
    meta.add("seed", state_text(s0));
    meta.add("tol", tol);
    emit(ctx, io, t, meta);

    std::ostringstream os;
    os << "converged=" << (r.converged ? "yes" : "no") << " mu=" << format_value(r.mu)
       << " residual=" << short_fmt(r.residual) << " iterations=" << r.iterations;
    if (!r.message.empty()) os << " (" << r.message << ")";
    summary_line(ctx, os.str());
    return r.converged ? kExitOk : kExitNumerical;
  }
};

struct FigureCmd {
  int number = 0;
  std::string out;
  std::string format = "csv";
  bool plot = false;

  void attach(CLI::App* app) {
    app->add_option("number", number, "Figure number 1..5")->required()->check(CLI::Range(1, 5));
    app->add_option("--out", out, "Output directory (default figN)");
    app->add_option("--format", format, "csv or jsonl")->capture_default_str()->check(CLI::IsMember({"csv", "jsonl"}));
    app->add_flag("--plot", plot, "Also write SVG charts");
  }

  int operator()(Context& ctx) const {
    const std::filesystem::path dir = out.empty() ? "fig" + std::to_string(number) : out;
    const FigureResult res = run_figure(number, dir, *parse_format(format), plot);
    std::ostringstream os;
    os << res.summary << " files=" << res.files.size() << " dir=" << dir.string();
    summary_line(ctx, os.str());
    return kExitOk;
  }
};

bool use_colour(std::ostream& out) {
  if (std::getenv("NO_COLOR") != nullptr) return false;
  return &out == &std::cout && ::isatty(STDOUT_FILENO);
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spin-1 condensate tunnelling in a double well: simulation and analysis", "spinjj"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_version_flag("--version", std::string("spinjj ") + kVersion);
  app.require_subcommand(1);

  SimulateCmd simulate;
  ReducedCmd reduced;
  PeriodCmd period;
  ScanCmd scan;
  PortraitCmd portrait;
  ModesCmd modes;
  StationaryCmd stationary;
  FigureCmd figure;
  simulate.attach(app.add_subcommand("simulate", "Integrate the six-amplitude equations of motion"));
  reduced.attach(app.add_subcommand("reduced", "Integrate the reduced (M, R0, I0) system"));
  period.attach(app.add_subcommand("period", "Analytic period and regime, or the period of a CSV trajectory"));
  scan.attach(app.add_subcommand("scan", "Measured vs analytic period over a list of J"));
  portrait.attach(app.add_subcommand("portrait", "Phase portrait (theta_{+-}, M)"));
  modes.attach(app.add_subcommand("modes", "Double-well modes and two-mode parameters"));
  stationary.attach(app.add_subcommand("stationary", "Newton search for a stationary state"));
  figure.attach(app.add_subcommand("figure", "Regenerate the data of figure 1..5"));

  Context ctx{out, err, use_colour(out)};
  try {
    const std::vector<std::string> args = expand_config(raw_args);
    std::vector<const char*> argv{"spinjj"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return kExitOk;
    } catch (const CLI::CallForVersion&) {
      out << app.version() << '\n';
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      err << "error: " << e.what() << '\n';
      const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
      err << "run '" << (sub == &app ? "spinjj" : "spinjj " + sub->get_name()) << " --help' for usage\n";
      return kExitUsage;
    }

    if (app.got_subcommand("simulate")) return simulate(ctx);
    if (app.got_subcommand("reduced")) return reduced(ctx);
    if (app.got_subcommand("period")) return period(ctx);
    if (app.got_subcommand("scan")) return scan(ctx);
    if (app.got_subcommand("portrait")) return portrait(ctx);
    if (app.got_subcommand("modes")) return modes(ctx);
    if (app.got_subcommand("stationary")) return stationary(ctx);
    if (app.got_subcommand("figure")) return figure(ctx);
    return kExitUsage;
  } catch (const IntegrationError& e) {
    err << "numerical failure: " << e.what() << " (t reached " << format_value(e.t_reached()) << ")\n";
    return kExitNumerical;
  } catch (const InsufficientCyclesError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace spinjj::cli
