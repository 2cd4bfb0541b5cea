#include "spinjj/cli/figures.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "spinjj/analysis.hpp"
#include "spinjj/cli/svg.hpp"
#include "spinjj/version.hpp"

namespace spinjj::cli {

namespace {

constexpr double kLambdaA = -0.01;

Metadata base_meta(int number, const std::string& caption) {
  Metadata m;
  m.add("tool", std::string("spinjj ") + kVersion);
  m.add("command", "figure " + std::to_string(number));
  m.add("caption", caption);
  return m;
}

std::filesystem::path data_path(const std::filesystem::path& dir, const std::string& stem, Format f) {
  return dir / (stem + std::string(extension(f)));
}

void maybe_plot(bool plot, const std::filesystem::path& dir, const std::string& stem, const PlotSpec& spec,
                FigureResult& res) {
  if (!plot) return;
  const auto path = dir / (stem + ".svg");
  if (write_svg(path, spec)) res.files.push_back(path);
}

Table reduced_table(const ReducedTrajectory& tr, std::optional<int> curve) {
  Table t;
  if (curve) t.columns.push_back("curve");
  for (const char* c : {"t", "M", "R0", "I0", "theta", "C"}) t.columns.emplace_back(c);
  std::vector<double> theta(tr.states.size());
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    const ReducedState& s = tr.states[i];
    theta[i] = (s.r0 == 0.0 && s.i0 == 0.0) ? 0.0 : std::atan2(s.i0, s.r0);
  }
  theta = unwrap_phase(theta);
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    const ReducedState& s = tr.states[i];
    std::vector<Cell> row;
    if (curve) row.emplace_back(static_cast<double>(*curve));
    for (double v : {tr.times[i], s.m, s.r0, s.i0, theta[i], conserved_quantity(s)}) row.emplace_back(v);
    t.rows.push_back(std::move(row));
  }
  return t;
}

FigureResult figure1(const std::filesystem::path& dir, Format format, bool plot) {
  FigureResult res;
  const ReducedParams p{0.02, kLambdaA};
  IntegratorConfig cfg;
  cfg.t_max = 400.0;
  cfg.sample_dt = 0.25;

  // Physical starting points with an empty |0> component lie on
  // R0^2 + I0^2 = (1 - M^2) / 4; both signs of R0 are used.
  Table all;
  PlotSpec spec{"Josephson phase diagram, J=0.02, lambda_A=-0.01", "R0", "M", {}};
  int curve = 0;
  for (double m0 : {1.0, 0.8, 0.6, 0.4, 0.2}) {
    for (double sign : {1.0, -1.0}) {
      if (m0 == 1.0 && sign < 0.0) continue;
      const ReducedState s0{m0, sign * 0.5 * std::sqrt(1.0 - m0 * m0), 0.0};
      const ReducedTrajectory tr = integrate_reduced(s0, p, cfg);
      Table t = reduced_table(tr, curve);
      if (all.columns.empty()) all.columns = t.columns;
      PlotSeries series{"", {}, {}};
      for (auto& row : t.rows) {
        series.x.push_back(std::get<double>(row[3]));
        series.y.push_back(std::get<double>(row[2]));
        all.rows.push_back(std::move(row));
      }
      spec.series.push_back(std::move(series));
      ++curve;
    }
  }
  Metadata meta = base_meta(1, "J=0.02 lambda_A=-0.01");
  meta.add("j", p.j);
  meta.add("lambda_a", p.lambda_a);
  meta.add("curves", static_cast<double>(curve));
  meta.add_integrator(cfg);
  const auto path = data_path(dir, "fig1", format);
  write_table_file(path, all, meta, format);
  res.files.push_back(path);
  maybe_plot(plot, dir, "fig1", spec, res);
  res.summary = "figure 1: " + std::to_string(curve) + " closed orbits of the reduced system";
  return res;
}

FigureResult figure2(const std::filesystem::path& dir, Format format, bool plot) {
  FigureResult res;
  const ReducedParams p{0.0051, kLambdaA};
  const double tau = analytic_period(p);
  IntegratorConfig cfg;
  cfg.t_max = 3.0 * tau;
  cfg.sample_dt = 0.5;
  const ReducedTrajectory tr = integrate_reduced({1.0, 0.0, 0.0}, p, cfg);
  const Table t = reduced_table(tr, std::nullopt);

  Metadata meta = base_meta(2, "J=0.0051 lambda_A=-0.01");
  meta.add("j", p.j);
  meta.add("lambda_a", p.lambda_a);
  meta.add("init", "M=1 R0=0 I0=0");
  meta.add("tau_analytic", tau);
  meta.add_integrator(cfg);
  const auto path = data_path(dir, "fig2", format);
  write_table_file(path, t, meta, format);
  res.files.push_back(path);

  PlotSpec spec{"Phase portrait, J=0.0051, lambda_A=-0.01", "theta_{+-}", "M", {{"", {}, {}}}};
  for (const auto& row : t.rows) {
    spec.series[0].x.push_back(std::get<double>(row[4]));
    spec.series[0].y.push_back(std::get<double>(row[1]));
  }
  maybe_plot(plot, dir, "fig2", spec, res);
  res.summary = "figure 2: phase portrait over 3 periods, tau=" + format_param(tau);
  return res;
}

FigureResult figure3(const std::filesystem::path& dir, Format format, bool plot) {
  FigureResult res;
  Table curve{{"ratio", "j", "tau", "tau_times_abs_lambda_a"}, {}};
  PlotSpec spec{"Period vs 2J/|lambda_A|", "2J/|lambda_A|", "tau |lambda_A|", {{"analytic", {}, {}}, {"measured", {}, {}}}};
  for (int i = 1; i <= 150; ++i) {
    const double ratio = 0.02 * i;
    if (std::abs(ratio - 1.0) < 0.01) continue;
    const double j = ratio * std::abs(kLambdaA) / 2.0;
    const double tau = analytic_period({j, kLambdaA});
    curve.rows.push_back({ratio, j, tau, tau * std::abs(kLambdaA)});
    spec.series[0].x.push_back(ratio);
    spec.series[0].y.push_back(tau * std::abs(kLambdaA));
  }
  Metadata meta = base_meta(3, "period vs 2J/|lambda_A|");
  meta.add("lambda_a", kLambdaA);
  auto path = data_path(dir, "fig3_analytic", format);
  write_table_file(path, curve, meta, format);
  res.files.push_back(path);

  const std::vector<double> js = {0.001, 0.002, 0.003, 0.004, 0.0049, 0.0051, 0.006, 0.008, 0.01, 0.02};
  PeriodScanOptions opt;
  const std::vector<PeriodScanRow> rows = period_scan(js, kLambdaA, opt);
  Table scan{{"j", "ratio", "tau_analytic", "tau_measured", "uncertainty", "rel_error", "status"}, {}};
  int ok = 0;
  double worst = 0.0;
  for (const PeriodScanRow& r : rows) {
    const double rel = r.ok ? std::abs(r.tau_measured / r.tau_analytic - 1.0) : std::nan("");
    if (r.ok) {
      ++ok;
      worst = std::max(worst, rel);
      spec.series[1].x.push_back(r.ratio);
      spec.series[1].y.push_back(r.tau_measured * std::abs(kLambdaA));
    }
    scan.rows.push_back({r.j, r.ratio, r.tau_analytic, r.tau_measured, r.uncertainty, rel, r.status});
  }
  Metadata scan_meta = base_meta(3, "period vs 2J/|lambda_A|");
  scan_meta.add("lambda_a", kLambdaA);
  scan_meta.add("eps", opt.eps);
  scan_meta.add("lambda_s", opt.lambda_s);
  scan_meta.add("init", "xi=(1,0,0) eta=(0,0,1)");
  scan_meta.add("periods", opt.periods);
  scan_meta.add("samples_per_period", opt.samples_per_period);
  path = data_path(dir, "fig3_scan", format);
  write_table_file(path, scan, scan_meta, format);
  res.files.push_back(path);
  maybe_plot(plot, dir, "fig3", spec, res);

  std::ostringstream os;
  os << "figure 3: scan rows ok=" << ok << "/" << rows.size() << " max_rel_error=" << format_param(worst);
  res.summary = os.str();
  return res;
}

FigureResult figure4(const std::filesystem::path& dir, Format format, bool plot) {
  FigureResult res;
  const SpinorPair init{{1, 0, 0}, {0, 0, 1}};
  IntegratorConfig cfg;
  cfg.t_max = 2500.0;
  cfg.sample_dt = 0.5;
  PlotSpec spec{"Left-well magnetization", "t", "M", {}};
  std::ostringstream summary;
  summary << "figure 4:";
  for (const char* jtext : {"0.001", "0.0049", "0.0051", "0.01"}) {
    const double j = std::stod(jtext);
    const SystemParams p = SystemParams::symmetric(1.0, 1.0, kLambdaA, j);
    const Trajectory tr = integrate(init, p, cfg);
    Metadata meta = base_meta(4, std::string("xi(0)=(1,0,0) eta(0)=(0,0,1) eps=1.0 lambda_S=1.0 lambda_A=-0.01 J=") + jtext);
    meta.add_params(p);
    meta.add("init", "1,0,0,0,0,0,0,0,0,0,0,1");
    meta.add_integrator(cfg);
    const std::string stem = std::string("fig4_J") + jtext;
    const auto path = data_path(dir, stem, format);
    write_table_file(path, trajectory_table(tr), meta, format);
    res.files.push_back(path);
    PlotSeries s{std::string("J=") + jtext, tr.times, observable_series(tr, "M_left")};
    const Extent e = oscillation_extent(s.y);
    summary << " J=" << jtext << " M in [" << format_param(std::round(e.min * 1e4) / 1e4) << ", "
            << format_param(std::round(e.max * 1e4) / 1e4) << "]";
    spec.series.push_back(std::move(s));
  }
  maybe_plot(plot, dir, "fig4", spec, res);
  res.summary = summary.str();
  return res;
}

FigureResult figure5(const std::filesystem::path& dir, Format format, bool plot) {
  FigureResult res;
  const Spinor xi = Spinor{0.9962, 0.0872, 0.0}.normalized();
  const SpinorPair init = spin_flip_symmetric(xi);
  IntegratorConfig cfg;
  cfg.t_max = 12600.0;
  cfg.sample_dt = 1.0;
  PlotSpec spec{"rho_++ - rho_00", "t", "rho_++ - rho_00", {}};
  std::ostringstream summary;
  summary << "figure 5:";
  for (const char* latext : {"-0.01", "0"}) {
    const double la = std::stod(latext);
    const SystemParams p = SystemParams::symmetric(1.0, 1.0, la, 0.001);
    const Trajectory tr = integrate(init, p, cfg);
    Table t = trajectory_table(tr);
    t.columns.emplace_back("rho_pp_minus_rho_00");
    PlotSeries s{std::string("lambda_A=") + latext, tr.times, {}};
    for (std::size_t i = 0; i < tr.size(); ++i) {
      const double v = rho_pp_minus_rho_00(tr.states[i]);
      t.rows[i].emplace_back(v);
      s.y.push_back(v);
    }
    Metadata meta = base_meta(5, std::string("xi(0)=(0.9962,0.0872,0) eps=1.0 lambda_S=1.0 lambda_A=") + latext +
                                     " J=0.001");
    meta.add_params(p);
    meta.add("init_caption", "xi=(0.9962,0.0872,0) eta=spin_flip(xi)");
    meta.add("init_normalized", format_param(xi[0].real()) + "," + format_param(xi[1].real()) + ",0");
    meta.add_integrator(cfg);
    const std::string stem = std::string("fig5_lambda_a") + latext;
    const auto path = data_path(dir, stem, format);
    write_table_file(path, t, meta, format);
    res.files.push_back(path);
    const Extent e = oscillation_extent(s.y);
    summary << " lambda_A=" << latext << " range [" << format_param(std::round(e.min * 1e4) / 1e4) << ", "
            << format_param(std::round(e.max * 1e4) / 1e4) << "]";
    spec.series.push_back(std::move(s));
  }
  maybe_plot(plot, dir, "fig5", spec, res);
  res.summary = summary.str();
  return res;
}

}  // namespace

double rho_pp_minus_rho_00(const SpinorPair& s) { return std::norm(s.left[kPlus]) - std::norm(s.left[kZero]); }

FigureResult run_figure(int number, const std::filesystem::path& dir, Format format, bool plot) {
  switch (number) {
    case 1: return figure1(dir, format, plot);
    case 2: return figure2(dir, format, plot);
    case 3: return figure3(dir, format, plot);
    case 4: return figure4(dir, format, plot);
    case 5: return figure5(dir, format, plot);
    default: throw std::invalid_argument("figure number must be 1..5, got " + std::to_string(number));
  }
}

}  // namespace spinjj::cli
