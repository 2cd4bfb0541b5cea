// Acceptance checks C1..C12. Prints one [PASS]/[FAIL] line per criterion;
// exit status is nonzero if any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "spinjj/analysis.hpp"
#include "spinjj/cli/cli.hpp"
#include "spinjj/cli/io.hpp"
#include "spinjj/elliptic.hpp"
#include "spinjj/integrator.hpp"
#include "spinjj/model.hpp"
#include "spinjj/reduced.hpp"
#include "spinjj/wellmodes.hpp"

using namespace spinjj;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("FAILED ") + what;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const SpinorPair kFig4Init{{1, 0, 0}, {0, 0, 1}};
constexpr double kLambdaA = -0.01;

SystemParams fig4(double j, double la = kLambdaA) { return SystemParams::symmetric(1.0, 1.0, la, j); }

IntegratorConfig cfg(double t_max, double sample_dt) {
  IntegratorConfig c;
  c.t_max = t_max;
  c.sample_dt = sample_dt;
  return c;
}

std::vector<double> column(const Trajectory& tr, const char* name) { return observable_series(tr, name); }

// ---------------------------------------------------------------------------

Outcome c1() {
  Outcome o;
  const std::vector<double> js{0.001, 0.002, 0.003, 0.004, 0.0049, 0.0051, 0.006, 0.008, 0.01, 0.02};
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = period_scan(js, kLambdaA);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  double worst = 0.0;
  for (const PeriodScanRow& r : rows) {
    o.require(r.ok, "J=" + g(r.j) + " status " + r.status);
    if (!r.ok) continue;
    const double rel = std::abs(r.tau_measured / r.tau_analytic - 1);
    worst = std::max(worst, rel);
    o.require(rel < 1e-3, "J=" + g(r.j) + " rel error " + g(rel));
  }
  o.require(secs < 60.0, "runtime " + g(secs) + " s");
  o.note("10 points, max rel error " + g(worst) + ", " + g(secs) + " s");
  return o;
}

Outcome c2() {
  Outcome o;
  for (double j : {0.001, 0.0049, 0.0051, 0.01}) {
    const double tau = analytic_period({j, kLambdaA});
    const Trajectory tr = integrate(kFig4Init, fig4(j), cfg(5 * tau, tau / 2000));
    const Extent e = oscillation_extent(tr, "M_left");
    if (j < 0.005) {
      o.require(e.min >= 0.19, "J=" + g(j) + " min M " + g(e.min) + " < 0.19");
      if (j == 0.001) o.require(e.min >= 0.9797 && e.min <= 0.9799, "J=0.001 min M " + g(e.min));
    } else {
      o.require(e.min <= -0.999, "J=" + g(j) + " min M " + g(e.min));
    }
    o.note("J=" + g(j) + " min M " + g(e.min));
  }
  return o;
}

Outcome c3() {
  Outcome o;
  const SpinorPair s0 = spin_flip_symmetric(Spinor{0.9962, 0.0872, 0}.normalized());
  {
    const Trajectory tr = integrate(s0, fig4(0.001, 0.0), cfg(12600, 1));
    const Extent e = oscillation_extent(tr, "rho_pp_minus_rho_00");
    o.require(std::abs(e.min + 0.008) <= 0.002 && std::abs(e.max - 0.985) <= 0.002,
              "lambda_A=0 range [" + g(e.min) + ", " + g(e.max) + "]");
    o.note("lambda_A=0 range [" + g(e.min) + ", " + g(e.max) + "]");
  }
  {
    const Trajectory tr = integrate(s0, fig4(0.001), cfg(12600, 1));
    const std::vector<double> y = column(tr, "rho_pp_minus_rho_00");
    const Extent e = oscillation_extent(y);
    const std::vector<double> ranges = cycle_ranges(tr.times, y);
    double mean = 0.0;
    for (double r : ranges) mean += r;
    mean /= static_cast<double>(ranges.size());
    const auto [lo, hi] = std::minmax_element(ranges.begin(), ranges.end());
    const double variation = (*hi - *lo) / mean;
    o.require(e.min < 0.0, "lambda_A=-0.01 min " + g(e.min) + " not negative");
    o.require(variation > 0.01, "cycle range variation " + g(variation));
    o.note("lambda_A=-0.01 min " + g(e.min) + ", per-cycle range variation " + g(100 * variation) + "%");
  }
  return o;
}

Outcome c4() {
  Outcome o;
  for (double j : {0.001, 0.0051}) {
    const ReducedParams rp{j, kLambdaA};
    const double tau = analytic_period(rp);
    const IntegratorConfig c = cfg(tau, tau / 1000);
    const Trajectory full = integrate(kFig4Init, fig4(j), c);
    const ReducedTrajectory red = integrate_reduced({1, 0, 0}, rp, c);
    double worst = 0.0;
    for (std::size_t k = 0; k < full.size(); ++k) {
      const ReducedState f = reduced_from_observables(full.observables_left[k]);
      const ReducedState& r = red.states[k];
      worst = std::max({worst, std::abs(f.m - r.m), std::abs(f.r0 - r.r0), std::abs(f.i0 - r.i0)});
    }
    o.require(red.states.size() == full.size(), "sample grids differ");
    o.require(worst < 1e-6, "J=" + g(j) + " deviation " + g(worst));
    o.note("J=" + g(j) + " max deviation " + g(worst));
  }
  return o;
}

Outcome c5() {
  Outcome o;
  double worst_full = 0.0, worst_c = 0.0;
  for (double j : {0.001, 0.0049, 0.0051, 0.01}) {
    const ReducedParams rp{j, kLambdaA};
    const double tau = analytic_period(rp);
    const IntegratorConfig c = cfg(10 * tau, tau / 200);
    const LedgerDrift d = ledger_drift(integrate(kFig4Init, fig4(j), c));
    o.require(d.total_norm < 1e-8, "J=" + g(j) + " norm drift " + g(d.total_norm));
    o.require(d.energy < 1e-8, "J=" + g(j) + " energy drift " + g(d.energy));
    o.require(d.total_magnetization < 1e-8, "J=" + g(j) + " Fz drift " + g(d.total_magnetization));
    o.require(d.r_plus < 1e-8, "J=" + g(j) + " R+ drift " + g(d.r_plus));
    worst_full = std::max(worst_full, d.max());

    const ReducedTrajectory red = integrate_reduced({1, 0, 0}, rp, c);
    const double c0 = conserved_quantity(red.states.front());
    for (const ReducedState& s : red.states) worst_c = std::max(worst_c, std::abs(conserved_quantity(s) - c0));
  }
  o.require(worst_c < 1e-10, "reduced C drift " + g(worst_c));
  o.note("max ledger drift " + g(worst_full) + ", reduced C drift " + g(worst_c));
  return o;
}

Outcome c6() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  std::normal_distribution<double> n01(0.0, 1.0);
  auto spinor = [&] {
    Spinor f;
    for (std::size_t c = 0; c < 3; ++c) f[c] = {n01(rng), n01(rng)};
    return f.normalized();
  };
  double worst = 0.0;
  for (double la : {-0.01, 0.01}) {
    const SystemParams p = fig4(0.0051, la);
    for (int i = 0; i < 1000; ++i) {
      const SpinorPair s{spinor(), spinor()};
      const SpinorPair a = rhs(s, p), b = rhs_spin_form(s, p);
      for (std::size_t c = 0; c < 3; ++c) {
        worst = std::max({worst, std::abs(a.left[c] - b.left[c]), std::abs(a.right[c] - b.right[c])});
      }
    }
  }
  o.require(worst < 1e-12, "max difference " + g(worst));
  o.note("2000 states, max componentwise difference " + g(worst));
  return o;
}

Outcome c7() {
  Outcome o;
  o.require(std::abs(elliptic_k(0.0) - std::numbers::pi / 2) <= 1e-15, "K(0)");

  double series_err = 0.0;
  for (double k = 0.0; k <= 0.3 + 1e-12; k += 0.01) {
    double coef = 1.0, kp = 1.0, sum = 0.0;
    for (int n = 0; n < 400; ++n) {
      sum += coef * coef * kp;
      coef *= (2.0 * n + 1.0) / (2.0 * n + 2.0);
      kp *= k * k;
    }
    series_err = std::max(series_err, std::abs(elliptic_k(k) - 0.5 * std::numbers::pi * sum));
  }
  o.require(series_err < 1e-12, "ascending series " + g(series_err));

  double asym_err = 0.0;
  for (double k : {0.99, 0.995, 0.999, 0.9999, 0.999999}) {
    const double kp = std::sqrt((1 - k) * (1 + k));
    const double l = std::log(4 / kp);
    double coef = 1.0, shift = 0.0, kp2n = 1.0, sum = 0.0;
    for (int n = 0; n < 12; ++n) {
      sum += coef * coef * kp2n * (l - shift);
      coef *= (2.0 * n + 1.0) / (2.0 * n + 2.0);
      shift += 2.0 / ((2.0 * n + 1.0) * (2.0 * n + 2.0));
      kp2n *= kp * kp;
    }
    asym_err = std::max(asym_err, std::abs(elliptic_k(k) - sum));
  }
  o.require(asym_err < 1e-6, "log asymptote " + g(asym_err));

  double per_err = 0.0;
  for (double k : {0.1, 0.5, 0.9, 0.98, 0.999}) {
    const double kk = elliptic_k(k);
    for (double u : {0.0, 0.3, 1.1, 2.7, -0.8}) {
      const CnDn a = jacobi_cn_dn(u, k);
      per_err = std::max({per_err, std::abs(a.cn - jacobi_cn_dn(u + 4 * kk, k).cn),
                          std::abs(a.dn - jacobi_cn_dn(u + 2 * kk, k).dn)});
    }
  }
  o.require(per_err < 1e-10, "cn/dn periodicity " + g(per_err));

  double tau_err = 0.0;
  for (double j : {0.001, 0.003, 0.0049, 0.0051, 0.008, 0.02}) {
    const ReducedParams p{j, kLambdaA};
    const double tau = analytic_period(p);
    std::vector<double> t, m;
    for (std::size_t k = 0; k < sample_count(6.3 * tau, tau / 400); ++k) {
      t.push_back(sample_time(k, 6.3 * tau, tau / 400));
      m.push_back(analytic_magnetization(t.back(), p));
    }
    tau_err = std::max(tau_err, std::abs(measure_period(t, m).period / tau - 1));
  }
  o.require(tau_err < 1e-4, "sampled cn/dn period " + g(tau_err));
  o.note("series " + g(series_err) + ", asymptote " + g(asym_err) + ", periodicity " + g(per_err) +
         ", sampled period " + g(tau_err));
  return o;
}

Outcome c8() {
  Outcome o;
  auto tau = [](double ratio) { return analytic_period({0.5 * ratio * 0.01, kLambdaA}); };
  const double t90 = tau(0.9), t99 = tau(0.99), t999 = tau(0.999);
  o.require(t90 < t99 && t99 < t999, "not strictly increasing");
  const double q = t999 / t99;
  o.require(q >= 1.4 && q <= 1.9, "tau(0.999)/tau(0.99) = " + g(q) + " outside [1.4, 1.9]");
  o.note("tau = " + g(t90) + ", " + g(t99) + ", " + g(t999) + "; ratio " + g(q) +
         " (K(0.999)/K(0.99) = " + g(elliptic_k(0.999) / elliptic_k(0.99)) + ")");
  return o;
}

Outcome c9() {
  Outcome o;
  for (double j : {0.001, 0.0051}) {
    const ReducedParams rp{j, kLambdaA};
    const Trajectory tr = integrate(kFig4Init, fig4(j), cfg(2500, 0.5));
    double worst = 0.0;
    for (const Observables& ob : tr.observables_left) {
      worst = std::max(worst, std::abs(ob.r0 - trajectory_relation_r0(ob.m, rp)));
    }
    o.require(worst < 1e-8, "J=" + g(j) + " deviation " + g(worst));
    o.note("J=" + g(j) + " max deviation " + g(worst));
  }
  return o;
}

Outcome c10() {
  Outcome o;
  const Grid1D grid{-6.0, 6.0, 1024};
  double prev = INFINITY;
  for (double v0 : {5.0, 10.0, 20.0, 40.0}) {
    const DoubleWellPotential pot = DoubleWellPotential::quartic(v0, 2.0);
    const WellModes m = lowest_modes(pot, grid);
    const WellParameters w = well_parameters(m, pot, grid, {});
    if (v0 == 10.0) {
      const double rel = std::abs(w.params.eps_left - w.params.eps_right) / std::abs(w.params.eps_left);
      const double half = 0.5 * (m.e_a - m.e_s);
      const double jrel = std::abs(w.params.j - half) / half;
      o.require(rel <= 1e-10, "eps_L vs eps_R " + g(rel));
      o.require(jrel <= 0.1, "|J| vs splitting/2 " + g(jrel));
      o.note("V0=10: |J|=" + g(w.params.j) + ", splitting/2=" + g(half) + ", eps asymmetry " + g(rel));
    }
    o.require(w.params.j < prev, "|J| not decreasing at V0=" + g(v0));
    prev = w.params.j;
  }
  return o;
}

Outcome c11() {
  Outcome o;
  const PhaseDiffusionTimes t = phase_diffusion_times(rb87_reference_inputs());
  const double ratio = t.tau_c_a / t.tau_c_s;
  const double sens = period_sensitivity(1e7);
  o.require(ratio >= 125.0 && ratio <= 500.0, "tau_c^A/tau_c^S = " + g(ratio));
  o.require(std::abs(sens - 3.16e-4) <= 1e-6, "period sensitivity " + g(sens));
  o.note("tau_c^S=" + g(t.tau_c_s) + " s, tau_c^A=" + g(t.tau_c_a) + " s, ratio " + g(ratio));
  o.note("sensitivity " + g(sens) + " = " + g(100 * sens) +
         "%; the 0.003% figure sometimes quoted is ten times smaller than 1/sqrt(N) gives");
  return o;
}

std::string read_all(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome c12() {
  Outcome o;
  const fs::path root = fs::current_path() / "acceptance_figures";
  fs::remove_all(root);
  struct Expect {
    int n;
    std::vector<std::pair<std::string, std::vector<std::string>>> files;  // file -> header lines
  };
  const std::vector<Expect> expect{
      {1, {{"fig1.csv", {"# j=0.02", "# lambda_a=-0.01", "# caption=J=0.02 lambda_A=-0.01"}}}},
      {2, {{"fig2.csv", {"# j=0.0051", "# lambda_a=-0.01"}}}},
      {3, {{"fig3_analytic.csv", {"# lambda_a=-0.01"}}, {"fig3_scan.csv", {"# lambda_a=-0.01", "# eps=1", "# lambda_s=1"}}}},
      {4,
       {{"fig4_J0.001.csv", {"# eps=1", "# lambda_s=1", "# lambda_a=-0.01", "# j=0.001"}},
        {"fig4_J0.0049.csv", {"# j=0.0049"}},
        {"fig4_J0.0051.csv", {"# j=0.0051"}},
        {"fig4_J0.01.csv", {"# j=0.01", "# caption=xi(0)=(1,0,0) eta(0)=(0,0,1) eps=1.0 lambda_S=1.0 lambda_A=-0.01 J=0.01"}}}},
      {5,
       {{"fig5_lambda_a-0.01.csv",
         {"# j=0.001", "# eps=1", "# lambda_s=1", "# lambda_a=-0.01", "# init_caption=xi=(0.9962,0.0872,0) eta=spin_flip(xi)"}},
        {"fig5_lambda_a0.csv", {"# j=0.001", "# lambda_a=0"}}}},
  };
  for (const Expect& e : expect) {
    const fs::path dir = root / ("fig" + std::to_string(e.n));
    std::ostringstream out, err;
    const int code = cli::run({"figure", std::to_string(e.n), "--out", dir.string()}, out, err);
    o.require(code == 0, "figure " + std::to_string(e.n) + " exit " + std::to_string(code) + " " + err.str());
    for (const auto& [file, lines] : e.files) {
      const fs::path p = dir / file;
      if (!fs::exists(p) || fs::file_size(p) == 0) {
        o.require(false, file + " missing or empty");
        continue;
      }
      const std::string text = read_all(p);
      o.require(text.find("\n", text.find("\n") + 1) != std::string::npos, file + " has no data");
      for (const std::string& l : lines) o.require(text.find(l + "\n") != std::string::npos, file + " lacks '" + l + "'");
    }
  }
  o.note("figures 1-5 written under " + root.string());
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"period agreement (10 J values, 0.1%)", c1},
      {"regime reproduction", c2},
      {"rho_pp - rho_00 oscillation", c3},
      {"reduced/full equivalence", c4},
      {"conservation ledger", c5},
      {"formulation equivalence", c6},
      {"special functions", c7},
      {"critical slowdown", c8},
      {"trajectory relation", c9},
      {"well modes", c10},
      {"physical estimates", c11},
      {"figure presets", c12},
  };
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
  }
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::cerr << "--only takes 1.." << criteria.size() << '\n';
    return 2;
  }
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<int>(i + 1) != only) continue;
    Outcome r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    std::cout << (r.pass ? "[PASS] C" : "[FAIL] C") << i + 1 << ' ' << criteria[i].first << ": " << r.detail << std::endl;
    if (!r.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
