// Acceptance checks, one PASS/FAIL line per criterion.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stheat/experiments.hpp"
#include "stheat/noise.hpp"
#include "stheat/rng.hpp"

using namespace stheat;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    note(std::string(ok ? "ok " : "FAILED ") + what);
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

ExperimentConfig parse(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void add_failures(Outcome& o, const Report& rep) {
  for (const auto& f : rep.failures) o.require(false, f);
}

Report infsup_sweep() {
  return run_experiment(parse(
      "[experiment]\nname = infsup\n[grid]\nsizes = 8x32, 16x64, 32x128\n"
      "[operator]\nkappas = 0.5, 1, 2\n[regularity]\nbetas = 0, 1\n"));
}

Outcome criterion1() {
  Outcome o;
  const Report rep = infsup_sweep();
  add_failures(o, rep);
  o.note(std::to_string(rep.results.at("points").get<int>()) + " points, C_B bound and c_B <= C_B " +
         (rep.passed() ? "hold" : "violated"));
  o.note("soft lower bound missed by > 5% on " +
         std::to_string(rep.results.at("lower_bound_flags").get<int>()) + " points (recorded)");
  const Table& t = rep.tables.at(0);
  double c_min = 1e300;
  double C_max = 0.0;
  for (const auto& row : t.rows) {
    if (row[0] != 1.0) continue;
    c_min = std::min(c_min, row[5]);
    C_max = std::max(C_max, row[6]);
  }
  o.require(c_min >= 0.5, "kappa=1 min c_B = " + fmt(c_min) + " >= 0.5");
  o.require(C_max <= 1.41422, "kappa=1 max C_B = " + fmt(C_max) + " <= 1.41422");
  o.note("kappa=1 min c_B with refined test space = " +
         fmt(rep.results.at("kappa1_min_c_B_enriched").get<double>()) + " (info)");
  return o;
}

Outcome criterion2() {
  Outcome o;
  const Report rep = infsup_sweep();
  const double worst = rep.results.at("max_swap_difference");
  o.require(worst <= 1e-10, "max |c_B - c_B swapped| = " + fmt(worst) + " <= 1e-10 over " +
                                std::to_string(rep.results.at("points").get<int>()) + " points");
  return o;
}

Outcome criterion3() {
  Outcome o;
  const Report rep = run_experiment(parse(
      "[experiment]\nname = lemma-constants\n[grid]\nJ = 16\nN = 128\n"
      "[mc]\npaths = 10000\nrandom_triples = 20\n"));
  add_failures(o, rep);
  const auto& r = rep.results;
  o.note("20 analytic triples " + std::string(rep.passed() ? "hold" : "checked"));
  o.note("lhs1 = " + fmt(r.at("lhs1")) + " <= rhs1 = " + fmt(r.at("rhs1")));
  o.note("lhs2 + 3 SE = " + fmt(r.at("lhs2").get<double>() + 3.0 * r.at("lhs2_std_error").get<double>()) +
         " < rhs2 = " + fmt(r.at("rhs2")));
  const double single = r.at("single_mode").at("lhs1");
  o.require(std::abs(single - 0.44935) <= 1e-5,
            "single-mode lhs1 = " + fmt(single) + " vs 0.44935 +- 1e-5 (rhs1 = 0.5)");
  o.require(single <= 0.5, "single-mode lhs1 <= 0.5");
  return o;
}

Outcome criterion4() {
  Outcome o;
  const Report rep = run_experiment(parse(
      "[experiment]\nname = mild-equiv\n[grid]\nJ = 16\nn_levels = 64, 128, 256, 512\n"
      "[noise]\nrho = 3\n[mc]\npaths = 1000\n"));
  add_failures(o, rep);
  for (const auto& step : rep.results.at("refinements")) {
    const double ratio = step.at("node_ratio");
    o.require(ratio >= 1.6 && ratio <= 2.6,
              "N=" + std::to_string(step.at("N").get<int>()) + " ratio " + fmt(ratio) + " in [1.6, 2.6]");
  }
  double min_order = 1e300;
  for (const auto& v : rep.results.at("deterministic_orders")) min_order = std::min(min_order, v.get<double>());
  o.require(min_order >= 1.0, "deterministic order " + fmt(min_order) + " >= 1");
  return o;
}

Report energy_run(double kappa, double rho, const std::string& u0, std::size_t J, std::size_t N,
                  std::size_t paths) {
  std::ostringstream cfg;
  cfg << "[experiment]\nname = energy\n[grid]\nJ = " << J << "\nN = " << N << "\n[noise]\nrho = " << rho
      << "\n[operator]\nkappa = " << kappa << "\na_min = " << kappa << "\na_max = " << kappa
      << "\n[load]\n" << (u0.empty() ? "" : "u0 = " + u0 + "\n") << "[mc]\npaths = " << paths << "\n";
  return run_experiment(parse(cfg.str()));
}

Outcome criterion5() {
  Outcome o;
  const std::vector<std::pair<double, std::string>> data = {{2.0, ""}, {3.0, "1"}, {4.0, "1, 0.5"}};
  double max_coarse = 0.0;
  double max_fine = 0.0;
  bool finite = true;
  for (double kappa : {0.5, 1.0, 2.0}) {
    for (const auto& [rho, u0] : data) {
      const Report a = energy_run(kappa, rho, u0, 16, 128, 1000);
      const Report b = energy_run(kappa, rho, u0, 32, 256, 1000);
      add_failures(o, a);
      add_failures(o, b);
      for (const Report* r : {&a, &b}) {
        finite = finite && r->results.at("ratio").is_number() &&
                 std::isfinite(r->results.at("ratio").get<double>());
      }
      if (!finite) continue;
      max_coarse = std::max(max_coarse, a.results.at("ratio").get<double>());
      max_fine = std::max(max_fine, b.results.at("ratio").get<double>());
    }
  }
  o.require(finite, "ratio finite on all 9 points");
  o.require(max_fine <= 1.1 * max_coarse, "max ratio " + fmt(max_coarse) + " at (16,128) -> " +
                                              fmt(max_fine) + " at (32,256), <= 10% increase");
  return o;
}

Outcome criterion6() {
  Outcome o;
  double prev_gap = 0.0;
  double worst_identity = 0.0;
  for (std::size_t N : {64, 128, 256}) {
    const Report r = energy_run(1.0, 2.0, "1", 16, N, 200);
    worst_identity = std::max(worst_identity, r.results.at("identity_error_max").get<double>());
    const double gap = r.results.at("version_gap_rms");
    if (prev_gap > 0.0) {
      o.require(gap < prev_gap, "version gap N=" + std::to_string(N / 2) + " -> " + std::to_string(N) +
                                    ": " + fmt(prev_gap) + " -> " + fmt(gap));
    }
    prev_gap = gap;
  }
  o.require(worst_identity <= 1e-10, "integral identity error " + fmt(worst_identity) + " <= 1e-10");
  return o;
}

Outcome criterion7() {
  Outcome o;
  const Report fine = run_experiment(parse(
      "[experiment]\nname = regularity\n[grid]\nJ = 32\nN = 128\nj_levels = 32, 64\n"
      "[noise]\nrho = 4\n[regularity]\nbeta = 1\n[mc]\npaths = 1000\n"));
  add_failures(o, fine);
  const double change = fine.results.at("last_change");
  const double sigma = fine.results.at("last_change_sigma");
  o.require(!fine.results.at("divergent").get<bool>(), "rho=4 coupling series convergent");
  o.require(std::abs(change) < 3.0 * sigma,
            "rho=4 change J=32 -> 64 = " + fmt(change) + " within 3 SE = " + fmt(3.0 * sigma));
  const Report rough = run_experiment(parse(
      "[experiment]\nname = regularity\n[grid]\nJ = 8\nN = 128\nj_levels = 8, 16, 32, 64\n"
      "[noise]\nrho = 1\n[regularity]\nbeta = 1\n[mc]\npaths = 500\n"));
  add_failures(o, rough);
  o.require(rough.results.at("divergent").get<bool>(), "rho=1 divergence flag raised");
  o.require(rough.results.at("increasing").get<bool>(), "rho=1 statistic increases with J");
  return o;
}

Outcome criterion8() {
  Outcome o;
  const Report a = run_experiment(parse(
      "[experiment]\nname = multiplicative\n[grid]\nJ = 16\nN = 64\nT = 0.25\n"
      "[multiplicative]\ng0 = 0.5\ntol = 1e-10\n[mc]\npaths = 100\n"));
  add_failures(o, a);
  const double ratio = a.results.at("max_contraction_ratio");
  o.require(a.results.at("all_converged").get<bool>() && ratio < 1.0,
            "(a) max contraction ratio " + fmt(ratio) + " < 1");
  const double split = a.results.at("split_difference");
  o.require(split <= a.results.at("split_tolerance").get<double>(),
            "(c) split difference " + fmt(split) + " <= 10 tol");
  const Report b = run_experiment(parse(
      "[experiment]\nname = multiplicative\n[grid]\nJ = 1\nN = 512\nT = 0.25\n"
      "[noise]\nbasis = cosine\ngammas = 1\nmodes = 1\n[load]\nu0 = 1\n"
      "[multiplicative]\ng0 = 0.5\ntol = 1e-10\n[mc]\npaths = 10000\n"));
  add_failures(o, b);
  const double z = b.results.at("closed_form").at("z_score");
  o.require(std::abs(z) <= 3.0, "(b) E U(T)^2 = " +
                                    fmt(b.results.at("terminal_second_moment").at("estimate")) +
                                    " vs " + fmt(b.results.at("closed_form").at("expected")) +
                                    ", z = " + fmt(z));
  return o;
}

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

Outcome criterion9() {
  Outcome o;
  const std::size_t M = 10000;
  const std::size_t sub = 256;
  const double h = 1.0;
  const TimeGrid grid(h, 1);
  const QSpec q(std::vector<double>{1.0});
  const CounterRng rng(77);
  std::vector<double> exact_iw(M), brute_iw(M), exact_rest(M), brute_rest(M);
  for (std::size_t m = 0; m < M; ++m) {
    const NoiseSample s = sample_noise(grid, q, PathId{5, m});
    exact_iw[m] = s.iW(0, 0);
    exact_rest[m] = s.iW(0, 0) - h * s.dW(0, 0) / 2.0;
    // Brownian increments on 256 substeps, midpoint rule for int (s - t_n) dW.
    const double dt = h / static_cast<double>(sub);
    double dw = 0.0;
    double iw = 0.0;
    for (std::size_t k = 0; k < sub; k += 2) {
      const auto [z0, z1] = rng.normals(m, static_cast<std::uint32_t>(k / 2), 0, Stream::Scratch);
      const double inc[2] = {z0 * std::sqrt(dt), z1 * std::sqrt(dt)};
      for (std::size_t l = 0; l < 2; ++l) {
        dw += inc[l];
        iw += (static_cast<double>(k + l) + 0.5) * dt * inc[l];
      }
    }
    brute_iw[m] = iw;
    brute_rest[m] = iw - h * dw / 2.0;
  }
  const double critical = 1.628 * std::sqrt(2.0 / static_cast<double>(M));
  const double d1 = ks_statistic(exact_iw, brute_iw);
  const double d2 = ks_statistic(exact_rest, brute_rest);
  o.require(d1 < critical, "KS iW D = " + fmt(d1) + " < " + fmt(critical));
  o.require(d2 < critical, "KS iW - h dW/2 D = " + fmt(d2) + " < " + fmt(critical));
  const Report rep = run_experiment(parse(
      "[experiment]\nname = noise-dump\n[grid]\nJ = 16\nN = 64\n[mc]\npaths = 10000\n"));
  add_failures(o, rep);
  const double z = rep.results.at("ito_isometry").at("z_score");
  o.require(std::abs(z) <= 4.0, "Ito isometry z = " + fmt(z));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  int only = 0;
  app.add_option("--criterion", only, "Run a single criterion (1-9); default all")
      ->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<Outcome()>> criteria = {criterion1, criterion2, criterion3,
                                                          criterion4, criterion5, criterion6,
                                                          criterion7, criterion8, criterion9};
  bool all = true;
  for (int k = 1; k <= 9; ++k) {
    if (only && k != only) continue;
    Outcome o;
    try {
      o = criteria[static_cast<std::size_t>(k - 1)]();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << k << ": " << o.detail << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
