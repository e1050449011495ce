// Acceptance gate: twelve end-to-end criteria, one line of output each.
// Exit status is the number of failed criteria. Every tolerance is pinned
// here, next to the check that uses it.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "analyzer.hpp"
#include "experiment.hpp"
#include "json.hpp"
#include "model.hpp"
#include "pmf.hpp"
#include "rng.hpp"
#include "skew_bm.hpp"
#include "stats.hpp"
#include "support/oracles.hpp"
#include "walk.hpp"

using mwl::IntegerPMF;
using mwl::WalkModel;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Symmetric unit steps outside, two-point membrane law: up w.p. p.
WalkModel two_point(double p) {
  IntegerPMF xi(std::vector<mwl::Atom>{{-1, 0.5}, {1, 0.5}});
  std::vector<IntegerPMF> etas;
  etas.emplace_back(std::vector<mwl::Atom>{{-1, 1.0 - p}, {1, p}});
  return WalkModel(0, std::move(xi), std::move(etas), 0, 0);
}

WalkModel with_start(const WalkModel& model, std::int64_t start) {
  std::vector<IntegerPMF> etas;
  for (std::int64_t j = -model.m(); j <= model.m(); ++j)
    etas.push_back(model.eta(j));
  return WalkModel(model.m(), model.xi(), std::move(etas), start,
                   model.center());
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// 1. Exact slope of the two-point membrane model equals 2p - 1.
Outcome criterion1() {
  double worst = 0.0;
  for (double p : {0.1, 0.5, 0.75, 0.9}) {
    const double g = mwl::gamma_exact(two_point(p)).chain.gamma;
    worst = std::max(worst, std::abs(g - (2.0 * p - 1.0)));
  }
  return {worst <= 1e-12, fmt("worst |gamma - (2p-1)| = %.2e (tol 1e-12)", worst)};
}

// 2. Centered membrane laws force a zero slope.
Outcome criterion2() {
  mwl::Pcg64 rng(201, 0);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const WalkModel model = oracle::random_model(rng, 2, true);
    worst = std::max(worst, std::abs(mwl::gamma_exact(model).chain.gamma));
  }
  return {worst <= 1e-9, fmt("worst |gamma| = %.2e over 10 models (tol 1e-9)", worst)};
}

// 3. Exit-mean difference equals the stationary mean displacement.
Outcome criterion3() {
  mwl::Pcg64 rng(301, 0);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const WalkModel model = oracle::random_model(rng, 2, false);
    const mwl::AnalyzeResult a = mwl::gamma_exact(model);
    double drift = 0.0;
    for (std::int64_t j = -model.m(); j <= model.m(); ++j)
      drift += a.chain.pi[static_cast<std::size_t>(j + model.m())] *
               model.eta(j).mean();
    worst = std::max(
        worst, std::abs((a.chain.e_plus - a.chain.e_minus) - drift));
  }
  return {worst <= 1e-9,
          fmt("worst |(e+ - e-) - sum pi_j E eta_j| = %.2e over 50 models (tol 1e-9)",
              worst)};
}

// 4. Adaptive re-entry kernel rows match certified value iteration.
Outcome criterion4() {
  mwl::Pcg64 rng(401, 0);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const WalkModel model = oracle::random_model(rng, 2, false);
    const std::int64_t m = model.m();
    const mwl::ReentryKernel kernel = mwl::reentry_kernel(model);
    const oracle::ViKernel up = oracle::vi_kernel(model.xi(), m, 350, 1e-13);
    if (up.residual > 1e-13)
      return {false, "value iteration did not certify (up side)"};
    for (std::size_t r = 0; r < kernel.rows_plus.size(); ++r)
      for (std::size_t c = 0; c < kernel.rows_plus[r].size(); ++c)
        worst = std::max(worst,
                         std::abs(kernel.rows_plus[r][c] - up.rows[r][c]));
    const oracle::ViKernel down =
        oracle::vi_kernel(model.xi().negated(), m, 350, 1e-13);
    if (down.residual > 1e-13)
      return {false, "value iteration did not certify (down side)"};
    const std::size_t W = static_cast<std::size_t>(2 * m + 1);
    for (std::size_t r = 0; r < kernel.rows_minus.size(); ++r)
      for (std::size_t c = 0; c < kernel.rows_minus[r].size(); ++c)
        worst = std::max(worst, std::abs(kernel.rows_minus[r][c] -
                                         down.rows[r][W - 1 - c]));
  }
  return {worst <= 1e-8,
          fmt("worst kernel row error = %.2e over 10 models (tol 1e-8)", worst)};
}

// 5. Per-cycle displacement means agree with the exact exit means.
Outcome criterion5() {
  std::vector<WalkModel> models;
  models.push_back(two_point(0.75));
  mwl::Pcg64 rng(501, 0);
  while (models.size() < 3) {
    WalkModel model = oracle::random_model(rng, 1, false);
    if (model.m() == 1) models.push_back(std::move(model));
  }
  bool all = true;
  double worst_gap = 0.0;
  for (std::size_t i = 0; i < models.size(); ++i) {
    mwl::SeedSpec seeds;
    seeds.base = 5100 + i;
    const nlohmann::json r = mwl::lln_check(models[i], 1000000, seeds);
    all = all && r["pass"].get<bool>();
    for (const char* side : {"rho_plus", "rho_minus"})
      worst_gap = std::max(worst_gap,
                           std::abs(r[side]["mean"].get<double>() -
                                    r[side]["target"].get<double>()));
  }
  return {all, fmt("3 models at horizon 1e6, all within 3 s.e.; worst gap %.2e",
                   worst_gap)};
}

// 6. Rescaled marginals match the limit law at t = 0.5, 1, 2.
Outcome criterion6() {
  const WalkModel c1 = two_point(0.75);
  const double sigma = std::sqrt(c1.sigma2());
  const std::int64_t n_ref = 10000;
  const double norm = sigma * std::sqrt(static_cast<double>(n_ref));
  mwl::SimulateOptions opt;
  opt.n = 20000;
  opt.seed = 601;
  opt.checkpoints = {5000, 10000, 20000};
  const int paths = 20000;
  std::vector<std::vector<double>> vals(3);
  for (auto& v : vals) v.reserve(paths);
  for (int i = 0; i < paths; ++i) {
    opt.stream = static_cast<std::uint64_t>(i);
    const mwl::ExcursionLedger led = mwl::simulate(c1, opt).ledger;
    for (std::size_t c = 0; c < 3; ++c)
      vals[c].push_back(
          static_cast<double>(led.checkpoints[c].position - c1.center()) /
          norm);
  }
  const mwl::SkewBM limit(0.5, 1.0);
  const double ts[3] = {0.5, 1.0, 2.0};
  bool all = true;
  double worst = 0.0;
  for (std::size_t c = 0; c < 3; ++c) {
    const double d = mwl::ks_distance(
        vals[c], [&](double y) { return limit.cdf(ts[c], 0.0, y); });
    worst = std::max(worst, d);
    all = all && d <= 0.03;
  }
  return {all, fmt("worst KS = %.4f over t in {0.5, 1, 2} (tol 0.03)", worst)};
}

// 7. Excursion sign frequency matches the stationary exit probability.
Outcome criterion7() {
  mwl::SimulateOptions opt;
  opt.n = 1000000;
  opt.seed = 701;
  const mwl::ExcursionLedger led = mwl::simulate(two_point(0.75), opt).ledger;
  const double total =
      static_cast<double>(led.excursions_pos + led.excursions_neg);
  const double frac = static_cast<double>(led.excursions_pos) / total;
  const double se = std::sqrt(0.75 * 0.25 / total);
  const double gap = std::abs(frac - 0.75);
  return {gap <= 3.0 * se,
          fmt("positive fraction %.4f vs 0.75, gap %.2e <= 3 s.e.", frac, gap)};
}

// 8. Boundary-term ratio honours (1+gamma)/(1-gamma) = 1.5 at p = 0.6.
Outcome criterion8() {
  mwl::SeedSpec seeds;
  seeds.base = 801;
  const nlohmann::json r =
      mwl::l_ratio_check(two_point(0.6), 1000000, 50, 0.10, seeds);
  const bool target_ok = std::abs(r["target"].get<double>() - 1.5) <= 1e-9;
  return {target_ok && r["pass"].get<bool>(),
          fmt("median ratio %.4f vs target 1.5 (rel tol 0.10, 50 walks)",
              r["median"].get<double>())};
}

// 9. Membrane sojourn count grows on the root-n scale.
Outcome criterion9() {
  mwl::SeedSpec seeds;
  seeds.base = 901;
  const nlohmann::json r = mwl::nu_growth_check(
      two_point(0.75), {1000, 10000, 100000, 1000000}, 1000, seeds);
  std::vector<double> means;
  for (const auto& row : r["table"]) means.push_back(row["mean"].get<double>());
  const auto [lo, hi] = std::minmax_element(means.begin(), means.end());
  const double spread = *hi / *lo;
  return {*lo > 0.0 && spread <= 1.5,
          fmt("mean nu(n)/sqrt(n) spread = %.3f across n = 1e3..1e6 (tol 1.5)",
              spread)};
}

// 10. Limit process: normalization, composition, and both samplers.
Outcome criterion10() {
  double worst_norm = 0.0;
  for (double beta : {-1.0, -0.4, 0.0, 0.5, 1.0}) {
    for (double x : {-1.5, 0.0, 0.8}) {
      const mwl::SkewBM bm(beta, 1.3);
      const double t = 0.7;
      const double s = 1.3 * std::sqrt(t);
      // one-sided limits at the kink: the density jumps at y = 0
      auto fl = [&](double y) { return bm.density(t, x, y == 0.0 ? -1e-300 : y); };
      auto fr = [&](double y) { return bm.density(t, x, y == 0.0 ? 1e-300 : y); };
      const double lo = std::min(x, 0.0) - 12 * s;
      const double hi = std::max(x, 0.0) + 12 * s;
      const double total = oracle::simpson(fl, lo, 0.0, 6000) +
                           oracle::simpson(fr, 0.0, hi, 6000);
      worst_norm = std::max(worst_norm, std::abs(total - 1.0));
    }
  }
  if (worst_norm > 1e-8)
    return {false, fmt("density normalization off by %.2e (tol 1e-8)", worst_norm)};

  const mwl::SkewBM ck(0.5, 1.0);
  double worst_ck = 0.0;
  for (double y : {-0.8, 0.0, 1.1}) {
    auto f = [&](double z) {
      return ck.density(0.4, 0.3, z) * ck.density(0.6, z, y);
    };
    auto fl = [&](double z) { return f(z == 0.0 ? -1e-300 : z); };
    auto fr = [&](double z) { return f(z == 0.0 ? 1e-300 : z); };
    const double composed =
        oracle::simpson(fl, -12.0, 0.0, 8000) + oracle::simpson(fr, 0.0, 12.0, 8000);
    worst_ck = std::max(worst_ck, std::abs(composed - ck.density(1.0, 0.3, y)));
  }
  if (worst_ck > 1e-6)
    return {false, fmt("composition off by %.2e (tol 1e-6)", worst_ck)};

  mwl::Pcg64 rng(1001, 0);
  std::vector<double> exact(100000);
  for (auto& v : exact) v = ck.sample(1.0, 0.0, rng);
  const double d_exact =
      mwl::ks_distance(exact, [&](double y) { return ck.cdf(1.0, 0.0, y); });
  const double dkw = mwl::dkw_bound(exact.size(), 0.01);
  if (d_exact >= dkw)
    return {false, fmt("inverse-cdf sampler KS %.4f >= DKW %.4f", d_exact, dkw)};

  std::vector<double> flip(40000);
  for (std::size_t i = 0; i < flip.size(); ++i)
    flip[i] = ck.flip_path(10000, {1.0}, 1002, static_cast<std::uint64_t>(i))[0];
  const double d_flip =
      mwl::ks_distance(flip, [&](double y) { return ck.cdf(1.0, 0.0, y); });
  if (d_flip > 0.02)
    return {false, fmt("excursion-flip sampler KS %.4f > 0.02", d_flip)};

  return {true, fmt("norm %.1e, composition %.1e, inverse-cdf KS %.4f",
                    worst_norm, worst_ck, d_exact) +
                    fmt(", flip KS %.4f (tol 0.02)", d_flip)};
}

// 11. Martingale part: zero mean, quadratic variation, no off-membrane
//     boundary motion.
Outcome criterion11() {
  mwl::SeedSpec seeds;
  seeds.base = 1101;
  const nlohmann::json r = mwl::proposition1_diagnostics(
      two_point(0.75), 10000, 5000, seeds, {{0.0, 1.0}});
  const nlohmann::json& pj = r["pairs"][0];
  bool all = r["localization_zero"].get<bool>();
  for (const char* k : {"M_plus", "M_minus", "qv_gap_plus", "qv_gap_minus"})
    all = all && pj[k]["pass"].get<bool>();
  return {all,
          fmt("5000 walks at n = 1e4: means within 3 s.e., localization = %.0f",
              r["localization"].get<double>())};
}

// 12. Pathwise decomposition identity, exact integer arithmetic.
Outcome criterion12() {
  mwl::Pcg64 rng(1201, 0);
  WalkModel model = two_point(0.75);
  std::int64_t bad = 0;
  const int n_paths = 10000;
  for (int i = 0; i < n_paths; ++i) {
    if (i % 20 == 0) {
      const WalkModel fresh = oracle::random_model(rng, 2, false);
      const std::int64_t start =
          static_cast<std::int64_t>(rng.bounded(2 * 5 + 1)) - 5;
      model = with_start(fresh, start);
    }
    mwl::SimulateOptions opt;
    opt.n = 50 + static_cast<std::int64_t>(rng.bounded(150));
    opt.seed = 120000 + static_cast<std::uint64_t>(i);
    const mwl::SimulationResult sim = mwl::simulate(model, opt);
    const mwl::ExcursionLedger& led = sim.ledger;
    const std::int64_t xc = sim.path.final_position - model.center();
    const std::int64_t plus = xc > model.m() ? xc : 0;
    const std::int64_t minus = -xc > model.m() ? -xc : 0;
    if (plus != led.M_plus + led.L_plus - led.residual_plus) ++bad;
    else if (minus != led.M_minus + led.L_minus + led.residual_minus) ++bad;
  }
  return {bad == 0, fmt("%.0f of 10000 random paths broke the identity "
                        "(zero tolerance)", static_cast<double>(bad))};
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Entry> entries = {
      {"exact slope of the two-point membrane model", criterion1},
      {"centered membrane laws give zero slope", criterion2},
      {"exit means balance the stationary displacement", criterion3},
      {"re-entry kernel matches certified value iteration", criterion4},
      {"per-cycle displacement LLN", criterion5},
      {"rescaled marginals match the limit law", criterion6},
      {"excursion sign frequency", criterion7},
      {"boundary-term ratio", criterion8},
      {"membrane sojourn growth", criterion9},
      {"limit process: analytics and samplers", criterion10},
      {"martingale mean and quadratic variation", criterion11},
      {"pathwise decomposition identity", criterion12},
  };

  int failures = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = entries[i].run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    std::printf("[%s] criterion %zu: %s: %s (%.1fs)\n",
                out.pass ? "PASS" : "FAIL", i + 1, entries[i].name,
                out.detail.c_str(), secs);
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  return failures;
}
