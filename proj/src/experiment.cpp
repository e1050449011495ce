#include "experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "skew_bm.hpp"
#include "stats.hpp"
#include "walk.hpp"

namespace mwl {

namespace {

std::int64_t require_int(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer())
    fail(ErrorCode::InvalidConfig, std::string("experiment.") + key +
                                       " must be an integer");
  return j[key].get<std::int64_t>();
}

nlohmann::json stat_or_null(const std::vector<double>& v) {
  nlohmann::json out;
  if (v.empty()) {
    out["mean"] = nullptr;
    out["se"] = nullptr;
    out["count"] = 0;
    return out;
  }
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  out["mean"] = mean;
  out["count"] = v.size();
  if (v.size() >= 2) {
    const std::size_t nb = std::min<std::size_t>(20, v.size());
    out["se"] = batch_means(v, nb).se;
  } else {
    out["se"] = nullptr;
  }
  return out;
}

// pass = |mean - target| <= 3 s.e., null when the s.e. is unavailable.
// The 1e-12 floor keeps degenerate cases honest: a deterministic statistic
// has s.e. exactly 0 while its target comes out of a linear solve, so the
// two can disagree by a few ulps without anything being wrong.
void add_3se_check(nlohmann::json& stat, double target) {
  stat["target"] = target;
  if (stat["se"].is_null()) {
    stat["pass"] = nullptr;
    return;
  }
  stat["pass"] = std::abs(stat["mean"].get<double>() - target) <=
                 3.0 * stat["se"].get<double>() + 1e-12;
}

struct PassTally {
  bool all = true;
  void note(const nlohmann::json& pass) {
    if (pass.is_boolean() && !pass.get<bool>()) all = false;
  }
};

void csv_row(std::ostringstream& csv, const std::string& stat, std::int64_t n,
             double t, std::uint64_t seed, double value) {
  csv << stat << ',' << n << ',';
  if (t >= 0.0) csv << t;
  csv << ',' << seed << ',' << value << '\n';
}

double json_mean(const nlohmann::json& stat) {
  return stat["mean"].is_null() ? 0.0 : stat["mean"].get<double>();
}

}  // namespace

KernelOptions Tolerances::kernel_options() const {
  KernelOptions o;
  o.eta_eps = eta_eps;
  o.tol = kernel_tol;
  return o;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("model") || !j.contains("experiment"))
    fail(ErrorCode::InvalidConfig, "config needs \"model\" and \"experiment\"");
  ExperimentConfig cfg{WalkModel::from_json(j["model"]), {}, 100, {}, {}, {}, {}};
  const auto& e = j["experiment"];
  if (!e.is_object())
    fail(ErrorCode::InvalidConfig, "\"experiment\" must be an object");

  if (!e.contains("scales") || !e["scales"].is_array() || e["scales"].empty())
    fail(ErrorCode::InvalidConfig, "experiment.scales must be a nonempty array");
  for (const auto& s : e["scales"]) {
    if (!s.is_number_integer() || s.get<std::int64_t>() < 1)
      fail(ErrorCode::InvalidConfig, "experiment.scales entries must be >= 1");
    cfg.scales.push_back(s.get<std::int64_t>());
  }

  cfg.paths = require_int(e, "paths");
  if (cfg.paths < 100)
    fail(ErrorCode::InvalidConfig, "experiment.paths must be >= 100");

  if (!e.contains("times") || !e["times"].is_array() || e["times"].empty())
    fail(ErrorCode::InvalidConfig, "experiment.times must be a nonempty array");
  double prev = 0.0;
  for (const auto& t : e["times"]) {
    if (!t.is_number())
      fail(ErrorCode::InvalidConfig, "experiment.times entries must be numbers");
    const double v = t.get<double>();
    if (!(v > 0.0) || v > 1.0)
      fail(ErrorCode::InvalidConfig, "experiment.times must lie in (0, 1]");
    if (v <= prev)
      fail(ErrorCode::InvalidConfig, "experiment.times must be strictly increasing");
    cfg.times.push_back(v);
    prev = v;
  }

  if (e.contains("seeds")) {
    const auto& s = e["seeds"];
    if (!s.is_object())
      fail(ErrorCode::InvalidConfig, "experiment.seeds must be an object");
    if (s.contains("base")) cfg.seeds.base = s["base"].get<std::uint64_t>();
    if (s.contains("stream_base"))
      cfg.seeds.stream_base = s["stream_base"].get<std::uint64_t>();
  }

  if (e.contains("tolerances")) {
    const auto& t = e["tolerances"];
    if (!t.is_object())
      fail(ErrorCode::InvalidConfig, "experiment.tolerances must be an object");
    auto pick = [&](const char* key, double& slot) {
      if (!t.contains(key)) return;
      if (!t[key].is_number() || !(t[key].get<double>() > 0.0))
        fail(ErrorCode::InvalidConfig,
             std::string("experiment.tolerances.") + key + " must be > 0");
      slot = t[key].get<double>();
    };
    pick("eta_eps", cfg.tolerances.eta_eps);
    pick("kernel_tol", cfg.tolerances.kernel_tol);
    pick("ks", cfg.tolerances.ks);
    pick("l_ratio", cfg.tolerances.l_ratio);
  }

  if (e.contains("output_dir")) {
    if (!e["output_dir"].is_string())
      fail(ErrorCode::InvalidConfig, "experiment.output_dir must be a string");
    cfg.output_dir = e["output_dir"].get<std::string>();
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded())
    fail(ErrorCode::InvalidConfig, "config is not valid JSON");
  return from_json(j);
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json e;
  e["scales"] = scales;
  e["paths"] = paths;
  e["times"] = times;
  e["seeds"] = {{"base", seeds.base}, {"stream_base", seeds.stream_base}};
  e["tolerances"] = {{"eta_eps", tolerances.eta_eps},
                     {"kernel_tol", tolerances.kernel_tol},
                     {"ks", tolerances.ks},
                     {"l_ratio", tolerances.l_ratio}};
  if (!output_dir.empty()) e["output_dir"] = output_dir;
  return nlohmann::json{{"model", model.to_json()}, {"experiment", e}};
}

std::string config_hash(const nlohmann::json& j) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

ConvergenceOutput run_convergence(const ExperimentConfig& cfg) {
  const WalkModel& model = cfg.model;
  const AnalyzeResult analysis =
      gamma_exact(model, cfg.tolerances.kernel_options());
  const double gamma = analysis.chain.gamma;
  const double sigma = std::sqrt(analysis.sigma2);
  const SkewBM limit(gamma, 1.0);
  PassTally tally;

  // Exit-direction frequency has two natural references: the stationary
  // probability that an excursion goes up, and the limit value (1+gamma)/2.
  // They agree when every exit overshoots by the same amount, not in general.
  double p_up = 0.0, p_down = 0.0;
  const std::int64_t m = model.m();
  for (std::int64_t j = -m; j <= m; ++j) {
    const double pj = analysis.chain.pi[static_cast<std::size_t>(j + m)];
    for (const auto& a : model.eta(j).atoms()) {
      if (j + a.value > m) p_up += pj * a.prob;
      if (j + a.value < -m) p_down += pj * a.prob;
    }
  }
  const double sign_target = p_up / (p_up + p_down);

  nlohmann::json report;
  report["config"] = cfg.to_json();
  report["config_hash"] = config_hash(report["config"]);
  report["analysis"] = analysis.to_json();
  nlohmann::json targets;
  targets["sign_frequency_exit"] = sign_target;
  targets["sign_frequency_limit"] = 0.5 * (1.0 + gamma);
  targets["l_ratio"] = std::abs(gamma) < 1.0
                           ? nlohmann::json((1.0 + gamma) / (1.0 - gamma))
                           : nlohmann::json();
  report["targets"] = targets;

  std::ostringstream csv;
  csv << std::setprecision(17);
  csv << "statistic,n,t,seed,value\n";

  std::vector<double> nu_means;
  report["scales"] = nlohmann::json::array();
  for (std::int64_t n : cfg.scales) {
    std::vector<std::int64_t> cps;
    std::vector<std::size_t> slot(cfg.times.size());
    for (std::size_t ti = 0; ti < cfg.times.size(); ++ti) {
      const std::int64_t idx = scaled_index(n, cfg.times[ti]);
      if (cps.empty() || cps.back() != idx) cps.push_back(idx);
      slot[ti] = cps.size() - 1;
    }

    const double root_n = std::sqrt(static_cast<double>(n));
    std::vector<std::vector<double>> marginals(cps.size());
    for (auto& v : marginals) v.reserve(static_cast<std::size_t>(cfg.paths));
    std::vector<double> sign_freq, l_ratio, nu_scaled;
    std::vector<double> rho_mean_plus, rho_mean_minus;
    std::vector<double> m_plus, m_minus, qv_plus, qv_minus;
    std::int64_t localization = 0;

    SimulateOptions opt;
    opt.n = n;
    opt.seed = cfg.seeds.base;
    opt.checkpoints = cps;
    for (std::int64_t i = 0; i < cfg.paths; ++i) {
      opt.stream = cfg.seeds.stream_base + static_cast<std::uint64_t>(i);
      const ExcursionLedger led = simulate(model, opt).ledger;
      for (std::size_t c = 0; c < cps.size(); ++c)
        marginals[c].push_back(
            static_cast<double>(led.checkpoints[c].position - model.center()) /
            (sigma * root_n));
      const std::int64_t exc = led.excursions_pos + led.excursions_neg;
      if (exc > 0)
        sign_freq.push_back(static_cast<double>(led.excursions_pos) /
                            static_cast<double>(exc));
      if (led.L_minus > 0)
        l_ratio.push_back(static_cast<double>(led.L_plus) /
                          static_cast<double>(led.L_minus));
      if (led.cycles > 0) {
        rho_mean_plus.push_back(static_cast<double>(led.rho_plus_sum) /
                                static_cast<double>(led.cycles));
        rho_mean_minus.push_back(static_cast<double>(led.rho_minus_sum) /
                                 static_cast<double>(led.cycles));
      }
      nu_scaled.push_back(static_cast<double>(led.nu) / root_n);
      m_plus.push_back(static_cast<double>(led.M_plus) / root_n);
      m_minus.push_back(static_cast<double>(led.M_minus) / root_n);
      qv_plus.push_back((static_cast<double>(led.M_plus) *
                             static_cast<double>(led.M_plus) -
                         analysis.sigma2 * static_cast<double>(led.occ_plus)) /
                        static_cast<double>(n));
      qv_minus.push_back((static_cast<double>(led.M_minus) *
                              static_cast<double>(led.M_minus) -
                          analysis.sigma2 * static_cast<double>(led.occ_minus)) /
                         static_cast<double>(n));
      localization += led.l_increments_outside_A;
    }

    nlohmann::json sj;
    sj["n"] = n;
    sj["marginals"] = nlohmann::json::array();
    for (std::size_t ti = 0; ti < cfg.times.size(); ++ti) {
      const double t = cfg.times[ti];
      const double ks = ks_distance(
          marginals[slot[ti]], [&](double y) { return limit.cdf(t, 0.0, y); });
      const double dkw = dkw_bound(marginals[slot[ti]].size(), 0.01);
      const bool pass = ks <= cfg.tolerances.ks;
      tally.note(pass);
      sj["marginals"].push_back({{"t", t},
                                 {"ks", ks},
                                 {"dkw_99", dkw},
                                 {"tolerance", cfg.tolerances.ks},
                                 {"pass", pass},
                                 {"paths", cfg.paths}});
      csv_row(csv, "ks", n, t, cfg.seeds.base, ks);
    }

    sj["sign_frequency"] = stat_or_null(sign_freq);
    add_3se_check(sj["sign_frequency"], sign_target);
    tally.note(sj["sign_frequency"]["pass"]);
    if (!sign_freq.empty())
      csv_row(csv, "sign_frequency", n, -1.0, cfg.seeds.base,
              json_mean(sj["sign_frequency"]));

    nlohmann::json lj;
    lj["count"] = l_ratio.size();
    lj["tolerance"] = cfg.tolerances.l_ratio;
    if (std::abs(gamma) >= 1.0) {
      lj["applicable"] = false;
      lj["median"] = nullptr;
      lj["pass"] = nullptr;
    } else {
      lj["applicable"] = true;
      const double target = (1.0 + gamma) / (1.0 - gamma);
      if (l_ratio.empty()) {
        lj["median"] = nullptr;
        lj["pass"] = nullptr;
      } else {
        const double med = median(l_ratio);
        lj["median"] = med;
        lj["pass"] = std::abs(med / target - 1.0) <= cfg.tolerances.l_ratio;
        tally.note(lj["pass"]);
        csv_row(csv, "l_ratio_median", n, -1.0, cfg.seeds.base, med);
      }
    }
    sj["l_ratio"] = lj;

    nlohmann::json rj;
    rj["plus"] = stat_or_null(rho_mean_plus);
    add_3se_check(rj["plus"], analysis.chain.e_plus);
    rj["minus"] = stat_or_null(rho_mean_minus);
    add_3se_check(rj["minus"], analysis.chain.e_minus);
    tally.note(rj["plus"]["pass"]);
    tally.note(rj["minus"]["pass"]);
    if (!rho_mean_plus.empty()) {
      csv_row(csv, "rho_mean_plus", n, -1.0, cfg.seeds.base, json_mean(rj["plus"]));
      csv_row(csv, "rho_mean_minus", n, -1.0, cfg.seeds.base,
              json_mean(rj["minus"]));
    }
    sj["rho"] = rj;

    sj["nu_over_sqrt_n"] = stat_or_null(nu_scaled);
    nu_means.push_back(json_mean(sj["nu_over_sqrt_n"]));
    csv_row(csv, "nu_over_sqrt_n", n, -1.0, cfg.seeds.base, nu_means.back());

    nlohmann::json mj;
    mj["M_plus"] = stat_or_null(m_plus);
    add_3se_check(mj["M_plus"], 0.0);
    mj["M_minus"] = stat_or_null(m_minus);
    add_3se_check(mj["M_minus"], 0.0);
    mj["qv_gap_plus"] = stat_or_null(qv_plus);
    add_3se_check(mj["qv_gap_plus"], 0.0);
    mj["qv_gap_minus"] = stat_or_null(qv_minus);
    add_3se_check(mj["qv_gap_minus"], 0.0);
    mj["localization"] = localization;
    mj["localization_pass"] = (localization == 0);
    for (const char* k : {"M_plus", "M_minus", "qv_gap_plus", "qv_gap_minus"})
      tally.note(mj[k]["pass"]);
    tally.note(mj["localization_pass"]);
    sj["martingale"] = mj;
    csv_row(csv, "m_plus_mean", n, -1.0, cfg.seeds.base, json_mean(mj["M_plus"]));
    csv_row(csv, "m_minus_mean", n, -1.0, cfg.seeds.base, json_mean(mj["M_minus"]));
    csv_row(csv, "qv_gap_plus_mean", n, -1.0, cfg.seeds.base,
            json_mean(mj["qv_gap_plus"]));
    csv_row(csv, "qv_gap_minus_mean", n, -1.0, cfg.seeds.base,
            json_mean(mj["qv_gap_minus"]));
    csv_row(csv, "localization", n, -1.0, cfg.seeds.base,
            static_cast<double>(localization));

    report["scales"].push_back(sj);
  }

  nlohmann::json growth;
  growth["tolerance"] = 1.5;
  if (nu_means.size() >= 2) {
    const auto [lo, hi] = std::minmax_element(nu_means.begin(), nu_means.end());
    if (*lo > 0.0) {
      growth["ratio"] = *hi / *lo;
      growth["pass"] = (*hi / *lo) <= 1.5;
      tally.note(growth["pass"]);
    } else {
      growth["ratio"] = nullptr;
      growth["pass"] = nullptr;
    }
  } else {
    growth["ratio"] = nullptr;
    growth["pass"] = nullptr;
  }
  report["nu_growth"] = growth;
  report["all_pass"] = tally.all;

  ConvergenceOutput out{std::move(report), csv.str()};
  if (!cfg.output_dir.empty()) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec)
      fail(ErrorCode::IOFailure,
           "cannot create output directory " + cfg.output_dir);
    {
      std::ofstream f(fs::path(cfg.output_dir) / "report.json");
      f << out.report.dump(2) << '\n';
      if (!f) fail(ErrorCode::IOFailure, "cannot write report.json");
    }
    {
      std::ofstream f(fs::path(cfg.output_dir) / "statistics.csv");
      f << out.csv;
      if (!f) fail(ErrorCode::IOFailure, "cannot write statistics.csv");
    }
  }
  return out;
}

nlohmann::json lln_check(const WalkModel& model, std::int64_t horizon,
                         const SeedSpec& seeds, const KernelOptions& opt) {
  const AnalyzeResult analysis = gamma_exact(model, opt);
  SimulateOptions so;
  so.n = horizon;
  so.seed = seeds.base;
  so.stream = seeds.stream_base;
  so.keep_rho = true;
  const ExcursionLedger led = simulate(model, so).ledger;

  nlohmann::json out;
  out["horizon"] = horizon;
  out["seed"] = seeds.base;
  out["stream"] = seeds.stream_base;
  out["cycles"] = led.cycles;
  auto side = [&](const std::vector<std::int64_t>& rho, double target) {
    std::vector<double> v(rho.begin(), rho.end());
    nlohmann::json j = stat_or_null(v);
    add_3se_check(j, target);
    if (!j["mean"].is_null())
      j["gap"] = std::abs(j["mean"].get<double>() - target);
    return j;
  };
  out["rho_plus"] = side(led.rho_plus, analysis.chain.e_plus);
  out["rho_minus"] = side(led.rho_minus, analysis.chain.e_minus);
  out["e_plus"] = analysis.chain.e_plus;
  out["e_minus"] = analysis.chain.e_minus;
  const auto& pp = out["rho_plus"]["pass"];
  const auto& pm = out["rho_minus"]["pass"];
  out["pass"] = (pp.is_boolean() && pm.is_boolean())
                    ? nlohmann::json(pp.get<bool>() && pm.get<bool>())
                    : nlohmann::json();
  return out;
}

nlohmann::json l_ratio_check(const WalkModel& model, std::int64_t horizon,
                             std::int64_t n_seeds, double rel_tol,
                             const SeedSpec& seeds, const KernelOptions& opt) {
  if (n_seeds < 1) fail(ErrorCode::InvalidParameter, "need at least one seed");
  const AnalyzeResult analysis = gamma_exact(model, opt);
  const double gamma = analysis.chain.gamma;

  nlohmann::json out;
  out["horizon"] = horizon;
  out["gamma"] = gamma;
  out["tolerance"] = rel_tol;
  if (std::abs(gamma) >= 1.0) {
    out["applicable"] = false;
    out["target"] = nullptr;
    out["median"] = nullptr;
    out["pass"] = nullptr;
    return out;
  }
  const double target = (1.0 + gamma) / (1.0 - gamma);
  out["applicable"] = true;
  out["target"] = target;

  std::vector<double> ratios;
  SimulateOptions so;
  so.n = horizon;
  so.seed = seeds.base;
  for (std::int64_t i = 0; i < n_seeds; ++i) {
    so.stream = seeds.stream_base + static_cast<std::uint64_t>(i);
    const ExcursionLedger led = simulate(model, so).ledger;
    if (led.L_minus > 0)
      ratios.push_back(static_cast<double>(led.L_plus) /
                       static_cast<double>(led.L_minus));
  }
  out["ratios"] = ratios;
  out["seeds_used"] = ratios.size();
  if (ratios.empty()) {
    out["median"] = nullptr;
    out["pass"] = nullptr;
    return out;
  }
  const double med = median(ratios);
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  out["median"] = med;
  out["min"] = *lo;
  out["max"] = *hi;
  out["rel_error"] = std::abs(med / target - 1.0);
  out["pass"] = std::abs(med / target - 1.0) <= rel_tol;
  return out;
}

nlohmann::json nu_growth_check(const WalkModel& model,
                               const std::vector<std::int64_t>& scales,
                               std::int64_t paths, const SeedSpec& seeds) {
  if (scales.empty()) fail(ErrorCode::InvalidParameter, "no scales given");
  if (paths < 1) fail(ErrorCode::InvalidParameter, "need at least one path");
  nlohmann::json out;
  out["paths"] = paths;
  out["table"] = nlohmann::json::array();
  std::vector<double> means;
  for (std::int64_t n : scales) {
    if (n < 1) fail(ErrorCode::InvalidParameter, "scales must be >= 1");
    const double root_n = std::sqrt(static_cast<double>(n));
    SimulateOptions so;
    so.n = n;
    so.seed = seeds.base;
    double sum = 0.0;
    for (std::int64_t i = 0; i < paths; ++i) {
      so.stream = seeds.stream_base + static_cast<std::uint64_t>(i);
      sum += static_cast<double>(simulate(model, so).ledger.nu) / root_n;
    }
    means.push_back(sum / static_cast<double>(paths));
    out["table"].push_back({{"n", n}, {"mean", means.back()}});
  }
  out["tolerance"] = 1.5;
  const auto [lo, hi] = std::minmax_element(means.begin(), means.end());
  if (*lo > 0.0) {
    out["spread_ratio"] = *hi / *lo;
    out["last_to_first"] = means.back() / means.front();
    out["pass"] = means.back() / means.front() <= 1.5;
  } else {
    out["spread_ratio"] = nullptr;
    out["last_to_first"] = nullptr;
    out["pass"] = false;
  }
  return out;
}

nlohmann::json proposition1_diagnostics(
    const WalkModel& model, std::int64_t n, std::int64_t paths,
    const SeedSpec& seeds, const std::vector<std::pair<double, double>>& pairs) {
  if (n < 0) fail(ErrorCode::InvalidParameter, "horizon must be >= 0");
  if (paths < 2) fail(ErrorCode::InvalidParameter, "diagnostics need >= 2 paths");
  if (pairs.empty()) fail(ErrorCode::InvalidParameter, "no (s, t) pairs given");
  const double sigma2 = model.sigma2();
  const AnalyzeResult analysis = gamma_exact(model);
  const double gamma = analysis.chain.gamma;
  const double root_n = std::sqrt(static_cast<double>(std::max<std::int64_t>(n, 1)));

  std::vector<std::int64_t> cps;
  std::vector<std::pair<std::size_t, std::size_t>> slots;
  for (const auto& [s, t] : pairs) {
    if (!(s >= 0.0) || !(t <= 1.0) || !(s < t))
      fail(ErrorCode::InvalidParameter,
           "pairs must satisfy 0 <= s < t <= 1 (fractions of the horizon)");
    const std::int64_t is = scaled_index(n, s);
    const std::int64_t it = scaled_index(n, t);
    auto put = [&](std::int64_t idx) {
      const auto here = std::lower_bound(cps.begin(), cps.end(), idx);
      const std::size_t pos = static_cast<std::size_t>(here - cps.begin());
      if (here == cps.end() || *here != idx) cps.insert(here, idx);
      return pos;
    };
    const std::size_t ps = put(is);
    // inserting is may shift the slot of a later it from an earlier pair,
    // so resolve all slots after the checkpoint set is final
    (void)ps;
    put(it);
  }
  for (const auto& [s, t] : pairs) {
    auto at = [&](std::int64_t idx) {
      return static_cast<std::size_t>(
          std::lower_bound(cps.begin(), cps.end(), idx) - cps.begin());
    };
    slots.emplace_back(at(scaled_index(n, s)), at(scaled_index(n, t)));
  }

  std::vector<std::vector<double>> inc_plus(pairs.size()), inc_minus(pairs.size());
  std::vector<std::vector<double>> gap_plus(pairs.size()), gap_minus(pairs.size());
  std::vector<double> v_plus, v_minus;
  std::int64_t localization = 0;

  SimulateOptions opt;
  opt.n = n;
  opt.seed = seeds.base;
  opt.checkpoints = cps;
  for (std::int64_t i = 0; i < paths; ++i) {
    opt.stream = seeds.stream_base + static_cast<std::uint64_t>(i);
    const ExcursionLedger led = simulate(model, opt).ledger;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const LedgerCheckpoint& a = led.checkpoints[slots[p].first];
      const LedgerCheckpoint& b = led.checkpoints[slots[p].second];
      const double dp = static_cast<double>(b.M_plus - a.M_plus);
      const double dm = static_cast<double>(b.M_minus - a.M_minus);
      inc_plus[p].push_back(dp / root_n);
      inc_minus[p].push_back(dm / root_n);
      gap_plus[p].push_back(
          (dp * dp - sigma2 * static_cast<double>(b.occ_plus - a.occ_plus)) /
          static_cast<double>(std::max<std::int64_t>(n, 1)));
      gap_minus[p].push_back(
          (dm * dm - sigma2 * static_cast<double>(b.occ_minus - a.occ_minus)) /
          static_cast<double>(std::max<std::int64_t>(n, 1)));
    }
    if (1.0 + gamma > 0.0)
      v_plus.push_back(2.0 / (1.0 + gamma) * static_cast<double>(led.L_plus) /
                       root_n);
    if (1.0 - gamma > 0.0)
      v_minus.push_back(2.0 / (1.0 - gamma) * static_cast<double>(led.L_minus) /
                        root_n);
    localization += led.l_increments_outside_A;
  }

  nlohmann::json out;
  out["n"] = n;
  out["paths"] = paths;
  out["seed"] = seeds.base;
  out["stream_base"] = seeds.stream_base;
  out["sigma2"] = sigma2;
  out["gamma"] = gamma;
  out["pairs"] = nlohmann::json::array();
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    nlohmann::json pj;
    pj["s"] = pairs[p].first;
    pj["t"] = pairs[p].second;
    pj["M_plus"] = stat_or_null(inc_plus[p]);
    add_3se_check(pj["M_plus"], 0.0);
    pj["M_minus"] = stat_or_null(inc_minus[p]);
    add_3se_check(pj["M_minus"], 0.0);
    pj["qv_gap_plus"] = stat_or_null(gap_plus[p]);
    add_3se_check(pj["qv_gap_plus"], 0.0);
    pj["qv_gap_minus"] = stat_or_null(gap_minus[p]);
    add_3se_check(pj["qv_gap_minus"], 0.0);
    out["pairs"].push_back(pj);
  }
  // Both sides reconstruct the same candidate local-time process V.
  out["v_plus"] = v_plus.empty() ? nlohmann::json() : stat_or_null(v_plus);
  out["v_minus"] = v_minus.empty() ? nlohmann::json() : stat_or_null(v_minus);
  out["localization"] = localization;
  out["localization_zero"] = (localization == 0);
  return out;
}

}  // namespace mwl
