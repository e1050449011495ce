#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "analyzer.hpp"
#include "model.hpp"

namespace mwl {

struct SeedSpec {
  std::uint64_t base = 1;
  std::uint64_t stream_base = 0;
};

struct Tolerances {
  double eta_eps = 1e-8;     // analyzer tail mass
  double kernel_tol = 1e-9;  // analyzer band stabilization
  double ks = 0.03;          // marginal KS allowance (sampling + lattice)
  double l_ratio = 0.10;     // relative error of the boundary-term ratio
  KernelOptions kernel_options() const;
};

// Config for the convergence runner. JSON shape:
//   {"model": {...},
//    "experiment": {"scales": [1000, ...], "paths": 200,
//                   "times": [0.5, 1.0],
//                   "seeds": {"base": 1, "stream_base": 0},
//                   "tolerances": {"eta_eps": 1e-8, "kernel_tol": 1e-9,
//                                  "ks": 0.03, "l_ratio": 0.1},
//                   "output_dir": "out"}}
// seeds, tolerances and output_dir are optional; an empty output_dir writes
// no files. paths must be at least 100 so the KS and s.e. machinery has
// something to chew on; times are fractions of each scale in (0, 1].
struct ExperimentConfig {
  WalkModel model;
  std::vector<std::int64_t> scales;
  std::int64_t paths = 100;
  std::vector<double> times;
  SeedSpec seeds;
  Tolerances tolerances;
  std::string output_dir;

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig from_json_text(const std::string& text);
  nlohmann::json to_json() const;
};

// FNV-1a over the minified config dump; stamped into every report so runs
// can be traced back to their exact inputs.
std::string config_hash(const nlohmann::json& j);

struct ConvergenceOutput {
  nlohmann::json report;
  std::string csv;  // long format: statistic,n,t,seed,value
};

// For every scale n: simulate `paths` walks (seed fixed, stream =
// stream_base + path index), rescale the marginals at the requested times,
// and compare against the exact skew Brownian limit. Also tracks excursion
// sign frequencies, boundary-term ratios, per-cycle displacement means,
// membrane visit growth, and the martingale diagnostics. Every comparison
// carries a pass flag and the tolerance or s.e. band it used. Deterministic:
// the same config always produces byte-identical outputs.
ConvergenceOutput run_convergence(const ExperimentConfig& cfg);

// Per-cycle displacement means from one long walk: mean of rho± over the
// completed membrane-visit cycles of a `horizon`-step path, with 20-batch
// standard errors, against the exact e±. Pass means within 3 s.e.
nlohmann::json lln_check(const WalkModel& model, std::int64_t horizon,
                         const SeedSpec& seeds = {},
                         const KernelOptions& opt = {});

// Boundary-term ratio L+(horizon)/L-(horizon) across `n_seeds` independent
// walks against (1+gamma)/(1-gamma). Reports per-seed ratios and the median;
// pass means the median lands within rel_tol of the target. For |gamma| = 1
// the target is infinite and the result is marked not applicable.
nlohmann::json l_ratio_check(const WalkModel& model, std::int64_t horizon,
                             std::int64_t n_seeds, double rel_tol = 0.10,
                             const SeedSpec& seeds = {},
                             const KernelOptions& opt = {});

// Mean membrane sojourn nu(n)/sqrt(n) across scales (`paths` walks each);
// pass means the last-to-first ratio of the means is <= 1.5. The max-to-min
// spread is reported alongside for callers that want the stricter gate.
nlohmann::json nu_growth_check(const WalkModel& model,
                               const std::vector<std::int64_t>& scales,
                               std::int64_t paths, const SeedSpec& seeds = {});

// Identity checks on the decomposition across many independent paths, per
// (s, t) increment pair (fractions of the horizon): the martingale parts'
// increments average to zero, their squares match sigma^2 times the expected
// one-sided occupation of the increment window, and the boundary terms never
// move while the walk is away from the membrane.
nlohmann::json proposition1_diagnostics(
    const WalkModel& model, std::int64_t n, std::int64_t paths,
    const SeedSpec& seeds = {},
    const std::vector<std::pair<double, double>>& pairs = {{0.0, 1.0}});

}  // namespace mwl
