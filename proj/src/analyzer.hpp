#pragma once

#include <cstdint>
#include <vector>

#include "model.hpp"

namespace mwl {

struct KernelOptions {
  double eta_eps = 1e-8;   // membrane-jump tail mass dropped before analysis
  double tol = 1e-9;       // kernel row stabilization between band doublings
  std::int64_t band = 0;   // fixed truncation band; 0 = adaptive doubling
  std::int64_t max_states = std::int64_t{1} << 20;
};

// h(y, i): probability that a walk launched at centered offset y, |y| > m,
// first enters the membrane at offset i. Rows exist for every launch point
// the (truncated) membrane jumps can reach.
struct ReentryKernel {
  std::int64_t m = 0;
  std::int64_t overshoot_plus = 0;   // rows for y = m+1 .. m+overshoot_plus
  std::int64_t overshoot_minus = 0;  // rows for y = -(m+1) .. -(m+overshoot_minus)
  std::vector<std::vector<double>> rows_plus;   // row[y-m-1][i+m]
  std::vector<std::vector<double>> rows_minus;  // row[-y-m-1][i+m]
  std::int64_t band_plus = 0, band_minus = 0;
  double row_change_plus = 0.0, row_change_minus = 0.0;

  const std::vector<double>& row(std::int64_t y) const;
};

// One-sided fixed-band absorption solve for the upper side: unknowns are the
// states y = m+1..band, steps follow `xi`, mass stepping above the band is
// redirected to the band edge, absorption happens on [-m, m]. Returns rows
// for y = m+1 .. m+n_rows. The lower side is the mirror image (negated xi).
std::vector<std::vector<double>> solve_reentry_band(const IntegerPMF& xi,
                                                    std::int64_t m,
                                                    std::int64_t band,
                                                    std::int64_t n_rows);

ReentryKernel reentry_kernel(const WalkModel& model, const KernelOptions& opt = {});

struct TruncationReport {
  double eta_eps = 0.0;
  std::vector<double> eta_lost;  // per membrane offset (index j + m)
  std::int64_t band_plus = 0, band_minus = 0;
  double row_change_plus = 0.0, row_change_minus = 0.0;
  double gamma_error_bound = 0.0;
};

struct EmbeddedChain {
  std::int64_t m = 0;
  std::vector<std::vector<double>> P;  // (2m+1)^2, row j+m, column i+m
  std::vector<double> pi;              // stationary law of P
  bool pi_strictly_positive = false;
  double e_plus = 0.0, e_minus = 0.0;
  double gamma = 0.0;
};

// Transition matrix of the chain observed at membrane-visit times:
// P(j,i) = P{eta_j = i-j} + sum_{|y|>m} P{eta_j = y-j} h(y,i).
std::vector<std::vector<double>> embedded_matrix(
    const std::vector<IntegerPMF>& eta, std::int64_t m,
    const ReentryKernel& kernel);

// Stationary distribution via a direct solve of pi P = pi with one balance
// equation replaced by normalization; requires a unique solution and checks
// the residual to 1e-10.
std::vector<double> stationary(const std::vector<std::vector<double>>& P);

struct AnalyzeResult {
  EmbeddedChain chain;
  TruncationReport truncation;
  double sigma2 = 0.0;
  nlohmann::json to_json() const;
};

// Exact permeability parameter of the diffusive limit:
// gamma = (e_plus - e_minus) / (e_plus + e_minus) with
// e_± = E_pi (displacement across one membrane-exit excursion)^±.
AnalyzeResult gamma_exact(const WalkModel& model, const KernelOptions& opt = {});

}  // namespace mwl
