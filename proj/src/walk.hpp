#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "model.hpp"

namespace mwl {

struct LedgerCheckpoint {
  std::int64_t step = 0;
  std::int64_t position = 0;  // absolute coordinates
  std::int64_t M_plus = 0, M_minus = 0;
  std::int64_t L_plus = 0, L_minus = 0;
  std::int64_t nu = 0;
  std::int64_t occ_plus = 0, occ_minus = 0;  // steps spent strictly outside A per side
};

struct ExcursionRecord {
  std::int64_t begin = 0;     // first step strictly outside A
  std::int64_t end = 0;       // re-entry step (one past the excursion)
  int sign = 0;               // +1 above, -1 below
  std::int64_t duration = 0;  // end - begin
};

// Pathwise decomposition ledger. With Xc = X - center and
// Xtilde±(n) = ±Xc(n) 1{±Xc(n) > m}, every prefix satisfies exactly
//   Xtilde±(n) = M±(n) + L±(n) ∓ residual±(n),
// in integer arithmetic. residual±(n) is the membrane-position term of the
// current crossing cycle, shifted so the identity also covers paths that do
// not start at the center; for a walk started at the center it equals the
// plain membrane term and satisfies |residual±(n)| <= m, and every re-entry
// membrane value it is built from lies in [-m, m] regardless of the start.
struct ExcursionLedger {
  std::int64_t n = 0;
  std::int64_t start = 0, m = 0, center = 0;

  std::int64_t M_plus = 0, M_minus = 0;
  std::int64_t L_plus = 0, L_minus = 0;
  std::int64_t nu = 0;
  std::int64_t occ_plus = 0, occ_minus = 0;
  std::int64_t residual_plus = 0, residual_minus = 0;

  std::int64_t rho_plus_sum = 0, rho_minus_sum = 0;
  std::int64_t cycles = 0;  // completed membrane-visit cycles (k >= 1)

  std::int64_t excursions_pos = 0, excursions_neg = 0;  // completed only
  std::int64_t l_increments_outside_A = 0;              // localization counter

  std::vector<std::int64_t> rho_plus, rho_minus;   // kept on request
  std::vector<ExcursionRecord> excursions;         // kept on request
  std::vector<LedgerCheckpoint> checkpoints;

  // Per-step series (index = step), kept on request.
  std::vector<std::int64_t> M_plus_series, M_minus_series;
  std::vector<std::int64_t> L_plus_series, L_minus_series;
  std::vector<std::int64_t> nu_series;
};

struct WalkPath {
  std::int64_t start = 0, m = 0, center = 0;
  std::int64_t step_count = 0;
  std::int64_t final_position = 0;
  std::vector<std::int64_t> positions;  // size step_count+1 when retained
  // Membrane visits at steps >= 1 as (time, position), absolute coordinates.
  // A start inside A is also a visit; it is implied by start/m/center.
  std::vector<std::pair<std::int64_t, std::int64_t>> membrane_hits;
};

struct SimulationResult {
  WalkPath path;
  ExcursionLedger ledger;
};

struct SimulateOptions {
  std::int64_t n = 0;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
  bool keep_path = false;
  bool keep_rho = false;
  bool keep_excursions = false;
  bool keep_series = false;
  bool keep_hits = false;
  std::vector<std::int64_t> checkpoints;  // strictly increasing step indices
};

// Streaming ledger builder; consumes positions one step at a time so the
// same code path serves simulation and replaying an externally given path.
class LedgerAccumulator {
 public:
  LedgerAccumulator(std::int64_t m, std::int64_t center, std::int64_t x0,
                    bool keep_rho = false, bool keep_excursions = false,
                    bool keep_series = false);

  void step(std::int64_t x_new);
  void checkpoint(std::int64_t position);  // snapshot at the current step
  const ExcursionLedger& ledger() const { return ledger_; }
  ExcursionLedger take() { return std::move(ledger_); }

  // Membrane-visit callback data for the enclosing simulation: number of
  // visits at times >= 1 seen so far.
  std::int64_t visits() const { return visits_; }

 private:
  void see_membrane_visit(std::int64_t xc);

  ExcursionLedger ledger_;
  std::int64_t m_, center_;
  std::int64_t x_prev_;      // absolute
  std::int64_t xc0_;         // centered start
  bool keep_series_;

  enum class Side : unsigned char { Low, High };
  Side plus_state_, minus_state_;
  std::int64_t plus_tau_val_ = 0, minus_tau_val_ = 0;  // centered re-entry values
  std::int64_t plus_sigma_ = 0, minus_sigma_ = 0;      // open excursion start
  bool keep_exc_;

  // rho bookkeeping
  bool keep_rho_;
  std::int64_t visits_ = 0;        // membrane visits at steps >= 1
  std::int64_t last_y_ = 0;        // centered Y(k) of the latest visit
  bool have_post_ = false;
  std::int64_t post_pos_ = 0;      // centered X(alpha_k + 1)
};

SimulationResult simulate(const WalkModel& model, const SimulateOptions& opt);

// Rebuilds the ledger from a fully retained path (positions[0] = start).
ExcursionLedger ledger_from_path(const std::vector<std::int64_t>& positions,
                                 std::int64_t m, std::int64_t center,
                                 bool keep_rho = false,
                                 bool keep_excursions = false,
                                 bool keep_series = false);

struct ScaledPath {
  std::vector<double> raw;         // X(floor(n t)) / sqrt(n)
  std::vector<double> normalized;  // X(floor(n t)) / (sigma sqrt(n))
};

// Diffusive rescaling X_n(t) = X(floor(n t)) / sqrt(n) on a time grid; each
// grid point must satisfy floor(n t) <= step_count.
ScaledPath scaled_path(const WalkPath& path, std::int64_t n,
                       const std::vector<double>& grid, double sigma);

// Index floor(n*t) with a guard against decimal times that land a hair
// below an integer in binary.
std::int64_t scaled_index(std::int64_t n, double t);

}  // namespace mwl
