#include "walk.hpp"

#include <algorithm>
#include <cmath>

namespace mwl {

LedgerAccumulator::LedgerAccumulator(std::int64_t m, std::int64_t center,
                                     std::int64_t x0, bool keep_rho,
                                     bool keep_excursions, bool keep_series)
    : m_(m), center_(center), x_prev_(x0), xc0_(x0 - center),
      keep_series_(keep_series), keep_exc_(keep_excursions),
      keep_rho_(keep_rho) {
  ledger_.start = x0;
  ledger_.m = m;
  ledger_.center = center;
  if (std::abs(xc0_) <= m_) {
    // Starting inside A is visit 1: the first return then completes cycle 1.
    ledger_.nu = 1;
    visits_ = 1;
    last_y_ = xc0_;
  }

  // A side that starts strictly outside begins inside an excursion whose
  // entry jump predates the path; it contributes no L entry term.
  if (xc0_ > m_) {
    plus_state_ = Side::High;
    plus_sigma_ = 0;
  } else {
    plus_state_ = Side::Low;
    plus_tau_val_ = xc0_;
  }
  if (-xc0_ > m_) {
    minus_state_ = Side::High;
    minus_sigma_ = 0;
  } else {
    minus_state_ = Side::Low;
    minus_tau_val_ = xc0_;
  }
  ledger_.residual_plus = (plus_state_ == Side::Low) ? plus_tau_val_ - xc0_ : -xc0_;
  ledger_.residual_minus = (minus_state_ == Side::Low) ? minus_tau_val_ - xc0_ : -xc0_;
  if (keep_series_) {
    ledger_.M_plus_series.push_back(0);
    ledger_.M_minus_series.push_back(0);
    ledger_.L_plus_series.push_back(0);
    ledger_.L_minus_series.push_back(0);
    ledger_.nu_series.push_back(ledger_.nu);
  }
}

void LedgerAccumulator::see_membrane_visit(std::int64_t xc) {
  ++ledger_.nu;
  if (visits_ >= 1 && have_post_) {
    // Cycle k = visits_ completes: from Y(k) (= last_y_) to Y(k+1) (= xc),
    // with X(alpha_k + 1) = post_pos_.
    std::int64_t rho_p =
        (post_pos_ <= m_) ? (xc - last_y_) : (post_pos_ - last_y_);
    std::int64_t rho_m =
        (-post_pos_ <= m_) ? -(xc - last_y_) : -(post_pos_ - last_y_);
    ledger_.rho_plus_sum += rho_p;
    ledger_.rho_minus_sum += rho_m;
    ++ledger_.cycles;
    if (keep_rho_) {
      ledger_.rho_plus.push_back(rho_p);
      ledger_.rho_minus.push_back(rho_m);
    }
  }
  ++visits_;
  last_y_ = xc;
  have_post_ = false;
}

void LedgerAccumulator::step(std::int64_t x_new) {
  const std::int64_t k = ++ledger_.n;
  const std::int64_t xc_prev = x_prev_ - center_;
  const std::int64_t xc = x_new - center_;
  const std::int64_t d = x_new - x_prev_;

  if (xc_prev > m_) {
    ledger_.M_plus += d;
    ++ledger_.occ_plus;
  } else if (xc_prev < -m_) {
    ledger_.M_minus -= d;
    ++ledger_.occ_minus;
  }

  // Position one step after the latest membrane visit (alpha_k + 1).
  if (visits_ >= 1 && !have_post_ && std::abs(xc_prev) <= m_) {
    post_pos_ = xc;
    have_post_ = true;
  }

  if (plus_state_ == Side::Low) {
    if (xc > m_) {
      ledger_.L_plus += xc - plus_tau_val_;
      if (std::abs(xc_prev) > m_) ++ledger_.l_increments_outside_A;
      plus_state_ = Side::High;
      plus_sigma_ = k;
    }
  } else if (xc <= m_) {
    plus_state_ = Side::Low;
    plus_tau_val_ = xc;
    ++ledger_.excursions_pos;
    if (keep_exc_)
      ledger_.excursions.push_back({plus_sigma_, k, +1, k - plus_sigma_});
  }

  if (minus_state_ == Side::Low) {
    if (xc < -m_) {
      ledger_.L_minus += minus_tau_val_ - xc;
      if (std::abs(xc_prev) > m_) ++ledger_.l_increments_outside_A;
      minus_state_ = Side::High;
      minus_sigma_ = k;
    }
  } else if (xc >= -m_) {
    minus_state_ = Side::Low;
    minus_tau_val_ = xc;
    ++ledger_.excursions_neg;
    if (keep_exc_)
      ledger_.excursions.push_back({minus_sigma_, k, -1, k - minus_sigma_});
  }

  if (std::abs(xc) <= m_) see_membrane_visit(xc);

  ledger_.residual_plus = (plus_state_ == Side::Low) ? plus_tau_val_ - xc0_ : -xc0_;
  ledger_.residual_minus = (minus_state_ == Side::Low) ? minus_tau_val_ - xc0_ : -xc0_;

  if (keep_series_) {
    ledger_.M_plus_series.push_back(ledger_.M_plus);
    ledger_.M_minus_series.push_back(ledger_.M_minus);
    ledger_.L_plus_series.push_back(ledger_.L_plus);
    ledger_.L_minus_series.push_back(ledger_.L_minus);
    ledger_.nu_series.push_back(ledger_.nu);
  }
  x_prev_ = x_new;
}

void LedgerAccumulator::checkpoint(std::int64_t position) {
  LedgerCheckpoint cp;
  cp.step = ledger_.n;
  cp.position = position;
  cp.M_plus = ledger_.M_plus;
  cp.M_minus = ledger_.M_minus;
  cp.L_plus = ledger_.L_plus;
  cp.L_minus = ledger_.L_minus;
  cp.nu = ledger_.nu;
  cp.occ_plus = ledger_.occ_plus;
  cp.occ_minus = ledger_.occ_minus;
  ledger_.checkpoints.push_back(cp);
}

SimulationResult simulate(const WalkModel& model, const SimulateOptions& opt) {
  if (opt.n < 0) fail(ErrorCode::InvalidParameter, "step count must be >= 0");
  for (std::size_t i = 0; i + 1 < opt.checkpoints.size(); ++i)
    if (opt.checkpoints[i] >= opt.checkpoints[i + 1])
      fail(ErrorCode::InvalidParameter, "checkpoints must be strictly increasing");
  if (!opt.checkpoints.empty() &&
      (opt.checkpoints.front() < 0 || opt.checkpoints.back() > opt.n))
    fail(ErrorCode::GridBeyondHorizon, "checkpoint beyond simulation horizon");

  Pcg64 rng(opt.seed, opt.stream);
  const std::int64_t m = model.m();
  const std::int64_t c = model.center();

  SimulationResult res;
  res.path.start = model.start();
  res.path.m = m;
  res.path.center = c;
  res.path.step_count = opt.n;

  LedgerAccumulator acc(m, c, model.start(), opt.keep_rho, opt.keep_excursions,
                        opt.keep_series);

  std::int64_t x = model.start();
  if (opt.keep_path) {
    res.path.positions.reserve(static_cast<std::size_t>(opt.n) + 1);
    res.path.positions.push_back(x);
  }
  std::size_t next_cp = 0;
  if (next_cp < opt.checkpoints.size() && opt.checkpoints[next_cp] == 0) {
    acc.checkpoint(x);
    ++next_cp;
  }

  for (std::int64_t k = 1; k <= opt.n; ++k) {
    std::int64_t xc = x - c;
    if (xc >= -m && xc <= m)
      x += model.eta(xc).sample(rng);
    else
      x += model.xi().sample(rng);
    std::int64_t prev_visits = acc.visits();
    acc.step(x);
    if (opt.keep_path) res.path.positions.push_back(x);
    if (opt.keep_hits && acc.visits() > prev_visits)
      res.path.membrane_hits.push_back({k, x});
    if (next_cp < opt.checkpoints.size() && opt.checkpoints[next_cp] == k) {
      acc.checkpoint(x);
      ++next_cp;
    }
  }
  res.path.final_position = x;
  res.ledger = acc.take();
  return res;
}

ExcursionLedger ledger_from_path(const std::vector<std::int64_t>& positions,
                                 std::int64_t m, std::int64_t center,
                                 bool keep_rho, bool keep_excursions,
                                 bool keep_series) {
  if (positions.empty())
    fail(ErrorCode::InvalidParameter, "path must contain the start position");
  LedgerAccumulator acc(m, center, positions.front(), keep_rho,
                        keep_excursions, keep_series);
  for (std::size_t i = 1; i < positions.size(); ++i) acc.step(positions[i]);
  return acc.take();
}

std::int64_t scaled_index(std::int64_t n, double t) {
  return static_cast<std::int64_t>(
      std::floor(static_cast<double>(n) * t + 1e-9));
}

ScaledPath scaled_path(const WalkPath& path, std::int64_t n,
                       const std::vector<double>& grid, double sigma) {
  if (n <= 0) fail(ErrorCode::InvalidParameter, "scale n must be positive");
  if (!(sigma > 0.0)) fail(ErrorCode::InvalidParameter, "sigma must be positive");
  if (path.positions.empty())
    fail(ErrorCode::InvalidParameter, "scaled_path needs a retained path");
  ScaledPath out;
  out.raw.reserve(grid.size());
  out.normalized.reserve(grid.size());
  const double root_n = std::sqrt(static_cast<double>(n));
  for (double t : grid) {
    if (t < 0.0) fail(ErrorCode::GridBeyondHorizon, "grid time below 0");
    std::int64_t idx = scaled_index(n, t);
    if (idx > path.step_count ||
        idx >= static_cast<std::int64_t>(path.positions.size()))
      fail(ErrorCode::GridBeyondHorizon,
           "grid time " + std::to_string(t) + " needs step " +
               std::to_string(idx) + " beyond horizon " +
               std::to_string(path.step_count));
    double v = static_cast<double>(path.positions[static_cast<std::size_t>(idx)]);
    out.raw.push_back(v / root_n);
    out.normalized.push_back(v / (sigma * root_n));
  }
  return out;
}

}  // namespace mwl
