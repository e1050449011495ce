#include "analyzer.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mwl {

const std::vector<double>& ReentryKernel::row(std::int64_t y) const {
  if (y > m && y - m - 1 < static_cast<std::int64_t>(rows_plus.size()))
    return rows_plus[static_cast<std::size_t>(y - m - 1)];
  if (y < -m && -y - m - 1 < static_cast<std::int64_t>(rows_minus.size()))
    return rows_minus[static_cast<std::size_t>(-y - m - 1)];
  fail(ErrorCode::BandTooSmall,
       "no re-entry row for launch offset " + std::to_string(y));
}

std::vector<std::vector<double>> solve_reentry_band(const IntegerPMF& xi,
                                                    std::int64_t m,
                                                    std::int64_t band,
                                                    std::int64_t n_rows) {
  if (n_rows < 1) return {};
  if (band < m + n_rows)
    fail(ErrorCode::BandTooSmall,
         "band " + std::to_string(band) + " does not cover launch offsets up to " +
             std::to_string(m + n_rows));
  const std::int64_t n = band - m;  // unknowns y = m+1 .. band
  const std::int64_t width = 2 * m + 1;

  // Step lattice: outside A every position stays in y + g*Z.
  std::int64_t g = 0;
  for (const auto& a : xi.atoms()) g = std::gcd(g, a.value);
  if (g == 0) g = 1;

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * (xi.size() + 1));
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, width);
  for (std::int64_t r = 0; r < n; ++r) {
    const std::int64_t y = m + 1 + r;
    trip.emplace_back(static_cast<int>(r), static_cast<int>(r), 1.0);
    for (const auto& a : xi.atoms()) {
      std::int64_t t = y + a.value;
      // Overflow above the band is pulled back to the highest in-band state
      // of the same residue class mod g. Clamping to the band edge would
      // merge classes for sublattice step laws (all-even steps, say), leaking
      // mass across classes at a 1/band rate so the rows never stabilize.
      if (t > band) t -= ((t - band + g - 1) / g) * g;
      if (t > m) {
        trip.emplace_back(static_cast<int>(r), static_cast<int>(t - m - 1), -a.prob);
      } else {
        // t >= -m is guaranteed by the step-law support bound
        rhs(r, t + m) += a.prob;
      }
    }
  }
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success)
    fail(ErrorCode::SingularSystem, "re-entry kernel system failed to factorize");
  Eigen::MatrixXd h(n, width);
  for (std::int64_t c = 0; c < width; ++c)
    h.col(c) = lu.solve(rhs.col(c));

  std::vector<std::vector<double>> rows(static_cast<std::size_t>(n_rows));
  for (std::int64_t r = 0; r < n_rows; ++r) {
    rows[static_cast<std::size_t>(r)].resize(static_cast<std::size_t>(width));
    for (std::int64_t c = 0; c < width; ++c)
      rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = h(r, c);
  }
  return rows;
}

namespace {

struct SideSolve {
  std::vector<std::vector<double>> rows;
  std::int64_t band = 0;
  double row_change = 0.0;
};

double max_row_diff(const std::vector<std::vector<double>>& a,
                    const std::vector<std::vector<double>>& b) {
  double d = 0.0;
  for (std::size_t r = 0; r < a.size(); ++r)
    for (std::size_t c = 0; c < a[r].size(); ++c)
      d = std::max(d, std::abs(a[r][c] - b[r][c]));
  return d;
}

SideSolve solve_side(const IntegerPMF& xi, std::int64_t m,
                     std::int64_t overshoot, std::int64_t start_band,
                     const KernelOptions& opt) {
  SideSolve out;
  if (overshoot < 1) return out;
  if (opt.band > 0) {
    out.rows = solve_reentry_band(xi, m, opt.band, overshoot);
    out.band = opt.band;
    return out;
  }
  std::int64_t band = std::max(start_band, m + overshoot);
  auto prev = solve_reentry_band(xi, m, band, overshoot);
  while (true) {
    std::int64_t next = band * 2;
    if (next - m > opt.max_states)
      fail(ErrorCode::NoConvergence,
           "re-entry kernel rows did not stabilize to " + std::to_string(opt.tol) +
               " within the " + std::to_string(opt.max_states) + "-state cap");
    auto cur = solve_reentry_band(xi, m, next, overshoot);
    double change = max_row_diff(prev, cur);
    if (change < opt.tol) {
      out.rows = std::move(cur);
      out.band = next;
      out.row_change = change;
      return out;
    }
    prev = std::move(cur);
    band = next;
  }
}

struct TruncatedEtas {
  std::vector<IntegerPMF> laws;
  std::vector<double> lost;
};

TruncatedEtas truncate_etas(const WalkModel& model, double eps) {
  TruncatedEtas out;
  out.laws.reserve(model.eta_all().size());
  out.lost.reserve(model.eta_all().size());
  for (const auto& law : model.eta_all()) {
    auto t = law.truncate_tail(eps);
    out.laws.push_back(std::move(t.pmf));
    out.lost.push_back(t.lost_mass);
  }
  return out;
}

ReentryKernel kernel_for_laws(const IntegerPMF& xi, std::int64_t m,
                              const std::vector<IntegerPMF>& eta,
                              const KernelOptions& opt) {
  std::int64_t os_plus = 0, os_minus = 0, max_eta = 0;
  for (std::int64_t j = -m; j <= m; ++j) {
    const auto& law = eta[static_cast<std::size_t>(j + m)];
    for (const auto& a : law.atoms()) {
      const std::int64_t y = j + a.value;
      if (y > m) os_plus = std::max(os_plus, y - m);
      if (y < -m) os_minus = std::max(os_minus, -y - m);
      max_eta = std::max(max_eta, std::abs(a.value));
    }
  }
  const std::int64_t start_band = 16 * (2 * m + 1) + max_eta;
  ReentryKernel k;
  k.m = m;
  k.overshoot_plus = os_plus;
  k.overshoot_minus = os_minus;
  SideSolve plus = solve_side(xi, m, os_plus, start_band, opt);
  IntegerPMF xi_neg = xi.negated();
  SideSolve minus = solve_side(xi_neg, m, os_minus, start_band, opt);
  // The minus-side solve ran in mirrored coordinates: its membrane column
  // for offset i corresponds to -i in the original orientation.
  for (auto& row : minus.rows) std::reverse(row.begin(), row.end());
  k.rows_plus = std::move(plus.rows);
  k.rows_minus = std::move(minus.rows);
  k.band_plus = plus.band;
  k.band_minus = minus.band;
  k.row_change_plus = plus.row_change;
  k.row_change_minus = minus.row_change;
  return k;
}

}  // namespace

ReentryKernel reentry_kernel(const WalkModel& model, const KernelOptions& opt) {
  TruncatedEtas t = truncate_etas(model, opt.eta_eps);
  return kernel_for_laws(model.xi(), model.m(), t.laws, opt);
}

std::vector<std::vector<double>> embedded_matrix(
    const std::vector<IntegerPMF>& eta, std::int64_t m,
    const ReentryKernel& kernel) {
  const std::int64_t width = 2 * m + 1;
  std::vector<std::vector<double>> P(
      static_cast<std::size_t>(width),
      std::vector<double>(static_cast<std::size_t>(width), 0.0));
  for (std::int64_t j = -m; j <= m; ++j) {
    auto& row = P[static_cast<std::size_t>(j + m)];
    const auto& law = eta[static_cast<std::size_t>(j + m)];
    for (const auto& a : law.atoms()) {
      const std::int64_t y = j + a.value;
      if (std::abs(y) <= m) {
        row[static_cast<std::size_t>(y + m)] += a.prob;
      } else {
        const auto& h = kernel.row(y);
        for (std::int64_t i = -m; i <= m; ++i)
          row[static_cast<std::size_t>(i + m)] +=
              a.prob * h[static_cast<std::size_t>(i + m)];
      }
    }
    double sum = 0.0;
    for (double p : row) sum += p;
    if (std::abs(sum - 1.0) > 1e-9)
      fail(ErrorCode::Internal,
           "embedded chain row " + std::to_string(j) + " sums to " +
               std::to_string(sum));
  }
  return P;
}

std::vector<double> stationary(const std::vector<std::vector<double>>& P) {
  const std::int64_t k = static_cast<std::int64_t>(P.size());
  if (k == 0) fail(ErrorCode::InvalidParameter, "empty transition matrix");
  Eigen::MatrixXd B(k, k);
  for (std::int64_t i = 0; i < k; ++i)
    for (std::int64_t j = 0; j < k; ++j)
      B(i, j) = P[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] -
                (i == j ? 1.0 : 0.0);
  B.row(0).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
  rhs(0) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
  if (!lu.isInvertible())
    fail(ErrorCode::SingularSystem,
         "stationary system is singular; the membrane chain has no unique "
         "stationary law");
  Eigen::VectorXd pi = lu.solve(rhs);
  double total = 0.0;
  for (std::int64_t i = 0; i < k; ++i) {
    if (pi(i) < -1e-10)
      fail(ErrorCode::SingularSystem,
           "stationary solve produced a negative mass " + std::to_string(pi(i)));
    pi(i) = std::max(pi(i), 0.0);
    total += pi(i);
  }
  pi /= total;
  for (std::int64_t i = 0; i < k; ++i) {
    double balance = -pi(i);
    for (std::int64_t j = 0; j < k; ++j)
      balance += pi(j) * P[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    if (std::abs(balance) > 1e-10)
      fail(ErrorCode::SingularSystem,
           "stationary balance residual " + std::to_string(balance) +
               " exceeds 1e-10");
  }
  return std::vector<double>(pi.data(), pi.data() + k);
}

AnalyzeResult gamma_exact(const WalkModel& model, const KernelOptions& opt) {
  const std::int64_t m = model.m();
  TruncatedEtas t = truncate_etas(model, opt.eta_eps);
  ReentryKernel kernel = kernel_for_laws(model.xi(), m, t.laws, opt);

  AnalyzeResult res;
  res.sigma2 = model.sigma2();
  res.chain.m = m;
  res.chain.P = embedded_matrix(t.laws, m, kernel);
  res.chain.pi = stationary(res.chain.P);
  res.chain.pi_strictly_positive =
      *std::min_element(res.chain.pi.begin(), res.chain.pi.end()) > 0.0;

  double e_plus = 0.0, e_minus = 0.0;
  std::int64_t max_launch = 0;
  for (std::int64_t j = -m; j <= m; ++j) {
    const double pj = res.chain.pi[static_cast<std::size_t>(j + m)];
    const auto& law = t.laws[static_cast<std::size_t>(j + m)];
    for (const auto& a : law.atoms()) {
      const std::int64_t y = j + a.value;
      if (std::abs(y) <= m) continue;
      max_launch = std::max(max_launch, std::abs(y));
      const auto& h = kernel.row(y);
      double disp = 0.0;
      for (std::int64_t i = -m; i <= m; ++i)
        disp += h[static_cast<std::size_t>(i + m)] * static_cast<double>(y - i);
      if (y > m)
        e_plus += pj * a.prob * disp;
      else
        e_minus += pj * a.prob * (-disp);
    }
  }
  const double denom = e_plus + e_minus;
  if (!(denom > 0.0))
    fail(ErrorCode::DegenerateDenominator,
         "E_pi |displacement across membrane exits| is zero; the stationary "
         "chain never leaves the membrane");
  res.chain.e_plus = e_plus;
  res.chain.e_minus = e_minus;
  res.chain.gamma = (e_plus - e_minus) / denom;

  res.truncation.eta_eps = opt.eta_eps;
  res.truncation.eta_lost = t.lost;
  res.truncation.band_plus = kernel.band_plus;
  res.truncation.band_minus = kernel.band_minus;
  res.truncation.row_change_plus = kernel.row_change_plus;
  res.truncation.row_change_minus = kernel.row_change_minus;
  res.truncation.gamma_error_bound =
      opt.eta_eps * static_cast<double>(max_launch) / denom;
  return res;
}

nlohmann::json AnalyzeResult::to_json() const {
  nlohmann::json j;
  j["gamma"] = chain.gamma;
  j["e_plus"] = chain.e_plus;
  j["e_minus"] = chain.e_minus;
  j["pi"] = chain.pi;
  j["pi_strictly_positive"] = chain.pi_strictly_positive;
  j["sigma2"] = sigma2;
  nlohmann::json tr;
  tr["eta_eps"] = truncation.eta_eps;
  tr["eta_lost"] = truncation.eta_lost;
  tr["band_plus"] = truncation.band_plus;
  tr["band_minus"] = truncation.band_minus;
  tr["row_change_plus"] = truncation.row_change_plus;
  tr["row_change_minus"] = truncation.row_change_minus;
  tr["gamma_error_bound"] = truncation.gamma_error_bound;
  j["truncation_report"] = tr;
  return j;
}

}  // namespace mwl
