#include "skew_bm.hpp"

#include <cmath>

#include "walk.hpp"

namespace mwl {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kSqrt2 = 1.41421356237309504880;

double phi(double s, double d) {
  return kInvSqrt2Pi / s * std::exp(-d * d / (2.0 * s * s));
}

double norm_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }
double norm_sf(double z) { return 0.5 * std::erfc(z / kSqrt2); }

void check_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t))
    fail(ErrorCode::NonPositiveTime, "time must be positive and finite, got " +
                                         std::to_string(t));
}

void check_point(double v, const char* name) {
  if (!std::isfinite(v))
    fail(ErrorCode::InvalidParameter, std::string(name) + " must be finite");
}

}  // namespace

SkewBM::SkewBM(double beta, double sigma) : beta_(beta), sigma_(sigma) {
  if (!std::isfinite(beta) || beta < -1.0 || beta > 1.0)
    fail(ErrorCode::InvalidParameter,
         "permeability must lie in [-1, 1], got " + std::to_string(beta));
  if (!std::isfinite(sigma) || !(sigma > 0.0))
    fail(ErrorCode::InvalidParameter,
         "diffusion coefficient must be positive, got " + std::to_string(sigma));
}

double SkewBM::density(double t, double x, double y) const {
  check_time(t);
  check_point(x, "x");
  check_point(y, "y");
  const double s = sigma_ * std::sqrt(t);
  const double sgn = (y > 0.0) ? 1.0 : (y < 0.0 ? -1.0 : 0.0);
  return phi(s, y - x) + beta_ * sgn * phi(s, std::abs(x) + std::abs(y));
}

double SkewBM::cdf(double t, double x, double y) const {
  check_time(t);
  check_point(x, "x");
  check_point(y, "y");
  const double s = sigma_ * std::sqrt(t);
  return norm_cdf((y - x) / s) - beta_ * norm_sf((std::abs(x) + std::abs(y)) / s);
}

double SkewBM::quantile(double t, double x, double u) const {
  check_time(t);
  check_point(x, "x");
  if (!(u > 0.0) || !(u < 1.0))
    fail(ErrorCode::InvalidParameter,
         "quantile level must lie in (0, 1), got " + std::to_string(u));
  const double s = sigma_ * std::sqrt(t);
  double lo = std::min(x, 0.0) - 10.0 * s;
  double hi = std::max(x, 0.0) + 10.0 * s;
  for (int i = 0; i < 200 && cdf(t, x, lo) > u; ++i) lo -= (x - lo);
  for (int i = 0; i < 200 && cdf(t, x, hi) < u; ++i) hi += (hi - x);
  double mid = 0.5 * (lo + hi);
  for (int i = 0; i < 300; ++i) {
    mid = 0.5 * (lo + hi);
    const double f = cdf(t, x, mid);
    if (std::abs(f - u) <= 1e-12) break;
    if (f < u)
      lo = mid;
    else
      hi = mid;
  }
  return mid;
}

double SkewBM::sample(double t, double x, Pcg64& rng) const {
  return quantile(t, x, rng.uniform());
}

std::vector<double> SkewBM::sample_path(const std::vector<double>& times,
                                        std::uint64_t seed,
                                        std::uint64_t stream) const {
  if (times.empty())
    fail(ErrorCode::InvalidParameter, "sample grid is empty");
  double prev_t = -1.0;
  for (double t : times) {
    if (!std::isfinite(t) || t < 0.0)
      fail(ErrorCode::NonPositiveTime, "sample times must be finite and >= 0");
    if (t <= prev_t)
      fail(ErrorCode::InvalidParameter, "sample times must be strictly increasing");
    prev_t = t;
  }
  const SkewBM unit(beta_, 1.0);
  Pcg64 rng(seed, stream);
  std::vector<double> out;
  out.reserve(times.size());
  double z = 0.0;
  double t_prev = 0.0;
  for (double t : times) {
    if (t == 0.0) {
      out.push_back(0.0);
      continue;
    }
    z = unit.quantile(t - t_prev, z, rng.uniform());
    t_prev = t;
    out.push_back(sigma_ * z);
  }
  return out;
}

std::vector<double> SkewBM::flip_path(std::int64_t n,
                                      const std::vector<double>& times,
                                      std::uint64_t seed,
                                      std::uint64_t stream) const {
  if (n < 1)
    fail(ErrorCode::InvalidParameter, "step count must be at least 1");
  if (times.empty())
    fail(ErrorCode::InvalidParameter, "sample grid is empty");
  std::vector<std::int64_t> idx;
  idx.reserve(times.size());
  double prev_t = -1.0;
  for (double t : times) {
    if (!std::isfinite(t) || t < 0.0)
      fail(ErrorCode::NonPositiveTime, "sample times must be finite and >= 0");
    if (t <= prev_t)
      fail(ErrorCode::InvalidParameter, "sample times must be strictly increasing");
    prev_t = t;
    const std::int64_t k = scaled_index(n, t);
    if (k > n)
      fail(ErrorCode::GridBeyondHorizon,
           "time " + std::to_string(t) + " lies beyond the n-step horizon");
    idx.push_back(k);
  }
  Pcg64 steps(seed, 2 * stream);
  Pcg64 signs(seed, 2 * stream + 1);
  const double p_plus = 0.5 * (1.0 + beta_);
  const double scale = sigma_ / std::sqrt(static_cast<double>(n));

  std::vector<double> out(times.size());
  std::size_t next = 0;
  std::int64_t s = 0;
  std::int64_t r_prev = 0;
  double sign = 1.0;
  for (std::int64_t k = 0; k <= idx.back(); ++k) {
    if (k > 0) {
      s += (steps.uniform() < 0.5) ? -1 : 1;
      const std::int64_t r = std::abs(s);
      if (r_prev == 0 && r > 0)
        sign = (signs.uniform() < p_plus) ? 1.0 : -1.0;
      r_prev = r;
    }
    while (next < idx.size() && idx[next] == k) {
      out[next] = sign * static_cast<double>(r_prev) * scale;
      ++next;
    }
  }
  return out;
}

}  // namespace mwl
