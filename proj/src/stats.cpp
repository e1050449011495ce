#include "stats.hpp"

#include <algorithm>
#include <cmath>

namespace mwl {

double ks_distance(std::vector<double> sample,
                   const std::function<double(double)>& cdf) {
  if (sample.empty()) fail(ErrorCode::EmptySample, "KS distance of an empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    d = std::max(d, std::abs(static_cast<double>(i) / n - f));
  }
  return d;
}

double dkw_bound(std::size_t n, double alpha) {
  if (n == 0) fail(ErrorCode::EmptySample, "DKW bound needs a nonempty sample");
  if (!(alpha > 0.0) || !(alpha < 1.0))
    fail(ErrorCode::InvalidParameter, "DKW level must lie in (0, 1)");
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
}

BatchMeans batch_means(const std::vector<double>& values, std::size_t n_batches) {
  if (n_batches < 2)
    fail(ErrorCode::InvalidParameter, "batch means needs at least 2 batches");
  if (values.size() < n_batches)
    fail(ErrorCode::EmptySample, "batch means needs at least one value per batch");
  const std::size_t base = values.size() / n_batches;
  const std::size_t extra = values.size() % n_batches;
  std::vector<double> b(n_batches, 0.0);
  std::size_t pos = 0;
  for (std::size_t k = 0; k < n_batches; ++k) {
    const std::size_t len = base + (k < extra ? 1 : 0);
    double sum = 0.0;
    for (std::size_t i = 0; i < len; ++i) sum += values[pos + i];
    b[k] = sum / static_cast<double>(len);
    pos += len;
  }
  BatchMeans out;
  out.batches = n_batches;
  for (double v : b) out.mean += v;
  out.mean /= static_cast<double>(n_batches);
  double ss = 0.0;
  for (double v : b) ss += (v - out.mean) * (v - out.mean);
  out.se = std::sqrt(ss / (static_cast<double>(n_batches) *
                           static_cast<double>(n_batches - 1)));
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) fail(ErrorCode::EmptySample, "median of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace mwl
