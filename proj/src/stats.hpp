#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "errors.hpp"

namespace mwl {

// Two-sided Kolmogorov-Smirnov distance between the empirical law of the
// sample and the continuous cdf F.
double ks_distance(std::vector<double> sample,
                   const std::function<double(double)>& cdf);

// Dvoretzky-Kiefer-Wolfowitz band: with probability at least 1 - alpha the
// KS distance of an n-point i.i.d. sample stays below this.
double dkw_bound(std::size_t n, double alpha);

struct BatchMeans {
  double mean = 0.0;
  double se = 0.0;
  std::size_t batches = 0;
};

// Mean and standard error from contiguous batch means.
BatchMeans batch_means(const std::vector<double>& values,
                       std::size_t n_batches = 20);

double median(std::vector<double> values);

}  // namespace mwl
