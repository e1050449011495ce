#pragma once

#include <cstdint>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"

namespace mwl {

// Skew Brownian motion with permeability beta in [-1, 1] and diffusion
// coefficient sigma > 0. beta = 0 is standard BM, beta = 1 reflects off 0
// from above, beta = -1 from below.
class SkewBM {
 public:
  SkewBM(double beta, double sigma = 1.0);

  double beta() const { return beta_; }
  double sigma() const { return sigma_; }

  // Transition density p_t(x, y); sign(0) counts as 0, so the two half-line
  // lumps never overlap.
  double density(double t, double x, double y) const;

  // P{X(t) <= y | X(0) = x}, in a form with no catastrophic cancellation:
  // beta = 1 gives exactly zero mass below the barrier for x >= 0.
  double cdf(double t, double x, double y) const;

  // Inverse of cdf in y, bisected to |cdf(mid) - u| <= 1e-12.
  double quantile(double t, double x, double u) const;

  // One endpoint draw at horizon t from x (one uniform consumed).
  double sample(double t, double x, Pcg64& rng) const;

  // Markov path on a strictly increasing grid (first time may be 0, which
  // pins the start). The driving uniforms act on the unit-sigma process, so
  // the output scales bit-exactly: path(beta, sigma) = sigma * path(beta, 1).
  std::vector<double> sample_path(const std::vector<double>& times,
                                  std::uint64_t seed, std::uint64_t stream) const;

  // Discrete approximation by excursion flipping: run an n-step simple
  // random walk, reflect it, and give every excursion away from 0 a fresh
  // sign (+ with probability (1+beta)/2). One sign uniform is consumed per
  // excursion start, including the final one cut off at the horizon, so
  // beta = 1 reproduces the reflected walk and beta = -1 its exact negation.
  // Times are fractions of the n-step horizon in [0, 1]; values are scaled
  // by sigma / sqrt(n). Streams 2*stream and 2*stream+1 drive the steps and
  // the signs.
  std::vector<double> flip_path(std::int64_t n, const std::vector<double>& times,
                                std::uint64_t seed, std::uint64_t stream) const;

 private:
  double beta_;
  double sigma_;
};

}  // namespace mwl
