#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"

namespace mwl {

struct Atom {
  std::int64_t value;
  double prob;
};

// Finite probability mass function on the integers. Atoms are kept sorted by
// value; construction validates strict positivity, uniqueness and that the
// probabilities sum to 1 within 1e-12. Sampling is O(1) via an alias table.
class IntegerPMF {
 public:
  explicit IntegerPMF(std::vector<Atom> atoms);

  static IntegerPMF from_pairs(
      const std::vector<std::pair<std::int64_t, double>>& pairs);

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }

  double prob(std::int64_t value) const;
  double mean() const { return mean_; }
  double variance() const { return variance_; }
  double abs_mean() const { return abs_mean_; }
  std::int64_t min_value() const { return atoms_.front().value; }
  std::int64_t max_value() const { return atoms_.back().value; }
  std::int64_t max_abs_value() const;

  std::int64_t sample(Pcg64& rng) const;

  struct Truncation;

  // Removes the largest symmetric tail whose total removed mass stays
  // strictly below eps and renormalizes the rest; ties resolve toward
  // keeping mass, so a pmf whose edge atoms carry mass >= eps is returned
  // unchanged with lost_mass = 0.
  Truncation truncate_tail(double eps) const;

  // Negated distribution (atoms mirrored through 0).
  IntegerPMF negated() const;

 private:
  std::vector<Atom> atoms_;
  double mean_ = 0.0;
  double variance_ = 0.0;
  double abs_mean_ = 0.0;
  // alias table
  std::vector<double> cut_;
  std::vector<std::uint32_t> alias_;

  void build_alias();
};

struct IntegerPMF::Truncation {
  IntegerPMF pmf;
  double lost_mass;
};

struct StepLaw {
  IntegerPMF pmf;
  double sigma2;
};

// Checks the requirements on the step law outside the membrane of half-width
// m: zero mean within 1e-12, positive variance, and support contained in
// [-(2m+1), 2m+1] so a single step can never jump across the membrane.
StepLaw validate_step_law(const IntegerPMF& pmf, std::int64_t m);

}  // namespace mwl
