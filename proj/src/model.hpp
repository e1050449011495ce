#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "pmf.hpp"

namespace mwl {

// Random walk on the integers with i.i.d. steps xi outside the membrane
// A = {center-m, ..., center+m} and state-dependent jump increments eta_j
// from each membrane site (offset j in [-m, m] relative to the center):
// X(k) = X(k-1) + xi_k outside A, X(k) = X(k-1) + eta_j when X(k-1) = center+j.
class WalkModel {
 public:
  WalkModel(std::int64_t m, IntegerPMF xi, std::vector<IntegerPMF> eta,
            std::int64_t start, std::int64_t center = 0);

  static WalkModel from_json(const nlohmann::json& j);
  static WalkModel from_json_text(const std::string& text);
  nlohmann::json to_json() const;

  std::int64_t m() const { return m_; }
  std::int64_t center() const { return center_; }
  std::int64_t start() const { return start_; }
  const IntegerPMF& xi() const { return xi_; }
  // Jump law for membrane offset j in [-m, m].
  const IntegerPMF& eta(std::int64_t j) const {
    return eta_[static_cast<std::size_t>(j + m_)];
  }
  const std::vector<IntegerPMF>& eta_all() const { return eta_; }
  double sigma2() const { return sigma2_; }

  bool inside(std::int64_t x) const {
    return x >= center_ - m_ && x <= center_ + m_;
  }
  std::int64_t max_abs_eta() const;

  // Mirror image through the membrane center: xi and every eta negated,
  // membrane offsets relabelled j -> -j, start reflected.
  WalkModel mirrored() const;
  // Same dynamics with the membrane (and start) translated by delta.
  WalkModel translated(std::int64_t delta) const;

 private:
  std::int64_t m_;
  std::int64_t center_;
  std::int64_t start_;
  IntegerPMF xi_;
  std::vector<IntegerPMF> eta_;  // index j + m
  double sigma2_;
};

struct IrreducibilityReport {
  bool irreducible = false;
  // On failure, a pair of states with no path witness_from -> witness_to.
  std::int64_t witness_from = 0;
  std::int64_t witness_to = 0;
  std::string reason;
};

// Reachability analysis on the band of states around the membrane: the
// closure of A must have a unique terminal communicating class that both
// meets A and escapes it. Models failing this have an absorbing or
// non-returning structure for which the embedded chain degenerates.
IrreducibilityReport is_irreducible(const WalkModel& model);

}  // namespace mwl
