#include "pmf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mwl {

namespace {

double kahan_sum(const std::vector<Atom>& atoms, double (*term)(const Atom&)) {
  double s = 0.0, c = 0.0;
  for (const auto& a : atoms) {
    double y = term(a) - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

}  // namespace

IntegerPMF::IntegerPMF(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) fail(ErrorCode::InvalidPMF, "pmf has no atoms");
  std::sort(atoms_.begin(), atoms_.end(),
            [](const Atom& a, const Atom& b) { return a.value < b.value; });
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const Atom& a = atoms_[i];
    if (!(a.prob > 0.0) || !std::isfinite(a.prob))
      fail(ErrorCode::InvalidPMF, "pmf probability must be finite and > 0 (value " +
                                      std::to_string(a.value) + ")");
    if (i > 0 && atoms_[i - 1].value == a.value)
      fail(ErrorCode::InvalidPMF,
           "duplicate pmf value " + std::to_string(a.value));
  }
  double total = kahan_sum(atoms_, [](const Atom& a) { return a.prob; });
  if (std::abs(total - 1.0) > 1e-12)
    fail(ErrorCode::InvalidPMF, "pmf probabilities sum to " +
                                    std::to_string(total) +
                                    ", not 1 within 1e-12");
  mean_ = kahan_sum(atoms_, [](const Atom& a) {
    return a.prob * static_cast<double>(a.value);
  });
  abs_mean_ = kahan_sum(atoms_, [](const Atom& a) {
    return a.prob * std::abs(static_cast<double>(a.value));
  });
  double m = mean_;
  double var = 0.0, c = 0.0;
  for (const auto& a : atoms_) {
    double d = static_cast<double>(a.value) - m;
    double y = a.prob * d * d - c;
    double t = var + y;
    c = (t - var) - y;
    var = t;
  }
  variance_ = var;
  build_alias();
}

IntegerPMF IntegerPMF::from_pairs(
    const std::vector<std::pair<std::int64_t, double>>& pairs) {
  std::vector<Atom> atoms;
  atoms.reserve(pairs.size());
  for (const auto& [v, p] : pairs) atoms.push_back({v, p});
  return IntegerPMF(std::move(atoms));
}

double IntegerPMF::prob(std::int64_t value) const {
  auto it = std::lower_bound(
      atoms_.begin(), atoms_.end(), value,
      [](const Atom& a, std::int64_t v) { return a.value < v; });
  if (it != atoms_.end() && it->value == value) return it->prob;
  return 0.0;
}

std::int64_t IntegerPMF::max_abs_value() const {
  return std::max(std::abs(min_value()), std::abs(max_value()));
}

void IntegerPMF::build_alias() {
  const std::size_t k = atoms_.size();
  cut_.assign(k, 1.0);
  alias_.assign(k, 0);
  std::vector<double> scaled(k);
  for (std::size_t i = 0; i < k; ++i)
    scaled[i] = atoms_[i].prob * static_cast<double>(k);
  std::vector<std::uint32_t> small, large;
  small.reserve(k);
  large.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (scaled[i] < 1.0)
      small.push_back(static_cast<std::uint32_t>(i));
    else
      large.push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    std::uint32_t s = small.back();
    small.pop_back();
    std::uint32_t l = large.back();
    cut_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] -= 1.0 - scaled[s];
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (std::uint32_t i : large) cut_[i] = 1.0;
  for (std::uint32_t i : small) cut_[i] = 1.0;  // numerical leftovers
}

std::int64_t IntegerPMF::sample(Pcg64& rng) const {
  std::size_t i = static_cast<std::size_t>(rng.bounded(atoms_.size()));
  double u = rng.uniform();
  return u < cut_[i] ? atoms_[i].value : atoms_[alias_[i]].value;
}

IntegerPMF::Truncation IntegerPMF::truncate_tail(double eps) const {
  if (!(eps >= 0.0) || !std::isfinite(eps))
    fail(ErrorCode::InvalidParameter, "truncation eps must be finite and >= 0");
  std::size_t lo = 0, hi = atoms_.size() - 1;
  double lost = 0.0, comp = 0.0;
  auto add = [&](double p) {
    double y = p - comp;
    double t = lost + y;
    comp = (t - lost) - y;
    lost = t;
  };
  while (lo < hi) {
    const Atom& a = atoms_[lo];
    const Atom& b = atoms_[hi];
    bool lo_fits = lost + a.prob < eps;
    bool hi_fits = lost + b.prob < eps;
    if (!lo_fits && !hi_fits) break;
    bool drop_hi;
    if (lo_fits && hi_fits) {
      if (a.prob != b.prob)
        drop_hi = b.prob < a.prob;
      else
        drop_hi = std::abs(b.value) >= std::abs(a.value);
    } else {
      drop_hi = hi_fits;
    }
    if (drop_hi) {
      add(b.prob);
      --hi;
    } else {
      add(a.prob);
      ++lo;
    }
  }
  std::vector<Atom> kept(atoms_.begin() + static_cast<std::ptrdiff_t>(lo),
                         atoms_.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
  if (lost > 0.0) {
    double scale = 1.0 / (1.0 - lost);
    for (auto& a : kept) a.prob *= scale;
  }
  return Truncation{IntegerPMF(std::move(kept)), lost};
}

IntegerPMF IntegerPMF::negated() const {
  std::vector<Atom> neg(atoms_.rbegin(), atoms_.rend());
  for (auto& a : neg) a.value = -a.value;
  return IntegerPMF(std::move(neg));
}

StepLaw validate_step_law(const IntegerPMF& pmf, std::int64_t m) {
  if (m < 0) fail(ErrorCode::InvalidParameter, "membrane half-width must be >= 0");
  if (std::abs(pmf.mean()) > 1e-12)
    fail(ErrorCode::NonZeroMean, "step law mean is " + std::to_string(pmf.mean()) +
                                     ", expected 0 within 1e-12");
  if (!(pmf.variance() > 0.0))
    fail(ErrorCode::ZeroVariance, "step law variance must be positive");
  std::int64_t bound = 2 * m + 1;
  if (pmf.max_abs_value() > bound)
    fail(ErrorCode::JumpOverMembrane,
         "step law support reaches " + std::to_string(pmf.max_abs_value()) +
             ", beyond the membrane-crossing bound " + std::to_string(bound));
  return StepLaw{pmf, pmf.variance()};
}

}  // namespace mwl
