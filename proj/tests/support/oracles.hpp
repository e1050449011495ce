#pragma once

// Independent reference implementations used only by tests. Everything here
// recomputes results from first principles (definitions and brute force)
// rather than calling back into the code paths under test.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "model.hpp"
#include "rng.hpp"
#include "walk.hpp"

namespace oracle {

// ---------------------------------------------------------------------------
// Absorption-probability value iteration for the re-entry kernel.
//
// States y = m+1 .. band, absorbing states -m .. m. Mass stepping above the
// band is clamped to the band edge. H_k(y, i) = P{absorbed at i within k
// steps} satisfies H_{2k} = H_k + Q^k H_k with Q^{2k} = (Q^k)^2, so matrix
// doubling runs the value iteration 2^j steps at a time; the remaining
// transient mass (max row sum of Q^k) certifies the distance to the fixed
// point.
// ---------------------------------------------------------------------------
struct ViKernel {
  std::vector<std::vector<double>> rows;  // row[y-m-1][i+m]
  double residual = 1.0;                  // transient mass left at stop
};

inline ViKernel vi_kernel(const mwl::IntegerPMF& xi, std::int64_t m,
                          std::int64_t band, double tol = 1e-13) {
  const std::size_t S = static_cast<std::size_t>(band - m);
  const std::size_t W = static_cast<std::size_t>(2 * m + 1);
  std::int64_t g = 0;  // step lattice gcd
  for (const auto& a : xi.atoms()) g = std::gcd(g, a.value);
  if (g == 0) g = 1;
  std::vector<double> Q(S * S, 0.0), H(S * W, 0.0);
  for (std::size_t r = 0; r < S; ++r) {
    const std::int64_t y = m + 1 + static_cast<std::int64_t>(r);
    for (const auto& a : xi.atoms()) {
      std::int64_t tgt = y + a.value;
      if (tgt < -m) throw std::logic_error("step jumped over the membrane");
      // overflow drops to the top in-band state of its residue class mod g
      if (tgt > band) tgt -= ((tgt - band + g - 1) / g) * g;
      if (tgt <= m) {
        H[r * W + static_cast<std::size_t>(tgt + m)] += a.prob;
      } else {
        Q[r * S + static_cast<std::size_t>(tgt - m - 1)] += a.prob;
      }
    }
  }

  std::vector<double> QH(S * W), QQ(S * S);
  ViKernel out;
  for (int iter = 0; iter < 64; ++iter) {
    out.residual = 0.0;
    for (std::size_t r = 0; r < S; ++r) {
      double row = 0.0;
      for (std::size_t c = 0; c < S; ++c) row += Q[r * S + c];
      out.residual = std::max(out.residual, row);
    }
    if (out.residual <= tol) break;

    std::fill(QH.begin(), QH.end(), 0.0);
    for (std::size_t r = 0; r < S; ++r)
      for (std::size_t k = 0; k < S; ++k) {
        const double q = Q[r * S + k];
        if (q == 0.0) continue;
        for (std::size_t c = 0; c < W; ++c) QH[r * W + c] += q * H[k * W + c];
      }
    for (std::size_t idx = 0; idx < S * W; ++idx) H[idx] += QH[idx];

    std::fill(QQ.begin(), QQ.end(), 0.0);
    for (std::size_t r = 0; r < S; ++r)
      for (std::size_t k = 0; k < S; ++k) {
        const double q = Q[r * S + k];
        if (q == 0.0) continue;
        const double* src = &Q[k * S];
        double* dst = &QQ[r * S];
        for (std::size_t c = 0; c < S; ++c) dst[c] += q * src[c];
      }
    Q.swap(QQ);
  }

  out.rows.resize(S);
  for (std::size_t r = 0; r < S; ++r)
    out.rows[r].assign(H.begin() + static_cast<std::ptrdiff_t>(r * W),
                       H.begin() + static_cast<std::ptrdiff_t>((r + 1) * W));
  return out;
}

// ---------------------------------------------------------------------------
// Naive walk interpreter: replays the defining recursion with its own loop.
// X(k) = X(k-1) + eta_{X(k-1)-center} inside the membrane, + xi outside.
// ---------------------------------------------------------------------------
inline std::vector<std::int64_t> naive_walk(const mwl::WalkModel& model,
                                            std::int64_t n, std::uint64_t seed,
                                            std::uint64_t stream) {
  mwl::Pcg64 rng(seed, stream);
  std::vector<std::int64_t> xs;
  xs.reserve(static_cast<std::size_t>(n) + 1);
  xs.push_back(model.start());
  for (std::int64_t k = 1; k <= n; ++k) {
    const std::int64_t x = xs.back();
    const std::int64_t d = model.inside(x)
                               ? model.eta(x - model.center()).sample(rng)
                               : model.xi().sample(rng);
    xs.push_back(x + d);
  }
  return xs;
}

// ---------------------------------------------------------------------------
// Literal ledger: every path functional recomputed by explicit scans over
// the whole path, following the definitions (visit times alpha_k, crossing
// times tau/sigma, two-case rho).
// ---------------------------------------------------------------------------
struct Ledger {
  std::int64_t M_plus = 0, M_minus = 0;
  std::int64_t L_plus = 0, L_minus = 0;
  std::int64_t nu = 0;
  std::int64_t occ_plus = 0, occ_minus = 0;
  std::int64_t residual_plus = 0, residual_minus = 0;
  std::int64_t rho_plus_sum = 0, rho_minus_sum = 0;
  std::int64_t cycles = 0;
  std::int64_t excursions_pos = 0, excursions_neg = 0;
  std::vector<std::int64_t> rho_plus, rho_minus;
};

inline Ledger ledger(const std::vector<std::int64_t>& xs, std::int64_t m,
                     std::int64_t center) {
  const std::int64_t n = static_cast<std::int64_t>(xs.size()) - 1;
  auto xc = [&](std::int64_t k) { return xs[static_cast<std::size_t>(k)] - center; };
  Ledger out;

  for (std::int64_t k = 0; k <= n; ++k)
    if (std::llabs(xc(k)) <= m) ++out.nu;

  for (std::int64_t k = 1; k <= n; ++k) {
    const std::int64_t prev = xc(k - 1);
    if (prev > m) {
      out.M_plus += xc(k) - prev;
      ++out.occ_plus;
    } else if (prev < -m) {
      out.M_minus -= xc(k) - prev;
      ++out.occ_minus;
    }
  }

  // Membrane visit times; a start inside A counts as the first visit.
  // Cycle k pairs alpha_k with alpha_{k+1}.
  std::vector<std::int64_t> alphas;
  for (std::int64_t k = 0; k <= n; ++k)
    if (std::llabs(xc(k)) <= m) alphas.push_back(k);
  for (std::size_t k = 0; k + 1 < alphas.size(); ++k) {
    const std::int64_t yk = xc(alphas[k]);
    const std::int64_t yk1 = xc(alphas[k + 1]);
    const std::int64_t post = xc(alphas[k] + 1);
    const std::int64_t rp = (post <= m) ? (yk1 - yk) : (post - yk);
    const std::int64_t rm = (-post <= m) ? -(yk1 - yk) : -(post - yk);
    out.rho_plus_sum += rp;
    out.rho_minus_sum += rm;
    out.rho_plus.push_back(rp);
    out.rho_minus.push_back(rm);
    ++out.cycles;
  }

  // One-sided crossing scans. An entry jump adds (entry value - last exit
  // value on that side); a side that starts outside contributes no entry
  // term for its initial excursion.
  const std::int64_t x0 = xc(0);
  for (int sign : {+1, -1}) {
    bool high = sign * x0 > m;
    std::int64_t tau_val = x0;  // signed value at the last re-entry
    std::int64_t L = 0, completed = 0;
    for (std::int64_t k = 1; k <= n; ++k) {
      const std::int64_t v = xc(k);
      if (!high && sign * v > m) {
        L += sign * (v - tau_val);
        high = true;
      } else if (high && sign * v <= m) {
        high = false;
        tau_val = v;
        ++completed;
      }
    }
    const std::int64_t resid = high ? -x0 : tau_val - x0;
    if (sign > 0) {
      out.L_plus = L;
      out.excursions_pos = completed;
      out.residual_plus = resid;
    } else {
      out.L_minus = L;
      out.excursions_neg = completed;
      out.residual_minus = resid;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Composite Simpson quadrature; n subintervals (even). Integrands with a
// kink are integrated piecewise by the caller.
// ---------------------------------------------------------------------------
inline double simpson(const std::function<double(double)>& f, double a,
                      double b, int n = 4000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

// ---------------------------------------------------------------------------
// Random model generators. Zero-mean step laws mix balanced pairs
// (-a w.p. b/(a+b), +b w.p. a/(a+b)), each exactly centered in rationals, so
// the double-precision mean sits within a few ulps of zero.
// ---------------------------------------------------------------------------
inline mwl::IntegerPMF zero_mean_pmf(mwl::Pcg64& rng, std::int64_t max_abs,
                                     bool allow_zero_atom = false) {
  const int n_pairs = 1 + static_cast<int>(rng.bounded(2));
  std::map<std::int64_t, double> mass;
  double total = 0.0;
  for (int p = 0; p < n_pairs; ++p) {
    const double w = 1.0 + static_cast<double>(rng.bounded(4));
    const auto a = static_cast<std::int64_t>(1 + rng.bounded(static_cast<std::uint64_t>(max_abs)));
    const auto b = static_cast<std::int64_t>(1 + rng.bounded(static_cast<std::uint64_t>(max_abs)));
    const double denom = static_cast<double>(a + b);
    mass[-a] += w * static_cast<double>(b) / denom;
    mass[b] += w * static_cast<double>(a) / denom;
    total += w;
  }
  if (allow_zero_atom && rng.bounded(2) == 0) {
    const double w = 1.0 + static_cast<double>(rng.bounded(3));
    mass[0] += w;
    total += w;
  }
  std::vector<mwl::Atom> atoms;
  for (const auto& [v, p] : mass) atoms.push_back({v, p / total});
  return mwl::IntegerPMF(std::move(atoms));
}

inline mwl::IntegerPMF random_pmf(mwl::Pcg64& rng, std::int64_t lo,
                                  std::int64_t hi, int max_atoms) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  const int want = 1 + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(max_atoms)));
  std::map<std::int64_t, double> mass;
  double total = 0.0;
  while (static_cast<int>(mass.size()) < want) {
    const std::int64_t v = lo + static_cast<std::int64_t>(rng.bounded(span));
    const double w = 1.0 + static_cast<double>(rng.bounded(8));
    mass[v] += w;
    total += w;
  }
  std::vector<mwl::Atom> atoms;
  for (const auto& [v, p] : mass) atoms.push_back({v, p / total});
  return mwl::IntegerPMF(std::move(atoms));
}

// A random valid model; zero_mean_eta additionally centers every membrane
// law. Rejection keeps only irreducible models whose membrane is actually
// left with positive probability.
inline mwl::WalkModel random_model(mwl::Pcg64& rng, std::int64_t max_m,
                                   bool zero_mean_eta, int max_eta_atoms = 7,
                                   std::int64_t eta_span = 6) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const auto m = static_cast<std::int64_t>(rng.bounded(static_cast<std::uint64_t>(max_m) + 1));
    mwl::IntegerPMF xi = zero_mean_pmf(rng, 2 * m + 1);
    std::vector<mwl::IntegerPMF> etas;
    bool exits = false;
    for (std::int64_t j = -m; j <= m; ++j) {
      mwl::IntegerPMF eta = zero_mean_eta
                                ? zero_mean_pmf(rng, eta_span, true)
                                : random_pmf(rng, -eta_span, eta_span, max_eta_atoms);
      for (const auto& a : eta.atoms())
        if (std::llabs(j + a.value) > m) exits = true;
      etas.push_back(std::move(eta));
    }
    if (!exits) continue;
    mwl::WalkModel model(m, std::move(xi), std::move(etas), 0, 0);
    if (mwl::is_irreducible(model).irreducible) return model;
  }
  throw std::runtime_error("no irreducible model found in 1000 attempts");
}

// Runs f and reports the ErrorCode it failed with (Ok if it returned).
template <class F>
inline mwl::ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const mwl::Error& e) {
    return e.code();
  }
  return mwl::ErrorCode::Ok;
}

}  // namespace oracle
