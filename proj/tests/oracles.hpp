#ifndef MFSPEC_TESTS_ORACLES_HPP
#define MFSPEC_TESTS_ORACLES_HPP

// Slow reference computations used only by the tests. None of them share
// code with the library kernels.

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "mfspec/measure.hpp"

namespace oracle {

// mu(e J) = p_e mu(J) + p_{e+l} mu(T J), read straight off the fixed-point
// equation; T J reverses every digit. Exponential in the depth.
inline long double mu(const mfspec::WeightSystem& ws, const std::vector<int>& w, std::size_t from = 0,
                      bool reflected = false) {
  if (from == w.size()) return 1.0L;
  const int l = ws.base();
  const int e = reflected ? l - 1 - w[from] : w[from];
  return static_cast<long double>(ws.p(e)) * mu(ws, w, from + 1, reflected) +
         static_cast<long double>(ws.p(e + l)) * mu(ws, w, from + 1, !reflected);
}

inline long double mu_t(const mfspec::WeightSystem& ws, const std::vector<int>& w) {
  return mu(ws, w, 0, true);
}

inline std::vector<int> digits_of(int base, int depth, std::uint64_t index) {
  std::vector<int> d(static_cast<std::size_t>(depth));
  for (int k = depth; k-- > 0;) {
    d[static_cast<std::size_t>(k)] = static_cast<int>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
  }
  return d;
}

inline std::uint64_t ipow(int b, int n) {
  std::uint64_t r = 1;
  for (int k = 0; k < n; ++k) r *= static_cast<std::uint64_t>(b);
  return r;
}

// Every leaf mass of depth n, by a naive long-double product of 2x2
// matrices per word (no sharing of prefixes, no rescaling).
inline std::vector<long double> leaf_masses(const mfspec::WeightSystem& ws, int n, bool nu = false) {
  const int l = ws.base();
  std::vector<long double> out;
  out.reserve(ipow(l, n));
  for (std::uint64_t idx = 0; idx < ipow(l, n); ++idx) {
    long double a = nu ? 0.5L : 1.0L;
    long double b = nu ? 0.5L : 0.0L;
    for (int e : digits_of(l, n, idx)) {
      const long double m00 = ws.p(e), m01 = ws.p(e + l), m10 = ws.p(2 * l - 1 - e), m11 = ws.p(l - 1 - e);
      const long double na = a * m00 + b * m10;
      const long double nb = a * m01 + b * m11;
      a = na;
      b = nb;
    }
    out.push_back(a + b);
  }
  return out;
}

// tau_n(q) from explicit leaf masses.
inline double tau_n(const std::vector<long double>& masses, int base, int n, double q) {
  long double hi = -std::numeric_limits<long double>::infinity();
  for (long double m : masses) {
    if (m > 0) hi = std::max(hi, q * std::log(m));
  }
  long double s = 0;
  for (long double m : masses) {
    if (m > 0) s += std::exp(q * std::log(m) - hi);
  }
  return static_cast<double>((hi + std::log(s)) / (n * std::log(static_cast<long double>(base))));
}

// inf_q (alpha q + tau(q)) over a dense uniform grid.
inline double legendre_grid(const std::function<double(double)>& tau, double alpha, double qLo = -200.0,
                            double qHi = 200.0, int points = 400001) {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < points; ++k) {
    const double q = qLo + (qHi - qLo) * k / (points - 1);
    best = std::min(best, alpha * q + tau(q));
  }
  return best;
}

// Sign changes of g on a uniform grid, located by linear interpolation.
inline std::vector<double> sign_changes(const std::function<double(double)>& g, double lo, double hi,
                                        int points) {
  std::vector<double> roots;
  double qPrev = lo;
  double gPrev = g(lo);
  for (int k = 1; k < points; ++k) {
    const double q = lo + (hi - lo) * k / (points - 1);
    const double gq = g(q);
    if ((gPrev < 0) != (gq < 0)) roots.push_back(qPrev - gPrev * (q - qPrev) / (gq - gPrev));
    qPrev = q;
    gPrev = gq;
  }
  return roots;
}

}  // namespace oracle

#endif  // MFSPEC_TESTS_ORACLES_HPP
