#include "mfspec/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <limits>

#include "mfspec/error.hpp"

namespace mfspec {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kAtomMergeTol = 1e-14;
constexpr double kEndpointTol = 1e-12;

// Shortest decimal that reads back as the same double.
std::string shortest(double x) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

}  // namespace

ClosedFormTau::ClosedFormTau(int base, double offset, std::vector<Atom> atoms)
    : base_(base), offset_(offset), logBase_(std::log(static_cast<double>(base))) {
  if (base < 2) throw Error(ErrorCode::InvalidArgument, "base must be >= 2");
  for (const Atom& a : atoms) {
    if (!(a.value > 0.0) || !std::isfinite(a.value) || !(a.multiplicity > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "atoms need value > 0 and multiplicity > 0");
    }
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& x, const Atom& y) { return x.value > y.value; });
  for (const Atom& a : atoms) {
    if (!atoms_.empty() &&
        std::abs(atoms_.back().value - a.value) <= kAtomMergeTol * atoms_.back().value) {
      atoms_.back().multiplicity += a.multiplicity;
    } else {
      atoms_.push_back(a);
    }
  }
}

double ClosedFormTau::operator()(double q) const {
  if (atoms_.empty()) return kNegInf;
  double hi = kNegInf;
  for (const Atom& a : atoms_) hi = std::max(hi, std::log(a.multiplicity) + q * std::log(a.value));
  double s = 0.0;
  for (const Atom& a : atoms_) s += std::exp(std::log(a.multiplicity) + q * std::log(a.value) - hi);
  return offset_ + (hi + std::log(s)) / logBase_;
}

double ClosedFormTau::derivative(double q) const {
  if (atoms_.empty()) return 0.0;
  double hi = kNegInf;
  for (const Atom& a : atoms_) hi = std::max(hi, std::log(a.multiplicity) + q * std::log(a.value));
  double s = 0.0;
  double ws = 0.0;
  for (const Atom& a : atoms_) {
    const double w = std::exp(std::log(a.multiplicity) + q * std::log(a.value) - hi);
    s += w;
    ws += w * std::log(a.value);
  }
  return ws / s / logBase_;
}

double ClosedFormTau::second_derivative(double q) const {
  if (atoms_.size() < 2) return 0.0;
  double hi = kNegInf;
  for (const Atom& a : atoms_) hi = std::max(hi, std::log(a.multiplicity) + q * std::log(a.value));
  double s = 0.0;
  double ws = 0.0;
  for (const Atom& a : atoms_) {
    const double w = std::exp(std::log(a.multiplicity) + q * std::log(a.value) - hi);
    s += w;
    ws += w * std::log(a.value);
  }
  const double mean = ws / s;
  double var = 0.0;
  for (const Atom& a : atoms_) {
    const double w = std::exp(std::log(a.multiplicity) + q * std::log(a.value) - hi);
    const double d = std::log(a.value) - mean;
    var += w * d * d;
  }
  return var / s / logBase_;
}

double ClosedFormTau::slope_at_plus_infinity() const {
  if (atoms_.empty()) return 0.0;
  return std::log(atoms_.front().value) / logBase_;
}

double ClosedFormTau::slope_at_minus_infinity() const {
  if (atoms_.empty()) return 0.0;
  return std::log(atoms_.back().value) / logBase_;
}

std::string ClosedFormTau::formula() const {
  if (atoms_.empty()) return "-inf";
  std::string out;
  if (offset_ != 0.0) out += shortest(offset_) + " + ";
  out += "log_" + std::to_string(base_) + "(";
  for (std::size_t j = 0; j < atoms_.size(); ++j) {
    if (j > 0) out += " + ";
    if (atoms_[j].multiplicity != 1.0) out += shortest(atoms_[j].multiplicity) + "*";
    out += shortest(atoms_[j].value) + "^q";
  }
  return out + ")";
}

TauCurve TauCurve::sample(const ClosedFormTau& tau, std::span<const double> qGrid) {
  TauCurve c;
  c.qGrid.assign(qGrid.begin(), qGrid.end());
  c.values.reserve(qGrid.size());
  c.derivs.reserve(qGrid.size());
  for (double q : qGrid) {
    c.values.push_back(tau(q));
    c.derivs.push_back(tau.derivative(q));
  }
  c.provenance = CurveProvenance::ClosedForm;
  return c;
}

bool is_discretely_convex(const TauCurve& curve, double tol) {
  const auto& q = curve.qGrid;
  const auto& v = curve.values;
  for (std::size_t k = 1; k + 1 < q.size(); ++k) {
    const double left = (v[k] - v[k - 1]) / (q[k] - q[k - 1]);
    const double right = (v[k + 1] - v[k]) / (q[k + 1] - q[k]);
    if (right - left < -tol) return false;
  }
  return true;
}

std::optional<double> legendre_argmin(const ClosedFormTau& tau, double alpha) {
  if (tau.atoms().size() < 2) return std::nullopt;
  const double lo_alpha = -tau.slope_at_plus_infinity();
  const double hi_alpha = -tau.slope_at_minus_infinity();
  if (!(alpha > lo_alpha && alpha < hi_alpha)) return std::nullopt;

  // h(q) = tau'(q) + alpha is increasing; its root is the minimizer.
  auto h = [&](double q) { return tau.derivative(q) + alpha; };
  constexpr double kCap = 1e12;
  double lo = -1.0;
  double hi = 1.0;
  while (h(lo) > 0.0) {
    lo *= 2.0;
    if (lo < -kCap) return std::nullopt;
  }
  while (h(hi) < 0.0) {
    hi *= 2.0;
    if (hi > kCap) return std::nullopt;
  }
  double q = 0.5 * (lo + hi);
  for (int iter = 0; iter < 400; ++iter) {
    const double hq = h(q);
    if (hq == 0.0) return q;
    if (hq < 0.0) {
      lo = q;
    } else {
      hi = q;
    }
    if (hi - lo <= 1e-13 * std::max(1.0, std::abs(q))) break;
    const double d2 = tau.second_derivative(q);
    double next = d2 > 0.0 ? q - hq / d2 : lo - 1.0;
    if (!(next > lo && next < hi)) {
      next = 0.5 * (lo + hi);
    } else if (std::abs(next - q) <= 1e-13 * std::max(1.0, std::abs(q))) {
      return next;
    }
    q = next;
  }
  return q;
}

double legendre(const ClosedFormTau& tau, double alpha) {
  if (tau.is_negative_infinity()) return kNegInf;
  const auto atoms = tau.atoms();
  const double logBase = std::log(static_cast<double>(tau.base()));
  if (tau.is_linear()) {
    const double a0 = -tau.slope_at_plus_infinity();
    if (std::abs(alpha - a0) <= kEndpointTol * std::max(1.0, std::abs(a0))) {
      return tau.offset() + std::log(atoms.front().multiplicity) / logBase;
    }
    return kNegInf;
  }
  const double lo_alpha = -tau.slope_at_plus_infinity();
  const double hi_alpha = -tau.slope_at_minus_infinity();
  const double lo_value = tau.offset() + std::log(atoms.front().multiplicity) / logBase;
  const double hi_value = tau.offset() + std::log(atoms.back().multiplicity) / logBase;
  if (std::abs(alpha - lo_alpha) <= kEndpointTol * std::max(1.0, std::abs(lo_alpha))) return lo_value;
  if (std::abs(alpha - hi_alpha) <= kEndpointTol * std::max(1.0, std::abs(hi_alpha))) return hi_value;
  if (alpha < lo_alpha || alpha > hi_alpha) return kNegInf;
  const auto q = legendre_argmin(tau, alpha);
  if (!q) {
    // Numerically indistinguishable from an endpoint.
    return (alpha - lo_alpha < hi_alpha - alpha) ? lo_value : hi_value;
  }
  return alpha * *q + tau(*q);
}

std::vector<double> legendre_curve(const ClosedFormTau& tau, std::span<const double> alphas) {
  std::vector<double> out;
  out.reserve(alphas.size());
  for (double a : alphas) out.push_back(legendre(tau, a));
  return out;
}

double legendre(const TauCurve& curve, double alpha) {
  if (curve.qGrid.empty()) return kNegInf;
  if (!is_discretely_convex(curve)) {
    throw Error(ErrorCode::NonConvexInput, "sampled tau fails the discrete convexity test");
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < curve.qGrid.size(); ++k) {
    best = std::min(best, alpha * curve.qGrid[k] + curve.values[k]);
  }
  return best;
}

std::vector<double> legendre_curve(const TauCurve& curve, std::span<const double> alphas) {
  if (!is_discretely_convex(curve)) {
    throw Error(ErrorCode::NonConvexInput, "sampled tau fails the discrete convexity test");
  }
  std::vector<double> out;
  out.reserve(alphas.size());
  for (double a : alphas) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < curve.qGrid.size(); ++k) {
      best = std::min(best, a * curve.qGrid[k] + curve.values[k]);
    }
    out.push_back(best);
  }
  return out;
}

}  // namespace mfspec
