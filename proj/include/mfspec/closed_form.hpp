#ifndef MFSPEC_CLOSED_FORM_HPP
#define MFSPEC_CLOSED_FORM_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mfspec {

struct Atom {
  double value;         // a_j in (0, 1]
  double multiplicity;  // m_j > 0

  friend bool operator==(const Atom&, const Atom&) = default;
};

/// tau(q) = c + log_l( sum_j m_j a_j^q ).
///
/// Convex and real-analytic in q. Atoms whose values agree to 1e-14
/// (relative) are merged. An empty atom list is the constant -inf spectrum.
class ClosedFormTau {
 public:
  ClosedFormTau(int base, double offset, std::vector<Atom> atoms);
  static ClosedFormTau negative_infinity(int base) { return ClosedFormTau(base, 0.0, {}); }

  int base() const noexcept { return base_; }
  double offset() const noexcept { return offset_; }
  std::span<const Atom> atoms() const noexcept { return atoms_; }
  bool is_negative_infinity() const noexcept { return atoms_.empty(); }
  /// A single distinct atom makes tau affine in q.
  bool is_linear() const noexcept { return atoms_.size() == 1; }

  double operator()(double q) const;
  double derivative(double q) const;
  double second_derivative(double q) const;

  /// lim tau'(q) as q -> +inf, i.e. log_l(max a_j).
  double slope_at_plus_infinity() const;
  /// lim tau'(q) as q -> -inf, i.e. log_l(min a_j).
  double slope_at_minus_infinity() const;

  /// Human-readable formula, e.g. "log_5(2*0.35^q + 2*0.14^q + 0.02^q)".
  std::string formula() const;

 private:
  int base_;
  double offset_;
  std::vector<Atom> atoms_;  // sorted by decreasing value
  double logBase_;
};

enum class CurveProvenance { ClosedForm, PartitionEstimate };

/// tau sampled on a strictly increasing grid.
struct TauCurve {
  std::vector<double> qGrid;
  std::vector<double> values;
  std::vector<double> derivs;  // empty when unknown
  std::vector<std::string> branches;  // empty when the curve has a single branch
  CurveProvenance provenance = CurveProvenance::ClosedForm;
  int depth = 0;  // partition depth when provenance is PartitionEstimate

  static TauCurve sample(const ClosedFormTau& tau, std::span<const double> qGrid);
};

/// Discrete second differences >= -tol on a possibly nonuniform grid.
bool is_discretely_convex(const TauCurve& curve, double tol = 1e-9);

/// tau*(alpha) = inf_q (alpha q + tau(q)), returned as an extended real
/// (-inf outside the slope range).
///
/// For two or more atoms the infimum is attained at the unique q with
/// -tau'(q) = alpha, found by Newton on the analytic derivative with a
/// bisection fallback; at the slope-range endpoints the limiting value
/// c + log_l(multiplicity of the extreme atom) is returned. For a single atom
/// the conjugate is finite only at alpha = -log_l(a).
double legendre(const ClosedFormTau& tau, double alpha);
std::vector<double> legendre_curve(const ClosedFormTau& tau, std::span<const double> alphas);

/// Minimizer q* of alpha q + tau(q); nullopt when alpha is outside the open
/// slope range.
std::optional<double> legendre_argmin(const ClosedFormTau& tau, double alpha);

/// Discrete conjugate min_k (alpha q_k + tau_k) of a sampled convex curve.
/// Throws NonConvexInput when the samples fail the convexity test.
double legendre(const TauCurve& curve, double alpha);
std::vector<double> legendre_curve(const TauCurve& curve, std::span<const double> alphas);

}  // namespace mfspec

#endif  // MFSPEC_CLOSED_FORM_HPP
