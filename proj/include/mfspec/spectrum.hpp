#ifndef MFSPEC_SPECTRUM_HPP
#define MFSPEC_SPECTRUM_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mfspec/closed_form.hpp"
#include "mfspec/measure.hpp"
#include "mfspec/partition.hpp"

namespace mfspec {

// ---------------------------------------------------------------------------
// Structure of the B set

/// Shape of K = union_{i in B} S_i(K).
enum class AttractorKind { Empty, Singleton, Cantor, FullInterval };

std::string_view to_string(AttractorKind k) noexcept;

struct BStructure {
  std::vector<int> b;      // digits i < l with p_{i+l} == 0 (exact test)
  std::vector<int> bStar;  // { l-1-i : i in B }, sorted
  AttractorKind kind = AttractorKind::Empty;

  bool overlaps_reflection() const;  // B and B* intersect
};

BStructure b_structure(const WeightSystem& ws);

// ---------------------------------------------------------------------------
// Closed-form branches

/// log_l( sum_{i in B} p_i^q ); the -inf spectrum when B is empty.
ClosedFormTau tau_tilde(const WeightSystem& ws);

/// Spectrum of nu = (mu + mu o T)/2 when nu is a multinomial measure.
///
/// Detection: nu is multinomial iff for every digit e the two column sums of
/// M_e agree, p_e + p_{2l-1-e} == p_{e+l} + p_{l-1-e} =: w_e (to 1e-12).
/// Then nu(I) = prod w_{e_i} and tau_nu(q) = log_l sum_e w_e^q.
std::optional<ClosedFormTau> tau_nu_closed(const WeightSystem& ws);

/// Spectrum of the self-similar measure carried by K with normalized
/// weights p_i / sum_B p. Throws EmptyB.
ClosedFormTau tau_pi(const WeightSystem& ws);

enum class QBClass { QBLower, QBUpper, NotQB };
std::string_view to_string(QBClass c) noexcept;

/// QBLower iff p_i < p_{l-1-i} for all i in B, QBUpper iff p_i > p_{l-1-i}
/// for all i in B, NotQB otherwise. Empty B is QBLower.
QBClass check_nu_qb(const WeightSystem& ws);

/// Empirical two-sided quasi-Bernoulli constant of nu:
/// max over |I|, |J| <= depth of max(nu(IJ) / (nu(I) nu(J)), its inverse).
double nu_qb_constant(const WeightSystem& ws, int depth);

struct TauBracket {
  double estimate;
  double lower;
  double upper;
  int depth;
  bool reliable;  // false when nu fails the (nuqb) criterion
};

/// tau_n(q) of nu at n = nMax, bracketed by
/// |tau(q) - tau_n(q)| <= (|q| ln C + ln 2 max(q, 0)) / (n ln l)
/// with C the empirical constant of nu_qb_constant.
TauBracket tau_nu_numeric(const WeightSystem& ws, double q, int nMax, const TreeConfig& cfg = {},
                          int qbDepth = 4);

// ---------------------------------------------------------------------------
// tau_mu = max(tau_nu, tau_tilde)

enum class Branch { Nu, Tilde };
std::string_view to_string(Branch b) noexcept;

struct TauMuOptions {
  /// Proceed when some p_i (i < l) vanishes; the max formula is then an
  /// extrapolation and results are labeled as such.
  bool forceHypothesis = false;
  /// Partition depth used for nu when it has no closed form (0 = automatic).
  int numericDepth = 0;
  TreeConfig tree = {};
};

/// Evaluates tau_mu as the pointwise max of its two branches. When nu is not
/// multinomial the nu branch is the depth-n partition estimate (flagged).
class TauMu {
 public:
  explicit TauMu(const WeightSystem& ws, const TauMuOptions& opts = {});

  double operator()(double q) const;
  double nu(double q) const;
  double tilde(double q) const { return tilde_(q); }
  double nu_derivative(double q) const;
  double tilde_derivative(double q) const { return tilde_.derivative(q); }
  /// Branch attaining the max; ties go to Nu.
  Branch active(double q) const;
  /// Derivative of the active branch (right derivative at a kink).
  double derivative(double q) const;

  bool nu_closed_form() const noexcept { return nuClosed_.has_value(); }
  const std::optional<ClosedFormTau>& nu_closed() const noexcept { return nuClosed_; }
  const ClosedFormTau& tilde_closed() const noexcept { return tilde_; }
  bool hypothesis_forced() const noexcept { return forced_; }
  int numeric_depth() const noexcept { return numericDepth_; }
  const WeightSystem& weights() const noexcept { return ws_; }

 private:
  WeightSystem ws_;
  std::optional<ClosedFormTau> nuClosed_;
  ClosedFormTau tilde_;
  TreeConfig tree_;
  int numericDepth_ = 0;
  bool forced_ = false;
};

double tau_mu(const WeightSystem& ws, double q, const TauMuOptions& opts = {});
TauCurve tau_mu_curve(const WeightSystem& ws, std::span<const double> qGrid,
                      const TauMuOptions& opts = {});

/// tau_mu*(alpha) = inf_q (alpha q + max(tau_nu, tau_tilde)(q)); requires a
/// closed-form nu branch.
double legendre_of_max(const ClosedFormTau& nu, const ClosedFormTau& tilde, double alpha);

// ---------------------------------------------------------------------------
// Phase transitions

struct PhaseTransition {
  double qStar;
  double leftSlope;   // tau'_-(qStar)
  double rightSlope;  // tau'_+(qStar)
  double alphaLo;     // -rightSlope
  double alphaHi;     // -leftSlope
};

struct ScanConfig {
  double qMin = -200.0;
  double qMax = 5.0;
  int gridPoints = 2000;
  double rootTolerance = 1e-12;
  /// Roots with |tau_nu' - tau_tilde'| at or below this are tangential.
  double transversality = 1e-9;
};

struct TransitionScan {
  std::vector<PhaseTransition> transitions;  // increasing qStar
  std::vector<double> tangencies;
  bool reducedPrecision = false;  // nu branch came from partition sums
};

/// Sign scan of g = tau_nu - tau_tilde on a uniform grid, refined by
/// bisection. Cells where g' changes sign are split at the critical point so
/// two roots inside one cell are still separated.
TransitionScan find_phase_transitions(const WeightSystem& ws, const ScanConfig& scan = {},
                                      const TauMuOptions& opts = {});

/// Same scan for two explicit closed-form branches.
TransitionScan find_phase_transitions(const ClosedFormTau& nu, const ClosedFormTau& tilde,
                                      const ScanConfig& scan = {});

// ---------------------------------------------------------------------------
// Dimension spectrum

/// Closed interval [lo, hi]; lo == hi is an isolated point.
struct DomainPiece {
  double lo;
  double hi;
  bool isolated() const noexcept { return lo == hi; }
};

struct SpectrumPoint {
  double alpha;
  double f;
  Branch branch;
};

/// alpha -> dim E_alpha(mu) = max(tau_nu*(alpha), tau_tilde*(alpha)) on
/// D_mu = D_nu u [-log_l max_B p, -log_l min_B p].
class DimensionSpectrum {
 public:
  DimensionSpectrum(ClosedFormTau nu, ClosedFormTau tilde);

  const std::vector<DomainPiece>& domain() const noexcept { return domain_; }
  bool contains(double alpha) const;
  /// -inf outside the domain.
  double operator()(double alpha) const;
  Branch branch(double alpha) const;
  /// Isolated points of the domain, in increasing order.
  std::vector<double> isolated_points() const;
  /// Samples each interval at `perInterval` evenly spaced points (endpoints
  /// included) and each isolated point once.
  std::vector<SpectrumPoint> sample(int perInterval = 201) const;

  const ClosedFormTau& nu() const noexcept { return nu_; }
  const ClosedFormTau& tilde() const noexcept { return tilde_; }

 private:
  bool in_nu_domain(double alpha) const;
  bool in_tilde_domain(double alpha) const;

  ClosedFormTau nu_;
  ClosedFormTau tilde_;
  DomainPiece nuDomain_{};
  std::optional<DomainPiece> tildeDomain_;
  std::vector<DomainPiece> domain_;
};

/// Requires B and B* disjoint, (nuqb) not NotQB and a closed-form tau_nu.
/// Throws HypothesisFailed naming the failed hypothesis.
DimensionSpectrum dimension_spectrum(const WeightSystem& ws, const TauMuOptions& opts = {});

struct ViolationInterval {
  double qStar;
  double alphaLo;
  double alphaHi;
  double gapAtMidpoint;
  double maxGap;
};

/// One open interval (-tau'_+(q*), -tau'_-(q*)) per transition with the gap
/// tau_mu*(alpha) - dim E_alpha(mu) sampled over it. An empty level set
/// counts as dimension 0.
std::vector<ViolationInterval> violation_intervals(const WeightSystem& ws,
                                                   const ScanConfig& scan = {},
                                                   const TauMuOptions& opts = {},
                                                   int samples = 64);

// ---------------------------------------------------------------------------
// Synthesis of systems with N transitions

struct SynthesisConfig {
  std::uint64_t seed = 1;
  int maxAttempts = 2'000'000;
  ScanConfig scan = {};
};

struct SynthesisResult {
  WeightSystem ws;
  std::uint64_t seed;
  int attempts;
  TransitionScan scan;
};

/// Builds the N-transition template (l = 2N with B = {N..2N-1} for odd N,
/// l = 2N+1 with B = {N+1..2N} for even N) and searches its free weights
/// until g = tau_nu - tau_tilde has exactly N transversal sign changes.
/// Deterministic given the seed; throws SearchExhausted.
SynthesisResult synthesize_transitions(int n, const SynthesisConfig& cfg = {});

}  // namespace mfspec

#endif  // MFSPEC_SPECTRUM_HPP
