#ifndef MFSPEC_VERIFY_HPP
#define MFSPEC_VERIFY_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "mfspec/measure.hpp"
#include "mfspec/partition.hpp"
#include "mfspec/spectrum.hpp"

namespace mfspec {

// Finite-depth certificates of the structural inequalities behind the
// spectrum formulas. Every sweep is exhaustive over the words it names.

// ---------------------------------------------------------------------------
// Weak quasi-Bernoulli constant

/// Ratios of one (I, J) pair:
///   lower = mu(I n sigma^-(n+1) J) / (mu(I) mu(J))
///   upper = mu(I n sigma^-(n+1) J) / (mu(I) mu(sigma^-2 J))
/// with n = |I| and mu(I n sigma^-(n+1) J) = sum_e mu(I e J).
struct WqbRatios {
  double lower;
  double upper;
};

WqbRatios wqb_ratios(const WeightSystem& ws, const LWord& i, const LWord& j);

struct ConstantReport {
  std::vector<std::pair<int, int>> depthPairs;  // (|I|, |J|) covered
  double bestLower = 1.0;  // min lower ratio
  double bestUpper = 1.0;  // max upper ratio
  std::pair<LWord, LWord> witnessLo{LWord::empty(2), LWord::empty(2)};
  std::pair<LWord, LWord> witnessHi{LWord::empty(2), LWord::empty(2)};
  std::uint64_t pairsChecked = 0;

  /// Smallest C with C^-1 <= lower and upper <= C on every pair checked.
  double constant() const;
};

inline constexpr int kMaxSweepDepth = 6;

namespace serial {
ConstantReport check_wqb(const WeightSystem& ws, int maxDepth);
}
namespace parallel {
ConstantReport check_wqb(const WeightSystem& ws, int maxDepth);
}
/// All pairs with 0 <= |I|, |J| <= maxDepth and mu(I), mu(J) > 0 (the empty
/// word included). Throws DepthTooLarge above kMaxSweepDepth.
inline ConstantReport check_wqb(const WeightSystem& ws, int maxDepth) {
  return parallel::check_wqb(ws, maxDepth);
}

// ---------------------------------------------------------------------------
// Failure of the two-sided property

/// log( mu(0 J) / (mu(0) mu(J)) ) for J = 1^n. Needs l = 2, p_0 > p_1,
/// p_0 p_1 p_2 > 0, p_3 = 0 and 1 <= n <= 10^4 (WrongShape otherwise).
/// Returned in log form: the ratio grows like (p_0/p_1)^n.
double qb_failure_log_ratio(const WeightSystem& ws, int n);

// ---------------------------------------------------------------------------
// Factor-2 dichotomy of mu(IJ) = A(I) mu(J) + B(I) mu(T J)

enum class Side { SideMu, SideMuT };
std::string_view to_string(Side s) noexcept;

/// SideMu when A >= B (then mu(I) mu(J) <= 2 mu(IJ)), SideMuT otherwise
/// (then mu(I) mu(T J) <= 2 mu(IJ)). Throws ZeroMass when mu(I) = 0.
Side lemma1_classify(const WeightSystem& ws, const LWord& w);

struct DichotomyReport {
  int maxDepth = 0;
  std::uint64_t pairsChecked = 0;
  std::uint64_t sideMu = 0;
  std::uint64_t sideMuT = 0;
  std::uint64_t violations = 0;
  /// Smallest 2 mu(IJ) / (mu(I) * side measure of J) seen; >= 1 when the
  /// dichotomy holds.
  double minRatio = 0.0;
};

/// Every nonzero-mass I and every J with depths <= maxDepth; mu(IJ) comes
/// from a separate forward product, not from A and B. No tolerance.
DichotomyReport lemma1_sweep(const WeightSystem& ws, int maxDepth);

// ---------------------------------------------------------------------------
// Submultiplicativity of u_n = sum_{|I| = n} m(I)^q

struct SplitExcess {
  int n;
  int p;
  double excess;  // log u_{n+p} - log u_n - log u_p
};

struct SubmultReport {
  double q = 0.0;
  int nMax = 0;
  double bound = 0.0;  // -q ln 2
  double maxExcess = 0.0;
  int worstN = 0;
  int worstP = 0;
  std::vector<SplitExcess> splits;

  double min_slack() const { return bound - maxExcess; }
};

/// All splits n, p >= 1 with n + p <= nMax. Needs q < 0 (InvalidArgument);
/// throws DepthTooLarge past the tree limits.
SubmultReport check_submultiplicativity(const WeightSystem& ws, double q, int nMax,
                                        Target target = Target::Mu, const TreeConfig& cfg = {});

// ---------------------------------------------------------------------------
// Truncated Frostman measure

struct FrostmanApprox {
  double q = 0.0;
  double delta = 0.0;
  double tauHat = 0.0;  // closed-form tau_mu(q)
  double s = 0.0;       // tauHat + delta
  int truncationDepth = 0;
  int outputDepth = 0;
  /// nu_s of every depth-m word, indexed as LWord::from_index.
  std::vector<double> table;
  double logZ = 0.0;  // log of the truncated Z(s), from the level sums
  double zValue = 0.0;
  /// Sum of the unnormalized table divided by Z; 1 up to rounding.
  double massRatio = 0.0;
  /// max over mu(I) > 0 of nu_s(I) mu(I)^-q l^{m tauHat}.
  double frostmanConstant = 0.0;
  std::uint64_t witness = 0;
  /// max over depth-m I of Z_I(s) / Z(s), Z_I truncated at depth N - m.
  /// A finite-sample view of the hypothesis Z_I(s) <= C Z(s).
  double maxZRatio = 0.0;
};

/// nu_s(I) for |I| = m, with Z and Z_I summed over depths <= N:
///   Z nu_s(I) = l^-m sum_{k<=m} mu(I_k)^q l^{k(1-s)} + mu(I)^q l^{-ms} Z_I(s).
/// Throws BudgetExceeded when l^N exceeds the node budget, NonfiniteTau when
/// tauHat(q) is not finite, NoClosedForm when tau_nu has no closed form.
FrostmanApprox frostman_approx(const WeightSystem& ws, double q, double delta, int truncationDepth,
                               int outputDepth, const TreeConfig& cfg = {});

}  // namespace mfspec

#endif  // MFSPEC_VERIFY_HPP
