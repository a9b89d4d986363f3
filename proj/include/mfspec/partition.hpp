#ifndef MFSPEC_PARTITION_HPP
#define MFSPEC_PARTITION_HPP

#include <cstdint>
#include <limits>
#include <vector>

#include "mfspec/measure.hpp"

namespace mfspec {

enum class Target { Mu, Nu };

/// Limits for exhaustive traversals of the l-ary word tree.
struct TreeConfig {
  int maxDepth = 12;
  /// Cap on l^n leaves visited by one traversal.
  std::uint64_t nodeBudget = 200'000'000;
  /// Parallel kernels split the tree at this prefix depth; results are
  /// bit-for-bit reproducible for a fixed value, whatever the thread count.
  int splitDepth = 2;

  /// Defaults, with nodeBudget overridden by MFSPEC_BUDGET when set.
  static TreeConfig from_environment();
};

/// l^n, saturating at UINT64_MAX.
std::uint64_t leaf_count(int base, int depth) noexcept;

/// Throws DepthTooLarge when depth > cfg.maxDepth or l^depth > cfg.nodeBudget,
/// InvalidArgument when depth < 1.
void check_tree_budget(int base, int depth, const TreeConfig& cfg);

/// log sum_{|I| = n, m(I) > 0} m(I)^q and its q-derivative.
struct PartitionSum {
  double logSum = -std::numeric_limits<double>::infinity();
  /// d/dq logSum = sum m^q ln m / sum m^q.
  double dLogSum = 0.0;
};

/// Streaming log-sum-exp accumulator that also tracks the softmax-weighted
/// mean of ln m.
class LogSumAccumulator {
 public:
  void add(double logTerm, double lnMass) noexcept;
  void merge(const LogSumAccumulator& other) noexcept;
  PartitionSum result() const noexcept;
  bool empty() const noexcept { return scaled_ == 0.0; }

 private:
  double hi_ = -std::numeric_limits<double>::infinity();
  double scaled_ = 0.0;
  double weightedLn_ = 0.0;
};

/// Serial depth-first traversal; the reference the parallel kernels are
/// tested against.
namespace serial {
PartitionSum partition_log_sum(const WeightSystem& ws, int n, double q, Target target,
                               const TreeConfig& cfg = {});
/// log u_k = log sum_{|I| = k} m(I)^q for k = 1..nMax in one traversal.
std::vector<double> level_log_sums(const WeightSystem& ws, int nMax, double q, Target target,
                                   const TreeConfig& cfg = {});
}  // namespace serial

/// OpenMP kernels: one task per depth-`splitDepth` prefix, accumulators
/// combined by a fixed pairwise tree in prefix order.
namespace parallel {
PartitionSum partition_log_sum(const WeightSystem& ws, int n, double q, Target target,
                               const TreeConfig& cfg = {});
std::vector<double> level_log_sums(const WeightSystem& ws, int nMax, double q, Target target,
                                   const TreeConfig& cfg = {});
}  // namespace parallel

inline PartitionSum partition_log_sum(const WeightSystem& ws, int n, double q, Target target,
                                      const TreeConfig& cfg = {}) {
  return parallel::partition_log_sum(ws, n, q, target, cfg);
}

inline std::vector<double> level_log_sums(const WeightSystem& ws, int nMax, double q, Target target,
                                          const TreeConfig& cfg = {}) {
  return parallel::level_log_sums(ws, nMax, q, target, cfg);
}

/// tau_n(q) = log(sum m(I)^q) / (n ln l).
double tau_n(const WeightSystem& ws, int n, double q, Target target, const TreeConfig& cfg = {});

}  // namespace mfspec

#endif  // MFSPEC_PARTITION_HPP
