#include "mfspec/partition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "mfspec/error.hpp"
#include "tree_kernel.hpp"

namespace mfspec {

using detail::DigitMatrices;
using detail::RowState;

TreeConfig TreeConfig::from_environment() {
  TreeConfig cfg;
  if (const char* env = std::getenv("MFSPEC_BUDGET")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) cfg.nodeBudget = v;
  }
  return cfg;
}

std::uint64_t leaf_count(int base, int depth) noexcept {
  std::uint64_t n = 1;
  for (int k = 0; k < depth; ++k) {
    if (n > UINT64_MAX / static_cast<std::uint64_t>(base)) return UINT64_MAX;
    n *= static_cast<std::uint64_t>(base);
  }
  return n;
}

void check_tree_budget(int base, int depth, const TreeConfig& cfg) {
  if (depth < 1) throw Error(ErrorCode::InvalidArgument, "depth must be >= 1");
  if (depth > cfg.maxDepth) {
    throw Error(ErrorCode::DepthTooLarge, "depth " + std::to_string(depth) + " exceeds maximum " +
                                              std::to_string(cfg.maxDepth));
  }
  if (leaf_count(base, depth) > cfg.nodeBudget) {
    throw Error(ErrorCode::DepthTooLarge,
                std::to_string(base) + "^" + std::to_string(depth) + " leaves exceed budget " +
                    std::to_string(cfg.nodeBudget));
  }
}

void LogSumAccumulator::add(double logTerm, double lnMass) noexcept {
  if (logTerm <= hi_) {
    const double w = std::exp(logTerm - hi_);
    scaled_ += w;
    weightedLn_ += w * lnMass;
  } else {
    const double r = std::exp(hi_ - logTerm);
    scaled_ = scaled_ * r + 1.0;
    weightedLn_ = weightedLn_ * r + lnMass;
    hi_ = logTerm;
  }
}

void LogSumAccumulator::merge(const LogSumAccumulator& other) noexcept {
  if (other.scaled_ == 0.0) return;
  if (scaled_ == 0.0) {
    *this = other;
    return;
  }
  if (other.hi_ <= hi_) {
    const double r = std::exp(other.hi_ - hi_);
    scaled_ += other.scaled_ * r;
    weightedLn_ += other.weightedLn_ * r;
  } else {
    const double r = std::exp(hi_ - other.hi_);
    scaled_ = scaled_ * r + other.scaled_;
    weightedLn_ = weightedLn_ * r + other.weightedLn_;
    hi_ = other.hi_;
  }
}

PartitionSum LogSumAccumulator::result() const noexcept {
  PartitionSum s;
  if (scaled_ == 0.0) return s;
  s.logSum = hi_ + std::log(scaled_);
  s.dLogSum = weightedLn_ / scaled_;
  return s;
}

namespace {

void accumulate_leaves(const DigitMatrices& dm, const RowState& r, int remaining, double q,
                       LogSumAccumulator& acc) {
  if (detail::is_zero(r)) return;
  if (remaining == 0) {
    const double lnm = detail::log_mass(r);
    acc.add(q * lnm, lnm);
    return;
  }
  for (int e = 0; e < dm.base(); ++e) {
    accumulate_leaves(dm, detail::step(r, dm[e]), remaining - 1, q, acc);
  }
}

// Accumulates every node strictly below the starting node, level by level:
// accs[k] receives nodes at `startLevel + k + 1`.
void accumulate_levels(const DigitMatrices& dm, const RowState& r, int remaining, double q,
                       std::vector<LogSumAccumulator>& accs, std::size_t level) {
  if (remaining == 0) return;
  for (int e = 0; e < dm.base(); ++e) {
    const RowState c = detail::step(r, dm[e]);
    if (detail::is_zero(c)) continue;
    const double lnm = detail::log_mass(c);
    accs[level].add(q * lnm, lnm);
    accumulate_levels(dm, c, remaining - 1, q, accs, level + 1);
  }
}

LogSumAccumulator pairwise_reduce(std::vector<LogSumAccumulator> parts) {
  if (parts.empty()) return {};
  while (parts.size() > 1) {
    std::vector<LogSumAccumulator> next;
    next.reserve((parts.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < parts.size(); i += 2) {
      LogSumAccumulator a = parts[i];
      a.merge(parts[i + 1]);
      next.push_back(a);
    }
    if (parts.size() % 2 == 1) next.push_back(parts.back());
    parts = std::move(next);
  }
  return parts.front();
}

}  // namespace

namespace serial {

PartitionSum partition_log_sum(const WeightSystem& ws, int n, double q, Target target,
                               const TreeConfig& cfg) {
  check_tree_budget(ws.base(), n, cfg);
  const DigitMatrices dm(ws);
  LogSumAccumulator acc;
  accumulate_leaves(dm, detail::start_row(target), n, q, acc);
  return acc.result();
}

std::vector<double> level_log_sums(const WeightSystem& ws, int nMax, double q, Target target,
                                   const TreeConfig& cfg) {
  check_tree_budget(ws.base(), nMax, cfg);
  const DigitMatrices dm(ws);
  std::vector<LogSumAccumulator> accs(static_cast<std::size_t>(nMax));
  accumulate_levels(dm, detail::start_row(target), nMax, q, accs, 0);
  std::vector<double> out;
  out.reserve(accs.size());
  for (const auto& a : accs) out.push_back(a.result().logSum);
  return out;
}

}  // namespace serial

namespace parallel {

PartitionSum partition_log_sum(const WeightSystem& ws, int n, double q, Target target,
                               const TreeConfig& cfg) {
  check_tree_budget(ws.base(), n, cfg);
  const DigitMatrices dm(ws);
  const int split = std::max(0, std::min(cfg.splitDepth, n));
  const auto tasks = static_cast<std::int64_t>(leaf_count(ws.base(), split));
  std::vector<LogSumAccumulator> parts(static_cast<std::size_t>(tasks));
  const RowState root = detail::start_row(target);

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t t = 0; t < tasks; ++t) {
    const RowState r = detail::prefix_state(dm, root, split, static_cast<std::uint64_t>(t));
    accumulate_leaves(dm, r, n - split, q, parts[static_cast<std::size_t>(t)]);
  }
  return pairwise_reduce(std::move(parts)).result();
}

std::vector<double> level_log_sums(const WeightSystem& ws, int nMax, double q, Target target,
                                   const TreeConfig& cfg) {
  check_tree_budget(ws.base(), nMax, cfg);
  const DigitMatrices dm(ws);
  const int split = std::max(0, std::min(cfg.splitDepth, nMax));
  const RowState root = detail::start_row(target);

  std::vector<LogSumAccumulator> top(static_cast<std::size_t>(nMax));
  if (split > 0) accumulate_levels(dm, root, split, q, top, 0);

  const auto tasks = static_cast<std::int64_t>(leaf_count(ws.base(), split));
  const auto deeper = static_cast<std::size_t>(nMax - split);
  std::vector<std::vector<LogSumAccumulator>> parts(static_cast<std::size_t>(tasks),
                                                    std::vector<LogSumAccumulator>(deeper));
  if (deeper > 0) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t t = 0; t < tasks; ++t) {
      const RowState r = detail::prefix_state(dm, root, split, static_cast<std::uint64_t>(t));
      if (!detail::is_zero(r)) {
        accumulate_levels(dm, r, nMax - split, q, parts[static_cast<std::size_t>(t)], 0);
      }
    }
  }

  std::vector<double> out(static_cast<std::size_t>(nMax));
  for (int k = 0; k < split; ++k) out[static_cast<std::size_t>(k)] = top[static_cast<std::size_t>(k)].result().logSum;
  for (std::size_t k = 0; k < deeper; ++k) {
    std::vector<LogSumAccumulator> column;
    column.reserve(parts.size());
    for (const auto& p : parts) column.push_back(p[k]);
    out[static_cast<std::size_t>(split) + k] = pairwise_reduce(std::move(column)).result().logSum;
  }
  return out;
}

}  // namespace parallel

double tau_n(const WeightSystem& ws, int n, double q, Target target, const TreeConfig& cfg) {
  const PartitionSum s = partition_log_sum(ws, n, q, target, cfg);
  return s.logSum / (static_cast<double>(n) * std::log(static_cast<double>(ws.base())));
}

}  // namespace mfspec
