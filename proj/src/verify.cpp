#include "mfspec/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mfspec/error.hpp"
#include "tree_kernel.hpp"

namespace mfspec {

using detail::DigitMatrices;
using detail::RowState;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double value_of(const RowState& r) { return std::ldexp(r.x0 + r.x1, static_cast<int>(r.exp)); }

// Every word of depth 0..d with its row (1,0) M_I and column M_I (1,1)^T.
struct WordTable {
  struct Entry {
    int depth;
    std::uint64_t index;
    double r0, r1;  // (1, 0) M_w
    double c0, c1;  // M_w (1, 1)^T = (mu(w), mu(T w))
  };
  std::vector<Entry> words;

  WordTable(const DigitMatrices& dm, int d) {
    const int l = dm.base();
    std::uint64_t total = 0;
    for (int k = 0; k <= d; ++k) total += leaf_count(l, k);
    words.reserve(static_cast<std::size_t>(total));  // references below stay valid
    words.push_back({0, 0, 1.0, 0.0, 1.0, 1.0});
    std::size_t prevStart = 0;
    std::uint64_t width = 1;  // l^(k-1)
    for (int k = 1; k <= d; ++k) {
      const std::size_t start = words.size();
      const std::uint64_t count = width * static_cast<std::uint64_t>(l);
      for (std::uint64_t idx = 0; idx < count; ++idx) {
        // Appending the last digit extends the row; prepending the first
        // digit extends the column.
        const auto& parent = words[prevStart + idx / static_cast<std::uint64_t>(l)];
        const auto& m = dm[static_cast<int>(idx % static_cast<std::uint64_t>(l))];
        const auto& tail = words[prevStart + idx % width];
        const auto& f = dm[static_cast<int>(idx / width)];
        words.push_back({k, idx, parent.r0 * m[0] + parent.r1 * m[2],
                         parent.r0 * m[1] + parent.r1 * m[3], f[0] * tail.c0 + f[1] * tail.c1,
                         f[2] * tail.c0 + f[3] * tail.c1});
      }
      prevStart = start;
      width = count;
    }
  }
};

struct WqbSetup {
  WordTable table;
  std::array<double, 4> s{};  // sum_e M_e
  double t0 = 0.0, t1 = 0.0;  // (1, 0) S^2

  WqbSetup(const WeightSystem& ws, int d) : table(DigitMatrices(ws), d) {
    const DigitMatrices dm(ws);
    for (int e = 0; e < ws.base(); ++e) {
      for (int k = 0; k < 4; ++k) s[static_cast<std::size_t>(k)] += dm[e][static_cast<std::size_t>(k)];
    }
    const double a0 = s[0], a1 = s[1];
    t0 = a0 * s[0] + a1 * s[2];
    t1 = a0 * s[1] + a1 * s[3];
  }
};

struct RowBest {
  double lower = std::numeric_limits<double>::infinity();
  double upper = -std::numeric_limits<double>::infinity();
  std::size_t loJ = 0, hiJ = 0;
  std::uint64_t pairs = 0;
};

RowBest scan_row(const WqbSetup& st, const WordTable::Entry& wi) {
  RowBest best;
  const double muI = wi.r0 + wi.r1;
  if (!(muI > 0.0)) return best;
  const auto& s = st.s;
  const double x0 = wi.r0 * s[0] + wi.r1 * s[2];
  const double x1 = wi.r0 * s[1] + wi.r1 * s[3];
  const auto& words = st.table.words;
  for (std::size_t j = 0; j < words.size(); ++j) {
    const auto& wj = words[j];
    const double muJ = wj.c0;
    const double shifted = st.t0 * wj.c0 + st.t1 * wj.c1;
    if (!(muJ > 0.0) || !(shifted > 0.0)) continue;
    const double num = x0 * wj.c0 + x1 * wj.c1;
    const double lower = num / (muI * muJ);
    const double upper = num / (muI * shifted);
    ++best.pairs;
    if (lower < best.lower) {
      best.lower = lower;
      best.loJ = j;
    }
    if (upper > best.upper) {
      best.upper = upper;
      best.hiJ = j;
    }
  }
  return best;
}

void check_sweep_depth(int maxDepth) {
  if (maxDepth < 0) throw Error(ErrorCode::InvalidArgument, "depth must be >= 0");
  if (maxDepth > kMaxSweepDepth) {
    throw Error(ErrorCode::DepthTooLarge, "sweep depth " + std::to_string(maxDepth) +
                                              " exceeds " + std::to_string(kMaxSweepDepth));
  }
}

ConstantReport assemble(const WeightSystem& ws, const WqbSetup& st, const std::vector<RowBest>& rows,
                        int maxDepth) {
  ConstantReport rep;
  const auto& words = st.table.words;
  const int l = ws.base();
  const auto word = [&](std::size_t k) {
    return LWord::from_index(l, static_cast<std::size_t>(words[k].depth), words[k].index);
  };
  for (int n = 0; n <= maxDepth; ++n) {
    for (int p = 0; p <= maxDepth; ++p) rep.depthPairs.emplace_back(n, p);
  }
  rep.bestLower = std::numeric_limits<double>::infinity();
  rep.bestUpper = -std::numeric_limits<double>::infinity();
  std::size_t loI = 0, hiI = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rep.pairsChecked += rows[i].pairs;
    if (rows[i].lower < rep.bestLower) {
      rep.bestLower = rows[i].lower;
      loI = i;
    }
    if (rows[i].upper > rep.bestUpper) {
      rep.bestUpper = rows[i].upper;
      hiI = i;
    }
  }
  rep.witnessLo = {word(loI), word(rows[loI].loJ)};
  rep.witnessHi = {word(hiI), word(rows[hiI].hiJ)};
  return rep;
}

}  // namespace

WqbRatios wqb_ratios(const WeightSystem& ws, const LWord& i, const LWord& j) {
  const int l = ws.base();
  double logNum = kNegInf;
  for (int e = 0; e < l; ++e) {
    logNum = log_add_exp(logNum, measures(ws, concat(concat(i, LWord(l, {e})), j)).logMu);
  }
  double logShift = kNegInf;
  for (int a = 0; a < l; ++a) {
    for (int b = 0; b < l; ++b) {
      logShift = log_add_exp(logShift, measures(ws, concat(LWord(l, {a, b}), j)).logMu);
    }
  }
  const double logI = measures(ws, i).logMu;
  const double logJ = measures(ws, j).logMu;
  return {std::exp(logNum - logI - logJ), std::exp(logNum - logI - logShift)};
}

double ConstantReport::constant() const { return std::max(1.0 / bestLower, bestUpper); }

namespace serial {

ConstantReport check_wqb(const WeightSystem& ws, int maxDepth) {
  check_sweep_depth(maxDepth);
  const WqbSetup st(ws, maxDepth);
  std::vector<RowBest> rows;
  rows.reserve(st.table.words.size());
  for (const auto& wi : st.table.words) rows.push_back(scan_row(st, wi));
  return assemble(ws, st, rows, maxDepth);
}

}  // namespace serial

namespace parallel {

ConstantReport check_wqb(const WeightSystem& ws, int maxDepth) {
  check_sweep_depth(maxDepth);
  const WqbSetup st(ws, maxDepth);
  const auto n = static_cast<std::int64_t>(st.table.words.size());
  std::vector<RowBest> rows(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < n; ++i) {
    rows[static_cast<std::size_t>(i)] = scan_row(st, st.table.words[static_cast<std::size_t>(i)]);
  }
  return assemble(ws, st, rows, maxDepth);
}

}  // namespace parallel

// ---------------------------------------------------------------------------

double qb_failure_log_ratio(const WeightSystem& ws, int n) {
  if (ws.base() != 2) throw Error(ErrorCode::WrongShape, "needs base 2");
  if (!(ws.p(0) > ws.p(1))) throw Error(ErrorCode::WrongShape, "needs p_0 > p_1");
  if (!(ws.p(0) * ws.p(1) * ws.p(2) > 0.0)) throw Error(ErrorCode::WrongShape, "needs p_0 p_1 p_2 > 0");
  if (ws.p(3) != 0.0) throw Error(ErrorCode::WrongShape, "needs p_3 = 0");
  if (n < 1 || n > 10'000) throw Error(ErrorCode::WrongShape, "needs 1 <= n <= 10^4");
  const LWord ones(2, std::vector<int>(static_cast<std::size_t>(n), 1));
  const LWord zero(2, {0});
  return measures(ws, concat(zero, ones)).logMu - measures(ws, zero).logMu -
         measures(ws, ones).logMu;
}

std::string_view to_string(Side s) noexcept { return s == Side::SideMu ? "SideMu" : "SideMuT"; }

Side lemma1_classify(const WeightSystem& ws, const LWord& w) {
  const ScaledMatrix m = word_product(ws, w);
  if (m.row_is_zero(0)) throw Error(ErrorCode::ZeroMass, "mu(" + w.to_string() + ") = 0");
  // Both entries share the row scale, so mantissas compare directly.
  return m.mantissa(0, 0) >= m.mantissa(0, 1) ? Side::SideMu : Side::SideMuT;
}

namespace {

struct DichotomyPart {
  std::uint64_t pairs = 0;
  std::uint64_t violations = 0;
  double minRatio = std::numeric_limits<double>::infinity();
};

void dichotomy_walk(const DigitMatrices& dm, bool sideMu, double muI, const RowState& fromI,
                    const RowState& fromMu, const RowState& fromMuT, int remaining,
                    DichotomyPart& part) {
  const double muIJ = value_of(fromI);
  const double side = sideMu ? value_of(fromMu) : value_of(fromMuT);
  const double lhs = muI * side;
  ++part.pairs;
  if (lhs > 2.0 * muIJ) ++part.violations;
  if (lhs > 0.0) part.minRatio = std::min(part.minRatio, 2.0 * muIJ / lhs);
  if (remaining == 0) return;
  for (int e = 0; e < dm.base(); ++e) {
    dichotomy_walk(dm, sideMu, muI, detail::step(fromI, dm[e]), detail::step(fromMu, dm[e]),
                   detail::step(fromMuT, dm[e]), remaining - 1, part);
  }
}

}  // namespace

DichotomyReport lemma1_sweep(const WeightSystem& ws, int maxDepth) {
  check_sweep_depth(maxDepth);
  const DigitMatrices dm(ws);
  const int l = ws.base();
  std::vector<std::pair<int, std::uint64_t>> all;
  for (int d = 0; d <= maxDepth; ++d) {
    for (std::uint64_t k = 0; k < leaf_count(l, d); ++k) all.emplace_back(d, k);
  }
  const auto n = static_cast<std::int64_t>(all.size());
  std::vector<DichotomyPart> parts(all.size());
  std::vector<int> sides(all.size(), -1);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t t = 0; t < n; ++t) {
    const auto [depth, index] = all[static_cast<std::size_t>(t)];
    const RowState r = detail::prefix_state(dm, detail::start_row(Target::Mu), depth, index);
    if (detail::is_zero(r)) continue;
    const bool sideMu = r.x0 >= r.x1;  // A(I) >= B(I)
    sides[static_cast<std::size_t>(t)] = sideMu ? 1 : 0;
    dichotomy_walk(dm, sideMu, value_of(r), r, RowState{1.0, 0.0, 0}, RowState{0.0, 1.0, 0},
                   maxDepth, parts[static_cast<std::size_t>(t)]);
  }
  DichotomyReport rep;
  rep.maxDepth = maxDepth;
  rep.minRatio = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < parts.size(); ++t) {
    if (sides[t] < 0) continue;
    (sides[t] == 1 ? rep.sideMu : rep.sideMuT) += 1;
    rep.pairsChecked += parts[t].pairs;
    rep.violations += parts[t].violations;
    rep.minRatio = std::min(rep.minRatio, parts[t].minRatio);
  }
  return rep;
}

// ---------------------------------------------------------------------------

SubmultReport check_submultiplicativity(const WeightSystem& ws, double q, int nMax, Target target,
                                        const TreeConfig& cfg) {
  if (!(q < 0.0)) throw Error(ErrorCode::InvalidArgument, "submultiplicativity needs q < 0");
  if (nMax < 2) throw Error(ErrorCode::InvalidArgument, "needs nMax >= 2");
  const std::vector<double> logU = level_log_sums(ws, nMax, q, target, cfg);
  SubmultReport rep;
  rep.q = q;
  rep.nMax = nMax;
  rep.bound = -q * std::numbers::ln2;
  rep.maxExcess = -std::numeric_limits<double>::infinity();
  const auto u = [&](int k) { return logU[static_cast<std::size_t>(k - 1)]; };
  for (int n = 1; n < nMax; ++n) {
    for (int p = 1; n + p <= nMax; ++p) {
      const double ex = u(n + p) - u(n) - u(p);
      rep.splits.push_back({n, p, ex});
      if (ex > rep.maxExcess) {
        rep.maxExcess = ex;
        rep.worstN = n;
        rep.worstP = p;
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

void frostman_descend(const DigitMatrices& dm, const RowState& r, int depth, int lastDepth,
                      double q, double sLnL, LogSumAccumulator& acc) {
  if (depth == lastDepth) return;
  for (int e = 0; e < dm.base(); ++e) {
    const RowState c = detail::step(r, dm[e]);
    if (detail::is_zero(c)) continue;
    acc.add(q * detail::log_mass(c) - (depth + 1) * sLnL, 0.0);
    frostman_descend(dm, c, depth + 1, lastDepth, q, sLnL, acc);
  }
}

}  // namespace

FrostmanApprox frostman_approx(const WeightSystem& ws, double q, double delta, int truncationDepth,
                               int outputDepth, const TreeConfig& cfg) {
  const int l = ws.base();
  const int bigN = truncationDepth;
  const int m = outputDepth;
  if (m < 1 || bigN < m) throw Error(ErrorCode::InvalidArgument, "needs 1 <= m <= N");
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "needs delta > 0");
  if (leaf_count(l, bigN) > cfg.nodeBudget) {
    throw Error(ErrorCode::BudgetExceeded, std::to_string(l) + "^" + std::to_string(bigN) +
                                               " nodes exceed budget " +
                                               std::to_string(cfg.nodeBudget));
  }
  const TauMu tm(ws);
  if (!tm.nu_closed_form()) {
    throw Error(ErrorCode::NoClosedForm, "the Frostman check needs a closed-form tau_mu");
  }
  FrostmanApprox fa;
  fa.q = q;
  fa.delta = delta;
  fa.tauHat = tm(q);
  if (!std::isfinite(fa.tauHat)) throw Error(ErrorCode::NonfiniteTau, "tau_mu(q) is not finite");
  fa.s = fa.tauHat + delta;
  fa.truncationDepth = bigN;
  fa.outputDepth = m;

  const double lnL = std::log(static_cast<double>(l));
  const double sLnL = fa.s * lnL;
  const DigitMatrices dm(ws);
  const auto cells = static_cast<std::int64_t>(leaf_count(l, m));
  std::vector<double> logCell(static_cast<std::size_t>(cells), kNegInf);
  std::vector<double> logMuCell(static_cast<std::size_t>(cells), kNegInf);
  std::vector<double> logZCell(static_cast<std::size_t>(cells), kNegInf);

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t idx = 0; idx < cells; ++idx) {
    const LWord w = LWord::from_index(l, static_cast<std::size_t>(m), static_cast<std::uint64_t>(idx));
    LogSumAccumulator acc;
    RowState r = detail::start_row(Target::Mu);
    int k = 0;
    for (int d : w.digits()) {
      ++k;
      r = detail::step(r, dm[d]);
      if (detail::is_zero(r)) break;
      // Ancestor I_k spreads its term evenly over its l^(m-k) depth-m cells.
      acc.add(q * detail::log_mass(r) - k * sLnL + (k - m) * lnL, 0.0);
    }
    if (k == m && !detail::is_zero(r)) {
      logMuCell[static_cast<std::size_t>(idx)] = detail::log_mass(r);
      LogSumAccumulator below;
      frostman_descend(dm, r, m, bigN, q, sLnL, below);
      if (!below.empty()) {
        // below = mu(I)^q l^(-ms) Z_I(s)
        logZCell[static_cast<std::size_t>(idx)] = below.result().logSum - q * detail::log_mass(r) + m * sLnL;
        acc.merge(below);
      }
    }
    if (!acc.empty()) logCell[static_cast<std::size_t>(idx)] = acc.result().logSum;
  }

  TreeConfig levelCfg = cfg;
  levelCfg.maxDepth = std::max(cfg.maxDepth, bigN);
  const std::vector<double> logU = level_log_sums(ws, bigN, q, Target::Mu, levelCfg);
  fa.logZ = kNegInf;
  for (int j = 1; j <= bigN; ++j) {
    fa.logZ = log_add_exp(fa.logZ, logU[static_cast<std::size_t>(j - 1)] - j * sLnL);
  }
  fa.zValue = std::exp(fa.logZ);

  double logTotal = kNegInf;
  for (double v : logCell) logTotal = log_add_exp(logTotal, v);
  fa.massRatio = std::exp(logTotal - fa.logZ);

  fa.table.resize(logCell.size());
  double best = kNegInf;
  for (std::size_t i = 0; i < logCell.size(); ++i) {
    fa.table[i] = std::exp(logCell[i] - logTotal);
    if (logMuCell[i] == kNegInf) continue;
    const double logRatio = logCell[i] - logTotal - q * logMuCell[i] + m * fa.tauHat * lnL;
    if (logRatio > best) {
      best = logRatio;
      fa.witness = i;
    }
  }
  fa.frostmanConstant = std::exp(best);
  double worstZ = kNegInf;
  for (double v : logZCell) worstZ = std::max(worstZ, v);
  fa.maxZRatio = std::exp(worstZ - fa.logZ);
  return fa;
}

}  // namespace mfspec
