#include "mfspec/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>

#include "mfspec/error.hpp"
#include "tree_kernel.hpp"

namespace mfspec {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kColumnTol = 1e-12;
constexpr double kDomainTol = 1e-12;

double log_base(int l) { return std::log(static_cast<double>(l)); }

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

std::string_view to_string(AttractorKind k) noexcept {
  switch (k) {
    case AttractorKind::Empty: return "Empty";
    case AttractorKind::Singleton: return "Singleton";
    case AttractorKind::Cantor: return "Cantor";
    case AttractorKind::FullInterval: return "FullInterval";
  }
  return "?";
}

std::string_view to_string(QBClass c) noexcept {
  switch (c) {
    case QBClass::QBLower: return "QBLower";
    case QBClass::QBUpper: return "QBUpper";
    case QBClass::NotQB: return "NotQB";
  }
  return "?";
}

std::string_view to_string(Branch b) noexcept { return b == Branch::Nu ? "nu" : "tilde"; }

bool BStructure::overlaps_reflection() const {
  for (int i : b) {
    if (std::find(bStar.begin(), bStar.end(), i) != bStar.end()) return true;
  }
  return false;
}

BStructure b_structure(const WeightSystem& ws) {
  const int l = ws.base();
  BStructure s;
  for (int i = 0; i < l; ++i) {
    if (ws.p(i + l) == 0.0) s.b.push_back(i);
  }
  for (int i : s.b) s.bStar.push_back(l - 1 - i);
  std::sort(s.bStar.begin(), s.bStar.end());
  const auto n = static_cast<int>(s.b.size());
  if (n == 0) {
    s.kind = AttractorKind::Empty;
  } else if (n == 1) {
    s.kind = AttractorKind::Singleton;
  } else if (n == l) {
    s.kind = AttractorKind::FullInterval;
  } else {
    s.kind = AttractorKind::Cantor;
  }
  return s;
}

ClosedFormTau tau_tilde(const WeightSystem& ws) {
  std::vector<Atom> atoms;
  for (int i : b_structure(ws).b) atoms.push_back({ws.p(i), 1.0});
  return ClosedFormTau(ws.base(), 0.0, std::move(atoms));
}

std::optional<ClosedFormTau> tau_nu_closed(const WeightSystem& ws) {
  const int l = ws.base();
  std::vector<Atom> atoms;
  for (int e = 0; e < l; ++e) {
    const double c0 = ws.p(e) + ws.p(2 * l - 1 - e);
    const double c1 = ws.p(e + l) + ws.p(l - 1 - e);
    if (std::abs(c0 - c1) > kColumnTol) return std::nullopt;
    atoms.push_back({0.5 * (c0 + c1), 1.0});
  }
  return ClosedFormTau(l, 0.0, std::move(atoms));
}

ClosedFormTau tau_pi(const WeightSystem& ws) {
  const auto bs = b_structure(ws);
  if (bs.b.empty()) throw Error(ErrorCode::EmptyB, "tau_pi needs a nonempty B");
  double total = 0.0;
  for (int i : bs.b) total += ws.p(i);
  std::vector<Atom> atoms;
  for (int i : bs.b) atoms.push_back({ws.p(i) / total, 1.0});
  return ClosedFormTau(ws.base(), 0.0, std::move(atoms));
}

QBClass check_nu_qb(const WeightSystem& ws) {
  const int l = ws.base();
  const auto bs = b_structure(ws);
  if (bs.b.empty()) return QBClass::QBLower;
  bool allLower = true;
  bool allUpper = true;
  for (int i : bs.b) {
    const double mine = ws.p(i);
    const double mirror = ws.p(l - 1 - i);
    allLower = allLower && mine < mirror;
    allUpper = allUpper && mine > mirror;
  }
  if (allLower) return QBClass::QBLower;
  if (allUpper) return QBClass::QBUpper;
  return QBClass::NotQB;
}

double nu_qb_constant(const WeightSystem& ws, int depth) {
  if (depth < 0 || leaf_count(ws.base(), depth) > 100'000) {
    throw Error(ErrorCode::DepthTooLarge, "nu_qb_constant depth too large");
  }
  const int l = ws.base();
  const detail::DigitMatrices dm(ws);
  // Left factors as rows (1/2,1/2) M_I, right factors as columns M_J (1,1)^T.
  std::vector<std::array<double, 2>> rows{{0.5, 0.5}};
  std::vector<std::array<double, 2>> cols{{1.0, 1.0}};
  std::size_t levelStart = 0;
  for (int d = 0; d < depth; ++d) {
    const std::size_t levelEnd = rows.size();
    for (std::size_t k = levelStart; k < levelEnd; ++k) {
      for (int e = 0; e < l; ++e) {
        const auto& m = dm[e];
        const auto r = rows[k];
        rows.push_back({r[0] * m[0] + r[1] * m[2], r[0] * m[1] + r[1] * m[3]});
        const auto c = cols[k];
        cols.push_back({m[0] * c[0] + m[1] * c[1], m[2] * c[0] + m[3] * c[1]});
      }
    }
    levelStart = levelEnd;
  }
  double logC = 0.0;
  for (const auto& r : rows) {
    const double nuI = r[0] + r[1];
    for (const auto& c : cols) {
      const double nuJ = 0.5 * (c[0] + c[1]);
      const double nuIJ = r[0] * c[0] + r[1] * c[1];
      const double ratio = std::log(nuIJ) - std::log(nuI) - std::log(nuJ);
      logC = std::max(logC, std::abs(ratio));
    }
  }
  return std::exp(logC);
}

TauBracket tau_nu_numeric(const WeightSystem& ws, double q, int nMax, const TreeConfig& cfg,
                          int qbDepth) {
  check_tree_budget(ws.base(), nMax, cfg);
  const bool reliable = check_nu_qb(ws) != QBClass::NotQB;
  if (q == 1.0) return {0.0, 0.0, 0.0, nMax, reliable};
  const double est = tau_n(ws, nMax, q, Target::Nu, cfg);
  const double c = nu_qb_constant(ws, qbDepth);
  const double width = (std::abs(q) * std::log(c) + std::numbers::ln2 * std::max(q, 0.0)) /
                       (static_cast<double>(nMax) * log_base(ws.base()));
  return {est, est - width, est + width, nMax, reliable};
}

// ---------------------------------------------------------------------------

TauMu::TauMu(const WeightSystem& ws, const TauMuOptions& opts)
    : ws_(ws), nuClosed_(tau_nu_closed(ws)), tilde_(tau_tilde(ws)), tree_(opts.tree) {
  const int l = ws.base();
  for (int i = 0; i < l; ++i) {
    if (ws.p(i) == 0.0) {
      if (!opts.forceHypothesis) {
        throw Error(ErrorCode::HypothesisViolated,
                    "p_" + std::to_string(i) +
                        " = 0; the max formula for tau_mu needs p_i > 0 for every i < l "
                        "(force to extrapolate)");
      }
      forced_ = true;
    }
  }
  if (!nuClosed_) {
    if (opts.numericDepth > 0) {
      numericDepth_ = opts.numericDepth;
    } else {
      numericDepth_ = 1;
      const std::uint64_t cap = std::min<std::uint64_t>(tree_.nodeBudget, 1u << 16);
      while (numericDepth_ < tree_.maxDepth && leaf_count(l, numericDepth_ + 1) <= cap) {
        ++numericDepth_;
      }
    }
    check_tree_budget(l, numericDepth_, tree_);
  }
}

double TauMu::nu(double q) const {
  if (nuClosed_) return (*nuClosed_)(q);
  return tau_n(ws_, numericDepth_, q, Target::Nu, tree_);
}

double TauMu::nu_derivative(double q) const {
  if (nuClosed_) return nuClosed_->derivative(q);
  const PartitionSum s = partition_log_sum(ws_, numericDepth_, q, Target::Nu, tree_);
  return s.dLogSum / (static_cast<double>(numericDepth_) * log_base(ws_.base()));
}

double TauMu::operator()(double q) const { return std::max(nu(q), tilde(q)); }

Branch TauMu::active(double q) const { return nu(q) >= tilde(q) ? Branch::Nu : Branch::Tilde; }

double TauMu::derivative(double q) const {
  const double n = nu(q);
  const double t = tilde(q);
  if (n > t) return nu_derivative(q);
  if (t > n) return tilde_derivative(q);
  return std::max(nu_derivative(q), tilde_derivative(q));
}

double tau_mu(const WeightSystem& ws, double q, const TauMuOptions& opts) {
  return TauMu(ws, opts)(q);
}

TauCurve tau_mu_curve(const WeightSystem& ws, std::span<const double> qGrid,
                      const TauMuOptions& opts) {
  for (std::size_t k = 1; k < qGrid.size(); ++k) {
    if (!(qGrid[k] > qGrid[k - 1])) {
      throw Error(ErrorCode::InvalidArgument, "q grid must be strictly increasing");
    }
  }
  const TauMu tm(ws, opts);
  TauCurve c;
  c.qGrid.assign(qGrid.begin(), qGrid.end());
  for (double q : qGrid) {
    c.values.push_back(tm(q));
    c.derivs.push_back(tm.derivative(q));
    c.branches.emplace_back(to_string(tm.active(q)));
  }
  if (tm.nu_closed_form()) {
    c.provenance = CurveProvenance::ClosedForm;
  } else {
    c.provenance = CurveProvenance::PartitionEstimate;
    c.depth = tm.numeric_depth();
  }
  return c;
}

double legendre_of_max(const ClosedFormTau& nu, const ClosedFormTau& tilde, double alpha) {
  if (tilde.is_negative_infinity()) return legendre(nu, alpha);
  if (nu.is_negative_infinity()) return legendre(tilde, alpha);

  const double sPlus = std::max(nu.slope_at_plus_infinity(), tilde.slope_at_plus_infinity());
  const double sMinus = std::min(nu.slope_at_minus_infinity(), tilde.slope_at_minus_infinity());
  const double loAlpha = -sPlus;
  const double hiAlpha = -sMinus;
  const auto near = [](double a, double b) {
    return std::abs(a - b) <= kDomainTol * std::max(1.0, std::abs(b));
  };
  if (near(alpha, loAlpha) || near(alpha, hiAlpha)) {
    // Only branches whose extreme slope matches survive the limit.
    return std::max(legendre(nu, alpha), legendre(tilde, alpha));
  }
  if (alpha < loAlpha || alpha > hiAlpha) return kNegInf;

  const auto phi = [&](double q) { return alpha * q + std::max(nu(q), tilde(q)); };
  const auto rightSlope = [&](double q) {
    const double a = nu(q);
    const double b = tilde(q);
    if (a > b) return alpha + nu.derivative(q);
    if (b > a) return alpha + tilde.derivative(q);
    return alpha + std::max(nu.derivative(q), tilde.derivative(q));
  };
  constexpr double kCap = 1e12;
  double lo = -1.0;
  double hi = 1.0;
  while (rightSlope(lo) >= 0.0) {
    lo *= 2.0;
    if (lo < -kCap) return std::max(legendre(nu, alpha), legendre(tilde, alpha));
  }
  while (rightSlope(hi) < 0.0) {
    hi *= 2.0;
    if (hi > kCap) return std::max(legendre(nu, alpha), legendre(tilde, alpha));
  }
  for (int iter = 0; iter < 300 && hi - lo > 1e-13 * std::max(1.0, std::abs(lo)); ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (rightSlope(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::min(phi(lo), phi(hi));
}

// ---------------------------------------------------------------------------
// Phase-transition scan

namespace {

struct RootFinder {
  std::function<double(double)> g;
  std::function<double(double)> gp;
  const ScanConfig& scan;

  std::vector<double> roots;
  std::vector<double> tangencies;

  double bisect_root(double a, double b, double ga) const {
    for (int iter = 0; iter < 200 && b - a > scan.rootTolerance; ++iter) {
      const double m = 0.5 * (a + b);
      const double gm = g(m);
      if (gm == 0.0) return m;
      if (sign_of(gm) == sign_of(ga)) {
        a = m;
        ga = gm;
      } else {
        b = m;
      }
    }
    return 0.5 * (a + b);
  }

  double bisect_critical(double a, double b, double gpa) const {
    for (int iter = 0; iter < 200 && b - a > scan.rootTolerance; ++iter) {
      const double m = 0.5 * (a + b);
      const double gm = gp(m);
      if (gm == 0.0) return m;
      if (sign_of(gm) == sign_of(gpa)) {
        a = m;
        gpa = gm;
      } else {
        b = m;
      }
    }
    return 0.5 * (a + b);
  }

  // [a, b] with g monotone: at most one sign change.
  void monotone_piece(double a, double b, double ga, double gb) {
    if (ga == 0.0) {
      roots.push_back(a);
      return;
    }
    if (sign_of(ga) * sign_of(gb) < 0) roots.push_back(bisect_root(a, b, ga));
  }

  void cell(double a, double b, double ga, double gb, int depth) {
    const double gpa = gp(a);
    const double gpb = gp(b);
    const double mid = 0.5 * (a + b);
    const double gpm = gp(mid);
    const int changes = (sign_of(gpa) != sign_of(gpm)) + (sign_of(gpm) != sign_of(gpb));
    if (changes >= 2) {
      if (depth >= 24) {
        throw Error(ErrorCode::GridTooCoarse,
                    "g' changes sign repeatedly near q = " + std::to_string(mid));
      }
      const double gm = g(mid);
      cell(a, mid, ga, gm, depth + 1);
      cell(mid, b, gm, gb, depth + 1);
      return;
    }
    if (changes == 0 || sign_of(gpa) == 0 || sign_of(gpb) == 0) {
      monotone_piece(a, b, ga, gb);
      return;
    }
    const double c = bisect_critical(a, b, gpa);
    const double gc = g(c);
    if (std::abs(gc) <= scan.rootTolerance && sign_of(ga) == sign_of(gb)) {
      tangencies.push_back(c);
      return;
    }
    monotone_piece(a, c, ga, gc);
    if (gc != 0.0) monotone_piece(c, b, gc, gb);
  }
};

TransitionScan scan_branches(const std::function<double(double)>& nu,
                             const std::function<double(double)>& nuD,
                             const std::function<double(double)>& tilde,
                             const std::function<double(double)>& tildeD, const ScanConfig& scan) {
  if (!(scan.qMax > scan.qMin) || scan.gridPoints < 2) {
    throw Error(ErrorCode::InvalidArgument, "scan window must be nonempty with >= 2 points");
  }
  RootFinder rf{[&](double q) { return nu(q) - tilde(q); },
                [&](double q) { return nuD(q) - tildeD(q); }, scan, {}, {}};
  const int n = scan.gridPoints;
  const double h = (scan.qMax - scan.qMin) / static_cast<double>(n - 1);
  std::vector<double> grid(static_cast<std::size_t>(n));
  std::vector<double> gv(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    grid[static_cast<std::size_t>(k)] = k == n - 1 ? scan.qMax : scan.qMin + h * k;
    gv[static_cast<std::size_t>(k)] = rf.g(grid[static_cast<std::size_t>(k)]);
    if (!std::isfinite(gv[static_cast<std::size_t>(k)])) {
      throw Error(ErrorCode::GridTooCoarse, "g is not finite on the scan grid");
    }
  }
  for (int k = 0; k + 1 < n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    rf.cell(grid[i], grid[i + 1], gv[i], gv[i + 1], 0);
  }
  if (gv.back() == 0.0) rf.roots.push_back(grid.back());

  std::sort(rf.roots.begin(), rf.roots.end());
  rf.roots.erase(std::unique(rf.roots.begin(), rf.roots.end(),
                             [&](double x, double y) { return std::abs(x - y) <= 10 * scan.rootTolerance; }),
                 rf.roots.end());

  TransitionScan out;
  out.tangencies = rf.tangencies;
  for (double r : rf.roots) {
    const double dn = nuD(r);
    const double dt = tildeD(r);
    if (std::abs(dn - dt) <= scan.transversality) {
      out.tangencies.push_back(r);
      continue;
    }
    // Convexity of both branches: the steeper one wins on the right.
    PhaseTransition t{};
    t.qStar = r;
    t.leftSlope = std::min(dn, dt);
    t.rightSlope = std::max(dn, dt);
    t.alphaLo = -t.rightSlope;
    t.alphaHi = -t.leftSlope;
    out.transitions.push_back(t);
  }
  std::sort(out.tangencies.begin(), out.tangencies.end());
  return out;
}

}  // namespace

TransitionScan find_phase_transitions(const ClosedFormTau& nu, const ClosedFormTau& tilde,
                                      const ScanConfig& scan) {
  if (tilde.is_negative_infinity() || nu.is_negative_infinity()) return {};
  return scan_branches([&](double q) { return nu(q); }, [&](double q) { return nu.derivative(q); },
                       [&](double q) { return tilde(q); },
                       [&](double q) { return tilde.derivative(q); }, scan);
}

TransitionScan find_phase_transitions(const WeightSystem& ws, const ScanConfig& scan,
                                      const TauMuOptions& opts) {
  const TauMu tm(ws, opts);
  if (tm.tilde_closed().is_negative_infinity()) return {};
  if (tm.nu_closed_form()) return find_phase_transitions(*tm.nu_closed(), tm.tilde_closed(), scan);
  TransitionScan out =
      scan_branches([&](double q) { return tm.nu(q); }, [&](double q) { return tm.nu_derivative(q); },
                    [&](double q) { return tm.tilde(q); },
                    [&](double q) { return tm.tilde_derivative(q); }, scan);
  out.reducedPrecision = true;
  return out;
}

// ---------------------------------------------------------------------------
// Dimension spectrum

DimensionSpectrum::DimensionSpectrum(ClosedFormTau nu, ClosedFormTau tilde)
    : nu_(std::move(nu)), tilde_(std::move(tilde)) {
  if (nu_.is_negative_infinity()) {
    throw Error(ErrorCode::InvalidArgument, "nu branch must be finite");
  }
  nuDomain_ = {-nu_.slope_at_plus_infinity(), -nu_.slope_at_minus_infinity()};
  std::vector<DomainPiece> pieces{nuDomain_};
  if (!tilde_.is_negative_infinity()) {
    tildeDomain_ = DomainPiece{-tilde_.slope_at_plus_infinity(), -tilde_.slope_at_minus_infinity()};
    pieces.push_back(*tildeDomain_);
  }
  std::sort(pieces.begin(), pieces.end(),
            [](const DomainPiece& a, const DomainPiece& b) { return a.lo < b.lo; });
  for (const DomainPiece& p : pieces) {
    if (!domain_.empty() && p.lo <= domain_.back().hi + kDomainTol * std::max(1.0, p.lo)) {
      domain_.back().hi = std::max(domain_.back().hi, p.hi);
    } else {
      domain_.push_back(p);
    }
  }
}

namespace {
bool in_piece(const DomainPiece& p, double a) {
  const double tol = kDomainTol * std::max(1.0, std::abs(a));
  return a >= p.lo - tol && a <= p.hi + tol;
}
}  // namespace

bool DimensionSpectrum::in_nu_domain(double alpha) const { return in_piece(nuDomain_, alpha); }

bool DimensionSpectrum::in_tilde_domain(double alpha) const {
  return tildeDomain_ && in_piece(*tildeDomain_, alpha);
}

bool DimensionSpectrum::contains(double alpha) const {
  return in_nu_domain(alpha) || in_tilde_domain(alpha);
}

double DimensionSpectrum::operator()(double alpha) const {
  double v = kNegInf;
  if (in_nu_domain(alpha)) v = std::max(v, legendre(nu_, alpha));
  if (in_tilde_domain(alpha)) v = std::max(v, legendre(tilde_, alpha));
  return v;
}

Branch DimensionSpectrum::branch(double alpha) const {
  const double n = in_nu_domain(alpha) ? legendre(nu_, alpha) : kNegInf;
  const double t = in_tilde_domain(alpha) ? legendre(tilde_, alpha) : kNegInf;
  return t > n ? Branch::Tilde : Branch::Nu;
}

std::vector<double> DimensionSpectrum::isolated_points() const {
  std::vector<double> out;
  for (const auto& p : domain_) {
    if (p.isolated()) out.push_back(p.lo);
  }
  return out;
}

std::vector<SpectrumPoint> DimensionSpectrum::sample(int perInterval) const {
  std::vector<SpectrumPoint> out;
  perInterval = std::max(perInterval, 2);
  for (const auto& p : domain_) {
    if (p.isolated()) {
      out.push_back({p.lo, (*this)(p.lo), branch(p.lo)});
      continue;
    }
    for (int k = 0; k < perInterval; ++k) {
      const double a =
          k == perInterval - 1 ? p.hi : p.lo + (p.hi - p.lo) * k / static_cast<double>(perInterval - 1);
      out.push_back({a, (*this)(a), branch(a)});
    }
  }
  return out;
}

DimensionSpectrum dimension_spectrum(const WeightSystem& ws, const TauMuOptions& opts) {
  const TauMu tm(ws, opts);
  const auto bs = b_structure(ws);
  if (bs.overlaps_reflection()) {
    throw Error(ErrorCode::HypothesisFailed, "HypothesisFailed(BOverlap): B and B* intersect");
  }
  if (check_nu_qb(ws) == QBClass::NotQB) {
    throw Error(ErrorCode::HypothesisFailed,
                "HypothesisFailed(NuNotQB): p_i - p_{l-1-i} changes sign over B");
  }
  if (!tm.nu_closed_form()) {
    throw Error(ErrorCode::HypothesisFailed,
                "HypothesisFailed(NoClosedFormNu): D_nu endpoints need a closed-form tau_nu");
  }
  return DimensionSpectrum(*tm.nu_closed(), tm.tilde_closed());
}

std::vector<ViolationInterval> violation_intervals(const WeightSystem& ws, const ScanConfig& scan,
                                                   const TauMuOptions& opts, int samples) {
  const DimensionSpectrum spec = dimension_spectrum(ws, opts);
  const TransitionScan ts = find_phase_transitions(spec.nu(), spec.tilde(), scan);
  const auto dim = [&](double a) {
    const double f = spec(a);
    return f == kNegInf ? 0.0 : f;
  };
  std::vector<ViolationInterval> out;
  samples = std::max(samples, 1);
  for (const auto& t : ts.transitions) {
    // For alpha strictly inside (-tau'_+, -tau'_-), -alpha is a subgradient
    // of tau_mu at qStar, so the infimum is attained there.
    const double tauAtKink = std::max(spec.nu()(t.qStar), spec.tilde()(t.qStar));
    const auto tauMuStar = [&](double a) { return a * t.qStar + tauAtKink; };
    ViolationInterval v{};
    v.qStar = t.qStar;
    v.alphaLo = t.alphaLo;
    v.alphaHi = t.alphaHi;
    const double mid = 0.5 * (t.alphaLo + t.alphaHi);
    v.gapAtMidpoint = tauMuStar(mid) - dim(mid);
    v.maxGap = v.gapAtMidpoint;
    for (int k = 0; k < samples; ++k) {
      const double a = t.alphaLo + (t.alphaHi - t.alphaLo) * (k + 0.5) / samples;
      v.maxGap = std::max(v.maxGap, tauMuStar(a) - dim(a));
    }
    out.push_back(v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthesizer

namespace {

// Free parameters of the N-transition template. `a` are the doubled nu
// atoms p_i (i < N), `b` the B weights p_{N..} or p_{N+1..}, `centre` the
// middle weight p_N of the odd-base template.
struct Template {
  int n;
  int base;
  std::vector<double> a;
  std::vector<double> b;  // b[k] is p_{firstB + k}
  double centre = 0.0;

  int first_b() const { return n % 2 == 1 ? n : n + 1; }

  std::optional<WeightSystem> build() const {
    const int l = base;
    std::vector<double> p(static_cast<std::size_t>(2 * l), 0.0);
    for (int i = 0; i < n; ++i) {
      const double mirror = b[static_cast<std::size_t>(l - 1 - i - first_b())];
      const double reflected = a[static_cast<std::size_t>(i)] - mirror;  // p_{i+l}
      if (!(reflected > 0.0) || !(mirror > 0.0)) return std::nullopt;
      p[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i)];
      p[static_cast<std::size_t>(i + l)] = reflected;
    }
    for (std::size_t k = 0; k < b.size(); ++k) p[static_cast<std::size_t>(first_b()) + k] = b[k];
    if (n % 2 == 0) {
      if (!(centre > 0.0)) return std::nullopt;
      p[static_cast<std::size_t>(n)] = centre;
      p[static_cast<std::size_t>(n + l)] = centre;
    }
    try {
      return WeightSystem::validate(p, l);
    } catch (const Error&) {
      return std::nullopt;
    }
  }
};

std::vector<double> dirichlet_half(std::mt19937_64& rng, int k, double total) {
  std::gamma_distribution<double> gamma(0.5, 1.0);
  std::vector<double> v(static_cast<std::size_t>(k));
  double s = 0.0;
  for (double& x : v) {
    x = gamma(rng);
    s += x;
  }
  for (double& x : v) x = x / s * total;
  return v;
}

// One randomized proposal. The nu atoms are a Dirichlet(1/2) ladder sorted
// decreasingly; each B weight sits a random log-distance below the nu atom it
// is paired with (odd N), or log-uniformly between 2 p_N and that atom
// (even N), which keeps tau_mu = tau_nu for large negative q.
std::optional<Template> propose(int n, std::mt19937_64& rng) {
  Template t;
  t.n = n;
  t.base = n % 2 == 1 ? 2 * n : 2 * n + 1;
  std::exponential_distribution<double> gap(1.0 / 1.5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (n % 2 == 1) {
    t.a = dirichlet_half(rng, n, 0.5);
    std::sort(t.a.begin(), t.a.end(), std::greater<>());
  } else {
    auto v = dirichlet_half(rng, n + 1, 0.5);
    std::sort(v.begin(), v.end(), std::greater<>());
    t.centre = v.back();
    v.pop_back();
    t.a = v;
  }
  t.b.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    const double ai = t.a[static_cast<std::size_t>(i)];
    double bi = 0.0;
    if (n % 2 == 1) {
      bi = ai * std::exp(-gap(rng));
    } else {
      const double floor = 2.0 * t.centre;
      if (!(ai > floor)) return std::nullopt;
      bi = floor * std::exp(unit(rng) * std::log(ai / floor));
      if (!(bi > floor)) return std::nullopt;
    }
    if (!(ai > 1e-12) || !(bi > 1e-300)) return std::nullopt;
    t.b[static_cast<std::size_t>(t.base - 1 - i - t.first_b())] = bi;
  }
  return t;
}

bool certifies(const WeightSystem& ws, int n, const ScanConfig& scan, TransitionScan& out) {
  const auto nu = tau_nu_closed(ws);
  if (!nu) return false;
  const ClosedFormTau tilde = tau_tilde(ws);
  if (static_cast<int>(b_structure(ws).b.size()) != n) return false;
  try {
    out = find_phase_transitions(*nu, tilde, scan);
  } catch (const Error&) {
    return false;
  }
  if (static_cast<int>(out.transitions.size()) != n || !out.tangencies.empty()) return false;
  // Keep every kink well inside the window so a finer or wider scan agrees.
  for (const auto& t : out.transitions) {
    if (!(t.qStar < 0.0) || !(t.qStar > 0.5 * scan.qMin)) return false;
  }
  return true;
}

}  // namespace

SynthesisResult synthesize_transitions(int n, const SynthesisConfig& cfg) {
  if (n < 1 || n > 8) {
    throw Error(ErrorCode::InvalidArgument, "number of transitions must be in [1, 8]");
  }
  TransitionScan scan;
  if (n == 2) {
    // The two-transition system with l = 5 is a known certificate.
    const std::vector<double> known{0.35, 0.14, 0.01, 0.03, 0.025, 0.325, 0.11, 0.01, 0.0, 0.0};
    const WeightSystem ws = WeightSystem::validate(known, 5);
    if (certifies(ws, n, cfg.scan, scan)) return {ws, cfg.seed, 0, scan};
  }
  std::mt19937_64 rng(cfg.seed);
  for (int attempt = 1; attempt <= cfg.maxAttempts; ++attempt) {
    const auto t = propose(n, rng);
    if (!t) continue;
    const auto ws = t->build();
    if (!ws) continue;
    if (certifies(*ws, n, cfg.scan, scan)) return {*ws, cfg.seed, attempt, scan};
  }
  throw Error(ErrorCode::SearchExhausted, "no " + std::to_string(n) + "-transition system after " +
                                              std::to_string(cfg.maxAttempts) + " attempts");
}

}  // namespace mfspec
