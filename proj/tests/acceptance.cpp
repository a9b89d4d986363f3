// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit when any
// criterion fails. `acceptance --measure-bound` re-runs the long-double
// enumerator that produced the pinned convergence bounds below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "mfspec/closed_form.hpp"
#include "mfspec/partition.hpp"
#include "mfspec/presets.hpp"
#include "mfspec/spectrum.hpp"
#include "mfspec/verify.hpp"
#include "oracles.hpp"

using namespace mfspec;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const std::vector<double> kConvergenceQ{-8.0, -4.0, -2.0, -1.0, 0.5, 2.0};

// max_q |tau_n(q) - tau_mu(q)| at n = 10, measured with oracle::leaf_masses
// (long double, one naive product per word) and pinned here.
constexpr double kPinnedBound61 = 0.1096835611;  // measured 0.10968356101937049
constexpr double kPinnedBound63 = 0.1363938491;  // measured 0.13639384903759577

double convergence_gap(const WeightSystem& ws, int n) {
  double worst = 0.0;
  for (double q : kConvergenceQ) worst = std::max(worst, std::abs(tau_n(ws, n, q, Target::Mu) - tau_mu(ws, q)));
  return worst;
}

int measure_bound() {
  for (const char* name : {"sec61", "sec63"}) {
    const WeightSystem ws = preset(name).ws;
    const auto masses = oracle::leaf_masses(ws, 10);
    double worst = 0.0;
    for (double q : kConvergenceQ) {
      worst = std::max(worst, std::abs(oracle::tau_n(masses, ws.base(), 10, q) - tau_mu(ws, q)));
    }
    std::printf("%s n=10 max gap %.17g\n", name, worst);
  }
  return 0;
}

// ---------------------------------------------------------------------------

Outcome normalization() {
  double worst = 0.0;
  for (const char* name : {"sec61", "sec62", "sec63"}) {
    const WeightSystem ws = preset(name).ws;
    for (int n = 1; n <= 10; ++n) worst = std::max(worst, std::abs(tau_n(ws, n, 1.0, Target::Mu)));
  }
  return {worst <= 1e-12, fmt("max |tau_n(1)| = %.3g over n <= 10", worst)};
}

Outcome two_transitions() {
  const WeightSystem ws = preset("sec63").ws;
  const TransitionScan a = find_phase_transitions(ws);
  ScanConfig doubled;
  doubled.gridPoints = 2 * ScanConfig{}.gridPoints;
  const TransitionScan b = find_phase_transitions(ws, doubled);
  if (a.transitions.size() != 2 || b.transitions.size() != 2 || !a.tangencies.empty()) {
    return {false, std::to_string(a.transitions.size()) + " transitions"};
  }
  const double q1 = a.transitions[0].qStar, q0 = a.transitions[1].qStar;
  double drift = 0.0;
  for (int k = 0; k < 2; ++k) drift = std::max(drift, std::abs(a.transitions[k].qStar - b.transitions[k].qStar));
  // each root is a kink of tau_mu: one-sided difference quotients disagree
  const TauMu tm(ws);
  bool kinks = true;
  for (const auto& t : a.transitions) {
    const double h = 1e-6;
    const double left = (tm(t.qStar) - tm(t.qStar - h)) / h;
    const double right = (tm(t.qStar + h) - tm(t.qStar)) / h;
    kinks = kinks && right - left > 1e-3;
  }
  return {q1 < q0 && q0 < 0.0 && drift <= 1e-8 && kinks,
          fmt("q1 = %.10f", q1) + fmt(", q0 = %.10f", q0) + fmt(", grid-doubling drift %.2g", drift) +
              (kinks ? ", two kinks" : ", kink missing")};
}

Outcome isolated_point() {
  const WeightSystem ws = preset("sec61").ws;
  const TransitionScan ts = find_phase_transitions(ws);
  const DimensionSpectrum spec = dimension_spectrum(ws);
  const double x = -std::log2(ws.p(1));
  bool isolated = false;
  for (double a : spec.isolated_points()) isolated = isolated || std::abs(a - x) <= 1e-12;
  const double dimAtX = spec(x);
  const auto v = violation_intervals(ws);
  const bool gapOk = v.size() == 1 && v[0].gapAtMidpoint > 0.0;
  return {ts.transitions.size() == 1 && isolated && std::abs(dimAtX) <= 1e-12 && gapOk,
          std::to_string(ts.transitions.size()) + " transition" + fmt(", dim at -log2 p1 = %.3g", dimAtX) +
              (v.empty() ? std::string(", no interval") : fmt(", midpoint gap %.6f", v[0].gapAtMidpoint))};
}

Outcome two_intervals() {
  const Preset p = preset("sec62");
  const DimensionSpectrum spec = dimension_spectrum(p.ws);
  const auto& d = spec.domain();
  const bool disjoint = d.size() == 2 && d[0].hi < d[1].lo && !d[0].isolated() && !d[1].isolated();
  int maxima = 0;
  for (const auto& c : expectations(p)) {
    if (c.name == "spectrum maxima") maxima = c.run().pass ? 2 : -1;
  }
  return {disjoint && maxima == 2, std::to_string(d.size()) + " domain pieces" +
                                       (maxima == 2 ? ", two local maxima" : ", maxima check failed")};
}

Outcome convergence() {
  std::string detail;
  bool pass = true;
  const std::pair<const char*, double> cases[] = {{"sec61", kPinnedBound61}, {"sec63", kPinnedBound63}};
  for (const auto& [name, bound] : cases) {
    const WeightSystem ws = preset(name).ws;
    double prev = std::numeric_limits<double>::infinity();
    bool monotone = true;
    double last = 0.0;
    for (int n : {4, 6, 8, 10}) {
      last = convergence_gap(ws, n);
      monotone = monotone && last < prev;
      prev = last;
    }
    pass = pass && monotone && last <= bound;
    detail += std::string(detail.empty() ? "" : "; ") + name + (monotone ? " monotone" : " NOT monotone") +
              fmt(", n=10 gap %.6g", last) + fmt(" (bound %.6g)", bound);
  }
  return {pass, detail};
}

Outcome multinomial() {
  double worst = 0.0;
  for (const char* name : {"sec62", "sec63"}) {
    const WeightSystem ws = preset(name).ws;
    const ClosedFormTau nu = *tau_nu_closed(ws);
    for (int n = 1; n <= 8; ++n) {
      for (int k = 0; k <= 20; ++k) {
        const double q = -10.0 + k;
        const double s = partition_log_sum(ws, n, q, Target::Nu).logSum;
        worst = std::max(worst, std::abs(s - n * std::log(ws.base()) * nu(q)));
      }
    }
  }
  return {worst <= 1e-9, fmt("max deviation %.3g", worst)};
}

Outcome dichotomy() {
  std::uint64_t pairs = 0, violations = 0;
  for (const char* name : {"sec61", "ntrans:1"}) {
    const DichotomyReport r = lemma1_sweep(preset(name).ws, 6);
    pairs += r.pairsChecked;
    violations += r.violations;
  }
  return {violations == 0 && pairs > 0,
          std::to_string(pairs) + " pairs, " + std::to_string(violations) + " violations"};
}

Outcome wqb() {
  std::string detail;
  bool pass = true;
  for (const char* name : {"sec61", "sec62", "sec63"}) {
    const WeightSystem ws = preset(name).ws;
    const double c3 = check_wqb(ws, 3).constant();
    const double c5 = check_wqb(ws, 5).constant();
    const bool ok = std::isfinite(c5) && std::max(c3, c5) / std::min(c3, c5) < 2.0;
    pass = pass && ok;
    detail += std::string(name) + fmt(" C %.4f", c3) + fmt(" -> %.4f; ", c5);
  }
  const WeightSystem ws = preset("sec61").ws;
  const double step = std::exp(qb_failure_log_ratio(ws, 21) - qb_failure_log_ratio(ws, 20));
  const double target = ws.p(0) / ws.p(1);
  pass = pass && std::abs(step / target - 1.0) < 0.05;
  return {pass, detail + fmt("qb ratio step at n=20 %.6f", step) + fmt(" vs p0/p1 %.6f", target)};
}

Outcome frostman() {
  std::string detail;
  bool pass = true;
  for (const char* name : {"sec61", "sec62", "sec63"}) {
    const WeightSystem ws = preset(name).ws;
    for (double q : {-1.0, -2.0}) {
      const double c8 = frostman_approx(ws, q, 0.05, 8, 6).frostmanConstant;
      const double c10 = frostman_approx(ws, q, 0.05, 10, 6).frostmanConstant;
      const bool ok = std::isfinite(c8) && std::isfinite(c10) && std::max(c8, c10) / std::min(c8, c10) < 2.0;
      pass = pass && ok;
      detail += std::string(detail.empty() ? "" : "; ") + name + fmt(" q=%g", q) + fmt(" %.4g", c8) +
                fmt(" -> %.4g", c10);
    }
  }
  return {pass, detail};
}

Outcome duality() {
  std::vector<ClosedFormTau> forms;
  for (const char* name : {"sec61", "sec62", "sec63", "ntrans:1", "ntrans:2"}) {
    const WeightSystem ws = preset(name).ws;
    if (auto nu = tau_nu_closed(ws)) forms.push_back(*nu);
    forms.push_back(tau_tilde(ws));
    forms.push_back(tau_pi(ws));
  }
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> dist(-30.0, 30.0);
  double worst = 0.0;
  std::size_t checked = 0;
  for (const auto& t : forms) {
    for (int k = 0; k < 100; ++k) {
      const double q = dist(rng);
      const double d = t.derivative(q);
      worst = std::max(worst, std::abs(legendre(t, -d) - (t(q) - q * d)));
      ++checked;
    }
  }
  return {worst <= 1e-9, std::to_string(forms.size()) + " closed forms, " + std::to_string(checked) +
                             fmt(" points, max error %.3g", worst)};
}

Outcome synthesizer() {
  const SynthesisResult r = synthesize_transitions(3);
  const ClosedFormTau nu = *tau_nu_closed(r.ws);
  const ClosedFormTau tilde = tau_tilde(r.ws);
  const ScanConfig scan;
  const auto roots = oracle::sign_changes([&](double q) { return nu(q) - tilde(q); }, scan.qMin, scan.qMax,
                                          10 * scan.gridPoints);
  return {r.scan.transitions.size() == 3 && roots.size() == 3,
          std::to_string(r.attempts) + " attempts, base " + std::to_string(r.ws.base()) + ", oracle finds " +
              std::to_string(roots.size()) + " sign changes"};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1 && std::strcmp(argv[1], "--measure-bound") == 0) return measure_bound();
  std::setvbuf(stdout, nullptr, _IONBF, 0);

  struct Criterion {
    int id;
    const char* title;
    double limitSeconds;  // 0: no runtime requirement
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "normalization tau_n(1) = 0", 10.0, normalization},
      {2, "two-transition example", 1.0, two_transitions},
      {3, "three-map example: isolated point", 1.0, isolated_point},
      {4, "two disjoint spectrum intervals", 1.0, two_intervals},
      {5, "closed form vs partition convergence", 120.0, convergence},
      {6, "multinomial nu exactness", 0.0, multinomial},
      {7, "factor-2 dichotomy sweep", 60.0, dichotomy},
      {8, "weak quasi-Bernoulli constant and qb failure", 0.0, wqb},
      {9, "truncated Frostman constant", 0.0, frostman},
      {10, "conjugate duality", 0.0, duality},
      {11, "synthesized three-transition system", 300.0, synthesizer},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool inTime = c.limitSeconds == 0.0 || secs < c.limitSeconds;
    const bool pass = o.pass && inTime;
    if (!pass) ++failed;
    std::printf("%s %2d %s: %s [%.2fs%s]\n", pass ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str(), secs,
                inTime ? "" : ", over time limit");
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
