#include "mfspec/presets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>

#include "mfspec/error.hpp"

namespace mfspec {

namespace {

// Derived weights such as 0.35 - 0.025 are meant as decimals; rounding the
// binary difference to 15 significant digits recovers 0.325 and keeps the
// total at exactly 1 in decimal.
double decimal(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  double out = 0.0;
  std::from_chars(buf, buf + std::char_traits<char>::length(buf), out);
  return out;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::ConstraintViolated, what);
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

bool close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

CheckOutcome same_branch(const std::string& label, const std::optional<ClosedFormTau>& got,
                         const ClosedFormTau& want) {
  if (!got) return {false, label + " has no closed form"};
  for (int k = -60; k <= 60; ++k) {
    const double q = 0.5 * k;
    if (!close((*got)(q), want(q), 1e-12)) {
      return {false, label + " differs at q = " + fmt(q) + ": " + got->formula() + " vs " +
                         want.formula()};
    }
  }
  return {true, got->formula()};
}

int count_local_maxima(const DimensionSpectrum& spec) {
  int maxima = 0;
  for (const DomainPiece& piece : spec.domain()) {
    if (piece.isolated()) {
      ++maxima;
      continue;
    }
    constexpr int kSamples = 4001;
    std::vector<double> f(kSamples);
    for (int k = 0; k < kSamples; ++k) {
      f[static_cast<std::size_t>(k)] =
          spec(piece.lo + (piece.hi - piece.lo) * k / static_cast<double>(kSamples - 1));
    }
    // Strict rises then strict falls; flat stretches count once.
    constexpr double kFlat = 1e-12;
    int trend = 1;  // the left end behaves as if approached from below
    for (int k = 1; k < kSamples; ++k) {
      const double d = f[static_cast<std::size_t>(k)] - f[static_cast<std::size_t>(k - 1)];
      if (d > kFlat) {
        trend = 1;
      } else if (d < -kFlat) {
        if (trend == 1) ++maxima;
        trend = -1;
      }
    }
    if (trend == 1) ++maxima;
  }
  return maxima;
}

}  // namespace

Preset preset_sec61(const Sec61Params& p) {
  require(p.p0 > 0.0 && p.p1 > 0.0 && p.p2 > 0.0, "sec61 needs p0, p1, p2 > 0");
  require(p.p1 < p.p0, "sec61 needs p1 < p0");
  const std::vector<double> w{p.p0, p.p1, p.p2, 0.0};
  Preset out{"sec61", WeightSystem::validate(w, 2), {}};
  auto& e = out.expected;
  e.transitions = 1;
  e.b = {1};
  // The point -log2 p1 is only certified isolated when D_nu is known,
  // i.e. when nu is multinomial (p0 = 1/2).
  if (tau_nu_closed(out.ws)) e.isolatedPoints = {-std::log2(p.p1)};
  e.tilde = ClosedFormTau(2, 0.0, {{p.p1, 1.0}});
  return out;
}

Preset preset_sec62(const Sec62Params& p) {
  require(p.p0 > 0.0 && p.p1 > 0.0 && p.p2 > 0.0 && p.p3 > 0.0, "sec62 needs p0..p3 > 0");
  const double p4 = decimal(p.p0 - p.p3);
  const double p5 = decimal(p.p1 - p.p2);
  require(p4 > 0.0, "sec62 needs p4 = p0 - p3 > 0");
  require(p5 > 0.0, "sec62 needs p5 = p1 - p2 > 0");
  if (p.nonConcave) require(p.p3 < p.p1 && p.p1 <= p.p0, "sec62 non-concave variant needs p3 < p1 <= p0");
  const std::vector<double> w{p.p0, p.p1, p.p2, p.p3, p4, p5, 0.0, 0.0};
  Preset out{"sec62", WeightSystem::validate(w, 4), {}};
  auto& e = out.expected;
  e.transitions = 1;
  e.b = {2, 3};
  e.nu = ClosedFormTau(4, 0.5, {{p.p0, 1.0}, {p.p1, 1.0}});
  e.tilde = ClosedFormTau(4, 0.0, {{p.p2, 1.0}, {p.p3, 1.0}});
  if (p.nonConcave) {
    e.domainPieces = 2;
    e.spectrumMaxima = 2;
  }
  return out;
}

Preset preset_sec63(const Sec63Params& p) {
  require(p.p0 > 0.0 && p.p1 > 0.0 && p.p2 > 0.0 && p.p3 > 0.0 && p.p4 > 0.0,
          "sec63 needs p0..p4 > 0");
  const double p5 = decimal(p.p0 - p.p4);
  const double p6 = decimal(p.p1 - p.p3);
  require(p5 > 0.0, "sec63 needs p5 = p0 - p4 > 0");
  require(p6 > 0.0, "sec63 needs p6 = p1 - p3 > 0");
  const std::vector<double> w{p.p0, p.p1, p.p2, p.p3, p.p4, p5, p6, p.p2, 0.0, 0.0};
  Preset out{"sec63", WeightSystem::validate(w, 5), {}};
  auto& e = out.expected;
  e.transitions = 2;
  e.b = {3, 4};
  e.nu = ClosedFormTau(5, 0.0, {{p.p0, 2.0}, {p.p1, 2.0}, {2.0 * p.p2, 1.0}});
  e.tilde = ClosedFormTau(5, 0.0, {{p.p3, 1.0}, {p.p4, 1.0}});
  e.domainPieces = 1;
  return out;
}

Preset preset_ntrans(int n, const SynthesisConfig& cfg) {
  const SynthesisResult r = synthesize_transitions(n, cfg);
  Preset out{"ntrans:" + std::to_string(n), r.ws, {}};
  auto& e = out.expected;
  e.transitions = n;
  const int first = n % 2 == 1 ? n : n + 1;
  for (int i = first; i < r.ws.base(); ++i) e.b.push_back(i);
  return out;
}

bool is_preset_name(const std::string& name) {
  if (name == "sec61" || name == "sec62" || name == "sec63") return true;
  if (name.rfind("ntrans:", 0) != 0) return false;
  const std::string digits = name.substr(7);
  int n = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
  return ec == std::errc() && ptr == digits.data() + digits.size() && !digits.empty();
}

std::vector<std::string> preset_names() { return {"sec61", "sec62", "sec63", "ntrans:N"}; }

Preset preset(const std::string& name) {
  if (name == "sec61") return preset_sec61();
  if (name == "sec62") return preset_sec62();
  if (name == "sec63") return preset_sec63();
  if (is_preset_name(name)) return preset_ntrans(std::stoi(name.substr(7)));
  throw Error(ErrorCode::InvalidArgument, "unknown preset '" + name + "'");
}

std::vector<ExpectationCheck> expectations(const Preset& p) {
  std::vector<ExpectationCheck> checks;
  const WeightSystem ws = p.ws;
  const PresetExpectations e = p.expected;

  checks.push_back({"transitions", [ws, e] {
                      const TransitionScan ts = find_phase_transitions(ws);
                      const auto got = static_cast<int>(ts.transitions.size());
                      std::string detail = std::to_string(got) + " transversal, " +
                                           std::to_string(ts.tangencies.size()) + " tangential";
                      return CheckOutcome{got == e.transitions && ts.tangencies.empty(), detail};
                    }});
  checks.push_back({"B", [ws, e] {
                      const auto b = b_structure(ws).b;
                      std::string detail;
                      for (int i : b) detail += (detail.empty() ? "" : ",") + std::to_string(i);
                      return CheckOutcome{b == e.b, "{" + detail + "}"};
                    }});
  if (e.nu) {
    checks.push_back({"nu branch", [ws, e] { return same_branch("tau_nu", tau_nu_closed(ws), *e.nu); }});
  }
  if (e.tilde) {
    checks.push_back(
        {"tilde branch", [ws, e] { return same_branch("tau_tilde", tau_tilde(ws), *e.tilde); }});
  }
  if (e.domainPieces) {
    checks.push_back({"domain pieces", [ws, e] {
                        const DimensionSpectrum spec = dimension_spectrum(ws);
                        const auto n = static_cast<int>(spec.domain().size());
                        std::string detail;
                        for (const auto& d : spec.domain()) {
                          detail += "[" + fmt(d.lo) + ", " + fmt(d.hi) + "] ";
                        }
                        return CheckOutcome{n == *e.domainPieces, detail};
                      }});
  }
  for (double a : e.isolatedPoints) {
    checks.push_back({"isolated point " + fmt(a), [ws, a] {
                        const DimensionSpectrum spec = dimension_spectrum(ws);
                        const auto iso = spec.isolated_points();
                        const bool listed = std::any_of(iso.begin(), iso.end(),
                                                        [&](double x) { return close(x, a, 1e-12); });
                        const double f = spec(a);
                        return CheckOutcome{listed && std::abs(f) <= 1e-12, "dim = " + fmt(f)};
                      }});
  }
  if (e.spectrumMaxima) {
    checks.push_back({"spectrum maxima", [ws, e] {
                        const int n = count_local_maxima(dimension_spectrum(ws));
                        return CheckOutcome{n == *e.spectrumMaxima, std::to_string(n) + " local maxima"};
                      }});
  }
  for (auto& c : checks) {
    c.run = [inner = std::move(c.run)] {
      try {
        return inner();
      } catch (const std::exception& ex) {
        return CheckOutcome{false, ex.what()};
      }
    };
  }
  return checks;
}

}  // namespace mfspec
