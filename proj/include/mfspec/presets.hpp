#ifndef MFSPEC_PRESETS_HPP
#define MFSPEC_PRESETS_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mfspec/closed_form.hpp"
#include "mfspec/measure.hpp"
#include "mfspec/spectrum.hpp"

namespace mfspec {

// Example families. Each preset carries the structural facts the family is
// known to exhibit, as data and as runnable checks.

/// l = 2, weights (p0, p1, p2, 0). Needs p1 < p0.
struct Sec61Params {
  double p0 = 0.5;
  double p1 = 0.2;
  double p2 = 0.3;
};

/// l = 4 with p4 = p0 - p3, p5 = p1 - p2, p6 = p7 = 0, so B = {2, 3} and nu
/// is multinomial. The non-concave variant also needs p3 < p1 <= p0.
struct Sec62Params {
  double p0 = 0.4;
  double p1 = 0.1;
  double p2 = 0.04;
  double p3 = 0.06;
  bool nonConcave = true;
};

/// l = 5 with p5 = p0 - p4, p6 = p1 - p3, p7 = p2, p8 = p9 = 0, B = {3, 4}.
struct Sec63Params {
  double p0 = 0.35;
  double p1 = 0.14;
  double p2 = 0.01;
  double p3 = 0.03;
  double p4 = 0.025;
};

struct PresetExpectations {
  int transitions = 0;
  std::vector<int> b;
  /// Number of connected pieces of the spectrum domain, when known.
  std::optional<int> domainPieces;
  /// Isolated domain points, each with dimension 0.
  std::vector<double> isolatedPoints;
  /// Expected branches written as in the family's defining display.
  std::optional<ClosedFormTau> nu;
  std::optional<ClosedFormTau> tilde;
  /// Number of local maxima of alpha -> dim E_alpha, when known.
  std::optional<int> spectrumMaxima;
};

struct Preset {
  std::string name;
  WeightSystem ws;
  PresetExpectations expected;
};

Preset preset_sec61(const Sec61Params& p = {});
Preset preset_sec62(const Sec62Params& p = {});
Preset preset_sec63(const Sec63Params& p = {});
/// Synthesized system with n transitions.
Preset preset_ntrans(int n, const SynthesisConfig& cfg = {});

/// "sec61", "sec62", "sec63" (defaults) or "ntrans:N". Throws
/// InvalidArgument for other names.
Preset preset(const std::string& name);
bool is_preset_name(const std::string& name);
std::vector<std::string> preset_names();

struct CheckOutcome {
  bool pass;
  std::string detail;
};

struct ExpectationCheck {
  std::string name;
  std::function<CheckOutcome()> run;
};

/// Runnable assertions binding the preset's expectations to the spectrum
/// module: transition count, B, branch formulas, domain shape, isolated
/// points with dimension 0, number of spectrum maxima.
std::vector<ExpectationCheck> expectations(const Preset& p);

}  // namespace mfspec

#endif  // MFSPEC_PRESETS_HPP
