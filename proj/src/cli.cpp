#include "mfspec/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mfspec/error.hpp"
#include "mfspec/partition.hpp"
#include "mfspec/presets.hpp"
#include "mfspec/spectrum.hpp"
#include "mfspec/verify.hpp"
#include "mfspec/weights_io.hpp"

namespace mfspec {

namespace {

using Json = nlohmann::ordered_json;

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Errors that mean "the input is malformed" rather than "the mathematics
// does not apply to this input".
bool is_input_error(ErrorCode c) {
  switch (c) {
    case ErrorCode::BadLength:
    case ErrorCode::NegativeWeight:
    case ErrorCode::SumNotOne:
    case ErrorCode::EmptyColumn:
    case ErrorCode::ParseError:
    case ErrorCode::DigitOutOfRange:
    case ErrorCode::BaseMismatch:
    case ErrorCode::InvalidArgument:
    case ErrorCode::DepthTooLarge:
    case ErrorCode::BudgetExceeded:
    case ErrorCode::ConstraintViolated:
      return true;
    default:
      return false;
  }
}

struct Input {
  std::string label;
  WeightSystem ws;
};

Input load_input(const std::string& spec) {
  if (is_preset_name(spec)) return {spec, preset(spec).ws};
  return {spec, read_weight_file(spec)};
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw Error(ErrorCode::InvalidArgument, "failed writing '" + path + "'");
}

Json weights_json(const Input& in) {
  Json j;
  j["input"] = in.label;
  j["base"] = in.ws.base();
  j["weights"] = Json::array();
  for (double p : in.ws.weights()) j["weights"].push_back(p);
  return j;
}

std::string bset(const std::vector<int>& b) {
  std::string s = "{";
  for (std::size_t k = 0; k < b.size(); ++k) s += (k ? "," : "") + std::to_string(b[k]);
  return s + "}";
}

// ---------------------------------------------------------------------------

int cmd_validate(const std::string& input, std::ostream& out) {
  const Input in = load_input(input);
  const BStructure bs = b_structure(in.ws);
  const auto nu = tau_nu_closed(in.ws);
  out << "valid: base " << in.ws.base() << ", " << in.ws.weights().size() << " weights\n";
  out << "B = " << bset(bs.b) << " (" << to_string(bs.kind) << "), B* = " << bset(bs.bStar)
      << (bs.overlaps_reflection() ? ", overlapping" : ", disjoint") << "\n";
  out << "nu: " << (nu ? "multinomial, tau_nu = " + nu->formula() : std::string("not multinomial"))
      << "\n";
  out << "nu quasi-Bernoulli class: " << to_string(check_nu_qb(in.ws)) << "\n";
  out << "tau_tilde = " << tau_tilde(in.ws).formula() << "\n";
  return kExitOk;
}

struct TauArgs {
  std::string input;
  double qmin = -30.0;
  double qmax = 5.0;
  int samples = 701;
  int depth = 0;
  bool force = false;
  std::string out;
};

int cmd_tau(const TauArgs& a, std::ostream& out, std::ostream& err) {
  if (!(a.qmax > a.qmin) || a.samples < 2) {
    throw Error(ErrorCode::InvalidArgument, "q grid needs qmax > qmin and samples >= 2");
  }
  const Input in = load_input(a.input);
  TauMuOptions opts;
  opts.forceHypothesis = a.force;
  opts.tree = TreeConfig::from_environment();
  const TauMu tm(in.ws, opts);
  if (a.depth > 0) check_tree_budget(in.ws.base(), a.depth, opts.tree);
  if (tm.hypothesis_forced()) err << "note: some p_i = 0 (i < l); tau_mu is extrapolated\n";
  if (!tm.nu_closed_form()) {
    err << "note: nu is not multinomial; tau_nu is the depth-" << tm.numeric_depth()
        << " partition estimate\n";
  }
  std::ostringstream csv;
  csv << "q,tau_nu,tau_tilde,tau_mu,branch,dtau" << (a.depth > 0 ? ",tau_n" : "") << "\n";
  for (int k = 0; k < a.samples; ++k) {
    const double q =
        k == a.samples - 1 ? a.qmax : a.qmin + (a.qmax - a.qmin) * k / static_cast<double>(a.samples - 1);
    const double n = tm.nu(q);
    const double t = tm.tilde(q);
    csv << num(q) << ',' << num(n) << ',' << num(t) << ',' << num(std::max(n, t)) << ','
        << to_string(tm.active(q)) << ',' << num(tm.derivative(q));
    if (a.depth > 0) csv << ',' << num(tau_n(in.ws, a.depth, q, Target::Mu, opts.tree));
    csv << '\n';
  }
  emit(a.out, csv.str(), out);
  return kExitOk;
}

int cmd_spectrum(const std::string& input, int perInterval, const std::string& path,
                 std::ostream& out) {
  const Input in = load_input(input);
  TauMuOptions opts;
  opts.tree = TreeConfig::from_environment();
  const DimensionSpectrum spec = dimension_spectrum(in.ws, opts);
  std::ostringstream csv;
  csv << "alpha,f,branch\n";
  for (const SpectrumPoint& p : spec.sample(perInterval)) {
    csv << num(p.alpha) << ',' << num(p.f) << ',' << to_string(p.branch) << '\n';
  }
  emit(path, csv.str(), out);
  return kExitOk;
}

int cmd_transitions(const std::string& input, const ScanConfig& scan, const std::string& path,
                    std::ostream& out, std::ostream& err) {
  const Input in = load_input(input);
  TauMuOptions opts;
  opts.tree = TreeConfig::from_environment();
  const TransitionScan ts = find_phase_transitions(in.ws, scan, opts);

  // Gaps need the dimension spectrum; without it they are reported as null.
  std::vector<ViolationInterval> gaps;
  std::string gapNote;
  try {
    gaps = violation_intervals(in.ws, scan, opts);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::HypothesisFailed) throw;
    gapNote = e.what();
    err << "note: gaps not computed: " << e.what() << "\n";
  }

  Json rep = weights_json(in);
  rep["scan"] = {{"qMin", scan.qMin}, {"qMax", scan.qMax}, {"gridPoints", scan.gridPoints},
                 {"rootTolerance", scan.rootTolerance}};
  rep["reducedPrecision"] = ts.reducedPrecision;
  rep["transitions"] = Json::array();
  for (std::size_t k = 0; k < ts.transitions.size(); ++k) {
    const PhaseTransition& t = ts.transitions[k];
    Json jt{{"qStar", t.qStar},       {"leftSlope", t.leftSlope}, {"rightSlope", t.rightSlope},
            {"alphaLo", t.alphaLo},   {"alphaHi", t.alphaHi}};
    jt["gapAtMidpoint"] = k < gaps.size() ? Json(gaps[k].gapAtMidpoint) : Json(nullptr);
    rep["transitions"].push_back(jt);
  }
  rep["tangencies"] = ts.tangencies;
  if (!gapNote.empty()) rep["gapNote"] = gapNote;
  emit(path, rep.dump(2) + "\n", out);
  return kExitOk;
}

struct VerifyArgs {
  std::string input;
  std::vector<std::string> checks;
  int depth = 5;
  std::vector<double> qs{-1.0, -2.0};
  double delta = 0.05;
  int truncation = 10;
  int outputDepth = 6;
  int nMax = 10;
  std::string out;
};

Json word_pair(const std::pair<LWord, LWord>& w) {
  return Json::array({w.first.to_string(), w.second.to_string()});
}

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  const Input in = load_input(a.input);
  const WeightSystem& ws = in.ws;
  const TreeConfig cfg = TreeConfig::from_environment();
  const bool qbShape = ws.base() == 2 && ws.p(0) > ws.p(1) && ws.p(0) * ws.p(1) * ws.p(2) > 0.0 &&
                       ws.p(3) == 0.0;
  std::vector<std::string> checks = a.checks;
  if (checks.empty()) {
    checks = {"wqb", "lemma1", "submult", "frostman"};
    if (qbShape) checks.insert(checks.begin() + 1, "qbfail");
  }
  for (const auto& c : checks) {
    if (c != "wqb" && c != "qbfail" && c != "lemma1" && c != "submult" && c != "frostman") {
      throw Error(ErrorCode::InvalidArgument, "unknown check '" + c + "'");
    }
  }

  Json rep = weights_json(in);
  rep["config"] = {{"checks", checks},   {"depth", a.depth},          {"q", a.qs},
                   {"delta", a.delta},   {"truncation", a.truncation}, {"outputDepth", a.outputDepth},
                   {"nMax", a.nMax},     {"nodeBudget", cfg.nodeBudget}};
  Json results = Json::object();
  bool allPass = true;
  const auto record = [&](const std::string& name, Json body, bool pass) {
    body["status"] = pass ? "pass" : "fail";
    allPass = allPass && pass;
    results[name] = std::move(body);
  };

  for (const auto& c : checks) {
    try {
      if (c == "wqb") {
        const ConstantReport r = check_wqb(ws, a.depth);
        const double C = r.constant();
        record(c,
               {{"maxDepth", a.depth},
                {"pairsChecked", r.pairsChecked},
                {"bestLower", r.bestLower},
                {"bestUpper", r.bestUpper},
                {"constant", C},
                {"witnessLower", word_pair(r.witnessLo)},
                {"witnessUpper", word_pair(r.witnessHi)}},
               std::isfinite(C) && r.bestLower > 0.0);
      } else if (c == "qbfail") {
        Json series = Json::array();
        bool increasing = true;
        double prev = qb_failure_log_ratio(ws, 5);
        for (int n = 6; n <= 21; ++n) {
          const double cur = qb_failure_log_ratio(ws, n);
          increasing = increasing && cur > prev;
          prev = cur;
        }
        for (int n : {1, 5, 10, 20, 21}) series.push_back({{"n", n}, {"logRatio", qb_failure_log_ratio(ws, n)}});
        const double step = std::exp(qb_failure_log_ratio(ws, 21) - qb_failure_log_ratio(ws, 20));
        const double target = ws.p(0) / ws.p(1);
        record(c,
               {{"series", series},
                {"stepRatioAt20", step},
                {"p0OverP1", target},
                {"increasingFrom5", increasing}},
               increasing && std::abs(step / target - 1.0) < 0.05);
      } else if (c == "lemma1") {
        const DichotomyReport r = lemma1_sweep(ws, std::min(a.depth, kMaxSweepDepth));
        record(c,
               {{"maxDepth", r.maxDepth},
                {"pairsChecked", r.pairsChecked},
                {"sideMu", r.sideMu},
                {"sideMuT", r.sideMuT},
                {"violations", r.violations},
                {"minRatio", r.minRatio}},
               r.violations == 0);
      } else if (c == "submult") {
        Json per = Json::array();
        bool pass = true;
        for (double q : a.qs) {
          const SubmultReport r = check_submultiplicativity(ws, q, a.nMax, Target::Mu, cfg);
          pass = pass && r.min_slack() >= 0.0;
          per.push_back({{"q", q},
                         {"nMax", r.nMax},
                         {"bound", r.bound},
                         {"maxExcess", r.maxExcess},
                         {"worstSplit", {r.worstN, r.worstP}},
                         {"minSlack", r.min_slack()}});
        }
        record(c, {{"runs", per}}, pass);
      } else if (c == "frostman") {
        Json per = Json::array();
        bool pass = true;
        for (double q : a.qs) {
          const FrostmanApprox f =
              frostman_approx(ws, q, a.delta, a.truncation, a.outputDepth, cfg);
          double total = 0.0;
          for (double v : f.table) total += v;
          pass = pass && std::isfinite(f.frostmanConstant) && std::abs(total - 1.0) <= 1e-9;
          per.push_back({{"q", q},
                         {"tauHat", f.tauHat},
                         {"s", f.s},
                         {"truncationDepth", f.truncationDepth},
                         {"outputDepth", f.outputDepth},
                         {"zValue", f.zValue},
                         {"tableMass", total},
                         {"frostmanConstant", f.frostmanConstant},
                         {"maxZRatio", f.maxZRatio},
                         {"witness", LWord::from_index(ws.base(), static_cast<std::size_t>(f.outputDepth),
                                                       f.witness)
                                         .to_string()}});
        }
        record(c, {{"runs", per}}, pass);
      }
    } catch (const Error& e) {
      if (is_input_error(e.code())) throw;
      results[c] = {{"status", "error"}, {"message", e.what()}};
      err << c << ": " << e.what() << "\n";
      allPass = false;
    }
  }
  rep["checks"] = results;
  rep["status"] = allPass ? "pass" : "fail";
  emit(a.out, rep.dump(2) + "\n", out);
  return allPass ? kExitOk : kExitHypothesis;
}

int cmd_synthesize(int n, std::uint64_t seed, int maxAttempts, const std::string& path,
                   std::ostream& out, std::ostream& err) {
  SynthesisConfig cfg;
  cfg.seed = seed;
  cfg.maxAttempts = maxAttempts;
  const SynthesisResult r = synthesize_transitions(n, cfg);
  err << "found " << r.scan.transitions.size() << " transitions after " << r.attempts
      << " attempts (seed " << r.seed << ")\n";
  emit(path, format_weights(r.ws) + "\n", out);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multifractal analysis of self-similar measures with overlaps", "mfspec"};
  app.require_subcommand(1);
  const std::string inputHelp = "preset (sec61, sec62, sec63, ntrans:N) or weight file";

  std::string validateInput;
  auto* validate = app.add_subcommand("validate", "check a weight system and describe it");
  validate->add_option("input", validateInput, inputHelp)->required();

  TauArgs tauArgs;
  auto* tau = app.add_subcommand("tau", "tabulate tau_nu, tau_tilde and tau_mu");
  tau->add_option("input", tauArgs.input, inputHelp)->required();
  tau->add_option("--qmin", tauArgs.qmin, "smallest q")->capture_default_str();
  tau->add_option("--qmax", tauArgs.qmax, "largest q")->capture_default_str();
  tau->add_option("--samples", tauArgs.samples, "number of q values")->capture_default_str();
  tau->add_option("--depth", tauArgs.depth, "also emit tau_n of mu at this depth");
  tau->add_flag("--force", tauArgs.force, "proceed when some p_i (i < l) vanishes");
  tau->add_option("--out", tauArgs.out, "CSV file (default stdout)");

  std::string specInput, specOut;
  int perInterval = 201;
  auto* spectrum = app.add_subcommand("spectrum", "sample alpha -> dim E_alpha(mu)");
  spectrum->add_option("input", specInput, inputHelp)->required();
  spectrum->add_option("--per-interval", perInterval, "samples per domain interval")
      ->capture_default_str();
  spectrum->add_option("--out", specOut, "CSV file (default stdout)");

  std::string transInput, transOut;
  ScanConfig scan;
  auto* transitions = app.add_subcommand("transitions", "locate the phase transitions of tau_mu");
  transitions->add_option("input", transInput, inputHelp)->required();
  transitions->add_option("--qmin", scan.qMin, "scan window start")->capture_default_str();
  transitions->add_option("--qmax", scan.qMax, "scan window end")->capture_default_str();
  transitions->add_option("--grid", scan.gridPoints, "scan grid points")->capture_default_str();
  transitions->add_option("--out", transOut, "JSON report (default stdout)");

  VerifyArgs verifyArgs;
  auto* verify = app.add_subcommand("verify", "finite-depth certificates of the structural inequalities");
  verify->add_option("input", verifyArgs.input, inputHelp)->required();
  verify->add_option("--checks", verifyArgs.checks, "wqb,qbfail,lemma1,submult,frostman")
      ->delimiter(',');
  verify->add_option("--depth", verifyArgs.depth, "sweep depth (wqb, lemma1)")->capture_default_str();
  verify->add_option("--q", verifyArgs.qs, "q values (submult, frostman)")->delimiter(',');
  verify->add_option("--delta", verifyArgs.delta, "Frostman offset s - tau(q)")->capture_default_str();
  verify->add_option("--truncation", verifyArgs.truncation, "Frostman truncation depth N")
      ->capture_default_str();
  verify->add_option("--output-depth", verifyArgs.outputDepth, "Frostman table depth m")
      ->capture_default_str();
  verify->add_option("--nmax", verifyArgs.nMax, "submultiplicativity depth")->capture_default_str();
  verify->add_option("--out", verifyArgs.out, "JSON report (default stdout)");

  int synthN = 3;
  std::uint64_t seed = 1;
  int maxAttempts = SynthesisConfig{}.maxAttempts;
  std::string synthOut;
  auto* synthesize = app.add_subcommand("synthesize", "search weights with N phase transitions");
  synthesize->add_option("--n", synthN, "number of transitions")->required();
  synthesize->add_option("--seed", seed, "random seed")->capture_default_str();
  synthesize->add_option("--max-attempts", maxAttempts, "search budget")->capture_default_str();
  synthesize->add_option("--out", synthOut, "weight file (default stdout)");

  std::vector<const char*> argv{"mfspec"};
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*validate) return cmd_validate(validateInput, out);
    if (*tau) return cmd_tau(tauArgs, out, err);
    if (*spectrum) return cmd_spectrum(specInput, perInterval, specOut, out);
    if (*transitions) return cmd_transitions(transInput, scan, transOut, out, err);
    if (*verify) return cmd_verify(verifyArgs, out, err);
    if (*synthesize) return cmd_synthesize(synthN, seed, maxAttempts, synthOut, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_input_error(e.code()) ? kExitInput : kExitHypothesis;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace mfspec
