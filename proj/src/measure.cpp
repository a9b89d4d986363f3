#include "mfspec/measure.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "mfspec/error.hpp"

namespace mfspec {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Neumaier-compensated sum; the decimal weights of the presets are not
// binary-exact, so plain summation can drift past the 1e-12 check.
double compensated_sum(std::span<const double> xs) {
  double sum = 0.0;
  double c = 0.0;
  for (double x : xs) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      c += (sum - t) + x;
    } else {
      c += (x - t) + sum;
    }
    sum = t;
  }
  return sum + c;
}

}  // namespace

double log_add_exp(double a, double b) noexcept {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

WeightSystem WeightSystem::validate(std::span<const double> weights, int base) {
  if (base < 2) {
    throw Error(ErrorCode::BadLength, "base must be >= 2, got " + std::to_string(base));
  }
  if (weights.size() != static_cast<std::size_t>(2 * base)) {
    throw Error(ErrorCode::BadLength, "expected " + std::to_string(2 * base) +
                                          " weights for base " + std::to_string(base) + ", got " +
                                          std::to_string(weights.size()));
  }
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!std::isfinite(weights[i]) || weights[i] < 0.0) {
      throw Error(ErrorCode::NegativeWeight,
                  "p_" + std::to_string(i) + " must be finite and nonnegative");
    }
  }
  const double total = compensated_sum(weights);
  if (std::abs(total - 1.0) > kSumTolerance) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", total);
    throw Error(ErrorCode::SumNotOne, std::string("weights sum to ") + buf);
  }
  for (int i = 0; i < base; ++i) {
    if (weights[static_cast<std::size_t>(i)] + weights[static_cast<std::size_t>(i + base)] <= 0.0) {
      throw Error(ErrorCode::EmptyColumn, "p_" + std::to_string(i) + " + p_" +
                                              std::to_string(i + base) +
                                              " = 0; support would not be [0,1]");
    }
  }
  return WeightSystem(base, std::vector<double>(weights.begin(), weights.end()));
}

WeightSystem WeightSystem::from_decimal(std::span<const std::string> weights, int base) {
  std::vector<double> parsed;
  parsed.reserve(weights.size());
  for (const auto& s : weights) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    while (first != last && *first == ' ') ++first;
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
      throw Error(ErrorCode::ParseError, "not a decimal number: '" + s + "'");
    }
    parsed.push_back(v);
  }
  return validate(parsed, base);
}

LWord::LWord(int base, std::vector<int> digits) : base_(base), digits_(std::move(digits)) {
  if (base < 2) throw Error(ErrorCode::InvalidArgument, "base must be >= 2");
  for (int d : digits_) {
    if (d < 0 || d >= base) {
      throw Error(ErrorCode::DigitOutOfRange,
                  "digit " + std::to_string(d) + " outside [0," + std::to_string(base - 1) + "]");
    }
  }
}

LWord LWord::from_index(int base, std::size_t depth, std::uint64_t index) {
  std::vector<int> digits(depth);
  for (std::size_t k = depth; k-- > 0;) {
    digits[k] = static_cast<int>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
  }
  return LWord(base, std::move(digits));
}

std::string LWord::to_string() const {
  if (digits_.empty()) return "()";
  std::string out;
  for (std::size_t i = 0; i < digits_.size(); ++i) {
    if (base_ > 10 && i > 0) out += '.';
    out += std::to_string(digits_[i]);
  }
  return out;
}

LWord reflect(const LWord& w) {
  std::vector<int> digits(w.digits().begin(), w.digits().end());
  for (int& d : digits) d = w.base() - 1 - d;
  return LWord(w.base(), std::move(digits));
}

LWord concat(const LWord& a, const LWord& b) {
  if (a.base() != b.base()) {
    throw Error(ErrorCode::BaseMismatch,
                "cannot concatenate base " + std::to_string(a.base()) + " and base " +
                    std::to_string(b.base()) + " words");
  }
  std::vector<int> digits(a.digits().begin(), a.digits().end());
  digits.insert(digits.end(), b.digits().begin(), b.digits().end());
  return LWord(a.base(), std::move(digits));
}

ScaledMatrix ScaledMatrix::identity() {
  ScaledMatrix m;
  m.m_ = {1.0, 0.0, 0.0, 1.0};
  m.normalize_row(0);
  m.normalize_row(1);
  return m;
}

ScaledMatrix ScaledMatrix::from_entries(const std::array<double, 4>& rowMajor) {
  ScaledMatrix m;
  m.m_ = rowMajor;
  m.normalize_row(0);
  m.normalize_row(1);
  return m;
}

void ScaledMatrix::normalize_row(int r) {
  double& a = m_[idx(r, 0)];
  double& b = m_[idx(r, 1)];
  const double hi = std::max(a, b);
  if (hi == 0.0) {
    e_[static_cast<std::size_t>(r)] = 0;
    return;
  }
  int shift = 0;
  std::frexp(hi, &shift);  // hi = f * 2^shift, f in [1/2, 1)
  a = std::ldexp(a, -shift);
  b = std::ldexp(b, -shift);
  e_[static_cast<std::size_t>(r)] += shift;
}

double ScaledMatrix::log_scale(int row) const {
  return static_cast<double>(exponent(row)) * std::numbers::ln2;
}

double ScaledMatrix::value(int row, int col) const {
  return std::ldexp(mantissa(row, col), static_cast<int>(exponent(row)));
}

double ScaledMatrix::log_row_sum(int row) const {
  const double s = mantissa(row, 0) + mantissa(row, 1);
  if (s == 0.0) return kNegInf;
  return std::log(s) + log_scale(row);
}

ScaledMatrix ScaledMatrix::operator*(const ScaledMatrix& rhs) const {
  ScaledMatrix out;
  for (int i = 0; i < 2; ++i) {
    if (row_is_zero(i)) {
      out.m_[idx(i, 0)] = 0.0;
      out.m_[idx(i, 1)] = 0.0;
      out.e_[static_cast<std::size_t>(i)] = 0;
      continue;
    }
    // Common exponent over the rhs rows that this row actually touches.
    std::int64_t common = std::numeric_limits<std::int64_t>::min();
    for (int k = 0; k < 2; ++k) {
      if (mantissa(i, k) != 0.0 && !rhs.row_is_zero(k)) common = std::max(common, rhs.exponent(k));
    }
    double c0 = 0.0;
    double c1 = 0.0;
    if (common != std::numeric_limits<std::int64_t>::min()) {
      for (int k = 0; k < 2; ++k) {
        const double a = mantissa(i, k);
        if (a == 0.0 || rhs.row_is_zero(k)) continue;
        const std::int64_t gap = rhs.exponent(k) - common;  // <= 0
        const double w = gap < -1100 ? 0.0 : std::ldexp(a, static_cast<int>(gap));
        c0 += w * rhs.mantissa(k, 0);
        c1 += w * rhs.mantissa(k, 1);
      }
    }
    out.m_[idx(i, 0)] = c0;
    out.m_[idx(i, 1)] = c1;
    out.e_[static_cast<std::size_t>(i)] = (c0 == 0.0 && c1 == 0.0) ? 0 : exponent(i) + common;
    out.normalize_row(i);
  }
  return out;
}

ScaledMatrix transfer_matrix(const WeightSystem& ws, int digit) {
  const int l = ws.base();
  if (digit < 0 || digit >= l) {
    throw Error(ErrorCode::DigitOutOfRange,
                "digit " + std::to_string(digit) + " outside [0," + std::to_string(l - 1) + "]");
  }
  return ScaledMatrix::from_entries(
      {ws.p(digit), ws.p(digit + l), ws.p(2 * l - 1 - digit), ws.p(l - 1 - digit)});
}

ScaledMatrix word_product(const WeightSystem& ws, const LWord& w) {
  if (w.base() != ws.base()) {
    throw Error(ErrorCode::BaseMismatch, "word base differs from weight system base");
  }
  ScaledMatrix m = ScaledMatrix::identity();
  for (int d : w.digits()) m = m * transfer_matrix(ws, d);
  return m;
}

MeasureTriple measures(const WeightSystem& ws, const LWord& w) {
  const ScaledMatrix m = word_product(ws, w);
  MeasureTriple t{};
  t.logMu = m.log_row_sum(0);
  t.logMuT = m.log_row_sum(1);
  t.logNu = log_add_exp(t.logMu, t.logMuT) - std::numbers::ln2;
  return t;
}

}  // namespace mfspec
