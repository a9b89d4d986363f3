#ifndef MFSPEC_MEASURE_HPP
#define MFSPEC_MEASURE_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mfspec {

/// Base and the 2*base probability weights of the self-similar measure
///
///   mu = sum_i p_i mu o S_i^{-1},
///   S_i(x) = x/l + i/l,  S_{i+l}(x) = -x/l + (i+1)/l   (0 <= i < l).
///
/// Construction goes through validate(), so every instance satisfies:
/// all weights finite and >= 0, sum equal to 1 within 1e-12, and
/// p_i + p_{i+l} > 0 for every digit i (the support is all of [0,1]).
class WeightSystem {
 public:
  static constexpr double kSumTolerance = 1e-12;

  static WeightSystem validate(std::span<const double> weights, int base);
  /// Decimal strings are parsed to binary once, then validated.
  static WeightSystem from_decimal(std::span<const std::string> weights, int base);

  int base() const noexcept { return base_; }
  std::span<const double> weights() const noexcept { return weights_; }
  double p(int i) const { return weights_[static_cast<std::size_t>(i)]; }

  friend bool operator==(const WeightSystem&, const WeightSystem&) = default;

 private:
  WeightSystem(int base, std::vector<double> weights)
      : base_(base), weights_(std::move(weights)) {}

  int base_;
  std::vector<double> weights_;
};

/// A finite l-adic word (e_1, ..., e_n); identifies the interval
/// [sum e_i l^-i, sum e_i l^-i + l^-n). The empty word is [0,1).
class LWord {
 public:
  LWord(int base, std::vector<int> digits);
  static LWord empty(int base) { return LWord(base, {}); }
  /// Word of the given depth whose digits spell `index` in base l,
  /// most significant digit first.
  static LWord from_index(int base, std::size_t depth, std::uint64_t index);

  int base() const noexcept { return base_; }
  std::size_t depth() const noexcept { return digits_.size(); }
  std::span<const int> digits() const noexcept { return digits_; }
  std::string to_string() const;

  friend bool operator==(const LWord&, const LWord&) = default;

 private:
  int base_;
  std::vector<int> digits_;
};

/// Digit action of T(x) = 1 - x: e -> l-1-e. An involution.
LWord reflect(const LWord& w);
LWord concat(const LWord& a, const LWord& b);

/// Nonnegative 2x2 matrix stored row by row as mantissa * 2^exponent.
///
/// Each nonzero row is normalized so that its largest mantissa lies in
/// [1/2, 1); the scale is a power of two, so normalization is exact and
/// exact zeros stay zero. Rows carry separate scales: a left-to-right
/// product M_{e1} ... M_{en} only ever right-multiplies, which never mixes
/// rows, so mu(I) (row 0) survives even when row 1 is astronomically larger.
class ScaledMatrix {
 public:
  static ScaledMatrix identity();
  static ScaledMatrix from_entries(const std::array<double, 4>& rowMajor);

  double mantissa(int row, int col) const { return m_[idx(row, col)]; }
  std::int64_t exponent(int row) const { return e_[static_cast<std::size_t>(row)]; }
  /// Natural-log scale of the row: value = mantissa * exp(log_scale).
  double log_scale(int row) const;
  /// Linear value; may underflow or overflow for deep products.
  double value(int row, int col) const;
  /// log of the row sum, -inf for an all-zero row.
  double log_row_sum(int row) const;
  bool row_is_zero(int row) const { return m_[idx(row, 0)] == 0.0 && m_[idx(row, 1)] == 0.0; }

  ScaledMatrix operator*(const ScaledMatrix& rhs) const;

 private:
  static std::size_t idx(int r, int c) { return static_cast<std::size_t>(2 * r + c); }
  void normalize_row(int r);

  std::array<double, 4> m_{};
  std::array<std::int64_t, 2> e_{};
};

/// log mu(I), log mu(T(I)), log nu(I) with nu = (mu + mu o T)/2. -inf marks
/// a zero mass.
struct MeasureTriple {
  double logMu;
  double logMuT;
  double logNu;
};

/// M_e = [[p_e, p_{e+l}], [p_{2l-1-e}, p_{l-1-e}]].
ScaledMatrix transfer_matrix(const WeightSystem& ws, int digit);
/// M_{e1} M_{e2} ... M_{en}; identity for the empty word.
ScaledMatrix word_product(const WeightSystem& ws, const LWord& w);
/// mu(I) = (1 0) M_I (1 1)^T, mu(T(I)) = (0 1) M_I (1 1)^T, nu(I) = their mean.
MeasureTriple measures(const WeightSystem& ws, const LWord& w);

double log_add_exp(double a, double b) noexcept;

}  // namespace mfspec

#endif  // MFSPEC_MEASURE_HPP
