#ifndef MFSPEC_TREE_KERNEL_HPP
#define MFSPEC_TREE_KERNEL_HPP

// Shared inner loop of the word-tree traversals: a single row vector x
// carried through x <- x M_e. Starting from (1, 0) the row sum at a node is
// mu(I); starting from (1/2, 1/2) it is nu(I).

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "mfspec/measure.hpp"
#include "mfspec/partition.hpp"

namespace mfspec::detail {

struct RowState {
  double x0;
  double x1;
  std::int64_t exp;  // value = (x0, x1) * 2^exp
};

class DigitMatrices {
 public:
  explicit DigitMatrices(const WeightSystem& ws) : base_(ws.base()) {
    const int l = ws.base();
    m_.reserve(static_cast<std::size_t>(l));
    for (int e = 0; e < l; ++e) {
      m_.push_back({ws.p(e), ws.p(e + l), ws.p(2 * l - 1 - e), ws.p(l - 1 - e)});
    }
  }
  int base() const noexcept { return base_; }
  const std::array<double, 4>& operator[](int e) const { return m_[static_cast<std::size_t>(e)]; }

 private:
  int base_;
  std::vector<std::array<double, 4>> m_;
};

inline RowState start_row(Target t) noexcept {
  return t == Target::Mu ? RowState{1.0, 0.0, 0} : RowState{0.5, 0.5, 0};
}

inline RowState step(const RowState& r, const std::array<double, 4>& m) noexcept {
  RowState o{r.x0 * m[0] + r.x1 * m[2], r.x0 * m[1] + r.x1 * m[3], r.exp};
  const double hi = o.x0 > o.x1 ? o.x0 : o.x1;
  if (hi > 0.0 && hi < 0x1p-400) {
    int shift = 0;
    std::frexp(hi, &shift);
    o.x0 = std::ldexp(o.x0, -shift);
    o.x1 = std::ldexp(o.x1, -shift);
    o.exp += shift;
  }
  return o;
}

inline bool is_zero(const RowState& r) noexcept { return r.x0 == 0.0 && r.x1 == 0.0; }

inline double log_mass(const RowState& r) noexcept {
  return std::log(r.x0 + r.x1) + static_cast<double>(r.exp) * std::numbers::ln2;
}

/// Row state after the digits of `index` read as a depth-`depth` word.
inline RowState prefix_state(const DigitMatrices& dm, RowState r, int depth, std::uint64_t index) {
  std::vector<int> digits(static_cast<std::size_t>(depth));
  for (int k = depth; k-- > 0;) {
    digits[static_cast<std::size_t>(k)] = static_cast<int>(index % static_cast<std::uint64_t>(dm.base()));
    index /= static_cast<std::uint64_t>(dm.base());
  }
  for (int d : digits) {
    if (is_zero(r)) break;
    r = step(r, dm[d]);
  }
  return r;
}

}  // namespace mfspec::detail

#endif  // MFSPEC_TREE_KERNEL_HPP
