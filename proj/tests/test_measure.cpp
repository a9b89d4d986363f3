#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "mfspec/error.hpp"
#include "mfspec/measure.hpp"
#include "mfspec/weights_io.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace mfspec;

namespace {

WeightSystem sec61() { return WeightSystem::validate(std::vector<double>{0.5, 0.2, 0.3, 0.0}, 2); }
WeightSystem sec63() {
  return WeightSystem::validate(
      std::vector<double>{0.35, 0.14, 0.01, 0.03, 0.025, 0.325, 0.11, 0.01, 0.0, 0.0}, 5);
}

}  // namespace

TEST_CASE("validate rejects malformed weight vectors") {
  using V = std::vector<double>;
  CHECK(code_of([] { WeightSystem::validate(V{0.5, 0.5, 0.0}, 2); }) == ErrorCode::BadLength);
  CHECK(code_of([] { WeightSystem::validate(V{0.5, 0.5}, 1); }) == ErrorCode::BadLength);
  CHECK(code_of([] { WeightSystem::validate(V{0.7, 0.4, -0.1, 0.0}, 2); }) == ErrorCode::NegativeWeight);
  CHECK(code_of([] { WeightSystem::validate(V{0.5, NAN, 0.5, 0.0}, 2); }) == ErrorCode::NegativeWeight);
  CHECK(code_of([] { WeightSystem::validate(V{0.5, 0.2, 0.3, 0.1}, 2); }) == ErrorCode::SumNotOne);
  // digit 1 carries no mass: p_1 + p_3 = 0
  CHECK(code_of([] { WeightSystem::validate(V{0.6, 0.0, 0.4, 0.0}, 2); }) == ErrorCode::EmptyColumn);
}

TEST_CASE("validate accepts a sum within the tolerance") {
  const std::vector<double> w{0.5, 0.2, 0.3 + 5e-13, 0.0};
  CHECK_NOTHROW(WeightSystem::validate(w, 2));
}

TEST_CASE("decimal strings parse once and compare equal to literals") {
  const std::vector<std::string> s{"0.35", "0.14", "0.01", "0.03", "0.025", "0.325", "0.11", "0.01", "0", "0"};
  CHECK(WeightSystem::from_decimal(s, 5) == sec63());
  const std::vector<std::string> bad{"0.5", "x", "0.3", "0"};
  CHECK(code_of([&] { WeightSystem::from_decimal(bad, 2); }) == ErrorCode::ParseError);
}

TEST_CASE("words: indexing, reflection and concatenation") {
  const LWord w = LWord::from_index(5, 3, 3 * 25 + 0 * 5 + 4);
  CHECK(w.digits()[0] == 3);
  CHECK(w.digits()[1] == 0);
  CHECK(w.digits()[2] == 4);
  CHECK(reflect(reflect(w)) == w);
  CHECK(reflect(w).digits()[0] == 1);
  CHECK(concat(w, LWord::empty(5)) == w);
  CHECK(concat(LWord(5, {1}), LWord(5, {2})) == LWord(5, {1, 2}));
  CHECK(code_of([] { LWord(2, {0, 2}); }) == ErrorCode::DigitOutOfRange);
  CHECK(code_of([] { concat(LWord(2, {0}), LWord(3, {0})); }) == ErrorCode::BaseMismatch);
}

TEST_CASE("transfer matrix layout") {
  const WeightSystem ws = sec63();
  const ScaledMatrix m = transfer_matrix(ws, 1);
  CHECK(m.value(0, 0) == doctest::Approx(0.14));   // p_1
  CHECK(m.value(0, 1) == doctest::Approx(0.11));   // p_6
  CHECK(m.value(1, 0) == doctest::Approx(0.0));    // p_8
  CHECK(m.value(1, 1) == doctest::Approx(0.03));   // p_3
  CHECK(code_of([&] { transfer_matrix(ws, 5); }) == ErrorCode::DigitOutOfRange);
}

TEST_CASE("measures agree with the recursive fixed-point oracle") {
  for (const WeightSystem& ws : {sec61(), sec63()}) {
    const int l = ws.base();
    for (int depth = 0; depth <= 5; ++depth) {
      for (std::uint64_t idx = 0; idx < oracle::ipow(l, depth); idx += 7) {
        const auto d = oracle::digits_of(l, depth, idx);
        const MeasureTriple t = measures(ws, LWord(l, d));
        const long double mu = oracle::mu(ws, d);
        const long double muT = oracle::mu_t(ws, d);
        if (mu == 0) {
          CHECK(t.logMu == -std::numeric_limits<double>::infinity());
        } else {
          CHECK(t.logMu == doctest::Approx(static_cast<double>(std::log(mu))).epsilon(1e-12));
        }
        CHECK(std::exp(t.logNu) == doctest::Approx(static_cast<double>((mu + muT) / 2)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("children masses add up to the parent") {
  const WeightSystem ws = sec63();
  for (std::uint64_t idx = 0; idx < 125; ++idx) {
    const LWord w = LWord::from_index(5, 3, idx);
    double sum = 0.0;
    for (int e = 0; e < 5; ++e) sum += std::exp(measures(ws, concat(w, LWord(5, {e}))).logMu);
    CHECK(sum == doctest::Approx(std::exp(measures(ws, w).logMu)).epsilon(1e-13));
  }
}

TEST_CASE("deep products keep the mu row alive") {
  // M_1^n for sec61 is lower-triangular: mu(1^n) = p_1^n while mu(T 1^n)
  // is of order p_0^n; a single scale would flush mu to zero.
  const WeightSystem ws = sec61();
  const int n = 10'000;
  const LWord ones(2, std::vector<int>(n, 1));
  const ScaledMatrix m = word_product(ws, ones);
  CHECK_FALSE(m.row_is_zero(0));
  CHECK(m.log_row_sum(0) == doctest::Approx(n * std::log(0.2)).epsilon(1e-12));
  CHECK(m.mantissa(0, 1) == 0.0);  // exact zero survives
  const double top = std::max(m.mantissa(0, 0), m.mantissa(0, 1));
  CHECK(top >= 0.5);
  CHECK(top < 1.0);
}

TEST_CASE("scaled product matches plain multiplication") {
  const WeightSystem ws = sec63();
  const LWord w(5, {0, 3, 1, 4, 2, 2});
  double a[4] = {1, 0, 0, 1};
  for (int e : w.digits()) {
    const ScaledMatrix t = transfer_matrix(ws, e);
    const double b[4] = {t.value(0, 0), t.value(0, 1), t.value(1, 0), t.value(1, 1)};
    const double c[4] = {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
                         a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
    std::copy(c, c + 4, a);
  }
  const ScaledMatrix m = word_product(ws, w);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) CHECK(m.value(r, c) == doctest::Approx(a[2 * r + c]).epsilon(1e-14));
  }
}

TEST_CASE("log_add_exp") {
  const double ninf = -std::numeric_limits<double>::infinity();
  CHECK(log_add_exp(ninf, ninf) == ninf);
  CHECK(log_add_exp(ninf, 1.5) == 1.5);
  CHECK(log_add_exp(std::log(2.0), std::log(3.0)) == doctest::Approx(std::log(5.0)));
  CHECK(log_add_exp(1000.0, 1000.0) == doctest::Approx(1000.0 + std::log(2.0)));
}

TEST_CASE("weight files round-trip") {
  const WeightSystem ws = sec63();
  CHECK(parse_weights(format_weights(ws)) == ws);
  CHECK(parse_weights(R"({"base": 2, "weights": ["0.5", "0.2", 0.3, 0]})") == sec61());
  CHECK(code_of([] { parse_weights("{"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_weights(R"({"weights": [0.5, 0.5]})"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_weights(R"({"base": 2, "weights": [0.5, 0.2, 0.3]})"); }) == ErrorCode::BadLength);
}
