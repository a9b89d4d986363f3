#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <vector>

#include "mfspec/partition.hpp"
#include "mfspec/presets.hpp"
#include "mfspec/spectrum.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace mfspec;

TEST_CASE("partition sums match the long-double enumerator") {
  for (const char* name : {"sec61", "sec62", "sec63"}) {
    const WeightSystem ws = preset(name).ws;
    for (int n : {1, 3, 5}) {
      const auto masses = oracle::leaf_masses(ws, n);
      const auto nuMasses = oracle::leaf_masses(ws, n, true);
      for (double q : {-6.0, -1.0, 0.0, 0.5, 2.0, 7.0}) {
        CAPTURE(name);
        CAPTURE(n);
        CAPTURE(q);
        CHECK(tau_n(ws, n, q, Target::Mu) ==
              doctest::Approx(oracle::tau_n(masses, ws.base(), n, q)).epsilon(1e-12));
        CHECK(tau_n(ws, n, q, Target::Nu) ==
              doctest::Approx(oracle::tau_n(nuMasses, ws.base(), n, q)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("q = 0 counts nonzero cells, q = 1 conserves mass") {
  const WeightSystem ws = preset("sec63").ws;
  const PartitionSum s0 = partition_log_sum(ws, 6, 0.0, Target::Mu);
  CHECK(s0.logSum == doctest::Approx(6 * std::log(5.0)));
  for (int n = 1; n <= 8; ++n) CHECK(std::abs(tau_n(ws, n, 1.0, Target::Mu)) < 1e-12);
}

TEST_CASE("derivative of the log sum") {
  const WeightSystem ws = preset("sec62").ws;
  const double h = 1e-5;
  for (double q : {-3.0, 0.5, 2.0}) {
    const double d = partition_log_sum(ws, 5, q, Target::Mu).dLogSum;
    const double fd = (partition_log_sum(ws, 5, q + h, Target::Mu).logSum -
                       partition_log_sum(ws, 5, q - h, Target::Mu).logSum) /
                      (2 * h);
    CHECK(d == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("parallel kernel agrees with the serial reference and repeats exactly") {
  const WeightSystem ws = preset("sec63").ws;
  for (int split : {0, 1, 2, 3}) {
    TreeConfig cfg;
    cfg.splitDepth = split;
    for (double q : {-4.0, 0.3, 3.0}) {
      const auto a = serial::partition_log_sum(ws, 7, q, Target::Mu, cfg);
      const auto b = parallel::partition_log_sum(ws, 7, q, Target::Mu, cfg);
      // Same leaves, but grouped differently: agreement to rounding.
      CHECK(b.logSum == doctest::Approx(a.logSum).epsilon(1e-13));
      const auto again = parallel::partition_log_sum(ws, 7, q, Target::Mu, cfg);
      CHECK(again.logSum == b.logSum);
      CHECK(again.dLogSum == b.dLogSum);
    }
  }
}

TEST_CASE("level sums agree with single-depth sums") {
  const WeightSystem ws = preset("sec62").ws;
  for (double q : {-2.0, 1.5}) {
    const auto levels = level_log_sums(ws, 7, q, Target::Mu);
    const auto serialLevels = serial::level_log_sums(ws, 7, q, Target::Mu);
    REQUIRE(levels.size() == 7);
    for (int k = 1; k <= 7; ++k) {
      const double single = partition_log_sum(ws, k, q, Target::Mu).logSum;
      CHECK(levels[static_cast<std::size_t>(k - 1)] == doctest::Approx(single).epsilon(1e-13));
      CHECK(serialLevels[static_cast<std::size_t>(k - 1)] == doctest::Approx(single).epsilon(1e-13));
    }
  }
}

TEST_CASE("multinomial nu: partition sums are exact") {
  for (const char* name : {"sec62", "sec63"}) {
    const WeightSystem ws = preset(name).ws;
    const auto nu = tau_nu_closed(ws);
    REQUIRE(nu);
    for (int n : {2, 5, 8}) {
      for (double q : {-10.0, -3.0, 0.0, 4.0, 10.0}) {
        const double logSum = partition_log_sum(ws, n, q, Target::Nu).logSum;
        CHECK(std::abs(logSum - n * std::log(ws.base()) * (*nu)(q)) < 1e-9);
      }
    }
  }
}

TEST_CASE("tree budget") {
  const WeightSystem ws = preset("sec63").ws;
  CHECK(code_of([&] { tau_n(ws, 0, 1.0, Target::Mu); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { tau_n(ws, 13, 1.0, Target::Mu); }) == ErrorCode::DepthTooLarge);
  TreeConfig small;
  small.nodeBudget = 1000;
  CHECK(code_of([&] { tau_n(ws, 5, 1.0, Target::Mu, small); }) == ErrorCode::DepthTooLarge);
  CHECK_NOTHROW(tau_n(ws, 4, 1.0, Target::Mu, small));
  CHECK(leaf_count(5, 3) == 125);
  CHECK(leaf_count(10, 40) == UINT64_MAX);
}

TEST_CASE("node budget from the environment") {
  ::setenv("MFSPEC_BUDGET", "4096", 1);
  CHECK(TreeConfig::from_environment().nodeBudget == 4096);
  ::setenv("MFSPEC_BUDGET", "junk", 1);
  CHECK(TreeConfig::from_environment().nodeBudget == TreeConfig{}.nodeBudget);
  ::unsetenv("MFSPEC_BUDGET");
}

TEST_CASE("accumulator merge equals sequential adds") {
  LogSumAccumulator a, b, all;
  for (int k = 0; k < 10; ++k) {
    const double t = std::sin(k) * 50.0;
    (k < 5 ? a : b).add(t, 0.1 * k);
    all.add(t, 0.1 * k);
  }
  a.merge(b);
  CHECK(a.result().logSum == doctest::Approx(all.result().logSum).epsilon(1e-15));
  CHECK(a.result().dLogSum == doctest::Approx(all.result().dLogSum).epsilon(1e-14));
  LogSumAccumulator empty;
  CHECK(empty.empty());
  CHECK(empty.result().logSum == -std::numeric_limits<double>::infinity());
}

TEST_CASE("one-level sum by hand") {
  // mu([0, 1/2)) = p0 + p2 = 0.8, mu([1/2, 1)) = p1 + p3 = 0.2
  const WeightSystem ws = preset("sec61").ws;
  CHECK(partition_log_sum(ws, 1, 2.0, Target::Mu).logSum == doctest::Approx(std::log(0.68)).epsilon(1e-14));
  CHECK(tau_n(ws, 1, 2.0, Target::Mu) == doctest::Approx(std::log2(0.68)).epsilon(1e-14));
}

TEST_CASE("estimates approach the closed form at rate 1/n") {
  const WeightSystem ws = preset("sec61").ws;
  const double exact = tau_mu(ws, -4.0);
  double prev = std::numeric_limits<double>::infinity();
  for (int n : {4, 6, 8, 10}) {
    const double gap = std::abs(tau_n(ws, n, -4.0, Target::Mu) - exact);
    CAPTURE(n);
    CHECK(gap <= prev);
    CHECK(gap <= 0.75 / n);
    prev = gap;
  }
}
