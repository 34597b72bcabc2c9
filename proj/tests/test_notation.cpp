#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "adaptune/rng.hpp"
#include "adaptune/stats.hpp"

using namespace adaptune;

TEST_CASE("formatting reproduces the published strings") {
  CHECK(stats::format_uncertainty(0.6112, 0.0097, 4) == "0.6112(97)");
  CHECK(stats::format_uncertainty(49.4, 1.9, 1) == "49.4(1.9)");
  CHECK(stats::format_uncertainty(1.002, 0.001, 3) == "1.002(1)");
  CHECK(stats::format_uncertainty(0.3267, 0.0249, 4) == "0.3267(249)");
  CHECK(stats::format_uncertainty(22.6, 0.7, 1) == "22.6(7)");
  CHECK(stats::format_uncertainty(191.2, 20.5, 1) == "191.2(20.5)");
  CHECK(stats::format_uncertainty(11.0, 0.0, 1) == "11.0(0)");
  CHECK(stats::format_uncertainty(1.000, 0.0, 3) == "1.000(0)");
  CHECK(stats::format_uncertainty(10.689, 0.274, 3) == "10.689(274)");
}

TEST_CASE("parsing inverts the published strings") {
  const auto a = stats::parse_uncertainty("0.6112(97)");
  CHECK(a.mean == doctest::Approx(0.6112));
  CHECK(a.delta == doctest::Approx(0.0097));
  CHECK(a.decimals == 4);

  const auto b = stats::parse_uncertainty("49.4(1.9)");
  CHECK(b.mean == doctest::Approx(49.4));
  CHECK(b.delta == doctest::Approx(1.9));
  CHECK(b.decimals == 1);

  const auto c = stats::parse_uncertainty("1.002(1)");
  CHECK(c.mean == doctest::Approx(1.002));
  CHECK(c.delta == doctest::Approx(0.001));
  CHECK(c.decimals == 3);

  CHECK_THROWS_AS(stats::parse_uncertainty("0.6112"), std::invalid_argument);
  CHECK_THROWS_AS(stats::parse_uncertainty("abc(12)"), std::invalid_argument);
  CHECK_THROWS_AS(stats::parse_uncertainty("1.5(x)"), std::invalid_argument);
}

TEST_CASE("string round trip is stable on the published values") {
  for (const char* text : {"0.6112(97)", "49.4(1.9)", "1.002(1)", "0.0762(256)",
                           "2.47(1)", "13.0(0)", "191.2(20.5)"}) {
    const auto parsed = stats::parse_uncertainty(text);
    CHECK(stats::format_uncertainty(parsed.mean, parsed.delta, parsed.decimals) ==
          text);
  }
}

TEST_CASE("value round trip preserves quantized mean and delta") {
  rng::Stream stream(11);
  for (int i = 0; i < 500; ++i) {
    const int decimals = stream.uniform_int(1, 5);
    const double mean = stream.uniform(-5.0, 100.0);
    const double delta = stream.uniform(0.0, 30.0);
    const std::string text = stats::format_uncertainty(mean, delta, decimals);
    const auto parsed = stats::parse_uncertainty(text);
    const double quantum = std::pow(10.0, -decimals);
    CHECK(parsed.decimals == decimals);
    CHECK(std::fabs(parsed.mean - mean) <= 0.5 * quantum + 1e-12);
    CHECK(std::fabs(parsed.delta - delta) <= 0.5 * quantum + 1e-12);
  }
}
