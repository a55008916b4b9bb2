#include <doctest.h>

#include "../oracles.hpp"
#include "pulseforge/errors.hpp"
#include "pulseforge/sequencer.hpp"

using namespace pulseforge;

TEST_CASE("burst generation") {
  CHECK(generate_burst({2e3, 10e-6, 1, 1e-3}) == std::vector<Interval>{{1e-3, 10e-6}});
  const auto burst = generate_burst({2e3, 10e-6, 8, 0.0});
  REQUIRE(burst.size() == 8);
  for (std::size_t k = 1; k < burst.size(); ++k) {
    CHECK(burst[k].start - burst[k - 1].start == doctest::Approx(500e-6).epsilon(1e-12));
    CHECK(burst[k].start == static_cast<double>(k) / 2e3);
    CHECK(burst[k - 1].end() <= burst[k].start);
  }
  CHECK_THROWS_AS(generate_burst({2e3, 500e-6, 3, 0.0}), ParameterError);
  CHECK_THROWS_AS(generate_burst({0.0, 1e-6, 3, 0.0}), ParameterError);
}

TEST_CASE("TTL single-pulse selection") {
  const auto burst = generate_burst({2e3, 10e-6, 5, 0.0});

  SUBCASE("one period centered on pulse 2") {
    const double center = burst[1].center();
    CHECK(select_single_pulse(burst, {center - 250e-6, center + 250e-6}) == burst[1]);
  }
  SUBCASE("two periods is ambiguous") {
    try {
      select_single_pulse(burst, {burst[1].start - 1e-6, burst[1].start + 1e-3 - 1e-6});
      FAIL("expected SelectionError");
    } catch (const SelectionError& e) {
      CHECK(e.count() == 2);
    }
  }
  SUBCASE("a window between pulses selects nothing") {
    try {
      select_single_pulse(burst, {burst[1].end() + 1e-6, burst[2].start - 1e-6});
      FAIL("expected SelectionError");
    } catch (const SelectionError& e) {
      CHECK(e.count() == 0);
    }
  }
  SUBCASE("pulses outside the window do not change the selection (property)") {
    oracle::Gen gen(4);
    const TtlWindow ttl{burst[2].start - 100e-6, burst[2].end() + 100e-6};
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<Interval> extended = burst;
      for (int extra = 0; extra < 5; ++extra) {
        const double start = gen.uniform(0.0, 1.0) < 0.5 ? gen.uniform(-5e-3, ttl.high_start - 20e-6)
                                                         : gen.uniform(ttl.high_end + 1e-6, 5e-3);
        extended.push_back({start, 10e-6});
      }
      CHECK(select_single_pulse(extended, ttl) == burst[2]);
    }
  }
}

TEST_CASE("blue pulse centering") {
  const Interval ir{0.0, 1.5e-6};

  SUBCASE("flat window of 0.6-1.3 us with a 0.3 us blue pulse") {
    const SequencePlan plan = center_blue_pulse(ir, {0.6e-6, 1.3e-6}, 0.3e-6);
    CHECK(plan.blue_pulse.start == doctest::Approx(0.80e-6).epsilon(1e-12));
    CHECK(plan.blue_pulse.end() == doctest::Approx(1.10e-6).epsilon(1e-12));
    CHECK(plan.margin_before == doctest::Approx(0.20e-6).epsilon(1e-12));
    CHECK(plan.margin_before == plan.margin_after);
    CHECK(plan.overlap == plan.blue_pulse);
    CHECK_FALSE(plan.degenerate_blue);
  }
  SUBCASE("exact fill") {
    const SequencePlan plan = center_blue_pulse(ir, {0.6e-6, 1.3e-6}, 0.7e-6);
    CHECK(plan.margin_before == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(plan.overlap.start == 0.6e-6);
  }
  SUBCASE("zero-width pulse sits at the midpoint with a warning flag") {
    const SequencePlan plan = center_blue_pulse(ir, {0.6e-6, 1.3e-6}, 0.0);
    CHECK(plan.degenerate_blue);
    CHECK(plan.blue_pulse.start == doctest::Approx(0.95e-6).epsilon(1e-12));
  }
  SUBCASE("too-long pulse reports the deficit") {
    try {
      center_blue_pulse(ir, {0.6e-6, 1.3e-6}, 0.9e-6);
      FAIL("expected TimingError");
    } catch (const TimingError& e) {
      CHECK(e.deficit_s() == doctest::Approx(0.2e-6).epsilon(1e-9));
    }
  }
  SUBCASE("margins are equal and the pulse is centered (property)") {
    oracle::Gen gen(12);
    for (int trial = 0; trial < 200; ++trial) {
      const double a = gen.uniform(0.0, 1e-6);
      const double b = a + gen.uniform(1e-9, 0.5e-6);
      const double w = gen.uniform(0.0, 1.0) * (b - a);
      const SequencePlan plan = center_blue_pulse({0.0, 1.5e-6}, {a, b}, w);
      CHECK(plan.margin_before == plan.margin_after);
      CHECK(std::abs(plan.blue_pulse.center() - 0.5 * (a + b)) <= 1e-15);
    }
  }
}
