#include <doctest.h>

#include <random>

#include "blp/error.hpp"
#include "blp/segment.hpp"

using namespace blp;

TEST_CASE("segment rejects empty or inverted spans") {
    CHECK_THROWS_AS(TemporalSegment(5.0, 5.0), InvalidParameter);
    CHECK_THROWS_AS(TemporalSegment(6.0, 5.0), InvalidParameter);
    CHECK_THROWS_AS(TemporalSegment(0.0, std::numeric_limits<double>::infinity()), InvalidParameter);
    const TemporalSegment s(2.0, 6.0);
    CHECK(s.length() == 4.0);
    CHECK(s.center() == 4.0);
}

TEST_CASE("unit grid needs at least two units") {
    CHECK_THROWS_AS(UnitGrid(TemporalSegment(0, 8), 1), InvalidParameter);
    const UnitGrid g(TemporalSegment(0, 8), 4);
    CHECK(g.unit_width() == 2.0);
    CHECK(g.left_edge(3) == 6.0);
    CHECK(g.right_edge(3) == 8.0);
    CHECK(g.unit_center(1) == 3.0);
}

TEST_CASE("extend_interval") {
    CHECK(extend_interval({10, 20}, 2.0) == TemporalSegment(5, 25));
    CHECK(extend_interval({10, 20}, 1.0) == TemporalSegment(10, 20));
    CHECK(extend_interval({0, 8}, 1.5) == TemporalSegment(-2, 10));
    CHECK_THROWS_AS(extend_interval({0, 8}, 0.9), InvalidParameter);
}

TEST_CASE("extend_interval composes multiplicatively") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> pos(0.0, 100.0);
    std::uniform_real_distribution<double> len(0.5, 50.0);
    std::uniform_real_distribution<double> gamma(1.0, 3.0);
    for (int k = 0; k < 1000; ++k) {
        const double s = pos(rng);
        const TemporalSegment p(s, s + len(rng));
        const double a = gamma(rng);
        const double b = gamma(rng);
        const auto twice = extend_interval(extend_interval(p, a), b);
        const auto once = extend_interval(p, a * b);
        CHECK(twice.start() == doctest::Approx(once.start()).epsilon(1e-9));
        CHECK(twice.end() == doctest::Approx(once.end()).epsilon(1e-9));
    }
}

TEST_CASE("clamp_interval is separate from extension") {
    CHECK(clamp_interval({-2, 10}, 8.0) == TemporalSegment(0, 8));
    CHECK(clamp_interval({1, 3}, 8.0) == TemporalSegment(1, 3));
    CHECK_THROWS_AS(clamp_interval({9, 12}, 8.0), InvalidParameter);
}

TEST_CASE("tiou") {
    CHECK(tiou({0, 10}, {5, 15}) == doctest::Approx(1.0 / 3.0));
    CHECK(tiou({0, 10}, {0, 10}) == 1.0);
    CHECK(tiou({0, 5}, {5, 10}) == 0.0);
    CHECK(tiou({0, 5}, {7, 10}) == 0.0);
}

TEST_CASE("tiou is symmetric and bounded") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    for (int k = 0; k < 1000; ++k) {
        const double a0 = u(rng);
        const double b0 = u(rng);
        const TemporalSegment a(a0, a0 + 0.1 + u(rng));
        const TemporalSegment b(b0, b0 + 0.1 + u(rng));
        const double ab = tiou(a, b);
        CHECK(ab == tiou(b, a));
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0);
        CHECK(tiou(a, a) == 1.0);
    }
}

TEST_CASE("unit_of_time uses half-open units") {
    const UnitGrid g(TemporalSegment(0, 8), 4);
    CHECK(unit_of_time(g, 2.5) == 1);
    CHECK(unit_of_time(g, 2.0) == 1);
    CHECK(unit_of_time(g, 0.0) == 0);
    CHECK_FALSE(unit_of_time(g, 8.0).has_value());
    CHECK_FALSE(unit_of_time(g, -0.1).has_value());
}

TEST_CASE("unit_of_time round-trips against the unit edges") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> ms(2, 64);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 2000; ++k) {
        const double start = 100.0 * u(rng) - 50.0;
        const UnitGrid g(TemporalSegment(start, start + 1.0 + 200.0 * u(rng)), ms(rng));
        const double t = g.interval().start() + u(rng) * g.interval().length();
        const auto unit = unit_of_time(g, t);
        if (!unit) {
            continue;
        }
        CHECK(g.left_edge(*unit) <= t);
        CHECK(t < g.left_edge(*unit) + g.unit_width() + 1e-9);
    }
}

TEST_CASE("units tile the interval") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    for (int m : {2, 3, 7, 32, 48, 64}) {
        const double s = u(rng);
        const UnitGrid g(TemporalSegment(s, s + 1.0 + u(rng)), m);
        double total = 0.0;
        for (int i = 0; i < m; ++i) {
            CHECK(g.right_edge(i) == g.left_edge(i + 1));
            total += g.right_edge(i) - g.left_edge(i);
        }
        CHECK(g.left_edge(0) == g.interval().start());
        CHECK(g.right_edge(m - 1) == g.interval().end());
        CHECK(total == doctest::Approx(g.interval().length()).epsilon(1e-9));
    }
}

TEST_CASE("time_of_units maps unit edges back to time") {
    const UnitGrid g(TemporalSegment(0, 8), 4);
    CHECK(time_of_units(g, 1, 2) == TemporalSegment(2.0, 6.0));
    CHECK(time_of_units(g, 0, 3) == TemporalSegment(0.0, 8.0));
    const UnitGrid fine(TemporalSegment(5, 25), 32);
    const auto one = time_of_units(fine, 0, 0);
    CHECK(one.start() == 5.0);
    CHECK(one.end() == doctest::Approx(5.625));
    CHECK_THROWS_AS(time_of_units(g, 2, 1), InvalidParameter);
    CHECK_THROWS_AS(time_of_units(g, -1, 1), InvalidParameter);
    CHECK_THROWS_AS(time_of_units(g, 0, 4), InvalidParameter);
}

TEST_CASE("class label zero is background") {
    CHECK(ClassLabel{0}.is_background());
    CHECK_FALSE(ClassLabel{3}.is_background());
    CHECK(ClassLabel{1} < ClassLabel{2});
}
