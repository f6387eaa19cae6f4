#include "doctest.h"
#include "nuelab/hyplen.hpp"
#include "nuelab/core.hpp"

#include <cmath>

using namespace nue;

TEST_CASE("hyperbolic pythagoras") {
    CHECK(hyperbolic_pythagoras(1, 1) == doctest::Approx(std::acosh(std::cosh(1.0) * std::cosh(1.0))).epsilon(1e-12));
    CHECK(hyperbolic_pythagoras(1, 1) == doctest::Approx(1.5136).epsilon(1e-4));
    CHECK(hyperbolic_pythagoras(0, 0) == 0.0);
    CHECK(hyperbolic_pythagoras(400, 300) == doctest::Approx(700 - std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("collar and torus terms") {
    CHECK(static_cast<double>(collar_crossing_length(5, 0.01)) == doctest::Approx(46.0517).epsilon(1e-5));
    CHECK_THROWS_AS(collar_crossing_length(5, 1.5), ModelError);
    CHECK_THROWS_AS(collar_crossing_length(5, 0), ModelError);
    auto e = torus_arc_length(3, 1, 0.05);
    CHECK(e.total > 0);
    CHECK(e.regime_valid);
    auto f = torus_arc_length(3, 1, 2.0);
    CHECK_FALSE(f.regime_valid);
}

TEST_CASE("length estimate bookkeeping") {
    LengthEstimate e;
    e.add("a", "minus", 1.5);
    e.add("b", "plus", 2.0);
    e.add("c", "collar", 0.25);
    e.add("d", "plus", 100.0, false);
    CHECK(static_cast<double>(e.total) == 3.75);
    CHECK(static_cast<double>(e.group_total("plus")) == 2.0);
    e.flag("x");
    CHECK_FALSE(e.regime_valid);
}

TEST_CASE("punctured rectangle band") {
    auto a = punctured_rect_horizontal_length(50.0);
    auto b = punctured_rect_horizontal_length(100.0);
    CHECK(b.mid - a.mid == doctest::Approx(4 * std::log(2.0)).epsilon(1e-12));
    CHECK(a.lo < a.mid);
    CHECK(a.mid < a.hi);
    CHECK_THROWS_AS(punctured_rect_horizontal_length(0.5), ModelError);
}

TEST_CASE("extremal length bounds") {
    auto b = extremal_length_bounds(2.0, 4.0, 0.5, std::make_pair(std::exp(-1.0), 1.0));
    REQUIRE(b.slit_model);
    CHECK(*b.slit_model == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.lo <= b.hi);
    LengthModel bad;
    bad.D = -1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}
