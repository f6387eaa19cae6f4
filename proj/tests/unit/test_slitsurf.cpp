#include "doctest.h"
#include "nuelab/slitsurf.hpp"

#include <cmath>
#include <sstream>

using namespace nue;

TEST_CASE("holonomy of marked curves") {
    auto cf = family_cf4(12);
    auto g = holonomy(CurveClass::gamma(1), cf);
    CHECK(g.sign_h == 1);
    CHECK(g.log_h == 0.0);
    CHECK(g.sign_v == 0);
    for (int k = 2; k <= 6; ++k) {
        auto s = holonomy(CurveClass::sigma(cf, k, TorusSide::plus), cf);
        double d = nearest_int_distance(cf, cf.n(k)).mid();
        CHECK(std::exp(s.log_h) == doctest::Approx(d).epsilon(1e-12));
        auto b = holonomy(CurveClass::beta(cf, k, TorusSide::minus), cf);
        ConvergentTable t(cf);
        CHECK(std::exp(b.log_v) == doctest::Approx(t.q(cf.n(k) - 1).get_d()));
    }
    CHECK_THROWS_AS(holonomy(CurveClass::zeta(2), cf), ModelError);
}

TEST_CASE("slit sequence on the doubling family") {
    auto cf = family_cf4(12);
    SlitOptions opt;
    opt.enforce_smallness = false;
    auto seq = slit_sequence(cf, 6, opt);
    REQUIRE(seq.records.size() == 6);
    CHECK(seq.records[0].crossings == 0);
    CHECK(seq.records[2].crossings == 8);
    for (size_t i = 0; i + 1 < seq.records.size(); ++i) {
        const auto& a = seq.records[i];
        const auto& b = seq.records[i + 1];
        auto d = nearest_int_distance_bounds(cf, cf.n(a.k));
        CHECK(a.h_lo - b.h_lo == 2 * d.first);
        CHECK(a.h_hi - b.h_hi == 2 * d.second);
        CHECK(b.h.upper() < a.h.upper());
        CHECK(a.orbit_checked);
        CHECK(a.orbit_crossings == a.crossings);
    }
    auto sb = slit_base_bounds(cf);
    CHECK(seq.records[0].h_lo == sb.first);
    CHECK_THROWS_AS(slit_sequence(cf, 3), ModelError);
}

TEST_CASE("intersection numbers") {
    auto cf = family_cf4(12);
    auto s = CurveClass::custom(9, 13, TorusSide::minus);
    CHECK(intersection_number(CurveClass::gamma(1), s, cf) == 13);
    for (int k = 2; k <= 6; ++k) {
        auto sg = CurveClass::sigma(cf, k, TorusSide::minus);
        auto bt = CurveClass::beta(cf, k, TorusSide::minus);
        CHECK(intersection_number(sg, bt, cf) == 1);
        ConvergentTable t(cf);
        CHECK(intersection_number(CurveClass::gamma(2), sg, cf) == t.q(cf.n(k)));
        CHECK(intersection_number(CurveClass::gamma(1), CurveClass::sigma(cf, k, TorusSide::plus), cf) ==
              intersection_number(CurveClass::gamma(2), CurveClass::sigma(cf, k, TorusSide::minus), cf));
    }
    CHECK(intersection_number(CurveClass::gamma(1), CurveClass::zeta(3), cf) == 8);
    CHECK_THROWS_AS(intersection_number(CurveClass::zeta(2), CurveClass::zeta(3), cf), UnsupportedPair);
}

TEST_CASE("measure pairings") {
    MeasureEstimate m;
    m.minus = {0.3, 0, 0, 1.7, 0, 0};
    m.plus = {0.7, 0, 0, 1.3, 0, 0};
    CHECK(measure_pairings(CurveClass::gamma(1), m, 0.5) == doctest::Approx(0.6));
    CHECK(measure_pairings(CurveClass::gamma(1), m, 1.0) == doctest::Approx(0.7));
    MeasureEstimate s;
    s.minus = {0.4, 0, 0, 0.6, 0, 0};
    s.plus = {0.6, 0, 0, 0.4, 0, 0};
    CHECK(measure_pairings(CurveClass::gamma(1), s, 0) == measure_pairings(CurveClass::gamma(2), s, 0));
}

TEST_CASE("curve csv") {
    auto cf = family_cf4(10);
    std::ostringstream os;
    write_curve_csv(os, {CurveClass::gamma(1), CurveClass::sigma(cf, 3, TorusSide::plus), CurveClass::zeta(3)}, cf);
    std::string s = os.str();
    CHECK(s.find("sigma+3,plus,9,13") != std::string::npos);
    CHECK(s.find("zeta3,separating") != std::string::npos);
}
