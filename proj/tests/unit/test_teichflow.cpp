#include "doctest.h"
#include "nuelab/teichflow.hpp"

#include <cmath>
#include <sstream>

using namespace nue;

TEST_CASE("half log norm") {
    CHECK(half_log_norm(9, 13) == doctest::Approx(0.5 * std::log(250.0)).epsilon(1e-14));
    CHECK(half_log_norm(1, 1) == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-14));
    mpz_class big = mpz_class(1) << 3000;
    CHECK(half_log_norm(big, big) == doctest::Approx(3000 * std::log(2.0) + 0.5 * std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("doubling-family schedule") {
    auto cf = family_cf4(14);
    auto s2 = schedule_cf4(cf, 2);
    CHECK(s2.s.t == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    for (int k = 2; k <= 10; ++k) {
        auto s = schedule_cf4(cf, k);
        double z = s.z.t;
        CHECK(std::fabs(std::exp(2 * z) + 2 * z - k * std::log(2.0)) < 1e-12);
        CHECK(s.residual < 1e-12);
        CHECK(s.s.t < s.s.t + s.z.t);
        CHECK(s.s.t + s.z.t < s.t.t);
    }
    CHECK_THROWS_AS(solve_zk(1), ScheduleError);
}

TEST_CASE("areas and flow") {
    auto cf = family_cf4(12);
    for (int k = 1; k <= 6; ++k) {
        auto a = torus_areas(cf, nullptr, 0.0, k);
        CHECK(a.area_minus == a.area_plus);
        CHECK(a.area_minus + a.area_plus == doctest::Approx(2.0));
        auto b = torus_areas(cf, nullptr, 1.0, k);
        CHECK(b.area_minus + b.area_plus == doctest::Approx(2.0));
        CHECK(b.area_minus < b.area_plus);
    }
    std::vector<CurveClass> cs{CurveClass::gamma(1), CurveClass::sigma(cf, 3, TorusSide::minus),
                               CurveClass::beta(cf, 3, TorusSide::plus)};
    auto s0 = make_snapshot(cf, cs, 1, 1, 2);
    auto s1 = apply_flow(apply_flow(s0, 0.7), 1.3);
    auto s2 = apply_flow(s0, 2.0);
    for (size_t i = 0; i < cs.size(); ++i) {
        const auto& a = s1.curves[i].second;
        const auto& b = s2.curves[i].second;
        const auto& o = s0.curves[i].second;
        CHECK(a.log_h == doctest::Approx(b.log_h).epsilon(1e-14));
        if (o.sign_h && o.sign_v) CHECK(a.log_h + a.log_v == doctest::Approx(o.log_h + o.log_v).epsilon(1e-14));
    }
    std::ostringstream os;
    write_flow_csv(os, {s0, s2});
    CHECK(os.str().find('\n') != std::string::npos);
}
