#include "doctest.h"
#include "nuelab/veech.hpp"

#include <cmath>

using namespace nue;

TEST_CASE("skew IET layout") {
    SkewIET T(family_cf4(10));
    CHECK(SkewIET::permutation == std::array<int, 6>{3, 4, 2, 6, 1, 5});
    auto L = T.interval_lengths(128);
    CHECK(L[0].mid() == doctest::Approx(0.786).epsilon(1e-3));
    CHECK(L[0].mid() + L[1].mid() + L[2].mid() == doctest::Approx(1.0));
    CHECK(L[3].mid() == L[0].mid());
    const auto& S = T.surrogate();
    CHECK(S.bnum < S.Q);
    CHECK(T.interval_of(0, 0) == 0);
    CHECK(T.interval_of(S.Q - 1, 1) == 5);
}

TEST_CASE("certified step") {
    SkewIET T(family_cf4(10));
    double b = T.b(128).mid();
    SkewState out{CertReal::from_double(b + 0.1), 0};
    CHECK(step(T, out).sheet == 0);
    SkewState in{CertReal::from_double(b / 2), 1};
    SkewState n = step(T, in);
    CHECK(n.sheet == 0);
    SkewState back = step_inverse(T, n);
    CHECK(back.sheet == 1);
    CHECK(back.x.lower() <= b / 2);
    CHECK(back.x.upper() >= b / 2);
    SkewState edge{T.b(64), 0};
    CHECK_THROWS_AS(step(T, edge), PrecisionExhausted);
}

TEST_CASE("integer surrogate orbit is exactly invertible") {
    SkewIET T(family_cf4(8));
    const auto& S = T.surrogate();
    uint64_t x = 12345 % S.Q;
    for (int i = 0; i < 1000; ++i) {
        uint64_t y = x + S.P >= S.Q ? x + S.P - S.Q : x + S.P;
        uint64_t z = y >= S.P ? y - S.P : y + S.Q - S.P;
        CHECK(z == x);
        x = y;
    }
}

TEST_CASE("birkhoff series") {
    SkewIET T(family_cf4(8));
    auto one = birkhoff_torus_fraction(T, 0, 0, 1);
    REQUIRE(one.samples.size() == 1);
    CHECK((one.samples[0].running_fraction == 0.0 || one.samples[0].running_fraction == 1.0));

    // rational rotation: sheet pattern repeats with period dividing 2Q
    auto small = explicit_cf({mpz_class(3), mpz_class(1000)}, true);
    small.subseq = {1};
    SkewIET R(small);
    uint64_t Q = R.surrogate().Q;
    auto a = birkhoff_torus_fraction(R, 0, 0, 2 * Q, 1);
    auto c = birkhoff_torus_fraction(R, 0, 0, 4 * Q, 1);
    CHECK(a.samples.back().x == 0);
    CHECK(a.samples.back().sheet == 0);
    CHECK(c.samples[2 * Q - 1].running_fraction == doctest::Approx(c.samples.back().running_fraction));
}

TEST_CASE("ergodic measure estimates") {
    SkewIET T(family_cf4(8));
    auto seeds = default_seeds(T, 8);
    auto m = estimate_ergodic_measures(T, seeds, 2'000'000);
    CHECK(m.seeds_minus > 0);
    CHECK(m.seeds_plus > 0);
    double s0 = m.sheet_mass(-1, 0) + m.sheet_mass(+1, 0);
    CHECK(s0 == doctest::Approx(2.0).epsilon(0.02));
    double tot = 0;
    for (double v : m.plus) tot += v;
    CHECK(tot == doctest::Approx(2.0));
    CHECK(m.sheet_mass(+1, 0) > 1.05);

    std::vector<SeedPoint> flipped;
    for (auto s : seeds) flipped.push_back({s.x, 1});
    auto w = estimate_ergodic_measures(T, flipped, 2'000'000);
    auto sw = m.swapped();
    for (size_t i = 0; i < 6; ++i) {
        CHECK(std::abs(w.plus[i] - sw.plus[i]) < 0.02);
        CHECK(std::abs(w.minus[i] - sw.minus[i]) < 0.02);
    }

    CertReal zero = conjugate_to_c(CertReal::from_double(0.0), 0.3, m);
    CHECK(zero.lower() == 0.0);
    CHECK(zero.upper() == 0.0);
    CertReal half = conjugate_to_c(CertReal::from_double(0.5), 0.0, m);
    CHECK(half.mid() == doctest::Approx(0.5).epsilon(0.05));
    CertReal end = conjugate_to_c(CertReal::from_double(1.0), 1.0, m);
    CHECK(end.mid() == doctest::Approx(m.sheet_mass(+1, 0)).epsilon(1e-3));
    double prev = -1;
    for (int i = 0; i <= 20; ++i) {
        double v = conjugate_to_c(CertReal::from_double(i / 10.0), 0.5, m).mid();
        CHECK(v >= prev);
        prev = v;
    }
    auto mix = m.mixed(0.4);
    CHECK(std::abs(mix[0] - mix[3]) < 0.05);
}

TEST_CASE("inconclusive split") {
    SkewIET T(family_cf4(8));
    std::vector<SeedPoint> one{{0, 0}, {0, 0}};
    CHECK_THROWS_AS(estimate_ergodic_measures(T, one, 10000), Inconclusive);
}
