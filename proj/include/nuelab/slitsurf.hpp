#pragma once

#include "nuelab/numberline.hpp"
#include "nuelab/veech.hpp"

#include <gmpxx.h>

#include <iosfwd>
#include <string>
#include <vector>

namespace nue {

// (sign, log|.|) per component; sign 0 means the component is exactly zero
struct HolonomyVector {
    int sign_h = 0, sign_v = 0;
    double log_h = 0, log_v = 0;

    static HolonomyVector from_linear(long double h, long double v);
    long double h() const;
    long double v() const;
    double log_length() const;  // log of the euclidean length
};

enum class CurveId { gamma1, gamma2, sigma, beta, zeta, custom };
enum class TorusSide { minus, plus, separating };

struct CurveClass {
    CurveId id = CurveId::custom;
    TorusSide torus = TorusSide::minus;
    mpz_class m = 0, n = 0;  // homology in the containing torus
    int k = 0;

    static CurveClass gamma(int i);
    static CurveClass sigma(const CFExpansion& cf, int k, TorusSide side);
    static CurveClass beta(const CFExpansion& cf, int k, TorusSide side);
    static CurveClass zeta(int k);
    static CurveClass custom(const mpz_class& m, const mpz_class& n, TorusSide side);
    std::string label() const;
};

const char* to_string(TorusSide s);

struct SlitRecord {
    int k = 0;
    mpq_class h_lo, h_hi;  // exact enclosure of sum_{j>=k} 2 ||q_{n_j} alpha||
    CertReal h;
    mpz_class crossings;     // sum_{j<k} 2 q_{n_j}, also the vertical length
    mpz_class orbit_crossings;  // same count from first returns of the orbit of 0
    bool orbit_checked = false;
    double log_h() const;
    double log_v() const;
};

struct SlitOptions {
    bool enforce_smallness = true;
    bool validate_orbit = true;
    uint64_t max_return_steps = 50'000'000;
};

struct SlitSequence {
    std::vector<SlitRecord> records;
    Ord small = Ord::undecided;
    std::vector<std::string> warnings;
};

HolonomyVector holonomy(const CurveClass& c, const CFExpansion& cf);

// first n >= 1 with ||n alpha|| < h_j on the integer surrogate, 0 if none within max_steps
uint64_t first_return(const Surrogate& S, uint64_t hnum, uint64_t max_steps);

SlitSequence slit_sequence(const CFExpansion& cf, int K, const SlitOptions& opt = {});

mpz_class intersection_number(const CurveClass& a, const CurveClass& b, const CFExpansion& cf);

// i((F, mu_c), gamma_i) with gamma_1 on sheet 0 and gamma_2 on sheet 1
double measure_pairings(const CurveClass& c, const MeasureEstimate& m, double cparam);

void write_curve_csv(std::ostream& os, const std::vector<CurveClass>& curves, const CFExpansion& cf);

}  // namespace nue
