#pragma once

#include "nuelab/certreal.hpp"
#include "nuelab/numberline.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "json.hpp"

namespace nue {

struct SkewState {
    CertReal x;
    int sheet = 0;
};

// alpha replaced by P/Q exactly; the circle is scaled by Q so every
// comparison is an integer comparison.
struct Surrogate {
    uint64_t P = 0, Q = 1;
    uint64_t bnum = 0;  // J = [0, bnum)
    uint64_t cut = 0;   // I_2 = [bnum, cut), I_3 = [cut, Q)
    int order = 0;
    double alpha_error = 0;  // upper bound on |alpha - P/Q|
};

class SkewIET {
public:
    explicit SkewIET(const CFExpansion& cf, const Precision& prec = {});

    static constexpr std::array<int, 6> permutation{3, 4, 2, 6, 1, 5};

    const CFExpansion& cf() const { return cf_; }
    const Precision& precision() const { return prec_; }
    CertReal alpha(long prec) const;
    CertReal b(long prec) const;
    // |I_1|..|I_6| for the Lebesgue normalization, each sheet summing to 1
    std::array<CertReal, 6> interval_lengths(long prec) const;
    const Surrogate& surrogate() const { return sur_; }
    int interval_of(uint64_t x, int sheet) const;

private:
    CFExpansion cf_;
    Precision prec_;
    AlphaBounds ab_;
    mpq_class blo_, bhi_;
    Surrogate sur_;
};

// certified single step of T(x, i) = (x + alpha mod 1, i + chi_J(x))
SkewState step(const SkewIET& T, const SkewState& s);
SkewState step_inverse(const SkewIET& T, const SkewState& s);

struct OrbitSample {
    uint64_t n = 0;
    uint64_t x = 0;  // surrogate numerator, position x / Q
    int sheet = 0;
    double running_fraction = 0;
};

struct BirkhoffSeries {
    uint64_t x0 = 0;
    int sheet0 = 0;
    uint64_t N = 0;
    std::vector<OrbitSample> samples;
    uint64_t sheet0_count = 0;
    double tail_fraction = 0;  // sheet-0 fraction over steps [N/2, N)
    std::array<uint64_t, 6> tail_occupation{};
    std::vector<double> batch_fraction;
    bool drift_warning = false;  // accumulated |alpha - P/Q| error exceeds one grid cell
};

// stride = 0 keeps only the final sample
BirkhoffSeries birkhoff_torus_fraction(const SkewIET& T, uint64_t x0, int sheet0, uint64_t N,
                                       uint64_t stride = 0, int batches = 20);

struct SeedPoint {
    uint64_t x = 0;
    int sheet = 0;
    bool operator==(const SeedPoint& o) const { return x == o.x && sheet == o.sheet; }
};
// grid (j + 1/2)/M plus the point 0
std::vector<SeedPoint> default_seeds(const SkewIET& T, int M);

struct MeasureEstimate {
    std::array<double, 6> minus{}, plus{};  // total mass 2 each
    std::array<double, 6> radius_minus{}, radius_plus{};
    std::array<double, 6> lebesgue{};
    std::array<double, 7> edges{};  // interval endpoints on [0, 2], sheet 1 shifted by 1
    double confidence_radius = 0;
    uint64_t sample_count = 0;
    int seeds_minus = 0, seeds_plus = 0;
    double separation = 0;
    double lebesgue_deviation = 0;
    bool measured = true;

    double sheet_mass(int which, int sheet) const;  // which: -1 or +1
    std::array<double, 6> normalized(int which) const;
    std::array<double, 6> mixed(double c) const;  // masses of mu_c
    MeasureEstimate swapped() const;
};

MeasureEstimate estimate_ergodic_measures(const SkewIET& T, const std::vector<SeedPoint>& seeds,
                                          uint64_t N, double min_separation = 2.0);

// mu_c([0, x]) on the doubled circle [0, 2]
CertReal conjugate_to_c(const CertReal& x, double c, const MeasureEstimate& m);

void write_orbit_csv(std::ostream& os, const SkewIET& T, const std::vector<BirkhoffSeries>& runs);
nlohmann::json to_json(const MeasureEstimate& m);

}  // namespace nue
