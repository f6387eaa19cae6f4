#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <string>

namespace nue {

enum class Ord { less, greater, undecided };

struct Precision {
    long start = 128;
    long cap = 16384;
};

// Closed interval [lo, hi] with MPFR endpoints rounded outward.
class CertReal {
public:
    explicit CertReal(long prec = 128);
    CertReal(const CertReal& o);
    CertReal(CertReal&& o) noexcept;
    CertReal& operator=(const CertReal& o);
    CertReal& operator=(CertReal&& o) noexcept;
    ~CertReal();

    static CertReal exact(const mpq_class& q, long prec);
    static CertReal between(const mpq_class& a, const mpq_class& b, long prec);
    static CertReal from_double(double x, long prec = 128);

    long precision() const { return prec_; }
    double lower() const;
    double upper() const;
    double mid() const;
    double radius() const;
    double log_mid() const;  // log of the midpoint, valid for tiny/huge magnitudes
    std::string mid_string(int digits = 20) const;
    bool contains(const mpq_class& q) const;
    bool positive() const;

    CertReal operator+(const CertReal& o) const;
    CertReal operator-(const CertReal& o) const;
    CertReal operator*(const CertReal& o) const;
    CertReal operator/(const CertReal& o) const;
    CertReal operator-() const;
    CertReal abs() const;
    CertReal log() const;
    CertReal widen(const CertReal& r) const;  // [lo - r.hi, hi + r.hi]
    CertReal hull(const CertReal& o) const;

    friend Ord compare(const CertReal& a, const CertReal& b);

    mpfr_srcptr lo_ptr() const { return lo_; }
    mpfr_srcptr hi_ptr() const { return hi_; }

private:
    long prec_;
    mpfr_t lo_, hi_;
};

Ord compare(const CertReal& a, const CertReal& b);

// Re-evaluate `check(prec)` with doubling precision until it decides or the cap is hit.
template <class F>
Ord decide(F&& check, const Precision& p, long* used = nullptr) {
    for (long prec = p.start; prec <= p.cap; prec *= 2) {
        Ord r = check(prec);
        if (used) *used = prec;
        if (r != Ord::undecided) return r;
    }
    return Ord::undecided;
}

}  // namespace nue
