#include "nuelab/certreal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace nue {

CertReal::CertReal(long prec) : prec_(prec) {
    mpfr_init2(lo_, prec);
    mpfr_init2(hi_, prec);
    mpfr_set_zero(lo_, 1);
    mpfr_set_zero(hi_, 1);
}

CertReal::CertReal(const CertReal& o) : prec_(o.prec_) {
    mpfr_init2(lo_, prec_);
    mpfr_init2(hi_, prec_);
    mpfr_set(lo_, o.lo_, MPFR_RNDD);
    mpfr_set(hi_, o.hi_, MPFR_RNDU);
}

CertReal::CertReal(CertReal&& o) noexcept : prec_(o.prec_) {
    mpfr_init2(lo_, prec_);
    mpfr_init2(hi_, prec_);
    mpfr_swap(lo_, o.lo_);
    mpfr_swap(hi_, o.hi_);
}

CertReal& CertReal::operator=(const CertReal& o) {
    if (this == &o) return *this;
    prec_ = o.prec_;
    mpfr_set_prec(lo_, prec_);
    mpfr_set_prec(hi_, prec_);
    mpfr_set(lo_, o.lo_, MPFR_RNDD);
    mpfr_set(hi_, o.hi_, MPFR_RNDU);
    return *this;
}

CertReal& CertReal::operator=(CertReal&& o) noexcept {
    std::swap(prec_, o.prec_);
    mpfr_swap(lo_, o.lo_);
    mpfr_swap(hi_, o.hi_);
    return *this;
}

CertReal::~CertReal() {
    mpfr_clear(lo_);
    mpfr_clear(hi_);
}

CertReal CertReal::exact(const mpq_class& q, long prec) {
    CertReal r(prec);
    mpfr_set_q(r.lo_, q.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(r.hi_, q.get_mpq_t(), MPFR_RNDU);
    return r;
}

CertReal CertReal::between(const mpq_class& a, const mpq_class& b, long prec) {
    CertReal r(prec);
    const mpq_class& lo = a < b ? a : b;
    const mpq_class& hi = a < b ? b : a;
    mpfr_set_q(r.lo_, lo.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(r.hi_, hi.get_mpq_t(), MPFR_RNDU);
    return r;
}

CertReal CertReal::from_double(double x, long prec) {
    CertReal r(std::max<long>(prec, 64));
    mpfr_set_d(r.lo_, x, MPFR_RNDD);
    mpfr_set_d(r.hi_, x, MPFR_RNDU);
    return r;
}

double CertReal::lower() const { return mpfr_get_d(lo_, MPFR_RNDD); }
double CertReal::upper() const { return mpfr_get_d(hi_, MPFR_RNDU); }

double CertReal::mid() const {
    mpfr_t m;
    mpfr_init2(m, prec_ + 1);
    mpfr_add(m, lo_, hi_, MPFR_RNDN);
    mpfr_div_2ui(m, m, 1, MPFR_RNDN);
    double d = mpfr_get_d(m, MPFR_RNDN);
    mpfr_clear(m);
    return d;
}

double CertReal::radius() const {
    mpfr_t w;
    mpfr_init2(w, prec_);
    mpfr_sub(w, hi_, lo_, MPFR_RNDU);
    mpfr_div_2ui(w, w, 1, MPFR_RNDU);
    double d = mpfr_get_d(w, MPFR_RNDU);
    mpfr_clear(w);
    return d;
}

double CertReal::log_mid() const {
    mpfr_t m;
    mpfr_init2(m, prec_ + 1);
    mpfr_add(m, lo_, hi_, MPFR_RNDN);
    mpfr_div_2ui(m, m, 1, MPFR_RNDN);
    if (mpfr_sgn(m) <= 0) {
        mpfr_clear(m);
        return -INFINITY;
    }
    mpfr_log(m, m, MPFR_RNDN);
    double d = mpfr_get_d(m, MPFR_RNDN);
    mpfr_clear(m);
    return d;
}

std::string CertReal::mid_string(int digits) const {
    mpfr_t m;
    mpfr_init2(m, prec_ + 1);
    mpfr_add(m, lo_, hi_, MPFR_RNDN);
    mpfr_div_2ui(m, m, 1, MPFR_RNDN);
    std::vector<char> buf(static_cast<size_t>(digits) + 32);
    mpfr_snprintf(buf.data(), buf.size(), "%.*Rg", digits, m);
    mpfr_clear(m);
    return std::string(buf.data());
}

bool CertReal::contains(const mpq_class& q) const {
    return mpfr_cmp_q(lo_, q.get_mpq_t()) <= 0 && mpfr_cmp_q(hi_, q.get_mpq_t()) >= 0;
}

bool CertReal::positive() const { return mpfr_sgn(lo_) > 0; }

namespace {
long pmax(long a, long b) { return a > b ? a : b; }
}  // namespace

CertReal CertReal::operator+(const CertReal& o) const {
    CertReal r(pmax(prec_, o.prec_));
    mpfr_add(r.lo_, lo_, o.lo_, MPFR_RNDD);
    mpfr_add(r.hi_, hi_, o.hi_, MPFR_RNDU);
    return r;
}

CertReal CertReal::operator-(const CertReal& o) const {
    CertReal r(pmax(prec_, o.prec_));
    mpfr_sub(r.lo_, lo_, o.hi_, MPFR_RNDD);
    mpfr_sub(r.hi_, hi_, o.lo_, MPFR_RNDU);
    return r;
}

CertReal CertReal::operator*(const CertReal& o) const {
    long p = pmax(prec_, o.prec_);
    CertReal r(p);
    mpfr_t t;
    mpfr_init2(t, p);
    mpfr_srcptr a[2] = {lo_, hi_};
    mpfr_srcptr b[2] = {o.lo_, o.hi_};
    mpfr_set_inf(r.lo_, 1);
    mpfr_set_inf(r.hi_, -1);
    for (auto x : a) {
        for (auto y : b) {
            mpfr_mul(t, x, y, MPFR_RNDD);
            if (mpfr_less_p(t, r.lo_)) mpfr_set(r.lo_, t, MPFR_RNDD);
            mpfr_mul(t, x, y, MPFR_RNDU);
            if (mpfr_greater_p(t, r.hi_)) mpfr_set(r.hi_, t, MPFR_RNDU);
        }
    }
    mpfr_clear(t);
    return r;
}

CertReal CertReal::operator/(const CertReal& o) const {
    if (mpfr_sgn(o.lo_) <= 0 && mpfr_sgn(o.hi_) >= 0)
        throw std::domain_error("CertReal division by interval containing zero");
    long p = pmax(prec_, o.prec_);
    CertReal r(p);
    mpfr_t t;
    mpfr_init2(t, p);
    mpfr_srcptr a[2] = {lo_, hi_};
    mpfr_srcptr b[2] = {o.lo_, o.hi_};
    mpfr_set_inf(r.lo_, 1);
    mpfr_set_inf(r.hi_, -1);
    for (auto x : a) {
        for (auto y : b) {
            mpfr_div(t, x, y, MPFR_RNDD);
            if (mpfr_less_p(t, r.lo_)) mpfr_set(r.lo_, t, MPFR_RNDD);
            mpfr_div(t, x, y, MPFR_RNDU);
            if (mpfr_greater_p(t, r.hi_)) mpfr_set(r.hi_, t, MPFR_RNDU);
        }
    }
    mpfr_clear(t);
    return r;
}

CertReal CertReal::operator-() const {
    CertReal r(prec_);
    mpfr_neg(r.lo_, hi_, MPFR_RNDD);
    mpfr_neg(r.hi_, lo_, MPFR_RNDU);
    return r;
}

CertReal CertReal::abs() const {
    if (mpfr_sgn(lo_) >= 0) return *this;
    if (mpfr_sgn(hi_) <= 0) return -*this;
    CertReal r(prec_);
    mpfr_set_zero(r.lo_, 1);
    if (mpfr_cmpabs(lo_, hi_) > 0)
        mpfr_abs(r.hi_, lo_, MPFR_RNDU);
    else
        mpfr_set(r.hi_, hi_, MPFR_RNDU);
    return r;
}

CertReal CertReal::log() const {
    if (mpfr_sgn(lo_) <= 0) throw std::domain_error("CertReal log of non-positive interval");
    CertReal r(prec_);
    mpfr_log(r.lo_, lo_, MPFR_RNDD);
    mpfr_log(r.hi_, hi_, MPFR_RNDU);
    return r;
}

CertReal CertReal::widen(const CertReal& rad) const {
    CertReal r(pmax(prec_, rad.prec_));
    mpfr_t a;
    mpfr_init2(a, r.prec_);
    mpfr_abs(a, rad.hi_, MPFR_RNDU);
    if (mpfr_cmpabs(rad.lo_, rad.hi_) > 0) mpfr_abs(a, rad.lo_, MPFR_RNDU);
    mpfr_sub(r.lo_, lo_, a, MPFR_RNDD);
    mpfr_add(r.hi_, hi_, a, MPFR_RNDU);
    mpfr_clear(a);
    return r;
}

CertReal CertReal::hull(const CertReal& o) const {
    CertReal r(pmax(prec_, o.prec_));
    mpfr_min(r.lo_, lo_, o.lo_, MPFR_RNDD);
    mpfr_max(r.hi_, hi_, o.hi_, MPFR_RNDU);
    return r;
}

Ord compare(const CertReal& a, const CertReal& b) {
    if (mpfr_less_p(a.hi_, b.lo_)) return Ord::less;
    if (mpfr_greater_p(a.lo_, b.hi_)) return Ord::greater;
    return Ord::undecided;
}

}  // namespace nue
