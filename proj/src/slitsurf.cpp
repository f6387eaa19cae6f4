#include "nuelab/slitsurf.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <ostream>

namespace nue {

HolonomyVector HolonomyVector::from_linear(long double h, long double v) {
    HolonomyVector r;
    r.sign_h = h > 0 ? 1 : (h < 0 ? -1 : 0);
    r.sign_v = v > 0 ? 1 : (v < 0 ? -1 : 0);
    r.log_h = r.sign_h ? static_cast<double>(std::log(std::fabs(h))) : 0.0;
    r.log_v = r.sign_v ? static_cast<double>(std::log(std::fabs(v))) : 0.0;
    return r;
}

long double HolonomyVector::h() const { return sign_h ? sign_h * std::exp(static_cast<long double>(log_h)) : 0.0L; }
long double HolonomyVector::v() const { return sign_v ? sign_v * std::exp(static_cast<long double>(log_v)) : 0.0L; }

double HolonomyVector::log_length() const {
    if (!sign_h && !sign_v) return -std::numeric_limits<double>::infinity();
    if (!sign_h) return log_v;
    if (!sign_v) return log_h;
    double hi = std::max(log_h, log_v), lo = std::min(log_h, log_v);
    return hi + 0.5 * std::log1p(std::exp(2 * (lo - hi)));
}

CurveClass CurveClass::gamma(int i) {
    if (i != 1 && i != 2) throw std::invalid_argument("gamma index must be 1 or 2");
    CurveClass c;
    c.id = i == 1 ? CurveId::gamma1 : CurveId::gamma2;
    c.torus = i == 1 ? TorusSide::minus : TorusSide::plus;
    c.m = 1;
    c.n = 0;
    return c;
}

CurveClass CurveClass::sigma(const CFExpansion& cf, int k, TorusSide side) {
    ConvergentTable t(cf);
    int nk = cf.n(k);
    CurveClass c;
    c.id = CurveId::sigma;
    c.torus = side;
    c.m = t.p(nk);
    c.n = t.q(nk);
    c.k = k;
    return c;
}

CurveClass CurveClass::beta(const CFExpansion& cf, int k, TorusSide side) {
    ConvergentTable t(cf);
    int nk = cf.n(k);
    CurveClass c;
    c.id = CurveId::beta;
    c.torus = side;
    c.m = t.p(nk - 1);
    c.n = t.q(nk - 1);
    c.k = k;
    return c;
}

CurveClass CurveClass::zeta(int k) {
    CurveClass c;
    c.id = CurveId::zeta;
    c.torus = TorusSide::separating;
    c.k = k;
    return c;
}

CurveClass CurveClass::custom(const mpz_class& m, const mpz_class& n, TorusSide side) {
    CurveClass c;
    c.id = CurveId::custom;
    c.torus = side;
    c.m = m;
    c.n = n;
    return c;
}

const char* to_string(TorusSide s) {
    switch (s) {
        case TorusSide::minus: return "minus";
        case TorusSide::plus: return "plus";
        default: return "separating";
    }
}

std::string CurveClass::label() const {
    std::string side = torus == TorusSide::minus ? "-" : "+";
    switch (id) {
        case CurveId::gamma1: return "gamma1";
        case CurveId::gamma2: return "gamma2";
        case CurveId::sigma: return "sigma" + side + std::to_string(k);
        case CurveId::beta: return "beta" + side + std::to_string(k);
        case CurveId::zeta: return "zeta" + std::to_string(k);
        default: return "custom(" + m.get_str() + "," + n.get_str() + ")";
    }
}

double SlitRecord::log_h() const {
    mpq_class mid = (h_lo + h_hi) / 2;
    return sgn(mid) > 0 ? log_mpq(mid) : -std::numeric_limits<double>::infinity();
}

double SlitRecord::log_v() const {
    return sgn(crossings) > 0 ? log_mpz(crossings) : -std::numeric_limits<double>::infinity();
}

HolonomyVector holonomy(const CurveClass& c, const CFExpansion& cf) {
    if (c.id == CurveId::zeta) throw ModelError("separating curve has no torus holonomy; use slit_sequence");
    AlphaBounds ab = alpha_bounds(cf);
    mpq_class x = c.m - c.n * ab.hi, y = c.m - c.n * ab.lo;
    HolonomyVector r;
    if (sgn(x) * sgn(y) < 0 || (sgn(x) == 0) != (sgn(y) == 0))
        throw TruncationError("horizontal component of " + c.label() + " not resolved by the truncation");
    mpq_class mid = (x + y) / 2;
    r.sign_h = sgn(mid);
    if (r.sign_h) r.log_h = log_mpq(abs(mid));
    r.sign_v = sgn(c.n);
    if (r.sign_v) r.log_v = log_mpz(abs(c.n));
    return r;
}

uint64_t first_return(const Surrogate& S, uint64_t hnum, uint64_t max_steps) {
    uint64_t x = 0;
    for (uint64_t n = 1; n <= max_steps; ++n) {
        x += S.P;
        if (x >= S.Q) x -= S.Q;
        uint64_t d = std::min(x, S.Q - x);
        if (d < hnum) return n;
    }
    return 0;
}

SlitSequence slit_sequence(const CFExpansion& cf, int K, const SlitOptions& opt) {
    if (K > cf.subseq_count())
        throw TruncationError("slit_sequence: K=" + std::to_string(K) + " exceeds subsequence length");
    SlitSequence out;
    int usable = 0;
    for (int n : cf.subseq)
        if (n < cf.truncation_order()) ++usable;
    SlitBase base = slit_base_length(cf, usable);
    out.small = base.small;
    if (out.small != Ord::less) {
        if (opt.enforce_smallness)
            throw ModelError("construction invalid: slit base not below a third of ||q_{n_1 - 1} alpha||");
        out.warnings.push_back("smallness assumption fails; construction checked by orbit counting only");
    }

    ConvergentTable t(cf);
    std::vector<uint64_t> hnum;
    const Surrogate* S = nullptr;
    std::unique_ptr<SkewIET> T;
    if (opt.validate_orbit) {
        T = std::make_unique<SkewIET>(cf);
        S = &T->surrogate();
        mpz_class P = static_cast<unsigned long>(S->P), Q = static_cast<unsigned long>(S->Q);
        for (int j = 1; j <= cf.subseq_count(); ++j) {
            mpz_class acc = 0;
            for (int i = j; i <= cf.subseq_count(); ++i) {
                int n = cf.n(i);
                if (n >= S->order) break;
                acc += 2 * abs(mpz_class(t.q(n) * P - t.p(n) * Q));
            }
            hnum.push_back(mpz_get_ui(acc.get_mpz_t()));
        }
    }

    mpz_class cross = 0, orbit_cross = 0;
    bool orbit_ok = opt.validate_orbit;
    for (int k = 1; k <= K; ++k) {
        if (k >= 2) {
            int j = k - 1;
            int nj = cf.n(j);
            cross += 2 * t.q(nj);
            if (orbit_ok && nj < S->order - 1 && t.q(nj) <= static_cast<unsigned long>(opt.max_return_steps)) {
                uint64_t r = first_return(*S, hnum[static_cast<size_t>(j - 1)], opt.max_return_steps);
                if (mpz_class(static_cast<unsigned long>(r)) != t.q(nj))
                    throw InternalInconsistency("first return into slit " + std::to_string(j) + " at step " +
                                                std::to_string(r) + ", expected q_" + std::to_string(nj) + " = " +
                                                t.q(nj).get_str());
                orbit_cross += 2 * mpz_class(static_cast<unsigned long>(r));
            } else {
                orbit_ok = false;
            }
        }
        SlitRecord rec;
        rec.k = k;
        auto hb = slit_base_bounds(cf, k);
        rec.h_lo = hb.first;
        rec.h_hi = hb.second;
        rec.h = CertReal::between(hb.first, hb.second, 128);
        rec.crossings = cross;
        rec.orbit_checked = orbit_ok;
        rec.orbit_crossings = orbit_ok ? orbit_cross : mpz_class(0);
        out.records.push_back(rec);
    }
    return out;
}

mpz_class intersection_number(const CurveClass& a, const CurveClass& b, const CFExpansion& cf) {
    bool az = a.id == CurveId::zeta, bz = b.id == CurveId::zeta;
    auto is_gamma = [](const CurveClass& c) { return c.id == CurveId::gamma1 || c.id == CurveId::gamma2; };
    if (az || bz) {
        const CurveClass& z = az ? a : b;
        const CurveClass& o = az ? b : a;
        if (!is_gamma(o)) throw UnsupportedPair("intersection of " + a.label() + " and " + b.label() + " not modeled");
        SlitOptions opt;
        opt.enforce_smallness = false;
        auto seq = slit_sequence(cf, z.k, opt);
        const SlitRecord& r = seq.records.back();
        if (r.orbit_checked && r.orbit_crossings != r.crossings)
            throw InternalInconsistency("slit crossing count disagrees with orbit count");
        return r.crossings;
    }
    mpz_class d = a.m * b.n - b.m * a.n;
    return abs(d);
}

double measure_pairings(const CurveClass& c, const MeasureEstimate& m, double cparam) {
    if (c.id != CurveId::gamma1 && c.id != CurveId::gamma2)
        throw ModelError("measure pairing defined for gamma1 and gamma2 only");
    if (cparam < -1 || cparam > 1) throw ModelError("c outside [-1, 1]");
    int sheet = c.id == CurveId::gamma1 ? 0 : 1;
    return 0.5 * (1 - cparam) * m.sheet_mass(-1, sheet) + 0.5 * (1 + cparam) * m.sheet_mass(+1, sheet);
}

void write_curve_csv(std::ostream& os, const std::vector<CurveClass>& curves, const CFExpansion& cf) {
    os << "id,torus,m,n,h_log,v_log,crossings_with_gamma1,crossings_with_gamma2\n";
    char buf[64];
    auto num = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.12g", x);
        return std::string(buf);
    };
    for (const auto& c : curves) {
        std::string hl, vl;
        if (c.id == CurveId::zeta) {
            SlitOptions opt;
            opt.enforce_smallness = false;
            opt.validate_orbit = false;
            auto r = slit_sequence(cf, c.k, opt).records.back();
            hl = num(r.log_h());
            vl = num(r.log_v());
        } else {
            auto h = holonomy(c, cf);
            hl = h.sign_h ? num(h.log_h) : "-inf";
            vl = h.sign_v ? num(h.log_v) : "-inf";
        }
        os << c.label() << ',' << to_string(c.torus) << ',' << (c.id == CurveId::zeta ? "" : c.m.get_str()) << ','
           << (c.id == CurveId::zeta ? "" : c.n.get_str()) << ',' << hl << ',' << vl << ','
           << intersection_number(CurveClass::gamma(1), c, cf).get_str() << ','
           << intersection_number(CurveClass::gamma(2), c, cf).get_str() << '\n';
    }
}

}  // namespace nue
