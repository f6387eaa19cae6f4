#include "nuelab/teichflow.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace nue {

SurfaceSnapshot make_snapshot(const CFExpansion& cf, const std::vector<CurveClass>& curves, double area_minus,
                              double area_plus, int slit_k) {
    SurfaceSnapshot s;
    s.area_minus = area_minus;
    s.area_plus = area_plus;
    for (const auto& c : curves) s.curves.emplace_back(c, holonomy(c, cf));
    if (slit_k > 0) {
        SlitOptions opt;
        opt.enforce_smallness = false;
        opt.validate_orbit = false;
        s.slit = slit_sequence(cf, slit_k, opt).records.back();
        s.slit_vec.sign_h = 1;
        s.slit_vec.log_h = s.slit->log_h();
        s.slit_vec.sign_v = sgn(s.slit->crossings);
        s.slit_vec.log_v = s.slit_vec.sign_v ? s.slit->log_v() : 0.0;
    }
    return s;
}

SurfaceSnapshot apply_flow(const SurfaceSnapshot& s, double dt) {
    SurfaceSnapshot o = s;
    o.t.t = s.t.t + dt;
    auto flow = [dt](HolonomyVector& h) {
        if (h.sign_h) h.log_h += dt;
        if (h.sign_v) h.log_v -= dt;
    };
    for (auto& c : o.curves) flow(c.second);
    flow(o.slit_vec);
    return o;
}

double half_log_norm(const mpz_class& p, const mpz_class& q) {
    if (sgn(q) == 0) return log_mpz(abs(p));
    double lq = log_mpz(abs(q));
    if (sgn(p) == 0) return lq;
    double r = std::exp(log_mpz(abs(p)) - lq);
    return lq + 0.5 * std::log1p(r * r);
}

FlowTime schedule_tk(const CFExpansion& cf, int k) {
    int nk = cf.n(k);
    ConvergentTable t(cf);
    if (nk > t.order()) throw TruncationError("convergent n_k unavailable");
    return {half_log_norm(t.p(nk), t.q(nk))};
}

CF3Times schedule_cf3(const CFExpansion& cf, int k) {
    if (k < 0) throw ScheduleError("k must be >= 0");
    ConvergentTable t(cf);
    int it = 4 * k + 5, is = 4 * k + 3;
    if (it > t.order()) throw TruncationError("schedule needs digits up to index " + std::to_string(it));
    return {{half_log_norm(t.p(it), t.q(it))}, {half_log_norm(t.p(is), t.q(is)) + k}};
}

double solve_zk(int k, double tol) {
    double target = k * kLn2;
    auto f = [&](double z) { return std::exp(2 * z) + 2 * z - target; };
    if (target <= 1) throw ScheduleError("no root of e^{2z} + 2z = k log 2 for k=" + std::to_string(k));
    double lo = 0, hi = std::log(target) / 2 + 1;
    if (f(lo) > 0 || f(hi) < 0) throw ScheduleError("z_k root not bracketed");
    while (hi - lo > tol * 1e-3) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (f(mid) < 0 ? lo : hi) = mid;
    }
    return std::abs(f(lo)) < std::abs(f(hi)) ? lo : hi;
}

CF4Times schedule_cf4(const CFExpansion& cf, int k) {
    if (k < 2) throw ScheduleError("schedule_cf4 needs k >= 2");
    ConvergentTable t(cf);
    if (k > t.order()) throw TruncationError("schedule_cf4 needs q_k");
    CF4Times r;
    r.s.t = log_mpz(t.q(k - 1)) + k * kLn2 / 2;
    r.t.t = log_mpz(t.q(k));
    double s_next = log_mpz(t.q(k)) + (k + 1) * kLn2 / 2;
    if (!(r.s.t <= r.t.t && r.t.t <= s_next)) throw ScheduleError("ordering s_k <= t_k <= s_{k+1} fails");
    double z = solve_zk(k);
    r.z.t = z;
    r.residual = std::exp(2 * z) - (k * kLn2 - 2 * z);
    return r;
}

TorusAreas torus_areas(const CFExpansion& cf, const MeasureEstimate* m, double c, int k) {
    if (c < -1 || c > 1) throw ModelError("c outside [-1, 1]");
    TorusAreas a;
    if (k == 1 && m) {
        // T^1_+ is the sheet the plus measure favours
        double mm = m->sheet_mass(-1, 1), mp = m->sheet_mass(+1, 1);
        a.area_minus = 0.5 * (1 - c) * mm + 0.5 * (1 + c) * mp;
        a.area_plus = 0.5 * (1 - c) * m->sheet_mass(-1, 0) + 0.5 * (1 + c) * m->sheet_mass(+1, 0);
        a.measured = true;
    }
    int nk = cf.n(k);
    mpq_class lower(1, 4 * cf.a(nk + 1));
    mpq_class upper = 0;
    for (int j = k; j <= cf.subseq_count(); ++j) {
        int n = cf.n(j);
        if (n + 1 > cf.truncation_order()) break;
        upper += mpq_class(2, cf.a(n + 1));
    }
    a.erg_lower = lower.get_d();
    a.erg_upper = upper.get_d();
    a.has_sandwich = c == 1 || c == -1;
    if (!a.measured) {
        double eps = a.erg_lower;
        a.area_minus = 0.5 * (1 - c) * (2 - eps) + 0.5 * (1 + c) * eps;
        a.area_plus = 0.5 * (1 + c) * (2 - eps) + 0.5 * (1 - c) * eps;
    }
    return a;
}

double FlatInterval::lo() const { return std::exp(log_lo); }
double FlatInterval::hi() const { return std::exp(log_hi); }

FlatInterval beta_minus_flat_length(const CFExpansion& cf, int k, FlowTime t, double C) {
    TorusAreas a = torus_areas(cf, nullptr, 1, k);
    double tk = schedule_tk(cf, k).t;
    double lo = C / cf.a(cf.n(k) + 1).get_d();
    FlatInterval f;
    f.log_lo = std::log(lo) + (t.t - tk);
    f.log_hi = std::log(a.erg_upper) + (t.t - tk);
    return f;
}

void write_flow_csv(std::ostream& os, const std::vector<SurfaceSnapshot>& snaps) {
    os << "t,curve_id,log_h,log_v,log_flat_length,area_minus,area_plus\n";
    char buf[256];
    auto row = [&](double t, const std::string& id, const HolonomyVector& h, double am, double ap) {
        std::snprintf(buf, sizeof buf, "%.12g,%s,%.12g,%.12g,%.12g,%.12g,%.12g\n", t, id.c_str(),
                      h.sign_h ? h.log_h : -INFINITY, h.sign_v ? h.log_v : -INFINITY, h.log_length(), am, ap);
        os << buf;
    };
    for (const auto& s : snaps) {
        for (const auto& c : s.curves) row(s.t.t, c.first.label(), c.second, s.area_minus, s.area_plus);
        if (s.slit) row(s.t.t, "zeta" + std::to_string(s.slit->k), s.slit_vec, s.area_minus, s.area_plus);
    }
}

}  // namespace nue
