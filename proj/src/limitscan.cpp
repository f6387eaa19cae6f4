#include "nuelab/limitscan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mpfr.h>
#include <ostream>

namespace nue {

double Pairings::w(int which, int gamma) const {
    if (which < 0) return 0.5 * (gamma == 1 ? mu_minus_g1 : mu_minus_g2);
    return 0.5 * (gamma == 1 ? mu_plus_g1 : mu_plus_g2);
}

Pairings pairings_from(const MeasureEstimate& m) {
    // averaged over the torus swap so that mu_-(gamma_1) = mu_+(gamma_2) holds exactly
    Pairings p;
    double a = 0.5 * (m.sheet_mass(-1, 0) + m.sheet_mass(+1, 1));
    double b = 0.5 * (m.sheet_mass(+1, 0) + m.sheet_mass(-1, 1));
    p.mu_minus_g1 = a;
    p.mu_plus_g2 = a;
    p.mu_plus_g1 = b;
    p.mu_minus_g2 = b;
    p.source = "measured";
    return p;
}

CHat ratio_to_c(double r, const Pairings& p) {
    if (!(r > 0)) throw ModelError("ratio must be positive");
    double m1 = p.mu_minus_g1, p1 = p.mu_plus_g1, m2 = p.mu_minus_g2, p2 = p.mu_plus_g2;
    if (!(m1 > 0 && p1 > 0 && m2 > 0 && p2 > 0)) throw ModelError("pairings must be positive");
    if (m1 == p1 || m2 == p2) throw ModelError("degenerate pairings: mu_- and mu_+ agree on a curve");
    double den = r * (p2 - m2) - (p1 - m1);
    if (den == 0) throw ModelError("ratio not invertible for these pairings");
    double c = ((m1 + p1) - r * (m2 + p2)) / den;
    CHat out{c, false};
    if (c > 1 || c < -1) {
        out.c = std::clamp(c, -1.0, 1.0);
        out.clamped = true;
    }
    return out;
}

namespace {

long double to_ld(const mpq_class& q) {
    mpfr_t x;
    mpfr_init2(x, 128);
    mpfr_set_q(x, q.get_mpq_t(), MPFR_RNDN);
    long double r = mpfr_get_ld(x, MPFR_RNDN);
    mpfr_clear(x);
    return r;
}

long double ld_exp_log(const mpz_class& z) { return std::exp(static_cast<long double>(log_mpz(z))); }

mpz_class round_to_z(long double v) {
    mpfr_t x;
    mpfr_init2(x, 80);
    mpfr_set_ld(x, v, MPFR_RNDN);
    mpz_class z;
    mpfr_get_z(z.get_mpz_t(), x, MPFR_RNDN);
    mpfr_clear(x);
    return z;
}

struct LatticeVec {
    mpz_class P, Q;
    long double x = 0, y = 0;
};

struct TorusFrame {
    mpq_class alpha_mid;
    long double area;
    long double eu;  // e^u

    LatticeVec make(const mpz_class& P, const mpz_class& Q) const {
        mpq_class sd = Q * alpha_mid - P;
        long double y = sgn(Q) ? sgn(Q) * ld_exp_log(abs(Q)) / eu : 0.0L;
        return {P, Q, area * eu * to_ld(sd), y};
    }
};

long double n2(const LatticeVec& v) { return v.x * v.x + v.y * v.y; }

// Gauss reduction; vectors are rebuilt from exact homology after every step
std::pair<LatticeVec, LatticeVec> reduce(const TorusFrame& f, LatticeVec a, LatticeVec b) {
    for (int it = 0; it < 400; ++it) {
        if (n2(b) < n2(a)) std::swap(a, b);
        long double mu = (a.x * b.x + a.y * b.y) / n2(a);
        mpz_class j = round_to_z(mu);
        if (j == 0) break;
        b = f.make(b.P - j * a.P, b.Q - j * a.Q);
    }
    if (n2(b) < n2(a)) std::swap(a, b);
    return {a, b};
}

void add_torus(LengthEstimate& e, const std::string& group, long double w, long double ia, long double ib,
               long double la) {
    long double collar = la < 1 ? collar_crossing_length(ia, static_cast<double>(la)) : 0.0L;
    long double cross = ia * la;
    e.add(group + "_collar", group, w * collar, collar >= cross);
    e.add(group + "_cross", group, w * cross, cross > collar);
    e.add(group + "_twist", group, w * ib * la);
}

long double slit_flat(const CFExpansion& cf, int k, double u) {
    auto hb = slit_base_bounds(cf, k);
    long double h = to_ld(mpq_class((hb.first + hb.second) / 2)) * std::exp(static_cast<long double>(u));
    ConvergentTable t(cf);
    mpz_class v = 0;
    for (int j = 1; j < k; ++j) v += 2 * t.q(cf.n(j));
    long double vv = sgn(v) ? ld_exp_log(v) * std::exp(static_cast<long double>(-u)) : 0.0L;
    return std::hypot(h, vv);
}

}  // namespace

std::pair<LengthEstimate, LengthEstimate> geometric_lengths(const CFExpansion& cf, double u, const Pairings& p,
                                                            double c, const LengthModel& lm) {
    ConvergentTable t(cf);
    int K = cf.truncation_order();
    if (K < 3) throw TruncationError("geometric model needs at least three digits");
    int m = 1;
    for (int n = 1; n <= K - 1; ++n)
        if (half_log_norm(t.p(n), t.q(n)) <= u) m = n;
    int k = 1;
    for (int j = 1; j <= cf.subseq_count(); ++j)
        if (cf.n(j) <= m) k = j;
    if (cf.n(k) + 1 > K) throw TruncationError("slit index beyond truncation");
    TorusAreas areas = torus_areas(cf, nullptr, c, k);
    AlphaBounds ab = alpha_bounds(cf);

    LengthEstimate e1, e2;
    e1.regime = e2.regime = "geometric";
    for (int side : {-1, +1}) {
        double A = side < 0 ? areas.area_minus : areas.area_plus;
        std::string group = side < 0 ? "minus" : "plus";
        TorusFrame f{(ab.lo + ab.hi) / 2, static_cast<long double>(A), std::exp(static_cast<long double>(u))};
        auto [a, b] = reduce(f, f.make(t.p(m), t.q(m)), f.make(t.p(m - 1), t.q(m - 1)));
        long double la = n2(a) / A;
        long double ia = sgn(a.Q) ? ld_exp_log(abs(a.Q)) : 0.0L;
        long double ib = sgn(b.Q) ? ld_exp_log(abs(b.Q)) : 0.0L;
        add_torus(e1, group, p.w(side, 1), ia, ib, la);
        add_torus(e2, group, p.w(side, 2), ia, ib, la);
    }

    long double delta = slit_flat(cf, k, u);
    long double kappa = k >= 2 ? std::min(1.0L, slit_flat(cf, k - 1, u)) : 1.0L;
    long double ell = delta * delta / 2;
    if (kappa > delta) ell = std::max(ell, 1.0L / std::log(kappa / delta));
    mpz_class cross = 0;
    for (int j = 1; j < k; ++j) cross += 2 * t.q(cf.n(j));
    long double crossings = sgn(cross) ? ld_exp_log(cross) : 0.0L;
    long double collar = ell < 1 && ell > 0 ? collar_crossing_length(crossings, static_cast<double>(ell)) : 0.0L;
    for (auto* e : {&e1, &e2}) {
        e->add("slit_collar", "collar", collar);
        long double torus = e->group_total("minus") + e->group_total("plus");
        if (torus <= 0 || collar / torus > lm.hypothesis_threshold)
            e->flag("slit collar not small against the torus terms");
    }
    return {e1, e2};
}

std::pair<LengthEstimate, LengthEstimate> closed_form_cf4(const CFExpansion& cf, int k, double u, const Pairings& p,
                                                          double c) {
    if (c != 1 && c != -1) throw ModelError("closed-form lengths exist only for c = +-1");
    CF4Times sch = schedule_cf4(cf, k);
    ConvergentTable t(cf);
    long double lq = log_mpz(t.q(k));
    long double Q = std::exp(lq), P = std::exp(lq - k * static_cast<long double>(kLn2));
    int big = c > 0 ? +1 : -1, small = -big;
    std::string gb = big > 0 ? "plus" : "minus", gs = big > 0 ? "minus" : "plus";
    long double ln2 = kLn2;

    long double big_collar, big_cross, small_collar, small_cross, slit;
    if (u < sch.t.t) {
        long double x = std::max(0.0L, static_cast<long double>(u - sch.s.t));
        big_collar = std::max(0.0L, k * ln2 - 2 * x) * P;
        big_cross = std::exp(2 * x) * P;
        small_collar = x * P;
        small_cross = std::exp(-2 * x) * P;
        slit = x > 0.5L ? P * std::log(2 * x) : 0.0L;
    } else {
        long double v = u - sch.t.t;
        big_cross = Q;
        big_collar = 2 * v * Q;
        small_collar = std::max(0.0L, (k + 1) * ln2 - 2 * v) * P;
        small_cross = P * std::exp(2 * v) / 2;
        slit = P * std::max(0.0L, 2 * k * ln2 - 2 * v);
    }
    LengthEstimate e[2];
    for (int g = 1; g <= 2; ++g) {
        LengthEstimate& x = e[g - 1];
        x.regime = "closed_form";
        long double wb = p.w(big, g), ws = p.w(small, g);
        x.add(gb + "_collar", gb, wb * big_collar, big_collar >= big_cross);
        x.add(gb + "_cross", gb, wb * big_cross, big_cross > big_collar);
        x.add(gs + "_collar", gs, ws * small_collar, small_collar >= small_cross);
        x.add(gs + "_cross", gs, ws * small_cross, small_cross > small_collar);
        x.add("slit_collar", "collar", slit);
    }
    return {e[0], e[1]};
}

std::pair<LengthEstimate, LengthEstimate> closed_form_cf3(const CFExpansion& cf, int k, bool at_tk,
                                                          const Pairings& p, double c, const LengthModel& lm) {
    if (c != 1 && c != -1) throw ModelError("closed-form lengths exist only for c = +-1");
    if (k < 1) throw ScheduleError("closed-form CF3 terms need k >= 1");
    ConvergentTable t(cf);
    if (4 * k + 5 > t.order()) throw TruncationError("CF3 closed form needs digits up to 4k+5");
    long double lQ = log_mpz(t.q(4 * k + 5)), lq1 = log_mpz(t.q(4 * k + 1)), lq3 = log_mpz(t.q(4 * k + 3));
    long double Q = std::exp(lQ), q1 = std::exp(lq1);
    int big = c > 0 ? +1 : -1, small = -big;
    std::string gb = big > 0 ? "plus" : "minus", gs = big > 0 ? "minus" : "plus";
    long double kk = k;

    LengthEstimate e[2];
    if (at_tk) {
        double ell_small = 1.0 / (16.0 * std::pow(static_cast<double>(k), 4));
        long double small_cross = Q * ell_small;
        long double small_collar = collar_crossing_length(q1, ell_small);
        double ell_slit = 1.0 / std::pow(static_cast<double>(k), 4);
        long double slit = ell_slit < 1 ? collar_crossing_length(q1, ell_slit) : 0.0L;
        for (int g = 1; g <= 2; ++g) {
            LengthEstimate& x = e[g - 1];
            x.regime = "closed_form";
            x.add(gb + "_cross", gb, p.w(big, g) * Q);
            x.add(gs + "_collar", gs, p.w(small, g) * small_collar, small_collar >= small_cross);
            x.add(gs + "_cross", gs, p.w(small, g) * small_cross, small_cross > small_collar);
            x.add("slit_collar", "collar", slit);
        }
    } else {
        double a_big = std::exp(static_cast<double>(k));
        double a_small = a_big / (4.0 * k * k);
        LengthBand bb = punctured_rect_horizontal_length(a_big, lm);
        bool valid = a_small >= 1;
        LengthBand bs = valid ? punctured_rect_horizontal_length(a_small, lm) : LengthBand{};
        long double log_h = kk + lq3 - 2 * std::log(kk) - lQ;
        long double log_v = lq1 - kk - lq3;
        long double slit = q1 * std::max({0.0L, -log_h, -log_v});
        for (int g = 1; g <= 2; ++g) {
            LengthEstimate& x = e[g - 1];
            x.regime = "closed_form";
            x.add(gb + "_cross", gb, p.w(big, g) * Q * bb.mid);
            x.add(gs + "_cross", gs, p.w(small, g) * Q * bs.mid);
            x.add("slit_collar", "collar", slit);
            if (!valid) x.flag("short-torus aspect e^k/(4k^2) below 1");
            else if (bs.lo <= 0)
                x.warnings.push_back("length band for the short torus is vacuous at this k");
        }
    }
    return {e[0], e[1]};
}

CFExpansion scan_expansion(const ScanConfig& cfg) {
    if (cfg.family == "cf4") return family_cf4(std::max(cfg.k_max + 4, 12));
    if (cfg.family == "cf3") return family_cf3(std::max(cfg.k_max + 3, 3), Filler::parse(cfg.filler));
    if (cfg.family == "explicit") return cfg.explicit_cf;
    throw ConfigError("unknown family '" + cfg.family + "'");
}

namespace {

struct TimeSpec {
    int k;
    std::string tag;
    double u;
};

void grid(std::vector<TimeSpec>& out, int k, double a, double b, int n) {
    for (int i = 1; i <= n; ++i) out.push_back({k, "grid", a + (b - a) * i / (n + 1)});
}

}  // namespace

ScanResult scan(const ScanConfig& cfg) {
    cfg.lm.validate();
    if (cfg.c < -1 || cfg.c > 1) throw ConfigError("c outside [-1, 1]");
    if (cfg.k_min > cfg.k_max) throw ConfigError("empty k range");
    static const std::vector<std::string> schedules{"tk", "sk", "both", "full"};
    if (std::find(schedules.begin(), schedules.end(), cfg.schedule) == schedules.end())
        throw ConfigError("unknown schedule '" + cfg.schedule + "'");
    CFExpansion cf = scan_expansion(cfg);
    ScanResult res;

    bool family = cfg.family == "cf3" || cfg.family == "cf4";
    bool ergodic = cfg.c == 1 || cfg.c == -1;
    res.model = cfg.model;
    if (res.model == "auto") res.model = family && ergodic ? "closed_form" : "geometric";
    if (res.model != "geometric" && res.model != "closed_form") throw ConfigError("unknown model '" + cfg.model + "'");
    if (res.model == "closed_form" && !(family && ergodic))
        throw ConfigError("closed_form model needs family cf3/cf4 and c = +-1");

    if (cfg.pairings) {
        res.pairings = *cfg.pairings;
    } else {
        try {
            SkewIET T(cf);
            auto m = estimate_ergodic_measures(T, default_seeds(T, cfg.seeds), cfg.orbit_n);
            res.pairings = pairings_from(m);
        } catch (const std::exception& ex) {
            res.pairings = Pairings{};
            res.notes.push_back(std::string("ergodic measures not separated (") + ex.what() +
                                "); nominal pairings used");
        }
    }

    std::vector<TimeSpec> times;
    for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
        if (cfg.family == "cf4") {
            CF4Times s = schedule_cf4(cf, k);
            ConvergentTable t(cf);
            double s1 = log_mpz(t.q(k)) + (k + 1) * kLn2 / 2;
            double sz = s.s.t + s.z.t;
            if (cfg.schedule == "tk") {
                times.push_back({k, "t", s.t.t});
            } else if (cfg.schedule == "sk") {
                times.push_back({k, "s", s.s.t});
            } else {
                times.push_back({k, "s", s.s.t});
                if (cfg.schedule == "full") grid(times, k, s.s.t, sz, cfg.oversample);
                times.push_back({k, "s+z", sz});
                if (cfg.schedule == "full") grid(times, k, sz, s.t.t, cfg.oversample);
                times.push_back({k, "t", s.t.t});
                if (cfg.schedule == "full") grid(times, k, s.t.t, s1, cfg.oversample);
            }
        } else if (cfg.family == "cf3") {
            CF3Times s = schedule_cf3(cf, k);
            if (cfg.schedule != "tk") times.push_back({k, "s", s.s.t});
            if (cfg.schedule != "sk") times.push_back({k, "t", s.t.t});
        } else {
            double tk = schedule_tk(cf, k).t;
            times.push_back({k, "t", tk});
            if (cfg.schedule == "full" && k < cfg.k_max) grid(times, k, tk, schedule_tk(cf, k + 1).t, cfg.oversample);
        }
    }
    if (cfg.family == "cf3" && cfg.schedule == "full") res.notes.push_back("cf3 full schedule sampled as both");
    std::stable_sort(times.begin(), times.end(), [](const TimeSpec& a, const TimeSpec& b) { return a.u < b.u; });

    res.points.resize(times.size());
    int big = cfg.c >= 0 ? +1 : -1;
    std::string gb = big > 0 ? "plus" : "minus", gs = big > 0 ? "minus" : "plus";
    parallel_for(times.size(), [&](size_t i) {
        const TimeSpec& ts = times[i];
        ScanPoint& pt = res.points[i];
        pt.t.t = ts.u;
        pt.k = ts.k;
        pt.tag = ts.tag;
        pt.model = res.model;
        std::pair<LengthEstimate, LengthEstimate> L;
        if (res.model == "geometric")
            L = geometric_lengths(cf, ts.u, res.pairings, cfg.c, cfg.lm);
        else if (cfg.family == "cf4")
            L = closed_form_cf4(cf, ts.k, ts.u, res.pairings, cfg.c);
        else
            L = closed_form_cf3(cf, ts.k, ts.tag == "t", res.pairings, cfg.c, cfg.lm);
        pt.g1 = L.first;
        pt.g2 = L.second;
        pt.ratio = static_cast<double>(pt.g1.total / pt.g2.total);
        CHat ch = ratio_to_c(pt.ratio, res.pairings);
        pt.c_hat = ch.c;
        pt.clamped = ch.clamped;
        long double den = pt.g1.group_total(gb);
        pt.dominance = den > 0 ? static_cast<double>((pt.g1.group_total(gs) + pt.g1.group_total("collar")) / den)
                               : INFINITY;
        pt.regime_valid = pt.g1.regime_valid && pt.g2.regime_valid;
    });
    return res;
}

const char* to_string(DomRegime r) {
    switch (r) {
        case DomRegime::at_tk: return "at_tk";
        case DomRegime::interval_tk_sk1: return "interval_tk_sk1";
        case DomRegime::at_sk: return "at_sk";
        case DomRegime::interval_sk_zk: return "interval_sk_zk";
        default: return "interval_zk_tk";
    }
}

DominanceResult dominance_cf4(const CFExpansion& cf, int k, DomRegime regime, double tol_factor, int grid_n) {
    Pairings unit{2, 2, 2, 2, "unit"};
    CF4Times s = schedule_cf4(cf, k);
    ConvergentTable t(cf);
    double s1 = log_mpz(t.q(k)) + (k + 1) * kLn2 / 2;
    double sz = s.s.t + s.z.t;
    auto dom = [&](double u) {
        auto L = closed_form_cf4(cf, k, u, unit, 1).first;
        return static_cast<double>((L.group_total("minus") + L.group_total("collar")) / L.group_total("plus"));
    };
    auto sup = [&](double a, double b, bool include_b) {
        double m = 0;
        int n = std::max(grid_n, 2);
        for (int i = 0; i <= n; ++i) {
            if (i == n && !include_b) break;
            m = std::max(m, dom(a + (b - a) * i / n));
        }
        return m;
    };
    DominanceResult r;
    double logk = std::log(static_cast<double>(k));
    double rate = 0;
    switch (regime) {
        case DomRegime::at_tk:
            r.value = dom(s.t.t);
            rate = k / std::ldexp(1.0, k);
            r.two_sided = true;
            break;
        case DomRegime::at_sk:
            r.value = dom(s.s.t);
            rate = 1.0 / k;
            r.two_sided = true;
            break;
        case DomRegime::interval_sk_zk:
            r.value = sup(s.s.t, sz, true);
            rate = logk / k;
            break;
        case DomRegime::interval_zk_tk:
            r.value = sup(sz, s.t.t, true);
            rate = logk / k;
            break;
        case DomRegime::interval_tk_sk1:
            r.value = sup(s.t.t, s1, false);
            rate = 1.0 / k;
            break;
    }
    r.bound = tol_factor * rate;
    r.pass = r.value <= r.bound && (!r.two_sided || r.value >= rate / tol_factor);
    return r;
}

OscillationReport oscillation_check(const std::vector<ScanPoint>& points) {
    OscillationReport rep;
    std::vector<int> ks;
    for (const auto& p : points)
        if (std::find(ks.begin(), ks.end(), p.k) == ks.end()) ks.push_back(p.k);
    auto all_terms = [](const LengthEstimate& e) {
        long double s = 0;
        for (const auto& t : e.terms) s += t.value;
        return s;
    };
    for (int k : ks) {
        const ScanPoint *s = nullptr, *z = nullptr, *t = nullptr;
        for (const auto& p : points) {
            if (p.k != k) continue;
            if (p.tag == "s") s = &p;
            if (p.tag == "s+z") z = &p;
            if (p.tag == "t") t = &p;
        }
        if (!s || !z || !t) {
            rep.incomplete = true;
            continue;
        }
        ++rep.checked;
        bool ok = s->g1.total > z->g1.total && t->g1.total > z->g1.total && s->g2.total > z->g2.total &&
                  t->g2.total > z->g2.total;
        if (ok) ++rep.alternations;
        else rep.failed_k.push_back(k);
        if (all_terms(s->g1) > all_terms(z->g1) && all_terms(t->g1) > all_terms(z->g1)) ++rep.alternations_all_terms;
    }
    return rep;
}

const char* to_string(LimitKind k) {
    switch (k) {
        case LimitKind::barycenter: return "barycenter";
        case LimitKind::ergodic_plus: return "ergodic_plus";
        case LimitKind::ergodic_minus: return "ergodic_minus";
        case LimitKind::interval: return "interval";
        default: return "inconclusive";
    }
}

LimitVerdict classify(const std::vector<ScanPoint>& points, double window, double eps, int min_points) {
    LimitVerdict v;
    v.window = window;
    if (points.empty()) {
        v.notes.push_back("empty scan");
        return v;
    }
    size_t n = points.size();
    size_t take = std::min(n, static_cast<size_t>(std::ceil(window * static_cast<double>(n))));
    size_t from = n - take;
    v.t_from = points[from].t.t;
    v.t_to = points.back().t.t;
    bool first = true;
    int flagged = 0;
    for (size_t i = from; i < n; ++i) {
        const auto& p = points[i];
        if (!p.regime_valid) {
            ++flagged;
            continue;
        }
        ++v.valid_points;
        if (first) {
            v.c_min = v.c_max = p.c_hat;
            first = false;
        } else {
            v.c_min = std::min(v.c_min, p.c_hat);
            v.c_max = std::max(v.c_max, p.c_hat);
        }
    }
    if (flagged) v.notes.push_back(std::to_string(flagged) + " regime-invalid points excluded");
    if (v.valid_points < min_points) {
        v.kind = LimitKind::inconclusive;
        v.notes.push_back("fewer than " + std::to_string(min_points) + " valid points in the window");
        return v;
    }
    if (v.c_min >= -eps && v.c_max <= eps) v.kind = LimitKind::barycenter;
    else if (v.c_min >= 1 - eps) v.kind = LimitKind::ergodic_plus;
    else if (v.c_max <= -1 + eps) v.kind = LimitKind::ergodic_minus;
    else v.kind = LimitKind::interval;
    return v;
}

void write_scan_csv(std::ostream& os, const std::vector<ScanPoint>& points) {
    os << "t,ratio,c_hat,dominance,regime_valid\n";
    char buf[160];
    for (const auto& p : points) {
        std::snprintf(buf, sizeof buf, "%.12g,%.17g,%.12g,%.12g,%d\n", p.t.t, p.ratio, p.c_hat, p.dominance,
                      p.regime_valid ? 1 : 0);
        os << buf;
    }
}

nlohmann::json to_json(const LimitVerdict& v) {
    nlohmann::json j;
    j["kind"] = to_string(v.kind);
    j["c_min"] = v.c_min;
    j["c_max"] = v.c_max;
    j["window"] = {{"fraction", v.window}, {"t_from", v.t_from}, {"t_to", v.t_to}};
    j["valid_points"] = v.valid_points;
    j["notes"] = v.notes;
    return j;
}

}  // namespace nue
