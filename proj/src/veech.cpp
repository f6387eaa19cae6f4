#include "nuelab/veech.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <ostream>

namespace nue {

namespace {

mpz_class kLimit = mpz_class(1) << 62;

}  // namespace

SkewIET::SkewIET(const CFExpansion& cf, const Precision& prec) : cf_(cf), prec_(prec) {
    cf_.validate();
    ab_ = alpha_bounds(cf_);
    auto b = slit_base_bounds(cf_);
    blo_ = b.first;
    bhi_ = b.second;
    if (bhi_ >= 1) throw ModelError("slit base b does not fit in the circle (b >= 1)");

    ConvergentTable t(cf_);
    int L = 0;
    for (int n = 1; n <= cf_.truncation_order(); ++n)
        if (t.q(n) < kLimit) L = n;
    if (L < 1) throw TruncationError("no convergent small enough for the integer surrogate");
    mpz_class P = t.p(L), Q = t.q(L), bn = 0;
    for (int n : cf_.subseq) {
        if (n >= L) break;
        mpz_class d = t.q(n) * P - t.p(n) * Q;
        bn += 2 * abs(d);
    }
    if (bn >= Q) throw ModelError("surrogate slit does not fit in the circle");
    sur_.P = mpz_get_ui(P.get_mpz_t());
    sur_.Q = mpz_get_ui(Q.get_mpz_t());
    sur_.bnum = mpz_get_ui(bn.get_mpz_t());
    sur_.cut = std::max(sur_.bnum, sur_.Q - sur_.P);
    sur_.order = L;
    mpq_class pq(P, Q);
    pq.canonicalize();
    mpq_class e1 = abs(mpq_class(ab_.lo - pq)), e2 = abs(mpq_class(ab_.hi - pq));
    sur_.alpha_error = std::max(e1, e2).get_d();
}

CertReal SkewIET::alpha(long prec) const { return CertReal::between(ab_.lo, ab_.hi, prec); }

CertReal SkewIET::b(long prec) const { return CertReal::between(blo_, bhi_, prec); }

std::array<CertReal, 6> SkewIET::interval_lengths(long prec) const {
    mpq_class cut_lo = std::max(blo_, mpq_class(1 - ab_.hi));
    mpq_class cut_hi = std::max(bhi_, mpq_class(1 - ab_.lo));
    mpq_class i2lo = std::max(mpq_class(0), mpq_class(cut_lo - bhi_));
    mpq_class i2hi = std::max(mpq_class(0), mpq_class(cut_hi - blo_));
    CertReal i1 = CertReal::between(blo_, bhi_, prec);
    CertReal i2 = CertReal::between(i2lo, i2hi, prec);
    CertReal i3 = CertReal::between(mpq_class(1 - cut_hi), mpq_class(1 - cut_lo), prec);
    return {i1, i2, i3, i1, i2, i3};
}

int SkewIET::interval_of(uint64_t x, int sheet) const {
    int i = x < sur_.bnum ? 0 : (x < sur_.cut ? 1 : 2);
    return i + 3 * sheet;
}

SkewState step(const SkewIET& T, const SkewState& s) {
    long p = s.x.precision();
    Precision pr{p, std::max(p, T.precision().cap)};
    Ord inJ = decide([&](long q) { return compare(s.x, T.b(q)); }, pr);
    if (inJ == Ord::undecided) throw PrecisionExhausted("membership in J undecidable");
    SkewState out;
    out.sheet = inJ == Ord::less ? 1 - s.sheet : s.sheet;
    CertReal y = s.x + T.alpha(p);
    Ord wrap = compare(y, CertReal::exact(1, p));
    if (wrap == Ord::undecided) throw PrecisionExhausted("wrap-around undecidable");
    out.x = wrap == Ord::greater ? y - CertReal::exact(1, p) : y;
    return out;
}

SkewState step_inverse(const SkewIET& T, const SkewState& s) {
    long p = s.x.precision();
    CertReal y = s.x - T.alpha(p);
    Ord wrap = compare(y, CertReal::exact(0, p));
    if (wrap == Ord::undecided) throw PrecisionExhausted("wrap-around undecidable");
    if (wrap == Ord::less) y = y + CertReal::exact(1, p);
    Precision pr{p, std::max(p, T.precision().cap)};
    Ord inJ = decide([&](long q) { return compare(y, T.b(q)); }, pr);
    if (inJ == Ord::undecided) throw PrecisionExhausted("membership in J undecidable");
    return {y, inJ == Ord::less ? 1 - s.sheet : s.sheet};
}

BirkhoffSeries birkhoff_torus_fraction(const SkewIET& T, uint64_t x0, int sheet0, uint64_t N,
                                       uint64_t stride, int batches) {
    const Surrogate& S = T.surrogate();
    BirkhoffSeries r;
    r.x0 = x0 % S.Q;
    r.sheet0 = sheet0 & 1;
    r.N = N;
    uint64_t x = r.x0;
    int sheet = r.sheet0;
    uint64_t half = N / 2, tail = N - half;
    int B = static_cast<int>(std::min<uint64_t>(std::max(batches, 1), std::max<uint64_t>(tail, 1)));
    uint64_t bsize = tail / static_cast<uint64_t>(B);
    std::vector<uint64_t> bcount(static_cast<size_t>(B), 0), blen(static_cast<size_t>(B), 0);
    uint64_t count = 0, tail0 = 0;
    for (uint64_t n = 0; n < N; ++n) {
        if (sheet == 0) ++count;
        if (n >= half) {
            int iv = T.interval_of(x, sheet);
            ++r.tail_occupation[static_cast<size_t>(iv)];
            size_t bi = bsize ? std::min<size_t>(static_cast<size_t>((n - half) / bsize), B - 1) : 0;
            ++blen[bi];
            if (sheet == 0) {
                ++tail0;
                ++bcount[bi];
            }
        }
        bool flip = x < S.bnum;
        x += S.P;
        if (x >= S.Q) x -= S.Q;
        if (flip) sheet ^= 1;
        if (stride && (n + 1) % stride == 0 && n + 1 != N)
            r.samples.push_back({n + 1, x, sheet, static_cast<double>(count) / static_cast<double>(n + 1)});
    }
    if (N > 0) r.samples.push_back({N, x, sheet, static_cast<double>(count) / static_cast<double>(N)});
    r.sheet0_count = count;
    r.tail_fraction = tail ? static_cast<double>(tail0) / static_cast<double>(tail) : 0.0;
    for (int i = 0; i < B; ++i)
        if (blen[static_cast<size_t>(i)])
            r.batch_fraction.push_back(static_cast<double>(bcount[static_cast<size_t>(i)]) /
                                       static_cast<double>(blen[static_cast<size_t>(i)]));
    r.drift_warning = static_cast<double>(N) * S.alpha_error * static_cast<double>(S.Q) > 1.0;
    return r;
}

std::vector<SeedPoint> default_seeds(const SkewIET& T, int M) {
    const Surrogate& S = T.surrogate();
    std::vector<SeedPoint> out;
    for (int j = 0; j < M; ++j) {
        mpz_class x = mpz_class(2 * j + 1) * mpz_class(static_cast<unsigned long>(S.Q)) / (2 * M);
        out.push_back({mpz_get_ui(x.get_mpz_t()), 0});
    }
    out.push_back({0, 0});
    return out;
}

double MeasureEstimate::sheet_mass(int which, int sheet) const {
    const auto& m = which < 0 ? minus : plus;
    int o = 3 * sheet;
    return m[static_cast<size_t>(o)] + m[static_cast<size_t>(o + 1)] + m[static_cast<size_t>(o + 2)];
}

std::array<double, 6> MeasureEstimate::normalized(int which) const {
    auto m = which < 0 ? minus : plus;
    for (auto& v : m) v /= 2;
    return m;
}

std::array<double, 6> MeasureEstimate::mixed(double c) const {
    std::array<double, 6> out{};
    for (size_t i = 0; i < 6; ++i) out[i] = 0.5 * (1 - c) * minus[i] + 0.5 * (1 + c) * plus[i];
    return out;
}

MeasureEstimate MeasureEstimate::swapped() const {
    MeasureEstimate s = *this;
    for (size_t i = 0; i < 6; ++i) {
        s.plus[i] = minus[(i + 3) % 6];
        s.minus[i] = plus[(i + 3) % 6];
        s.radius_plus[i] = radius_minus[(i + 3) % 6];
        s.radius_minus[i] = radius_plus[(i + 3) % 6];
        s.lebesgue[i] = lebesgue[(i + 3) % 6];
    }
    std::swap(s.seeds_minus, s.seeds_plus);
    return s;
}

MeasureEstimate estimate_ergodic_measures(const SkewIET& T, const std::vector<SeedPoint>& seeds,
                                          uint64_t N, double min_separation) {
    if (seeds.size() < 2) throw Inconclusive("need at least two seeds");
    if (N < 4) throw Inconclusive("orbit too short");
    std::vector<BirkhoffSeries> runs(seeds.size());
    parallel_for(seeds.size(), [&](size_t i) {
        runs[i] = birkhoff_torus_fraction(T, seeds[i].x, seeds[i].sheet, N, 0);
    });

    struct Row {
        double f;
        std::array<double, 6> occ;
        double stderr_;
    };
    std::vector<Row> minus, plus;
    double max_se = 0;
    for (const auto& r : runs) {
        Row row{r.tail_fraction, {}, 0};
        uint64_t tail = 0;
        for (auto c : r.tail_occupation) tail += c;
        for (size_t i = 0; i < 6; ++i)
            row.occ[i] = 2.0 * static_cast<double>(r.tail_occupation[i]) / static_cast<double>(tail);
        double mean = 0, var = 0;
        for (double v : r.batch_fraction) mean += v;
        mean /= static_cast<double>(r.batch_fraction.size());
        for (double v : r.batch_fraction) var += (v - mean) * (v - mean);
        size_t B = r.batch_fraction.size();
        row.stderr_ = B > 1 ? std::sqrt(var / static_cast<double>(B - 1) / static_cast<double>(B)) : 0.5;
        max_se = std::max(max_se, row.stderr_);
        (row.f > 0.5 ? plus : minus).push_back(row);
    }
    if (plus.empty() || minus.empty())
        throw Inconclusive("all seeds fell on one side of 1/2; no two-cluster split");
    double min_plus = 1, max_minus = 0;
    for (const auto& r : plus) min_plus = std::min(min_plus, r.f);
    for (const auto& r : minus) max_minus = std::max(max_minus, r.f);

    MeasureEstimate m;
    m.separation = (min_plus - max_minus) / (2 * max_se + 1e-15);
    if (m.separation < min_separation)
        throw Inconclusive("clusters do not separate (separation " + std::to_string(m.separation) + ")");
    m.sample_count = N;
    m.seeds_minus = static_cast<int>(minus.size());
    m.seeds_plus = static_cast<int>(plus.size());

    auto reduce = [&](const std::vector<Row>& rows, std::array<double, 6>& mass, std::array<double, 6>& rad) {
        double n = static_cast<double>(rows.size());
        for (size_t i = 0; i < 6; ++i) {
            double mean = 0, var = 0;
            for (const auto& r : rows) mean += r.occ[i];
            mean /= n;
            for (const auto& r : rows) var += (r.occ[i] - mean) * (r.occ[i] - mean);
            double se = rows.size() > 1 ? std::sqrt(var / (n - 1) / n) : 0.0;
            mass[i] = mean;
            rad[i] = 3.0 * (se + 2.0 * max_se);
        }
    };
    reduce(minus, m.minus, m.radius_minus);
    reduce(plus, m.plus, m.radius_plus);
    for (size_t i = 0; i < 6; ++i)
        m.confidence_radius = std::max({m.confidence_radius, m.radius_minus[i], m.radius_plus[i]});

    const Surrogate& S = T.surrogate();
    double Q = static_cast<double>(S.Q);
    double b = static_cast<double>(S.bnum) / Q, cut = static_cast<double>(S.cut) / Q;
    m.edges = {0.0, b, cut, 1.0, 1.0 + b, 1.0 + cut, 2.0};
    auto lens = T.interval_lengths(128);
    for (size_t i = 0; i < 6; ++i) {
        m.lebesgue[i] = lens[i].mid();
        m.lebesgue_deviation =
            std::max(m.lebesgue_deviation, std::abs(0.5 * (m.minus[i] + m.plus[i]) - m.lebesgue[i]));
    }
    return m;
}

CertReal conjugate_to_c(const CertReal& x, double c, const MeasureEstimate& m) {
    auto mass = m.mixed(c);
    auto F = [&](double y) {
        if (y <= 0) return 0.0;
        double acc = 0;
        for (size_t i = 0; i < 6; ++i) {
            double a = m.edges[i], b = m.edges[i + 1];
            if (y >= b) {
                acc += mass[i];
            } else {
                if (b > a) acc += mass[i] * (y - a) / (b - a);
                break;
            }
        }
        return acc;
    };
    double lo = F(x.lower()), hi = F(x.upper());
    double r = m.measured ? m.confidence_radius * std::min(1.0, std::max(0.0, x.upper()) / 2.0) : 0.0;
    CertReal a = CertReal::from_double(lo, x.precision()), b = CertReal::from_double(hi, x.precision());
    if (r == 0) return a.hull(b);
    CertReal rr = CertReal::from_double(r, x.precision());
    return (a - rr).hull(b + rr);
}

void write_orbit_csv(std::ostream& os, const SkewIET& T, const std::vector<BirkhoffSeries>& runs) {
    const Surrogate& S = T.surrogate();
    char buf[160];
    os << "n,x_mid,x_radius,sheet,running_fraction\n";
    for (const auto& r : runs)
        for (const auto& s : r.samples) {
            std::snprintf(buf, sizeof buf, "%llu,%.17g,%.3e,%d,%.10f\n", static_cast<unsigned long long>(s.n),
                          static_cast<double>(s.x) / static_cast<double>(S.Q),
                          static_cast<double>(s.n) * S.alpha_error, s.sheet, s.running_fraction);
            os << buf;
        }
}

nlohmann::json to_json(const MeasureEstimate& m) {
    nlohmann::json j;
    j["mu_minus"] = m.minus;
    j["mu_plus"] = m.plus;
    j["radius_minus"] = m.radius_minus;
    j["radius_plus"] = m.radius_plus;
    j["lebesgue"] = m.lebesgue;
    j["N"] = m.sample_count;
    j["confidence_radius"] = m.confidence_radius;
    j["seeds_minus"] = m.seeds_minus;
    j["seeds_plus"] = m.seeds_plus;
    j["separation"] = m.separation;
    j["lebesgue_deviation"] = m.lebesgue_deviation;
    j["measured"] = m.measured;
    return j;
}

}  // namespace nue
