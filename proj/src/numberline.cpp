#include "nuelab/numberline.hpp"

#include <algorithm>
#include <sstream>

namespace nue {

const mpz_class& CFExpansion::a(int n) const {
    if (n < 1 || n > truncation_order())
        throw TruncationError("digit a_" + std::to_string(n) + " beyond truncation order " +
                              std::to_string(truncation_order()));
    return digits[static_cast<size_t>(n - 1)];
}

int CFExpansion::n(int k) const {
    if (k < 1 || k > subseq_count())
        throw TruncationError("subsequence index n_" + std::to_string(k) + " unavailable");
    return subseq[static_cast<size_t>(k - 1)];
}

void CFExpansion::validate() const {
    for (size_t i = 0; i < digits.size(); ++i)
        if (digits[i] < 1) throw ConfigError("digit a_" + std::to_string(i + 1) + " < 1");
    for (size_t i = 1; i < subseq.size(); ++i)
        if (subseq[i] <= subseq[i - 1]) throw ConfigError("subsequence not strictly increasing");
    if (!subseq.empty() && subseq.front() < 1) throw ConfigError("subsequence index < 1");
}

ConvergentTable::ConvergentTable(const CFExpansion& cf) {
    int K = cf.truncation_order();
    p_.resize(static_cast<size_t>(K) + 2);
    q_.resize(static_cast<size_t>(K) + 2);
    // slot i holds index i-1
    p_[0] = 1;
    q_[0] = 0;
    p_[1] = 0;
    q_[1] = 1;
    for (int n = 1; n <= K; ++n) {
        const mpz_class& an = cf.digits[static_cast<size_t>(n - 1)];
        p_[static_cast<size_t>(n + 1)] = an * p_[static_cast<size_t>(n)] + p_[static_cast<size_t>(n - 1)];
        q_[static_cast<size_t>(n + 1)] = an * q_[static_cast<size_t>(n)] + q_[static_cast<size_t>(n - 1)];
    }
}

const mpz_class& ConvergentTable::p(int n) const {
    if (n < -1 || n > order()) throw TruncationError("convergent p_" + std::to_string(n) + " unavailable");
    return p_[static_cast<size_t>(n + 1)];
}

const mpz_class& ConvergentTable::q(int n) const {
    if (n < -1 || n > order()) throw TruncationError("convergent q_" + std::to_string(n) + " unavailable");
    return q_[static_cast<size_t>(n + 1)];
}

std::vector<Convergent> convergents(const CFExpansion& cf, int n) {
    if (n > cf.truncation_order())
        throw TruncationError("requested " + std::to_string(n) + " convergents, truncation order " +
                              std::to_string(cf.truncation_order()));
    ConvergentTable t(cf);
    std::vector<Convergent> out;
    for (int i = 1; i <= n; ++i) out.push_back({t.p(i), t.q(i), i});
    return out;
}

AlphaBounds alpha_bounds(const CFExpansion& cf) {
    int K = cf.truncation_order();
    if (K < 1) throw TruncationError("empty continued fraction");
    ConvergentTable t(cf);
    mpq_class a(t.p(K), t.q(K));
    a.canonicalize();
    if (cf.exact) return {a, a};
    mpq_class b(t.p(K) + t.p(K - 1), t.q(K) + t.q(K - 1));
    b.canonicalize();
    return a < b ? AlphaBounds{a, b} : AlphaBounds{b, a};
}

CertReal alpha_value(const CFExpansion& cf, const Precision& prec) {
    int K = cf.truncation_order();
    if (K < 2) throw TruncationError("alpha_value needs at least two convergents");
    AlphaBounds ab = alpha_bounds(cf);
    ConvergentTable t(cf);
    mpq_class target(1, t.q(K) * t.q(K));
    if (mpq_class(ab.hi - ab.lo) / 2 >= target)
        throw TruncationError("alpha enclosure wider than 1/q_K^2");
    for (long p = prec.start; p <= prec.cap; p *= 2) {
        CertReal v = CertReal::between(ab.lo, ab.hi, p);
        mpfr_t w, t;
        mpfr_inits2(p, w, t, static_cast<mpfr_ptr>(nullptr));
        mpfr_sub(w, v.hi_ptr(), v.lo_ptr(), MPFR_RNDU);
        mpfr_div_2ui(w, w, 1, MPFR_RNDU);
        mpfr_set_q(t, target.get_mpq_t(), MPFR_RNDD);
        bool ok = mpfr_less_p(w, t);
        mpfr_clears(w, t, static_cast<mpfr_ptr>(nullptr));
        if (ok) return v;
    }
    throw PrecisionExhausted("alpha radius target not met within precision cap");
}

std::pair<mpq_class, mpq_class> nearest_int_distance_bounds(const CFExpansion& cf, int n) {
    AlphaBounds ab = alpha_bounds(cf);
    if (n == 0) {
        mpq_class half(1, 2);
        if (ab.hi < half) return {ab.lo, ab.hi};
        if (ab.lo > half) return {1 - ab.hi, 1 - ab.lo};
        return {std::min(ab.lo, mpq_class(1 - ab.hi)), half};
    }
    if (n < 0 || n > cf.truncation_order())
        throw TruncationError("distance index " + std::to_string(n) + " unavailable");
    ConvergentTable t(cf);
    mpq_class x = t.q(n) * ab.lo - t.p(n);
    mpq_class y = t.q(n) * ab.hi - t.p(n);
    if (sgn(x) * sgn(y) < 0) return {mpq_class(0), std::max(mpq_class(abs(x)), mpq_class(abs(y)))};
    mpq_class ax = abs(x), ay = abs(y);
    return ax < ay ? std::make_pair(ax, ay) : std::make_pair(ay, ax);
}

CertReal nearest_int_distance(const CFExpansion& cf, int n, const Precision& prec) {
    if (n < 1) throw std::invalid_argument("nearest_int_distance needs n >= 1");
    auto b = nearest_int_distance_bounds(cf, n);
    return CertReal::between(b.first, b.second, prec.start);
}

SlitBase slit_base_length(const CFExpansion& cf, int K, const Precision& prec, double tail_tol) {
    int Kmax = cf.truncation_order();
    int usable = 0;
    for (int n : cf.subseq)
        if (n < Kmax || (cf.exact && n <= Kmax)) ++usable;
    if (K > usable)
        throw TruncationError("slit_base_length: K=" + std::to_string(K) + " exceeds usable n_k (" +
                              std::to_string(usable) + ")");
    ConvergentTable t(cf);
    mpq_class plo = 0, phi = 0, tail = 0;
    for (int k = 1; k <= K; ++k) {
        auto d = nearest_int_distance_bounds(cf, cf.n(k));
        plo += 2 * d.first;
        phi += 2 * d.second;
    }
    for (int k = K + 1; k <= usable; ++k) {
        int nk = cf.n(k);
        if (cf.exact)
            tail += 2 * nearest_int_distance_bounds(cf, nk).second;
        else
            tail += mpq_class(2, t.q(nk + 1));
    }
    if (!cf.exact) tail += mpq_class(8, t.q(Kmax));
    tail.canonicalize();

    SlitBase out{CertReal::between(plo, phi, prec.start), CertReal::between(0, tail, prec.start),
                 CertReal::between(plo, mpq_class(phi + tail), prec.start)};
    out.terms = K;
    out.tail_warning = tail.get_d() > tail_tol;
    if (!cf.subseq.empty()) {
        auto d0 = nearest_int_distance_bounds(cf, cf.n(1) - 1);
        mpq_class thirdlo = d0.first / 3, thirdhi = d0.second / 3;
        mpq_class tlo = plo, thi = phi + tail;
        out.small = decide(
            [&](long p) {
                return compare(CertReal::between(tlo, thi, p), CertReal::between(thirdlo, thirdhi, p));
            },
            prec);
    }
    return out;
}

std::pair<mpq_class, mpq_class> slit_base_bounds(const CFExpansion& cf, int from_k) {
    int Kmax = cf.truncation_order();
    ConvergentTable t(cf);
    mpq_class lo = 0, hi = 0;
    for (int k = std::max(from_k, 1); k <= cf.subseq_count(); ++k) {
        int nk = cf.n(k);
        if (nk < Kmax || (cf.exact && nk <= Kmax)) {
            auto d = nearest_int_distance_bounds(cf, nk);
            lo += 2 * d.first;
            hi += 2 * d.second;
        }
    }
    if (!cf.exact) hi += mpq_class(8, t.q(Kmax));
    lo.canonicalize();
    hi.canonicalize();
    return {lo, hi};
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        default: return "undecided";
    }
}

namespace {

DioEntry sandwich(int n, const std::string& lemma, const mpq_class& L, const mpq_class& vlo,
                  const mpq_class& vhi, const mpq_class& U, const Precision& prec) {
    DioEntry e;
    e.n = n;
    e.lemma = lemma;
    long used_lo = 0, used_hi = 0;
    Ord lo = decide([&](long p) { return compare(CertReal::exact(L, p), CertReal::between(vlo, vhi, p)); },
                    prec, &used_lo);
    Ord hi = decide([&](long p) { return compare(CertReal::between(vlo, vhi, p), CertReal::exact(U, p)); },
                    prec, &used_hi);
    e.precision_used = std::max(used_lo, used_hi);
    e.lower = CertReal::exact(L, e.precision_used);
    e.value = CertReal::between(vlo, vhi, e.precision_used);
    e.upper = CertReal::exact(U, e.precision_used);
    if (lo == Ord::less && hi == Ord::less)
        e.verdict = Verdict::pass;
    else if (lo == Ord::greater || hi == Ord::greater)
        e.verdict = Verdict::fail;
    else
        e.verdict = Verdict::undecided;
    return e;
}

}  // namespace

DioReport verify_dio_lemmas(const CFExpansion& cf, int n_max, const Precision& prec) {
    if (n_max > cf.truncation_order() - 1)
        throw TruncationError("verify_dio_lemmas: n_max=" + std::to_string(n_max) +
                              " needs truncation order > n_max");
    ConvergentTable t(cf);
    DioReport r;
    for (int n = 1; n <= n_max; ++n) {
        auto d = nearest_int_distance_bounds(cf, n);
        const mpz_class& qn = t.q(n);
        const mpz_class& qn1 = t.q(n + 1);
        mpq_class L1(1, (cf.a(n + 1) + 2) * qn), U1(1, qn1);
        r.entries.push_back(sandwich(n, "basic_dio", L1, d.first, d.second, U1, prec));
        mpq_class L2(1, qn * (qn + qn1)), U2(1, qn * qn1);
        mpq_class vlo = d.first / qn, vhi = d.second / qn;
        r.entries.push_back(sandwich(n, "tail_K", L2, vlo, vhi, U2, prec));
    }
    for (const auto& e : r.entries) {
        if (e.verdict == Verdict::pass) ++r.passed;
        else if (e.verdict == Verdict::fail) ++r.failed;
        else ++r.undecided;
    }
    return r;
}

uint64_t rotation_first_return(uint64_t A, uint64_t D, uint64_t lo, uint64_t len, uint64_t x, uint64_t max_steps) {
    if (D == 0 || A >= D || lo >= D || x >= D) throw ConfigError("rotation_first_return: arguments outside [0, D)");
    uint64_t pos = x;
    for (uint64_t k = 1; k <= max_steps; ++k) {
        pos = static_cast<uint64_t>((static_cast<unsigned __int128>(pos) + A) % D);
        uint64_t off = pos >= lo ? pos - lo : pos + (D - lo);
        if (off < len) return k;
    }
    return 0;
}

ConditionSeries check_conditions(const CFExpansion& cf, int K) {
    ConvergentTable t(cf);
    ConditionSeries c;
    mpq_class acc = 0;
    int Kmax = cf.truncation_order();
    for (int k = 1; k <= K && k <= cf.subseq_count(); ++k) {
        int nk = cf.n(k);
        if (nk + 1 > Kmax) break;
        const mpz_class& next = cf.a(nk + 1);
        acc += mpq_class(1, next);
        c.a_partial.push_back(acc.get_d());
        c.b_digits.push_back(cf.a(nk));
        if (k >= 2) {
            double la = log_mpz(next);
            double ratio = la <= 0 ? 0.0
                                   : std::exp(log_mpz(t.q(cf.n(k - 1))) + std::log(la) - log_mpz(t.q(nk)));
            c.c_ratio.push_back(ratio);
        }
    }
    size_t m = c.a_partial.size();
    if (m >= 4) {
        double first = c.a_partial[0];
        double last = c.a_partial[m - 1] - c.a_partial[m - 2];
        c.a_divergent_trend = last >= 0.25 * first;
    }
    if (c.b_digits.size() >= 2) {
        c.b_increasing = true;
        for (size_t i = 1; i < c.b_digits.size(); ++i)
            if (c.b_digits[i] < c.b_digits[i - 1]) c.b_increasing = false;
        if (c.b_digits.back() <= c.b_digits.front()) c.b_increasing = false;
    }
    if (c.c_ratio.size() >= 2) c.c_decaying = c.c_ratio.back() < c.c_ratio.front();
    return c;
}

Filler Filler::parse(const std::string& s) {
    Filler f;
    if (s == "dexp") {
        f.kind = dexp;
        return f;
    }
    if (s.rfind("const:", 0) == 0) {
        f.kind = constant;
        try {
            f.value = mpz_class(s.substr(6));
        } catch (const std::exception&) {
            throw ConfigError("bad filler digit '" + s + "'");
        }
        if (f.value < 1) throw ConfigError("filler digit < 1");
        return f;
    }
    throw ConfigError("unknown filler '" + s + "' (expected const:<d> or dexp)");
}

mpz_class Filler::digit(int k) const {
    if (kind == constant) return value;
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), 2, 1ul << std::min(k, 20));
    return r;
}

CFExpansion family_cf3(int k_max, const Filler& filler) {
    if (k_max < 1) throw ConfigError("k_max must be >= 1");
    if (filler.kind == Filler::constant && filler.value < 1) throw ConfigError("filler digit < 1");
    CFExpansion cf;
    cf.name = "cf3";
    for (int k = 1; k <= k_max; ++k) {
        mpz_class sq = k * k;
        cf.digits.push_back(sq);
        cf.digits.push_back(sq);
        cf.digits.push_back(filler.digit(k));
        cf.digits.push_back(filler.digit(k));
        cf.subseq.push_back(4 * k - 3);
    }
    return cf;
}

CFExpansion family_cf4(int k_max) {
    if (k_max < 1) throw ConfigError("k_max must be >= 1");
    CFExpansion cf;
    cf.name = "cf4";
    for (int k = 1; k <= k_max; ++k) {
        mpz_class a;
        mpz_ui_pow_ui(a.get_mpz_t(), 2, static_cast<unsigned long>(k - 1));
        cf.digits.push_back(a);
        cf.subseq.push_back(k);
    }
    return cf;
}

CFExpansion explicit_cf(const std::vector<mpz_class>& digits, bool exact) {
    CFExpansion cf;
    cf.digits = digits;
    cf.exact = exact;
    for (size_t i = 1; i <= digits.size(); ++i) cf.subseq.push_back(static_cast<int>(i));
    cf.validate();
    return cf;
}

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',' || ch == ' ' || ch == '[' || ch == ']') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

int parse_int(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("bad integer for " + key + ": '" + v + "'");
    }
}

}  // namespace

CFExpansion cf_from_config(const std::map<std::string, std::string>& kv) {
    auto get = [&](const std::string& k, const std::string& dflt) {
        auto it = kv.find(k);
        return it == kv.end() ? dflt : it->second;
    };
    std::string family = get("family", kv.count("digits") ? "explicit" : "cf4");
    int k_max = parse_int("k_max", get("k_max", "12"));
    CFExpansion cf;
    if (family == "cf4") {
        cf = family_cf4(k_max);
    } else if (family == "cf3") {
        cf = family_cf3(k_max, Filler::parse(get("filler", "dexp")));
    } else if (family == "explicit") {
        std::vector<mpz_class> digits;
        for (const auto& s : split_list(get("digits", ""))) {
            try {
                digits.emplace_back(s);
            } catch (const std::exception&) {
                throw ConfigError("bad digit '" + s + "'");
            }
        }
        if (digits.empty()) throw ConfigError("explicit family needs digits");
        std::string ex = get("exact", "false");
        if (ex != "true" && ex != "false") throw ConfigError("exact must be true or false");
        cf = explicit_cf(digits, ex == "true");
    } else {
        throw ConfigError("unknown family '" + family + "'");
    }
    if (kv.count("subseq")) {
        cf.subseq.clear();
        for (const auto& s : split_list(kv.at("subseq"))) cf.subseq.push_back(parse_int("subseq", s));
    }
    cf.validate();
    return cf;
}

nlohmann::json to_json(const DioEntry& e) {
    nlohmann::json j;
    j["n"] = e.n;
    j["lemma"] = e.lemma;
    j["lower_bound"] = e.lower.mid_string(17);
    j["value"] = e.value.mid_string(17);
    j["value_radius"] = e.value.radius();
    j["upper_bound"] = e.upper.mid_string(17);
    if (e.verdict == Verdict::undecided)
        j["pass"] = "undecided";
    else
        j["pass"] = e.verdict == Verdict::pass;
    j["precision_bits"] = e.precision_used;
    return j;
}

nlohmann::json to_json(const DioReport& r) {
    nlohmann::json j;
    j["entries"] = nlohmann::json::array();
    for (const auto& e : r.entries) j["entries"].push_back(to_json(e));
    j["passed"] = r.passed;
    j["failed"] = r.failed;
    j["undecided"] = r.undecided;
    return j;
}

nlohmann::json to_json(const ConditionSeries& c) {
    nlohmann::json j;
    j["A_partial_sums"] = c.a_partial;
    std::vector<std::string> b;
    for (const auto& d : c.b_digits) b.push_back(d.get_str());
    j["B_digits"] = b;
    j["C_ratios"] = c.c_ratio;
    j["A_divergent_trend"] = c.a_divergent_trend;
    j["B_increasing"] = c.b_increasing;
    j["C_decaying"] = c.c_decaying;
    return j;
}

}  // namespace nue
