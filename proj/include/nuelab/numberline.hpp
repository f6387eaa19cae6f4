#pragma once

#include "nuelab/certreal.hpp"
#include "nuelab/core.hpp"

#include <gmpxx.h>

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace nue {

struct CFExpansion {
    std::vector<mpz_class> digits;  // a_1..a_K
    std::vector<int> subseq;        // n_1 < n_2 < ...
    bool exact = false;             // finite CF: alpha = p_K / q_K exactly
    std::string name = "explicit";

    int truncation_order() const { return static_cast<int>(digits.size()); }
    const mpz_class& a(int n) const;
    int n(int k) const;  // 1-based subsequence accessor
    int subseq_count() const { return static_cast<int>(subseq.size()); }
    void validate() const;
};

struct Convergent {
    mpz_class p, q;
    int index = 0;
};

// p_n, q_n for n in [-1, K]
class ConvergentTable {
public:
    explicit ConvergentTable(const CFExpansion& cf);
    const mpz_class& p(int n) const;
    const mpz_class& q(int n) const;
    int order() const { return static_cast<int>(p_.size()) - 2; }

private:
    std::vector<mpz_class> p_, q_;
};

std::vector<Convergent> convergents(const CFExpansion& cf, int n);

struct AlphaBounds {
    mpq_class lo, hi;
};
AlphaBounds alpha_bounds(const CFExpansion& cf);

CertReal alpha_value(const CFExpansion& cf, const Precision& prec = {});
CertReal nearest_int_distance(const CFExpansion& cf, int n, const Precision& prec = {});
// exact rational enclosure of ||q_n alpha||, n >= 0
std::pair<mpq_class, mpq_class> nearest_int_distance_bounds(const CFExpansion& cf, int n);

struct SlitBase {
    CertReal partial;
    CertReal tail;
    CertReal total;
    int terms = 0;
    Ord small = Ord::undecided;  // total < d_{n_1 - 1} / 3
    bool tail_warning = false;
};
SlitBase slit_base_length(const CFExpansion& cf, int K, const Precision& prec = {},
                          double tail_tol = 1e-6);

// exact rational enclosure of b = sum_k 2 ||q_{n_k} alpha|| including the tail bound
std::pair<mpq_class, mpq_class> slit_base_bounds(const CFExpansion& cf, int from_k = 1);

// first k in [1, max_steps] with x + k*A/D mod 1 in [lo, lo + len) mod 1, all in units of 1/D; 0 if none
uint64_t rotation_first_return(uint64_t A, uint64_t D, uint64_t lo, uint64_t len, uint64_t x, uint64_t max_steps);

enum class Verdict { pass, fail, undecided };
const char* to_string(Verdict v);

struct DioEntry {
    int n = 0;
    std::string lemma;
    CertReal lower, value, upper;
    Verdict verdict = Verdict::undecided;
    long precision_used = 0;
};

struct DioReport {
    std::vector<DioEntry> entries;
    int passed = 0, failed = 0, undecided = 0;
};
DioReport verify_dio_lemmas(const CFExpansion& cf, int n_max, const Precision& prec = {});

struct ConditionSeries {
    std::vector<double> a_partial;    // sum_{j<=k} 1 / a_{n_j+1}
    std::vector<mpz_class> b_digits;  // a_{n_k}
    std::vector<double> c_ratio;      // q_{n_{k-1}} log a_{n_k+1} / q_{n_k}
    bool a_divergent_trend = false;
    bool b_increasing = false;
    bool c_decaying = false;
};
ConditionSeries check_conditions(const CFExpansion& cf, int K);

struct Filler {
    enum Kind { constant, dexp } kind = dexp;
    mpz_class value = 2;
    static Filler parse(const std::string& s);
    mpz_class digit(int k) const;  // filler for block k
};

CFExpansion family_cf3(int k_max, const Filler& filler = {});
CFExpansion family_cf4(int k_max);
CFExpansion explicit_cf(const std::vector<mpz_class>& digits, bool exact = false);

// keys: digits, family, k_max, filler, exact, subseq
CFExpansion cf_from_config(const std::map<std::string, std::string>& kv);

nlohmann::json to_json(const DioEntry& e);
nlohmann::json to_json(const DioReport& r);
nlohmann::json to_json(const ConditionSeries& c);

}  // namespace nue
