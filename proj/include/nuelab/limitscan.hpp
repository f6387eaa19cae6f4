#pragma once

#include "nuelab/hyplen.hpp"
#include "nuelab/numberline.hpp"
#include "nuelab/teichflow.hpp"
#include "nuelab/veech.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace nue {

// mu_-(gamma_i), mu_+(gamma_i) as sheet masses (each measure has total mass 2)
struct Pairings {
    double mu_minus_g1 = 0.8, mu_plus_g1 = 1.2, mu_minus_g2 = 1.2, mu_plus_g2 = 0.8;
    std::string source = "nominal";
    double w(int which, int gamma) const;  // weight mu / 2
};
Pairings pairings_from(const MeasureEstimate& m);

struct CHat {
    double c = 0;
    bool clamped = false;
};
CHat ratio_to_c(double r, const Pairings& p);

struct ScanPoint {
    FlowTime t;
    int k = 0;
    std::string tag;  // s, s+z, t, grid
    LengthEstimate g1, g2;
    double ratio = 1, c_hat = 0, dominance = 0;
    bool clamped = false;
    bool regime_valid = true;
    std::string model;
};

struct ScanConfig {
    std::string family = "cf4";  // cf3, cf4, explicit
    CFExpansion explicit_cf;     // used when family == explicit
    std::string filler = "dexp";
    double c = 1;
    std::string schedule = "both";  // tk, sk, both, full
    int k_min = 4, k_max = 12;
    int oversample = 8;
    std::string model = "auto";  // auto, geometric, closed_form
    LengthModel lm;
    std::optional<Pairings> pairings;
    uint64_t orbit_n = 2'000'000;
    int seeds = 16;
};

struct ScanResult {
    std::vector<ScanPoint> points;
    Pairings pairings;
    std::string model;
    std::vector<std::string> notes;
};

CFExpansion scan_expansion(const ScanConfig& cfg);
ScanResult scan(const ScanConfig& cfg);

// model lengths of gamma_1, gamma_2 at a single time
std::pair<LengthEstimate, LengthEstimate> geometric_lengths(const CFExpansion& cf, double u, const Pairings& p,
                                                            double c, const LengthModel& lm);
std::pair<LengthEstimate, LengthEstimate> closed_form_cf4(const CFExpansion& cf, int k, double u, const Pairings& p,
                                                          double c);
std::pair<LengthEstimate, LengthEstimate> closed_form_cf3(const CFExpansion& cf, int k, bool at_tk,
                                                          const Pairings& p, double c, const LengthModel& lm);

enum class DomRegime { at_tk, interval_tk_sk1, at_sk, interval_sk_zk, interval_zk_tk };
const char* to_string(DomRegime r);
struct DominanceResult {
    double value = 0;
    double bound = 0;  // regime rate times tol_factor
    bool two_sided = false;
    bool pass = false;
};
DominanceResult dominance_cf4(const CFExpansion& cf, int k, DomRegime regime, double tol_factor = 4,
                              int grid = 64);

struct OscillationReport {
    int alternations = 0;
    int checked = 0;
    bool incomplete = false;
    int alternations_all_terms = 0;  // same test with every term counted
    std::vector<int> failed_k;
};
OscillationReport oscillation_check(const std::vector<ScanPoint>& points);

enum class LimitKind { barycenter, ergodic_plus, ergodic_minus, interval, inconclusive };
const char* to_string(LimitKind k);
struct LimitVerdict {
    LimitKind kind = LimitKind::inconclusive;
    double c_min = 0, c_max = 0;
    double t_from = 0, t_to = 0;
    double window = 0.3;
    int valid_points = 0;
    std::vector<std::string> notes;
};
LimitVerdict classify(const std::vector<ScanPoint>& points, double window = 0.3, double eps = 0.05,
                      int min_points = 10);

void write_scan_csv(std::ostream& os, const std::vector<ScanPoint>& points);
nlohmann::json to_json(const LimitVerdict& v);

}  // namespace nue
