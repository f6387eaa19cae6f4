// nue_lab: verification suites, orbit runs, flow scans and limit classification.

#include "nuelab/hyplen.hpp"
#include "nuelab/limitscan.hpp"
#include "nuelab/numberline.hpp"
#include "nuelab/slitsurf.hpp"
#include "nuelab/teichflow.hpp"
#include "nuelab/veech.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace nue;

namespace {

enum Exit { ok = 0, hard_failure = 2, undecided = 3, usage = 64 };

const std::set<std::string> kKnownKeys{
    "family", "digits",    "filler",  "exact",      "subseq", "c",        "k_min",      "k_max",
    "n",      "seeds",     "out",     "precision_cap", "tol_factor", "schedule", "model", "oversample",
    "window", "eps",       "min_points", "stride"};

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
        if (!kKnownKeys.count(k)) throw ConfigError(path + ":" + std::to_string(lineno) + ": unknown key '" + k + "'");
        kv[k] = v;
    }
    return kv;
}

template <class T>
T parse_num(const std::string& key, const std::string& s) {
    T v{};
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw ConfigError("bad value for " + key + ": '" + s + "'");
    return v;
}

uint64_t parse_count(const std::string& key, const std::string& s) {
    // accepts 10000000 or 1e7
    double d = parse_num<double>(key, s);
    if (!(d >= 0) || d > 1e15 || d != std::floor(d)) throw ConfigError("bad value for " + key + ": '" + s + "'");
    return static_cast<uint64_t>(d);
}

struct RunConfig {
    std::map<std::string, std::string> kv;
    std::string family;
    double c = 1;
    int k_min = 1, k_max = 12;
    uint64_t n = 1'000'000;
    std::optional<int> seed_count;
    std::vector<double> seed_points;
    std::string out = "nue_lab_out";
    long precision_cap = 16384;
    double tol_factor = 4;
    std::string schedule = "both";
    std::string model = "auto";
    int oversample = 8;
    double window = 0.3, eps = 0.05;
    int min_points = 5;
    uint64_t stride = 0;

    std::string get(const std::string& k, const std::string& d) const {
        auto it = kv.find(k);
        return it == kv.end() ? d : it->second;
    }
};

RunConfig build_config(std::map<std::string, std::string> kv) {
    RunConfig r;
    if (kv.count("family") && kv.at("family") != "cf3" && kv.at("family") != "cf4" && kv.at("family") != "explicit")
        throw ConfigError("family must be cf3, cf4 or explicit");
    r.family = kv.count("family") ? kv.at("family") : (kv.count("digits") ? "explicit" : "cf4");
    kv["family"] = r.family;
    if (r.family != "explicit" && kv.count("digits")) throw ConfigError("digits given with family " + r.family);
    r.kv = kv;

    r.c = parse_num<double>("c", r.get("c", "1"));
    if (!(r.c >= -1 && r.c <= 1)) throw ConfigError("c must lie in [-1, 1]");
    int dflt_kmax = r.family == "cf3" ? 8 : 12;
    int dflt_kmin = r.family == "cf3" ? 2 : (r.family == "cf4" ? 4 : 1);
    if (r.family == "explicit") {
        int count = 1;
        for (char ch : r.get("digits", "")) count += ch == ',';
        dflt_kmax = count;
    }
    r.k_max = parse_num<int>("k_max", r.get("k_max", std::to_string(dflt_kmax)));
    r.k_min = parse_num<int>("k_min", r.get("k_min", std::to_string(std::min(dflt_kmin, r.k_max))));
    if (r.k_max < 1 || r.k_max > 64) throw ConfigError("k_max must lie in [1, 64]");
    if (r.k_min < 1 || r.k_min > r.k_max) throw ConfigError("k_min must lie in [1, k_max]");
    r.n = parse_count("n", r.get("n", "1000000"));

    std::string seeds = r.get("seeds", "16");
    if (seeds.find_first_of(".,") == std::string::npos) {
        int m = parse_num<int>("seeds", seeds);
        if (m < 1 || m > 4096) throw ConfigError("seed count must lie in [1, 4096]");
        r.seed_count = m;
    } else {
        std::string cur;
        std::stringstream ss(seeds);
        while (std::getline(ss, cur, ',')) {
            double x = parse_num<double>("seeds", trim(cur));
            if (!(x >= 0 && x < 1)) throw ConfigError("seed positions must lie in [0, 1)");
            r.seed_points.push_back(x);
        }
    }
    r.out = r.get("out", r.out);
    if (r.out.empty()) throw ConfigError("out must not be empty");
    r.precision_cap = parse_num<long>("precision_cap", r.get("precision_cap", "16384"));
    if (r.precision_cap < 128) throw ConfigError("precision_cap must be at least 128 bits");
    r.tol_factor = parse_num<double>("tol_factor", r.get("tol_factor", "4"));
    if (!(r.tol_factor >= 1)) throw ConfigError("tol_factor must be >= 1");
    r.schedule = r.get("schedule", "both");
    if (r.schedule != "tk" && r.schedule != "sk" && r.schedule != "both" && r.schedule != "full")
        throw ConfigError("schedule must be tk, sk, both or full");
    r.model = r.get("model", "auto");
    if (r.model != "auto" && r.model != "geometric" && r.model != "closed_form")
        throw ConfigError("model must be auto, geometric or closed_form");
    r.oversample = parse_num<int>("oversample", r.get("oversample", "8"));
    if (r.oversample < 0 || r.oversample > 1000) throw ConfigError("oversample must lie in [0, 1000]");
    r.window = parse_num<double>("window", r.get("window", "0.3"));
    if (!(r.window > 0 && r.window <= 1)) throw ConfigError("window must lie in (0, 1]");
    r.eps = parse_num<double>("eps", r.get("eps", "0.05"));
    if (!(r.eps > 0 && r.eps < 1)) throw ConfigError("eps must lie in (0, 1)");
    r.min_points = parse_num<int>("min_points", r.get("min_points", "5"));
    if (r.min_points < 1) throw ConfigError("min_points must be positive");
    r.stride = parse_count("stride", r.get("stride", "0"));
    return r;
}

CFExpansion expansion_for(const RunConfig& r, int k_max) {
    std::map<std::string, std::string> kv;
    for (const char* k : {"family", "digits", "filler", "exact", "subseq"})
        if (r.kv.count(k)) kv[k] = r.kv.at(k);
    kv["k_max"] = std::to_string(k_max);
    return cf_from_config(kv);
}

json config_echo(const RunConfig& r) {
    json j = json::object();
    for (const auto& [k, v] : r.kv) j[k] = v;
    return j;
}

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + p.string() + "'");
    f << s;
}

fs::path out_dir(const RunConfig& r) {
    fs::path d(r.out);
    std::error_code ec;
    fs::create_directories(d, ec);
    if (ec) throw ConfigError("cannot create output directory '" + r.out + "': " + ec.message());
    return d;
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// verify

int cmd_verify(const RunConfig& r) {
    // two spare digits so that n = k_max is decidable without the unknown tail
    CFExpansion cf = expansion_for(r, r.family == "cf4" ? r.k_max + 2 : r.k_max);
    json rep;
    rep["config"] = config_echo(r);
    std::vector<std::string> notes;
    int failures = 0, undecided_count = 0;

    int n_max = cf.truncation_order() - (cf.exact ? 1 : 2);
    if (r.family != "cf3") n_max = std::min(n_max, r.k_max);
    if (n_max >= 1) {
        DioReport d = verify_dio_lemmas(cf, n_max, Precision{128, r.precision_cap});
        rep["diophantine"] = to_json(d);
        failures += d.failed;
        undecided_count += d.undecided;
    } else {
        notes.push_back("diophantine: expansion too short to test");
    }

    ConditionSeries cs = check_conditions(cf, r.k_max);
    json cj = to_json(cs);
    size_t m = cs.a_partial.size();
    if (m >= 2) {
        double first = cs.a_partial[0], last = cs.a_partial[m - 1] - cs.a_partial[m - 2];
        if (last >= 0.25 * first)
            notes.push_back("condition A: divergence trend, partial sums still grow by " + fmt(last) + " per term" +
                            (m < 4 ? " (short series)" : ""));
        else
            notes.push_back("condition A: partial sums level off at " + fmt(cs.a_partial.back()) + ", consistent");
    }
    if (!cs.b_increasing) notes.push_back("condition B: digits a_{n_k} not increasing over the range");
    if (!cs.c_decaying) notes.push_back("condition C: ratio not decaying over the range");
    rep["conditions"] = cj;

    json slits = json::array(), inter = json::array();
    int usable = 0;
    for (int n : cf.subseq)
        if (n + 1 <= cf.truncation_order()) ++usable;
    int kslit = std::min(usable, r.k_max);
    if (kslit >= 1) {
        SlitOptions opt;
        opt.enforce_smallness = false;
        opt.max_return_steps = 20'000'000;
        try {
            SlitSequence seq = slit_sequence(cf, kslit, opt);
            for (const auto& w : seq.warnings) notes.push_back("slits: " + w);
            ConvergentTable t(cf);
            for (size_t i = 0; i < seq.records.size(); ++i) {
                const SlitRecord& a = seq.records[i];
                json s;
                s["k"] = a.k;
                s["h_lo"] = a.h_lo.get_str();
                s["h_hi"] = a.h_hi.get_str();
                s["crossings"] = a.crossings.get_str();
                s["orbit_checked"] = a.orbit_checked;
                bool pass = true;
                if (a.orbit_checked) pass = a.orbit_crossings == a.crossings;
                if (i + 1 < seq.records.size()) {
                    const SlitRecord& b = seq.records[i + 1];
                    auto d = nearest_int_distance_bounds(cf, cf.n(a.k));
                    pass = pass && a.h_lo - b.h_lo == 2 * d.first && a.h_hi - b.h_hi == 2 * d.second;
                }
                s["pass"] = pass;
                if (!pass) ++failures;
                slits.push_back(s);

                mpz_class i1 = intersection_number(CurveClass::gamma(1), CurveClass::zeta(a.k), cf);
                json e{{"pair", "gamma1.zeta" + std::to_string(a.k)}, {"formula", i1.get_str()}};
                bool ipass = i1 == a.crossings;
                if (a.orbit_checked) {
                    e["orbit"] = a.orbit_crossings.get_str();
                    ipass = ipass && i1 == a.orbit_crossings;
                }
                e["pass"] = ipass;
                if (!ipass) ++failures;
                inter.push_back(e);
                if (cf.n(a.k) >= 1) {
                    auto sg = CurveClass::sigma(cf, a.k, TorusSide::minus);
                    auto bt = CurveClass::beta(cf, a.k, TorusSide::minus);
                    mpz_class g = intersection_number(CurveClass::gamma(2), sg, cf);
                    mpz_class sb = intersection_number(sg, bt, cf);
                    bool p2 = g == t.q(cf.n(a.k)) && sb == 1;
                    inter.push_back({{"pair", "gamma2.sigma" + std::to_string(a.k)},
                                     {"value", g.get_str()},
                                     {"sigma_beta", sb.get_str()},
                                     {"pass", p2}});
                    if (!p2) ++failures;
                }
            }
        } catch (const InternalInconsistency& e) {
            notes.push_back(std::string("slits: ") + e.what());
            ++failures;
        } catch (const ModelError& e) {
            notes.push_back(std::string("slits: not constructed, ") + e.what());
        }
    }
    rep["slits"] = slits;
    rep["intersections"] = inter;
    rep["notes"] = notes;
    rep["failures"] = failures;
    rep["undecided"] = undecided_count;
    fs::path d = out_dir(r);
    write_text(d / "verify.json", rep.dump(2) + "\n");
    std::cout << "verify: " << failures << " failures, " << undecided_count << " undecided -> "
              << (d / "verify.json").string() << "\n";
    for (const auto& n : notes) std::cout << "  note: " << n << "\n";
    if (failures) return hard_failure;
    if (undecided_count) return undecided;
    return ok;
}

// scan

ScanConfig scan_config(const RunConfig& r) {
    ScanConfig s;
    s.family = r.family;
    if (r.family == "explicit") s.explicit_cf = expansion_for(r, r.k_max);
    s.filler = r.get("filler", "dexp");
    s.c = r.c;
    s.schedule = r.schedule;
    s.k_min = r.k_min;
    s.k_max = r.k_max;
    s.oversample = r.oversample;
    s.model = r.model;
    s.orbit_n = r.kv.count("n") ? r.n : 2'000'000;
    s.seeds = r.seed_count.value_or(16);
    return s;
}

int cmd_scan(const RunConfig& r) {
    ScanConfig sc = scan_config(r);
    ScanResult res = scan(sc);
    LimitVerdict v = classify(res.points, r.window, r.eps, r.min_points);
    for (const auto& n : res.notes) v.notes.push_back(n);
    fs::path d = out_dir(r);
    {
        std::ofstream f(d / "scan.csv", std::ios::binary);
        write_scan_csv(f, res.points);
    }
    json j = to_json(v);
    j["config"] = config_echo(r);
    j["model"] = res.model;
    j["pairings"] = {{"mu_minus_gamma1", res.pairings.mu_minus_g1},
                     {"mu_plus_gamma1", res.pairings.mu_plus_g1},
                     {"mu_minus_gamma2", res.pairings.mu_minus_g2},
                     {"mu_plus_gamma2", res.pairings.mu_plus_g2},
                     {"source", res.pairings.source}};
    j["points"] = res.points.size();
    write_text(d / "verdict.json", j.dump(2) + "\n");
    std::cout << "scan: " << res.points.size() << " points, verdict " << to_string(v.kind) << " c in ["
              << fmt(v.c_min) << ", " << fmt(v.c_max) << "] -> " << (d / "scan.csv").string() << "\n";
    return v.kind == LimitKind::inconclusive ? undecided : ok;
}

// orbit

int cmd_orbit(const RunConfig& r) {
    CFExpansion cf = expansion_for(r, r.k_max);
    SkewIET T(cf, Precision{128, r.precision_cap});
    std::vector<SeedPoint> seeds;
    std::vector<std::string> warnings;
    if (r.seed_count) {
        seeds = default_seeds(T, *r.seed_count);
    } else {
        const uint64_t Q = T.surrogate().Q;
        for (double x : r.seed_points) {
            SeedPoint s{static_cast<uint64_t>(std::floor(x * static_cast<double>(Q))), 0};
            if (s.x >= Q) s.x = Q - 1;
            if (std::find(seeds.begin(), seeds.end(), s) != seeds.end()) {
                warnings.push_back("duplicate seed " + fmt(x) + " dropped");
                continue;
            }
            seeds.push_back(s);
        }
    }
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    uint64_t stride = r.stride ? r.stride : std::max<uint64_t>(1, r.n / 1000);
    std::vector<BirkhoffSeries> runs(seeds.size());
    bool exhausted = false;
    std::string why;
    try {
        parallel_for(seeds.size(), [&](size_t i) {
            runs[i] = birkhoff_torus_fraction(T, seeds[i].x, seeds[i].sheet, r.n, stride);
        });
    } catch (const PrecisionExhausted& e) {
        exhausted = true;
        why = e.what();
    }
    fs::path d = out_dir(r);
    json j;
    j["config"] = config_echo(r);
    j["warnings"] = warnings;
    j["surrogate"] = {{"P", T.surrogate().P}, {"Q", T.surrogate().Q}, {"order", T.surrogate().order},
                      {"alpha_error", T.surrogate().alpha_error}};
    json files = json::array();
    for (size_t i = 0; i < runs.size(); ++i) {
        std::string name = "orbit_seed" + std::to_string(i) + ".csv";
        std::ofstream f(d / name, std::ios::binary);
        write_orbit_csv(f, T, {runs[i]});
        files.push_back({{"file", name},
                         {"x0", seeds[i].x},
                         {"sheet0", seeds[i].sheet},
                         {"tail_fraction", runs[i].tail_fraction},
                         {"drift_warning", runs[i].drift_warning}});
    }
    j["series"] = files;
    if (exhausted) j["error"] = why;
    if (!exhausted && r.n >= 1000 && seeds.size() >= 2) {
        try {
            j["measures"] = to_json(estimate_ergodic_measures(T, seeds, r.n));
        } catch (const Inconclusive& e) {
            j["measures"] = nullptr;
            j["measures_note"] = e.what();
        }
    }
    write_text(d / "orbit.json", j.dump(2) + "\n");
    std::cout << "orbit: " << runs.size() << " series of " << r.n << " steps -> " << d.string() << "\n";
    if (exhausted) {
        std::cerr << "warning: " << why << "\n";
        return undecided;
    }
    return ok;
}

// report: curve, flow and length tables along the schedule

int cmd_report(const RunConfig& r) {
    CFExpansion cf = r.family == "explicit" ? expansion_for(r, r.k_max)
                                            : scan_expansion(scan_config(r));
    fs::path d = out_dir(r);
    int kc = 0;
    for (int k = 1; k <= cf.subseq_count() && k <= r.k_max; ++k)
        if (cf.n(k) + 1 <= cf.truncation_order()) kc = k;
    std::vector<CurveClass> curves{CurveClass::gamma(1), CurveClass::gamma(2)};
    for (int k = std::max(1, r.k_min); k <= kc; ++k)
        if (cf.n(k) >= 1)
            for (auto side : {TorusSide::minus, TorusSide::plus}) {
                curves.push_back(CurveClass::sigma(cf, k, side));
                curves.push_back(CurveClass::beta(cf, k, side));
            }
    {
        std::ofstream f(d / "curves.csv", std::ios::binary);
        write_curve_csv(f, curves, cf);
    }

    std::vector<SurfaceSnapshot> snaps;
    std::vector<LengthRow> rows;
    json sched = json::array();
    for (int k = std::max(1, r.k_min); k <= kc; ++k) {
        double t = schedule_tk(cf, k).t;
        if (!std::isfinite(t)) continue;
        TorusAreas a = torus_areas(cf, nullptr, r.c, k);
        SurfaceSnapshot s0 = make_snapshot(cf, curves, a.area_minus, a.area_plus, k);
        snaps.push_back(apply_flow(s0, t));
        sched.push_back({{"k", k}, {"t_k", t}, {"area_minus", a.area_minus}, {"area_plus", a.area_plus}});
        try {
            auto L = geometric_lengths(cf, t, Pairings{}, r.c, LengthModel{});
            rows.push_back({t, "gamma1", L.first});
            rows.push_back({t, "gamma2", L.second});
        } catch (const std::exception& e) {
            sched.back()["length_error"] = e.what();
        }
    }
    {
        std::ofstream f(d / "flow.csv", std::ios::binary);
        write_flow_csv(f, snaps);
    }
    {
        std::ofstream f(d / "lengths.csv", std::ios::binary);
        write_length_csv(f, rows);
    }
    json j;
    j["config"] = config_echo(r);
    j["conditions"] = to_json(check_conditions(cf, r.k_max));
    j["schedule"] = sched;
    j["files"] = {"curves.csv", "flow.csv", "lengths.csv"};
    write_text(d / "report.json", j.dump(2) + "\n");
    std::cout << "report: " << curves.size() << " curves, " << snaps.size() << " flow times -> " << d.string()
              << "\n";
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Non-uniquely-ergodic slit torus lab"};
    app.require_subcommand(1);
    std::string config_file;
    std::map<std::string, std::string> flags;
    struct FlagSpec {
        const char* name;
        const char* key;
        const char* help;
    };
    const std::vector<FlagSpec> specs{
        {"--family", "family", "cf3, cf4 or explicit"},
        {"--digits", "digits", "comma-separated continued fraction digits"},
        {"--c", "c", "point of the simplex, in [-1, 1]"},
        {"--kmax", "k_max", "largest k"},
        {"--n", "n", "orbit length"},
        {"--seeds", "seeds", "seed count, or comma-separated positions in [0, 1)"},
        {"--out", "out", "output directory"},
        {"--precision-cap", "precision_cap", "largest MPFR precision in bits"},
        {"--tol-factor", "tol_factor", "multiplier on the dominance rates"},
        {"--schedule", "schedule", "tk, sk, both or full"},
    };
    std::vector<std::string> values(specs.size());
    std::vector<CLI::App*> subs;
    for (auto [name, help] : std::vector<std::pair<const char*, const char*>>{
             {"verify", "certified Diophantine, condition, slit and intersection checks"},
             {"scan", "flow scan and limit classification"},
             {"orbit", "Birkhoff series per seed"},
             {"report", "curve, flow and length tables"}}) {
        CLI::App* s = app.add_subcommand(name, help);
        s->add_option("--config", config_file, "key = value file; flags override it");
        for (size_t i = 0; i < specs.size(); ++i) s->add_option(specs[i].name, values[i], specs[i].help);
        subs.push_back(s);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : usage;
    }

    RunConfig cfg;
    try {
        std::map<std::string, std::string> kv;
        if (!config_file.empty()) kv = read_config_file(config_file);
        for (CLI::App* s : subs)
            for (size_t i = 0; i < specs.size(); ++i)
                if (s->parsed() && s->count(specs[i].name)) kv[specs[i].key] = values[i];
        cfg = build_config(kv);
    } catch (const ConfigError& e) {
        std::cerr << "nue_lab: " << e.what() << "\n";
        return usage;
    }

    try {
        if (subs[0]->parsed()) return cmd_verify(cfg);
        if (subs[1]->parsed()) return cmd_scan(cfg);
        if (subs[2]->parsed()) return cmd_orbit(cfg);
        return cmd_report(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "nue_lab: " << e.what() << "\n";
        return usage;
    } catch (const PrecisionExhausted& e) {
        std::cerr << "nue_lab: undecided: " << e.what() << "\n";
        return undecided;
    } catch (const Inconclusive& e) {
        std::cerr << "nue_lab: inconclusive: " << e.what() << "\n";
        return undecided;
    } catch (const std::exception& e) {
        std::cerr << "nue_lab: " << e.what() << "\n";
        return hard_failure;
    }
}
