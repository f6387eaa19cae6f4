#include "nuelab/hyplen.hpp"

#include "nuelab/core.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace nue {

void LengthModel::validate() const {
    if (!(D > 0 && comparability_factor > 0 && collar_depth_d > 0 && small_threshold > 0 &&
          hypothesis_threshold > 0))
        throw ConfigError("length model constants must be positive");
}

void LengthEstimate::add(const std::string& label, const std::string& group, long double value, bool included) {
    if (value < 0) throw ModelError("negative length term " + label);
    terms.push_back({label, group, value, included});
    // torus groups first so that swapping the two tori leaves the total bit-identical
    long double rest = 0;
    for (const auto& t : terms)
        if (t.included && t.group != "minus" && t.group != "plus" && t.group != "collar") rest += t.value;
    total = (group_total("minus") + group_total("plus")) + group_total("collar") + rest;
}

long double LengthEstimate::group_total(const std::string& group) const {
    long double s = 0;
    for (const auto& t : terms)
        if (t.included && t.group == group) s += t.value;
    return s;
}

void LengthEstimate::flag(const std::string& why) {
    regime_valid = false;
    warnings.push_back(why);
}

double hyperbolic_pythagoras(double a, double b) {
    a = std::fabs(a);
    b = std::fabs(b);
    if (a == 0) return b;
    if (b == 0) return a;
    // log(cosh a cosh b)
    double L = a + b - 2 * kLn2 + std::log1p(std::exp(-2 * a)) + std::log1p(std::exp(-2 * b));
    if (L > 20) return L + std::log1p(std::sqrt(-std::expm1(-2 * L)));
    double sa = std::sinh(a / 2), sb = std::sinh(b / 2);
    double y = 2 * sa * sa * std::cosh(b) + 2 * sb * sb;
    return std::log1p(y + std::sqrt(y * (y + 2)));
}

long double collar_crossing_length(long double i_beta, double ell_beta) {
    if (!(ell_beta > 0 && ell_beta < 1)) throw ModelError("collar length needs 0 < ell < 1");
    if (i_beta < 0) throw ModelError("negative intersection number");
    return i_beta * (-2.0L * std::log(static_cast<long double>(ell_beta)));
}

LengthEstimate torus_arc_length(long double i_alpha, long double i_tau, double ell_alpha, double ell_tau_factor,
                                const LengthModel& model) {
    LengthEstimate e;
    e.regime = "asymptotic";
    if (!(ell_alpha > 0)) throw ModelError("ell_alpha must be positive");
    long double collar = ell_alpha < 1 ? collar_crossing_length(i_alpha, ell_alpha) : 0.0L;
    e.add("collar_term", "torus", collar);
    e.add("twist_term", "torus", i_tau * ell_alpha * ell_tau_factor);
    if (ell_alpha >= model.small_threshold)
        e.flag("ell_alpha above the small-length threshold; asymptotic formula not in force");
    return e;
}

LengthEstimate augmented_length(long double i_sigma_minus, long double i_sigma_plus, double ell_beta_minus,
                                double ell_beta_plus, std::optional<long double> collar, const LengthModel& model) {
    LengthEstimate e;
    e.regime = "augmented";
    e.add("torus_minus_term", "minus", i_sigma_minus * ell_beta_minus);
    e.add("torus_plus_term", "plus", i_sigma_plus * ell_beta_plus);
    if (collar) {
        e.add("collar_term", "collar", *collar, false);
        long double torus = e.total;
        if (torus <= 0 || *collar / torus > model.hypothesis_threshold)
            e.flag("collar contribution not small against the torus terms");
    }
    return e;
}

LengthBand punctured_rect_horizontal_length(double a, const LengthModel& model) {
    if (!(a >= 1)) throw ModelError("punctured rectangle needs aspect a >= 1");
    double mid = 4 * std::log(a);
    return {std::max(0.0, mid - model.D), mid, mid + model.D};
}

ExtremalBounds extremal_length_bounds(double flat_length, double area, double cylinder_modulus,
                                      std::optional<std::pair<double, double>> delta_kappa) {
    if (!(area > 0) || !(cylinder_modulus > 0)) throw ModelError("area and modulus must be positive");
    ExtremalBounds b;
    b.lo = flat_length * flat_length / area;
    b.hi = 1 / cylinder_modulus;
    if (delta_kappa) {
        auto [delta, kappa] = *delta_kappa;
        if (!(delta > 0) || delta >= kappa) throw ModelError("slit model needs 0 < delta < kappa");
        b.slit_model = 1 / std::log(kappa / delta);
    }
    return b;
}

void write_length_csv(std::ostream& os, const std::vector<LengthRow>& rows) {
    os << "t,curve_id,regime,collar_term,torus_minus_term,torus_plus_term,total,regime_valid\n";
    char buf[320];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.12g,%s,%s,%.12Lg,%.12Lg,%.12Lg,%.12Lg,%d\n", r.t, r.curve_id.c_str(),
                      r.est.regime.c_str(), r.est.group_total("collar"), r.est.group_total("minus"),
                      r.est.group_total("plus"), r.est.total, r.est.regime_valid ? 1 : 0);
        os << buf;
    }
}

}  // namespace nue
