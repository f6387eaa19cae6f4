#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nue {

struct LengthModel {
    double D = 10;
    double comparability_factor = 4;
    double collar_depth_d = 1;
    double small_threshold = 0.1;       // where the collar asymptotics are trusted
    double hypothesis_threshold = 1.0;  // collar / torus ratio tolerated before flagging
    void validate() const;
};

struct LengthTerm {
    std::string label;
    std::string group;  // minus, plus, collar
    long double value = 0;
    bool included = true;
};

struct LengthEstimate {
    long double total = 0;
    std::vector<LengthTerm> terms;
    std::string regime;
    bool regime_valid = true;
    std::vector<std::string> warnings;

    void add(const std::string& label, const std::string& group, long double value, bool included = true);
    long double group_total(const std::string& group) const;
    void flag(const std::string& why);
};

double hyperbolic_pythagoras(double a, double b);

// i * (-2 log ell)
long double collar_crossing_length(long double i_beta, double ell_beta);

LengthEstimate torus_arc_length(long double i_alpha, long double i_tau, double ell_alpha,
                                double ell_tau_factor = 1.0, const LengthModel& model = {});

LengthEstimate augmented_length(long double i_sigma_minus, long double i_sigma_plus, double ell_beta_minus,
                                double ell_beta_plus, std::optional<long double> collar = std::nullopt,
                                const LengthModel& model = {});

struct LengthBand {
    double lo = 0, mid = 0, hi = 0;
};
LengthBand punctured_rect_horizontal_length(double a, const LengthModel& model = {});

struct ExtremalBounds {
    double lo = 0, hi = 0;
    std::optional<double> slit_model;
};
ExtremalBounds extremal_length_bounds(double flat_length, double area, double cylinder_modulus,
                                      std::optional<std::pair<double, double>> delta_kappa = std::nullopt);

struct LengthRow {
    double t = 0;
    std::string curve_id;
    LengthEstimate est;
};
void write_length_csv(std::ostream& os, const std::vector<LengthRow>& rows);

}  // namespace nue
