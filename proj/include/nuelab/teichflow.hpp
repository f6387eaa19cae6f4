#pragma once

#include "nuelab/numberline.hpp"
#include "nuelab/slitsurf.hpp"
#include "nuelab/veech.hpp"

#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

namespace nue {

struct FlowTime {
    double t = 0;
};

struct SurfaceSnapshot {
    FlowTime t;
    std::vector<std::pair<CurveClass, HolonomyVector>> curves;
    double area_minus = 1, area_plus = 1;
    std::optional<SlitRecord> slit;
    HolonomyVector slit_vec;
};

SurfaceSnapshot make_snapshot(const CFExpansion& cf, const std::vector<CurveClass>& curves,
                              double area_minus = 1, double area_plus = 1, int slit_k = 0);
SurfaceSnapshot apply_flow(const SurfaceSnapshot& s, double dt);

// 1/2 log(p^2 + q^2) without forming the squares
double half_log_norm(const mpz_class& p, const mpz_class& q);

FlowTime schedule_tk(const CFExpansion& cf, int k);

struct CF3Times {
    FlowTime t, s;
};
CF3Times schedule_cf3(const CFExpansion& cf, int k);

struct CF4Times {
    FlowTime s, t, z;  // z is the offset s_k + z_k - s_k
    double residual = 0;
};
double solve_zk(int k, double tol = 1e-12);
CF4Times schedule_cf4(const CFExpansion& cf, int k);

struct TorusAreas {
    double area_minus = 1, area_plus = 1;
    double erg_lower = 0, erg_upper = 0;  // sandwich for the wrong-torus mass at c = +-1
    bool has_sandwich = false;
    bool measured = false;
};
// wrong-torus mass 1/(4 a_{n_k+1}); for k = 1 and a measure estimate the sheet masses are used
TorusAreas torus_areas(const CFExpansion& cf, const MeasureEstimate* m, double c, int k);

struct FlatInterval {
    double log_lo = 0, log_hi = 0;
    double lo() const;
    double hi() const;
};
FlatInterval beta_minus_flat_length(const CFExpansion& cf, int k, FlowTime t, double C = 0.25);

void write_flow_csv(std::ostream& os, const std::vector<SurfaceSnapshot>& snaps);

}  // namespace nue
