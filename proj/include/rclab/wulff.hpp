#pragma once

#include <string>
#include <vector>

#include "rclab/droplet.hpp"
#include "rclab/rc_model.hpp"

namespace rclab {

// Direction-resolved inverse correlation length estimates.
struct XiTable {
    std::vector<Vec2> directions; // full angular grid, unit vectors
    std::vector<double> xi;       // slope estimates, > 0 subcritically
    std::vector<double> stderr_;  // per-direction standard errors
    std::vector<double> max_residual; // fit diagnostics
    std::vector<uint8_t> flagged; // had zero-connection counts at some k

    // provenance
    double p = 0, q = 1;
    int kmax = 0;
    long samples = 0;
    uint64_t seed = 0;
};

// Monte Carlo estimate of xi over `dirs` grid directions (estimated on a
// symmetry-reduced subset, mirrored by the 8 lattice symmetries).
// Connection probabilities are measured on a box of half-width 2*kmax and
// regressed over k in [kmax/2, kmax].
XiTable estimate_xi(const RcParams& params, int dirs, int kmax, long samples,
                    SplitRng& rng);

// inverse-variance averaging over each direction's symmetry orbit
XiTable symmetry_average(const XiTable& t);

// unit-area half-plane intersection of {t : <t,u> <= xi(u)}; boundary
// resampled to at least 256 points
WulffShape build_wulff(const XiTable& xi, size_t boundary_points = 512);

// largest dyadic q0 satisfying the tangent condition
//   sup_z angle(w_z, z_perp) <= pi/2 - 4 q0   and q0 <= c1/(2 C1),
// then the largest dyadic c0 < q0/2 with the two-point condition
//   angle(x - y, -y_perp) <= pi/2 - 3 q0 whenever angle(x, y) <= 2 c0.
std::pair<double, double> choose_constants(const WulffShape& w, double c1, double C1);

// dense sweep re-verification of the two conditions at a given grid density
bool verify_constants(const WulffShape& w, double q0, double c0, int oversample = 1);

// unit-area disc profile with constants from choose_constants
WulffShape disc_wulff(double c1 = 0.4, double C1 = 1.2);

std::string wulff_to_json(const WulffShape& w);
WulffShape wulff_from_json(const std::string& text);
std::string xi_to_json(const XiTable& t);

} // namespace rclab
