#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rclab/circuit.hpp"
#include "rclab/geom.hpp"

namespace rclab {

// Unit-area convex droplet profile with tangent data and the regeneration
// constants (q0, c0).  Boundary is a dense counterclockwise polygon.
struct WulffShape {
    std::vector<Vec2> boundary;
    double lambda = 1.0; // dilation applied to the raw intersection body
    double q0 = 0.0;
    double c0 = 0.0;

    // counterclockwise unit tangent at boundary vertex i (central difference)
    Vec2 tangent(size_t i) const {
        Vec2 a = boundary[(i + boundary.size() - 1) % boundary.size()];
        Vec2 b = boundary[(i + 1) % boundary.size()];
        return normalized(b - a);
    }

    // boundary scaled by n and resampled to max(256, 16 n) points
    std::vector<Vec2> dilated_boundary(int n) const;
};

// circuit vertices v with Gamma inside the forward/backward cones of v
// throughout the angular window W_{v,c0}
std::vector<Point> regeneration_sites(const Circuit& c, double q0, double c0);

// largest origin-rooted angular sector free of regeneration sites
double theta_rg_max(const std::vector<Point>& rg);

// maximum distance from a circuit vertex to the first regeneration site met
// in a counterclockwise or clockwise angular search; NaN when rg is empty
double mprg(const Circuit& c, const std::vector<Point>& rg);

// Hausdorff distance to the best lattice translate of the n-dilated Wulff
// boundary, with the lexicographically minimal argmin as centre.  The
// circuit is sampled at vertices and edge midpoints.
struct GdResult {
    double gd = 0.0;
    Point cen{0, 0};
};

GdResult gd_and_center(const Circuit& c, const WulffShape& wulff, int n);

// per-sample droplet record
struct DropletStats {
    int64_t area = 0;
    int64_t exc = 0;
    double mlr = 0;
    double mfl = 0;
    double mlrf = 0;
    double gd = 0;
    Point cen{0, 0};
    double theta_rg_max = 0;
    double mprg = 0;
    int rg_count = 0;
    int n = 0;
    uint64_t seed = 0;
    uint64_t stream = 0;
    int64_t sample_index = 0;
};

// roughness statistics of the hull: MLR, MFL, MLRF and the attaining vertex
struct Roughness {
    double mlr = 0;
    double mfl = 0;
    double mlrf = 0;
    Point x_mlr{0, 0};
};

Roughness roughness_stats(const Circuit& c);

DropletStats droplet_stats(const BondConfig& cfg, int n, const WulffShape& wulff);

} // namespace rclab
