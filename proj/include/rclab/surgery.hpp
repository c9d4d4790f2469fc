#pragma once

#include <optional>
#include <vector>

#include "rclab/circuit.hpp"
#include "rclab/rc_model.hpp"

namespace rclab {

// Output of the two storage-replacement operations: the full-plane
// configuration omega1 plus the stored part omega2 (input restricted to
// stored_region).
struct SurgeryOutcome {
    BondConfig full_plane;
    Region stored_region;
    std::vector<uint8_t> stored_states; // full edge array, meaningful on stored_region
    uint64_t rng_seed = 0;
    uint64_t rng_stream = 0;
};

// sigma_{x,y}: store the sector contents, resample E(A_{x,y}) from the
// conditional law given the complement.  At q = 1 the resample is an exact
// product; at q > 1 it is approximated by `resample_sweeps` heat-bath sweeps
// over the sector edges from an all-closed start (so the update never reads
// the stored sector, which realizes the regular action).
SurgeryOutcome sector_storage_replace(const BondConfig& cfg, Point x, Point y,
                                      const RcParams& params, SplitRng& rng,
                                      int resample_sweeps = 200);

// phi_{F,G,shift}: keep F, translate the G contents by shift, resample the
// remainder conditionally on the assigned edges; omega2 stores the input
// off F and G.  Preconditions: E(F) and E(G) disjoint, E(F) disjoint from
// E(G)+shift, and E(G)+shift inside the box.
SurgeryOutcome storage_shift_replace(const BondConfig& cfg, const Region& F,
                                     const Region& G, Point shift,
                                     const RcParams& params, SplitRng& rng,
                                     int resample_sweeps = 200);

// translate an edge region by a lattice vector; edges leaving the box are
// reported via the returned flag
std::optional<Region> translate_region(const BoxGeom& g, const Region& r, Point shift);

// The open x-y path in A_{x,y} whose trapped component I_{x,y} is maximal
// under containment; nullopt when x and y are not joined inside the sector.
std::optional<std::vector<Point>> outermost_sector_path(const BondConfig& cfg,
                                                        Point x, Point y);

// faces of the bounded component of A_{x,y} minus the path (face centres
// inside the sector, path edges as walls); the trapped area |I| is the count
std::vector<std::pair<int, int>> trapped_faces(const BondConfig& cfg, Point x, Point y,
                                               const std::vector<Point>& path);

// epsilon-good area capture: connection, cone confinement of the joint
// cluster, diameter bound on the outermost path, and trapped area at least
// |T_{0,x,y}| + eps ||x-y||^{3/2} (log ||x-y||)^{1/2}
bool gac_check(const BondConfig& cfg, Point x, Point y, double eps, double q0);

// trapped-area census used by gac_check; exposed for the CLI verdicts
struct GacBreakdown {
    bool connected = false;
    bool cones_ok = false;
    bool diam_ok = false;
    bool area_ok = false;
    double trapped_area = 0;
    double triangle_area = 0;
    double required_area = 0;

    bool all() const { return connected && cones_ok && diam_ok && area_ok; }
};

GacBreakdown gac_breakdown(const BondConfig& cfg, Point x, Point y, double eps, double q0);

// strip open-path event: x1 and x2 joined by an open path confined to the
// annulus c1n <= ||v|| <= C1n and to the backward cone of x1 intersected
// with the forward cone of x2
bool sopp_check(const BondConfig& cfg, Point x1, Point x2, double c1n, double C1n,
                double q0);

// --- procedure LOCATE --------------------------------------------------------

struct LocateConsts {
    double C1, c1, C3, C4, C5, Cprime;
};

// defaults derived from (q0, c0) following the lemma's recipe:
// C4 = csc(q0/2), C5 = C4 cot(3 q0/4), C3 just above 1/(c1 sin(min(c0,q0/2))),
// C' = 4 C1^2 C4
LocateConsts default_locate_consts(double q0, double c0, double c1 = 0.4, double C1 = 1.2);

struct LocatePairs {
    Point x1, x2; // upper half-plane regeneration pair
    Point y1, y2; // lower half-plane pair
};

// Scan the regeneration sites for a pair with horizontal separation about
// t/(4 C1) and small vertical offset, in each half-plane; nullopt when the
// hypothesis event (annulus containment, theta bound) or the scan fails.
std::optional<LocatePairs> locate(const Circuit& c, const std::vector<Point>& rg,
                                  int n, double t, const LocateConsts& k,
                                  double q0, double c0);

} // namespace rclab
