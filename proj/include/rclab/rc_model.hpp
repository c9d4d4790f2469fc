#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "rclab/lattice.hpp"
#include "rclab/rng.hpp"

namespace rclab {

enum class Bc { free, wired };

inline const char* bc_name(Bc bc) { return bc == Bc::free ? "free" : "wired"; }

// Random-cluster parameters with the derived quantities used throughout:
//   beta from p = 1 - exp(-2 beta), dual p* from p*/(1-p*) = q(1-p)/p,
//   bounded-energy constant c_be = min(1-p, p/(p+(1-p)q)).
struct RcParams {
    double p = 0.5;
    double q = 1.0;
    Bc bc = Bc::free;

    RcParams() = default;
    RcParams(double p_, double q_, Bc bc_);
    static RcParams from_beta(double beta, double q, Bc bc);

    double beta() const;
    double p_star() const; // requires p in (0,1)
    double beta_star() const;
    double c_be() const;
};

RcParams dual_params(const RcParams& params);

// self-dual point p_c = sqrt(q)/(1+sqrt(q)) and beta_c = (1/2)log(1+sqrt(q))
std::pair<double, double> critical_point(double q);

// log of p^{#open} (1-p)^{#closed} q^{k}, with k counted per boundary rule:
// free counts all components of the spanning subgraph; wired counts only
// components containing no interior-boundary vertex.
double log_weight(const BondConfig& cfg, const RcParams& params);

int component_count(const BondConfig& cfg, Bc bc);

// exact law over all 2^edge_count configurations (mask bit i = edge i open);
// refuses boxes with more than `kEnumLimit` edges
inline constexpr int kEnumLimit = 20;

struct ExactDistribution {
    BoxGeomPtr geom;
    std::vector<double> prob; // indexed by edge bitmask
};

ExactDistribution exact_distribution(BoxGeomPtr geom, const RcParams& params);

// exact law conditioned on a configuration predicate (same enumeration guard)
ExactDistribution exact_conditional_distribution(
    BoxGeomPtr geom, const RcParams& params,
    const std::function<bool(const BondConfig&)>& keep);

BondConfig config_from_mask(BoxGeomPtr geom, uint32_t mask);
uint32_t mask_from_config(const BondConfig& cfg);

// independent Bernoulli(p) bonds (the q = 1 model)
BondConfig sample_q1(BoxGeomPtr geom, double p, SplitRng& rng);

// resample one edge from its exact conditional law given the rest:
// open with prob p if the endpoints are joined off the edge, else
// p/(p + (1-p) q).  Wired boundary treats all boundary vertices as one site.
void heat_bath_step(BondConfig& cfg, const RcParams& params, int eid, SplitRng& rng);

// systematic-sweep heat-bath from an all-closed start; q = 1 short-circuits
// to sample_q1
BondConfig sample_fk(BoxGeomPtr geom, const RcParams& params, int sweeps, SplitRng& rng);

// --- snapshot format --------------------------------------------------------
//
//   rcgrid v1 L=<L> p=<p> q=<q> bc=<free|wired> seed=<u64>
// followed by run-length tokens "<count>o"/"<count>c" in edge-id order.
struct Snapshot {
    BondConfig cfg;
    RcParams params;
    uint64_t seed = 0;
};

void write_snapshot(std::ostream& os, const BondConfig& cfg, const RcParams& params,
                    uint64_t seed);
Snapshot read_snapshot(std::istream& is);

} // namespace rclab
