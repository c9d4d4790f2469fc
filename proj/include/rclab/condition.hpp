#pragma once

#include <functional>
#include <optional>

#include "rclab/circuit.hpp"
#include "rclab/rc_model.hpp"

namespace rclab {

// Conditioning event {|INT(Gamma_0)| >= n^2}; the centring constraint of the
// centred-area event is never imposed, only measured downstream.
struct ConditionSpec {
    int n = 1;
    bool measure_center = true;

    // exact satisfiability: the largest circuit in the box is its perimeter,
    // of area (2L)^2, so the even warm-start square must fit with s <= 2L
    void validate(const BoxGeom& g) const {
        int s = side();
        if (s > 2 * g.half_width())
            throw InputError("box too small: need side " + std::to_string(s) +
                             " circuit inside half-width " + std::to_string(g.half_width()));
    }
    // smallest even square side with s^2 >= n^2
    int side() const { return n + (n % 2); }
};

bool constraint_satisfied(const BondConfig& cfg, int n);

// deterministic open square of the smallest admissible even side, everything
// else drawn from the single-edge marginal
BondConfig warm_start(BoxGeomPtr geom, const RcParams& params, int n, SplitRng& rng);

struct RejectionResult {
    std::optional<BondConfig> cfg;
    long tries = 0;
    double acceptance_estimate = 0;
};

// independent draws until the constraint holds; q > 1 runs a fresh
// `burnin_sweeps` heat-bath chain per try
RejectionResult rejection_sample(BoxGeomPtr geom, const RcParams& params,
                                 const ConditionSpec& spec, long max_tries,
                                 SplitRng& rng, int burnin_sweeps = 100);

// Single-edge heat-bath dynamics restricted to the constraint set: proposals
// that would break {area >= n^2} are rejected, which leaves the conditioned
// measure invariant.  Constraint checks are amortized through a witness
// circuit: only closing one of its edges can break the event.
class ConstrainedChain {
  public:
    ConstrainedChain(BoxGeomPtr geom, const RcParams& params, ConditionSpec spec,
                     SplitRng rng);
    // start from a caller-supplied state (must satisfy the constraint)
    ConstrainedChain(BondConfig start, const RcParams& params, ConditionSpec spec,
                     SplitRng rng);

    void sweep();
    const BondConfig& state() const { return cfg_; }
    const Circuit& witness() const { return *witness_; }
    // current outermost circuit, freshly extracted
    Circuit current_circuit() const;

    long rejected_flips() const { return rejected_; }
    long constraint_checks() const { return checks_; }

  private:
    void refresh_witness();

    BondConfig cfg_;
    RcParams params_;
    ConditionSpec spec_;
    SplitRng rng_;
    std::optional<Circuit> witness_;
    std::vector<uint8_t> witness_edge_;
    long sweeps_done_ = 0;
    long rejected_ = 0;
    long checks_ = 0;
};

// run a chain and hand every `thin`-th sweep's state to the sink
void run_constrained_chain(ConstrainedChain& chain, long sweeps, long thin,
                           const std::function<void(long, const BondConfig&)>& sink);

} // namespace rclab
