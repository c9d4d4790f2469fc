#include "rclab/condition.hpp"

namespace rclab {

bool constraint_satisfied(const BondConfig& cfg, int n) {
    auto c = outermost_circuit(cfg);
    return c && c->interior_area() >= (int64_t)n * n;
}

BondConfig warm_start(BoxGeomPtr geom, const RcParams& params, int n, SplitRng& rng) {
    ConditionSpec spec{n};
    spec.validate(*geom);
    BondConfig cfg = sample_q1(geom, params.p, rng);
    int h = spec.side() / 2;
    for (int i = -h; i < h; ++i) {
        for (int sgn : {-1, +1}) {
            cfg.set(geom->edge_id({(int64_t)i, (int64_t)(sgn * h)}, 0), true);
            cfg.set(geom->edge_id({(int64_t)(sgn * h), (int64_t)i}, 1), true);
        }
    }
    return cfg;
}

RejectionResult rejection_sample(BoxGeomPtr geom, const RcParams& params,
                                 const ConditionSpec& spec, long max_tries,
                                 SplitRng& rng, int burnin_sweeps) {
    spec.validate(*geom);
    RejectionResult out;
    for (long t = 1; t <= max_tries; ++t) {
        BondConfig cfg = params.q == 1.0
                             ? sample_q1(geom, params.p, rng)
                             : sample_fk(geom, params, burnin_sweeps, rng);
        if (constraint_satisfied(cfg, spec.n)) {
            out.cfg = std::move(cfg);
            out.tries = t;
            out.acceptance_estimate = 1.0 / (double)t;
            return out;
        }
    }
    out.tries = max_tries;
    out.acceptance_estimate = 0.0;
    return out;
}

ConstrainedChain::ConstrainedChain(BoxGeomPtr geom, const RcParams& params,
                                   ConditionSpec spec, SplitRng rng)
    : cfg_(geom), params_(params), spec_(spec), rng_(rng) {
    spec_.validate(*geom);
    cfg_ = warm_start(geom, params_, spec_.n, rng_);
    refresh_witness();
    if (!witness_) throw InternalError("warm start violates the constraint");
}

ConstrainedChain::ConstrainedChain(BondConfig start, const RcParams& params,
                                   ConditionSpec spec, SplitRng rng)
    : cfg_(std::move(start)), params_(params), spec_(spec), rng_(rng) {
    spec_.validate(cfg_.geom());
    refresh_witness();
    if (!witness_) throw InputError("constrained chain needs a warm start satisfying the constraint");
}

void ConstrainedChain::refresh_witness() {
    auto c = outermost_circuit(cfg_);
    if (!c || c->interior_area() < (int64_t)spec_.n * spec_.n) {
        witness_.reset();
        return;
    }
    witness_ = std::move(c);
    const BoxGeom& g = cfg_.geom();
    witness_edge_.assign(g.edge_count(), 0);
    for (size_t i = 0; i < witness_->size(); ++i) {
        auto [a, b] = witness_->edge(i);
        witness_edge_[g.edge_between(a, b)] = 1;
    }
}

void ConstrainedChain::sweep() {
    const BoxGeom& g = cfg_.geom();
    const int64_t floor_area = (int64_t)spec_.n * spec_.n;
    for (int e = 0; e < g.edge_count(); ++e) {
        bool cur = cfg_.open(e);
        double open_prob;
        if (params_.q == 1.0) {
            open_prob = params_.p;
        } else {
            bool joined = connected_off_edge(cfg_, e, params_.bc == Bc::wired);
            open_prob = joined ? params_.p
                               : params_.p / (params_.p + (1.0 - params_.p) * params_.q);
        }
        bool prop = rng_.bernoulli(open_prob);
        if (prop == cur) continue;
        if (!prop && witness_edge_[e]) {
            // closing a witness edge is the only move that can break the event
            cfg_.set(e, false);
            ++checks_;
            auto c = outermost_circuit(cfg_);
            if (c && c->interior_area() >= floor_area) {
                witness_ = std::move(c);
                witness_edge_.assign(g.edge_count(), 0);
                for (size_t i = 0; i < witness_->size(); ++i) {
                    auto [a, b] = witness_->edge(i);
                    witness_edge_[g.edge_between(a, b)] = 1;
                }
            } else {
                cfg_.set(e, true);
                ++rejected_;
            }
        } else {
            // openings only enlarge the outermost circuit; closings off the
            // witness leave it intact
            cfg_.set(e, prop);
        }
    }
    if (++sweeps_done_ % 64 == 0) {
        refresh_witness();
        if (!witness_) throw InternalError("constraint lost despite witness bookkeeping");
    }
}

Circuit ConstrainedChain::current_circuit() const {
    auto c = outermost_circuit(cfg_);
    if (!c) throw InternalError("constrained state lost its circuit");
    return *c;
}

void run_constrained_chain(ConstrainedChain& chain, long sweeps, long thin,
                           const std::function<void(long, const BondConfig&)>& sink) {
    if (thin < 1) throw InputError("thin must be >= 1");
    long emitted = 0;
    for (long s = 1; s <= sweeps; ++s) {
        chain.sweep();
        if (s % thin == 0) sink(emitted++, chain.state());
    }
}

} // namespace rclab
