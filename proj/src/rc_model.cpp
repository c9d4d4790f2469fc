#include "rclab/rc_model.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace rclab {

RcParams::RcParams(double p_, double q_, Bc bc_) : p(p_), q(q_), bc(bc_) {
    if (!(p >= 0.0 && p <= 1.0)) throw InputError("p must lie in [0,1]");
    if (!(q >= 1.0)) throw InputError("q must be >= 1");
}

RcParams RcParams::from_beta(double beta, double q, Bc bc) {
    if (!(beta > 0)) throw InputError("beta must be positive");
    return RcParams(1.0 - std::exp(-2.0 * beta), q, bc);
}

double RcParams::beta() const { return -0.5 * std::log1p(-p); }

double RcParams::p_star() const {
    if (p <= 0.0 || p >= 1.0) throw InputError("dual parameter needs p in (0,1)");
    double odds = q * (1.0 - p) / p;
    return odds / (1.0 + odds);
}

double RcParams::beta_star() const { return -0.5 * std::log1p(-p_star()); }

double RcParams::c_be() const {
    return std::min(1.0 - p, p / (p + (1.0 - p) * q));
}

RcParams dual_params(const RcParams& params) {
    return RcParams(params.p_star(), params.q,
                    params.bc == Bc::free ? Bc::wired : Bc::free);
}

std::pair<double, double> critical_point(double q) {
    if (!(q >= 1.0)) throw InputError("q must be >= 1");
    double r = std::sqrt(q);
    double pc = r / (1.0 + r);
    return {pc, 0.5 * std::log(1.0 + r)};
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[a] = b;
    }
};

} // namespace

int component_count(const BondConfig& cfg, Bc bc) {
    const BoxGeom& g = cfg.geom();
    UnionFind uf(g.vertex_count());
    for (int e = 0; e < g.edge_count(); ++e) {
        if (!cfg.open(e)) continue;
        auto [a, b] = g.edge_endpoints(e);
        uf.unite(g.vertex_id(a), g.vertex_id(b));
    }
    std::vector<uint8_t> touches(g.vertex_count(), 0);
    if (bc == Bc::wired) {
        for (int v = 0; v < g.vertex_count(); ++v)
            if (g.on_boundary(g.vertex_at(v))) touches[uf.find(v)] = 1;
    }
    int k = 0;
    for (int v = 0; v < g.vertex_count(); ++v) {
        if (uf.find(v) != v) continue;
        if (bc == Bc::wired && touches[v]) continue;
        ++k;
    }
    return k;
}

double log_weight(const BondConfig& cfg, const RcParams& params) {
    int o = cfg.open_count();
    int c = cfg.geom().edge_count() - o;
    auto term = [](int count, double prob) {
        if (count == 0) return 0.0;
        return count * std::log(prob);
    };
    return term(o, params.p) + term(c, 1.0 - params.p) +
           component_count(cfg, params.bc) * std::log(params.q);
}

BondConfig config_from_mask(BoxGeomPtr geom, uint32_t mask) {
    BondConfig cfg(geom);
    for (int e = 0; e < geom->edge_count(); ++e)
        if (mask & (1u << e)) cfg.set(e, true);
    return cfg;
}

uint32_t mask_from_config(const BondConfig& cfg) {
    uint32_t mask = 0;
    for (int e = 0; e < cfg.geom().edge_count(); ++e)
        if (cfg.open(e)) mask |= 1u << e;
    return mask;
}

ExactDistribution exact_conditional_distribution(
    BoxGeomPtr geom, const RcParams& params,
    const std::function<bool(const BondConfig&)>& keep) {
    int m = geom->edge_count();
    if (m > kEnumLimit)
        throw InputError("enumeration refused: box has " + std::to_string(m) +
                         " edges, limit is " + std::to_string(kEnumLimit));
    std::vector<double> logw(1u << m, -INFINITY);
    double max_logw = -INFINITY;
    for (uint32_t mask = 0; mask < (1u << m); ++mask) {
        BondConfig cfg = config_from_mask(geom, mask);
        if (keep && !keep(cfg)) continue;
        logw[mask] = log_weight(cfg, params);
        max_logw = std::max(max_logw, logw[mask]);
    }
    if (max_logw == -INFINITY) throw InfeasibleError("no configuration satisfies the constraint");
    double z = 0;
    for (double lw : logw)
        if (lw != -INFINITY) z += std::exp(lw - max_logw);
    ExactDistribution out;
    out.geom = geom;
    out.prob.assign(1u << m, 0.0);
    for (uint32_t mask = 0; mask < (1u << m); ++mask)
        if (logw[mask] != -INFINITY)
            out.prob[mask] = std::exp(logw[mask] - max_logw) / z;
    return out;
}

ExactDistribution exact_distribution(BoxGeomPtr geom, const RcParams& params) {
    return exact_conditional_distribution(geom, params, nullptr);
}

BondConfig sample_q1(BoxGeomPtr geom, double p, SplitRng& rng) {
    BondConfig cfg(geom);
    for (int e = 0; e < geom->edge_count(); ++e)
        if (rng.bernoulli(p)) cfg.set(e, true);
    return cfg;
}

void heat_bath_step(BondConfig& cfg, const RcParams& params, int eid, SplitRng& rng) {
    double open_prob;
    if (params.q == 1.0) {
        open_prob = params.p;
    } else {
        bool joined = connected_off_edge(cfg, eid, params.bc == Bc::wired);
        open_prob = joined ? params.p
                           : params.p / (params.p + (1.0 - params.p) * params.q);
    }
    cfg.set(eid, rng.bernoulli(open_prob));
}

BondConfig sample_fk(BoxGeomPtr geom, const RcParams& params, int sweeps, SplitRng& rng) {
    if (sweeps < 1) throw InputError("sweeps must be >= 1");
    if (params.q == 1.0) return sample_q1(geom, params.p, rng);
    BondConfig cfg(geom);
    for (int s = 0; s < sweeps; ++s)
        for (int e = 0; e < geom->edge_count(); ++e)
            heat_bath_step(cfg, params, e, rng);
    return cfg;
}

void write_snapshot(std::ostream& os, const BondConfig& cfg, const RcParams& params,
                    uint64_t seed) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "rcgrid v1 L=%d p=%.17g q=%.17g bc=%s seed=%llu\n",
                  cfg.geom().half_width(), params.p, params.q, bc_name(params.bc),
                  (unsigned long long)seed);
    os << buf;
    int m = cfg.geom().edge_count();
    int run = 0;
    bool state = cfg.open(0);
    bool first = true;
    for (int e = 0; e <= m; ++e) {
        if (e < m && cfg.open(e) == state) {
            ++run;
            continue;
        }
        if (!first) os << ' ';
        os << run << (state ? 'o' : 'c');
        first = false;
        if (e < m) {
            state = cfg.open(e);
            run = 1;
        }
    }
    os << '\n';
}

Snapshot read_snapshot(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw InputError("empty snapshot");
    int L = 0;
    double p = 0, q = 0;
    char bcbuf[16] = {0};
    unsigned long long seed = 0;
    if (std::sscanf(header.c_str(), "rcgrid v1 L=%d p=%lg q=%lg bc=%15s seed=%llu",
                    &L, &p, &q, bcbuf, &seed) != 5)
        throw InputError("bad snapshot header: " + header);
    std::string bcs(bcbuf);
    Bc bc;
    if (bcs == "free")
        bc = Bc::free;
    else if (bcs == "wired")
        bc = Bc::wired;
    else
        throw InputError("bad boundary condition in snapshot: " + bcs);
    RcParams params(p, q, bc);
    auto geom = make_box(L);
    BondConfig cfg(geom);
    int e = 0;
    std::string tok;
    while (is >> tok && e < geom->edge_count()) {
        char kind = tok.back();
        if (kind != 'o' && kind != 'c') throw InputError("bad run token: " + tok);
        long run = std::stol(tok.substr(0, tok.size() - 1));
        for (long i = 0; i < run; ++i, ++e) {
            if (e >= geom->edge_count()) throw InputError("snapshot longer than box");
            if (kind == 'o') cfg.set(e, true);
        }
    }
    if (e != geom->edge_count()) throw InputError("snapshot shorter than box");
    return Snapshot{std::move(cfg), params, seed};
}

} // namespace rclab
