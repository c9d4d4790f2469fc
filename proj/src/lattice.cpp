#include "rclab/lattice.hpp"

#include <algorithm>
#include <array>
#include <queue>

namespace rclab {

BoxGeom::BoxGeom(int half_width) : L_(half_width) {
    if (L_ < 1) throw InputError("box half-width must be positive");
    edge_of_vertex_.assign(vertex_count(), {-1, -1});
    edge_vertex_.reserve(2 * side() * (side() - 1));
    edge_axis_.reserve(2 * side() * (side() - 1));
    for (int vid = 0; vid < vertex_count(); ++vid) {
        Point v = vertex_at(vid);
        for (int axis = 0; axis < 2; ++axis) {
            Point w = axis == 0 ? Point{v.x + 1, v.y} : Point{v.x, v.y + 1};
            if (!contains(w)) continue;
            edge_of_vertex_[vid][axis] = (int)edge_vertex_.size();
            edge_vertex_.push_back(vid);
            edge_axis_.push_back((int8_t)axis);
        }
    }
    incidence_.assign(vertex_count(), {});
    for (int vid = 0; vid < vertex_count(); ++vid) {
        Point v = vertex_at(vid);
        Incidence& inc = incidence_[vid];
        inc.count = 0;
        auto add = [&](int e, Point w) {
            if (e < 0) return;
            inc.eid[inc.count] = e;
            inc.nbr[inc.count] = vertex_id(w);
            ++inc.count;
        };
        add(edge_id(v, 0), {v.x + 1, v.y});
        add(edge_id(v, 1), {v.x, v.y + 1});
        add(edge_id({v.x - 1, v.y}, 0), {v.x - 1, v.y});
        add(edge_id({v.x, v.y - 1}, 1), {v.x, v.y - 1});
        for (int i = inc.count; i < 4; ++i) inc.eid[i] = inc.nbr[i] = -1;
    }
}

int BoxGeom::edge_between(Point a, Point b) const {
    if (b < a) std::swap(a, b);
    Point d = b - a;
    if (d.x == 1 && d.y == 0) return edge_id(a, 0);
    if (d.x == 0 && d.y == 1) return edge_id(a, 1);
    return -1;
}

std::vector<int> BoxGeom::incident_edges(Point v) const {
    std::vector<int> out;
    for (int axis = 0; axis < 2; ++axis) {
        int e = edge_id(v, axis);
        if (e >= 0) out.push_back(e);
        Point u = axis == 0 ? Point{v.x - 1, v.y} : Point{v.x, v.y - 1};
        e = edge_id(u, axis);
        if (e >= 0) out.push_back(e);
    }
    return out;
}

Region Region::from_mask(std::vector<uint8_t> m) {
    Region r;
    r.mask = std::move(m);
    for (int i = 0; i < (int)r.mask.size(); ++i)
        if (r.mask[i]) r.ids.push_back(i);
    return r;
}

Region Region::full(const BoxGeom& g) {
    return from_mask(std::vector<uint8_t>(g.edge_count(), 1));
}

Region Region::complement(const BoxGeom& g, const Region& r) {
    std::vector<uint8_t> m(g.edge_count());
    for (int i = 0; i < g.edge_count(); ++i) m[i] = r.mask[i] ? 0 : 1;
    return from_mask(std::move(m));
}

// --- Sector ---------------------------------------------------------------

Sector::Sector(Point x_, Point y_) : x(x_), y(y_) {
    if ((x.x == 0 && x.y == 0) || (y.x == 0 && y.y == 0))
        throw InputError("sector boundary point at origin");
    if (cross(x, y) == 0) throw InputError("degenerate sector: x parallel to y");
    if (!(arg_of(x) < arg_of(y)))
        throw InputError("sector requires arg(x) < arg(y)");
    wide = cross(x, y) < 0;
}

bool Sector::contains(Point z) const {
    if (z.x == 0 && z.y == 0) return true;
    if (!wide) return cross(x, z) >= 0 && cross(z, y) >= 0;
    // complement of the open wedge swept ccw from ray(y) to ray(x)
    return !(cross(y, z) > 0 && cross(z, x) > 0);
}

namespace {

// Does [a,b] meet {z : cross(u,z) > 0 and cross(z,v) > 0}, the open convex
// wedge from ray(u) ccw to ray(v) (aperture < pi)?  Exact rational clip of
// the parameter interval.
bool segment_meets_open_wedge(Point a, Point b, Point u, Point v) {
    // constraint c0 + t*c1 > 0 over t in [0,1]
    struct Lin {
        I128 c0, c1;
    };
    Lin cons[2] = {{cross(u, a), cross(u, b - a)},
                   {cross(a, v), cross(b - a, v)}};
    // feasible interval (lo_num/lo_den, hi_num/hi_den) starts as [0,1]
    // closed/open bookkeeping is not needed: constraints are strict, so the
    // feasible set is open; nonempty iff lo < hi after clipping
    I128 lo_n = 0, lo_d = 1, hi_n = 1, hi_d = 1;
    auto less = [](I128 an, I128 ad, I128 bn, I128 bd) {
        // all denominators kept positive
        return an * bd < bn * ad;
    };
    for (const Lin& c : cons) {
        if (c.c1 == 0) {
            if (c.c0 <= 0) return false; // never satisfied
            continue;
        }
        // root t* = -c0/c1
        I128 tn = -c.c0, td = c.c1;
        if (td < 0) { tn = -tn; td = -td; }
        if (c.c1 > 0) {
            // satisfied for t > t*
            if (less(lo_n, lo_d, tn, td)) { lo_n = tn; lo_d = td; }
        } else {
            // satisfied for t < t*
            if (less(tn, td, hi_n, hi_d)) { hi_n = tn; hi_d = td; }
        }
    }
    return less(lo_n, lo_d, hi_n, hi_d);
}

// Does [a,b] meet the closed convex wedge {z : cross(u,z) >= 0, cross(z,v) >= 0}
// (aperture <= pi)?  The wedge contains 0, so degenerate cases stay exact.
bool segment_meets_closed_wedge(Point a, Point b, Point u, Point v) {
    struct Lin {
        I128 c0, c1;
    };
    Lin cons[2] = {{cross(u, a), cross(u, b - a)},
                   {cross(a, v), cross(b - a, v)}};
    I128 lo_n = 0, lo_d = 1, hi_n = 1, hi_d = 1;
    auto less = [](I128 an, I128 ad, I128 bn, I128 bd) {
        return an * bd < bn * ad;
    };
    for (const Lin& c : cons) {
        if (c.c1 == 0) {
            if (c.c0 < 0) return false;
            continue;
        }
        I128 tn = -c.c0, td = c.c1;
        if (td < 0) { tn = -tn; td = -td; }
        if (c.c1 > 0) {
            if (less(lo_n, lo_d, tn, td)) { lo_n = tn; lo_d = td; }
        } else {
            if (less(tn, td, hi_n, hi_d)) { hi_n = tn; hi_d = td; }
        }
    }
    return !less(hi_n, hi_d, lo_n, lo_d); // nonempty closed interval
}

} // namespace

bool Sector::contains_segment(Point a, Point b) const {
    if (!contains(a) || !contains(b)) return false;
    if (!wide) return true; // convex sector
    // endpoints inside, but the segment may dip into the complement wedge
    return !segment_meets_open_wedge(a, b, y, x);
}

bool Sector::meets_segment(Point a, Point b) const {
    if (contains(a) || contains(b)) return true;
    if (!wide) return segment_meets_closed_wedge(a, b, x, y);
    // wide sector misses [a,b] iff the segment lies in the open complement
    // wedge; with both endpoints outside the sector that is automatic
    return false;
}

Region sector_edge_region(const BoxGeom& g, const Sector& s) {
    std::vector<uint8_t> m(g.edge_count(), 0);
    for (int e = 0; e < g.edge_count(); ++e) {
        auto [a, b] = g.edge_endpoints(e);
        m[e] = s.contains_segment(a, b) ? 1 : 0;
    }
    return Region::from_mask(std::move(m));
}

Region sector_edge_region_star(const BoxGeom& g, const Sector& s) {
    std::vector<uint8_t> m(g.edge_count(), 0);
    for (int e = 0; e < g.edge_count(); ++e) {
        auto [a, b] = g.edge_endpoints(e);
        m[e] = s.meets_segment(a, b) ? 1 : 0;
    }
    return Region::from_mask(std::move(m));
}

// --- connectivity ----------------------------------------------------------

namespace {

// BFS over open edges restricted to `region`; returns reached vertex ids
std::vector<uint8_t> reach_from(const BondConfig& cfg, Point x, const Region& region) {
    const BoxGeom& g = cfg.geom();
    std::vector<uint8_t> seen(g.vertex_count(), 0);
    std::vector<int> stack{g.vertex_id(x)};
    seen[stack[0]] = 1;
    while (!stack.empty()) {
        int vid = stack.back();
        stack.pop_back();
        const auto& inc = g.incidence(vid);
        for (int i = 0; i < inc.count; ++i) {
            int e = inc.eid[i];
            if (!cfg.open(e) || !region.contains_edge(e)) continue;
            int wid = inc.nbr[i];
            if (!seen[wid]) {
                seen[wid] = 1;
                stack.push_back(wid);
            }
        }
    }
    return seen;
}

// stamp-based scratch so the hot connectivity query never allocates
struct OffEdgeScratch {
    std::vector<uint32_t> stamp;
    std::vector<int> stack;
    std::vector<int> boundary_vids;
    uint32_t epoch = 0;
    int vertex_count = -1;
};

thread_local OffEdgeScratch tls_off_edge;

} // namespace

bool connected(const BondConfig& cfg, Point x, Point y, const Region& region) {
    const BoxGeom& g = cfg.geom();
    if (!g.contains(x) || !g.contains(y)) throw InputError("vertex outside box");
    if (x == y) return true;
    auto seen = reach_from(cfg, x, region);
    return seen[g.vertex_id(y)] != 0;
}

std::vector<Point> open_cluster(const BondConfig& cfg, Point x, const Region& region) {
    const BoxGeom& g = cfg.geom();
    if (!g.contains(x)) throw InputError("vertex outside box");
    auto seen = reach_from(cfg, x, region);
    std::vector<Point> out;
    for (int vid = 0; vid < g.vertex_count(); ++vid)
        if (seen[vid]) out.push_back(g.vertex_at(vid));
    return out;
}

bool connected_off_edge(const BondConfig& cfg, int eid, bool wired_boundary) {
    const BoxGeom& g = cfg.geom();
    OffEdgeScratch& s = tls_off_edge;
    if (s.vertex_count != g.vertex_count()) {
        s.vertex_count = g.vertex_count();
        s.stamp.assign(s.vertex_count, 0);
        s.epoch = 0;
        s.boundary_vids.clear();
        for (int vid = 0; vid < s.vertex_count; ++vid)
            if (g.on_boundary(g.vertex_at(vid))) s.boundary_vids.push_back(vid);
    }
    ++s.epoch;
    if (s.epoch == 0) {
        std::fill(s.stamp.begin(), s.stamp.end(), 0);
        s.epoch = 1;
    }
    s.stack.clear();

    auto [x, y] = g.edge_endpoints(eid);
    int target = g.vertex_id(y);
    bool target_on_boundary = wired_boundary && g.on_boundary(y);
    bool merged = false;
    auto visit = [&](int wid) {
        if (s.stamp[wid] != s.epoch) {
            s.stamp[wid] = s.epoch;
            s.stack.push_back(wid);
        }
    };
    auto merge_boundary = [&]() {
        merged = true;
        for (int vid : s.boundary_vids) visit(vid);
    };
    visit(g.vertex_id(x));
    while (!s.stack.empty()) {
        int vid = s.stack.back();
        s.stack.pop_back();
        if (vid == target) return true;
        if (wired_boundary && !merged && g.on_boundary(g.vertex_at(vid))) {
            // all interior-boundary vertices act as a single wired site
            if (target_on_boundary) return true;
            merge_boundary();
        }
        const auto& inc = g.incidence(vid);
        for (int i = 0; i < inc.count; ++i) {
            if (inc.eid[i] == eid || !cfg.open(inc.eid[i])) continue;
            visit(inc.nbr[i]);
        }
    }
    return false;
}

// --- duality ----------------------------------------------------------------

DualGeom::DualGeom(int primal_half_width) : L_(primal_half_width) {}

int DualGeom::edge_id(Point k, int axis) const {
    if (!contains(k)) return -1;
    Point w = axis == 0 ? Point{k.x + 1, k.y} : Point{k.x, k.y + 1};
    if (!contains(w)) return -1;
    // same dense scheme as BoxGeom: vertices lex, +x edge then +y edge
    int n = side();
    int ix = (int)(k.x - lo()), iy = (int)(k.y - lo());
    int cnt = 0;
    // columns before: +x edges exist unless c == n-1; +y edges are n-1 per column
    for (int c = 0; c < ix; ++c) cnt += (c < n - 1 ? n : 0) + (n - 1);
    // rows before, within this column
    for (int r = 0; r < iy; ++r) cnt += (ix < n - 1 ? 1 : 0) + 1;
    if (axis == 0) return cnt;
    return cnt + (ix < n - 1 ? 1 : 0);
}

std::pair<Point, Point> DualGeom::edge_endpoints(int eid) const {
    // invert the dense scheme by scanning columns (cheap at desk scale)
    int n = side();
    int c = 0, remaining = eid;
    for (;; ++c) {
        int col_edges = (c < n - 1 ? n : 0) + (n - 1);
        if (remaining < col_edges) break;
        remaining -= col_edges;
    }
    for (int r = 0; r < n; ++r) {
        int here = (c < n - 1 ? 1 : 0) + (r < n - 1 ? 1 : 0);
        if (remaining < here) {
            Point k{c + lo(), r + lo()};
            bool has_x = c < n - 1;
            if (has_x && remaining == 0)
                return {k, {k.x + 1, k.y}};
            return {k, {k.x, k.y + 1}};
        }
        remaining -= here;
    }
    throw InternalError("dual edge id out of range");
}

int DualGeom::edge_axis(int eid) const {
    auto [a, b] = edge_endpoints(eid);
    return b.x == a.x + 1 ? 0 : 1;
}

std::pair<Point, int> DualGeom::crossing_primal_edge(int eid) const {
    auto [a, b] = edge_endpoints(eid);
    // dual vertex k represents the point k + (1/2,1/2)
    if (b.x == a.x + 1) {
        // horizontal dual edge crosses the vertical primal edge at x = a.x+1
        return {Point{a.x + 1, a.y}, 1};
    }
    // vertical dual edge crosses the horizontal primal edge at y = a.y+1
    return {Point{a.x, a.y + 1}, 0};
}

DualBondConfig dual_config(const BondConfig& cfg) {
    const BoxGeom& g = cfg.geom();
    DualGeom dg(g.half_width());
    std::vector<uint8_t> st(dg.edge_count(), 1); // outside-crossing edges open
    for (int de = 0; de < dg.edge_count(); ++de) {
        auto [v, axis] = dg.crossing_primal_edge(de);
        int pe = g.edge_id(v, axis);
        if (pe >= 0) st[de] = cfg.open(pe) ? 0 : 1;
    }
    return {dg, std::move(st)};
}

BondConfig dual_of_dual(const DualBondConfig& dual) {
    int L = dual.geom.primal_half_width() + 1;
    auto geom = make_box(L);
    BondConfig out(geom);
    // primal edge (v,axis) of the L+1 box crosses the dual edge whose
    // midpoint coincides with it: vertical primal (x,y)-(x,y+1) crosses
    // horizontal dual (x-1,y)+(.5,.5) -- (x,y)+(.5,.5)
    for (int pe = 0; pe < geom->edge_count(); ++pe) {
        Point v = geom->edge_vertex(pe);
        int axis = geom->edge_axis(pe);
        Point dk = axis == 1 ? Point{v.x - 1, v.y} : Point{v.x, v.y - 1};
        int daxis = axis == 1 ? 0 : 1;
        int de = dual.geom.edge_id(dk, daxis);
        if (de >= 0) out.set(pe, !dual.open(de));
    }
    return out;
}

} // namespace rclab
