#include "rclab/surgery.hpp"

#include "rclab/droplet.hpp"

#include <algorithm>
#include <cmath>

namespace rclab {

namespace {

// resample `region` edges from the conditional law given the rest of the
// configuration: exact product at q = 1, nested heat-bath sweeps otherwise.
// The region is reset to all-closed first so that the randomness never reads
// the stored contents (regular action).
void resample_region(BondConfig& cfg, const Region& region, const RcParams& params,
                     SplitRng& rng, int sweeps) {
    for (int e : region.ids) cfg.set(e, false);
    if (params.q == 1.0) {
        for (int e : region.ids) cfg.set(e, rng.bernoulli(params.p));
        return;
    }
    for (int s = 0; s < sweeps; ++s)
        for (int e : region.ids) heat_bath_step(cfg, params, e, rng);
}

std::vector<uint8_t> store_states(const BondConfig& cfg, const Region& region) {
    std::vector<uint8_t> out(cfg.geom().edge_count(), 0);
    for (int e : region.ids) out[e] = cfg.open(e) ? 1 : 0;
    return out;
}

} // namespace

SurgeryOutcome sector_storage_replace(const BondConfig& cfg, Point x, Point y,
                                      const RcParams& params, SplitRng& rng,
                                      int resample_sweeps) {
    Sector sec(x, y);
    Region region = sector_edge_region(cfg.geom(), sec);
    SurgeryOutcome out{cfg, region, store_states(cfg, region), rng.seed(), rng.stream()};
    resample_region(out.full_plane, region, params, rng, resample_sweeps);
    return out;
}

std::optional<Region> translate_region(const BoxGeom& g, const Region& r, Point shift) {
    std::vector<uint8_t> mask(g.edge_count(), 0);
    for (int e : r.ids) {
        Point v = g.edge_vertex(e);
        int axis = g.edge_axis(e);
        int te = g.edge_id(v + shift, axis);
        if (te < 0) return std::nullopt;
        mask[te] = 1;
    }
    return Region::from_mask(std::move(mask));
}

SurgeryOutcome storage_shift_replace(const BondConfig& cfg, const Region& F,
                                     const Region& G, Point shift,
                                     const RcParams& params, SplitRng& rng,
                                     int resample_sweeps) {
    const BoxGeom& g = cfg.geom();
    for (int e : G.ids)
        if (F.contains_edge(e)) throw InputError("storage-shift: E(F) meets E(G)");
    auto Gshift = translate_region(g, G, shift);
    if (!Gshift) throw InputError("storage-shift: E(G)+shift leaves the box");
    for (int e : Gshift->ids)
        if (F.contains_edge(e)) throw InputError("storage-shift: E(F) meets E(G)+shift");

    // stored part: everything off F and G
    std::vector<uint8_t> stored_mask(g.edge_count(), 1);
    for (int e : F.ids) stored_mask[e] = 0;
    for (int e : G.ids) stored_mask[e] = 0;
    Region stored = Region::from_mask(std::move(stored_mask));

    SurgeryOutcome out{cfg, stored, store_states(cfg, stored), rng.seed(), rng.stream()};
    BondConfig& w = out.full_plane;
    // G contents displaced by shift
    for (int e : G.ids) {
        Point v = g.edge_vertex(e);
        int te = g.edge_id(v + shift, g.edge_axis(e));
        w.set(te, cfg.open(e));
    }
    // remainder resampled given F and G+shift
    std::vector<uint8_t> rest(g.edge_count(), 1);
    for (int e : F.ids) rest[e] = 0;
    for (int e : Gshift->ids) rest[e] = 0;
    resample_region(w, Region::from_mask(std::move(rest)), params, rng, resample_sweeps);
    return out;
}

// --- outermost sector path ------------------------------------------------------

namespace {

const Point kDirs[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

// initial heading at x: axis direction closest to x itself (the contour of
// the trapped region arrives at x walking radially outward)
int initial_heading(Point x) {
    if (std::abs((long)x.x) >= std::abs((long)x.y))
        return x.x >= 0 ? 0 : 2;
    return x.y >= 0 ? 1 : 3;
}

} // namespace

std::optional<std::vector<Point>> outermost_sector_path(const BondConfig& cfg,
                                                        Point x, Point y) {
    const BoxGeom& g = cfg.geom();
    Sector sec(x, y);
    Region region = sector_edge_region(g, sec);
    if (!connected(cfg, x, y, region)) return std::nullopt;

    // edges of the common open cluster of x and y inside the sector
    auto cluster = open_cluster(cfg, x, region);
    std::vector<uint8_t> incl(g.vertex_count(), 0);
    for (Point p : cluster) incl[g.vertex_id(p)] = 1;
    std::vector<uint8_t> cledge(g.edge_count(), 0);
    for (int e : region.ids) {
        if (!cfg.open(e)) continue;
        auto [a, b] = g.edge_endpoints(e);
        if (incl[g.vertex_id(a)] && incl[g.vertex_id(b)]) cledge[e] = 1;
    }

    // face walk: from x, repeatedly take the first open cluster edge met when
    // rotating clockwise from the reversed heading; this traces the boundary
    // of the outer face, i.e. the outermost route
    std::vector<Point> walk{x};
    Point v = x;
    int d = initial_heading(x);
    size_t cap = 8 * (size_t)g.edge_count() + 16;
    while (!(walk.size() > 1 && v == y)) {
        int nd = -1;
        for (int turn = 1; turn <= 4; ++turn) {
            int cand = (d + 2 + turn) % 4; // rotate cw from reversed heading
            Point w = v + kDirs[cand];
            int e = g.edge_between(v, w);
            if (e >= 0 && cledge[e]) {
                nd = cand;
                break;
            }
        }
        if (nd < 0) return std::nullopt; // isolated endpoint
        v = v + kDirs[nd];
        d = nd;
        walk.push_back(v);
        if (walk.size() > cap) throw InternalError("sector path walk did not terminate");
    }

    // loop-erase (articulation-point revisits enclose no area)
    std::vector<Point> path;
    for (Point p : walk) {
        auto it = std::find(path.begin(), path.end(), p);
        if (it != path.end()) path.erase(it + 1, path.end());
        else path.push_back(p);
    }
    return path;
}

std::vector<std::pair<int, int>> trapped_faces(const BondConfig& cfg, Point x, Point y,
                                               const std::vector<Point>& path) {
    const BoxGeom& g = cfg.geom();
    Sector sec(x, y);
    int L = g.half_width();
    auto fid = [&](int i, int j) { return (i + L) * (2 * L) + (j + L); };
    auto in_box = [&](int i, int j) { return i >= -L && i < L && j >= -L && j < L; };
    // face centre (i+1/2, j+1/2) in the sector, tested exactly on doubled coords
    auto in_sec = [&](int i, int j) { return sec.contains({2 * i + 1, 2 * j + 1}); };

    std::vector<uint8_t> wall(g.edge_count(), 0);
    for (size_t i = 0; i + 1 < path.size(); ++i) {
        int e = g.edge_between(path[i], path[i + 1]);
        if (e < 0) throw InputError("trapped_faces: path leaves the lattice");
        wall[e] = 1;
    }

    std::vector<uint8_t> reached(4 * L * L, 0);
    std::vector<std::pair<int, int>> stack;
    const int di[4] = {1, 0, -1, 0}, dj[4] = {0, 1, 0, -1};
    auto side_edge = [&](int i, int j, int d) {
        switch (d) {
            case 0: return g.edge_id({i + 1, j}, 1);
            case 1: return g.edge_id({i, j + 1}, 0);
            case 2: return g.edge_id({i, j}, 1);
            default: return g.edge_id({i, j}, 0);
        }
    };
    // the unbounded part of the sector is met through rim sides whose
    // perimeter edge is not part of the path
    for (int i = -L; i < L; ++i) {
        for (int j = -L; j < L; ++j) {
            if (i != -L && i != L - 1 && j != -L && j != L - 1) continue;
            if (!in_sec(i, j) || reached[fid(i, j)]) continue;
            bool seeded = false;
            for (int d = 0; d < 4 && !seeded; ++d) {
                if (in_box(i + di[d], j + dj[d])) continue;
                if (!wall[side_edge(i, j, d)]) seeded = true;
            }
            if (seeded) {
                reached[fid(i, j)] = 1;
                stack.push_back({i, j});
            }
        }
    }
    while (!stack.empty()) {
        auto [i, j] = stack.back();
        stack.pop_back();
        for (int d = 0; d < 4; ++d) {
            int ni = i + di[d], nj = j + dj[d];
            if (!in_box(ni, nj) || !in_sec(ni, nj) || reached[fid(ni, nj)]) continue;
            if (wall[side_edge(i, j, d)]) continue;
            reached[fid(ni, nj)] = 1;
            stack.push_back({ni, nj});
        }
    }

    std::vector<std::pair<int, int>> out;
    for (int i = -L; i < L; ++i)
        for (int j = -L; j < L; ++j)
            if (in_sec(i, j) && !reached[fid(i, j)]) out.push_back({i, j});
    return out;
}

GacBreakdown gac_breakdown(const BondConfig& cfg, Point x, Point y, double eps,
                           double q0) {
    double h = norm(to_vec(x) - to_vec(y));
    if (!(h > 1)) throw InputError("gac: ||x-y|| must exceed 1");
    Sector sec(x, y);
    GacBreakdown out;
    out.triangle_area = 0.5 * std::fabs((double)(int64_t)cross(x, y));
    out.required_area =
        out.triangle_area + eps * std::pow(h, 1.5) * std::sqrt(std::log(h));

    const BoxGeom& g = cfg.geom();
    Region region = sector_edge_region(g, sec);
    out.connected = connected(cfg, x, y, region);
    if (!out.connected) return out;

    // cone confinement of the whole joint cluster: forward cone of x meets
    // backward cone of y; both cones are convex, so vertices suffice
    auto cluster = open_cluster(cfg, x, region);
    Vec2 xp = perp(normalized(to_vec(x)));
    Vec2 yp = perp(normalized(to_vec(y)));
    double capang = M_PI / 2 - q0;
    out.cones_ok = true;
    for (Point w : cluster) {
        if (w != x && angle_between(to_vec(w) - to_vec(x), xp) > capang) {
            out.cones_ok = false;
            break;
        }
        if (w != y && angle_between(to_vec(w) - to_vec(y), -1.0 * yp) > capang) {
            out.cones_ok = false;
            break;
        }
    }

    auto path = outermost_sector_path(cfg, x, y);
    if (!path) {
        out.connected = false;
        return out;
    }
    double diam = 0;
    for (size_t i = 0; i < path->size(); ++i)
        for (size_t j = i + 1; j < path->size(); ++j)
            diam = std::max(diam, dist(to_vec((*path)[i]), to_vec((*path)[j])));
    out.diam_ok = diam <= 2 * h;

    out.trapped_area = (double)trapped_faces(cfg, x, y, *path).size();
    out.area_ok = out.trapped_area >= out.required_area;
    return out;
}

bool gac_check(const BondConfig& cfg, Point x, Point y, double eps, double q0) {
    return gac_breakdown(cfg, x, y, eps, q0).all();
}

bool sopp_check(const BondConfig& cfg, Point x1, Point x2, double c1n, double C1n,
                double q0) {
    const BoxGeom& g = cfg.geom();
    Vec2 p1 = perp(normalized(to_vec(x1)));
    Vec2 p2 = perp(normalized(to_vec(x2)));
    double capang = M_PI / 2 - q0;
    auto admissible = [&](Point v) {
        double r = norm(to_vec(v));
        if (r < c1n || r > C1n) return false;
        if (v != x1 && angle_between(to_vec(v) - to_vec(x1), -1.0 * p1) > capang)
            return false;
        if (v != x2 && angle_between(to_vec(v) - to_vec(x2), p2) > capang) return false;
        return true;
    };
    std::vector<uint8_t> mask(g.edge_count(), 0);
    for (int e = 0; e < g.edge_count(); ++e) {
        auto [a, b] = g.edge_endpoints(e);
        mask[e] = admissible(a) && admissible(b) ? 1 : 0;
    }
    return connected(cfg, x1, x2, Region::from_mask(std::move(mask)));
}

// --- LOCATE ---------------------------------------------------------------------

LocateConsts default_locate_consts(double q0, double c0, double c1, double C1) {
    LocateConsts k;
    k.C1 = C1;
    k.c1 = c1;
    k.C4 = 1.0 / std::sin(q0 / 2);
    k.C5 = k.C4 / std::tan(3 * q0 / 4);
    k.C3 = 1.05 / (c1 * std::sin(std::min(c0, q0 / 2)));
    k.Cprime = 4 * C1 * C1 * k.C4;
    return k;
}

namespace {

// "single vertical crossing": the circuit meets {(cx, y) : y > 0} (or y < 0
// for sign = -1) exactly at the one site (cx, cy).  Exact integer scan.
bool single_crossing(const Circuit& c, Point site, int sign) {
    for (size_t i = 0; i < c.size(); ++i) {
        auto [a, b] = c.edge(i);
        // intersection of [a,b] with the vertical line x = site.x
        if (a.x == b.x) {
            if (a.x != site.x) continue;
            // whole edge on the line; every point with sign*y > 0 must be the site
            for (Point p : {a, b}) {
                if (sign * p.y > 0 && p != site) return false;
            }
            // the open segment between a and b covers min..max y; any of it
            // strictly on the half-line and off the site fails
            int64_t lo = std::min(a.y, b.y), hi = std::max(a.y, b.y);
            for (int64_t yy = lo; yy <= hi; ++yy) {
                if (sign * yy > 0 && Point{a.x, yy} != site) return false;
            }
        } else {
            if (std::min(a.x, b.x) > site.x || std::max(a.x, b.x) < site.x) continue;
            // horizontal unit edge: crosses the line at (site.x, a.y)
            Point p{site.x, a.y};
            if (sign * p.y > 0 && p != site) return false;
        }
    }
    return true;
}

struct HalfPlaneScan {
    std::optional<std::pair<Point, Point>> pair;
};

// scan one half-plane (sites already reflected so their y > 0)
HalfPlaneScan scan_upper(const std::vector<Point>& rg_up, int n, double t,
                         const LocateConsts& k) {
    HalfPlaneScan out;
    double xbound = (double)n / k.C3;
    std::vector<Point> u;
    for (Point p : rg_up)
        if (std::fabs((double)p.x) <= xbound) u.push_back(p);
    std::sort(u.begin(), u.end());
    // distinct x-coordinates are guaranteed by the single-crossing property;
    // bail out (no pair) if the input violates it
    for (size_t i = 0; i + 1 < u.size(); ++i)
        if (u[i].x == u[i + 1].x) return out;

    std::vector<Point> all = rg_up;
    std::sort(all.begin(), all.end());
    double sep = t / (4 * k.C1);
    std::vector<std::pair<Point, Point>> pairs;
    for (Point ui : u) {
        // v: minimal x-coordinate subject to v.x >= ui.x + sep
        const Point* v = nullptr;
        for (const Point& cand : all) {
            if ((double)cand.x >= (double)ui.x + sep) {
                v = &cand;
                break;
            }
        }
        if (!v) break;
        if ((double)v->x > xbound) break;
        pairs.push_back({ui, *v});
    }
    if (pairs.empty()) return out;

    // property-D selection: last sign change of v(2) - u(2) from + to -
    int last_neg = -1;
    for (int i = 0; i < (int)pairs.size(); ++i)
        if (pairs[i].second.y - pairs[i].first.y < 0) last_neg = i;
    if (last_neg < 0) return out;
    int i0 = -1;
    for (int i = 0; i < last_neg; ++i)
        if (pairs[i].second.y - pairs[i].first.y > 0) i0 = i;
    if (i0 < 0) return out;
    out.pair = pairs[i0];
    return out;
}

bool xiprop_ok(Point a, Point b, int n, double t, const LocateConsts& k) {
    double xbound = (double)n / k.C3;
    if (!(a.y > 0 && b.y > 0)) return false;
    if (!(-xbound <= (double)a.x && (double)a.x <= (double)b.x && (double)b.x <= xbound))
        return false;
    double lo = (double)a.x + t / (4 * k.C1);
    double hi = (double)a.x + (1 / (4 * k.C1) + k.C4 * k.C1 / k.Cprime) * t;
    if (!((double)b.x >= lo && (double)b.x <= hi)) return false;
    return std::fabs((double)(b.y - a.y)) <= 3 * k.C5 * k.C1 / k.Cprime * t;
}

} // namespace

std::optional<LocatePairs> locate(const Circuit& c, const std::vector<Point>& rg,
                                  int n, double t, const LocateConsts& k,
                                  double q0, double c0) {
    if (!(1.0 / k.C3 < k.c1 * std::sin(std::min(c0, q0 / 2))))
        throw InputError("locate: C3 violates C3^{-1} < c1 sin(min(c0, q0/2))");
    if (!(k.Cprime >= 4 * k.C1 * k.C1 * k.C4))
        throw InputError("locate: C' must be at least 4 C1^2 C4");

    // hypothesis event: annulus containment and the theta bound
    for (Point v : c.vertices()) {
        double r = norm(to_vec(v));
        if (r < k.c1 * n || r > k.C1 * n) return std::nullopt;
    }
    if (theta_rg_max(rg) > t / (k.Cprime * n)) return std::nullopt;

    std::vector<Point> up, down;
    for (Point p : rg) {
        if (p.y > 0) up.push_back(p);
        if (p.y < 0) down.push_back({p.x, -p.y}); // reflect the lower half-plane
    }
    auto upper = scan_upper(up, n, t, k);
    auto lower = scan_upper(down, n, t, k);
    if (!upper.pair || !lower.pair) return std::nullopt;

    LocatePairs out;
    out.x1 = upper.pair->first;
    out.x2 = upper.pair->second;
    out.y1 = {lower.pair->first.x, -lower.pair->first.y};
    out.y2 = {lower.pair->second.x, -lower.pair->second.y};

    if (!xiprop_ok(out.x1, out.x2, n, t, k)) return std::nullopt;
    if (!xiprop_ok({out.y1.x, -out.y1.y}, {out.y2.x, -out.y2.y}, n, t, k))
        return std::nullopt;
    for (Point s : {out.x1, out.x2})
        if (!single_crossing(c, s, +1)) return std::nullopt;
    for (Point s : {out.y1, out.y2})
        if (!single_crossing(c, s, -1)) return std::nullopt;
    return out;
}

} // namespace rclab
