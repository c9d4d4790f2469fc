#include "rclab/droplet.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace rclab {

std::vector<Vec2> WulffShape::dilated_boundary(int n) const {
    size_t target = std::max<size_t>(256, 16 * (size_t)std::max(n, 1));
    // resample uniformly by perimeter
    std::vector<double> seglen(boundary.size());
    double perim = 0;
    for (size_t i = 0; i < boundary.size(); ++i) {
        seglen[i] = dist(boundary[i], boundary[(i + 1) % boundary.size()]);
        perim += seglen[i];
    }
    std::vector<Vec2> out;
    out.reserve(target);
    double step = perim / (double)target;
    size_t seg = 0;
    double along = 0;
    for (size_t j = 0; j < target; ++j) {
        double want = j * step;
        while (along + seglen[seg] < want && seg + 1 < boundary.size()) {
            along += seglen[seg];
            ++seg;
        }
        double t = seglen[seg] > 0 ? (want - along) / seglen[seg] : 0.0;
        Vec2 a = boundary[seg], b = boundary[(seg + 1) % boundary.size()];
        out.push_back({(double)n * (a.x + t * (b.x - a.x)),
                       (double)n * (a.y + t * (b.y - a.y))});
    }
    return out;
}

// --- regeneration sites -------------------------------------------------------

namespace {

// clip c0 + t*c1 (>= 0 closed, > 0 open) constraints over [0,1]; returns
// whether the feasible interval is nonempty and its bounds
struct Interval {
    double lo = 0, hi = 1;
    bool empty = false;

    void clip(double c0, double c1, bool strict) {
        if (empty) return;
        if (c1 == 0) {
            if (strict ? c0 <= 0 : c0 < 0) empty = true;
            return;
        }
        double root = -c0 / c1;
        if (c1 > 0) {
            lo = std::max(lo, root);
        } else {
            hi = std::min(hi, root);
        }
        if (strict ? !(lo < hi) : lo > hi) empty = true;
    }
};

} // namespace

std::vector<Point> regeneration_sites(const Circuit& c, double q0, double c0) {
    if (!(c0 > 0 && c0 < q0 / 2 && q0 / 2 < M_PI / 4))
        throw InputError("regeneration constants need 0 < c0 < q0/2 < pi/4");
    if (!c.encloses({0, 0})) throw InputError("regeneration sites need the origin enclosed");

    std::vector<Point> out;
    const auto& verts = c.vertices();
    // endpoint arguments for a cheap angular prune: an edge with both
    // endpoints at radius >= 12 subtends less than 0.1 rad, so it cannot
    // touch the window when both endpoints are further than c0 + 0.15 away
    std::vector<double> vargs(c.size());
    std::vector<double> vrad(c.size());
    for (size_t i = 0; i < c.size(); ++i) {
        vargs[i] = arg_of(c.vertex(i));
        vrad[i] = norm(to_vec(c.vertex(i)));
    }
    auto circ_dist = [](double a, double b) {
        double d = std::fabs(a - b);
        return std::min(d, 2 * M_PI - d);
    };
    for (Point v : verts) {
        Vec2 vd = normalized(to_vec(v));
        double va = arg_of(v);
        // angular window W_{v,c0}: closed convex cone at the origin
        Vec2 wlo = rotated(vd, -c0), whi = rotated(vd, c0);
        // complement of forward+backward cones: two open wedges at v with
        // axis +-v and half-aperture q0
        Vec2 f1 = rotated(vd, -q0), f2 = rotated(vd, q0);
        Vec2 b1 = rotated(-1.0 * vd, -q0), b2 = rotated(-1.0 * vd, q0);
        bool ok = true;
        for (size_t j = 0; j < c.size() && ok; ++j) {
            size_t j2 = (j + 1) % c.size();
            if (vrad[j] >= 12 && vrad[j2] >= 12 &&
                circ_dist(vargs[j], va) > c0 + 0.15 &&
                circ_dist(vargs[j2], va) > c0 + 0.15)
                continue;
            auto [pa, pb] = c.edge(j);
            Vec2 a = to_vec(pa), d = to_vec(pb) - a;
            Interval win;
            win.clip(cross(wlo, a), cross(wlo, d), false);
            win.clip(cross(a, whi), cross(d, whi), false);
            if (win.empty) continue;
            Vec2 rel = a - to_vec(v);
            for (auto [r1, r2] : {std::pair{f1, f2}, std::pair{b1, b2}}) {
                Interval bad = win;
                bad.clip(cross(r1, rel), cross(r1, d), true);
                bad.clip(cross(rel, r2), cross(d, r2), true);
                if (!bad.empty && bad.hi - bad.lo > 1e-12) {
                    ok = false;
                    break;
                }
            }
        }
        if (ok) out.push_back(v);
    }
    return out;
}

double theta_rg_max(const std::vector<Point>& rg) {
    if (rg.size() <= 1) return 2 * M_PI;
    std::vector<double> args;
    args.reserve(rg.size());
    for (Point p : rg) args.push_back(arg_of(p));
    std::sort(args.begin(), args.end());
    double best = args.front() + 2 * M_PI - args.back();
    for (size_t i = 1; i < args.size(); ++i)
        best = std::max(best, args[i] - args[i - 1]);
    return best;
}

double mprg(const Circuit& c, const std::vector<Point>& rg) {
    if (rg.empty()) return std::nan("");
    struct Site {
        double arg;
        Vec2 pos;
    };
    std::vector<Site> sites;
    sites.reserve(rg.size());
    for (Point p : rg) sites.push_back({arg_of(p), to_vec(p)});
    std::sort(sites.begin(), sites.end(),
              [](const Site& a, const Site& b) { return a.arg < b.arg; });
    double best = 0;
    for (Point vp : c.vertices()) {
        double a = arg_of(vp);
        // first site met counterclockwise (arg >= a, cyclic) and clockwise
        // (arg <= a, cyclic); a site at the same argument counts for both
        auto lo = std::lower_bound(sites.begin(), sites.end(), a,
                                   [](const Site& s, double v) { return s.arg < v; });
        auto hi = std::upper_bound(sites.begin(), sites.end(), a,
                                   [](double v, const Site& s) { return v < s.arg; });
        const Site& ccw = lo == sites.end() ? sites.front() : *lo;
        const Site& cw = hi == sites.begin() ? sites.back() : *(hi - 1);
        double d = std::max(dist(to_vec(vp), ccw.pos), dist(to_vec(vp), cw.pos));
        best = std::max(best, d);
    }
    return best;
}

// --- global distortion ---------------------------------------------------------

namespace {

// uniform-grid nearest-point queries over a fixed point set
class PointGrid {
  public:
    explicit PointGrid(const std::vector<Vec2>& pts, double cell = 2.0)
        : pts_(pts), cell_(cell) {
        for (size_t i = 0; i < pts_.size(); ++i) buckets_[key(pts_[i])].push_back((int)i);
    }

    double nearest_dist(Vec2 q) const {
        double best = INFINITY;
        auto [cx, cy] = key(q);
        for (int r = 0;; ++r) {
            // ring at Chebyshev radius r
            bool any = false;
            for (int dx = -r; dx <= r; ++dx) {
                for (int dy = -r; dy <= r; ++dy) {
                    if (std::max(std::abs(dx), std::abs(dy)) != r) continue;
                    auto it = buckets_.find({cx + dx, cy + dy});
                    if (it == buckets_.end()) continue;
                    any = true;
                    for (int i : it->second) best = std::min(best, dist(q, pts_[i]));
                }
            }
            (void)any;
            // all points in rings <= r+1 are farther than (r)*cell from q's cell
            if (best <= r * cell_) return best;
            if (r * cell_ > 1e7) return best; // empty set guard
        }
    }

  private:
    std::pair<int, int> key(Vec2 p) const {
        return {(int)std::floor(p.x / cell_), (int)std::floor(p.y / cell_)};
    }
    std::vector<Vec2> pts_;
    double cell_;
    std::map<std::pair<int, int>, std::vector<int>> buckets_;
};

std::vector<Vec2> circuit_samples(const Circuit& c) {
    std::vector<Vec2> pts;
    pts.reserve(2 * c.size());
    for (size_t i = 0; i < c.size(); ++i) {
        auto [a, b] = c.edge(i);
        pts.push_back(to_vec(a));
        pts.push_back(0.5 * (to_vec(a) + to_vec(b)));
    }
    return pts;
}

double hausdorff_at(const std::vector<Vec2>& wpts, const PointGrid& wgrid,
                    const std::vector<Vec2>& cpts, const PointGrid& cgrid, Vec2 z) {
    double h = 0;
    for (const Vec2& w : wpts) h = std::max(h, cgrid.nearest_dist(w + z));
    for (const Vec2& g : cpts) h = std::max(h, wgrid.nearest_dist(g - z));
    return h;
}

} // namespace

GdResult gd_and_center(const Circuit& c, const WulffShape& wulff, int n) {
    std::vector<Vec2> cpts = circuit_samples(c);
    std::vector<Vec2> wpts = wulff.dilated_boundary(n);
    PointGrid cgrid(cpts), wgrid(wpts);

    Vec2 centroid{0, 0};
    for (Point p : c.vertices()) centroid = centroid + to_vec(p);
    centroid = (1.0 / (double)c.size()) * centroid;
    Point z0{(int64_t)std::llround(centroid.x), (int64_t)std::llround(centroid.y)};

    double gd0 = hausdorff_at(wpts, wgrid, cpts, cgrid, to_vec(z0));
    // the objective is 1-Lipschitz in z, so the argmin lies within 2*gd0
    int64_t r = (int64_t)std::ceil(2 * gd0) + 1;
    GdResult best{gd0, z0};
    for (int64_t zx = z0.x - r; zx <= z0.x + r; ++zx) {
        for (int64_t zy = z0.y - r; zy <= z0.y + r; ++zy) {
            Point z{zx, zy};
            double h = hausdorff_at(wpts, wgrid, cpts, cgrid, to_vec(z));
            if (h < best.gd || (h == best.gd && z < best.cen)) {
                best.gd = h;
                best.cen = z;
            }
        }
    }
    return best;
}

// --- roughness ------------------------------------------------------------------

Roughness roughness_stats(const Circuit& c) {
    HullFacets hf = hull_and_facets(c);
    Roughness out;
    if (hf.facets.empty()) throw InternalError("degenerate hull");
    for (auto& [a, b] : hf.facets)
        out.mfl = std::max(out.mfl, dist(to_vec(a), to_vec(b)));

    // MLR and its attaining vertex, lexicographic tie-break
    bool first = true;
    for (Point v : c.vertices()) {
        double d = INFINITY;
        for (auto& [a, b] : hf.facets)
            d = std::min(d, dist_point_segment(to_vec(v), to_vec(a), to_vec(b)));
        if (first || d > out.mlr || (d == out.mlr && v < out.x_mlr)) {
            out.mlr = d;
            out.x_mlr = v;
            first = false;
        }
    }

    // MLRF: extreme points of the hull first met from x_mlr in a clockwise
    // and a counterclockwise search centred at the origin
    double a0 = arg_of(out.x_mlr);
    const double TWO_PI = 2 * M_PI;
    double best_ccw = INFINITY, best_cw = INFINITY;
    Point p_ccw{0, 0}, p_cw{0, 0};
    for (Point h : hf.hull) {
        double d = arg_of(h) - a0;
        double ccw = std::fmod(std::fmod(d, TWO_PI) + TWO_PI, TWO_PI); // in [0, 2pi)
        double cw = ccw == 0 ? 0 : TWO_PI - ccw;
        if (ccw < best_ccw || (ccw == best_ccw && h < p_ccw)) {
            best_ccw = ccw;
            p_ccw = h;
        }
        if (cw < best_cw || (cw == best_cw && h < p_cw)) {
            best_cw = cw;
            p_cw = h;
        }
    }
    out.mlrf = dist(to_vec(p_ccw), to_vec(p_cw));
    return out;
}

DropletStats droplet_stats(const BondConfig& cfg, int n, const WulffShape& wulff) {
    auto circ = outermost_circuit(cfg);
    if (!circ) throw InfeasibleError("no circuit encloses the origin");
    DropletStats s;
    s.n = n;
    s.area = circ->interior_area();
    s.exc = s.area - (int64_t)n * n;
    Roughness r = roughness_stats(*circ);
    s.mlr = r.mlr;
    s.mfl = r.mfl;
    s.mlrf = r.mlrf;
    auto rg = regeneration_sites(*circ, wulff.q0, wulff.c0);
    s.rg_count = (int)rg.size();
    s.theta_rg_max = theta_rg_max(rg);
    s.mprg = mprg(*circ, rg);
    GdResult g = gd_and_center(*circ, wulff, n);
    s.gd = g.gd;
    s.cen = g.cen;
    return s;
}

} // namespace rclab
