#include "rclab/wulff.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace rclab {

namespace {

// the 8 lattice symmetries as (signed, swapped) coordinate maps
struct Sym {
    int sx, sy;
    bool swap;
};
constexpr Sym kSyms[8] = {{1, 1, false},  {-1, 1, false}, {1, -1, false}, {-1, -1, false},
                          {1, 1, true},   {-1, 1, true},  {1, -1, true},  {-1, -1, true}};

Vec2 apply(const Sym& s, Vec2 v) {
    Vec2 w = s.swap ? Vec2{v.y, v.x} : v;
    return {s.sx * w.x, s.sy * w.y};
}

} // namespace

XiTable estimate_xi(const RcParams& params, int dirs, int kmax, long samples,
                    SplitRng& rng) {
    auto [pc, bc] = critical_point(params.q);
    if (!(params.p < pc)) throw InfeasibleError("estimate_xi needs subcritical p < p_c");
    if (kmax < 8) throw InputError("kmax must be >= 8");
    if (dirs < 8 || dirs % 8 != 0) throw InputError("dirs must be a positive multiple of 8");

    XiTable t;
    t.p = params.p;
    t.q = params.q;
    t.kmax = kmax;
    t.samples = samples;
    t.seed = rng.seed();
    for (int j = 0; j < dirs; ++j) {
        double a = 2 * M_PI * j / dirs;
        t.directions.push_back({std::cos(a), std::sin(a)});
    }

    // representatives: grid angles in [0, pi/4]
    int reps = dirs / 8 + 1;
    int klo = kmax / 2;
    std::vector<std::vector<Point>> targets(reps);
    for (int r = 0; r < reps; ++r) {
        double a = 2 * M_PI * r / dirs;
        for (int k = klo; k <= kmax; ++k) {
            targets[r].push_back({(int64_t)std::floor(k * std::cos(a)),
                                  (int64_t)std::floor(k * std::sin(a))});
        }
    }

    auto geom = make_box(2 * kmax);
    Region full = Region::full(*geom);
    std::vector<std::vector<long>> hits(reps, std::vector<long>(kmax - klo + 1, 0));
    const int fk_sweeps = 100;
    for (long s = 0; s < samples; ++s) {
        BondConfig cfg = params.q == 1.0 ? sample_q1(geom, params.p, rng)
                                         : sample_fk(geom, params, fk_sweeps, rng);
        auto cluster = open_cluster(cfg, {0, 0}, full);
        std::vector<uint8_t> inset(geom->vertex_count(), 0);
        for (Point p : cluster) inset[geom->vertex_id(p)] = 1;
        for (int r = 0; r < reps; ++r)
            for (size_t i = 0; i < targets[r].size(); ++i)
                if (inset[geom->vertex_id(targets[r][i])]) ++hits[r][i];
    }

    t.xi.assign(dirs, 0.0);
    t.stderr_.assign(dirs, 0.0);
    t.max_residual.assign(dirs, 0.0);
    t.flagged.assign(dirs, 0);

    std::vector<double> rep_xi(reps), rep_se(reps), rep_res(reps);
    std::vector<uint8_t> rep_flag(reps, 0);
    for (int r = 0; r < reps; ++r) {
        // weighted least squares of y_k = -log phat_k on k
        std::vector<double> ks, ys, ws;
        bool flagged = false;
        for (int k = klo; k <= kmax; ++k) {
            long h = hits[r][k - klo];
            if (h == 0) {
                flagged = true;
                continue;
            }
            double phat = (double)h / (double)samples;
            double var_y = (1.0 - phat) / ((double)samples * phat); // delta method
            ks.push_back(k);
            ys.push_back(-std::log(phat));
            ws.push_back(var_y > 0 ? 1.0 / var_y : 1e12);
        }
        if (ks.size() < 2) {
            rep_xi[r] = -std::log(params.p); // crude fallback, flagged below
            rep_se[r] = rep_xi[r];
            rep_res[r] = 0;
            rep_flag[r] = 1;
            continue;
        }
        double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
        for (size_t i = 0; i < ks.size(); ++i) {
            sw += ws[i];
            swx += ws[i] * ks[i];
            swy += ws[i] * ys[i];
            swxx += ws[i] * ks[i] * ks[i];
            swxy += ws[i] * ks[i] * ys[i];
        }
        double det = sw * swxx - swx * swx;
        double slope = (sw * swxy - swx * swy) / det;
        double se = std::sqrt(sw / det);
        double maxres = 0;
        double intercept = (swy - slope * swx) / sw;
        for (size_t i = 0; i < ks.size(); ++i)
            maxres = std::max(maxres, std::fabs(ys[i] - intercept - slope * ks[i]));
        if (flagged) se *= 2; // widened error bars when some counts were zero
        rep_xi[r] = slope;
        rep_se[r] = se;
        rep_res[r] = maxres;
        rep_flag[r] = flagged ? 1 : 0;
    }

    // mirror representatives onto the full grid: fold by quarter-turns, then
    // by the diagonal reflection
    for (int j = 0; j < dirs; ++j) {
        int idx = j % (dirs / 4);
        int r = idx <= dirs / 8 ? idx : dirs / 4 - idx;
        t.xi[j] = rep_xi[r];
        t.stderr_[j] = rep_se[r];
        t.max_residual[j] = rep_res[r];
        t.flagged[j] = rep_flag[r];
    }
    return t;
}

XiTable symmetry_average(const XiTable& t) {
    XiTable out = t;
    int dirs = (int)t.directions.size();
    std::vector<uint8_t> done(dirs, 0);
    for (int j = 0; j < dirs; ++j) {
        if (done[j]) continue;
        // orbit of direction j under the 8 symmetries, matched on the grid
        std::vector<int> orbit;
        for (const Sym& s : kSyms) {
            Vec2 d = apply(s, t.directions[j]);
            double a = std::atan2(d.y, d.x);
            if (a < 0) a += 2 * M_PI;
            int idx = (int)std::llround(a * dirs / (2 * M_PI)) % dirs;
            if (std::find(orbit.begin(), orbit.end(), idx) == orbit.end())
                orbit.push_back(idx);
        }
        double wsum = 0, xsum = 0;
        for (int i : orbit) {
            double w = 1.0 / (t.stderr_[i] * t.stderr_[i]);
            wsum += w;
            xsum += w * t.xi[i];
        }
        double xi = xsum / wsum;
        double se = 1.0 / std::sqrt(wsum);
        for (int i : orbit) {
            out.xi[i] = xi;
            out.stderr_[i] = se; // inverse-variance pooling: se <= min orbit se
            done[i] = 1;
        }
    }
    return out;
}

WulffShape build_wulff(const XiTable& xi, size_t boundary_points) {
    size_t n = xi.directions.size();
    if (n < 8) throw InputError("xi table too coarse");
    for (double v : xi.xi)
        if (!(v > 0)) throw InputError("xi must be positive in every direction");

    // clip a large square by every half-plane <t,u> <= xi(u)
    double big = 0;
    for (double v : xi.xi) big = std::max(big, v);
    big *= 4;
    std::vector<Vec2> poly{{big, big}, {-big, big}, {-big, -big}, {big, -big}};
    for (size_t i = 0; i < n; ++i) {
        Vec2 u = xi.directions[i];
        double b = xi.xi[i];
        std::vector<Vec2> next;
        size_t m = poly.size();
        for (size_t j = 0; j < m; ++j) {
            Vec2 a = poly[j], c = poly[(j + 1) % m];
            double fa = dot(a, u) - b, fc = dot(c, u) - b;
            if (fa <= 0) next.push_back(a);
            if ((fa < 0 && fc > 0) || (fa > 0 && fc < 0)) {
                double t = fa / (fa - fc);
                next.push_back(a + t * (c - a));
            }
        }
        poly = std::move(next);
        if (poly.size() < 3) throw InputError("half-plane intersection degenerated");
    }

    double area = shoelace_area(poly);
    if (!(area > 0)) throw InputError("half-plane intersection has empty interior");
    double lambda = 1.0 / std::sqrt(area);
    for (Vec2& v : poly) v = lambda * v;

    WulffShape w;
    w.lambda = lambda;
    // resample to a dense boundary (at least 256 points)
    size_t target = std::max<size_t>(boundary_points, 256);
    std::vector<double> seglen(poly.size());
    double perim = 0;
    for (size_t i = 0; i < poly.size(); ++i) {
        seglen[i] = dist(poly[i], poly[(i + 1) % poly.size()]);
        perim += seglen[i];
    }
    double step = perim / (double)target;
    size_t seg = 0;
    double along = 0;
    for (size_t j = 0; j < target; ++j) {
        double want = j * step;
        while (along + seglen[seg] < want && seg + 1 < poly.size()) {
            along += seglen[seg];
            ++seg;
        }
        double t = seglen[seg] > 0 ? (want - along) / seglen[seg] : 0;
        Vec2 a = poly[seg], b = poly[(seg + 1) % poly.size()];
        w.boundary.push_back(a + t * (b - a));
    }
    return w;
}

namespace {

double supang_of(const WulffShape& w, int oversample) {
    double sup = 0;
    size_t n = w.boundary.size();
    for (size_t i = 0; i < n * (size_t)oversample; ++i) {
        size_t idx = i % n;
        Vec2 z = w.boundary[idx];
        Vec2 tg = w.tangent(idx);
        sup = std::max(sup, angle_between(tg, perp(z)));
    }
    return sup;
}

bool czercond_ok(const WulffShape& w, double q0, double c0) {
    size_t n = w.boundary.size();
    double bound = M_PI / 2 - 3 * q0;
    for (size_t i = 0; i < n; ++i) {
        Vec2 y = w.boundary[i];
        double ay = arg_of(y);
        for (size_t d = 1; d < n; ++d) {
            Vec2 x = w.boundary[(i + n - d) % n]; // arg(x) < arg(y)
            double gap = ay - arg_of(x);
            if (gap < 0) gap += 2 * M_PI;
            if (gap > 2 * c0) break;
            if (angle_between(x - y, -1.0 * perp(y)) > bound) return false;
        }
    }
    return true;
}

constexpr double kDyadic = 1.0 / 4096.0;

} // namespace

bool verify_constants(const WulffShape& w, double q0, double c0, int oversample) {
    if (supang_of(w, oversample) > M_PI / 2 - 4 * q0) return false;
    return czercond_ok(w, q0, c0);
}

std::pair<double, double> choose_constants(const WulffShape& w, double c1, double C1) {
    if (!(c1 > 0 && c1 < C1)) throw InputError("need 0 < c1 < C1");
    double supang = supang_of(w, 1);
    double q0_cap = std::min((M_PI / 2 - supang) / 4, c1 / (2 * C1));
    int steps = (int)std::floor(q0_cap / kDyadic);
    double q0 = 0;
    for (int k = steps; k >= 1; --k) {
        q0 = k * kDyadic;
        if (supang <= M_PI / 2 - 4 * q0) break;
        q0 = 0;
    }
    if (!(q0 > 0)) throw InfeasibleError("no feasible q0: tangent condition too tight");

    double c0 = 0;
    for (int k = (int)std::floor((q0 / 2) / kDyadic); k >= 1; --k) {
        double cand = k * kDyadic;
        if (cand >= q0 / 2) continue;
        if (czercond_ok(w, q0, cand)) {
            c0 = cand;
            break;
        }
    }
    if (!(c0 > 0)) throw InfeasibleError("no feasible c0: curvature condition too tight");
    if (!verify_constants(w, q0, c0, 1))
        throw InternalError("chosen constants failed re-verification");
    return {q0, c0};
}

WulffShape disc_wulff(double c1, double C1) {
    WulffShape w;
    size_t n = 512;
    // radius set so the inscribed 512-gon has unit area exactly
    double r = 1.0 / std::sqrt(0.5 * n * std::sin(2 * M_PI / n));
    for (size_t i = 0; i < n; ++i) {
        double a = 2 * M_PI * i / n;
        w.boundary.push_back({r * std::cos(a), r * std::sin(a)});
    }
    w.lambda = r;
    auto [q0, c0] = choose_constants(w, c1, C1);
    w.q0 = q0;
    w.c0 = c0;
    return w;
}

std::string wulff_to_json(const WulffShape& w) {
    nlohmann::json j;
    j["lambda"] = w.lambda;
    j["q0"] = w.q0;
    j["c0"] = w.c0;
    auto& b = j["boundary"] = nlohmann::json::array();
    for (const Vec2& v : w.boundary) b.push_back({v.x, v.y});
    return j.dump(2);
}

WulffShape wulff_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    WulffShape w;
    w.lambda = j.at("lambda").get<double>();
    w.q0 = j.at("q0").get<double>();
    w.c0 = j.at("c0").get<double>();
    for (const auto& v : j.at("boundary")) w.boundary.push_back({v[0], v[1]});
    if (w.boundary.size() < 3) throw InputError("wulff json: degenerate boundary");
    return w;
}

std::string xi_to_json(const XiTable& t) {
    nlohmann::json j;
    j["p"] = t.p;
    j["q"] = t.q;
    j["kmax"] = t.kmax;
    j["samples"] = t.samples;
    j["seed"] = t.seed;
    auto arr = nlohmann::json::array();
    for (size_t i = 0; i < t.directions.size(); ++i) {
        arr.push_back({{"dir", {t.directions[i].x, t.directions[i].y}},
                       {"xi", t.xi[i]},
                       {"stderr", t.stderr_[i]},
                       {"max_residual", t.max_residual[i]},
                       {"flagged", (bool)t.flagged[i]}});
    }
    j["table"] = arr;
    return j.dump(2);
}

} // namespace rclab
