#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

namespace rclab::oracle {

namespace {

std::vector<std::vector<int>> open_adjacency(const BondConfig& cfg) {
    const BoxGeom& g = cfg.geom();
    std::vector<std::vector<int>> adj(g.vertex_count());
    for (int e = 0; e < g.edge_count(); ++e) {
        if (!cfg.open(e)) continue;
        auto [a, b] = g.edge_endpoints(e);
        adj[g.vertex_id(a)].push_back(g.vertex_id(b));
        adj[g.vertex_id(b)].push_back(g.vertex_id(a));
    }
    return adj;
}

} // namespace

std::vector<std::vector<Point>> enumerate_open_cycles(const BondConfig& cfg,
                                                      size_t step_cap) {
    const BoxGeom& g = cfg.geom();
    auto adj = open_adjacency(cfg);
    std::vector<std::vector<Point>> cycles;
    std::vector<int> path;
    std::vector<uint8_t> used(g.vertex_count(), 0);
    size_t steps = 0;

    // cycles are rooted at their smallest vertex id; the second vertex is
    // kept below the last to emit each cycle in one direction only
    std::function<void(int, int)> dfs = [&](int base, int v) {
        if (++steps > step_cap) throw std::runtime_error("cycle enumeration cap hit");
        for (int w : adj[v]) {
            if (w == base && path.size() >= 4) {
                if (path[1] < path.back()) {
                    std::vector<Point> cyc;
                    for (int id : path) cyc.push_back(g.vertex_at(id));
                    cycles.push_back(cyc);
                }
                continue;
            }
            if (w <= base || used[w]) continue;
            used[w] = 1;
            path.push_back(w);
            dfs(base, w);
            path.pop_back();
            used[w] = 0;
        }
    };
    for (int b = 0; b < g.vertex_count(); ++b) {
        if (adj[b].size() < 2) continue;
        path.assign(1, b);
        used[b] = 1;
        dfs(b, b);
        used[b] = 0;
    }
    return cycles;
}

std::set<std::pair<int, int>> polygon_faces(const std::vector<Point>& poly) {
    int64_t xlo = poly[0].x, xhi = poly[0].x, ylo = poly[0].y, yhi = poly[0].y;
    for (Point p : poly) {
        xlo = std::min(xlo, p.x);
        xhi = std::max(xhi, p.x);
        ylo = std::min(ylo, p.y);
        yhi = std::max(yhi, p.y);
    }
    std::set<std::pair<int, int>> out;
    for (int64_t i = xlo; i < xhi; ++i) {
        for (int64_t j = ylo; j < yhi; ++j) {
            // centre (i+1/2, j+1/2): even-odd crossings of the +x ray,
            // exact because the ray height avoids every lattice point
            int crossings = 0;
            for (size_t t = 0; t < poly.size(); ++t) {
                Point a = poly[t], b = poly[(t + 1) % poly.size()];
                if (a.x != b.x) continue; // vertical edges only
                if (std::min(a.y, b.y) <= j && j < std::max(a.y, b.y) && a.x > i)
                    ++crossings;
            }
            if (crossings & 1) out.insert({(int)i, (int)j});
        }
    }
    return out;
}

bool polygon_encloses_origin(const std::vector<Point>& poly) {
    int crossings = 0;
    for (size_t t = 0; t < poly.size(); ++t) {
        Point a = poly[t], b = poly[(t + 1) % poly.size()];
        if (point_on_segment({0, 0}, a, b)) return false;
        if (a.x != b.x) continue;
        if ((a.y <= 0 && 0 < b.y) || (b.y <= 0 && 0 < a.y))
            if (a.x > 0) ++crossings;
    }
    return (crossings & 1) != 0;
}

OutermostOracle outermost_by_enumeration(const BondConfig& cfg) {
    auto cycles = enumerate_open_cycles(cfg);
    OutermostOracle out;
    std::vector<std::set<std::pair<int, int>>> faces;
    std::vector<size_t> enclosing;
    for (size_t i = 0; i < cycles.size(); ++i) {
        if (!polygon_encloses_origin(cycles[i])) continue;
        enclosing.push_back(i);
        faces.push_back(polygon_faces(cycles[i]));
    }
    if (enclosing.empty()) return out;
    size_t best = 0;
    for (size_t i = 1; i < faces.size(); ++i)
        if (faces[i].size() > faces[best].size()) best = i;
    for (size_t i = 0; i < faces.size(); ++i) {
        if (!std::includes(faces[best].begin(), faces[best].end(), faces[i].begin(),
                           faces[i].end()))
            throw std::runtime_error("oracle: no unique outermost cycle");
    }
    out.exists = true;
    out.area = (int64_t)faces[best].size();
    for (Point p : cycles[enclosing[best]]) out.vertex_set.insert(p);
    return out;
}

std::set<Point> hull_by_exhaustion(const std::vector<Point>& pts) {
    std::vector<Point> uniq = pts;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    std::set<Point> out;
    for (Point p : uniq) {
        bool extreme = true;
        // p is not extreme iff it lies in a closed triangle or segment of others
        for (size_t i = 0; i < uniq.size() && extreme; ++i) {
            if (uniq[i] == p) continue;
            for (size_t j = i + 1; j < uniq.size() && extreme; ++j) {
                if (uniq[j] == p) continue;
                if (point_on_segment(p, uniq[i], uniq[j])) {
                    extreme = false;
                    break;
                }
                for (size_t k = j + 1; k < uniq.size() && extreme; ++k) {
                    if (uniq[k] == p) continue;
                    I128 d0 = cross(uniq[j] - uniq[i], uniq[k] - uniq[i]);
                    if (d0 == 0) continue;
                    I128 s1 = cross(uniq[j] - uniq[i], p - uniq[i]);
                    I128 s2 = cross(uniq[k] - uniq[j], p - uniq[j]);
                    I128 s3 = cross(uniq[i] - uniq[k], p - uniq[k]);
                    if (d0 > 0 ? (s1 >= 0 && s2 >= 0 && s3 >= 0)
                               : (s1 <= 0 && s2 <= 0 && s3 <= 0))
                        extreme = false;
                }
            }
        }
        if (extreme) out.insert(p);
    }
    return out;
}

// --- strip transfer -----------------------------------------------------------

namespace {

// state: partition of the 3 column vertices encoded as canonical labels,
// plus the index of the origin-connected block (-1 = none alive)
struct StripState {
    int part[3];
    int origin_block;

    bool operator<(const StripState& o) const {
        for (int i = 0; i < 3; ++i)
            if (part[i] != o.part[i]) return part[i] < o.part[i];
        return origin_block < o.origin_block;
    }
};

StripState canonical(int labels[3], int origin_label) {
    StripState s{};
    int next = 0;
    std::map<int, int> remap;
    for (int i = 0; i < 3; ++i) {
        if (!remap.count(labels[i])) remap[labels[i]] = next++;
        s.part[i] = remap[labels[i]];
    }
    s.origin_block = origin_label >= 0 && remap.count(origin_label)
                         ? remap[origin_label]
                         : -1;
    return s;
}

} // namespace

double strip_connection_probability(int k, double p) {
    // vertices (x, y), y in {-1,0,1}; column state after adding all edges
    // among columns <= x.  Start: column 0 with its two vertical edges.
    std::map<StripState, double> cur;
    for (int v0 = 0; v0 < 2; ++v0) {
        for (int v1 = 0; v1 < 2; ++v1) {
            double w = (v0 ? p : 1 - p) * (v1 ? p : 1 - p);
            // vertical edges: (x,-1)-(x,0) and (x,0)-(x,1); origin is y=0
            int lab[3] = {0, 1, 2}; // index 0: y=-1, 1: y=0, 2: y=1
            if (v0) lab[0] = lab[1];
            if (v1) lab[2] = lab[1];
            StripState s = canonical(lab, lab[1]);
            cur[s] += w;
        }
    }
    for (int x = 1; x <= k; ++x) {
        std::map<StripState, double> next;
        for (const auto& [s, w0] : cur) {
            for (int h = 0; h < 8; ++h) {      // horizontal edges x-1 -> x
                for (int v = 0; v < 4; ++v) {  // vertical edges in column x
                    double w = w0;
                    for (int i = 0; i < 3; ++i) w *= (h >> i & 1) ? p : 1 - p;
                    for (int i = 0; i < 2; ++i) w *= (v >> i & 1) ? p : 1 - p;
                    // union-find over 6 nodes: old column 0..2, new column 3..5
                    int uf[6];
                    for (int i = 0; i < 6; ++i) uf[i] = i;
                    std::function<int(int)> find = [&](int a) {
                        while (uf[a] != a) a = uf[a] = uf[uf[a]];
                        return a;
                    };
                    auto unite = [&](int a, int b) { uf[find(a)] = find(b); };
                    for (int i = 0; i < 3; ++i)
                        for (int j = i + 1; j < 3; ++j)
                            if (s.part[i] == s.part[j]) unite(i, j);
                    for (int i = 0; i < 3; ++i)
                        if (h >> i & 1) unite(i, i + 3);
                    if (v >> 0 & 1) unite(3, 4);
                    if (v >> 1 & 1) unite(4, 5);
                    int lab[3] = {find(3), find(4), find(5)};
                    int origin_lab = -1;
                    if (s.origin_block >= 0) {
                        for (int i = 0; i < 3; ++i) {
                            if (s.part[i] == s.origin_block) {
                                int r = find(i);
                                for (int jn = 0; jn < 3; ++jn)
                                    if (lab[jn] == r) origin_lab = r;
                            }
                        }
                    }
                    StripState ns = canonical(lab, origin_lab);
                    next[ns] += w;
                }
            }
        }
        cur = std::move(next);
    }
    double total = 0;
    for (const auto& [s, w] : cur)
        if (s.origin_block >= 0 && s.part[1] == s.origin_block) total += w;
    return total;
}

double binomial_mad(long N, double p) {
    if (p <= 0 || p >= 1) return 0;
    long nu = (long)std::floor(N * p) + 1;
    if (nu > N) nu = N;
    double logc = std::lgamma(N + 1.0) - std::lgamma(nu + 1.0) - std::lgamma(N - nu + 1.0);
    double logterm = logc + nu * std::log(p) + (N - nu) * std::log(1 - p);
    return 2.0 * (double)nu * (1 - p) * std::exp(logterm);
}

double expected_empirical_tv(const std::vector<double>& probs, long N) {
    double s = 0;
    for (double p : probs) s += binomial_mad(N, p);
    return 0.5 * s / (double)N;
}

std::vector<std::vector<Point>> enumerate_open_paths(const BondConfig& cfg, Point x,
                                                     Point y, const Region& region,
                                                     size_t cap) {
    const BoxGeom& g = cfg.geom();
    std::vector<std::vector<Point>> paths;
    std::vector<Point> path{x};
    std::vector<uint8_t> used(g.vertex_count(), 0);
    used[g.vertex_id(x)] = 1;
    size_t steps = 0;
    std::function<void(Point)> dfs = [&](Point v) {
        if (++steps > cap) throw std::runtime_error("path enumeration cap hit");
        if (v == y) {
            paths.push_back(path);
            return;
        }
        for (Point d : {Point{1, 0}, Point{0, 1}, Point{-1, 0}, Point{0, -1}}) {
            Point w = v + d;
            if (!g.contains(w) || used[g.vertex_id(w)]) continue;
            int e = g.edge_between(v, w);
            if (e < 0 || !cfg.open(e) || !region.contains_edge(e)) continue;
            used[g.vertex_id(w)] = 1;
            path.push_back(w);
            dfs(w);
            path.pop_back();
            used[g.vertex_id(w)] = 0;
        }
    };
    dfs(x);
    return paths;
}

BondConfig face_set_boundary(BoxGeomPtr g,
                             const std::function<bool(double, double)>& pred) {
    int L = g->half_width();
    BondConfig cfg(g);
    auto in_set = [&](int i, int j) {
        if (i < -L || i >= L || j < -L || j >= L) return false;
        return pred(i + 0.5, j + 0.5);
    };
    for (int i = -L; i < L; ++i) {
        for (int j = -L; j < L; ++j) {
            if (!in_set(i, j)) continue;
            if (!in_set(i + 1, j)) cfg.set(g->edge_id({i + 1, j}, 1), true);
            if (!in_set(i - 1, j)) cfg.set(g->edge_id({i, j}, 1), true);
            if (!in_set(i, j + 1)) cfg.set(g->edge_id({i, j + 1}, 0), true);
            if (!in_set(i, j - 1)) cfg.set(g->edge_id({i, j}, 0), true);
        }
    }
    return cfg;
}

BondConfig disc_boundary(BoxGeomPtr g, double R) {
    return face_set_boundary(
        g, [R](double x, double y) { return x * x + y * y <= R * R; });
}

} // namespace rclab::oracle
