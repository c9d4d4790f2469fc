#include "rclab/circuit.hpp"

#include <algorithm>

namespace rclab {

Circuit::Circuit(std::vector<Point> vertices) : verts_(std::move(vertices)) {
    if (verts_.size() < 4) throw InputError("circuit needs at least 4 vertices");
    I128 a2 = shoelace2(verts_);
    if (a2 == 0) throw InputError("degenerate circuit");
    if (a2 < 0) std::reverse(verts_.begin(), verts_.end());
    for (size_t i = 0; i < verts_.size(); ++i) {
        Point d = vertex(i + 1) - vertex(i);
        if (std::abs((long)d.x) + std::abs((long)d.y) != 1)
            throw InputError("circuit steps must join lattice neighbours");
    }
    auto sorted = verts_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw InputError("circuit repeats a vertex");
}

int64_t Circuit::interior_area() const {
    I128 a2 = shoelace2(verts_);
    return (int64_t)(a2 / 2);
}

bool Circuit::encloses(Point p) const {
    // even-odd crossing count along the +x ray from p, half-open edge rule;
    // points on the circuit are not enclosed
    int crossings = 0;
    for (size_t i = 0; i < verts_.size(); ++i) {
        auto [a, b] = edge(i);
        if (point_on_segment(p, a, b)) return false;
        if (a.y == b.y) continue; // horizontal edge never crosses
        if ((a.y <= p.y && p.y < b.y) || (b.y <= p.y && p.y < a.y)) {
            if (a.x > p.x) ++crossings; // vertical edge at x = a.x
        }
    }
    return (crossings & 1) != 0;
}

Circuit Circuit::translated(Point v) const {
    auto verts = verts_;
    for (auto& p : verts) p = p + v;
    return Circuit(std::move(verts));
}

// --- outermost circuit extraction -------------------------------------------

namespace {

// faces of the box indexed by lower-left corner (i,j), i,j in [-L, L-1]
struct FaceIndex {
    int L;
    int span() const { return 2 * L; }
    int count() const { return span() * span(); }
    int id(int i, int j) const { return (i + L) * span() + (j + L); }
    std::pair<int, int> at(int fid) const {
        return {fid / span() - L, fid % span() - L};
    }
    bool valid(int i, int j) const {
        return i >= -L && i < L && j >= -L && j < L;
    }
};

// primal edge between face (i,j) and its neighbour in direction d
// (0:+x 1:+y 2:-x 3:-y); -1 when the neighbour is the box exterior is never
// needed because the edge itself always exists for in-box faces
int face_boundary_edge(const BoxGeom& g, int i, int j, int d) {
    switch (d) {
        case 0: return g.edge_id({i + 1, j}, 1);
        case 1: return g.edge_id({i, j + 1}, 0);
        case 2: return g.edge_id({i, j}, 1);
        default: return g.edge_id({i, j}, 0);
    }
}

} // namespace

std::optional<Circuit> outermost_circuit(const BondConfig& cfg) {
    const BoxGeom& g = cfg.geom();
    FaceIndex F{g.half_width()};
    const int di[4] = {1, 0, -1, 0};
    const int dj[4] = {0, 1, 0, -1};

    // flood faces from the exterior across closed edges
    std::vector<uint8_t> reached(F.count(), 0);
    std::vector<int> stack;
    for (int i = -F.L; i < F.L; ++i) {
        for (int j = -F.L; j < F.L; ++j) {
            if (i != -F.L && i != F.L - 1 && j != -F.L && j != F.L - 1) continue;
            bool seed = false;
            for (int d = 0; d < 4 && !seed; ++d) {
                if (F.valid(i + di[d], j + dj[d])) continue; // interior side
                seed = !cfg.open(face_boundary_edge(g, i, j, d));
            }
            if (seed && !reached[F.id(i, j)]) {
                reached[F.id(i, j)] = 1;
                stack.push_back(F.id(i, j));
            }
        }
    }
    while (!stack.empty()) {
        int fid = stack.back();
        stack.pop_back();
        auto [i, j] = F.at(fid);
        for (int d = 0; d < 4; ++d) {
            int ni = i + di[d], nj = j + dj[d];
            if (!F.valid(ni, nj)) continue;
            int nid = F.id(ni, nj);
            if (reached[nid]) continue;
            if (cfg.open(face_boundary_edge(g, i, j, d))) continue;
            reached[nid] = 1;
            stack.push_back(nid);
        }
    }

    const int origin_faces[4][2] = {{0, 0}, {-1, 0}, {-1, -1}, {0, -1}};
    for (auto [i, j] : origin_faces)
        if (reached[F.id(i, j)]) return std::nullopt;

    // the hole around the origin: 4-connected unreached faces
    std::vector<uint8_t> hole(F.count(), 0);
    hole[F.id(0, 0)] = 1;
    stack.assign(1, F.id(0, 0));
    while (!stack.empty()) {
        int fid = stack.back();
        stack.pop_back();
        auto [i, j] = F.at(fid);
        for (int d = 0; d < 4; ++d) {
            int ni = i + di[d], nj = j + dj[d];
            if (!F.valid(ni, nj)) continue;
            int nid = F.id(ni, nj);
            if (reached[nid] || hole[nid]) continue;
            hole[nid] = 1;
            stack.push_back(nid);
        }
    }

    // contour of the hole, hole kept on the left of travel; a 4-connected
    // hole admits no pinch vertex, so the walk is forced at every step
    // directed boundary steps out of vertex v: direction -> is-boundary,
    // derived from the pair of faces flanking the step
    auto step_face_left = [&](Point v, int d) -> std::pair<int, int> {
        // faces (left, right) of the unit step from v in direction d
        switch (d) {
            case 0: return {F.valid(v.x, v.y) ? F.id(v.x, v.y) : -1,
                            F.valid(v.x, v.y - 1) ? F.id(v.x, v.y - 1) : -1};
            case 1: return {F.valid(v.x - 1, v.y) ? F.id(v.x - 1, v.y) : -1,
                            F.valid(v.x, v.y) ? F.id(v.x, v.y) : -1};
            case 2: return {F.valid(v.x - 1, v.y - 1) ? F.id(v.x - 1, v.y - 1) : -1,
                            F.valid(v.x - 1, v.y) ? F.id(v.x - 1, v.y) : -1};
            default: return {F.valid(v.x, v.y - 1) ? F.id(v.x, v.y - 1) : -1,
                             F.valid(v.x - 1, v.y - 1) ? F.id(v.x - 1, v.y - 1) : -1};
        }
    };
    auto is_boundary_step = [&](Point v, int d) {
        auto [lf, rf] = step_face_left(v, d);
        bool lh = lf >= 0 && hole[lf];
        bool rh = rf >= 0 && hole[rf];
        return lh && !rh;
    };
    const Point dirs[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

    // start at the lexicographically smallest hole face's lower-left corner,
    // heading +y with the hole to the left... locate a definite boundary step
    Point start{0, 0};
    int start_dir = -1;
    {
        int best = -1;
        for (int fid = 0; fid < F.count(); ++fid)
            if (hole[fid]) { best = fid; break; }
        auto [i, j] = F.at(best);
        // lower-left corner of the lex-smallest hole face; the face below is
        // not in the hole (j minimal in its column), so step +x has hole-left
        start = {i, j};
        // smallest column: face to the left not in hole either
        if (is_boundary_step(start, 0)) start_dir = 0;
        else if (is_boundary_step(start, 1)) start_dir = 1;
        if (start_dir < 0) throw InternalError("no boundary step at contour start");
    }

    std::vector<Point> verts;
    Point v = start;
    int d = start_dir;
    do {
        // the contour edge being traversed must be open
        Point w = v + dirs[d];
        int eid = g.edge_between(v, w);
        if (eid < 0 || !cfg.open(eid))
            throw InternalError("contour crossed a closed or missing edge");
        verts.push_back(v);
        v = w;
        int next = -1;
        for (int turn : {1, 0, 3}) { // left, straight, right relative to d
            int nd = (d + turn) % 4;
            if (is_boundary_step(v, nd)) {
                if (next >= 0) throw InternalError("pinch vertex on hole contour");
                next = nd;
            }
        }
        if (next < 0) throw InternalError("contour dead end");
        d = next;
    } while (!(v == start && d == start_dir));

    Circuit c(std::move(verts));
    // cross-check: enclosed faces exactly the hole
    int64_t hole_count = 0;
    for (int fid = 0; fid < F.count(); ++fid) hole_count += hole[fid];
    if (c.interior_area() != hole_count)
        throw InternalError("contour area disagrees with hole size");
    return c;
}

// --- convex hull -------------------------------------------------------------

HullFacets hull_and_facets(const Circuit& c) {
    std::vector<Point> pts = c.vertices();
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    HullFacets out;
    if (pts.size() < 3) {
        out.hull = pts;
        return out;
    }
    // monotone chain with strict turns: collinear points dropped, so facets
    // are the maximal straight segments of the hull boundary
    std::vector<Point> h(2 * pts.size());
    size_t k = 0;
    for (size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
        h[k++] = pts[i];
    }
    size_t lower = k + 1;
    for (size_t i = pts.size() - 1; i-- > 0;) {
        while (k >= lower && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    out.hull = std::move(h);
    for (size_t i = 0; i < out.hull.size(); ++i)
        out.facets.push_back({out.hull[i], out.hull[(i + 1) % out.hull.size()]});
    return out;
}

// --- cutpoints ----------------------------------------------------------------

namespace {

// does the closed segment [a,b] meet the ray {t v : t >= 0} at any point
// other than v itself?
bool segment_meets_ray_off_v(Point a, Point b, Point v) {
    I128 ca = cross(v, a), cb = cross(v, b);
    auto on_ray = [&](Point p) { return cross(v, p) == 0 && dot(v, p) >= 0; };
    if (ca == 0 && cb == 0) {
        // segment collinear with the ray's line; overlap with the ray is a
        // subsegment, nonempty beyond v iff an endpoint other than v sits on
        // the ray, or the segment covers points past v
        if (on_ray(a) && a != v) return true;
        if (on_ray(b) && b != v) return true;
        return false;
    }
    if (ca == 0) return on_ray(a) && a != v;
    if (cb == 0) return on_ray(b) && b != v;
    if (sgn(ca) == sgn(cb)) return false;
    // proper crossing of the line at p* = a + t (b-a), t = ca / (ca - cb);
    // p* is on the ray iff dot(v, p*) >= 0
    I128 denom = ca - cb; // sign matches sgn(ca)
    I128 num = dot(v, a) * denom + ca * dot(v, b - a);
    if (denom < 0) num = -num;
    if (num < 0) return false;
    // p* == v iff v lies on the segment
    return !point_on_segment(v, a, b);
}

} // namespace

std::vector<Point> cutpoints(const Circuit& c) {
    if (!c.encloses({0, 0})) throw InputError("cutpoints need the origin enclosed");
    std::vector<Point> out;
    for (size_t i = 0; i < c.size(); ++i) {
        Point v = c.vertex(i);
        bool cut = true;
        for (size_t j = 0; j < c.size() && cut; ++j) {
            auto [a, b] = c.edge(j);
            if (segment_meets_ray_off_v(a, b, v)) cut = false;
        }
        if (cut) out.push_back(v);
    }
    return out;
}

double fluc(const std::vector<Point>& path, Point x, Point y) {
    if (path.empty() || path.front() != x || path.back() != y)
        throw InputError("fluc: path must run from x to y");
    // distance to a segment is convex along each straight piece, so the
    // supremum over the path is attained at a vertex
    double best = 0;
    for (Point p : path)
        best = std::max(best, dist_point_segment(to_vec(p), to_vec(x), to_vec(y)));
    return best;
}

} // namespace rclab
