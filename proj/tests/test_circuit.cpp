#include "doctest.h"

#include <set>

#include "oracles.hpp"
#include "rclab/circuit.hpp"
#include "rclab/rc_model.hpp"

using namespace rclab;

namespace {

void open_square(BondConfig& cfg, int h) {
    const BoxGeom& g = cfg.geom();
    for (int i = -h; i < h; ++i) {
        for (int s : {-1, 1}) {
            cfg.set(g.edge_id({i, s * h}, 0), true);
            cfg.set(g.edge_id({s * h, i}, 1), true);
        }
    }
}

Circuit circuit_from_vertices(std::vector<Point> v) { return Circuit(std::move(v)); }

// square of half-side 2 with a one-face notch at the middle of the right side
std::vector<Point> notched_square() {
    return {{2, -2}, {2, -1}, {2, 0},  {1, 0},  {1, 1},  {2, 1},  {2, 2},
            {1, 2},  {0, 2},  {-1, 2}, {-2, 2}, {-2, 1}, {-2, 0}, {-2, -1},
            {-2, -2}, {-1, -2}, {0, -2}, {1, -2}};
}

// square of half-side 2 with a two-face notch centred on the right side
std::vector<Point> deep_notched_square() {
    return {{2, -2}, {2, -1}, {1, -1}, {1, 0},  {1, 1},  {2, 1},  {2, 2},
            {1, 2},  {0, 2},  {-1, 2}, {-2, 2}, {-2, 1}, {-2, 0}, {-2, -1},
            {-2, -2}, {-1, -2}, {0, -2}, {1, -2}};
}

} // namespace

TEST_SUITE_BEGIN("circuit");

TEST_CASE("outermost circuit: single square, nested squares") {
    auto g = make_box(4);
    BondConfig cfg(g);
    open_square(cfg, 1);
    auto c = outermost_circuit(cfg);
    REQUIRE(c.has_value());
    CHECK(c->interior_area() == 4);
    CHECK(c->size() == 8);
    CHECK(c->encloses({0, 0}));

    open_square(cfg, 3);
    auto outer = outermost_circuit(cfg);
    REQUIRE(outer.has_value());
    CHECK(outer->interior_area() == 36);

    BondConfig empty(g);
    CHECK(!outermost_circuit(empty).has_value());
}

TEST_CASE("outermost circuit agrees with cycle enumeration: exhaustive L=1") {
    auto g = make_box(1);
    for (uint32_t mask = 0; mask < (1u << 12); ++mask) {
        BondConfig cfg = config_from_mask(g, mask);
        auto got = outermost_circuit(cfg);
        auto want = oracle::outermost_by_enumeration(cfg);
        REQUIRE(got.has_value() == want.exists);
        if (want.exists) {
            CHECK(got->interior_area() == want.area);
            std::set<Point> vs(got->vertices().begin(), got->vertices().end());
            CHECK(vs == want.vertex_set);
        }
    }
}

TEST_CASE("outermost circuit agrees with cycle enumeration: random L=3") {
    auto g = make_box(3);
    SplitRng rng(41, 0);
    int found = 0;
    for (int rep = 0; rep < 2000; ++rep) {
        BondConfig cfg = sample_q1(g, 0.45, rng);
        auto got = outermost_circuit(cfg);
        auto want = oracle::outermost_by_enumeration(cfg);
        REQUIRE(got.has_value() == want.exists);
        if (want.exists) {
            ++found;
            CHECK(got->interior_area() == want.area);
            std::set<Point> vs(got->vertices().begin(), got->vertices().end());
            CHECK(vs == want.vertex_set);
        }
    }
    CHECK(found > 20);
}

TEST_CASE("interior area: squares, unit face, L-pentomino") {
    auto g = make_box(4);
    for (int h : {1, 2}) {
        BondConfig cfg(g);
        open_square(cfg, h);
        CHECK(outermost_circuit(cfg)->interior_area() == 4 * h * h);
    }
    Circuit unit = circuit_from_vertices({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    CHECK(unit.interior_area() == 1);

    // L-pentomino: 12 edges enclosing area 5
    Circuit ell = circuit_from_vertices({{0, 0}, {1, 0}, {2, 0}, {2, 1}, {1, 1},
                                         {1, 2}, {1, 3}, {1, 4}, {0, 4}, {0, 3},
                                         {0, 2}, {0, 1}});
    CHECK(ell.size() == 12);
    CHECK(ell.interior_area() == 5);
}

TEST_CASE("circuit constructor validates simplicity and steps") {
    CHECK_THROWS_AS(circuit_from_vertices({{0, 0}, {2, 0}, {2, 2}, {0, 2}}), InputError);
    CHECK_THROWS_AS(circuit_from_vertices({{0, 0}, {1, 0}, {0, 0}, {0, 1}}), InputError);
}

TEST_CASE("hull and facets: square symmetry and oracle agreement") {
    auto g = make_box(4);
    BondConfig cfg(g);
    open_square(cfg, 2);
    auto c = outermost_circuit(cfg);
    auto hf = hull_and_facets(*c);
    REQUIRE(hf.hull.size() == 4);
    REQUIRE(hf.facets.size() == 4);
    for (auto& [a, b] : hf.facets) CHECK(dist(to_vec(a), to_vec(b)) == doctest::Approx(4.0));
    // convex circuit: hull vertices among circuit vertices
    std::set<Point> cv(c->vertices().begin(), c->vertices().end());
    for (Point h : hf.hull) CHECK(cv.count(h) == 1);

    SplitRng rng(42, 0);
    int tested = 0;
    for (int rep = 0; rep < 1500 && tested < 60; ++rep) {
        BondConfig rc = sample_q1(g, 0.55, rng);
        auto circ = outermost_circuit(rc);
        if (!circ) continue;
        ++tested;
        auto got = hull_and_facets(*circ);
        auto want = oracle::hull_by_exhaustion(circ->vertices());
        CHECK(std::set<Point>(got.hull.begin(), got.hull.end()) == want);
    }
    CHECK(tested >= 60);
}

TEST_CASE("cutpoints: convex circuit keeps all, overhangs excluded") {
    auto g = make_box(4);
    BondConfig cfg(g);
    open_square(cfg, 1);
    auto square = outermost_circuit(cfg);
    CHECK(cutpoints(*square).size() == square->size());

    // two-face notch on the right side: the rays through (1,1) and (1,-1)
    // continue into the corners (2,2)/(2,-2), and the rays through (2,1) and
    // (2,-1) pass through the notch wall x=1 first, so all six vertices on
    // the overhang lose cutpoint status
    Circuit notched = circuit_from_vertices(deep_notched_square());
    auto cps = cutpoints(notched);
    std::set<Point> cpset(cps.begin(), cps.end());
    for (Point p : {Point{1, 1}, Point{1, -1}, Point{2, 2}, Point{2, -2},
                    Point{2, 1}, Point{2, -1}})
        CHECK(cpset.count(p) == 0);
    CHECK(cpset.count({1, 0}) == 1);
    CHECK(cpset.count({-2, -2}) == 1);
    CHECK(cps.size() == notched.size() - 6);

    Circuit unit = circuit_from_vertices({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    CHECK_THROWS_AS(cutpoints(unit), InputError); // origin not enclosed
}

namespace {

// exact simplicity check of a closed polygon with integer vertices: no two
// non-adjacent segments intersect
bool polygon_simple(const std::vector<Point>& poly) {
    size_t n = poly.size();
    auto seg = [&](size_t i) {
        return std::pair<Point, Point>{poly[i], poly[(i + 1) % n]};
    };
    auto proper_or_touching = [](Point a, Point b, Point c, Point d) {
        auto o = [](Point p, Point q, Point r) { return sgn(cross(q - p, r - p)); };
        int o1 = o(a, b, c), o2 = o(a, b, d), o3 = o(c, d, a), o4 = o(c, d, b);
        if (o1 != o2 && o3 != o4) return true;
        if (o1 == 0 && point_on_segment(c, a, b)) return true;
        if (o2 == 0 && point_on_segment(d, a, b)) return true;
        if (o3 == 0 && point_on_segment(a, c, d)) return true;
        if (o4 == 0 && point_on_segment(b, c, d)) return true;
        return false;
    };
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            auto [a, b] = seg(i);
            auto [c, d] = seg(j);
            bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent) continue;
            if (proper_or_touching(a, b, c, d)) return false;
        }
    }
    return true;
}

// piece polygon: origin, then the circuit arc from v1 to v2 inside the
// angular sector between them (scaled: no scaling needed, vertices exact)
std::vector<Point> arc_piece(const Circuit& c, size_t i1, size_t i2, bool forward) {
    std::vector<Point> poly{{0, 0}};
    size_t n = c.size();
    if (forward) {
        for (size_t i = i1;; i = (i + 1) % n) {
            poly.push_back(c.vertex(i));
            if (i == i2) break;
        }
    } else {
        for (size_t i = i1;; i = (i + n - 1) % n) {
            poly.push_back(c.vertex(i));
            if (i == i2) break;
        }
    }
    return poly;
}

} // namespace

TEST_CASE("cutpoint area decomposition: exact split for random circuit/cutpoint pairs") {
    auto g = make_box(5);
    SplitRng rng(43, 0);
    int done = 0;
    for (int rep = 0; rep < 20000 && done < 300; ++rep) {
        BondConfig cfg = sample_q1(g, 0.52, rng);
        auto circ = outermost_circuit(cfg);
        if (!circ || circ->interior_area() < 4) continue;
        auto cps = cutpoints(*circ);
        if (cps.size() < 2) continue;
        Point v1 = cps[rng.below(cps.size())];
        Point v2 = cps[rng.below(cps.size())];
        if (v1 == v2 || cross(v1, v2) == 0) continue;
        size_t i1 = 0, i2 = 0;
        for (size_t i = 0; i < circ->size(); ++i) {
            if (circ->vertex(i) == v1) i1 = i;
            if (circ->vertex(i) == v2) i2 = i;
        }
        auto piece1 = arc_piece(*circ, i1, i2, true);
        auto piece2 = arc_piece(*circ, i2, i1, true);
        REQUIRE(polygon_simple(piece1));
        REQUIRE(polygon_simple(piece2));
        I128 two_area = shoelace2(circ->vertices());
        I128 t1 = shoelace2(piece1), t2 = shoelace2(piece2);
        if (t1 < 0) t1 = -t1;
        if (t2 < 0) t2 = -t2;
        if (two_area < 0) two_area = -two_area;
        CHECK((long long)(t1 + t2) == (long long)two_area);
        ++done;
    }
    CHECK(done >= 300);
}

TEST_CASE("fluc: chord, single bump, staircase vs dense oracle") {
    CHECK(fluc({{0, 0}, {1, 0}, {2, 0}, {3, 0}}, {0, 0}, {3, 0}) == 0.0);
    CHECK(fluc({{0, 0}, {0, 1}, {1, 1}, {1, 0}, {2, 0}}, {0, 0}, {2, 0}) ==
          doctest::Approx(1.0));
    CHECK_THROWS_AS(fluc({{0, 0}, {1, 0}}, {0, 0}, {9, 9}), InputError);

    SplitRng rng(44, 0);
    for (int rep = 0; rep < 50; ++rep) {
        // random monotone staircase from (0,0) to (k, m)
        std::vector<Point> path{{0, 0}};
        Point cur{0, 0};
        for (int t = 0; t < 14; ++t) {
            if (rng.bernoulli(0.5)) cur.x += 1;
            else cur.y += 1;
            path.push_back(cur);
        }
        double got = fluc(path, path.front(), path.back());
        double want = 0;
        for (size_t i = 0; i + 1 < path.size(); ++i) {
            for (int s = 0; s <= 16; ++s) {
                double u = s / 16.0;
                Vec2 z = to_vec(path[i]) + u * (to_vec(path[i + 1]) - to_vec(path[i]));
                want = std::max(want,
                                dist_point_segment(z, to_vec(path.front()),
                                                   to_vec(path.back())));
            }
        }
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("notched square exposes roughness fields downstream") {
    Circuit notched = circuit_from_vertices(notched_square());
    CHECK(notched.interior_area() == 15);
    CHECK(notched.encloses({0, 0}));
}

TEST_SUITE_END();
