#pragma once

#include <array>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rclab/geom.hpp"

namespace rclab {

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InternalError : std::logic_error {
    using std::logic_error::logic_error;
};

// Finite origin-centred box [-L,L]^2 of the square lattice with a dense
// edge indexing: vertices in lexicographic (x,y) order, per vertex first the
// +x edge then the +y edge (when they fit in the box).
class BoxGeom {
  public:
    explicit BoxGeom(int half_width);

    int half_width() const { return L_; }
    int side() const { return 2 * L_ + 1; }
    int vertex_count() const { return side() * side(); }
    int edge_count() const { return (int)edge_vertex_.size(); }

    bool contains(Point p) const {
        return p.x >= -L_ && p.x <= L_ && p.y >= -L_ && p.y <= L_;
    }
    bool on_boundary(Point p) const {
        return contains(p) &&
               (p.x == -L_ || p.x == L_ || p.y == -L_ || p.y == L_);
    }

    int vertex_id(Point p) const {
        return (int)((p.x + L_) * side() + (p.y + L_));
    }
    Point vertex_at(int vid) const {
        return {vid / side() - L_, vid % side() - L_};
    }

    // edge = (lower endpoint, axis): axis 0 joins v and v+(1,0), axis 1 joins
    // v and v+(0,1); -1 if the edge is not inside the box
    int edge_id(Point v, int axis) const {
        if (!contains(v)) return -1;
        Point w = axis == 0 ? Point{v.x + 1, v.y} : Point{v.x, v.y + 1};
        if (!contains(w)) return -1;
        return edge_of_vertex_[vertex_id(v)][axis];
    }
    // the edge joining two given lattice neighbours, in either order
    int edge_between(Point a, Point b) const;

    Point edge_vertex(int eid) const { return vertex_at(edge_vertex_[eid]); }
    int edge_axis(int eid) const { return edge_axis_[eid]; }
    std::pair<Point, Point> edge_endpoints(int eid) const {
        Point a = edge_vertex(eid);
        Point b = edge_axis_[eid] == 0 ? Point{a.x + 1, a.y} : Point{a.x, a.y + 1};
        return {a, b};
    }
    Vec2 edge_midpoint(int eid) const {
        auto [a, b] = edge_endpoints(eid);
        return 0.5 * (to_vec(a) + to_vec(b));
    }

    // up to 4 incident edges of a vertex
    std::vector<int> incident_edges(Point v) const;

    // incidence table row of a vertex: (edge id, neighbour vid) pairs,
    // padded with (-1,-1)
    struct Incidence {
        int eid[4];
        int nbr[4];
        int count;
    };
    const Incidence& incidence(int vid) const { return incidence_[vid]; }

  private:
    int L_;
    std::vector<int> edge_vertex_;                 // eid -> lower endpoint vid
    std::vector<int8_t> edge_axis_;                // eid -> axis
    std::vector<std::array<int, 2>> edge_of_vertex_; // vid -> [eid_x, eid_y]
    std::vector<Incidence> incidence_;
};

using BoxGeomPtr = std::shared_ptr<const BoxGeom>;

inline BoxGeomPtr make_box(int half_width) {
    return std::make_shared<const BoxGeom>(half_width);
}

// Bond configuration on a box; value semantics, open_count kept in sync.
class BondConfig {
  public:
    explicit BondConfig(BoxGeomPtr geom, bool all_open = false)
        : geom_(std::move(geom)),
          states_(geom_->edge_count(), all_open ? 1 : 0),
          open_count_(all_open ? geom_->edge_count() : 0) {}

    const BoxGeom& geom() const { return *geom_; }
    BoxGeomPtr geom_ptr() const { return geom_; }

    bool open(int eid) const { return states_[eid] != 0; }
    void set(int eid, bool o) {
        open_count_ += (o ? 1 : 0) - (states_[eid] ? 1 : 0);
        states_[eid] = o ? 1 : 0;
    }
    int open_count() const { return open_count_; }

    const std::vector<uint8_t>& states() const { return states_; }

    friend bool operator==(const BondConfig& a, const BondConfig& b) {
        return a.states_ == b.states_;
    }

  private:
    BoxGeomPtr geom_;
    std::vector<uint8_t> states_;
    int open_count_;
};

// A set of edges of a box, as membership mask plus the explicit id list.
struct Region {
    std::vector<uint8_t> mask; // indexed by edge id
    std::vector<int> ids;

    bool contains_edge(int eid) const { return mask[eid] != 0; }
    size_t size() const { return ids.size(); }

    static Region from_mask(std::vector<uint8_t> m);
    static Region full(const BoxGeom& g);
    static Region complement(const BoxGeom& g, const Region& r);
};

// --- exact sector tests -------------------------------------------------
//
// A_{x,y} is the closed angular sector swept counterclockwise from ray(x) to
// ray(y); requires arg(x) < arg(y) (continuous branch, aperture in (0,2pi)).
// Boundary ties are decided by exact integer cross products.
struct Sector {
    Point x, y;
    bool wide; // aperture > pi

    Sector(Point x_, Point y_);

    bool contains(Point z) const;
    // closed segment [a,b] fully inside the sector (paper's E(A) rule)
    bool contains_segment(Point a, Point b) const;
    // closed segment meets the sector (paper's E*(A) rule)
    bool meets_segment(Point a, Point b) const;
};

Region sector_edge_region(const BoxGeom& g, const Sector& s);       // E(A)
Region sector_edge_region_star(const BoxGeom& g, const Sector& s);  // E*(A)

// --- connectivity --------------------------------------------------------

bool connected(const BondConfig& cfg, Point x, Point y, const Region& region);
std::vector<Point> open_cluster(const BondConfig& cfg, Point x, const Region& region);
// endpoints of `eid` joined by an open path avoiding `eid`; with
// wired_boundary, all interior-boundary vertices count as one site
bool connected_off_edge(const BondConfig& cfg, int eid, bool wired_boundary);

// --- planar duality ------------------------------------------------------
//
// Dual box of [-L,L]^2: vertices k + (1/2,1/2) for k in [-L-1,L]^2.  A dual
// edge is open iff the primal edge sharing its midpoint is closed; dual
// edges whose crossing primal edge lies outside the box are open (free
// boundary convention).
class DualGeom {
  public:
    explicit DualGeom(int primal_half_width);

    int primal_half_width() const { return L_; }
    int lo() const { return -L_ - 1; }
    int hi() const { return L_; }
    int side() const { return 2 * L_ + 2; }
    int vertex_count() const { return side() * side(); }
    int edge_count() const { return 2 * side() * (side() - 1); }

    int vertex_id(Point k) const {
        return (int)((k.x - lo()) * side() + (k.y - lo()));
    }
    Point vertex_at(int vid) const {
        return {vid / side() + lo(), vid % side() + lo()};
    }
    bool contains(Point k) const {
        return k.x >= lo() && k.x <= hi() && k.y >= lo() && k.y <= hi();
    }
    bool on_boundary(Point k) const {
        return contains(k) && (k.x == lo() || k.x == hi() || k.y == lo() || k.y == hi());
    }

    // dense ids mirroring BoxGeom's scheme
    int edge_id(Point k, int axis) const;
    std::pair<Point, Point> edge_endpoints(int eid) const;
    int edge_axis(int eid) const;

    // the primal edge crossed by a dual edge, as (lower vertex, axis)
    std::pair<Point, int> crossing_primal_edge(int eid) const;

  private:
    int L_;
};

struct DualBondConfig {
    DualGeom geom;
    std::vector<uint8_t> states;

    bool open(int eid) const { return states[eid] != 0; }
};

DualBondConfig dual_config(const BondConfig& cfg);
// dual of the dual, defined on the box of half-width L+1; edges with no
// crossing dual edge are closed
BondConfig dual_of_dual(const DualBondConfig& dual);

} // namespace rclab
