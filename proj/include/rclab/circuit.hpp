#pragma once

#include <optional>
#include <vector>

#include "rclab/lattice.hpp"

namespace rclab {

// Simple nearest-neighbour lattice cycle, counterclockwise (signed area > 0).
class Circuit {
  public:
    explicit Circuit(std::vector<Point> vertices);

    const std::vector<Point>& vertices() const { return verts_; }
    size_t size() const { return verts_.size(); }
    Point vertex(size_t i) const { return verts_[i % verts_.size()]; }
    std::pair<Point, Point> edge(size_t i) const {
        return {verts_[i % verts_.size()], verts_[(i + 1) % verts_.size()]};
    }

    // area of the bounded component (integer for lattice cycles)
    int64_t interior_area() const;

    // strict interior test for a lattice point
    bool encloses(Point p) const;

    Circuit translated(Point v) const;

  private:
    std::vector<Point> verts_;
};

// Outermost open circuit around the origin, or nullopt when the origin is
// not enclosed.  Faces are flooded from the box boundary across closed
// edges; the circuit is the contour of the unreached hole holding the four
// faces at the origin.
std::optional<Circuit> outermost_circuit(const BondConfig& cfg);

// convex hull of the circuit's vertex set: hull vertices (ccw, no three
// collinear) and the facet segments of the hull boundary
struct HullFacets {
    std::vector<Point> hull;
    std::vector<std::pair<Point, Point>> facets;
};

HullFacets hull_and_facets(const Circuit& c);

// vertices whose origin ray meets the circuit (as a closed point set)
// only at that vertex
std::vector<Point> cutpoints(const Circuit& c);

// maximal Euclidean distance from the polygonal path to the chord [x,y];
// the path is given by its vertices and must start at x and end at y
double fluc(const std::vector<Point>& path, Point x, Point y);

} // namespace rclab
