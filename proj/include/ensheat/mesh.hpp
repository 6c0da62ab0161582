#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ensheat {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

using Triangle = std::array<std::size_t, 3>;

struct BoundaryEdge {
    std::array<std::size_t, 2> vertices{};
    std::string label;

    friend bool operator==(const BoundaryEdge&, const BoundaryEdge&) = default;
};

/// Conforming P1 triangulation of a 2D polygon with labelled boundary edges.
///
/// Immutable once constructed; the constructor validates:
///   - triangle indices in range and counter-clockwise with positive area,
///   - every interior edge shared by exactly two triangles,
///   - the listed boundary edges are exactly the edges owned by one triangle,
///     each listed once.
class Mesh {
public:
    Mesh(std::vector<Point> vertices, std::vector<Triangle> triangles,
         std::vector<BoundaryEdge> boundary_edges);

    const std::vector<Point>& vertices() const noexcept { return vertices_; }
    const std::vector<Triangle>& triangles() const noexcept { return triangles_; }
    const std::vector<BoundaryEdge>& boundary_edges() const noexcept { return boundary_edges_; }

    std::size_t num_vertices() const noexcept { return vertices_.size(); }
    std::size_t num_triangles() const noexcept { return triangles_.size(); }

    /// Signed area of triangle `k` (positive for a valid mesh).
    double area(std::size_t k) const;
    double total_area() const;

    bool has_label(std::string_view label) const;
    /// Labels in order of first appearance.
    std::vector<std::string> labels() const;

    friend bool operator==(const Mesh&, const Mesh&) = default;

private:
    std::vector<Point> vertices_;
    std::vector<Triangle> triangles_;
    std::vector<BoundaryEdge> boundary_edges_;
};

/// Unit square split into m x m cells, each cut along the (i,j)-(i+1,j+1)
/// diagonal. Vertex (i, j) has index j*(m+1)+i; boundary labels are
/// "bottom", "right", "top", "left".
Mesh build_structured_mesh(int m);

/// Parses the text format written by export_mesh:
///
///     vertices N      then N lines "x y"
///     triangles M     then M lines "i j k"   (0-based, CCW)
///     boundary_edges B then B lines "i j label"
///
/// Throws FormatError (with line number) on parse failure and
/// ValidationError when the parsed mesh breaks an invariant.
Mesh import_mesh(std::string_view text);

/// Canonical text form; coordinates use the shortest round-trip decimal.
std::string export_mesh(const Mesh& mesh);

/// Longest edge over all triangles.
double mesh_size(const Mesh& mesh);

} // namespace ensheat
