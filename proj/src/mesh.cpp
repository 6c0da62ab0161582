#include "ensheat/mesh.hpp"

#include "ensheat/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace ensheat {

namespace {

using EdgeKey = std::pair<std::size_t, std::size_t>;

EdgeKey make_key(std::size_t a, std::size_t b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

double signed_area(const Point& a, const Point& b, const Point& c)
{
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

} // namespace

Mesh::Mesh(std::vector<Point> vertices, std::vector<Triangle> triangles,
           std::vector<BoundaryEdge> boundary_edges)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)),
      boundary_edges_(std::move(boundary_edges))
{
    const std::size_t nv = vertices_.size();
    if (triangles_.empty())
        throw ValidationError("mesh has no triangles");

    std::map<EdgeKey, int> edge_use;
    for (std::size_t k = 0; k < triangles_.size(); ++k) {
        const auto& t = triangles_[k];
        for (auto v : t)
            if (v >= nv)
                throw ValidationError("triangle " + std::to_string(k) + ": vertex index " +
                                      std::to_string(v) + " out of range");
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
            throw ValidationError("triangle " + std::to_string(k) + ": repeated vertex");
        const double a = signed_area(vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]);
        if (a < 0.0)
            throw ValidationError("triangle " + std::to_string(k) + ": negative area (clockwise)");
        if (!(a > 0.0))
            throw ValidationError("triangle " + std::to_string(k) + ": zero area");
        for (int e = 0; e < 3; ++e)
            ++edge_use[make_key(t[e], t[(e + 1) % 3])];
    }
    for (const auto& [edge, count] : edge_use)
        if (count > 2)
            throw ValidationError("edge (" + std::to_string(edge.first) + ", " +
                                  std::to_string(edge.second) + ") shared by more than 2 triangles");

    std::map<EdgeKey, int> listed;
    for (std::size_t b = 0; b < boundary_edges_.size(); ++b) {
        const auto& be = boundary_edges_[b];
        for (auto v : be.vertices)
            if (v >= nv)
                throw ValidationError("boundary edge " + std::to_string(b) + ": vertex index " +
                                      std::to_string(v) + " out of range");
        if (be.label.empty())
            throw ValidationError("boundary edge " + std::to_string(b) + ": empty label");
        const auto key = make_key(be.vertices[0], be.vertices[1]);
        auto it = edge_use.find(key);
        if (it == edge_use.end() || it->second != 1)
            throw ValidationError("boundary edge " + std::to_string(b) +
                                  " does not belong to exactly one triangle");
        if (++listed[key] > 1)
            throw ValidationError("boundary edge " + std::to_string(b) + " listed twice");
    }
    for (const auto& [edge, count] : edge_use)
        if (count == 1 && !listed.contains(edge))
            throw ValidationError("boundary not covered: edge (" + std::to_string(edge.first) +
                                  ", " + std::to_string(edge.second) + ") has no boundary label");
}

double Mesh::area(std::size_t k) const
{
    const auto& t = triangles_.at(k);
    return signed_area(vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]);
}

double Mesh::total_area() const
{
    double sum = 0.0;
    for (std::size_t k = 0; k < triangles_.size(); ++k)
        sum += area(k);
    return sum;
}

bool Mesh::has_label(std::string_view label) const
{
    return std::any_of(boundary_edges_.begin(), boundary_edges_.end(),
                       [&](const BoundaryEdge& e) { return e.label == label; });
}

std::vector<std::string> Mesh::labels() const
{
    std::vector<std::string> out;
    for (const auto& e : boundary_edges_)
        if (std::find(out.begin(), out.end(), e.label) == out.end())
            out.push_back(e.label);
    return out;
}

Mesh build_structured_mesh(int m)
{
    if (m < 1)
        throw std::invalid_argument("build_structured_mesh: m must be >= 1");
    const auto n = static_cast<std::size_t>(m);
    const auto id = [n](std::size_t i, std::size_t j) { return j * (n + 1) + i; };

    std::vector<Point> vertices;
    vertices.reserve((n + 1) * (n + 1));
    for (std::size_t j = 0; j <= n; ++j)
        for (std::size_t i = 0; i <= n; ++i)
            vertices.push_back({static_cast<double>(i) / m, static_cast<double>(j) / m});

    std::vector<Triangle> triangles;
    triangles.reserve(2 * n * n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }

    std::vector<BoundaryEdge> edges;
    edges.reserve(4 * n);
    for (std::size_t i = 0; i < n; ++i)
        edges.push_back({{id(i, 0), id(i + 1, 0)}, "bottom"});
    for (std::size_t j = 0; j < n; ++j)
        edges.push_back({{id(n, j), id(n, j + 1)}, "right"});
    for (std::size_t i = n; i > 0; --i)
        edges.push_back({{id(i, n), id(i - 1, n)}, "top"});
    for (std::size_t j = n; j > 0; --j)
        edges.push_back({{id(0, j), id(0, j - 1)}, "left"});

    return Mesh(std::move(vertices), std::move(triangles), std::move(edges));
}

namespace {

class LineReader {
public:
    explicit LineReader(std::string_view text) : text_(text) {}

    // Next non-blank line split on whitespace; false at end of input.
    bool next(std::vector<std::string_view>& tokens)
    {
        while (pos_ < text_.size()) {
            auto end = text_.find('\n', pos_);
            if (end == std::string_view::npos)
                end = text_.size();
            auto line = text_.substr(pos_, end - pos_);
            pos_ = end + 1;
            ++line_no_;
            tokens.clear();
            std::size_t i = 0;
            while (i < line.size()) {
                while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
                    ++i;
                std::size_t j = i;
                while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])))
                    ++j;
                if (j > i)
                    tokens.push_back(line.substr(i, j - i));
                i = j;
            }
            if (!tokens.empty())
                return true;
        }
        return false;
    }

    std::size_t line() const { return line_no_; }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_no_ = 0;
};

template <typename T>
T parse_number(std::string_view tok, std::size_t line)
{
    T value{};
    const auto* first = tok.data();
    const auto* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw FormatError("cannot parse number '" + std::string(tok) + "'", line);
    return value;
}

std::size_t read_header(LineReader& in, std::vector<std::string_view>& tok, std::string_view name)
{
    if (!in.next(tok))
        throw FormatError("unexpected end of input, expected '" + std::string(name) + " N'",
                          in.line() + 1);
    if (tok.size() != 2 || tok[0] != name)
        throw FormatError("expected '" + std::string(name) + " N'", in.line());
    return parse_number<std::size_t>(tok[1], in.line());
}

void require_line(LineReader& in, std::vector<std::string_view>& tok, std::size_t width,
                  std::string_view what)
{
    if (!in.next(tok))
        throw FormatError("unexpected end of input in " + std::string(what) + " block",
                          in.line() + 1);
    if (tok.size() != width)
        throw FormatError("expected " + std::to_string(width) + " fields in " + std::string(what) +
                              " line, got " + std::to_string(tok.size()),
                          in.line());
}

} // namespace

Mesh import_mesh(std::string_view text)
{
    LineReader in(text);
    std::vector<std::string_view> tok;

    const auto nv = read_header(in, tok, "vertices");
    std::vector<Point> vertices(nv);
    for (auto& p : vertices) {
        require_line(in, tok, 2, "vertices");
        p.x = parse_number<double>(tok[0], in.line());
        p.y = parse_number<double>(tok[1], in.line());
    }

    const auto nt = read_header(in, tok, "triangles");
    std::vector<Triangle> triangles(nt);
    for (auto& t : triangles) {
        require_line(in, tok, 3, "triangles");
        for (int c = 0; c < 3; ++c)
            t[c] = parse_number<std::size_t>(tok[c], in.line());
    }

    const auto nb = read_header(in, tok, "boundary_edges");
    std::vector<BoundaryEdge> edges(nb);
    for (auto& e : edges) {
        require_line(in, tok, 3, "boundary_edges");
        e.vertices = {parse_number<std::size_t>(tok[0], in.line()),
                      parse_number<std::size_t>(tok[1], in.line())};
        e.label = std::string(tok[2]);
    }

    if (in.next(tok))
        throw FormatError("trailing content after boundary_edges block", in.line());

    return Mesh(std::move(vertices), std::move(triangles), std::move(edges));
}

std::string export_mesh(const Mesh& mesh)
{
    std::string out;
    char buf[64];
    const auto put_double = [&](double v) {
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
        out.append(buf, ptr);
    };

    out += "vertices " + std::to_string(mesh.num_vertices()) + "\n";
    for (const auto& p : mesh.vertices()) {
        put_double(p.x);
        out += ' ';
        put_double(p.y);
        out += '\n';
    }
    out += "triangles " + std::to_string(mesh.num_triangles()) + "\n";
    for (const auto& t : mesh.triangles())
        out += std::to_string(t[0]) + ' ' + std::to_string(t[1]) + ' ' + std::to_string(t[2]) + '\n';
    out += "boundary_edges " + std::to_string(mesh.boundary_edges().size()) + "\n";
    for (const auto& e : mesh.boundary_edges())
        out += std::to_string(e.vertices[0]) + ' ' + std::to_string(e.vertices[1]) + ' ' + e.label +
               '\n';
    return out;
}

double mesh_size(const Mesh& mesh)
{
    double h = 0.0;
    const auto& v = mesh.vertices();
    for (const auto& t : mesh.triangles())
        for (int e = 0; e < 3; ++e) {
            const auto& a = v[t[e]];
            const auto& b = v[t[(e + 1) % 3]];
            h = std::max(h, std::hypot(b.x - a.x, b.y - a.y));
        }
    return h;
}

} // namespace ensheat
