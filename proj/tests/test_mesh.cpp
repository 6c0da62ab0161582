#include "doctest.h"

#include "ensheat/errors.hpp"
#include "ensheat/mesh.hpp"

#include <cmath>
#include <string>

using namespace ensheat;

namespace {

std::string equilateral()
{
    return "vertices 3\n0 0\n1 0\n0.5 0.86602540378443865\n"
           "triangles 1\n0 1 2\n"
           "boundary_edges 3\n0 1 a\n1 2 a\n2 0 b\n";
}

} // namespace

TEST_CASE("structured mesh counts")
{
    auto m1 = build_structured_mesh(1);
    CHECK(m1.num_vertices() == 4);
    CHECK(m1.num_triangles() == 2);
    CHECK(m1.boundary_edges().size() == 4);

    auto m64 = build_structured_mesh(64);
    CHECK(m64.num_vertices() == 4225);
    CHECK(m64.num_triangles() == 8192);
    CHECK(m64.boundary_edges().size() == 256);

    CHECK_THROWS_AS(build_structured_mesh(0), std::invalid_argument);
}

TEST_CASE("structured mesh labels and area")
{
    for (int m : {1, 2, 3, 8, 17}) {
        auto mesh = build_structured_mesh(m);
        CHECK(std::abs(mesh.total_area() - 1.0) < 1e-12);
        for (std::size_t k = 0; k < mesh.num_triangles(); ++k)
            CHECK(mesh.area(k) > 0.0);
        const auto labels = mesh.labels();
        REQUIRE(labels.size() == 4);
        CHECK(labels[0] == "bottom");
        CHECK(labels[1] == "right");
        CHECK(labels[2] == "top");
        CHECK(labels[3] == "left");
        for (const auto& e : mesh.boundary_edges()) {
            const auto& a = mesh.vertices()[e.vertices[0]];
            const auto& b = mesh.vertices()[e.vertices[1]];
            if (e.label == "bottom")
                CHECK((a.y == 0.0 && b.y == 0.0));
            if (e.label == "top")
                CHECK((a.y == 1.0 && b.y == 1.0));
            if (e.label == "left")
                CHECK((a.x == 0.0 && b.x == 0.0));
            if (e.label == "right")
                CHECK((a.x == 1.0 && b.x == 1.0));
        }
    }
    CHECK(build_structured_mesh(8).total_area() == 1.0);
}

TEST_CASE("structured mesh is deterministic")
{
    CHECK(build_structured_mesh(7) == build_structured_mesh(7));
}

TEST_CASE("mesh size")
{
    CHECK(mesh_size(build_structured_mesh(4)) == doctest::Approx(std::sqrt(2.0) / 4).epsilon(1e-15));
    CHECK(mesh_size(build_structured_mesh(64)) == doctest::Approx(std::sqrt(2.0) / 64).epsilon(1e-15));
    CHECK(mesh_size(import_mesh(equilateral())) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("import/export round trip")
{
    const auto m1 = build_structured_mesh(1);
    CHECK(import_mesh(export_mesh(m1)) == m1);

    const auto m5 = build_structured_mesh(5);
    const auto text = export_mesh(m5);
    CHECK(import_mesh(text) == m5);
    CHECK(export_mesh(import_mesh(text)) == text);

    const auto eq = import_mesh(equilateral());
    CHECK(eq.labels().size() == 2);
    CHECK(export_mesh(import_mesh(export_mesh(eq))) == export_mesh(eq));
}

TEST_CASE("import rejects broken meshes")
{
    SUBCASE("clockwise triangle")
    {
        const std::string text = "vertices 3\n0 0\n1 0\n0 1\ntriangles 1\n0 2 1\n"
                                 "boundary_edges 3\n0 2 a\n2 1 a\n1 0 a\n";
        try {
            (void)import_mesh(text);
            FAIL("expected a validation error");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("negative area") != std::string::npos);
        }
    }
    SUBCASE("dangling vertex index")
    {
        const std::string text = "vertices 3\n0 0\n1 0\n0 1\ntriangles 1\n0 1 7\n"
                                 "boundary_edges 3\n0 1 a\n1 2 a\n2 0 a\n";
        CHECK_THROWS_AS(import_mesh(text), ValidationError);
    }
    SUBCASE("unlabelled boundary")
    {
        const std::string text = "vertices 3\n0 0\n1 0\n0 1\ntriangles 1\n0 1 2\n"
                                 "boundary_edges 2\n0 1 a\n1 2 a\n";
        CHECK_THROWS_AS(import_mesh(text), ValidationError);
    }
    SUBCASE("interior edge marked as boundary")
    {
        auto text = export_mesh(build_structured_mesh(1));
        // (0, 3) is the shared diagonal of the two triangles.
        const auto pos = text.find("boundary_edges 4");
        REQUIRE(pos != std::string::npos);
        text.replace(pos, 16, "boundary_edges 5\n0 3 d");
        CHECK_THROWS_AS(import_mesh(text), ValidationError);
    }
    SUBCASE("edge shared by three triangles")
    {
        const std::string text = "vertices 5\n0 0\n1 0\n0.5 1\n0.5 -1\n0.5 0.5\n"
                                 "triangles 3\n0 1 2\n1 0 3\n0 1 4\n"
                                 "boundary_edges 0\n";
        CHECK_THROWS_AS(import_mesh(text), ValidationError);
    }
    SUBCASE("quadrilateral line")
    {
        const std::string text = "vertices 4\n0 0\n1 0\n1 1\n0 1\ntriangles 1\n0 1 2 3\n"
                                 "boundary_edges 0\n";
        try {
            (void)import_mesh(text);
            FAIL("expected a format error");
        } catch (const FormatError& e) {
            CHECK(e.line() == 7);
        }
    }
    SUBCASE("3D coordinates")
    {
        const std::string text = "vertices 3\n0 0 0\n1 0 0\n0 1 0\ntriangles 1\n0 1 2\n"
                                 "boundary_edges 3\n0 1 a\n1 2 a\n2 0 a\n";
        CHECK_THROWS_AS(import_mesh(text), FormatError);
    }
    SUBCASE("garbage number")
    {
        const std::string text = "vertices 3\n0 0\n1 zero\n0 1\n";
        try {
            (void)import_mesh(text);
            FAIL("expected a format error");
        } catch (const FormatError& e) {
            CHECK(e.line() == 3);
        }
    }
    SUBCASE("truncated")
    {
        CHECK_THROWS_AS(import_mesh("vertices 3\n0 0\n"), FormatError);
        CHECK_THROWS_AS(import_mesh(""), FormatError);
    }
}
