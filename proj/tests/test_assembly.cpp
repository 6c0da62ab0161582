#include "doctest.h"

#include "ensheat/assembly.hpp"
#include "ensheat/verification.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace ensheat;

namespace {

Mesh triangle(double x1, double y1, double x2, double y2, double x3, double y3)
{
    return Mesh({{x1, y1}, {x2, y2}, {x3, y3}}, {{0, 1, 2}},
                {{{0, 1}, "base"}, {{1, 2}, "hyp"}, {{2, 0}, "side"}});
}

const std::string kAll[] = {"bottom", "right", "top", "left"};

} // namespace

TEST_CASE("local mass matrix is (A/12)[[2,1,1],[1,2,1],[1,1,2]]")
{
    const auto mesh = triangle(0.1, 0.2, 1.3, 0.4, 0.5, 1.7);
    const double A = mesh.area(0);
    const auto M = assemble_mass(mesh);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(std::abs(M(i, j) - A / 12.0 * (i == j ? 2.0 : 1.0)) < 1e-14);
}

TEST_CASE("local stiffness on the unit right triangle")
{
    const auto mesh = triangle(0, 0, 1, 0, 0, 1);
    const auto K = assemble_stiffness(mesh, {}, nullptr, StiffnessMode::identity);
    const double expect[3][3] = {{1.0, -0.5, -0.5}, {-0.5, 0.5, 0.0}, {-0.5, 0.0, 0.5}};
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(std::abs(K(i, j) - expect[i][j]) < 1e-14);
}

TEST_CASE("boundary mass of one edge is (L/6)[[2,1],[1,2]]")
{
    const auto mesh = triangle(0, 0, 3, 4, -1, 2);
    const double L = 5.0;
    const std::string base[] = {"base"};
    const auto R = assemble_boundary_mass(mesh, base, 1.0);
    CHECK(std::abs(R(0, 0) - L / 3.0) < 1e-14);
    CHECK(std::abs(R(1, 1) - L / 3.0) < 1e-14);
    CHECK(std::abs(R(0, 1) - L / 6.0) < 1e-14);
    CHECK(R(2, 2) == 0.0);

    const auto zero = assemble_boundary_mass(mesh, base, 0.0);
    CHECK(zero.max_abs() == 0.0);

    const std::string bogus[] = {"nope"};
    CHECK_THROWS_AS(assemble_boundary_mass(mesh, bogus, 1.0), std::invalid_argument);
}

TEST_CASE("coefficient stiffness uses the interpolated temperature")
{
    // kappa linear in T is integrated exactly by the 3-point rule:
    // int kappa(T_h) = slope * A * mean(T).
    const auto mesh = triangle(0, 0, 2, 0.5, 0.3, 1.1);
    const double slope = 0.25;
    const ConductivityModel lin(kappa::Linear{slope}, 0.01, 100.0);
    const std::vector<double> T{1.0, 4.0, 7.0};
    const auto Kid = assemble_stiffness(mesh, {}, nullptr, StiffnessMode::identity);
    const auto Kk = assemble_stiffness(mesh, T, &lin, StiffnessMode::kappa_of);
    const double factor = slope * (1.0 + 4.0 + 7.0) / 3.0;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(std::abs(Kk(i, j) - factor * Kid(i, j)) < 1e-13);

    const auto Kp = assemble_stiffness(mesh, T, &lin, StiffnessMode::kappa_prime_of);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(std::abs(Kp(i, j) - (100.0 - factor) * Kid(i, j)) < 1e-12);

    CHECK_THROWS_AS(assemble_stiffness(mesh, T, nullptr, StiffnessMode::kappa_of),
                    std::invalid_argument);
}

TEST_CASE("matrix properties on structured meshes")
{
    const auto mesh = build_structured_mesh(6);
    const auto M = assemble_mass(mesh);
    const auto D = assemble_stiffness(mesh, {}, nullptr, StiffnessMode::identity);
    const ConductivityModel expo(kappa::Exponential{-0.1}, 0.3, 3.0);
    const auto T = interpolate(mesh, [](double x, double y, double) { return 5 * x - 3 * y; }, 0);
    const auto Kk = assemble_stiffness(mesh, T, &expo, StiffnessMode::kappa_of);
    const auto Kp = assemble_stiffness(mesh, T, &expo, StiffnessMode::kappa_prime_of);
    const auto R = assemble_boundary_mass(mesh, kAll, 0.5);

    CHECK(M.is_symmetric());
    CHECK(D.is_symmetric());
    CHECK(Kk.is_symmetric());
    CHECK(Kp.is_symmetric());
    CHECK(R.is_symmetric());

    double total = 0.0;
    for (double v : M.values())
        total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
    for (std::size_t i = 0; i < M.size(); ++i)
        CHECK(M(i, i) > 0.0);

    const std::vector<double> ones(M.size(), 1.0);
    for (const auto* K : {&D, &Kk, &Kp}) {
        const auto r = K->multiply(ones);
        double worst = 0.0;
        for (double v : r)
            worst = std::max(worst, std::abs(v));
        CHECK(worst < 1e-12 * K->max_abs());
    }

    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x(M.size());
        for (auto& v : x)
            v = g(rng);
        CHECK(M.quadratic_form(x) > 0.0);
        CHECK(Kp.quadratic_form(x) >= -1e-12);
    }

    const auto R1 = assemble_boundary_mass(mesh, kAll, 1.0);
    double perimeter = 0.0;
    for (double v : R1.values())
        perimeter += v;
    CHECK(perimeter == doctest::Approx(4.0).epsilon(1e-13));
}

TEST_CASE("fluctuation vanishes for kappa at its upper bound")
{
    const auto mesh = build_structured_mesh(3);
    const auto c = ConductivityModel::constant(2.5);
    const std::vector<double> T(mesh.num_vertices(), 1.0);
    CHECK(assemble_stiffness(mesh, T, &c, StiffnessMode::kappa_prime_of).max_abs() == 0.0);
}

TEST_CASE("load vectors")
{
    const auto mesh = build_structured_mesh(5);
    const auto one = [](double, double, double) { return 1.0; };
    const auto zero = [](double, double, double) { return 0.0; };

    double s = 0.0;
    for (double v : assemble_load(mesh, one, 0.0))
        s += v;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
    for (double v : assemble_load(mesh, zero, 0.0))
        CHECK(v == 0.0);

    s = 0.0;
    for (double v : assemble_boundary_load(mesh, kAll, one, 0.0))
        s += v;
    CHECK(s == doctest::Approx(4.0).epsilon(1e-13));

    const std::string top[] = {"top"};
    const auto bt = assemble_boundary_load(mesh, top, one, 0.0);
    s = 0.0;
    for (std::size_t i = 0; i < bt.size(); ++i) {
        s += bt[i];
        if (bt[i] != 0.0)
            CHECK(mesh.vertices()[i].y == 1.0);
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
    for (double v : assemble_boundary_load(mesh, kAll, zero, 0.0))
        CHECK(v == 0.0);

    // Linear data along an edge is integrated exactly: int_0^1 x phi_i ds.
    const auto bx = assemble_boundary_load(
        build_structured_mesh(1), std::span<const std::string>(top), [](double x, double, double) { return x; }, 0.0);
    CHECK(bx[2] == doctest::Approx(1.0 / 6.0).epsilon(1e-14)); // (0, 1)
    CHECK(bx[3] == doctest::Approx(1.0 / 3.0).epsilon(1e-14)); // (1, 1)
}

TEST_CASE("Gaussian pulse load integrates to the closed form")
{
    // int over [0,1]^2 of 4000 exp(-8 r^2) = 4000 (sqrt(pi/8) erf(sqrt(2)))^2.
    const double exact = 4000.0 * std::pow(std::sqrt(std::numbers::pi / 8.0) * std::erf(std::sqrt(2.0)), 2);
    const auto mesh = build_structured_mesh(64);
    const auto b = assemble_load(mesh, [](double x, double y, double t) { return printing::source(x, y, t); },
                                 0.0004);
    double s = 0.0;
    for (double v : b)
        s += v;
    CHECK(std::abs(s - exact) / exact < 1e-4);

    // Independent tensor Gauss-Legendre check of the closed form itself.
    const double gx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                          0.9061798459386640};
    const double gw[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                          0.4786286704993665, 0.2369268850561891};
    double tensor = 0.0;
    const int cells = 40;
    for (int i = 0; i < cells; ++i)
        for (int a = 0; a < 5; ++a) {
            const double u = (i + 0.5 * (1 + gx[a])) / cells - 0.5;
            tensor += gw[a] * 0.5 / cells * std::exp(-8.0 * u * u);
        }
    CHECK(4000.0 * tensor * tensor == doctest::Approx(exact).epsilon(1e-12));

    for (double v : assemble_load(mesh, [](double x, double y, double t) { return printing::source(x, y, t); },
                                  0.001))
        CHECK(v == 0.0);
}

TEST_CASE("Dirichlet elimination")
{
    const std::vector<double> dense{2, -1, 0, -1, 2, -1, 0, -1, 2};
    SUBCASE("no constrained nodes")
    {
        auto A = SparseSymMatrix::from_dense(3, dense);
        std::vector<double> b{1, 2, 3};
        const auto fp = A.fingerprint();
        apply_dirichlet(A, b, {});
        CHECK(A.fingerprint() == fp);
        CHECK(b == std::vector<double>{1, 2, 3});
    }
    SUBCASE("three-node chain with fixed ends")
    {
        auto A = SparseSymMatrix::from_dense(3, dense);
        std::vector<double> b{0, 1, 0};
        const DirichletValue fixed[] = {{0, 1.0}, {2, 3.0}};
        apply_dirichlet(A, b, fixed);
        CHECK(A.is_symmetric());
        CHECK(A(0, 0) == 1.0);
        CHECK(A(0, 1) == 0.0);
        CHECK(A(1, 2) == 0.0);
        CHECK(b[0] == 1.0);
        CHECK(b[2] == 3.0);
        // Hand elimination: 2 x1 = 1 + 1*1 + 1*3.
        CHECK(b[1] / A(1, 1) == doctest::Approx(2.5));
    }
    SUBCASE("every node constrained")
    {
        auto A = SparseSymMatrix::from_dense(3, dense);
        std::vector<double> b{9, 9, 9};
        const DirichletValue fixed[] = {{0, 4.0}, {1, 5.0}, {2, 6.0}};
        apply_dirichlet(A, b, fixed);
        CHECK(b == std::vector<double>{4, 5, 6});
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j)
                CHECK(A(i, j) == (i == j ? 1.0 : 0.0));
    }
    SUBCASE("duplicates")
    {
        auto A = SparseSymMatrix::from_dense(3, dense);
        std::vector<double> b{0, 0, 0};
        const DirichletValue same[] = {{0, 1.0}, {0, 1.0}};
        CHECK_NOTHROW(apply_dirichlet(A, b, same));
        const DirichletValue clash[] = {{2, 1.0}, {2, 2.0}};
        CHECK_THROWS_AS(apply_dirichlet(A, b, clash), std::invalid_argument);
    }
}

TEST_CASE("interpolation")
{
    const auto mesh = build_structured_mesh(4);
    for (double v : interpolate(mesh, [](double, double, double) { return 5.0; }, 0.0))
        CHECK(v == 5.0);
    const auto ux = interpolate(mesh, [](double x, double, double) { return x; }, 0.0);
    for (std::size_t i = 0; i < ux.size(); ++i)
        CHECK(ux[i] == mesh.vertices()[i].x);
    const auto T = interpolate(mesh, manufactured::temperature, 0.0);
    CHECK(T[2 * 5 + 2] == doctest::Approx(20 * (std::cos(-0.25) * std::sin(-0.25) + 0.25)).epsilon(1e-14));
    CHECK(T[2 * 5 + 2] == doctest::Approx(0.2057446).epsilon(1e-6));
}

TEST_CASE("error norms")
{
    const auto mesh = build_structured_mesh(4);
    const auto lin = [](double x, double y, double) { return 2 * x - 3 * y + 1; };
    const auto lin_grad = [](double, double, double) { return std::array<double, 2>{2, -3}; };
    const auto e = error_norms(mesh, interpolate(mesh, lin, 0.0), lin, lin_grad, 0.0);
    CHECK(e.l2 < 1e-12);
    CHECK(e.h1_semi < 1e-12);

    const std::vector<double> zero(mesh.num_vertices(), 0.0);
    const auto e1 = error_norms(mesh, zero, [](double, double, double) { return 1.0; },
                                [](double, double, double) { return std::array<double, 2>{0, 0}; }, 0.0);
    CHECK(e1.l2 == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(e1.h1_semi == 0.0);

    const auto ex = error_norms(mesh, zero, [](double x, double, double) { return x; },
                                [](double, double, double) { return std::array<double, 2>{1, 0}; }, 0.0);
    CHECK(ex.h1_semi == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(ex.l2 == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-13));

    // Degree-4 rule integrates the square of a quadratic error exactly.
    const auto q = [](double x, double, double) { return x * x; };
    const auto eq = error_norms(mesh, zero, q, [](double x, double, double) {
        return std::array<double, 2>{2 * x, 0};
    }, 0.0);
    CHECK(eq.l2 == doctest::Approx(std::sqrt(1.0 / 5.0)).epsilon(1e-13));
}
